"""Core molecular graph data model.

Graphs are undirected heavy-atom graphs: hydrogens are never materialized
as nodes. Disconnected graphs (salts etc.) are legal everywhere. Instances
are immutable after construction and safe to share across workers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple


class GraphError(ValueError):
    """Raised when graph construction inputs violate an invariant."""


class BondType(enum.Enum):
    """The five bond categories used by the bond-statistics block."""

    SINGLE = 0
    DOUBLE = 1
    TRIPLE = 2
    AROMATIC = 3
    MISC = 4


N_BOND_TYPES = len(BondType)

Edge = Tuple[int, int, BondType]


@dataclass(frozen=True)
class MolecularGraph:
    """Undirected labeled molecular graph.

    Edges are stored once per unordered pair with u < v, sorted by (u, v),
    so descriptor outputs have a deterministic edge order. `adjacency` is
    the per-node neighbor set derived from `edges`.
    """

    node_count: int
    atomic_numbers: Tuple[int, ...]
    edges: Tuple[Edge, ...]
    adjacency: Tuple[frozenset, ...]

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        if not 0 <= v < self.node_count:
            raise GraphError(f"node index {v} out of range [0, {self.node_count})")
        return len(self.adjacency[v])

    def neighbors(self, v: int) -> frozenset:
        if not 0 <= v < self.node_count:
            raise GraphError(f"node index {v} out of range [0, {self.node_count})")
        return self.adjacency[v]


def build_graph(
    node_count: int,
    atomic_numbers: Sequence[int],
    edges: Iterable[Tuple[int, int, BondType]],
) -> MolecularGraph:
    """Validate and canonicalize raw graph data into a MolecularGraph.

    Raises GraphError naming the offending item on self-loops, duplicate
    edges, out-of-range indices, inconsistent lengths, or atomic numbers
    outside [0, 118].
    """
    if node_count < 0:
        raise GraphError(f"node_count must be non-negative, got {node_count}")
    if len(atomic_numbers) != node_count:
        raise GraphError(
            f"atomic_numbers has length {len(atomic_numbers)}, expected {node_count}"
        )
    for i, z in enumerate(atomic_numbers):
        if not 0 <= int(z) <= 118:
            raise GraphError(f"atomic number {z} at node {i} outside [0, 118]")

    canonical: List[Edge] = []
    seen = set()
    for u, v, btype in edges:
        if not isinstance(btype, BondType):
            raise GraphError(f"edge ({u}, {v}) has non-BondType label {btype!r}")
        if not (0 <= u < node_count and 0 <= v < node_count):
            raise GraphError(f"edge ({u}, {v}) has index outside [0, {node_count})")
        if u == v:
            raise GraphError(f"self-loop on node {u}")
        if u > v:
            u, v = v, u
        if (u, v) in seen:
            raise GraphError(f"duplicate edge ({u}, {v})")
        seen.add((u, v))
        canonical.append((u, v, btype))
    canonical.sort(key=lambda e: (e[0], e[1]))

    adj: List[set] = [set() for _ in range(node_count)]
    for u, v, _ in canonical:
        adj[u].add(v)
        adj[v].add(u)

    return MolecularGraph(
        node_count=node_count,
        atomic_numbers=tuple(int(z) for z in atomic_numbers),
        edges=tuple(canonical),
        adjacency=tuple(frozenset(s) for s in adj),
    )


def degree(g: MolecularGraph, v: int) -> int:
    """Degree of node v (number of neighbors)."""
    return g.degree(v)


def relabel(g: MolecularGraph, perm: Sequence[int]) -> MolecularGraph:
    """Apply a node permutation: new index of old node i is perm[i]."""
    if sorted(perm) != list(range(g.node_count)):
        raise GraphError("perm is not a permutation of the node indices")
    atomic = [0] * g.node_count
    for old, new in enumerate(perm):
        atomic[new] = g.atomic_numbers[old]
    edges = [(perm[u], perm[v], t) for u, v, t in g.edges]
    return build_graph(g.node_count, atomic, edges)


GraphCollection = List[MolecularGraph]
