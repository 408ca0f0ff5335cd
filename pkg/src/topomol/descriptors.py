"""Topological descriptors computed per graph.

Four families: per-node degree statistics over the multiset of neighbor
degrees, and three per-edge scores (shortest-path betweenness, a
chance-corrected neighborhood-overlap index, and a structural similarity
score over closed neighborhoods). All functions are pure and operate on
immutable graphs, so a corpus driver may fan out one task per graph.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import List

from .molgraph import MolecularGraph


@dataclass
class NodeDegreeProfile:
    """Per-node degree statistics.

    For isolated nodes the neighbor-degree multiset is empty and all four
    statistics are defined as 0. Standard deviation is the population std.
    """

    deg: List[int]
    dn_min: List[int]
    dn_max: List[int]
    dn_mean: List[float]
    dn_std: List[float]


@dataclass
class EdgeScores:
    """Per-edge descriptor values in canonical edge order."""

    ebc: List[float]
    ari: List[float]
    scan: List[float]


def degree_profile(g: MolecularGraph) -> NodeDegreeProfile:
    """Degree and min/max/mean/std of each node's neighbor degrees."""
    adj = g.adjacency
    deg = [len(adj[v]) for v in range(g.node_count)]
    dn_min: List[int] = []
    dn_max: List[int] = []
    dn_mean: List[float] = []
    dn_std: List[float] = []
    for v in range(g.node_count):
        if not adj[v]:
            dn_min.append(0)
            dn_max.append(0)
            dn_mean.append(0.0)
            dn_std.append(0.0)
            continue
        dn = [deg[u] for u in adj[v]]
        mu = sum(dn) / len(dn)
        var = sum((x - mu) ** 2 for x in dn) / len(dn)
        dn_min.append(min(dn))
        dn_max.append(max(dn))
        dn_mean.append(mu)
        dn_std.append(math.sqrt(var))
    return NodeDegreeProfile(deg, dn_min, dn_max, dn_mean, dn_std)


def edge_betweenness(g: MolecularGraph) -> List[float]:
    """Normalized shortest-path betweenness per edge.

    Brandes accumulation over all sources on unweighted BFS shortest
    paths; each unordered pair's unit weight is split equally among its
    shortest paths. The accumulated pair fractions are scaled by
    2/(|V|(|V|-1)), so values lie in [0, 1]. Unreachable pairs contribute
    nothing. The normalization uses the whole graph's |V| even when the
    graph is disconnected.
    """
    n = g.node_count
    m = g.edge_count
    if m == 0:
        return []
    edge_index = {(u, v): i for i, (u, v, _) in enumerate(g.edges)}
    adj = [sorted(g.adjacency[v]) for v in range(n)]
    raw = [0.0] * m

    for s in range(n):
        dist = [-1] * n
        sigma = [0.0] * n
        preds: List[List[int]] = [[] for _ in range(n)]
        dist[s] = 0
        sigma[s] = 1.0
        order: List[int] = []
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        for w in reversed(order):
            for v in preds[w]:
                contrib = sigma[v] / sigma[w] * (1.0 + delta[w])
                key = (v, w) if v < w else (w, v)
                raw[edge_index[key]] += contrib
                delta[v] += contrib

    # Accumulation over all sources counts each unordered pair twice.
    norm = 1.0 / (n * (n - 1))
    return [r * norm for r in raw]


def _common_neighbors(g: MolecularGraph, u: int, v: int) -> int:
    nu, nv = g.adjacency[u], g.adjacency[v]
    if len(nu) > len(nv):
        nu, nv = nv, nu
    return sum(1 for x in nu if x in nv)


def adjusted_rand_index(g: MolecularGraph) -> List[float]:
    """Chance-corrected overlap of the endpoints' neighborhoods, per edge.

    For edge {u, v}: a counts common neighbors, b and c the neighbors
    exclusive to u and to v (the other endpoint excluded), and d the
    vertices adjacent to neither endpoint. A zero denominator yields 0.
    """
    n = g.node_count
    out: List[float] = []
    for u, v, _ in g.edges:
        du = len(g.adjacency[u])
        dv = len(g.adjacency[v])
        a = _common_neighbors(g, u, v)
        b = du - a - 1
        c = dv - a - 1
        d = n - (du + dv - a)
        denom = (a + b) * (b + d) + (a + c) * (c + d)
        out.append(0.0 if denom == 0 else 2.0 * (a * d - b * c) / denom)
    return out


def scan_scores(g: MolecularGraph) -> List[float]:
    """Structural similarity of closed neighborhoods, per edge:
    (|N(u) ∩ N(v)| + 1) / sqrt((deg(u)+1)(deg(v)+1)), in (0, 1]."""
    out: List[float] = []
    for u, v, _ in g.edges:
        a = _common_neighbors(g, u, v)
        du = len(g.adjacency[u])
        dv = len(g.adjacency[v])
        out.append((a + 1) / math.sqrt((du + 1) * (dv + 1)))
    return out


def edge_scores(g: MolecularGraph) -> EdgeScores:
    """All three edge descriptors in canonical edge order."""
    return EdgeScores(
        ebc=edge_betweenness(g),
        ari=adjusted_rand_index(g),
        scan=scan_scores(g),
    )
