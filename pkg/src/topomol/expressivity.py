"""Graph-distinguishing power of the topological features.

Counts pairs of graphs whose topological feature profiles coincide,
either after histogram binning (integer vectors) or as exact value
multisets, which are at least as discriminative as any binning of the
same values. A 1-WL color-refinement oracle is provided for fixtures.

Exact mode keeps values as rationals wherever the descriptor is a
rational function of integer counts: neighbor-degree means, variances
(monotone stand-in for std), the overlap index, and squared structural
similarity (monotone stand-in, always positive). Betweenness values come
from floating-point path-count accumulation and are compared after
rounding to 12 decimal digits so relabelings of one graph compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .descriptors import adjusted_rand_index, edge_betweenness, scan_scores
from .featurizer import HistogramSpec
from .molgraph import GraphCollection, MolecularGraph

EBC_ROUND_DIGITS = 12


class ExpressivityError(ValueError):
    pass


@dataclass(frozen=True)
class TopoFingerprint:
    """Hashable profile of the 8 topological features of one graph."""

    mode: str  # "exact" | "histogram"
    key: tuple

    def __eq__(self, other):
        return (
            isinstance(other, TopoFingerprint)
            and self.mode == other.mode
            and self.key == other.key
        )

    def __hash__(self):
        return hash((self.mode, self.key))


def _exact_node_stats(
    g: MolecularGraph,
) -> Tuple[tuple, tuple, tuple, tuple, tuple]:
    adj = g.adjacency
    deg = [len(adj[v]) for v in range(g.node_count)]
    mins: List[int] = []
    maxs: List[int] = []
    means: List[Fraction] = []
    variances: List[Fraction] = []
    for v in range(g.node_count):
        if not adj[v]:
            mins.append(0)
            maxs.append(0)
            means.append(Fraction(0))
            variances.append(Fraction(0))
            continue
        dn = [deg[u] for u in adj[v]]
        k = len(dn)
        mu = Fraction(sum(dn), k)
        var = Fraction(sum(x * x for x in dn), k) - mu * mu
        mins.append(min(dn))
        maxs.append(max(dn))
        means.append(mu)
        variances.append(var)
    return (
        tuple(sorted(deg)),
        tuple(sorted(mins)),
        tuple(sorted(maxs)),
        tuple(sorted(means)),
        tuple(sorted(variances)),
    )


def _exact_edge_stats(g: MolecularGraph) -> Tuple[tuple, tuple, tuple]:
    n = g.node_count
    aris: List[Fraction] = []
    scan_sq: List[Fraction] = []
    for u, v, _ in g.edges:
        nu, nv = g.adjacency[u], g.adjacency[v]
        du, dv = len(nu), len(nv)
        a = sum(1 for x in (nu if du <= dv else nv) if x in (nv if du <= dv else nu))
        b = du - a - 1
        c = dv - a - 1
        d = n - (du + dv - a)
        denom = (a + b) * (b + d) + (a + c) * (c + d)
        aris.append(Fraction(0) if denom == 0 else Fraction(2 * (a * d - b * c), denom))
        scan_sq.append(Fraction((a + 1) * (a + 1), (du + 1) * (dv + 1)))
    ebc = tuple(sorted(round(x, EBC_ROUND_DIGITS) for x in edge_betweenness(g)))
    return ebc, tuple(sorted(aris)), tuple(sorted(scan_sq))


def _histogram_vector(g: MolecularGraph, n_bins: int) -> tuple:
    from .descriptors import degree_profile

    profile = degree_profile(g)
    int_spec = HistogramSpec(n_bins, 0.0, float(n_bins), "integer")
    node_range = HistogramSpec(n_bins, 0.0, float(max(n_bins - 1, 1)), "uniform")
    unit = HistogramSpec(n_bins, 0.0, 1.0, "uniform")
    signed_unit = HistogramSpec(n_bins, -1.0, 1.0, "uniform")
    parts = [
        int_spec.counts(profile.deg),
        int_spec.counts(profile.dn_min),
        int_spec.counts(profile.dn_max),
        node_range.counts(profile.dn_mean),
        node_range.counts(profile.dn_std),
        unit.counts(edge_betweenness(g)),
        signed_unit.counts(adjusted_rand_index(g)),
        unit.counts(scan_scores(g)),
    ]
    return tuple(int(x) for part in parts for x in part)


def topo_fingerprint(
    g: MolecularGraph, mode: str = "exact", n_bins: Optional[int] = None
) -> TopoFingerprint:
    """Fingerprint of the 8 topological features (no atom/bond blocks)."""
    if mode == "exact":
        node_stats = _exact_node_stats(g)
        edge_stats = _exact_edge_stats(g)
        return TopoFingerprint(
            mode="exact",
            key=(g.node_count, g.edge_count) + node_stats + edge_stats,
        )
    if mode == "histogram":
        if n_bins is None:
            n_bins = g.node_count
        if n_bins < 1:
            raise ExpressivityError(f"n_bins must be positive, got {n_bins}")
        return TopoFingerprint(
            mode="histogram",
            key=(n_bins,) + _histogram_vector(g, n_bins),
        )
    raise ExpressivityError(f"unknown fingerprint mode {mode!r}")


@dataclass
class IndistinguishabilityReport:
    total_graphs: int
    total_pairs: int
    indistinguishable_pairs: int
    bucket_sizes: Dict[int, int]  # bucket size -> number of buckets


def count_indistinguishable(
    gs: GraphCollection, mode: str = "exact", n_bins: Optional[int] = None
) -> IndistinguishabilityReport:
    """Number of unordered graph pairs with identical fingerprints.

    Fingerprints are grouped by hash and verified by full key equality
    within each bucket; all-pairs comparison is never materialized.
    In histogram mode without an explicit bin count, uniform-size
    collections use the common graph size as the bin count.
    """
    if mode == "histogram" and n_bins is None:
        sizes = {g.node_count for g in gs}
        if len(sizes) > 1:
            raise ExpressivityError(
                "histogram mode needs an explicit n_bins for mixed-size collections"
            )
        n_bins = sizes.pop() if sizes else 1
    buckets: Dict[TopoFingerprint, int] = {}
    for g in gs:
        fp = topo_fingerprint(g, mode=mode, n_bins=n_bins)
        buckets[fp] = buckets.get(fp, 0) + 1
    pairs = sum(k * (k - 1) // 2 for k in buckets.values())
    size_hist: Dict[int, int] = {}
    for k in buckets.values():
        size_hist[k] = size_hist.get(k, 0) + 1
    n = len(gs)
    return IndistinguishabilityReport(
        total_graphs=n,
        total_pairs=n * (n - 1) // 2,
        indistinguishable_pairs=pairs,
        bucket_sizes=dict(sorted(size_hist.items())),
    )


@dataclass
class WLColoring:
    """Stable node colors after 1-WL refinement."""

    colors: Tuple[int, ...]
    color_multiset: Tuple[int, ...]
    rounds: int


def _joint_refine(graphs: Sequence[MolecularGraph], max_rounds: int) -> List[List[int]]:
    """Refine all graphs together against a shared signature table so
    color ids are comparable across graphs."""
    colorings = [[0] * g.node_count for g in graphs]
    n_colors = 1
    for _ in range(max_rounds):
        table: Dict[tuple, int] = {}
        signatures = []
        for g, colors in zip(graphs, colorings):
            sigs = [
                (colors[v], tuple(sorted(colors[u] for u in g.adjacency[v])))
                for v in range(g.node_count)
            ]
            signatures.append(sigs)
        for sig in sorted({s for sigs in signatures for s in sigs}):
            table[sig] = len(table)
        colorings = [[table[s] for s in sigs] for sigs in signatures]
        if len(table) == n_colors:
            break
        n_colors = len(table)
    return colorings


def wl1_refine(g: MolecularGraph, max_rounds: Optional[int] = None) -> WLColoring:
    """1-WL color refinement from a uniform initial coloring.

    Each round recolors nodes by (color, sorted neighbor-color multiset)
    and stops once a round no longer splits any color class. Color ids
    are canonical (sorted-signature order), so the result is invariant
    under node relabeling.
    """
    if max_rounds is None:
        max_rounds = max(g.node_count, 1)
    if max_rounds < 1:
        raise ExpressivityError(f"max_rounds must be >= 1, got {max_rounds}")
    rounds = 0
    colors = [0] * g.node_count
    n_colors = 1
    for _ in range(max_rounds):
        sigs = [
            (colors[v], tuple(sorted(colors[u] for u in g.adjacency[v])))
            for v in range(g.node_count)
        ]
        table = {s: i for i, s in enumerate(sorted(set(sigs)))}
        colors = [table[s] for s in sigs]
        rounds += 1
        if len(table) == n_colors:
            break
        n_colors = len(table)
    return WLColoring(
        colors=tuple(colors),
        color_multiset=tuple(sorted(colors)),
        rounds=rounds,
    )


def wl1_distinguishes(g1: MolecularGraph, g2: MolecularGraph) -> bool:
    """True iff 1-WL separates the two graphs (their stable color
    multisets differ). Graphs of different sizes are always separated."""
    if g1.node_count != g2.node_count:
        return True
    # Joint color count can reach 2n, so allow enough rounds to stabilize.
    max_rounds = g1.node_count + g2.node_count + 1
    c1, c2 = _joint_refine([g1, g2], max_rounds)
    return tuple(sorted(c1)) != tuple(sorted(c2))
