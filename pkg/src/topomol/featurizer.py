"""Fixed-length feature vectors from graphs.

A fitted model holds the histogram bin count (median molecule size by
default), the fitted value ranges for the two continuous neighbor-degree
statistics, and the mask of columns that were not all-zero on the
training data. Feature families can be toggled for ablation sweeps.

Raw layout, in fixed span order (before the retained-column mask):
degree / neighbor-degree min / max histograms (11 integer bins each by
default), neighbor-degree mean / std and the three edge-score histograms
(n_bins uniform bins each), then per-element sum/mean/std blocks (90
categories, 0 = unknown) and per-bond-type sum/mean/std blocks (5 types).
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .descriptors import adjusted_rand_index, degree_profile, edge_betweenness, scan_scores
from .molgraph import BondType, GraphCollection, MolecularGraph, N_BOND_TYPES

N_ATOM_CATEGORIES = 90  # categories 0..89; 0 marks unknown / out-of-range
REDUCED_DEGREE_BINS = 11  # 0..9 plus an overflow bin for degree >= 10

DEGREE_GROUPS = ("deg", "dn_min", "dn_max")
CONTINUOUS_NODE_GROUPS = ("dn_mean", "dn_std")
EDGE_GROUPS = ("ebc", "ari", "scan")
TOPOLOGICAL_GROUPS = DEGREE_GROUPS + CONTINUOUS_NODE_GROUPS + EDGE_GROUPS


class FeaturizerError(ValueError):
    pass


@dataclass(frozen=True)
class HistogramSpec:
    """Binning rule for one feature.

    integer mode: bin i counts value i for i < n_bins-1; the last bin
    counts values >= n_bins-1. uniform mode: n_bins half-open bins over
    [lo, hi), the last bin right-closed; out-of-range values clamp to the
    nearest edge bin.
    """

    n_bins: int
    lo: float
    hi: float
    mode: str  # "integer" | "uniform"

    def __post_init__(self):
        if self.n_bins < 1:
            raise FeaturizerError(f"n_bins must be positive, got {self.n_bins}")
        if not self.lo < self.hi:
            raise FeaturizerError(f"invalid range [{self.lo}, {self.hi}]")
        if self.mode not in ("integer", "uniform"):
            raise FeaturizerError(f"unknown histogram mode {self.mode!r}")

    def bin_index(self, x: float) -> int:
        if self.mode == "integer":
            i = int(x)
            return min(max(i, 0), self.n_bins - 1)
        span = self.hi - self.lo
        i = int(math.floor((x - self.lo) / span * self.n_bins))
        return min(max(i, 0), self.n_bins - 1)

    def counts(self, values: Sequence[float]) -> np.ndarray:
        out = np.zeros(self.n_bins, dtype=np.float64)
        for x in values:
            out[self.bin_index(x)] += 1.0
        return out


@dataclass(frozen=True)
class FeaturizerConfig:
    """Feature-family switches mirroring the model-improvement ladder."""

    use_degree_features: bool = True
    use_edge_features: bool = True
    use_atom_bond_features: bool = True
    bins: Optional[int] = None  # override the median-size rule
    reduced_degree_bins: bool = True  # 11 integer bins for deg/min/max
    drop_constant_columns: bool = True

    def __post_init__(self):
        if not (
            self.use_degree_features
            or self.use_edge_features
            or self.use_atom_bond_features
        ):
            raise FeaturizerError("all feature families disabled")
        if self.bins is not None and self.bins < 1:
            raise FeaturizerError(f"bins override must be positive, got {self.bins}")


@dataclass
class FeatureLayout:
    """Named column spans of the raw (pre-mask) feature vector."""

    spans: List[Tuple[str, int, int]]  # (group name, start, stop)

    @property
    def width(self) -> int:
        return self.spans[-1][2] if self.spans else 0

    def column_names(self) -> List[str]:
        names = []
        for group, start, stop in self.spans:
            names.extend(f"{group}_{i}" for i in range(stop - start))
        return names

    def column_groups(self) -> List[str]:
        groups = []
        for group, start, stop in self.spans:
            groups.extend([group] * (stop - start))
        return groups


def _build_layout(config: FeaturizerConfig, n_bins: int) -> FeatureLayout:
    spans: List[Tuple[str, int, int]] = []
    pos = 0

    def add(name: str, width: int):
        nonlocal pos
        spans.append((name, pos, pos + width))
        pos += width

    deg_bins = REDUCED_DEGREE_BINS if config.reduced_degree_bins else n_bins
    if config.use_degree_features:
        for name in DEGREE_GROUPS:
            add(name, deg_bins)
        for name in CONTINUOUS_NODE_GROUPS:
            add(name, n_bins)
    if config.use_edge_features:
        for name in EDGE_GROUPS:
            add(name, n_bins)
    if config.use_atom_bond_features:
        add("atom_sum", N_ATOM_CATEGORIES)
        add("atom_mean", N_ATOM_CATEGORIES)
        add("atom_std", N_ATOM_CATEGORIES)
        add("bond_sum", N_BOND_TYPES)
        add("bond_mean", N_BOND_TYPES)
        add("bond_std", N_BOND_TYPES)
    return FeatureLayout(spans)


@dataclass
class FeaturizerModel:
    """Fitted featurization state, frozen at training time."""

    config: FeaturizerConfig
    n_bins: int
    specs: Dict[str, HistogramSpec]
    layout: FeatureLayout
    retained: np.ndarray  # bool mask over the raw vector

    @property
    def raw_width(self) -> int:
        return self.layout.width

    @property
    def n_features(self) -> int:
        return int(self.retained.sum())

    def retained_column_names(self) -> List[str]:
        names = self.layout.column_names()
        return [n for n, keep in zip(names, self.retained) if keep]

    def retained_column_groups(self) -> List[str]:
        groups = self.layout.column_groups()
        return [g for g, keep in zip(groups, self.retained) if keep]

    def to_json(self) -> str:
        payload = {
            "format": "topomol-featurizer",
            "version": 1,
            "config": {
                "use_degree_features": self.config.use_degree_features,
                "use_edge_features": self.config.use_edge_features,
                "use_atom_bond_features": self.config.use_atom_bond_features,
                "bins": self.config.bins,
                "reduced_degree_bins": self.config.reduced_degree_bins,
                "drop_constant_columns": self.config.drop_constant_columns,
            },
            "n_bins": self.n_bins,
            "specs": {
                name: {"n_bins": s.n_bins, "lo": s.lo, "hi": s.hi, "mode": s.mode}
                for name, s in self.specs.items()
            },
            "spans": self.layout.spans,
            "retained": [int(b) for b in self.retained],
        }
        return json.dumps(payload, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "FeaturizerModel":
        payload = json.loads(text)
        if payload.get("format") != "topomol-featurizer":
            raise FeaturizerError("not a featurizer model document")
        if payload.get("version") != 1:
            raise FeaturizerError(f"unsupported model version {payload.get('version')}")
        config = FeaturizerConfig(**payload["config"])
        specs = {
            name: HistogramSpec(**fields) for name, fields in payload["specs"].items()
        }
        layout = FeatureLayout([tuple(s) for s in payload["spans"]])
        retained = np.array(payload["retained"], dtype=bool)
        return cls(config, payload["n_bins"], specs, layout, retained)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path) -> "FeaturizerModel":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(fh.read())


@dataclass
class FeatureMatrix:
    """Row-per-graph feature matrix with its column layout."""

    data: np.ndarray
    column_names: List[str]
    column_groups: List[str]

    @property
    def n_rows(self) -> int:
        return self.data.shape[0]

    @property
    def n_columns(self) -> int:
        return self.data.shape[1]

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(",".join(self.column_names) + "\n")
            for row in self.data:
                fh.write(",".join(repr(float(x)) for x in row) + "\n")

    def write_npz(self, path) -> None:
        np.savez_compressed(
            path,
            data=self.data,
            column_names=np.array(self.column_names),
            column_groups=np.array(self.column_groups),
        )

    @classmethod
    def read_npz(cls, path) -> "FeatureMatrix":
        blob = np.load(path, allow_pickle=False)
        return cls(
            data=blob["data"],
            column_names=[str(x) for x in blob["column_names"]],
            column_groups=[str(x) for x in blob["column_groups"]],
        )


def _lower_median(values: Sequence[int]) -> int:
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def _raw_vector(g: MolecularGraph, model: FeaturizerModel) -> np.ndarray:
    cfg = model.config
    out = np.zeros(model.raw_width, dtype=np.float64)
    pos = 0

    def put(counts: np.ndarray):
        nonlocal pos
        out[pos : pos + counts.shape[0]] = counts
        pos += counts.shape[0]

    needs_profile = cfg.use_degree_features
    if needs_profile:
        profile = degree_profile(g)
        put(model.specs["deg"].counts(profile.deg))
        put(model.specs["dn_min"].counts(profile.dn_min))
        put(model.specs["dn_max"].counts(profile.dn_max))
        put(model.specs["dn_mean"].counts(profile.dn_mean))
        put(model.specs["dn_std"].counts(profile.dn_std))
    if cfg.use_edge_features:
        put(model.specs["ebc"].counts(edge_betweenness(g)))
        put(model.specs["ari"].counts(adjusted_rand_index(g)))
        put(model.specs["scan"].counts(scan_scores(g)))
    if cfg.use_atom_bond_features:
        n = g.node_count
        atom_counts = np.zeros(N_ATOM_CATEGORIES, dtype=np.float64)
        for z in g.atomic_numbers:
            atom_counts[z if 0 <= z < N_ATOM_CATEGORIES else 0] += 1.0
        p = atom_counts / n if n > 0 else np.zeros_like(atom_counts)
        put(atom_counts)
        put(p)
        put(np.sqrt(p * (1.0 - p)))
        m = g.edge_count
        bond_counts = np.zeros(N_BOND_TYPES, dtype=np.float64)
        for _, _, btype in g.edges:
            bond_counts[btype.value] += 1.0
        q = bond_counts / m if m > 0 else np.zeros_like(bond_counts)
        put(bond_counts)
        put(q)
        put(np.sqrt(q * (1.0 - q)))

    assert pos == model.raw_width
    return out


def fit(train: GraphCollection, config: FeaturizerConfig = FeaturizerConfig()) -> FeaturizerModel:
    """Fit featurization state on the training graphs only.

    The bin count is the lower median of node counts (unless overridden),
    the neighbor-degree mean/std ranges are [0, max observed] over all
    training nodes, and the retained-column mask keeps exactly the
    columns that are not all-zero across the training set.
    """
    if len(train) == 0:
        raise FeaturizerError("cannot fit on an empty collection")

    n_bins = config.bins if config.bins is not None else _lower_median(
        [g.node_count for g in train]
    )

    mean_hi = 0.0
    std_hi = 0.0
    if config.use_degree_features:
        for g in train:
            profile = degree_profile(g)
            if profile.dn_mean:
                mean_hi = max(mean_hi, max(profile.dn_mean))
                std_hi = max(std_hi, max(profile.dn_std))
    mean_hi = mean_hi if mean_hi > 0 else 1.0
    std_hi = std_hi if std_hi > 0 else 1.0

    deg_bins = REDUCED_DEGREE_BINS if config.reduced_degree_bins else n_bins
    specs: Dict[str, HistogramSpec] = {}
    if config.use_degree_features:
        for name in DEGREE_GROUPS:
            specs[name] = HistogramSpec(deg_bins, 0.0, float(deg_bins), "integer")
        specs["dn_mean"] = HistogramSpec(n_bins, 0.0, mean_hi, "uniform")
        specs["dn_std"] = HistogramSpec(n_bins, 0.0, std_hi, "uniform")
    if config.use_edge_features:
        specs["ebc"] = HistogramSpec(n_bins, 0.0, 1.0, "uniform")
        specs["ari"] = HistogramSpec(n_bins, -1.0, 1.0, "uniform")
        specs["scan"] = HistogramSpec(n_bins, 0.0, 1.0, "uniform")

    layout = _build_layout(config, n_bins)
    model = FeaturizerModel(
        config=config,
        n_bins=n_bins,
        specs=specs,
        layout=layout,
        retained=np.ones(layout.width, dtype=bool),
    )

    if config.drop_constant_columns:
        nonzero = np.zeros(layout.width, dtype=bool)
        for g in train:
            nonzero |= _raw_vector(g, model) != 0.0
        model.retained = nonzero
    return model


def transform(g: MolecularGraph, model: FeaturizerModel) -> np.ndarray:
    """Feature vector for one graph, with the retained-column mask applied."""
    return _raw_vector(g, model)[model.retained]


def _transform_chunk(args) -> List[np.ndarray]:
    graphs, model = args
    return [_raw_vector(g, model) for g in graphs]


def transform_collection(
    gs: GraphCollection, model: FeaturizerModel, workers: int = 1
) -> FeatureMatrix:
    """Feature matrix for a collection; row i corresponds to gs[i].

    Deterministic regardless of worker count. Per-graph failures are
    re-raised with the offending graph index.
    """
    width = model.raw_width
    raw = np.zeros((len(gs), width), dtype=np.float64)
    if workers <= 1 or len(gs) < 4 * max(workers, 1):
        for i, g in enumerate(gs):
            try:
                raw[i] = _raw_vector(g, model)
            except Exception as exc:
                raise FeaturizerError(f"failed to featurize graph {i}: {exc}") from exc
    else:
        chunk = (len(gs) + workers - 1) // workers
        pieces = [(gs[i : i + chunk], model) for i in range(0, len(gs), chunk)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_transform_chunk, pieces))
        row = 0
        for piece in results:
            for vec in piece:
                raw[row] = vec
                row += 1
    data = raw[:, model.retained]
    return FeatureMatrix(
        data=data,
        column_names=model.retained_column_names(),
        column_groups=model.retained_column_groups(),
    )
