"""Multitask random forest with entropy splitting.

Trees are grown on bootstrap samples with a documented splitmix64-based
RNG so that (X, Y, config) fully determines the forest: identical inputs
give bit-identical models and predictions. Splits minimize the unweighted
mean over tasks of weighted binary entropy; ties between equal-quality
splits go to the lowest feature index, then the lowest threshold.
Thresholds are midpoints between consecutive distinct sorted values.

Split search runs on per-column rank codes (features are rank-encoded
once per training run), accumulating per-code class counts instead of
sorting samples at every node; thresholds are decoded back to exact
value midpoints, so the result is identical to a sort-based search.

Missing labels are zero-filled before any tree sees them; the zeros are
then treated as real negatives.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np
from numba import njit

_MAGIC = b"TOPOMOLRF1"
_FORMAT_VERSION = 1

_U64 = np.uint64
_GOLDEN = _U64(0x9E3779B97F4A7C15)
_MIX1 = _U64(0xBF58476D1CE4E5B9)
_MIX2 = _U64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


class ForestError(ValueError):
    pass


class ModelFormatError(ValueError):
    pass


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 1000
    min_samples_split: int = 10
    min_samples_leaf: int = 1
    max_features: Union[int, str] = "sqrt"  # "sqrt" -> floor(sqrt(n_features))
    max_depth: Optional[int] = None
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ForestError(f"n_trees must be >= 1, got {self.n_trees}")
        if self.min_samples_split < 2:
            raise ForestError(
                f"min_samples_split must be >= 2, got {self.min_samples_split}"
            )
        if self.min_samples_leaf < 1:
            raise ForestError(
                f"min_samples_leaf must be >= 1, got {self.min_samples_leaf}"
            )
        if isinstance(self.max_features, str) and self.max_features != "sqrt":
            raise ForestError(f"unknown max_features rule {self.max_features!r}")

    def resolve_max_features(self, n_features: int) -> int:
        if self.max_features == "sqrt":
            mf = int(np.floor(np.sqrt(n_features)))
        else:
            mf = int(self.max_features)
        return max(1, min(mf, n_features))


def _tree_seed(seed: int, tree_index: int) -> int:
    """splitmix64 step of (seed XOR golden-ratio mix of the tree index)."""
    state = (seed & _MASK64) ^ ((0x9E3779B97F4A7C15 * (tree_index + 1)) & _MASK64)
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


@njit(cache=True, inline="always")
def _sm64(state):
    """splitmix64 step: returns (next_state, output)."""
    state = state + _GOLDEN
    z = state
    z = (z ^ (z >> _U64(30))) * _MIX1
    z = (z ^ (z >> _U64(27))) * _MIX2
    z = z ^ (z >> _U64(31))
    return state, z


@njit(cache=True, inline="always")
def _binary_entropy(p):
    if p <= 0.0 or p >= 1.0:
        return 0.0
    q = 1.0 - p
    return -(p * np.log2(p) + q * np.log2(q))


_PACK = 1 << 32  # single-task accumulate: count in high bits, positives low


@njit(cache=True)
def _grow_tree(
    codes,  # uint16 (n_samples, n_features), Fortran order
    uniq_vals,  # float64, flattened per-feature unique values
    uniq_start,  # int64 (n_features + 1,), offsets into uniq_vals
    Y,  # uint8 (n_samples, n_tasks)
    state,  # uint64 RNG state for this tree
    max_features,
    min_samples_split,
    min_samples_leaf,
    max_depth,
    # outputs (preallocated, overwritten per tree)
    feature,  # int32 (cap,)
    threshold,  # float64 (cap,)
    left,  # int32 (cap,)
    right,  # int32 (cap,)
    size,  # int32 (cap,)
    leaf_of,  # int32 (cap,)
    leaf_pos,  # int64 (leaf cap, n_tasks)
    importance,  # float64 (n_features,)
    # scratch
    idx,  # int32 (n_samples,)
    buf,  # int32 (n_samples,)
    perm,  # int64 (n_features,) persistent permutation
    cand,  # int64 (max_features,)
    cnt,  # int64 (max uniques,) also packed count/positives when T == 1
    poscnt,  # int64 (max uniques, n_tasks)
    touched,  # int32 (n_samples + 1,)
    cum,  # int64 (n_tasks,)
    node_pos,  # int64 (n_tasks,)
    stack,  # int64 (2 * n_samples + 2, 4)
):
    n_samples, n_features = codes.shape
    n_tasks = Y.shape[1]
    y0 = Y[:, 0]
    single = n_tasks == 1

    for i in range(n_samples):
        state, z = _sm64(state)
        idx[i] = int64_mod(z, n_samples)
    # Split decisions depend only on the multiset of bootstrap rows, so the
    # draws can be kept row-sorted for sequential memory access.
    idx[:n_samples].sort()

    n_nodes = 1
    n_leaves = 0
    stack[0, 0] = 0  # node id
    stack[0, 1] = 0  # range start in idx
    stack[0, 2] = n_samples  # range stop
    stack[0, 3] = 0  # depth
    top = 1

    while top > 0:
        top -= 1
        node = int(stack[top, 0])
        start = int(stack[top, 1])
        stop = int(stack[top, 2])
        depth = int(stack[top, 3])
        n = stop - start
        fn = float(n)

        if single:
            c0 = 0
            for i in range(start, stop):
                c0 += y0[idx[i]]
            node_pos[0] = c0
        else:
            for t in range(n_tasks):
                node_pos[t] = 0
            for i in range(start, stop):
                row = idx[i]
                for t in range(n_tasks):
                    node_pos[t] += Y[row, t]
        size[node] = n
        left[node] = -1
        right[node] = -1
        feature[node] = -1
        threshold[node] = 0.0

        pure = True
        for t in range(n_tasks):
            if 0 < node_pos[t] < n:
                pure = False
                break

        split_feature = -1
        split_threshold = 0.0
        split_code = -1
        if not (n < min_samples_split or depth >= max_depth or pure):
            parent_imp = 0.0
            for t in range(n_tasks):
                parent_imp += _binary_entropy(node_pos[t] / fn)
            parent_imp /= n_tasks

            # Partial Fisher-Yates over a persistent permutation; visit the
            # sampled candidates in ascending index order (tie rule).
            for j in range(max_features):
                state, z = _sm64(state)
                k = j + int64_mod(z, n_features - j)
                tmp = perm[j]
                perm[j] = perm[k]
                perm[k] = tmp
                cand[j] = perm[j]
            cand[:max_features].sort()

            best_imp = parent_imp
            for j in range(max_features):
                f = int(cand[j])
                col = codes[:, f]
                base = uniq_start[f]
                n_uniq = int(uniq_start[f + 1] - base)
                # Dense path zeroes the whole code range (branchless
                # accumulate); sparse path tracks touched codes. Both visit
                # candidate thresholds in ascending code order, so the
                # chosen split is identical either way.
                dense = n_uniq <= n if single else n_uniq * (n_tasks + 1) <= 2 * n * n_tasks
                n_touched = 0
                if single:
                    pos_total = node_pos[0]
                    if dense:
                        for c in range(n_uniq):
                            cnt[c] = 0
                        for i in range(start, stop):
                            row = idx[i]
                            cnt[int(col[row])] += _PACK + y0[row]
                        n_boundary = n_uniq
                    else:
                        for i in range(start, stop):
                            row = idx[i]
                            c = int(col[row])
                            if cnt[c] == 0:
                                touched[n_touched] = c
                                n_touched += 1
                            cnt[c] += _PACK + y0[row]
                        touched[:n_touched].sort()
                        n_boundary = n_touched
                    cum0 = 0
                    n_left_acc = 0
                    for b in range(n_boundary):
                        c = b if dense else int(touched[b])
                        packed = cnt[c]
                        if packed == 0:
                            continue
                        n_left_acc += packed >> 32
                        cum0 += packed & 0xFFFFFFFF
                        n_right_acc = n - n_left_acc
                        if n_right_acc == 0:
                            break
                        if (
                            n_left_acc < min_samples_leaf
                            or n_right_acc < min_samples_leaf
                        ):
                            continue
                        fl = float(n_left_acc)
                        fr = float(n_right_acc)
                        h = fl * _binary_entropy(cum0 / fl) + fr * _binary_entropy(
                            (pos_total - cum0) / fr
                        )
                        child_imp = h / fn
                        if child_imp < best_imp:
                            best_imp = child_imp
                            split_feature = f
                            split_code = c
                            c_next = c + 1
                            if dense:
                                while cnt[c_next] == 0:
                                    c_next += 1
                            else:
                                c_next = int(touched[b + 1])
                            split_threshold = 0.5 * (
                                uniq_vals[base + c] + uniq_vals[base + c_next]
                            )
                else:
                    if dense:
                        for c in range(n_uniq):
                            cnt[c] = 0
                            for t in range(n_tasks):
                                poscnt[c, t] = 0
                        for i in range(start, stop):
                            row = idx[i]
                            c = int(col[row])
                            cnt[c] += 1
                            for t in range(n_tasks):
                                poscnt[c, t] += Y[row, t]
                        n_boundary = n_uniq
                    else:
                        for i in range(start, stop):
                            row = idx[i]
                            c = int(col[row])
                            if cnt[c] == 0:
                                touched[n_touched] = c
                                n_touched += 1
                                for t in range(n_tasks):
                                    poscnt[c, t] = 0
                            cnt[c] += 1
                            for t in range(n_tasks):
                                poscnt[c, t] += Y[row, t]
                        touched[:n_touched].sort()
                        n_boundary = n_touched
                    for t in range(n_tasks):
                        cum[t] = 0
                    n_left_acc = 0
                    for b in range(n_boundary):
                        c = b if dense else int(touched[b])
                        if cnt[c] == 0:
                            continue
                        n_left_acc += cnt[c]
                        for t in range(n_tasks):
                            cum[t] += poscnt[c, t]
                        n_right_acc = n - n_left_acc
                        if n_right_acc == 0:
                            break
                        if (
                            n_left_acc < min_samples_leaf
                            or n_right_acc < min_samples_leaf
                        ):
                            continue
                        fl = float(n_left_acc)
                        fr = float(n_right_acc)
                        h = 0.0
                        for t in range(n_tasks):
                            h += fl * _binary_entropy(cum[t] / fl)
                            h += fr * _binary_entropy(
                                (node_pos[t] - cum[t]) / fr
                            )
                        child_imp = h / (fn * n_tasks)
                        if child_imp < best_imp:
                            best_imp = child_imp
                            split_feature = f
                            split_code = c
                            c_next = c + 1
                            while cnt[c_next] == 0:
                                c_next += 1
                            split_threshold = 0.5 * (
                                uniq_vals[base + c] + uniq_vals[base + c_next]
                            )
                # Reset the sparse path's touched counter slots.
                for b in range(n_touched):
                    cnt[int(touched[b])] = 0

            if split_feature >= 0:
                importance[split_feature] += (
                    fn * parent_imp - fn * best_imp
                ) / n_samples

        if split_feature < 0:
            leaf_of[node] = n_leaves
            for t in range(n_tasks):
                leaf_pos[n_leaves, t] = node_pos[t]
            n_leaves += 1
            continue

        # Stable partition: left block keeps codes <= split_code.
        col = codes[:, split_feature]
        n_left_cnt = 0
        n_buf = 0
        for i in range(start, stop):
            row = idx[i]
            if int(col[row]) <= split_code:
                idx[start + n_left_cnt] = row
                n_left_cnt += 1
            else:
                buf[n_buf] = row
                n_buf += 1
        for i in range(n_buf):
            idx[start + n_left_cnt + i] = buf[i]

        feature[node] = split_feature
        threshold[node] = split_threshold
        leaf_of[node] = -1
        left_id = n_nodes
        right_id = n_nodes + 1
        n_nodes += 2
        left[node] = left_id
        right[node] = right_id

        stack[top, 0] = right_id
        stack[top, 1] = start + n_left_cnt
        stack[top, 2] = stop
        stack[top, 3] = depth + 1
        top += 1
        stack[top, 0] = left_id
        stack[top, 1] = start
        stack[top, 2] = start + n_left_cnt
        stack[top, 3] = depth + 1
        top += 1

    return n_nodes, n_leaves, state


@njit(cache=True, inline="always")
def int64_mod(z, n):
    return int(z % _U64(n))


@njit(cache=True)
def _predict_sum(
    X, node_base, leaf_base, feature, threshold, left, right, size, leaf_of, leaf_pos, out
):
    """Accumulate per-tree leaf positive fractions into out (n, T)."""
    n_rows = X.shape[0]
    n_tasks = leaf_pos.shape[1]
    n_trees = node_base.shape[0] - 1
    for tree in range(n_trees):
        nb = node_base[tree]
        lb = leaf_base[tree]
        for r in range(n_rows):
            node = 0
            while left[nb + node] >= 0:
                if X[r, feature[nb + node]] <= threshold[nb + node]:
                    node = left[nb + node]
                else:
                    node = right[nb + node]
            s = float(size[nb + node])
            lrow = lb + leaf_of[nb + node]
            for t in range(n_tasks):
                out[r, t] += leaf_pos[lrow, t] / s


def _rank_encode(X: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-column rank codes plus the flattened sorted unique values."""
    n_samples, n_features = X.shape
    codes = np.empty((n_samples, n_features), dtype=np.uint16, order="F")
    uniq_chunks = []
    uniq_start = np.zeros(n_features + 1, dtype=np.int64)
    for f in range(n_features):
        uniq, inverse = np.unique(X[:, f], return_inverse=True)
        if uniq.shape[0] > np.iinfo(np.uint16).max:
            raise ForestError(
                f"feature {f} has {uniq.shape[0]} distinct values; "
                "rank codes support up to 65535"
            )
        codes[:, f] = inverse.astype(np.uint16)
        uniq_chunks.append(uniq.astype(np.float64))
        uniq_start[f + 1] = uniq_start[f] + uniq.shape[0]
    uniq_vals = np.concatenate(uniq_chunks) if uniq_chunks else np.zeros(0)
    return codes, uniq_vals, uniq_start


@dataclass
class Forest:
    """Trained forest: concatenated per-tree arrays with offsets."""

    config: ForestConfig
    n_features: int
    n_tasks: int
    node_base: np.ndarray  # int64, length n_trees + 1
    leaf_base: np.ndarray  # int64, length n_trees + 1
    feature: np.ndarray  # int32, feature index at internal nodes, else -1
    threshold: np.ndarray  # float64
    left: np.ndarray  # int32, child ids local to the tree; -1 marks a leaf
    right: np.ndarray  # int32
    size: np.ndarray  # int32, bootstrap samples reaching the node
    leaf_of: np.ndarray  # int32, leaf slot for leaf nodes, else -1
    leaf_pos: np.ndarray  # int64, (total leaves, n_tasks) positive counts
    importance_raw: np.ndarray  # float64, mean over trees of impurity decrease

    @property
    def n_trees(self) -> int:
        return self.node_base.shape[0] - 1


def train(
    X: np.ndarray,
    Y: np.ndarray,
    missing: Optional[np.ndarray],
    config: ForestConfig,
) -> Forest:
    """Train a forest on binary (possibly multitask) labels.

    Missing labels (where the mask is True) are replaced by 0 before any
    training. Labels must otherwise be exactly 0 or 1.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ForestError(f"X must be 2-D, got shape {X.shape}")
    Y = np.asarray(Y)
    if Y.ndim == 1:
        Y = Y[:, None]
    if X.shape[0] != Y.shape[0]:
        raise ForestError(f"X has {X.shape[0]} rows but Y has {Y.shape[0]}")
    if Y.shape[1] < 1:
        raise ForestError("Y must have at least one task")
    if missing is not None:
        missing = np.asarray(missing, dtype=bool)
        if missing.shape != Y.shape:
            raise ForestError(
                f"missing mask shape {missing.shape} != label shape {Y.shape}"
            )
    observed = ~missing if missing is not None else np.ones(Y.shape, dtype=bool)
    vals = np.asarray(Y, dtype=np.float64)[observed]
    if vals.size and not np.all((vals == 0.0) | (vals == 1.0)):
        raise ForestError("labels must be binary (0 or 1)")
    Y8 = np.ascontiguousarray(
        np.where(observed, np.asarray(Y, dtype=np.float64), 0.0).astype(np.uint8)
    )

    n_samples, n_features = X.shape
    if n_samples < 1:
        raise ForestError("cannot train on an empty matrix")
    n_tasks = Y8.shape[1]
    max_features = config.resolve_max_features(n_features)
    max_depth = config.max_depth if config.max_depth is not None else n_samples + 1

    codes, uniq_vals, uniq_start = _rank_encode(X)
    max_uniq = int((uniq_start[1:] - uniq_start[:-1]).max()) if n_features else 1

    cap = 2 * n_samples + 1
    leaf_cap = n_samples + 1
    feature = np.empty(cap, dtype=np.int32)
    threshold = np.empty(cap, dtype=np.float64)
    left = np.empty(cap, dtype=np.int32)
    right = np.empty(cap, dtype=np.int32)
    size = np.empty(cap, dtype=np.int32)
    leaf_of = np.empty(cap, dtype=np.int32)
    leaf_pos = np.empty((leaf_cap, n_tasks), dtype=np.int64)
    importance = np.zeros(n_features, dtype=np.float64)

    idx = np.empty(n_samples, dtype=np.int32)
    buf = np.empty(n_samples, dtype=np.int32)
    perm = np.arange(n_features, dtype=np.int64)
    cand = np.empty(max_features, dtype=np.int64)
    cnt = np.zeros(max_uniq, dtype=np.int64)
    poscnt = np.empty((max_uniq, n_tasks), dtype=np.int64)
    touched = np.empty(n_samples + 1, dtype=np.int32)
    cum = np.empty(n_tasks, dtype=np.int64)
    node_pos = np.empty(n_tasks, dtype=np.int64)
    stack = np.empty((2 * n_samples + 2, 4), dtype=np.int64)

    parts = []
    for t in range(config.n_trees):
        n_nodes, n_leaves, _ = _grow_tree(
            codes,
            uniq_vals,
            uniq_start,
            Y8,
            _U64(_tree_seed(config.seed, t)),
            max_features,
            config.min_samples_split,
            config.min_samples_leaf,
            max_depth,
            feature,
            threshold,
            left,
            right,
            size,
            leaf_of,
            leaf_pos,
            importance,
            idx,
            buf,
            perm,
            cand,
            cnt,
            poscnt,
            touched,
            cum,
            node_pos,
            stack,
        )
        parts.append(
            (
                feature[:n_nodes].copy(),
                threshold[:n_nodes].copy(),
                left[:n_nodes].copy(),
                right[:n_nodes].copy(),
                size[:n_nodes].copy(),
                leaf_of[:n_nodes].copy(),
                leaf_pos[:n_leaves].copy(),
            )
        )
    importance /= config.n_trees

    node_base = np.zeros(config.n_trees + 1, dtype=np.int64)
    leaf_base = np.zeros(config.n_trees + 1, dtype=np.int64)
    for t, part in enumerate(parts):
        node_base[t + 1] = node_base[t] + part[0].shape[0]
        leaf_base[t + 1] = leaf_base[t] + part[6].shape[0]
    return Forest(
        config=config,
        n_features=n_features,
        n_tasks=n_tasks,
        node_base=node_base,
        leaf_base=leaf_base,
        feature=np.concatenate([p[0] for p in parts]),
        threshold=np.concatenate([p[1] for p in parts]),
        left=np.concatenate([p[2] for p in parts]),
        right=np.concatenate([p[3] for p in parts]),
        size=np.concatenate([p[4] for p in parts]),
        leaf_of=np.concatenate([p[5] for p in parts]),
        leaf_pos=np.concatenate([p[6] for p in parts], axis=0),
        importance_raw=importance,
    )


def predict_proba(forest: Forest, X: np.ndarray) -> np.ndarray:
    """Soft-voted positive-class probabilities, shape (n_rows, n_tasks)."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != forest.n_features:
        raise ForestError(
            f"X must have {forest.n_features} columns, got shape {X.shape}"
        )
    out = np.zeros((X.shape[0], forest.n_tasks), dtype=np.float64)
    _predict_sum(
        X,
        forest.node_base,
        forest.leaf_base,
        forest.feature,
        forest.threshold,
        forest.left,
        forest.right,
        forest.size,
        forest.leaf_of,
        forest.leaf_pos,
        out,
    )
    return out / forest.n_trees


def feature_importance(forest: Forest) -> np.ndarray:
    """Mean impurity decrease per feature, normalized to sum 1."""
    total = forest.importance_raw.sum()
    if total <= 0.0:
        return np.zeros_like(forest.importance_raw)
    return forest.importance_raw / total


def save(forest: Forest) -> bytes:
    """Serialize to a versioned, platform-independent binary payload."""
    header = {
        "config": {
            "n_trees": forest.config.n_trees,
            "min_samples_split": forest.config.min_samples_split,
            "min_samples_leaf": forest.config.min_samples_leaf,
            "max_features": forest.config.max_features,
            "max_depth": forest.config.max_depth,
            "seed": forest.config.seed,
        },
        "n_features": forest.n_features,
        "n_tasks": forest.n_tasks,
        "n_trees": forest.n_trees,
        "total_nodes": int(forest.node_base[-1]),
        "total_leaves": int(forest.leaf_base[-1]),
    }
    header_bytes = json.dumps(header).encode("utf-8")
    blobs = [
        forest.node_base.astype("<i8").tobytes(),
        forest.leaf_base.astype("<i8").tobytes(),
        forest.feature.astype("<i4").tobytes(),
        forest.threshold.astype("<f8").tobytes(),
        forest.left.astype("<i4").tobytes(),
        forest.right.astype("<i4").tobytes(),
        forest.size.astype("<i4").tobytes(),
        forest.leaf_of.astype("<i4").tobytes(),
        forest.leaf_pos.astype("<i8").tobytes(),
        forest.importance_raw.astype("<f8").tobytes(),
    ]
    out = [
        _MAGIC,
        struct.pack("<I", _FORMAT_VERSION),
        struct.pack("<I", len(header_bytes)),
        header_bytes,
    ]
    for blob in blobs:
        out.append(struct.pack("<Q", len(blob)))
        out.append(blob)
    return b"".join(out)


def load(data: bytes) -> Forest:
    """Reconstruct a forest saved by `save`; round-trips bit-identically."""
    view = memoryview(data)
    if len(view) < len(_MAGIC) + 8 or bytes(view[: len(_MAGIC)]) != _MAGIC:
        raise ModelFormatError("not a forest model payload (bad magic)")
    cursor = len(_MAGIC)
    version = struct.unpack_from("<I", view, cursor)[0]
    cursor += 4
    if version != _FORMAT_VERSION:
        raise ModelFormatError(
            f"unsupported forest format version {version} (expected {_FORMAT_VERSION})"
        )
    header_len = struct.unpack_from("<I", view, cursor)[0]
    cursor += 4
    if cursor + header_len > len(view):
        raise ModelFormatError("truncated forest payload (header)")
    header = json.loads(bytes(view[cursor : cursor + header_len]).decode("utf-8"))
    cursor += header_len

    def take(dtype, shape) -> np.ndarray:
        nonlocal cursor
        if cursor + 8 > len(view):
            raise ModelFormatError("truncated forest payload (block length)")
        length = struct.unpack_from("<Q", view, cursor)[0]
        cursor += 8
        if cursor + length > len(view):
            raise ModelFormatError("truncated forest payload (block data)")
        arr = np.frombuffer(view[cursor : cursor + length], dtype=dtype).reshape(shape)
        cursor += length
        return np.ascontiguousarray(arr)

    n_trees = header["n_trees"]
    total_nodes = header["total_nodes"]
    total_leaves = header["total_leaves"]
    n_tasks = header["n_tasks"]
    cfg = header["config"]
    return Forest(
        config=ForestConfig(
            n_trees=cfg["n_trees"],
            min_samples_split=cfg["min_samples_split"],
            min_samples_leaf=cfg["min_samples_leaf"],
            max_features=cfg["max_features"],
            max_depth=cfg["max_depth"],
            seed=cfg["seed"],
        ),
        n_features=header["n_features"],
        n_tasks=n_tasks,
        node_base=take("<i8", (n_trees + 1,)).astype(np.int64),
        leaf_base=take("<i8", (n_trees + 1,)).astype(np.int64),
        feature=take("<i4", (total_nodes,)).astype(np.int32),
        threshold=take("<f8", (total_nodes,)).astype(np.float64),
        left=take("<i4", (total_nodes,)).astype(np.int32),
        right=take("<i4", (total_nodes,)).astype(np.int32),
        size=take("<i4", (total_nodes,)).astype(np.int32),
        leaf_of=take("<i4", (total_nodes,)).astype(np.int32),
        leaf_pos=take("<i8", (total_leaves, n_tasks)).astype(np.int64),
        importance_raw=take("<f8", (header["n_features"],)).astype(np.float64),
    )
