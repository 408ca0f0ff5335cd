"""Dataset ingestion: labeled SMILES CSVs, split index files, graph6.

CSV datasets are RFC-4180-style with a header row; task cells are 0/1
(0.0/1.0 accepted) with blanks marking missing labels. Split directories
hold one base-10 index per line in train/valid/test files (optionally
gzipped). graph6 files use the standard short-form encoding (<= 62
nodes), yielding unlabeled graphs: atomic numbers 0, bond type Misc.
"""

from __future__ import annotations

import csv
import gzip
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .molgraph import BondType, GraphCollection, MolecularGraph, build_graph
from .smiles import SmilesError, parse_smiles


class DatasetError(ValueError):
    pass


@dataclass
class SkippedRow:
    row: int  # 0-based molecule row index (header excluded)
    smiles: str
    reason: str


@dataclass
class LabeledDataset:
    """Parsed molecule collection with an N x T binary label matrix."""

    graphs: GraphCollection
    smiles: List[str]
    labels: np.ndarray  # float64, values in {0, 1}
    missing: np.ndarray  # bool, True = label absent
    task_names: List[str]
    skipped: List[SkippedRow] = field(default_factory=list)

    def __post_init__(self):
        n = len(self.graphs)
        if not (len(self.smiles) == self.labels.shape[0] == self.missing.shape[0] == n):
            raise DatasetError("inconsistent row counts across dataset fields")
        if self.labels.shape != self.missing.shape:
            raise DatasetError("labels and missing mask shapes differ")

    @property
    def n_molecules(self) -> int:
        return len(self.graphs)

    @property
    def n_tasks(self) -> int:
        return self.labels.shape[1]

    def subset(self, indices: Sequence[int]) -> "LabeledDataset":
        idx = list(indices)
        return LabeledDataset(
            graphs=[self.graphs[i] for i in idx],
            smiles=[self.smiles[i] for i in idx],
            labels=self.labels[idx],
            missing=self.missing[idx],
            task_names=self.task_names,
        )


def _parse_label_cell(cell: str, path, row: int, column: str) -> Tuple[float, bool]:
    text = cell.strip()
    if text == "":
        return 0.0, True
    if text in ("0", "1"):
        return float(text), False
    try:
        value = float(text)
    except ValueError:
        raise DatasetError(
            f"{path}: row {row}, column {column!r}: non-binary label {cell!r}"
        ) from None
    if value not in (0.0, 1.0):
        raise DatasetError(
            f"{path}: row {row}, column {column!r}: non-binary label {cell!r}"
        )
    return value, False


def load_csv_dataset(
    path,
    smiles_column: str,
    task_columns: Sequence[str],
    strict: bool = True,
) -> LabeledDataset:
    """Load a labeled molecule dataset from a CSV file.

    In strict mode a row whose SMILES fails to parse aborts loading with
    the row number; in lenient mode the row is skipped and recorded in
    the returned dataset's skip manifest.
    """
    path = Path(path)
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rt", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DatasetError(f"{path}: empty CSV (no header)")
        missing_cols = [
            c for c in [smiles_column, *task_columns] if c not in reader.fieldnames
        ]
        if missing_cols:
            raise DatasetError(f"{path}: missing columns {missing_cols}")

        graphs: GraphCollection = []
        smiles: List[str] = []
        labels: List[List[float]] = []
        missing: List[List[bool]] = []
        skipped: List[SkippedRow] = []

        for row_idx, record in enumerate(reader):
            smi = (record[smiles_column] or "").strip()
            try:
                graph = parse_smiles(smi)
            except SmilesError as exc:
                if strict:
                    raise DatasetError(
                        f"{path}: row {row_idx}: SMILES parse failed: {exc}"
                    ) from exc
                skipped.append(SkippedRow(row_idx, smi, str(exc)))
                continue
            row_labels = []
            row_missing = []
            for column in task_columns:
                value, is_missing = _parse_label_cell(
                    record[column] or "", path, row_idx, column
                )
                row_labels.append(value)
                row_missing.append(is_missing)
            graphs.append(graph)
            smiles.append(smi)
            labels.append(row_labels)
            missing.append(row_missing)

    n_tasks = len(task_columns)
    return LabeledDataset(
        graphs=graphs,
        smiles=smiles,
        labels=np.array(labels, dtype=np.float64).reshape(-1, n_tasks),
        missing=np.array(missing, dtype=bool).reshape(-1, n_tasks),
        task_names=list(task_columns),
        skipped=skipped,
    )


def save_csv_dataset(ds: LabeledDataset, path, smiles_column: str = "smiles") -> None:
    """Export a dataset back to CSV; missing labels become blank cells."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([smiles_column, *ds.task_names])
        for i in range(ds.n_molecules):
            row = [ds.smiles[i]]
            for t in range(ds.n_tasks):
                if ds.missing[i, t]:
                    row.append("")
                else:
                    row.append(str(int(ds.labels[i, t])))
            writer.writerow(row)


@dataclass(frozen=True)
class SplitSpec:
    """Disjoint train/valid/test row indices; rows may be unassigned."""

    train: Tuple[int, ...]
    valid: Tuple[int, ...]
    test: Tuple[int, ...]

    def __post_init__(self):
        seen = set(self.train)
        for name, part in (("valid", self.valid), ("test", self.test)):
            for i in part:
                if i in seen:
                    raise DatasetError(f"split index {i} appears in multiple parts")
            seen.update(part)
        for i in seen:
            if i < 0:
                raise DatasetError(f"negative split index {i}")

    def validate_for(self, n_rows: int) -> None:
        for name, part in (
            ("train", self.train),
            ("valid", self.valid),
            ("test", self.test),
        ):
            for i in part:
                if i >= n_rows:
                    raise DatasetError(
                        f"{name} split index {i} out of range for {n_rows} rows"
                    )


def _read_index_file(path: Path) -> Tuple[int, ...]:
    opener = gzip.open if path.suffix == ".gz" else open
    indices = []
    with opener(path, "rt", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            if not text.isdigit():
                raise DatasetError(f"{path}:{lineno}: unparseable index {text!r}")
            indices.append(int(text))
    return tuple(indices)


def load_split(directory) -> SplitSpec:
    """Load train/valid/test index files from a directory.

    Accepts `<name>`, `<name>.txt`, `<name>.csv`, each optionally with a
    `.gz` suffix. Disjointness is verified here; range checking happens
    when the split is bound to a dataset via `validate_for`.
    """
    directory = Path(directory)
    parts = {}
    for name in ("train", "valid", "test"):
        candidates = [
            directory / name,
            directory / f"{name}.txt",
            directory / f"{name}.csv",
            directory / f"{name}.gz",
            directory / f"{name}.txt.gz",
            directory / f"{name}.csv.gz",
        ]
        found = next((c for c in candidates if c.exists()), None)
        if found is None:
            raise DatasetError(f"no {name} index file in {directory}")
        parts[name] = _read_index_file(found)
    return SplitSpec(train=parts["train"], valid=parts["valid"], test=parts["test"])


def save_split(spec: SplitSpec, directory) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for name in ("train", "valid", "test"):
        with open(directory / f"{name}.txt", "w", encoding="utf-8") as fh:
            for i in getattr(spec, name):
                fh.write(f"{i}\n")


def _decode_graph6_line(line: str, lineno: int, path) -> MolecularGraph:
    if line.startswith(">>graph6<<"):
        line = line[len(">>graph6<<") :]
    data = line.encode("ascii", errors="replace")
    for pos, byte in enumerate(data):
        if not 63 <= byte <= 126:
            raise DatasetError(
                f"{path}:{lineno}: invalid graph6 byte {byte} at position {pos}"
            )
    if not data:
        raise DatasetError(f"{path}:{lineno}: empty graph6 record")
    if data[0] == 126:
        raise DatasetError(
            f"{path}:{lineno}: long-form graph6 (>62 nodes) not supported"
        )
    n = data[0] - 63
    n_bits = n * (n - 1) // 2
    n_bytes = (n_bits + 5) // 6
    body = data[1:]
    if len(body) != n_bytes:
        raise DatasetError(
            f"{path}:{lineno}: graph6 bit-vector has {len(body)} bytes, "
            f"expected {n_bytes} for {n} nodes"
        )
    edges = []
    bit = 0
    for v in range(1, n):
        for u in range(v):
            byte = body[bit // 6] - 63
            if (byte >> (5 - bit % 6)) & 1:
                edges.append((u, v, BondType.MISC))
            bit += 1
    return build_graph(n, [0] * n, edges)


def load_graph6(path) -> GraphCollection:
    """Load a graph6 file: one short-form encoded graph per line."""
    path = Path(path)
    opener = gzip.open if path.suffix == ".gz" else open
    graphs: GraphCollection = []
    with opener(path, "rt", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            graphs.append(_decode_graph6_line(text, lineno, path))
    return graphs


def encode_graph6(g: MolecularGraph) -> str:
    """Short-form graph6 encoding of a graph's adjacency (labels dropped)."""
    n = g.node_count
    if n > 62:
        raise DatasetError(f"short-form graph6 supports <= 62 nodes, got {n}")
    present = {(u, v) for u, v, _ in g.edges}
    bits = []
    for v in range(1, n):
        for u in range(v):
            bits.append(1 if (u, v) in present else 0)
    while len(bits) % 6:
        bits.append(0)
    chars = [chr(n + 63)]
    for i in range(0, len(bits), 6):
        value = 0
        for b in bits[i : i + 6]:
            value = (value << 1) | b
        chars.append(chr(value + 63))
    return "".join(chars)
