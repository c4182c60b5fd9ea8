"""CSV ingestion and feature normalization for the experiment runner."""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

NORMALIZATIONS = ("range_0_pi", "range_0_halfpi", "unit_norm", "none")


@dataclass
class Dataset:
    features: np.ndarray
    labels: np.ndarray | None
    normalization: str
    # per-column (min, max) for the affine schemes, recorded for invertibility
    column_ranges: list[tuple[float, float]] | None = None

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]


def normalize_features(raw: np.ndarray, normalization: str) -> tuple[np.ndarray, list | None]:
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"unknown normalization {normalization!r}")
    if normalization == "none":
        return raw.copy(), None
    if normalization == "unit_norm":
        norms = np.linalg.norm(raw, axis=1, keepdims=True)
        if np.any(norms == 0):
            raise ValueError("cannot unit-normalize a zero row")
        return raw / norms, None
    top = np.pi if normalization == "range_0_pi" else np.pi / 2
    lo = raw.min(axis=0)
    hi = raw.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)  # constant columns map to 0
    scaled = (raw - lo) / span * top
    return scaled, list(zip(lo.tolist(), hi.tolist()))


def ingest_csv(path: str, normalization: str = "none") -> Dataset:
    """Rectangular numeric CSV; a final `label` column (by header) is split off.

    Ragged rows, non-numeric cells and NaNs are rejected.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    header = rows[0]
    has_header = any(not _is_number(cell) for cell in header)
    label_col = None
    if has_header:
        names = [h.strip().lower() for h in header]
        if names and names[-1] == "label":
            label_col = len(names) - 1
        body = rows[1:]
    else:
        body = rows
    if not body:
        raise ValueError(f"{path}: no data rows")
    width = len(body[0])
    values = []
    for i, row in enumerate(body):
        if len(row) != width:
            raise ValueError(f"{path}: ragged row {i + 1} ({len(row)} != {width} cells)")
        parsed = []
        for cell in row:
            if not _is_number(cell):
                raise ValueError(f"{path}: non-numeric cell {cell!r} in row {i + 1}")
            parsed.append(float(cell))
        values.append(parsed)
    mat = np.array(values, dtype=float)
    if np.any(~np.isfinite(mat)):
        raise ValueError(f"{path}: NaN or infinite entries")
    labels = None
    if label_col is not None:
        labels = mat[:, label_col].astype(int)
        mat = np.delete(mat, label_col, axis=1)
    feats, ranges = normalize_features(mat, normalization)
    return Dataset(feats, labels, normalization, ranges)


def _is_number(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def write_csv(path: str, rows: list[dict]) -> None:
    if not rows:
        raise ValueError("no rows to write")
    fields = list(rows[0])
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)
