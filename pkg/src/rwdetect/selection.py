"""Mutual-information feature scoring and top-k selection.

Features and labels are both binary, so MI is computed exactly from the
2x2 contingency table with the plug-in estimator, in nats:

    I = sum_{x,y} (n_xy/n) * ln( (n_xy/n) / ((n_x./n)(n_.y/n)) )

Empty cells contribute zero. Selection keeps the k highest-scoring
features, ties broken by ascending column ordinal, so results are
deterministic across runs and platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import DataMatrix, FeatureDictionary, LabelVector, SampleRecord


@dataclass(frozen=True)
class ContingencyTable:
    """Joint counts of (feature value, label): n_xy = #{feature=x, label=y}."""

    n00: int
    n01: int
    n10: int
    n11: int

    def __post_init__(self):
        if min(self.n00, self.n01, self.n10, self.n11) < 0:
            raise ValueError("contingency counts must be non-negative")

    @property
    def n(self) -> int:
        return self.n00 + self.n01 + self.n10 + self.n11

    def transpose(self) -> "ContingencyTable":
        return ContingencyTable(self.n00, self.n10, self.n01, self.n11)


@dataclass(frozen=True)
class SelectionResult:
    """Per-feature MI scores plus the chosen top-k ordinals."""

    scores: tuple[float, ...]
    selected: tuple[int, ...]
    k: int


def mi_score(t: ContingencyTable) -> float:
    """Exact plug-in mutual information of a 2x2 table, in nats."""
    n = t.n
    if n == 0:
        raise ValueError("empty contingency table")
    nx1 = t.n10 + t.n11
    nx0 = t.n00 + t.n01
    ny1 = t.n01 + t.n11
    ny0 = t.n00 + t.n10
    total = 0.0
    for nxy, nx, ny in (
        (t.n00, nx0, ny0),
        (t.n01, nx0, ny1),
        (t.n10, nx1, ny0),
        (t.n11, nx1, ny1),
    ):
        if nxy > 0:
            total += (nxy / n) * math.log(nxy * n / (nx * ny))
    # Plug-in MI is non-negative; clamp float noise on independent tables.
    return max(total, 0.0)


def score_all(matrix: DataMatrix, y: LabelVector) -> np.ndarray:
    """MI score of every column against the label, vectorized over columns."""
    if len(y) != matrix.n_samples:
        raise ValueError(
            f"labels length {len(y)} != n_samples {matrix.n_samples}"
        )
    n = matrix.n_samples
    d = matrix.n_features
    labels = y.to_array()
    n_pos = int(labels.sum())
    n_neg = n - n_pos

    # Per-column active counts split by class.
    n11 = np.zeros(d, dtype=np.int64)
    n10 = np.zeros(d, dtype=np.int64)
    for row, label in zip(matrix.rows, labels):
        if not row.active:
            continue
        target = n11 if label == 1 else n10
        target[list(row.active)] += 1
    n01 = n_pos - n11
    n00 = n_neg - n10

    nx1 = n10 + n11
    nx0 = n00 + n01
    scores = np.zeros(d, dtype=np.float64)
    for nxy, nx, ny in ((n00, nx0, n_neg), (n01, nx0, n_pos),
                        (n10, nx1, n_neg), (n11, nx1, n_pos)):
        mask = nxy > 0
        if np.any(mask):
            scores[mask] += (nxy[mask] / n) * np.log(
                nxy[mask] * n / (nx[mask] * ny)
            )
    np.maximum(scores, 0.0, out=scores)
    return scores


def select_k_best(scores, k: int) -> SelectionResult:
    """Top-k ordinals by score descending, ties by ascending ordinal."""
    scores = np.asarray(scores, dtype=np.float64)
    d = len(scores)
    if not 1 <= k <= d:
        raise ValueError(f"k={k} out of range [1, {d}]")
    order = sorted(range(d), key=lambda j: (-scores[j], j))
    return SelectionResult(
        scores=tuple(float(s) for s in scores),
        selected=tuple(order[:k]),
        k=k,
    )


def project(matrix: DataMatrix, selected) -> DataMatrix:
    """Column subset re-encoded into the new ordinal space."""
    selected = list(selected)
    if len(set(selected)) != len(selected):
        raise ValueError("duplicate ordinal in selection")
    for j in selected:
        if not 0 <= j < matrix.n_features:
            raise ValueError(f"ordinal {j} out of range [0, {matrix.n_features})")
    remap = {old: new for new, old in enumerate(selected)}
    rows = tuple(
        SampleRecord(
            r.sample_id,
            r.family_id,
            tuple(sorted(remap[j] for j in r.active if j in remap)),
        )
        for r in matrix.rows
    )
    return DataMatrix(len(selected), rows)


def project_row(active, selected) -> tuple[int, ...]:
    """Re-encode one sparse row into the selected-column space."""
    remap = {old: new for new, old in enumerate(selected)}
    return tuple(sorted(remap[j] for j in active if j in remap))


def write_scores_csv(path, dictionary: FeatureDictionary, scores) -> None:
    """Dump ``feature_name,mi_score`` rows sorted by score descending."""
    order = sorted(range(len(scores)), key=lambda j: (-scores[j], j))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("feature_name,mi_score\n")
        for j in order:
            fh.write(f"{dictionary.names[j]},{scores[j]:.12g}\n")
