"""Gradient-boosted trees with logistic loss and second-order leaf weights.

Per round, with current probability p_i = sigmoid(F_i):
    g_i = p_i - y_i          h_i = p_i (1 - p_i)
Trees are grown greedily on the split gain
    1/2 [ G_L^2/(H_L+lam) + G_R^2/(H_R+lam) - (G_L+G_R)^2/(H_L+H_R+lam) ]
and each leaf outputs -G/(H+lam). The ensemble score is
sigmoid(base_score + lr * sum of tree outputs) with
base_score = logit(mean y).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dataset import DataMatrix, LabelVector
from ..errors import FitError
from .base import Fingerprint, GbtParams, Prediction, as_xy, scores_to_predictions, sigmoid


@dataclass(frozen=True)
class GbtNode:
    feature: int | None = None
    left: "GbtNode | None" = None
    right: "GbtNode | None" = None
    weight: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.feature is None


def leaf_weight(g_sum: float, h_sum: float, lam: float) -> float:
    return -g_sum / (h_sum + lam)


def split_gain(gl, hl, gr, hr, lam) -> float:
    return 0.5 * (
        gl * gl / (hl + lam)
        + gr * gr / (hr + lam)
        - (gl + gr) ** 2 / (hl + hr + lam)
    )


def find_gain_split(X, g, h, idx, params: GbtParams):
    """Best-gain binary split, ties broken by lowest feature ordinal."""
    cols = X[idx].astype(np.float64)
    g_sub = g[idx]
    h_sub = h[idx]
    gr = g_sub @ cols
    hr = h_sub @ cols
    gl = g_sub.sum() - gr
    hl = h_sub.sum() - hr
    n1 = X[idx].sum(axis=0)
    n0 = len(idx) - n1

    lam = params.l2_leaf_penalty
    gains = split_gain(gl, hl, gr, hr, lam)
    valid = (
        (n0 > 0)
        & (n1 > 0)
        & (hl >= params.min_child_weight)
        & (hr >= params.min_child_weight)
    )
    gains = np.where(valid, gains, -np.inf)
    best = int(np.argmax(gains))
    if gains[best] <= 0.0:
        return None
    mask = X[idx, best] == 1
    return best, idx[~mask], idx[mask]


def grow_gbt_tree(X, g, h, idx, params: GbtParams, depth=0) -> GbtNode:
    if depth < params.max_depth:
        split = find_gain_split(X, g, h, idx, params)
        if split is not None:
            feature, left_idx, right_idx = split
            return GbtNode(
                feature=feature,
                left=grow_gbt_tree(X, g, h, left_idx, params, depth + 1),
                right=grow_gbt_tree(X, g, h, right_idx, params, depth + 1),
            )
    return GbtNode(
        weight=leaf_weight(
            float(g[idx].sum()), float(h[idx].sum()), params.l2_leaf_penalty
        )
    )


def gbt_tree_outputs(root: GbtNode, X) -> np.ndarray:
    out = np.empty(len(X), dtype=np.float64)
    for i, row in enumerate(X):
        node = root
        while not node.is_leaf:
            node = node.right if row[node.feature] else node.left
        out[i] = node.weight
    return out


@dataclass(frozen=True)
class GbtModel:
    kind = "gbt"
    trees: tuple[GbtNode, ...]
    base_score: float
    params: GbtParams
    fingerprint: Fingerprint

    def raw_margin(self, X) -> np.ndarray:
        margin = np.full(len(X), self.base_score, dtype=np.float64)
        for root in self.trees:
            margin += self.params.learning_rate * gbt_tree_outputs(root, X)
        return margin

    def predict(self, matrix: DataMatrix) -> list[Prediction]:
        self.fingerprint.check_matrix(matrix)
        return scores_to_predictions(sigmoid(self.raw_margin(matrix.to_dense())))


def fit_gradient_boosting(
    matrix: DataMatrix,
    y: LabelVector,
    params: GbtParams = GbtParams(),
    fingerprint: Fingerprint | None = None,
) -> GbtModel:
    if params.learning_rate <= 0:
        raise FitError("learning_rate must be positive")
    X, labels = as_xy(matrix, y)
    yf = labels.astype(np.float64)

    mean = float(np.clip(yf.mean(), 1e-12, 1 - 1e-12))
    base_score = float(np.log(mean / (1.0 - mean)))
    margin = np.full(len(yf), base_score)

    all_idx = np.arange(len(yf))
    trees = []
    for _ in range(params.n_rounds):
        p = sigmoid(margin)
        g = p - yf
        h = p * (1.0 - p)
        root = grow_gbt_tree(X, g, h, all_idx, params)
        trees.append(root)
        margin = margin + params.learning_rate * gbt_tree_outputs(root, X)
    return GbtModel(
        trees=tuple(trees),
        base_score=base_score,
        params=params,
        fingerprint=fingerprint or Fingerprint(matrix.n_features),
    )
