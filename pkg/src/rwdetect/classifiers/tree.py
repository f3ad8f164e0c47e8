"""CART decision tree for binary features.

Every feature is 0/1, so a split needs no threshold search: the left
branch takes value 0 and the right branch value 1. Split quality is
weighted Gini impurity, compared exactly via integer cross-multiplication
so tie-breaking (lowest feature ordinal wins) is platform-stable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dataset import DataMatrix, LabelVector
from .base import (
    Fingerprint,
    Prediction,
    TreeParams,
    as_xy,
    scores_to_predictions,
)


@dataclass(frozen=True)
class TreeNode:
    """Internal node (feature set, children set) or leaf (score set)."""

    feature: int | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    score: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.feature is None


def find_gini_split(X, y, idx, candidates, min_samples_leaf):
    """Best binary split of rows ``idx`` among candidate features.

    Returns (feature, left_idx, right_idx) or None when no candidate
    yields a strict impurity decrease. ``candidates`` must be sorted
    ascending so the first optimum is the lowest ordinal.

    Weighted Gini of a candidate j is (m - s_j)/m with
    s_j = (pos0^2+neg0^2)/n0 + (pos1^2+neg1^2)/n1, so minimizing impurity
    means maximizing s_j; both sides fit in int64 for any realistic n.
    """
    m = len(idx)
    pos = int(y[idx].sum())
    if pos == 0 or pos == m:
        return None

    cols = X[np.ix_(idx, candidates)].astype(np.int64)
    n1 = cols.sum(axis=0)
    pos1 = y[idx] @ cols
    n0 = m - n1
    pos0 = pos - pos1
    neg1 = n1 - pos1
    neg0 = n0 - pos0

    valid = (n0 >= max(1, min_samples_leaf)) & (n1 >= max(1, min_samples_leaf))
    if not np.any(valid):
        return None

    s_num = (pos0**2 + neg0**2) * n1 + (pos1**2 + neg1**2) * n0
    s_den = n0 * n1
    # Exact-quotient floats: equal rationals divide to identical doubles,
    # so argmax picks the lowest-ordinal candidate on true ties.
    score = np.where(valid, s_num / np.where(s_den > 0, s_den, 1), -np.inf)
    best = int(np.argmax(score))

    # Strict gain test, exact in integers: s > (pos^2 + neg^2)/m.
    neg = m - pos
    if int(s_num[best]) * m <= (pos**2 + neg**2) * int(s_den[best]):
        return None

    feature = int(candidates[best])
    mask = X[idx, feature] == 1
    return feature, idx[~mask], idx[mask]


def grow_tree(X, y, idx, params: TreeParams, depth=0, candidate_picker=None):
    """Recursive CART growth; leaf score is the positive-class fraction."""
    m = len(idx)
    pos = int(y[idx].sum())
    if depth >= params.max_depth or pos == 0 or pos == m or m < 2 * params.min_samples_leaf:
        return TreeNode(score=pos / m)

    if candidate_picker is None:
        candidates = np.arange(X.shape[1])
    else:
        candidates = candidate_picker()
    split = find_gini_split(X, y, idx, candidates, params.min_samples_leaf)
    if split is None:
        return TreeNode(score=pos / m)
    feature, left_idx, right_idx = split
    return TreeNode(
        feature=feature,
        left=grow_tree(X, y, left_idx, params, depth + 1, candidate_picker),
        right=grow_tree(X, y, right_idx, params, depth + 1, candidate_picker),
    )


def tree_scores(root: TreeNode, X) -> np.ndarray:
    out = np.empty(len(X), dtype=np.float64)
    for i, row in enumerate(X):
        node = root
        while not node.is_leaf:
            node = node.right if row[node.feature] else node.left
        out[i] = node.score
    return out


@dataclass(frozen=True)
class DecisionTreeModel:
    kind = "dt"
    root: TreeNode
    params: TreeParams
    fingerprint: Fingerprint

    def predict(self, matrix: DataMatrix) -> list[Prediction]:
        self.fingerprint.check_matrix(matrix)
        return scores_to_predictions(tree_scores(self.root, matrix.to_dense()))


def fit_decision_tree(
    matrix: DataMatrix,
    y: LabelVector,
    params: TreeParams = TreeParams(),
    fingerprint: Fingerprint | None = None,
) -> DecisionTreeModel:
    X, labels = as_xy(matrix, y)
    root = grow_tree(X, labels, np.arange(len(labels)), params)
    return DecisionTreeModel(
        root=root,
        params=params,
        fingerprint=fingerprint or Fingerprint(matrix.n_features),
    )
