"""Random forest: bagged CART trees with per-node feature subsampling."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..dataset import DataMatrix, LabelVector
from ..errors import FitError
from .base import Fingerprint, ForestParams, Prediction, TreeParams, as_xy, scores_to_predictions
from .tree import TreeNode, grow_tree, tree_scores


@dataclass(frozen=True)
class RandomForestModel:
    kind = "rf"
    trees: tuple[TreeNode, ...]
    params: ForestParams
    fingerprint: Fingerprint

    def vote_fractions(self, X) -> np.ndarray:
        votes = np.zeros(len(X), dtype=np.float64)
        for root in self.trees:
            votes += tree_scores(root, X) >= 0.5
        return votes / len(self.trees)

    def predict(self, matrix: DataMatrix) -> list[Prediction]:
        self.fingerprint.check_matrix(matrix)
        return scores_to_predictions(self.vote_fractions(matrix.to_dense()))


def fit_random_forest(
    matrix: DataMatrix,
    y: LabelVector,
    params: ForestParams = ForestParams(),
    fingerprint: Fingerprint | None = None,
) -> RandomForestModel:
    X, labels = as_xy(matrix, y)
    n, d = X.shape
    if n < 2:
        raise FitError("random forest needs at least 2 samples")
    fps = params.features_per_split
    if fps is None:
        fps = max(1, math.isqrt(d) + (math.isqrt(d) ** 2 < d))
    if fps > d:
        raise FitError(f"features_per_split {fps} > n_features {d}")

    tree_params = TreeParams(params.max_depth, params.min_samples_leaf)
    rng = np.random.default_rng(params.seed)
    trees = []
    for _ in range(params.n_trees):
        if params.bootstrap:
            idx = np.sort(rng.integers(0, n, size=n))
        else:
            idx = np.arange(n)

        if fps == d:
            picker = None
        else:
            def picker():
                return np.sort(rng.choice(d, size=fps, replace=False))

        trees.append(grow_tree(X, labels, idx, tree_params, candidate_picker=picker))
    return RandomForestModel(
        trees=tuple(trees),
        params=params,
        fingerprint=fingerprint or Fingerprint(matrix.n_features),
    )
