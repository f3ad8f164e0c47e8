"""Versioned model serialization.

The container is canonical JSON (sorted keys, compact separators, UTF-8),
so re-serializing a round-tripped model is byte-identical:

    {"format_version": 1, "model_kind": ..., "hyperparameters": {...},
     "fingerprint": {...}, "payload": {...}}
"""

from __future__ import annotations

import json
from dataclasses import asdict

from ..errors import ModelFormatError
from .base import (
    Fingerprint,
    ForestParams,
    GbtParams,
    KnnParams,
    LogRegParams,
    SvmParams,
    TreeParams,
)
from .boosting import GbtModel, GbtNode
from .forest import RandomForestModel
from .knn import KnnModel
from .linear import LinearSvmModel, LogRegModel
from .tree import DecisionTreeModel, TreeNode

FORMAT_VERSION = 1

_PARAM_TYPES = {
    "dt": TreeParams,
    "rf": ForestParams,
    "knn": KnnParams,
    "svm": SvmParams,
    "gbt": GbtParams,
    "logreg": LogRegParams,
}


def _encode_tree(node: TreeNode):
    if node.is_leaf:
        return {"s": node.score}
    return {"f": node.feature, "l": _encode_tree(node.left), "r": _encode_tree(node.right)}


def _decode_tree(obj) -> TreeNode:
    if "f" in obj:
        return TreeNode(
            feature=obj["f"], left=_decode_tree(obj["l"]), right=_decode_tree(obj["r"])
        )
    return TreeNode(score=obj["s"])


def _encode_gbt_tree(node: GbtNode):
    if node.is_leaf:
        return {"w": node.weight}
    return {
        "f": node.feature,
        "l": _encode_gbt_tree(node.left),
        "r": _encode_gbt_tree(node.right),
    }


def _decode_gbt_tree(obj) -> GbtNode:
    if "f" in obj:
        return GbtNode(
            feature=obj["f"],
            left=_decode_gbt_tree(obj["l"]),
            right=_decode_gbt_tree(obj["r"]),
        )
    return GbtNode(weight=obj["w"])


def _payload(model):
    kind = model.kind
    if kind == "dt":
        return {"root": _encode_tree(model.root)}
    if kind == "rf":
        return {"trees": [_encode_tree(t) for t in model.trees]}
    if kind == "knn":
        return {
            "rows": [list(r) for r in model.train_rows],
            "labels": list(model.train_labels),
            "n_features": model.n_features,
        }
    if kind == "svm":
        return {"weights": list(model.weights), "bias": model.bias}
    if kind == "gbt":
        return {
            "trees": [_encode_gbt_tree(t) for t in model.trees],
            "base_score": model.base_score,
        }
    if kind == "logreg":
        return {"weights": list(model.weights), "bias": model.bias}
    raise ModelFormatError(f"unknown model kind {kind!r}")


def serialize_model(model) -> bytes:
    doc = {
        "format_version": FORMAT_VERSION,
        "model_kind": model.kind,
        "hyperparameters": asdict(model.params),
        "fingerprint": {
            "n_features": model.fingerprint.n_features,
            "dictionary_sha256": model.fingerprint.dictionary_sha256,
            "selected": list(model.fingerprint.selected),
        },
        "payload": _payload(model),
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")


def deserialize_model(data: bytes):
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ModelFormatError(f"malformed model payload: {exc}") from exc
    if not isinstance(doc, dict):
        raise ModelFormatError("model document must be a JSON object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelFormatError(
            f"unsupported format_version {version!r}, expected {FORMAT_VERSION}"
        )
    kind = doc.get("model_kind")
    if kind not in _PARAM_TYPES:
        raise ModelFormatError(f"unknown model kind {kind!r}")
    try:
        hp = doc["hyperparameters"]
        if kind in ("rf", "forest") and isinstance(hp.get("features_per_split"), float):
            hp["features_per_split"] = int(hp["features_per_split"])
        params = _PARAM_TYPES[kind](**hp)
        fp = doc["fingerprint"]
        fingerprint = Fingerprint(
            n_features=fp["n_features"],
            dictionary_sha256=fp["dictionary_sha256"],
            selected=tuple(fp["selected"]),
        )
        payload = doc["payload"]
        if kind == "dt":
            return DecisionTreeModel(
                root=_decode_tree(payload["root"]), params=params, fingerprint=fingerprint
            )
        if kind == "rf":
            return RandomForestModel(
                trees=tuple(_decode_tree(t) for t in payload["trees"]),
                params=params,
                fingerprint=fingerprint,
            )
        if kind == "knn":
            return KnnModel(
                train_rows=tuple(tuple(r) for r in payload["rows"]),
                train_labels=tuple(payload["labels"]),
                n_features=payload["n_features"],
                params=params,
                fingerprint=fingerprint,
            )
        if kind == "svm":
            return LinearSvmModel(
                weights=tuple(payload["weights"]),
                bias=payload["bias"],
                params=params,
                fingerprint=fingerprint,
            )
        if kind == "gbt":
            return GbtModel(
                trees=tuple(_decode_gbt_tree(t) for t in payload["trees"]),
                base_score=payload["base_score"],
                params=params,
                fingerprint=fingerprint,
            )
        return LogRegModel(
            weights=tuple(payload["weights"]),
            bias=payload["bias"],
            params=params,
            fingerprint=fingerprint,
        )
    except (KeyError, TypeError) as exc:
        raise ModelFormatError(f"truncated or malformed payload: {exc}") from exc
