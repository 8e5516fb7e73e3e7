"""Deterministic multi-class CART decision tree over binary features.

Gini impurity, exhaustive split search (binary features make the split set
the feature set), no pruning, no rebalancing, no randomness.  Ties break
to the smallest feature index and the smallest class id so repeated runs
are byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import (
    EmptyCounts,
    EmptyTrainingSet,
    FeatureLengthMismatch,
    InconsistentFeatureLength,
)
from .representation import LabeledInstance


@dataclass(frozen=True)
class TreeParams:
    # min_gain = 0 admits zero-gain splits on impure nodes, which greedy
    # CART needs to memorize XOR-style data (no single feature helps but
    # the combination does); pure nodes never split regardless
    max_depth: int = 25
    min_samples_split: int = 2
    min_gain: float = 0.0

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        if self.min_gain < 0:
            raise ValueError("min_gain must be non-negative")

    def to_dict(self) -> dict:
        return {
            "max_depth": self.max_depth,
            "min_samples_split": self.min_samples_split,
            "min_gain": self.min_gain,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TreeParams":
        return cls(
            max_depth=d.get("max_depth", 25),
            min_samples_split=d.get("min_samples_split", 2),
            min_gain=d.get("min_gain", 0.0),
        )


@dataclass(frozen=True, slots=True)
class SplitNode:
    feature: int  # bit 0 -> left, bit 1 -> right
    left: int
    right: int


@dataclass(frozen=True, slots=True)
class LeafNode:
    predicted: str
    histogram: dict[str, int]


@dataclass(frozen=True)
class DecisionTreeModel:
    nodes: tuple[SplitNode | LeafNode, ...]  # root at index 0
    classes: tuple[str, ...]
    feature_names: tuple[str, ...]
    params: TreeParams

    def to_json(self) -> str:
        out = {
            "classes": list(self.classes),
            "feature_names": list(self.feature_names),
            "params": self.params.to_dict(),
            "nodes": [
                {"kind": "split", "feature": n.feature, "left": n.left, "right": n.right}
                if isinstance(n, SplitNode)
                else {"kind": "leaf", "predicted": n.predicted, "histogram": n.histogram}
                for n in self.nodes
            ],
        }
        return json.dumps(out, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DecisionTreeModel":
        d = json.loads(text)
        nodes: list[SplitNode | LeafNode] = []
        for n in d["nodes"]:
            if n["kind"] == "split":
                nodes.append(SplitNode(n["feature"], n["left"], n["right"]))
            else:
                nodes.append(LeafNode(n["predicted"], dict(n["histogram"])))
        return cls(
            nodes=tuple(nodes),
            classes=tuple(d["classes"]),
            feature_names=tuple(d["feature_names"]),
            params=TreeParams.from_dict(d["params"]),
        )


def gini_impurity(class_counts: dict[str, int]) -> float:
    """1 - sum of squared class probabilities."""
    total = sum(class_counts.values())
    if total <= 0:
        raise EmptyCounts("class counts sum to zero")
    s = 0.0
    for c in sorted(class_counts):
        p = class_counts[c] / total
        s += p * p
    return 1.0 - s


def best_split(instances: list[LabeledInstance]) -> tuple[int, float] | None:
    """Exhaustive Gini split search; ties go to the smallest feature index."""
    if not instances:
        return None
    x, y, classes = _pack(instances)
    return _backend.best_split(x, y, len(classes), TreeParams().min_gain)


def _pack(instances: list[LabeledInstance]):
    k = len(instances[0].features)
    for inst in instances:
        if len(inst.features) != k:
            raise InconsistentFeatureLength(
                f"feature lengths differ: {len(inst.features)} vs {k}"
            )
    classes = sorted({inst.label for inst in instances})
    code = {c: i for i, c in enumerate(classes)}
    x = np.asarray([inst.features for inst in instances], dtype=np.uint8).reshape(
        len(instances), k
    )
    y = np.fromiter((code[inst.label] for inst in instances), dtype=np.int64,
                    count=len(instances))
    return x, y, classes


def fit(
    instances: list[LabeledInstance],
    params: TreeParams = TreeParams(),
    feature_names: list[str] | None = None,
) -> DecisionTreeModel:
    """Recursive CART; deterministic for identical input."""
    if not instances:
        raise EmptyTrainingSet("no training instances")
    x, y, classes = _pack(instances)
    k = x.shape[1]
    if feature_names is None:
        feature_names = [f"f{i}" for i in range(k)]
    if len(feature_names) != k:
        raise InconsistentFeatureLength(
            f"{len(feature_names)} feature names for {k} features"
        )

    nodes: list[SplitNode | LeafNode] = []

    def leaf(idx: np.ndarray) -> int:
        counts = np.bincount(y[idx], minlength=len(classes))
        best = int(np.argmax(counts))  # first max = smallest class id
        histogram = {classes[i]: int(c) for i, c in enumerate(counts) if c}
        nodes.append(LeafNode(predicted=classes[best], histogram=histogram))
        return len(nodes) - 1

    def grow(idx: np.ndarray, depth: int) -> int:
        labels = y[idx]
        if (
            depth >= params.max_depth
            or idx.shape[0] < params.min_samples_split
            or np.all(labels == labels[0])
        ):
            return leaf(idx)
        split = _backend.best_split(
            np.ascontiguousarray(x[idx]), labels, len(classes), params.min_gain
        )
        if split is None:
            return leaf(idx)
        feature, _gain = split
        mask = x[idx, feature] == 1
        pos = len(nodes)
        nodes.append(SplitNode(feature=feature, left=-1, right=-1))
        left = grow(idx[~mask], depth + 1)
        right = grow(idx[mask], depth + 1)
        nodes[pos] = SplitNode(feature=feature, left=left, right=right)
        return pos

    grow(np.arange(len(instances)), 0)
    return DecisionTreeModel(
        nodes=tuple(nodes),
        classes=tuple(classes),
        feature_names=tuple(feature_names),
        params=params,
    )


def predict(model: DecisionTreeModel, features: tuple[int, ...] | list[int]) -> str:
    """Root-to-leaf descent by bits."""
    if len(features) != len(model.feature_names):
        raise FeatureLengthMismatch(
            f"vector has {len(features)} bits, model expects {len(model.feature_names)}"
        )
    node = model.nodes[0]
    while isinstance(node, SplitNode):
        node = model.nodes[node.right if features[node.feature] else node.left]
    return node.predicted


def predict_many(model: DecisionTreeModel, instances: list[LabeledInstance]) -> list[str]:
    return [predict(model, inst.features) for inst in instances]


def render_tree(model: DecisionTreeModel) -> str:
    """Deterministic indented text rendering.

    Internal nodes show the sensor name; leaves show the predicted class
    and the training histogram in class order.
    """
    lines: list[str] = []

    def hist(h: dict[str, int]) -> str:
        inner = ", ".join(f"{c}: {h[c]}" for c in model.classes if c in h)
        return "{" + inner + "}"

    def walk(index: int, prefix: str, branch: str, last: bool) -> None:
        node = model.nodes[index]
        if isinstance(node, LeafNode):
            lines.append(f"{prefix}{branch}leaf {node.predicted} {hist(node.histogram)}")
            return
        lines.append(f"{prefix}{branch}{model.feature_names[node.feature]}")
        child_prefix = prefix if not branch else prefix + ("    " if last else "|   ")
        walk(node.left, child_prefix, "|-- 0: ", False)
        walk(node.right, child_prefix, "`-- 1: ", True)

    walk(0, "", "", True)
    return "\n".join(lines) + "\n"
