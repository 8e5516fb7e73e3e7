"""Preceding-days cross-validation, classification scores, and temporal
event-error analysis.

Each calendar day is tested with a model trained on all strictly earlier
instance-bearing days.  Per fold: confusion matrix, per-class
precision/recall/F1, micro-F1 (equal to accuracy for single-label
multi-class) and macro-F1 (unweighted mean over classes with support),
plus an event-level error report in the insertion / deletion /
fragmentation / merge taxonomy with underfill/overfill timing.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from typing import Callable

import numpy as np

from . import _backend
from .classifier import DecisionTreeModel, fit, predict_many
from .config import ExperimentConfig
from .errors import (
    EmptyInput,
    EmptySegments,
    InsufficientDays,
    LengthMismatch,
    SpanMismatch,
)
from .model import IDLE, ActivityAnnotation, Dataset, Instant
from .representation import LabeledInstance, featurize, feature_order
from .segmentation import Segment, segments


# --------------------------------------------------------------------------
# folds
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Fold:
    test_day: date
    train_days: tuple[date, ...]


def make_folds(instances: list[LabeledInstance], min_train_days: int = 1) -> list[Fold]:
    """One fold per day with at least min_train_days prior instance-bearing days."""
    if min_train_days < 1:
        raise ValueError("min_train_days must be >= 1")
    days = sorted({inst.local_day for inst in instances})
    return [
        Fold(test_day=d, train_days=tuple(days[:i]))
        for i, d in enumerate(days)
        if i >= min_train_days
    ]


# --------------------------------------------------------------------------
# confusion and scores
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ConfusionMatrix:
    classes: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]  # rows = truth, columns = prediction

    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    def trace(self) -> int:
        return sum(self.counts[i][i] for i in range(len(self.classes)))

    def to_dict(self) -> dict:
        return {"classes": list(self.classes), "counts": [list(r) for r in self.counts]}


@dataclass(frozen=True)
class ClassScore:
    precision: float
    recall: float
    f1: float
    support: int

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "support": self.support,
        }


@dataclass(frozen=True)
class ScoreSet:
    per_class: dict[str, ClassScore]
    micro_f1: float
    macro_f1: float

    def to_dict(self) -> dict:
        return {
            "per_class": {c: s.to_dict() for c, s in self.per_class.items()},
            "micro_f1": self.micro_f1,
            "macro_f1": self.macro_f1,
        }


def confusion_and_scores(
    truth: list[str], pred: list[str], classes: list[str] | tuple[str, ...]
) -> tuple[ConfusionMatrix, ScoreSet]:
    """Standard confusion matrix with 0/0-convention scores."""
    if len(truth) != len(pred):
        raise LengthMismatch(f"{len(truth)} truth labels vs {len(pred)} predictions")
    if not truth:
        raise EmptyInput("no labels")
    index = {c: i for i, c in enumerate(classes)}
    n = len(classes)
    counts = [[0] * n for _ in range(n)]
    for t, p in zip(truth, pred):
        if t not in index:
            raise ValueError(f"truth label {t!r} not in class list")
        if p not in index:
            raise ValueError(f"predicted label {p!r} not in class list")
        counts[index[t]][index[p]] += 1

    per_class: dict[str, ClassScore] = {}
    macro_sum = 0.0
    macro_n = 0
    for i, c in enumerate(classes):
        tp = counts[i][i]
        row = sum(counts[i])
        col = sum(counts[j][i] for j in range(n))
        fp = col - tp
        fn = row - tp
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * tp / (2 * tp + fp + fn) if 2 * tp + fp + fn else 0.0
        per_class[c] = ClassScore(precision, recall, f1, support=row)
        if row > 0:
            macro_sum += f1
            macro_n += 1

    total = len(truth)
    micro = sum(counts[i][i] for i in range(n)) / total
    macro = macro_sum / macro_n if macro_n else 0.0
    cm = ConfusionMatrix(tuple(classes), tuple(tuple(r) for r in counts))
    return cm, ScoreSet(per_class, micro_f1=micro, macro_f1=macro)


# --------------------------------------------------------------------------
# timeline
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Timeline:
    start: Instant
    resolution_ms: int
    labels: tuple[str, ...]

    @property
    def end(self) -> Instant:
        return self.start + self.resolution_ms * len(self.labels)


def build_timeline(
    segments: list[Segment], predictions: list[str], resolution_s: float = 1.0
) -> Timeline:
    """Frame sequence spanning first to last anchor; each frame takes the
    prediction of the nearest anchor (ties go to the earlier one)."""
    if not segments:
        raise EmptySegments("no segments")
    if len(predictions) != len(segments):
        raise LengthMismatch(f"{len(segments)} segments vs {len(predictions)} predictions")
    if not resolution_s > 0:
        raise ValueError("resolution_s must be positive")

    res_ms = round(resolution_s * 1000)
    first = segments[0].anchor
    last = segments[-1].anchor
    n_frames = (last - first) // res_ms + 1

    anchors = np.fromiter((s.anchor for s in segments), dtype=np.int64, count=len(segments))
    label_pool = sorted(set(predictions))
    code = {c: i for i, c in enumerate(label_pool)}
    codes = np.fromiter((code[p] for p in predictions), dtype=np.int64, count=len(predictions))
    times = first + np.arange(n_frames, dtype=np.int64) * res_ms

    frame_codes = _backend.nearest_anchor_codes(anchors, codes, times)
    labels = tuple(label_pool[c] for c in frame_codes)
    return Timeline(start=first, resolution_ms=res_ms, labels=labels)


# --------------------------------------------------------------------------
# event-level error analysis
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class EventErrorReport:
    correct: int
    deletion: int
    insertion: int
    fragmentation: int
    merge: int
    underfill_s: float
    overfill_s: float

    def to_dict(self) -> dict:
        return {
            "counts": {
                "correct": self.correct,
                "deletion": self.deletion,
                "insertion": self.insertion,
                "fragmentation": self.fragmentation,
                "merge": self.merge,
            },
            "timing": {"underfill_s": self.underfill_s, "overfill_s": self.overfill_s},
        }


def _runs(timeline: Timeline) -> list[tuple[str, int, int]]:
    """Maximal same-label frame runs as (label, start_ms, end_ms)."""
    runs: list[tuple[str, int, int]] = []
    res = timeline.resolution_ms
    start_idx = 0
    labels = timeline.labels
    for i in range(1, len(labels) + 1):
        if i == len(labels) or labels[i] != labels[start_idx]:
            runs.append(
                (
                    labels[start_idx],
                    timeline.start + start_idx * res,
                    timeline.start + i * res,
                )
            )
            start_idx = i
    return runs


def _overlap(a: tuple[int, int], b: tuple[int, int]) -> int:
    return max(0, min(a[1], b[1]) - max(a[0], b[0]))


def event_error_analysis(
    timeline: Timeline,
    annotations: list[ActivityAnnotation],
    classes: list[str] | tuple[str, ...],
) -> EventErrorReport:
    """Ward-style event taxonomy over one predicted timeline.

    Ground-truth events are the annotations clipped to the timeline span
    (touching same-activity pieces merged).  Predicted events are maximal
    same-class frame runs; Idle runs are not events.  Per truth event:
    deletion (no overlapping same-class prediction), fragmentation (two or
    more), merge (its single prediction also overlaps another truth event
    of the class), else correct.  Predictions overlapping no truth event of
    their class are insertions.  Underfill is truth time left uncovered by
    matched predictions; overfill is matched prediction time overhanging
    the truth events of the class.
    """
    span = (timeline.start, timeline.end)
    class_set = set(classes)

    truth_by_class: dict[str, list[tuple[int, int]]] = {}
    for ann in sorted(annotations, key=lambda a: (a.start, a.end)):
        if ann.activity_id not in class_set:
            continue
        lo = max(ann.start, span[0])
        hi = min(ann.end, span[1])
        if lo >= hi:
            raise SpanMismatch(
                f"annotation {ann.annotation_id} ([{ann.start}, {ann.end})) lies outside "
                f"the timeline span [{span[0]}, {span[1]})"
            )
        events = truth_by_class.setdefault(ann.activity_id, [])
        if events and events[-1][1] >= lo:
            events[-1] = (events[-1][0], max(events[-1][1], hi))
        else:
            events.append((lo, hi))

    pred_by_class: dict[str, list[tuple[int, int]]] = {}
    for label, s, e in _runs(timeline):
        if label == IDLE or label not in class_set:
            continue
        pred_by_class.setdefault(label, []).append((s, e))

    correct = deletion = insertion = fragmentation = merge = 0
    underfill_ms = 0
    overfill_ms = 0

    for cls in sorted(set(truth_by_class) | set(pred_by_class)):
        truths = truth_by_class.get(cls, [])
        preds = pred_by_class.get(cls, [])

        overlaps_of_truth = [
            [j for j, p in enumerate(preds) if _overlap(t, p) > 0] for t in truths
        ]
        overlaps_of_pred = [
            [i for i, t in enumerate(truths) if _overlap(t, p) > 0] for p in preds
        ]

        for i, t in enumerate(truths):
            matched = overlaps_of_truth[i]
            if not matched:
                deletion += 1
                continue
            underfill_ms += (t[1] - t[0]) - sum(_overlap(t, preds[j]) for j in matched)
            if len(matched) >= 2:
                fragmentation += 1
            elif len(overlaps_of_pred[matched[0]]) >= 2:
                merge += 1
            else:
                correct += 1

        for j, p in enumerate(preds):
            matched = overlaps_of_pred[j]
            if not matched:
                insertion += 1
                continue
            overfill_ms += (p[1] - p[0]) - sum(_overlap(truths[i], p) for i in matched)

    return EventErrorReport(
        correct=correct,
        deletion=deletion,
        insertion=insertion,
        fragmentation=fragmentation,
        merge=merge,
        underfill_s=underfill_ms / 1000.0,
        overfill_s=overfill_ms / 1000.0,
    )


# --------------------------------------------------------------------------
# cross-validated evaluation
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FoldResult:
    test_day: date
    train_days: tuple[date, ...]
    n_train: int
    n_test: int
    confusion: ConfusionMatrix
    scores: ScoreSet
    event_errors: EventErrorReport
    model: DecisionTreeModel

    def to_dict(self) -> dict:
        return {
            "test_day": self.test_day.isoformat(),
            "train_days": [d.isoformat() for d in self.train_days],
            "n_train": self.n_train,
            "n_test": self.n_test,
            "confusion": self.confusion.to_dict(),
            "scores": self.scores.to_dict(),
            "event_errors": self.event_errors.to_dict(),
        }


@dataclass(frozen=True)
class RunSummary:
    dataset_name: str
    classes: tuple[str, ...]
    folds: tuple[FoldResult, ...]
    mean_micro_f1: float
    mean_macro_f1: float
    per_class_mean_f1: dict[str, float]
    event_error_totals: dict[str, int]
    underfill_s: float
    overfill_s: float

    def to_dict(self) -> dict:
        return {
            "dataset_name": self.dataset_name,
            "classes": list(self.classes),
            "n_folds": len(self.folds),
            "mean_micro_f1": self.mean_micro_f1,
            "mean_macro_f1": self.mean_macro_f1,
            "per_class_mean_f1": dict(self.per_class_mean_f1),
            "event_error_totals": dict(self.event_error_totals),
            "underfill_s": self.underfill_s,
            "overfill_s": self.overfill_s,
            "per_fold": {
                f.test_day.isoformat(): {
                    "micro_f1": f.scores.micro_f1,
                    "macro_f1": f.scores.macro_f1,
                }
                for f in self.folds
            },
        }


ProgressSink = Callable[[int, int], None]


def evaluate_cv(
    dataset: Dataset,
    config: ExperimentConfig,
    progress_sink: ProgressSink | None = None,
) -> RunSummary:
    """Segment, featurize, and run preceding-days cross-validation.

    The dataset is expected to be cleaned already (the experiment runner
    applies cleaning rules before calling this).
    """
    resident = config.resident_id
    if resident is None:
        if len(dataset.residents) != 1:
            raise ValueError("resident_id required for multi-resident datasets")
        resident = dataset.residents[0]

    segs = segments(dataset, config.window_s, resident)
    instances = featurize(dataset, segs, config.masked_sensors)
    names = feature_order(dataset, config.masked_sensors)
    folds = make_folds(instances, config.min_train_days)
    if not folds:
        raise InsufficientDays(
            "cross-validation needs at least two instance-bearing days"
        )

    classes = tuple(dataset.activity_ids()) + (IDLE,)
    resident_annotations = [
        a for a in dataset.annotations if a.resident_id == resident
    ]

    by_day: dict[date, list[int]] = {}
    for i, inst in enumerate(instances):
        by_day.setdefault(inst.local_day, []).append(i)

    results: list[FoldResult] = []
    for done, fold in enumerate(folds):
        train_idx = [i for d in fold.train_days for i in by_day[d]]
        test_idx = by_day[fold.test_day]
        train = [instances[i] for i in train_idx]
        test = [instances[i] for i in test_idx]

        model = fit(train, config.tree_params, feature_names=names)
        predictions = predict_many(model, test)
        truth = [inst.label for inst in test]
        confusion, scores = confusion_and_scores(truth, predictions, classes)

        test_segments = [segs[i] for i in test_idx]
        timeline = build_timeline(test_segments, predictions, config.timeline_resolution_s)
        in_span = [
            a
            for a in resident_annotations
            if a.start < timeline.end and a.end > timeline.start
        ]
        event_errors = event_error_analysis(timeline, in_span, classes)

        results.append(
            FoldResult(
                test_day=fold.test_day,
                train_days=fold.train_days,
                n_train=len(train),
                n_test=len(test),
                confusion=confusion,
                scores=scores,
                event_errors=event_errors,
                model=model,
            )
        )
        if progress_sink is not None:
            progress_sink(done + 1, len(folds))

    n = len(results)
    mean_micro = sum(r.scores.micro_f1 for r in results) / n
    mean_macro = sum(r.scores.macro_f1 for r in results) / n
    per_class: dict[str, float] = {}
    for c in classes:
        vals = [
            r.scores.per_class[c].f1
            for r in results
            if r.scores.per_class[c].support > 0
        ]
        if vals:
            per_class[c] = sum(vals) / len(vals)
    totals = {"correct": 0, "deletion": 0, "insertion": 0, "fragmentation": 0, "merge": 0}
    under = over = 0.0
    for r in results:
        e = r.event_errors
        totals["correct"] += e.correct
        totals["deletion"] += e.deletion
        totals["insertion"] += e.insertion
        totals["fragmentation"] += e.fragmentation
        totals["merge"] += e.merge
        under += e.underfill_s
        over += e.overfill_s

    return RunSummary(
        dataset_name=dataset.name,
        classes=classes,
        folds=tuple(results),
        mean_micro_f1=mean_micro,
        mean_macro_f1=mean_macro,
        per_class_mean_f1=per_class,
        event_error_totals=totals,
        underfill_s=under,
        overfill_s=over,
    )
