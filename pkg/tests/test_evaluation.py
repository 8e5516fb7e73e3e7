from __future__ import annotations

import random
from datetime import date

import pytest

from flowar.config import ExperimentConfig
from flowar.errors import (
    EmptyInput,
    EmptySegments,
    InsufficientDays,
    LengthMismatch,
    SpanMismatch,
)
from flowar.evaluation import (
    Timeline,
    build_timeline,
    confusion_and_scores,
    evaluate_cv,
    event_error_analysis,
    make_folds,
)
from flowar.model import IDLE
from flowar.representation import LabeledInstance
from flowar.segmentation import Segment
from tests.conftest import ann, ev, make_dataset
from tests.oracles import accuracy_from_confusion, pairwise_event_errors


def inst(day, label="a"):
    return LabeledInstance((0,), label, 0, day)


D1, D2, D3 = date(2020, 1, 1), date(2020, 1, 2), date(2020, 1, 3)


class TestMakeFolds:
    def test_three_days_two_folds(self):
        folds = make_folds([inst(D1), inst(D2), inst(D3)], min_train_days=1)
        assert [(f.test_day, f.train_days) for f in folds] == [
            (D2, (D1,)), (D3, (D1, D2))]

    def test_single_day_no_folds(self):
        assert make_folds([inst(D1)]) == []

    def test_min_train_days_two(self):
        folds = make_folds([inst(D1), inst(D2), inst(D3)], min_train_days=2)
        assert [f.test_day for f in folds] == [D3]

    def test_demo_home_a_has_12_folds(self, dataset_a):
        from flowar.representation import featurize
        from flowar.segmentation import segments

        segs = segments(dataset_a, 60.0, dataset_a.residents[0])
        instances = featurize(dataset_a, segs)
        assert len(make_folds(instances, 1)) == 12

    def test_no_leakage(self, dataset_a):
        from flowar.representation import featurize
        from flowar.segmentation import segments

        segs = segments(dataset_a, 60.0, dataset_a.residents[0])
        instances = featurize(dataset_a, segs)
        for fold in make_folds(instances, 1):
            assert max(fold.train_days) < fold.test_day


class TestConfusionAndScores:
    def test_perfect_predictions(self):
        truth = ["a", "b", "a", "c"]
        cm, scores = confusion_and_scores(truth, truth, ["a", "b", "c"])
        assert scores.micro_f1 == 1.0
        assert scores.macro_f1 == 1.0
        for i in range(3):
            for j in range(3):
                if i != j:
                    assert cm.counts[i][j] == 0

    def test_binary_f1_half(self):
        # TP=1, FP=1, FN=1 for class a -> F1 = 2*1/(2*1+1+1) = 0.5
        truth = ["a", "b", "a"]
        pred = ["a", "a", "b"]
        _, scores = confusion_and_scores(truth, pred, ["a", "b"])
        assert scores.per_class["a"].f1 == 0.5

    def test_single_class_prediction_on_uniform_truth(self):
        truth = ["a", "b"] * 10
        pred = ["a"] * 20
        _, scores = confusion_and_scores(truth, pred, ["a", "b"])
        assert scores.micro_f1 == 0.5

    def test_zero_support_class_excluded_from_macro(self):
        truth = ["a", "a"]
        pred = ["a", "b"]
        _, scores = confusion_and_scores(truth, pred, ["a", "b", "c"])
        assert scores.per_class["c"].f1 == 0.0
        assert scores.per_class["c"].support == 0
        # macro over supported classes only: just "a" with f1 = 2/3
        assert scores.macro_f1 == pytest.approx(scores.per_class["a"].f1)

    def test_errors(self):
        with pytest.raises(LengthMismatch):
            confusion_and_scores(["a"], [], ["a"])
        with pytest.raises(EmptyInput):
            confusion_and_scores([], [], ["a"])

    def test_micro_equals_trace_accuracy_randomized(self):
        rng = random.Random(42)
        classes = ["a", "b", "c", "d"]
        for _ in range(1000):
            n = rng.randint(1, 30)
            truth = [rng.choice(classes) for _ in range(n)]
            pred = [rng.choice(classes) for _ in range(n)]
            cm, scores = confusion_and_scores(truth, pred, classes)
            assert scores.micro_f1 == accuracy_from_confusion(cm.counts)

    def test_relabeling_permutes_matrix_and_keeps_f1(self):
        rng = random.Random(7)
        classes = ["a", "b", "c"]
        truth = [rng.choice(classes) for _ in range(50)]
        pred = [rng.choice(classes) for _ in range(50)]
        cm, scores = confusion_and_scores(truth, pred, classes)
        mapping = {"a": "y", "b": "x", "c": "z"}
        relabeledms = [mapping[t] for t in truth], [mapping[p] for p in pred]
        classes2 = [mapping[c] for c in classes]
        cm2, scores2 = confusion_and_scores(*relabeledms, classes2)
        assert scores2.micro_f1 == scores.micro_f1
        assert scores2.macro_f1 == pytest.approx(scores.macro_f1)
        for i, ci in enumerate(classes):
            for j, cj in enumerate(classes):
                i2 = classes2.index(mapping[ci])
                j2 = classes2.index(mapping[cj])
                assert cm.counts[i][j] == cm2.counts[i2][j2]


def seg(anchor, label="a", w=60_000):
    return Segment(anchor, anchor - w // 2, anchor - w // 2 + w, label, D1)


class TestBuildTimeline:
    def test_single_segment_single_class(self):
        tl = build_timeline([seg(10_000)], ["x"], 1.0)
        assert set(tl.labels) == {"x"}
        assert len(tl.labels) == 1

    def test_nearest_anchor_with_tie_to_earlier(self):
        tl = build_timeline([seg(0), seg(10_000)], ["first", "second"], 1.0)
        assert len(tl.labels) == 11
        assert tl.labels[:6] == ("first",) * 6  # frames 0-4 plus tie at 5
        assert tl.labels[6:] == ("second",) * 5

    def test_resolution_larger_than_span(self):
        tl = build_timeline([seg(0), seg(10_000)], ["a", "b"], 20.0)
        assert len(tl.labels) == 1

    def test_errors(self):
        with pytest.raises(EmptySegments):
            build_timeline([], [], 1.0)
        with pytest.raises(LengthMismatch):
            build_timeline([seg(0)], [], 1.0)


class TestEventErrorAnalysis:
    def run(self, labels, annotations, classes=("c", "d"), res=1.0, start=0):
        tl = Timeline(start=start, resolution_ms=round(res * 1000), labels=tuple(labels))
        return event_error_analysis(tl, annotations, classes)

    def test_perfect_timeline(self):
        labels = ["c"] * 50 + ["d"] * 50
        anns = [ann(1, "c", 0, 50_000), ann(2, "d", 50_000, 100_000)]
        report = self.run(labels, anns)
        assert report.correct == 2
        assert report.deletion == report.insertion == 0
        assert report.fragmentation == report.merge == 0
        assert report.underfill_s == report.overfill_s == 0.0

    def test_fragmentation_with_underfill(self):
        # truth [0,100s) c; predicted c on [0,40s) and [60s,100s)
        labels = ["c"] * 40 + [IDLE] * 20 + ["c"] * 40
        anns = [ann(1, "c", 0, 100_000)]
        report = self.run(labels, anns)
        assert report.fragmentation == 1
        assert report.underfill_s == 20.0
        assert report.overfill_s == 0.0

    def test_insertion(self):
        labels = [IDLE] * 30 + ["c"] * 10 + [IDLE] * 60
        anns = [ann(1, "d", 0, 100_000)]
        report = self.run(labels, anns)
        assert report.insertion == 1
        assert report.deletion == 1  # the d event has no d prediction

    def test_merge(self):
        # one long predicted c event spans two truth c events
        labels = ["c"] * 100
        anns = [ann(1, "c", 0, 40_000), ann(2, "c", 60_000, 100_000)]
        report = self.run(labels, anns)
        assert report.merge == 2
        assert report.overfill_s == 20.0

    def test_idle_runs_are_not_events(self):
        labels = [IDLE] * 100
        anns = [ann(1, "c", 0, 100_000)]
        report = self.run(labels, anns)
        assert report.insertion == 0
        assert report.deletion == 1

    def test_annotation_outside_span_raises(self):
        labels = ["c"] * 10
        anns = [ann(1, "c", 500_000, 600_000)]
        with pytest.raises(SpanMismatch):
            self.run(labels, anns)

    def test_conservation_randomized_vs_oracle(self):
        rng = random.Random(20_24)
        classes = ("c", "d")
        for _ in range(500):
            n = rng.randint(5, 60)
            labels = []
            while len(labels) < n:
                run_label = rng.choice(["c", "d", IDLE])
                labels.extend([run_label] * rng.randint(1, 8))
            labels = labels[:n]
            anns = []
            t = 0
            i = 1
            while t < n - 2:
                start = t + rng.randint(0, 3)
                end = min(n, start + rng.randint(1, 10))
                if end <= start:
                    break
                if rng.random() < 0.7:
                    anns.append(ann(i, rng.choice(classes), start * 1000, end * 1000))
                    i += 1
                t = end + rng.randint(1, 3)
            if not anns:
                continue
            report = self.run(labels, anns)

            # oracle: pairwise enumeration per class over the same events
            truth_count = len(anns)
            got_total = report.correct + report.deletion + report.fragmentation + report.merge
            assert got_total == truth_count

            expected = {"correct": 0, "deletion": 0, "fragmentation": 0,
                        "merge": 0, "insertion": 0}
            for cls in classes:
                truths = [(a.start, a.end) for a in anns if a.activity_id == cls]
                preds = []
                run_start = None
                for idx in range(n + 1):
                    cur = labels[idx] if idx < n else None
                    prev = labels[idx - 1] if idx > 0 else None
                    if cur == cls and (idx == 0 or prev != cls):
                        run_start = idx
                    if prev == cls and cur != cls:
                        preds.append((run_start * 1000, idx * 1000))
                part = pairwise_event_errors(truths, preds)
                for key in expected:
                    expected[key] += part[key]
            assert report.correct == expected["correct"]
            assert report.deletion == expected["deletion"]
            assert report.fragmentation == expected["fragmentation"]
            assert report.merge == expected["merge"]
            assert report.insertion == expected["insertion"]


class TestEvaluateCV:
    def build_two_day_separable(self):
        # one sensor per activity, two days, perfectly separable
        day_ms = 86_400_000
        events, anns_list = [], []
        eid = aid = 1
        for day in range(2):
            base = day * day_ms
            for hour, (sensor, activity) in enumerate(
                [("s_cook", "cook"), ("s_wash", "wash")] * 3
            ):
                start = base + (8 + hour) * 3_600_000
                events.append(ev(eid, sensor, start, start + 600_000))
                eid += 1
                anns_list.append(ann(aid, activity, start - 60_000, start + 660_000))
                aid += 1
        return make_dataset(events=events, annotations=anns_list)

    def test_perfectly_separable_two_day_toy(self):
        ds = self.build_two_day_separable()
        config = ExperimentConfig(dataset_id="toy", window_s=60.0)
        summary = evaluate_cv(ds, config)
        assert len(summary.folds) == 1
        assert summary.mean_micro_f1 == 1.0

    def test_progress_sink_called_per_fold(self, dataset_a):
        calls = []
        config = ExperimentConfig(dataset_id="home_a", window_s=60.0)
        summary = evaluate_cv(dataset_a, config, progress_sink=lambda d, t: calls.append((d, t)))
        assert calls == [(i + 1, len(summary.folds)) for i in range(len(summary.folds))]

    def test_insufficient_days(self):
        ds = make_dataset(events=[ev(1, "s", 0, 1000)], annotations=[ann(1, "a", 0, 2000)])
        with pytest.raises(InsufficientDays):
            evaluate_cv(ds, ExperimentConfig(dataset_id="toy"))

    def test_no_leakage_in_fold_results(self, dataset_a):
        config = ExperimentConfig(dataset_id="home_a", window_s=120.0)
        summary = evaluate_cv(dataset_a, config)
        for fold in summary.folds:
            assert max(fold.train_days) < fold.test_day

    def test_micro_equals_confusion_accuracy_per_fold(self, dataset_a):
        config = ExperimentConfig(dataset_id="home_a", window_s=60.0)
        summary = evaluate_cv(dataset_a, config)
        for fold in summary.folds:
            assert fold.scores.micro_f1 == accuracy_from_confusion(
                [list(r) for r in fold.confusion.counts]
            )
