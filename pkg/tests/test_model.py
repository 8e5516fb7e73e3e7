from __future__ import annotations

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowar.errors import InvariantViolation, MalformedRow, MissingFile
from flowar.model import (
    ActivityAnnotation,
    ActivityMeta,
    Dataset,
    SensorEvent,
    SensorMeta,
    canonicalize,
    explore_stats,
    format_rfc3339_ms,
    load_uniform,
    parse_rfc3339_ms,
    save_uniform,
    validate,
)
from tests.conftest import ann, ev, make_dataset


def read_all(d):
    return {p.name: p.read_bytes() for p in d.iterdir()}


class TestTimestamps:
    def test_round_trip(self):
        for ms in [0, 1, 999, 1000, 1354321062123, 1322434800000]:
            assert parse_rfc3339_ms(format_rfc3339_ms(ms)) == ms

    def test_format_is_canonical(self):
        assert format_rfc3339_ms(0) == "1970-01-01T00:00:00.000Z"
        assert format_rfc3339_ms(61_001) == "1970-01-01T00:01:01.001Z"

    def test_rejects_non_canonical(self):
        for bad in ["1970-01-01T00:00:00Z", "1970-01-01 00:00:00.000Z",
                    "1970-01-01T00:00:00.0000Z", "x"]:
            with pytest.raises(ValueError):
                parse_rfc3339_ms(bad)


class TestUniformRoundTrip:
    def test_empty_dataset_loads(self, tmp_path):
        ds = make_dataset(sensors=(SensorMeta("s1", "S1"),),
                          activities=(ActivityMeta("a1", "A1"),))
        save_uniform(ds, tmp_path)
        loaded = load_uniform(tmp_path)
        assert loaded.events == ()
        assert loaded.annotations == ()
        assert loaded.sensors == ds.sensors

    def test_save_load_save_byte_identical(self, tmp_path):
        ds = make_dataset(
            events=[ev(1, "s1", 0, 10_000), ev(2, "s1", 20_000, 30_000)],
            annotations=[ann(1, "cook", 0, 25_000)],
        )
        d1, d2 = tmp_path / "one", tmp_path / "two"
        save_uniform(ds, d1)
        save_uniform(load_uniform(d1), d2)
        assert read_all(d1) == read_all(d2)

    def test_two_saves_byte_identical(self, tmp_path):
        ds = make_dataset(events=[ev(1, "s1", 0, 1000)])
        d1, d2 = tmp_path / "one", tmp_path / "two"
        save_uniform(ds, d1)
        save_uniform(ds, d2)
        assert read_all(d1) == read_all(d2)

    def test_one_event_file_has_header_and_row(self, tmp_path):
        ds = make_dataset(events=[ev(1, "s1", 0, 1000)])
        save_uniform(ds, tmp_path)
        lines = (tmp_path / "events.csv").read_text().splitlines()
        assert lines[0] == "event_id,sensor_id,start,end"
        assert len(lines) == 2

    def test_unsorted_events_saved_sorted(self, tmp_path):
        # sort oracle: plain sorted() on the key triple
        raw = [ev(1, "s1", 50_000, 60_000), ev(2, "s2", 0, 10_000), ev(3, "s1", 20_000, 30_000)]
        ds = Dataset(
            name="toy", timezone="UTC",
            sensors=(SensorMeta("s1", "S1"), SensorMeta("s2", "S2")),
            activities=(), residents=("r1",),
            events=tuple(raw), annotations=(),
        )
        save_uniform(ds, tmp_path)
        expected = sorted((e.start, e.end) for e in raw)
        loaded = load_uniform(tmp_path)
        assert [(e.start, e.end) for e in loaded.events] == expected
        assert loaded == canonicalize(ds)

    def test_malformed_row_number(self, tmp_path):
        ds = make_dataset(events=[ev(1, "s1", 0, 1000), ev(2, "s1", 2000, 3000)])
        save_uniform(ds, tmp_path)
        lines = (tmp_path / "events.csv").read_text().splitlines()
        # row 3 (second data row) gets end < start
        lines[2] = "2,s1,1970-01-01T00:00:05.000Z,1970-01-01T00:00:02.000Z"
        (tmp_path / "events.csv").write_text("\n".join(lines) + "\n")
        with pytest.raises(MalformedRow) as exc:
            load_uniform(tmp_path)
        assert exc.value.row == 3

    def test_missing_file(self, tmp_path):
        with pytest.raises(MissingFile):
            load_uniform(tmp_path / "nope")

    def test_unsorted_file_rejected(self, tmp_path):
        ds = make_dataset(events=[ev(1, "s1", 0, 1000), ev(2, "s1", 5000, 6000)])
        save_uniform(ds, tmp_path)
        lines = (tmp_path / "events.csv").read_text().splitlines()
        lines[1], lines[2] = lines[2], lines[1]
        (tmp_path / "events.csv").write_text("\n".join(lines) + "\n")
        with pytest.raises(InvariantViolation):
            load_uniform(tmp_path)

    def test_shipped_datasets_round_trip(self, data_root):
        for name in ("home_a", "home_b"):
            src = data_root / name
            dst = data_root / f"{name}_resaved"
            save_uniform(load_uniform(src), dst)
            assert read_all(src) == read_all(dst)


class TestValidate:
    def test_valid_dataset_empty_report(self):
        ds = make_dataset(events=[ev(1, "s1", 0, 1000)],
                          annotations=[ann(1, "cook", 0, 5000)])
        assert validate(ds).ok

    def test_same_sensor_overlap_names_both_ids(self):
        ds = make_dataset(events=[ev(1, "s1", 0, 10_000), ev(2, "s1", 5000, 15_000)])
        report = validate(ds)
        [v] = [v for v in report.violations if v.code == "same_sensor_overlap"]
        assert set(v.record_ids) == {1, 2}

    def test_unknown_activity_is_referential_violation(self):
        ds = make_dataset(annotations=[ann(1, "cook", 0, 5000)])
        ds = Dataset(**{**ds.__dict__, "activities": ()})
        report = validate(ds)
        assert any(v.code == "unknown_activity" for v in report.violations)

    def test_idle_reserved(self):
        ds = make_dataset(activities=(ActivityMeta("Idle", "Idle"),))
        assert any(v.code == "reserved_activity_id" for v in validate(ds).violations)

    def test_touching_events_are_fine(self):
        ds = make_dataset(events=[ev(1, "s1", 0, 1000), ev(2, "s1", 1000, 2000)])
        assert validate(ds).ok

    def test_zero_duration_annotation_flagged(self):
        ds = make_dataset(annotations=[ann(1, "cook", 5000, 5000)])
        assert any(v.code == "annotation_not_positive" for v in validate(ds).violations)

    @pytest.mark.parametrize("mutation", ["dup_sensor", "overlap_ann", "bad_ids"])
    def test_mutating_one_field_produces_violation(self, mutation):
        ds = make_dataset(
            events=[ev(1, "s1", 0, 1000)],
            annotations=[ann(1, "cook", 0, 5000), ann(2, "wash", 6000, 9000)],
        )
        assert validate(ds).ok
        if mutation == "dup_sensor":
            broken = Dataset(**{**ds.__dict__, "sensors": ds.sensors + ds.sensors})
        elif mutation == "overlap_ann":
            extra = ann(3, "cook", 4000, 7000)
            broken = Dataset(**{**ds.__dict__, "annotations": ds.annotations + (extra,)})
        else:
            bad = ds.events[0]
            bad = SensorEvent(bad.event_id, "ghost", bad.start, bad.end)
            broken = Dataset(**{**ds.__dict__, "events": (bad,)})
        assert not validate(broken).ok


class TestExploreStats:
    def test_full_overlap(self):
        ds = make_dataset(events=[ev(1, "s1", 0, 10_000)],
                          annotations=[ann(1, "cook", 0, 10_000)])
        stats = explore_stats(ds)
        assert stats.overlap_matrix["cook"]["s1"] == 1.0
        assert stats.sensor_duration_stats["s1"].mean_s == 10.0

    def test_half_overlap(self):
        # interval-intersection oracle: |[0,5s) ∩ [0,10s)| / |[0,10s)| = 0.5
        ds = make_dataset(events=[ev(1, "s1", 0, 5000)],
                          annotations=[ann(1, "cook", 0, 10_000)])
        assert explore_stats(ds).overlap_matrix["cook"]["s1"] == 0.5

    def test_no_annotations(self):
        ds = make_dataset(events=[ev(1, "s1", 0, 5000)])
        stats = explore_stats(ds)
        assert stats.overlap_matrix == {}
        assert stats.sensor_duration_stats["s1"].count == 1

    def test_zero_duration_activity_gets_zero_row(self):
        ds = make_dataset(events=[ev(1, "s1", 0, 5000)],
                          activities=(ActivityMeta("cook", "Cook"),))
        assert explore_stats(ds).overlap_matrix["cook"] == {"s1": 0.0}

    def test_overlap_entries_in_unit_interval(self, dataset_b):
        stats = explore_stats(dataset_b)
        for row in stats.overlap_matrix.values():
            for x in row.values():
                assert 0.0 <= x <= 1.0

    @settings(max_examples=30, deadline=None)
    @given(st.randoms(use_true_random=False))
    def test_permutation_invariance(self, rnd):
        events = [ev(i + 1, f"s{i % 3}", i * 2000, i * 2000 + 1500) for i in range(8)]
        anns = [ann(i + 1, f"a{i % 2}", i * 3000, i * 3000 + 2500) for i in range(5)]
        ds = make_dataset(events=events, annotations=anns)
        shuffled_e, shuffled_a = list(events), list(anns)
        rnd.shuffle(shuffled_e)
        rnd.shuffle(shuffled_a)
        ds2 = make_dataset(events=shuffled_e, annotations=shuffled_a)
        assert explore_stats(ds).to_dict() == explore_stats(ds2).to_dict()


class TestCanonicalize:
    def test_preserves_valid_ids(self):
        ds = make_dataset(events=[ev(5, "s1", 0, 1000), ev(9, "s1", 2000, 3000)])
        assert [e.event_id for e in ds.events] == [5, 9]

    def test_renumbers_when_out_of_order(self):
        raw = [ev(9, "s1", 0, 1000), ev(5, "s1", 2000, 3000)]
        ds = make_dataset(events=raw)
        assert [e.event_id for e in ds.events] == [1, 2]

    def test_idempotent(self, dataset_a):
        assert canonicalize(dataset_a) == dataset_a
