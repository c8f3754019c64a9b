import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mirrorsweep.metrics import (
    CSV_COLUMNS,
    DetectionRecord,
    cumulative_curve,
    emit_report,
    lower_median,
    records_from_csv,
    records_to_csv,
    summarize,
)


def rec_with_error(i, deg, **kw):
    a = np.radians(deg)
    return DetectionRecord.from_normals(f"s{i:03d}", [0, 0, -1.0], [np.sin(a), 0, -np.cos(a)], **kw)


def test_summary_hand_example():
    recs = [rec_with_error(i, e) for i, e in enumerate([0.1, 0.3, 5.0])]
    s = summarize(recs).to_dict()
    assert s["median_deg"] == pytest.approx(0.3)
    assert s["mean_deg"] == pytest.approx(5.4 / 3)
    assert s["acc_0_5"] == pytest.approx(2 / 3)
    assert s["acc_1_0"] == pytest.approx(2 / 3)
    assert s["acc_4_0"] == pytest.approx(2 / 3)
    assert s["n"] == 3


def test_thresholds_are_strict():
    s = summarize([rec_with_error(0, 1.0), rec_with_error(1, 0.0)])
    assert s.acc_at[1.0] == 0.5
    assert s.median_deg == 0.0  # lower median


def test_lower_median():
    assert lower_median([4, 1, 3, 2]) == 2
    assert lower_median([5]) == 5


def test_empty_and_inconsistent_records():
    with pytest.raises(ValueError):
        summarize([])
    bad = DetectionRecord("x", [0, 0, -1], [1, 0, 0], 3.0)
    with pytest.raises(ValueError, match="stored angle error"):
        summarize([bad])


errors = st.lists(st.floats(0, 90), min_size=1, max_size=30)


@given(errors, st.randoms())
def test_summary_order_invariant(errs, rnd):
    recs = [rec_with_error(i, e) for i, e in enumerate(errs)]
    shuffled = recs[:]
    rnd.shuffle(shuffled)
    assert summarize(recs) == summarize(shuffled)


@given(errors, st.floats(0.5, 20), st.integers(2, 50))
def test_curve_matches_recount(errs, max_deg, steps):
    recs = [rec_with_error(i, e) for i, e in enumerate(errs)]
    stored = [r.angle_err_deg for r in recs]
    curve = cumulative_curve(recs, max_deg, steps)
    assert len(curve) == steps and curve[0][0] == 0 and curve[-1][0] == pytest.approx(max_deg)
    for t, f in curve:
        assert f == sum(e < t for e in stored) / len(stored)
    fr = [f for _, f in curve]
    assert fr == sorted(fr)


def test_curve_single_record_jump():
    curve = cumulative_curve([rec_with_error(0, 2.0)], 4.0, 5)
    assert [f for _, f in curve] == [0, 0, 0, 1, 1]
    with pytest.raises(ValueError):
        cumulative_curve([rec_with_error(0, 2.0)], 4.0, 1)


@given(st.lists(st.tuples(st.floats(0, 90), st.one_of(st.none(), st.floats(0, 10)),
                          st.floats(0, 1e5)), min_size=1, max_size=10))
def test_csv_round_trip(rows):
    recs = [rec_with_error(i, e, depth_l1=d, wall_time_ms=t) for i, (e, d, t) in enumerate(rows)]
    text = records_to_csv(recs)
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    back = records_from_csv(text)
    for a, b in zip(recs, back):
        assert a.scene_id == b.scene_id
        np.testing.assert_array_equal(a.normal_pred, b.normal_pred)
        assert a.angle_err_deg == b.angle_err_deg
        assert a.depth_l1 == b.depth_l1 and a.wall_time_ms == b.wall_time_ms
    assert records_to_csv(back) == text


def test_csv_bad_header():
    with pytest.raises(ValueError):
        records_from_csv("a,b\n1,2\n")


def test_emit_report(tmp_path):
    recs = [rec_with_error(i, e) for i, e in enumerate([0.2, 0.7, 3.0, 12.0])]
    paths = emit_report(recs, tmp_path)
    assert sorted(p.name for p in tmp_path.iterdir()) == ["curve.svg", "records.csv", "summary.json"]
    summary = json.loads(paths["summary"].read_text())
    assert summary["acc_1_0"] == 0.5 and summary["n"] == 4
    root = ET.parse(paths["svg"]).getroot()
    assert root.tag.endswith("svg")
    first = {p: p.read_bytes() for p in paths.values()}
    emit_report(list(reversed(recs)), tmp_path)
    assert paths["summary"].read_bytes() == first[paths["summary"]]
    assert paths["svg"].read_bytes() == first[paths["svg"]]
    assert len(list(tmp_path.iterdir())) == 3
    with pytest.raises(OSError):
        emit_report(recs, tmp_path / "missing")


def test_figures(tmp_path):
    from mirrorsweep.plotting import render_figures

    recs = [rec_with_error(i, e) for i, e in enumerate([0.2, 0.7, 3.0])]
    paths = render_figures(recs, tmp_path)
    assert [p.name for p in paths] == ["curve.png", "errors.png"]
    assert all(p.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n" for p in paths)


def test_all_zero_errors():
    s = summarize([rec_with_error(i, 0.0) for i in range(4)])
    assert s.median_deg == 0 and s.mean_deg == 0
    assert all(v == 1.0 for v in s.acc_at.values())


@given(errors)
def test_curve_agrees_with_summary_at_thresholds(errs):
    recs = [rec_with_error(i, e) for i, e in enumerate(errs)]
    curve = dict(cumulative_curve(recs, 10.0, 201))
    s = summarize(recs)
    for t in (0.5, 1.0, 2.0, 4.0):
        assert curve[t] == s.acc_at[t]
    acc = [s.acc_at[t] for t in (0.5, 1.0, 2.0, 4.0)]
    assert acc == sorted(acc) and 0 <= acc[0] and acc[-1] <= 1


def test_three_records_three_files(tmp_path):
    emit_report([rec_with_error(i, e) for i, e in enumerate([1.0, 2.0, 3.0])], tmp_path)
    assert len(list(tmp_path.iterdir())) == 3
    assert len((tmp_path / "records.csv").read_text().splitlines()) == 4
