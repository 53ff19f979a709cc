"""Detection-rate arithmetic and the file formats."""

import json

import numpy as np
import pytest

from densiscope.detect import DetectionReport
from densiscope.io import (
    read_curves,
    read_json,
    read_pairs,
    write_curves,
    write_json,
    write_report_jsonl,
)
from densiscope.metrics import detection_metrics, iae
from densiscope.simulate import beta_density


def test_detection_metrics_examples():
    m = detection_metrics({1, 2, 3}, {1, 2, 3}, 100)
    assert m.p_c == 100.0
    assert m.p_f == 0.0

    m = detection_metrics(set(), {1, 2}, 100)
    assert m.p_c == 0.0
    assert m.p_f == 0.0

    truth = set(range(10))
    flagged = set(range(9)) | {20, 21, 22, 23, 24, 25}
    m = detection_metrics(flagged, truth, 100)
    assert m.p_c == pytest.approx(90.0)
    assert m.p_f == pytest.approx(100.0 * 6 / 90)


def test_detection_metrics_empty_truth_and_bounds():
    m = detection_metrics({3}, set(), 10)
    assert m.p_c is None
    assert m.p_f == pytest.approx(10.0)
    with pytest.raises(ValueError):
        detection_metrics({11}, set(), 10)


def test_iae():
    f = beta_density(4.0, 4.0)
    assert iae(f, f) == 0.0
    g = beta_density(4.0, 6.0)
    assert iae(f, g) > 0.0


def test_curve_csv_roundtrip(tmp_path):
    curves = [beta_density(3.0, 5.0), beta_density(7.0, 2.0)]
    path = tmp_path / "curves.csv"
    write_curves(path, curves, ids=["a", "b"])
    back, ids = read_curves(path)
    assert ids == ["a", "b"]
    for orig, rec in zip(curves, back):
        assert np.max(np.abs(orig.values - rec.values)) < 1e-8


def test_read_pairs_length_mismatch(tmp_path):
    write_curves(tmp_path / "g.csv", [beta_density(3.0, 5.0)])
    write_curves(tmp_path / "f.csv", [beta_density(3.0, 5.0)] * 2)
    with pytest.raises(ValueError):
        read_pairs(tmp_path / "g.csv", tmp_path / "f.csv")


def test_report_jsonl(tmp_path):
    report = DetectionReport()
    report.add(3, ("MED", None, None), 0.9)
    report.add(5, ("nLQD", "L1", (0.2, 0.8)), 1.7)
    path = tmp_path / "report.jsonl"
    write_report_jsonl(path, report)
    lines = path.read_text().strip().splitlines()
    recs = [json.loads(line) for line in lines]
    assert {r["index"] for r in recs} == {3, 5}


def test_json_roundtrip(tmp_path):
    payload = {"a": 1, "b": [1.5, 2.5]}
    path = tmp_path / "x.json"
    write_json(path, payload)
    assert read_json(path) == payload
