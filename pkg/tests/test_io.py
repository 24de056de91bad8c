import numpy as np
import pytest

from homsim import DataFormatError, EventStream, read_events, write_events
from homsim.io import config_hash, read_sidecar, sidecar_path


def sample_stream():
    return EventStream.from_records(
        [("T", 0), ("A", 400), ("B", 480), ("T", 8000), ("A", 8100)]
    )


def test_from_records_and_labels():
    s = sample_stream()
    assert len(s) == 5
    assert list(s.labels()) == ["T", "A", "B", "T", "A"]
    assert s.is_sorted()
    recs = list(s.records())
    assert recs[1].detector == "A" and recs[1].timestamp == 400


def test_roundtrip_with_sidecar(tmp_path):
    s = sample_stream()
    path = tmp_path / "events.csv"
    write_events(s, path, metadata={"config": {"seed": 3}, "config_hash": "abc"})
    meta = read_sidecar(path)
    assert meta["config_hash"] == "abc"
    assert meta["resolution_ps"] == 125.0
    back = read_events(path)
    assert np.array_equal(back.detectors, s.detectors)
    assert np.array_equal(back.timestamps, s.timestamps)
    assert back.resolution == 125.0


def test_read_without_sidecar_defaults_resolution(tmp_path):
    path = tmp_path / "e.csv"
    path.write_text("detector,timestamp\nT,0\nA,10\n")
    s = read_events(path)
    assert s.resolution == 125.0
    assert len(s) == 2


def test_bad_header_reports_line(tmp_path):
    path = tmp_path / "e.csv"
    path.write_text("det,time\nT,0\n")
    with pytest.raises(DataFormatError, match="line 1"):
        read_events(path)


def test_bad_detector_reports_line(tmp_path):
    path = tmp_path / "e.csv"
    path.write_text("detector,timestamp\nT,0\nQ,55\n")
    with pytest.raises(DataFormatError, match="line 3"):
        read_events(path)


def test_bad_timestamp_reports_line(tmp_path):
    path = tmp_path / "e.csv"
    path.write_text("detector,timestamp\nT,zero\n")
    with pytest.raises(DataFormatError, match="line 2"):
        read_events(path)


def test_wrong_field_count_reports_line(tmp_path):
    path = tmp_path / "e.csv"
    path.write_text("detector,timestamp\nT,0,9\n")
    with pytest.raises(DataFormatError, match="line 2"):
        read_events(path)


def test_config_hash_stable_and_order_free():
    h1 = config_hash({"a": 1, "b": 2.5})
    h2 = config_hash({"b": 2.5, "a": 1})
    assert h1 == h2
    assert len(h1) == 16
    assert h1 != config_hash({"a": 1, "b": 2.6})


def test_sidecar_path():
    assert str(sidecar_path("runs/events.csv")).endswith("runs/events.json")
