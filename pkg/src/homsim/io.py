"""Event-stream container plus the CSV / JSON-sidecar file format.

An event file is plain CSV with the header line ``detector,timestamp``,
one record per line, detector in {T, A, B} and the timestamp an integer
count of resolution ticks since the start of the run. A JSON sidecar
(same path with a .json suffix) echoes the resolution, the full run
configuration and its hash.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from .errors import DataFormatError

DET_T, DET_A, DET_B = 0, 1, 2
DETECTOR_LABELS = ("T", "A", "B")
_LABEL_TO_CODE = {"T": DET_T, "A": DET_A, "B": DET_B}

EVENT_HEADER = ("detector", "timestamp")


class DetectionRecord(NamedTuple):
    detector: str
    timestamp: int


@dataclass
class EventStream:
    """Timestamped detection events from all three detectors.

    Attributes:
        detectors: uint8 array of codes (0=T trigger, 1=A, 2=B).
        timestamps: int64 array of resolution ticks since run start.
        resolution: tick size in picoseconds.
    """

    detectors: np.ndarray
    timestamps: np.ndarray
    resolution: float = 125.0

    def __post_init__(self):
        self.detectors = np.asarray(self.detectors, dtype=np.uint8)
        self.timestamps = np.asarray(self.timestamps, dtype=np.int64)
        if self.detectors.shape != self.timestamps.shape:
            raise ValueError("detector and timestamp arrays must match in length")
        if self.detectors.size and self.detectors.max() > DET_B:
            raise ValueError("detector codes must be 0 (T), 1 (A) or 2 (B)")

    def __len__(self) -> int:
        return self.timestamps.size

    def labels(self) -> np.ndarray:
        return np.array(DETECTOR_LABELS)[self.detectors]

    def is_sorted(self) -> bool:
        return bool(np.all(np.diff(self.timestamps) >= 0))

    def records(self) -> Iterator[DetectionRecord]:
        for code, tick in zip(self.detectors, self.timestamps):
            yield DetectionRecord(DETECTOR_LABELS[code], int(tick))

    @classmethod
    def from_records(
        cls, records: Iterable[tuple[str, int]], resolution: float = 125.0
    ) -> "EventStream":
        """Build a stream from (label, ticks) pairs, e.g. [("T", 0), ("A", 400)]."""
        pairs = list(records)
        codes = np.array([_LABEL_TO_CODE[label] for label, _ in pairs], dtype=np.uint8)
        ticks = np.array([tick for _, tick in pairs], dtype=np.int64)
        return cls(codes, ticks, resolution)


def config_hash(mapping: dict) -> str:
    """Short stable hash of a configuration mapping, for file provenance."""
    canon = json.dumps(mapping, sort_keys=True, default=str)
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def sidecar_path(events_path) -> Path:
    return Path(events_path).with_suffix(".json")


def write_events(stream: EventStream, path, metadata: dict | None = None) -> Path:
    """Write the CSV event file and its JSON sidecar; returns the CSV path."""
    path = Path(path)
    labels = DETECTOR_LABELS
    with open(path, "w", newline="") as fh:
        fh.write(",".join(EVENT_HEADER) + "\n")
        for code, tick in zip(stream.detectors, stream.timestamps):
            fh.write(f"{labels[code]},{tick}\n")
    sidecar = {"resolution_ps": stream.resolution, "n_records": len(stream)}
    if metadata:
        sidecar.update(metadata)
    sidecar.setdefault("config_hash", config_hash(sidecar))
    with open(sidecar_path(path), "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def read_sidecar(events_path) -> dict | None:
    p = sidecar_path(events_path)
    if not p.exists():
        return None
    with open(p) as fh:
        return json.load(fh)


def read_events(path, resolution: float | None = None) -> EventStream:
    """Read a CSV event file; resolution comes from the sidecar if present.

    Raises DataFormatError (with the offending line number) on malformed
    input.
    """
    path = Path(path)
    if resolution is None:
        meta = read_sidecar(path)
        resolution = float(meta["resolution_ps"]) if meta else 125.0

    codes: list[int] = []
    ticks: list[int] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataFormatError(f"{path}: empty event file (line 1)") from None
        if [h.strip() for h in header] != list(EVENT_HEADER):
            raise DataFormatError(
                f"{path}: bad header {header!r} on line 1, expected 'detector,timestamp'"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise DataFormatError(f"{path}: expected 2 fields on line {lineno}")
            det, ts = row[0].strip(), row[1].strip()
            if det not in _LABEL_TO_CODE:
                raise DataFormatError(
                    f"{path}: unknown detector {det!r} on line {lineno}"
                )
            try:
                tick = int(ts)
            except ValueError:
                raise DataFormatError(
                    f"{path}: non-integer timestamp {ts!r} on line {lineno}"
                ) from None
            codes.append(_LABEL_TO_CODE[det])
            ticks.append(tick)
    return EventStream(
        np.array(codes, dtype=np.uint8), np.array(ticks, dtype=np.int64), resolution
    )
