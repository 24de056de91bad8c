"""Coincidence analysis pipeline for timestamped detection events.

Mirrors a standard time-tag post-processing chain: group clicks by
trigger, keep sequences with a click near the trigger, histogram the
signed time difference between the earliest A and B clicks normalized per
trigger, estimate the accidental floor from the histogram wings, and form
visibilities and dip curves from windowed sums.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .errors import DataFormatError, InsufficientStatisticsError
from .io import DET_A, DET_B, DET_T, EventStream

_ALIGN_TOL = 1e-9


@dataclass
class PairingResult:
    """Per-trigger click bookkeeping produced by :func:`pair_events`.

    first_a / first_b hold the earliest click per trigger in ticks, or -1
    where a detector never fired. `valid` marks sequences with at least
    one click within the validity window after the trigger. Coincidence
    time differences are formed only for valid sequences that have clicks
    on both detectors; `n_triggers` counts every trigger regardless.
    """

    trigger_ticks: np.ndarray
    valid: np.ndarray
    first_a: np.ndarray
    first_b: np.ndarray
    resolution: float
    a_ticks: np.ndarray
    a_trigger: np.ndarray
    b_ticks: np.ndarray
    b_trigger: np.ndarray

    @property
    def n_triggers(self) -> int:
        return int(self.trigger_ticks.size)

    @property
    def paired(self) -> np.ndarray:
        return self.valid & (self.first_a >= 0) & (self.first_b >= 0)

    @property
    def delta_ts(self) -> np.ndarray:
        """Signed t_a - t_b in ns for every paired sequence."""
        sel = self.paired
        diff = self.first_a[sel] - self.first_b[sel]
        return diff * (self.resolution / 1000.0)

    def outcomes(self) -> Iterator[tuple[int, list[int], list[int], bool]]:
        """Yield (trigger_tick, a_clicks, b_clicks, valid) per trigger."""
        for i, t in enumerate(self.trigger_ticks):
            a = self.a_ticks[self.a_trigger == i]
            b = self.b_ticks[self.b_trigger == i]
            yield int(t), a.tolist(), b.tolist(), bool(self.valid[i])


def _assign(click_ticks, trigger_ticks):
    idx = np.searchsorted(trigger_ticks, click_ticks, side="right") - 1
    keep = idx >= 0
    return click_ticks[keep], idx[keep]


def _first_per_trigger(ticks, owner, n):
    first = np.full(n, -1, dtype=np.int64)
    uniq, pos = np.unique(owner, return_index=True)
    first[uniq] = ticks[pos]  # stream sorted, so first occurrence is earliest
    return first


def pair_events(stream: EventStream, valid_window: float = 85.0) -> PairingResult:
    """Group A/B clicks by trigger and mark valid sequences.

    Every click is attributed to the most recent trigger at or before it
    (clicks preceding the first trigger are dropped). A sequence is valid
    if any click falls within `valid_window` ns after its trigger.

    Raises DataFormatError if the stream is not sorted by timestamp.
    """
    if not stream.is_sorted():
        raise DataFormatError("event stream must be sorted by timestamp")
    det = stream.detectors
    ts = stream.timestamps
    trigger_ticks = ts[det == DET_T]
    n = trigger_ticks.size

    window_ticks = int(np.floor(valid_window * 1000.0 / stream.resolution + 1e-9))
    valid = np.zeros(n, dtype=bool)

    sides = []
    for code in (DET_A, DET_B):
        ticks, owner = _assign(ts[det == code], trigger_ticks)
        near = (ticks - trigger_ticks[owner]) <= window_ticks
        valid[owner[near]] = True
        sides.append((ticks, owner))

    (a_ticks, a_owner), (b_ticks, b_owner) = sides
    return PairingResult(
        trigger_ticks=trigger_ticks,
        valid=valid,
        first_a=_first_per_trigger(a_ticks, a_owner, n),
        first_b=_first_per_trigger(b_ticks, b_owner, n),
        resolution=stream.resolution,
        a_ticks=a_ticks,
        a_trigger=a_owner,
        b_ticks=b_ticks,
        b_trigger=b_owner,
    )


def coincidence_fraction(stream: EventStream) -> float:
    """Fraction of triggers with at least one click on each output detector."""
    pairing = pair_events(stream)
    return float(np.mean((pairing.first_a >= 0) & (pairing.first_b >= 0)))


@dataclass
class CoincidenceHistogram:
    """Trigger-normalized histogram of signed coincidence time differences.

    Bins are half-open [lo, hi) of width `bin_width`, centered so one bin
    straddles zero. `values` is counts / n_triggers, the per-trigger
    coincidence probability per bin.
    """

    bin_width: float
    bin_centers: np.ndarray
    counts: np.ndarray
    n_triggers: int

    def __post_init__(self):
        if self.n_triggers <= 0:
            raise ValueError("n_triggers must be positive")
        if np.any(self.counts < 0):
            raise ValueError("counts must be non-negative")

    @property
    def values(self) -> np.ndarray:
        return self.counts / self.n_triggers

    def window_bins(self, t_c: float) -> np.ndarray:
        """Boolean mask of bins fully inside [-t_c, +t_c].

        t_c must coincide with bin edges (e.g. 25 or 75 for 10 ns bins
        centered on zero).
        """
        half = 0.5 * self.bin_width
        if abs((t_c - half) / self.bin_width - round((t_c - half) / self.bin_width)) > _ALIGN_TOL:
            raise ValueError(
                f"t_c={t_c} does not align with bin edges (width {self.bin_width})"
            )
        return np.abs(self.bin_centers) <= t_c - half + _ALIGN_TOL


def histogram(
    delta_ts: Sequence[float],
    n_triggers: int,
    bin_width: float = 10.0,
    half_range: float = 205.0,
) -> CoincidenceHistogram:
    """Bin signed time differences into zero-centered bins.

    `half_range` is the histogram extent; bin edges run from -half_range
    to +half_range and must line up with the zero-centered grid, i.e.
    half_range = bin_width/2 + k*bin_width.
    """
    if bin_width <= 0.0:
        raise ValueError("bin_width must be positive")
    if half_range < 0.5 * bin_width:
        raise ValueError("empty histogram range")
    k = (half_range - 0.5 * bin_width) / bin_width
    if abs(k - round(k)) > _ALIGN_TOL:
        raise ValueError(
            "half_range must terminate on a bin edge of the zero-centered grid"
        )
    n_bins = 2 * int(round(k)) + 1
    d = np.asarray(delta_ts, dtype=float)
    idx = np.floor((d + half_range) / bin_width).astype(np.int64)
    inside = (idx >= 0) & (idx < n_bins)
    counts = np.bincount(idx[inside], minlength=n_bins)
    centers = -half_range + (np.arange(n_bins) + 0.5) * bin_width
    return CoincidenceHistogram(bin_width, centers, counts, n_triggers)


class AccidentalEstimate(NamedTuple):
    g_acc: float
    sigma: float


def estimate_accidentals(
    h: CoincidenceHistogram, wing: tuple[float, float] = (100.0, 200.0)
) -> AccidentalEstimate:
    """Mean per-bin value over the flat wings |dt| in [wing_lo, wing_hi].

    The standard error follows from Poisson counting of the summed wing
    counts.
    """
    lo, hi = wing
    if hi <= lo:
        raise ValueError("wing region must have positive extent")
    sel = (np.abs(h.bin_centers) >= lo - _ALIGN_TOL) & (
        np.abs(h.bin_centers) <= hi + _ALIGN_TOL
    )
    n_sel = int(sel.sum())
    if n_sel == 0:
        raise ValueError("wing region contains no histogram bins")
    total = float(h.counts[sel].sum())
    g = total / (n_sel * h.n_triggers)
    sigma = np.sqrt(total) / (n_sel * h.n_triggers)
    return AccidentalEstimate(g, sigma)


@dataclass(frozen=True)
class VisibilityResult:
    """Interference visibility from a pair of histograms.

    v = 1 - sum(G_par - g_acc) / sum(G_perp - g_acc) over the coincidence
    window; sigma_v from Poisson propagation of the summed bin counts.
    """

    v: float
    sigma_v: float
    t_c: float
    g_acc: float

    def to_dict(self) -> dict:
        return {"v": self.v, "sigma_v": self.sigma_v, "t_c": self.t_c, "g_acc": self.g_acc}


def visibility(
    h_par: CoincidenceHistogram,
    h_perp: CoincidenceHistogram,
    t_c: float,
    g_acc: float | AccidentalEstimate | np.ndarray = 0.0,
) -> VisibilityResult:
    """Visibility over the window dt in [-t_c, +t_c].

    `g_acc` is the accidental floor to subtract from both histograms:
    0 for an uncorrected estimate, a scalar constant per bin (the usual
    wing estimate), an AccidentalEstimate (folds its uncertainty into
    sigma_v), or a full per-bin array matching the histogram binning for
    a structured floor.

    Raises InsufficientStatisticsError if the corrected non-interfering
    window sum is not positive.
    """
    if h_par.bin_width != h_perp.bin_width or h_par.bin_centers.size != h_perp.bin_centers.size:
        raise ValueError("histograms must share identical binning")
    if not np.allclose(h_par.bin_centers, h_perp.bin_centers):
        raise ValueError("histograms must share identical binning")

    sel = h_par.window_bins(t_c)
    n_win = int(sel.sum())
    sigma_g = 0.0
    if isinstance(g_acc, AccidentalEstimate):
        g_window = n_win * g_acc.g_acc
        sigma_g = g_acc.sigma
        g_record = g_acc.g_acc
    elif np.ndim(g_acc) == 0:
        g_record = float(g_acc)
        g_window = n_win * g_record
    else:
        g_arr = np.asarray(g_acc, dtype=float)
        if g_arr.shape != h_par.bin_centers.shape:
            raise ValueError("per-bin g_acc must match the histogram binning")
        g_window = float(g_arr[sel].sum())
        g_record = g_window / n_win

    counts_par = float(h_par.counts[sel].sum())
    counts_perp = float(h_perp.counts[sel].sum())
    num = counts_par / h_par.n_triggers - g_window
    den = counts_perp / h_perp.n_triggers - g_window
    if den <= 0.0:
        raise InsufficientStatisticsError(
            "non-interfering window sum is not positive after correction"
        )
    num = max(num, 0.0)  # counts cannot be negative; keeps v <= 1
    ratio = num / den

    sigma_num_sq = counts_par / h_par.n_triggers**2 + (n_win * sigma_g) ** 2
    sigma_den_sq = counts_perp / h_perp.n_triggers**2 + (n_win * sigma_g) ** 2
    sigma_ratio = np.sqrt(sigma_num_sq + ratio**2 * sigma_den_sq) / den
    return VisibilityResult(1.0 - ratio, float(sigma_ratio), t_c, g_record)


class DipPoint(NamedTuple):
    delta_t: float
    ratio: float
    sigma: float


def dip_curve(
    runs: Sequence[tuple[float, CoincidenceHistogram, CoincidenceHistogram]],
    t_c: float = 150.0,
    accidentals: str | float = "none",
    wing: tuple[float, float] = (100.0, 200.0),
) -> list[DipPoint]:
    """Suppression ratio P_par/P_perp = 1 - V per delay-scan point.

    Unlike :func:`visibility`, `t_c` here is the total window length (the
    window is the symmetric interval [-t_c/2, +t_c/2]). `accidentals`
    selects the floor handling: "none", "wings" (estimated from each pair
    of histograms), or an explicit per-bin value.
    """
    points = []
    for delta_t, h_par, h_perp in runs:
        if accidentals == "none":
            g: float | AccidentalEstimate = 0.0
        elif accidentals == "wings":
            est_par = estimate_accidentals(h_par, wing)
            est_perp = estimate_accidentals(h_perp, wing)
            g = AccidentalEstimate(
                0.5 * (est_par.g_acc + est_perp.g_acc),
                0.5 * np.hypot(est_par.sigma, est_perp.sigma),
            )
        else:
            g = float(accidentals)
        res = visibility(h_par, h_perp, 0.5 * t_c, g)
        points.append(DipPoint(delta_t, 1.0 - res.v, res.sigma_v))
    return points


class FitResult(NamedTuple):
    scale: float
    offset: float


def fit_scale(model, data, with_offset: bool = True) -> FitResult:
    """Least-squares fit data ~ offset + scale * model.

    Raises ValueError for fewer than 2 points or a degenerate model
    (constant when fitting an offset, identically zero otherwise).
    """
    m = np.asarray(model, dtype=float)
    y = np.asarray(data, dtype=float)
    if m.shape != y.shape or m.size < 2:
        raise ValueError("need at least 2 matching model/data points")
    if with_offset:
        if np.ptp(m) == 0.0:
            raise ValueError("model values are all equal; scale is degenerate")
        design = np.column_stack([m, np.ones_like(m)])
    else:
        if not np.any(m):
            raise ValueError("model is identically zero")
        design = m[:, None]
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    if with_offset:
        return FitResult(float(coef[0]), float(coef[1]))
    return FitResult(float(coef[0]), 0.0)


def write_histogram_csv(h: CoincidenceHistogram, path, config_hash: str = "") -> Path:
    """Write bin_center_ns,counts,value rows (config hash on a comment line)."""
    path = Path(path)
    with open(path, "w") as fh:
        if config_hash:
            fh.write(f"# config_hash={config_hash}\n")
        fh.write(f"# n_triggers={h.n_triggers}\n")
        fh.write("bin_center_ns,counts,value\n")
        for c, n, v in zip(h.bin_centers, h.counts, h.values):
            fh.write(f"{c:g},{int(n)},{v:.12g}\n")
    return path


def write_visibility_json(
    result: VisibilityResult, path, config_hash: str = "", extra: dict | None = None
) -> Path:
    path = Path(path)
    payload = result.to_dict()
    payload["config_hash"] = config_hash
    if extra:
        payload.update(extra)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def write_dip_json(
    points: Sequence[DipPoint], model: Sequence[float], path, config_hash: str = ""
) -> Path:
    path = Path(path)
    payload = {
        "config_hash": config_hash,
        "points": [
            {"delta_t": p.delta_t, "ratio": p.ratio, "sigma": p.sigma, "model": m}
            for p, m in zip(points, model)
        ],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
