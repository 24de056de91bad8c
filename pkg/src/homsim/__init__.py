"""Simulation and analysis of two-photon interference between dissimilar
single-photon sources with exponential temporal envelopes."""

from .analysis import (
    AccidentalEstimate,
    CoincidenceHistogram,
    DipPoint,
    FitResult,
    PairingResult,
    VisibilityResult,
    coincidence_fraction,
    dip_curve,
    estimate_accidentals,
    fit_scale,
    histogram,
    pair_events,
    visibility,
)
from .errors import (
    ConfigError,
    DataFormatError,
    HomsimError,
    InsufficientStatisticsError,
    UnreachableSampleError,
)
from .interference import (
    SourcePair,
    coincidence_density,
    coincidence_probability,
    coincidence_probability_numeric,
    conditional_outcome_probs,
    dip_ratio,
    visibility_closed_form,
)
from .io import DetectionRecord, EventStream, read_events, write_events
from .montecarlo import (
    ExperimentConfig,
    expected_accidental_floor,
    quantize,
    simulate,
)
from .wavepacket import Envelope, amplitude, norm, sample_emission_time

__version__ = "0.1.0"

__all__ = [
    "AccidentalEstimate",
    "CoincidenceHistogram",
    "ConfigError",
    "DataFormatError",
    "DetectionRecord",
    "DipPoint",
    "Envelope",
    "EventStream",
    "ExperimentConfig",
    "FitResult",
    "HomsimError",
    "InsufficientStatisticsError",
    "PairingResult",
    "SourcePair",
    "UnreachableSampleError",
    "VisibilityResult",
    "amplitude",
    "coincidence_density",
    "coincidence_fraction",
    "coincidence_probability",
    "coincidence_probability_numeric",
    "conditional_outcome_probs",
    "dip_curve",
    "dip_ratio",
    "estimate_accidentals",
    "expected_accidental_floor",
    "fit_scale",
    "histogram",
    "norm",
    "pair_events",
    "quantize",
    "read_events",
    "sample_emission_time",
    "simulate",
    "visibility",
    "visibility_closed_form",
    "write_events",
]
