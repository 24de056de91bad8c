"""The full coincidence-analysis pipeline, raw and corrected.

Reproduces the headline measurement: with background at a level that
drags the raw +-25 ns visibility down to about 62%, the accidental
correction recovers a value compatible with the 90% expectation. Also
demonstrates why a constant wing-estimated floor is not enough when the
accidentals are dominated by photon-background pairs: their difference
spectrum is a pedestal with the same shape as the non-interfering
coincidence distribution.
"""

import numpy as np

from homsim import (
    ExperimentConfig,
    estimate_accidentals,
    expected_accidental_floor,
    histogram,
    pair_events,
    simulate,
    visibility,
    visibility_closed_form,
)

ETA = 0.05        # scaled-up efficiencies keep the demo fast
RATE = 1.15e-4    # background rate per ns per window, near the 62% point
N = 1_500_000

hists = {}
for xi, seed in ((1.0, 101), (0.0, 102)):
    cfg = ExperimentConfig(
        n_triggers=N, eta_f=ETA, eta_s=ETA, xi=xi,
        bg_rate_a=RATE, bg_rate_b=RATE, seed=seed,
    )
    pairing = pair_events(simulate(cfg))
    hists[xi] = histogram(pairing.delta_ts, pairing.n_triggers)
    print(f"xi = {xi:3.1f}: {pairing.delta_ts.size} coincidence pairs "
          f"from {pairing.n_triggers} triggers")

h_par, h_perp = hists[1.0], hists[0.0]

print("\n== raw visibility, +-25 ns window ==")
raw = visibility(h_par, h_perp, 25.0)
print(f"V_raw = {raw.v:.3f} +- {raw.sigma_v:.3f}")

print("\n== accidental floor ==")
est_par = estimate_accidentals(h_par)
est_perp = estimate_accidentals(h_perp)
wing = 0.5 * (est_par.g_acc + est_perp.g_acc)
print(f"wing estimate (|dt| in [100, 200] ns): {wing:.3e} per bin per trigger")

cfg = ExperimentConfig(
    n_triggers=N, eta_f=ETA, eta_s=ETA, bg_rate_a=RATE, bg_rate_b=RATE
)
model = expected_accidental_floor(cfg, h_par.bin_centers)
center = model[np.abs(h_par.bin_centers) <= 5.0][0]
wing_model = model[np.abs(h_par.bin_centers) >= 100.0].mean()
print(f"analytic floor: center {center:.3e}, wings {wing_model:.3e} "
      f"(pedestal ratio {center / wing_model:.2f})")

print("\n== corrected visibility, +-75 ns window ==")
flat_corrected = visibility(h_par, h_perp, 75.0, wing)
print(f"constant floor:  V = {flat_corrected.v:.3f} +- {flat_corrected.sigma_v:.3f}"
      "   (undercorrects the pedestal)")

structured = wing + (model - wing_model)  # data-pinned level, model shape
corrected = visibility(h_par, h_perp, 75.0, structured)
print(f"structured floor: V = {corrected.v:.3f} +- {corrected.sigma_v:.3f}")
print(f"expected from coherence times: {visibility_closed_form(26.18, 13.61):.3f}")
print("(a +-75 ns window clips some of the interfering tail, so the")
print(" corrected value sits a little above the full-integral expectation)")
