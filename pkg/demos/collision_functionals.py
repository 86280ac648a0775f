"""Reduced collision integrals against their defining 6-fold forms.

The number/energy exchange between ground and excited molecules reduces, for
the simplified hard-sphere kernel, from 6-fold velocity integrals to 3-fold
quadratures in (r, rho, theta).  An importance-sampled Monte Carlo estimate
of the defining integrals is the independent referee: after restoring the
change-of-variables factors (one sqrt(T1), one constant c0^2 per quantity),
the deterministic quadrature and the sampler agree to Monte Carlo accuracy.
Also prints the auxiliary functions H, S, L the level-curve scan consumes.
"""

import numpy as np

from radgas import PhysConsts, TripleQuadSpec, H_func, L_func, S_func, fit_calibration

consts = PhysConsts(epsilon0=1.0, sigma=1.0)
spec = TripleQuadSpec()
pairs = [(10.0, 10.0), (10.0, 12.0), (12.0, 10.0), (11.0, 11.5), (10.5, 11.0)]

print("calibrating against the 6-D Monte Carlo oracle (4 quantities x 5 pairs) ...")
fit = fit_calibration(pairs, consts, spec, n_samples=400_000, seed=1)
print(f"analytic constant c0^2 = {consts.c0**2:.8f}")
for q, k in fit["constants"].items():
    print(f"  fitted {q:3s}: {k:.8f}  (ratio to analytic: {k / consts.c0**2:.5f})")

print("\nper-pair agreement:")
print("  qty  (T1, T2)        quadrature      Monte Carlo     sigmas")
for row in fit["detail"]:
    pred = fit["constants"][row["quantity"]] * row["structural"]
    sig = abs(pred - row["mc"]) / row["se"] if row["se"] > 0 else 0.0
    print(f"  {row['quantity']:3s}  ({row['T1']:4.1f}, {row['T2']:4.1f})  "
          f"{pred:+.6e}  {row['mc']:+.6e}  {sig:5.2f}")

fig1 = PhysConsts(epsilon0=1.0, sigma=1.0, c0=1.0)
print("\nauxiliary functions on the level-curve window (epsilon0 = c0 = sigma = 1):")
for (t1, t2) in [(10.0, 10.0), (10.0, 12.0), (12.0, 10.0), (11.0, 11.5)]:
    H = H_func(t1, t2, fig1, spec)
    S = S_func(t1, t2, fig1, spec)
    L = L_func(t1, t2, fig1, spec)
    print(f"  (T1, T2) = ({t1:4.1f}, {t2:4.1f}):  H = {H:.6f}  S = {S:.6f}  L = {L:.6f}")
