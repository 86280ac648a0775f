"""Acceptance suite: the nine exit criteria at their stated tolerances.

Each test prints one PASS/FAIL line (visible with pytest -s / in the captured
output).  Tolerances are pinned here, not configurable.
"""

import json
import math
import time

import numpy as np
import pytest
from scipy.special import exp1, expn

from radgas import PhysConsts, MaxwellianState, CollisionTuple
from radgas.cli import main as cli_main
from radgas.collision_reduction import TripleQuadSpec, fit_calibration
from radgas.domain3d import (
    ConvexDomain,
    LatticeSpec,
    SphereGrid,
    kernel_mass_at,
    nonexistence_check,
    solve_w,
)
from radgas.kinetic import (
    McPlan,
    detailed_balance_residual,
    entropy_identity_check,
    mass_exchange_estimate,
    mass_exchange_reduced,
    mc_conservation,
)
from radgas.levelscan import ScanWindow, extract_contours, scan, smoothness_report
from radgas.slab import (
    AngleGrid,
    BoundaryProfile,
    SlabGrid,
    flux,
    fredholm_kernel_K,
    kernel_sup,
    solve_exp_limit,
    solve_lte_fredholm,
    transport_solve,
)
from radgas.three_level import ThreeLevelParams, lte_deviation, solve_three_level
from radgas.physics import pseudo_planck

FIG1 = PhysConsts(epsilon0=1.0, sigma=1.0, c0=1.0)
PHYS = PhysConsts(epsilon0=1.0, sigma=1.0)


def report(number: int, description: str, ok: bool, elapsed: float):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {number}: {description:58s} {status}  [{elapsed:.1f}s]")
    assert ok


class TestAcceptance:
    def test_01_figure1_reproduction(self, tmp_path):
        t0 = time.time()
        out = tmp_path / "fig1"
        code = cli_main(
            ["levelscan", "--c0", "1.0", "--epsilon0", "1.0", "--sigma", "1.0", "--out", str(out)]
        )
        grid_lines = (out / "grid.csv").read_text().splitlines()
        rep = json.loads((out / "report.json").read_text())
        ok = (
            code == 0
            and len(grid_lines) == 1 + 441  # header + 21x21
            and rep["n_failures"] == 0
            and len(rep["levels"]) == 8
            and all(r["components"] == 1 and r["saddles"] == 0 for r in rep["levels"])
        )
        report(1, "Figure-1 level curves: 21x21 grid, 8 clean contours", ok, time.time() - t0)

    def test_02_reduction_vs_oracle(self):
        t0 = time.time()
        pairs = [(10.0, 10.0), (10.0, 12.0), (12.0, 10.0), (11.0, 11.5), (10.5, 11.0)]
        fit = fit_calibration(pairs, PHYS, TripleQuadSpec(), n_samples=10**6, seed=2024)
        ok = True
        for row in fit["detail"]:
            pred = fit["constants"][row["quantity"]] * row["structural"]
            tol = max(0.01 * abs(row["mc"]), 3.0 * row["se"])
            ok &= abs(pred - row["mc"]) <= tol
        # the fitted constants should sit at the analytic value c0^2
        for q, k in fit["constants"].items():
            ok &= abs(k - PHYS.c0**2) < 0.01 * PHYS.c0**2
        report(2, "reduced P/A/B match 6-D Monte Carlo after calibration", ok, time.time() - t0)

    def test_03_planck_fixed_point(self):
        t0 = time.time()
        grid = SlabGrid(L=2.0, n_y=65)
        angles = AngleGrid(n_mu=32)
        T0, rho0 = 10.0, 1.0
        bc = (BoundaryProfile.planck(T0, PHYS), BoundaryProfile.planck(T0, PHYS))
        G = transport_solve(rho0, T0, bc, PHYS, grid, angles)
        g0 = float(pseudo_planck(T0, PHYS))
        ok = (
            np.max(np.abs(G.g_plus - g0)) < 1e-10
            and np.max(np.abs(G.g_minus - g0)) < 1e-10
            and np.max(np.abs(flux(G))) < 1e-10
        )
        report(3, "constant Planck-boundary state: G = G0, J = 0 (1e-10)", ok, time.time() - t0)

    def test_04_fredholm_solver(self):
        t0 = time.time()
        # integral of K over the line (graded composite quadrature oracle)
        edges = np.concatenate([[0.0], np.geomspace(1e-12, 40.0, 200)])
        x, w = np.polynomial.legendre.leggauss(16)
        total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            nodes = 0.5 * (hi - lo) * (x + 1.0) + lo
            total += 0.5 * (hi - lo) * float(np.sum(w * fredholm_kernel_K(nodes)))
        ok = abs(2.0 * total - 1.0) < 1e-8
        ok &= all(kernel_sup(L) < 1.0 for L in (0.5, 1.0, 5.0, 20.0))
        res = solve_lte_fredholm(
            BoundaryProfile.from_function(lambda m: m, "cos"),
            SlabGrid(L=1.0, n_y=2049),
            AngleGrid(n_mu=48),
            PHYS,
            T0=1.0,
        )
        ok &= res.picard_gap < 1e-8
        ok &= float(np.ptp(res.flux_j)) < 1e-6
        report(4, "Fredholm: K mass 1, sup<1, cross-method, constant flux", ok, time.time() - t0)

    def test_05_exp_limit_solver(self):
        t0 = time.time()
        res = solve_exp_limit(
            BoundaryProfile.constant(1.0), SlabGrid(L=1.0, n_y=513), AngleGrid(n_mu=48), PHYS
        )
        ok = res.picard_ratio <= res.kernel_sup + 1e-3
        ok &= res.kernel_sup < 1.0
        ok &= float(np.ptp(res.flux_j)) < 1e-6
        ok &= bool(np.all(res.w > 0))
        report(5, "exp-limit: contraction ratio, constant flux, w > 0", ok, time.time() - t0)

    def test_06_contraction_3d(self):
        t0 = time.time()
        ball = ConvexDomain.ball((0.0, 0.0, 0.0), 1.0)
        sphere = SphereGrid(16, 32)
        mass0 = kernel_mass_at(ball, [[0.0, 0.0, 0.0]], sphere)[0]
        ok = abs(mass0 - (1.0 - math.exp(-1.0))) < 1e-4
        field = solve_w(ball, lambda n: np.ones(len(n)), PHYS, LatticeSpec(32), sphere)
        ok &= field.picard_ratio < 1.0
        ok &= field.picard_ratio <= field.kernel_mass.max() + 1e-3
        # radial symmetry: spread within thin shells below 1% of the mean
        rr = np.linalg.norm(field.points, axis=1)
        mean_w = float(np.mean(field.values))
        for lo in np.arange(0.1, 0.9, 0.2):
            sel = (rr > lo) & (rr < lo + 0.1)
            if np.any(sel):
                ok &= float(np.ptp(field.values[sel])) < 0.01 * mean_w
        # independent 1-D radial oracle
        w_oracle = _radial_oracle_ball(radius=1.0, m=801)
        w_at = np.interp(rr, w_oracle[0], w_oracle[1])
        ok &= float(np.max(np.abs(field.values - w_at))) < 0.01 * float(np.max(np.abs(w_at)))
        report(6, "3D ball: kernel mass, geometric Picard, radial oracle", ok, time.time() - t0)

    def test_07_nonexistence_checker(self):
        t0 = time.time()
        slab = ConvexDomain.box((-10.0, -10.0, 0.0), (10.0, 10.0, 1.0))
        sphere = SphereGrid(16, 32)
        f_up = lambda n: (n[:, 2] > 0).astype(float)
        a2, z = 2.0, 0.3
        rep = nonexistence_check(slab, f_up, a2, [[0.0, 0.0, z]], tol=1e-3, sphere=sphere, h=0.01)
        oracle = -2.0 * math.pi * a2 * float(expn(2, a2 * z))
        ok = rep["verdict"] == "NONEXISTENT"
        ok &= abs(rep["witness_div_R"] - oracle) < 0.01 * abs(oracle)
        rep0 = nonexistence_check(
            ConvexDomain.ball((0, 0, 0), 1.0),
            lambda n: np.zeros(len(n)),
            a2,
            [[0.0, 0.0, 0.0]],
            tol=1e-3,
            sphere=sphere,
        )
        ok &= rep0["verdict"] == "EXISTS_POSSIBLE"
        report(7, "nonexistence: slab NONEXISTENT vs oracle, f=0 possible", ok, time.time() - t0)

    def test_08_three_level(self):
        t0 = time.time()
        params = ThreeLevelParams(0.7, 0.3, eps=1.0, T0=2.0, rho0=1.0, P12=1.0, P23=1.0)
        grid = SlabGrid(L=1.0, n_y=65)
        angles = AngleGrid(n_mu=32)
        bc = (BoundaryProfile.constant(0.1), BoundaryProfile.zero())
        sol = solve_three_level(0.0, bc, params, grid, angles, mass_C0=0.0)
        dev, _ = lte_deviation(sol)
        ok = sol.path_gap < 1e-8
        ok &= dev > 10 * 1e-8
        ok &= abs(dev - 2.2603879091357846) < 1e-8 * dev  # pinned generic run
        # two-level degeneration: gamma2 = 0 with the LTE-consistent
        # temperature field recovers the Boltzmann-ratio perturbation
        p2 = ThreeLevelParams(1.0, 0.0, eps=1.0, T0=2.0, rho0=1.0, P12=1.0, P23=1.0)
        first = solve_three_level(0.0, bc, p2, grid, angles)
        xi_star = p2.T0 / (2 * p2.eps) * (first.sigma2 - first.sigma1)
        sol2 = solve_three_level(xi_star, bc, p2, grid, angles)
        beta = 2 * p2.eps / p2.T0 * xi_star
        ok &= float(np.max(np.abs(sol2.sigma2 - sol2.sigma1 - beta))) < 1e-6
        ok &= float(np.max(np.abs(sol2.sigma3 - sol2.sigma2 - beta))) < 1e-6
        report(8, "three-level: pinned non-LTE run, LTE degeneration", ok, time.time() - t0)

    def test_09_kinetic_identities(self):
        t0 = time.time()
        consts = PHYS
        rng = np.random.default_rng(99)
        T = 4.0
        u = np.array([0.3, 0.0, 0.0])
        v1 = u + rng.normal(size=(10**5, 3)) * math.sqrt(T / 2)
        v2 = u + rng.normal(size=(10**5, 3)) * math.sqrt(T / 2)
        keep = np.sum((v1 - v2) ** 2, axis=1) > 4.0 * consts.epsilon0 + 1e-9
        om = rng.normal(size=(int(keep.sum()), 3))
        om /= np.linalg.norm(om, axis=1, keepdims=True)
        tup = CollisionTuple.nonelastic(v1[keep], v2[keep], om, consts)
        s1 = MaxwellianState(1.0, u, T)
        s2 = MaxwellianState(math.exp(-2.0 / T), u, T)
        ok = float(np.max(np.abs(detailed_balance_residual(s1, s2, tup, consts)))) < 1e-12

        plan = McPlan(n_samples=10**6, seed=7)
        g1 = MaxwellianState(1.3, np.zeros(3), 4.0)
        g2 = MaxwellianState(0.4, np.zeros(3), 7.0)
        ok &= mc_conservation(g1, g2, plan, consts).all_pass(n_sigma=3.0, floor=1e-10)
        est = mass_exchange_estimate(g1, g2, plan, consts)
        red = mass_exchange_reduced(g1, g2, consts)
        ok &= abs(est.value - red) <= 3.0 * est.std_error
        ok &= entropy_identity_check([0.5, 2.0, 10.0, 50.0], consts)["max_rel_error"] < 1e-6
        report(9, "kinetic identities: balance, conservation, exchange", ok, time.time() - t0)


def _radial_oracle_ball(radius: float, m: int):
    """Independent 1-D solve of the radial reduction on a ball (isotropic f = 1).

    Works in v = r*w; kernel (1/2)[E1(|r-p|) - E1(r+p)] with product-integration
    moments of E1; forcing from the 1-D exit-distance quadrature.
    """
    r = np.linspace(0.0, radius, m)

    # forcing -(1/4pi) div R via the angular quadrature of the exact formulas
    x, wq = np.polynomial.legendre.leggauss(400)
    g = np.empty(m)
    for i, rv in enumerate(r):
        root = np.sqrt(rv * rv * x * x + radius * radius - rv * rv)
        s = rv * x + root
        e = np.exp(-s)
        if rv < 1e-12:
            g[i] = -3.0 * (-2.0 * math.pi * float(np.sum(wq * x * x * math.exp(-radius)))) / (
                4.0 * math.pi
            )
        else:
            Rr = 2.0 * math.pi * float(np.sum(wq * x * e))
            dsdr = x - rv * (1.0 - x * x) / root
            dRr = -2.0 * math.pi * float(np.sum(wq * x * e * dsdr))
            g[i] = -(dRr + 2.0 * Rr / rv) / (4.0 * math.pi)

    def m0(t):
        s = np.abs(t)
        val = np.where(s > 0, s * exp1(np.where(s > 0, s, 1.0)) - np.exp(-s) + 1.0, 0.0)
        return np.sign(t) * val

    def m1(t):
        s = np.abs(t)
        e1 = exp1(np.where(s > 0, s, 1.0))
        return np.where(s > 0, 0.5 * s * s * e1 - 0.5 * (s + 1.0) * np.exp(-s) + 0.5, 0.0)

    delta = np.diff(r)
    X = r[:, None]
    b = X - r[None, :-1]
    a = X - r[None, 1:]
    i0 = m0(b) - m0(a)
    i1 = (X - r[None, :-1]) * i0 - (m1(b) - m1(a))
    A1 = np.zeros((m, m))
    A1[:, :-1] += i0 - i1 / delta
    A1[:, 1:] += i1 / delta
    bp = X + r[None, 1:]
    ap = X + r[None, :-1]
    j0 = m0(bp) - m0(ap)
    j1 = (m1(bp) - m1(ap)) - (X + r[None, :-1]) * j0
    A2 = np.zeros((m, m))
    A2[:, :-1] += j0 - j1 / delta
    A2[:, 1:] += j1 / delta
    A = 0.5 * (A1 - A2)
    v = np.linalg.solve(np.eye(m) - A, r * g)
    w = np.empty(m)
    w[1:] = v[1:] / r[1:]
    w[0] = 2.0 * w[1] - w[2]
    return r, w
