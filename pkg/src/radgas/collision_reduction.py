"""Reduced nonelastic collision integrals and their auxiliary functions.

The mass/energy exchange between ground and excited molecules is governed by
three 6-fold velocity integrals (number exchange P, energy exchange A, and the
two-temperature transfer B).  For the simplified hard-sphere kernel they
collapse to 3-fold integrals over (r, rho, theta) with five printed kernels:

    G_delta  ->  P(T2, T1)            F_delta  ->  (P(T2,T1) - P(T1))/(T2-T1)
    A_kern   ->  A(T1; eps0)          B1, B2delta -> -B(T1,T2)/(T2-T1)

F_delta and B2delta are the divided-difference forms with the removable
T2 = T1 singularity eliminated via delta = sqrt(T2/T1) - 1.

Two evaluation modes exist.  "printed" evaluates the reduced formulas exactly
as stated (this is what the level-curve scan consumes; every constant cancels
from the ratios there).  "calibrated" restores the change-of-variables factors
the printed forms drop -- a factor sqrt(T1) inside G_delta/B1 and one global
constant per quantity (c0^2 analytically) -- so the values match the defining
6-fold integrals.  `mc_oracle` samples those 6-fold integrals directly and
`fit_calibration` pins the constants against it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .constants import PhysConsts
from .errors import DomainError, SingularDenominator

__all__ = [
    "TripleQuadSpec",
    "ReducedKernelParams",
    "CollisionFunctionals",
    "eval_reduced_kernel",
    "triple_integral",
    "functionals",
    "H_func",
    "S_func",
    "L_func",
    "mc_oracle",
    "fit_calibration",
]

KERNEL_KINDS = ("F_delta", "G_delta", "A_kern", "B1", "B2delta")

#: Relative tolerance below which H/S/L denominators count as singular.
_SINGULAR_RTOL = 1e-10


@dataclass(frozen=True)
class TripleQuadSpec:
    """Node counts and truncation for the (r, rho, theta) quadrature.

    r_max = 12 puts the discarded Gaussian tail below 1e-30 of the integrand
    mass; Gauss-Legendre on the mapped intervals handles the square-root
    kernels, which are smooth but not polynomial.
    """

    r_max: float = 12.0
    n_r: int = 96
    n_rho: int = 96
    n_theta: int = 48

    def __post_init__(self):
        if not self.r_max > 0:
            raise ValueError(f"r_max must be > 0, got {self.r_max}")
        if self.n_r < 16 or self.n_rho < 16:
            raise ValueError("radial node counts must be >= 16")
        if self.n_theta < 8:
            raise ValueError("n_theta must be >= 8")


@dataclass(frozen=True)
class ReducedKernelParams:
    """Temperatures and quantum entering the reduced kernels."""

    T1: float
    T2: float
    epsilon0: float

    def __post_init__(self):
        if not (self.T1 > 0 and self.T2 > 0):
            raise ValueError(f"temperatures must be > 0, got ({self.T1}, {self.T2})")
        if not self.epsilon0 > 0:
            raise ValueError(f"epsilon0 must be > 0, got {self.epsilon0}")

    @property
    def delta(self) -> float:
        # Recomputed on demand so it can never go stale.
        return math.sqrt(self.T2 / self.T1) - 1.0


def _check_cone(a, b, c):
    """The reachable region is a = rho^2, b = rho*r*cos(theta), c = r^2."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    tol = 1e-9 * (1.0 + np.sqrt(np.abs(a * c)))
    if np.any(a < 0) or np.any(c < 0) or np.any(np.abs(b) > np.sqrt(a * c) + tol):
        raise DomainError("(a, b, c) outside the cone a,c >= 0, |b| <= sqrt(a*c)")
    return a, b, c


def _kernel_value(kind: str, a, b, c, params: ReducedKernelParams):
    """Evaluate one printed kernel on (possibly array) cone coordinates."""
    T1, T2, eps0 = params.T1, params.T2, params.epsilon0
    delta = params.delta
    four_eps = 4.0 * eps0 / T1
    w4sq = 0.25 * a + 0.25 * c - 0.5 * b  # |w4|^2 in the (xi, eta) variables

    if kind == "G_delta":
        return 4.0 * math.pi * np.sqrt(a + delta * (a - b) + delta**2 * w4sq + four_eps)
    if kind == "A_kern":
        return 4.0 * math.pi * (T1 / 8.0 * (a + 2.0 * b + c) + eps0) * np.sqrt(T1 * a + 4.0 * eps0)
    if kind == "B1":
        return 2.0 * math.pi * w4sq * np.sqrt(a + four_eps)

    # The two divided-difference kernels share the same rationalized core.
    r1 = np.sqrt(a + delta * (a - b) + delta**2 * w4sq + four_eps)
    r2 = np.sqrt(a + four_eps)
    sroot = math.sqrt(T1) + math.sqrt(T2)
    lin = (a - b) / sroot + (a - 2.0 * b + c) / (4.0 * sroot) * delta
    if kind == "F_delta":
        return 4.0 * math.pi * lin / (r1 + r2)
    if kind == "B2delta":
        return 2.0 * math.pi * T2 * w4sq * lin / (r1 + r2)
    raise ValueError(f"unknown kernel kind {kind!r}")


def eval_reduced_kernel(kind: str, a, b, c, params: ReducedKernelParams):
    """Pointwise value of a printed reduced kernel; validates the cone."""
    a, b, c = _check_cone(a, b, c)
    return _kernel_value(kind, a, b, c, params)


@lru_cache(maxsize=8)
def _quad_grid(spec: TripleQuadSpec):
    """Flattened (a, b, c) nodes and combined weights for the triple integral.

    Weight includes pi^2 * r^2 rho^2 sin(theta) * exp(-(r^2+rho^2)/2) and the
    Gauss-Legendre weights on [0, r_max] x [0, r_max] x [0, pi].
    """
    xr, wr = np.polynomial.legendre.leggauss(spec.n_r)
    r = 0.5 * spec.r_max * (xr + 1.0)
    wr = 0.5 * spec.r_max * wr
    xq, wq = np.polynomial.legendre.leggauss(spec.n_rho)
    rho = 0.5 * spec.r_max * (xq + 1.0)
    wq = 0.5 * spec.r_max * wq
    xt, wt = np.polynomial.legendre.leggauss(spec.n_theta)
    theta = 0.5 * math.pi * (xt + 1.0)
    wt = 0.5 * math.pi * wt

    R, RHO, TH = np.meshgrid(r, rho, theta, indexing="ij")
    WEIGHT = (
        math.pi**2
        * R**2
        * RHO**2
        * np.sin(TH)
        * np.exp(-0.5 * (R**2 + RHO**2))
        * np.einsum("i,j,k->ijk", wr, wq, wt)
    )
    a = (RHO**2).ravel()
    b = (RHO * R * np.cos(TH)).ravel()
    c = (R**2).ravel()
    return a, b, c, WEIGHT.ravel()


def triple_integral(kind: str, params: ReducedKernelParams, spec: TripleQuadSpec) -> float:
    """pi^2 * triple integral of r^2 rho^2 sin(theta) * kernel * exp(-(r^2+rho^2)/2).

    `kind` is one of the printed kernels, or "one" (kernel identically 1,
    test hook: the exact value is pi^3).
    """
    a, b, c, w = _quad_grid(spec)
    if kind == "one":
        vals = np.ones_like(a)
    else:
        vals = _kernel_value(kind, a, b, c, params)
    # Fixed summation order for cross-run determinism.
    return float(np.add.reduce(vals * w))


@dataclass(frozen=True)
class CollisionFunctionals:
    """The five reduced functionals at one (T1, T2) pair.

    P_diff and B_diff are the divided differences (P(T2,T1)-P(T1))/(T2-T1)
    and B(T1,T2)/(T2-T1); both are regular at T2 = T1.
    """

    P11: float
    P21: float
    P_diff: float
    A: float
    B_diff: float

    def __post_init__(self):
        values = (self.P11, self.P21, self.P_diff, self.A, self.B_diff)
        if not all(np.isfinite(v) for v in values):
            raise ValueError(f"non-finite functional: {values}")
        if not (self.P11 > 0 and self.P21 > 0 and self.A > 0):
            raise ValueError("P11, P21, A must be positive")


#: Analytic calibration constants: the printed triples drop c0^2 from the
#: two Maxwellian normalizations.
def default_calibration(consts: PhysConsts) -> dict:
    return {"P": consts.c0**2, "P21": consts.c0**2, "A": consts.c0**2, "B": consts.c0**2}


def functionals(
    T1: float,
    T2: float,
    consts: PhysConsts,
    spec: TripleQuadSpec = TripleQuadSpec(),
    mode: str = "printed",
    constants: dict | None = None,
) -> CollisionFunctionals:
    """Evaluate all five functionals at (T1, T2).

    mode="printed" reproduces the stated reduced formulas verbatim.
    mode="calibrated" restores sqrt(T1) inside G_delta/G_0/B1 (A and the
    divided-difference kernels already carry consistent factors) and applies
    one constant per quantity, so the results equal the defining 6-fold
    integrals; `constants` overrides the analytic defaults (fitted values
    from `fit_calibration` go here).
    """
    p = ReducedKernelParams(T1, T2, consts.epsilon0)
    p_diag = ReducedKernelParams(T1, T1, consts.epsilon0)
    t_g0 = triple_integral("G_delta", p_diag, spec)
    t_gd = triple_integral("G_delta", p, spec)
    t_fd = triple_integral("F_delta", p, spec)
    t_a = triple_integral("A_kern", p, spec)
    t_b1 = triple_integral("B1", p, spec)
    t_b2 = triple_integral("B2delta", p, spec)

    if mode == "printed":
        return CollisionFunctionals(
            P11=t_g0, P21=t_gd, P_diff=t_fd, A=t_a, B_diff=-(t_b1 + t_b2)
        )
    if mode == "calibrated":
        k = default_calibration(consts)
        if constants:
            k = {**k, **constants}
        s1 = math.sqrt(T1)
        return CollisionFunctionals(
            P11=k["P"] * s1 * t_g0,
            P21=k["P21"] * s1 * t_gd,
            P_diff=k["P"] * t_fd,
            A=k["A"] * t_a,
            B_diff=-k["B"] * (s1 * t_b1 + t_b2),
        )
    raise ValueError(f"unknown mode {mode!r}")


def _check_denominator(name: str, value: float, scale: float, T1: float, T2: float):
    if abs(value) <= _SINGULAR_RTOL * max(scale, 1e-300):
        raise SingularDenominator(
            f"{name} = {value:.3e} vanishes within tolerance at (T1, T2) = ({T1}, {T2})"
        )


def H_func(
    T1: float,
    T2: float,
    consts: PhysConsts,
    spec: TripleQuadSpec = TripleQuadSpec(),
    funcs: CollisionFunctionals | None = None,
) -> float:
    """H = (T2/T1) * exp(-2*eps0/T1) * P(T1) / P(T2,T1).

    The overall constants of the P's cancel, so H is mode-independent.
    """
    f = funcs if funcs is not None else functionals(T1, T2, consts, spec)
    return (T2 / T1) * math.exp(-2.0 * consts.epsilon0 / T1) * f.P11 / f.P21


def S_func(
    T1: float,
    T2: float,
    consts: PhysConsts,
    spec: TripleQuadSpec = TripleQuadSpec(),
    funcs: CollisionFunctionals | None = None,
) -> float:
    """Singularity-removed S: 4*pi*H/(T2 - T1*H) over the collisional bracket.

    Raises SingularDenominator when T2 - T1*H or the bracket vanishes within
    tolerance rather than returning NaN/inf.
    """
    f = funcs if funcs is not None else functionals(T1, T2, consts, spec)
    H = H_func(T1, T2, consts, spec, funcs=f)
    gap = T2 - T1 * H
    _check_denominator("T2 - T1*H", gap, max(abs(T2), abs(T1 * H)), T1, T2)
    numer = 4.0 * math.pi * H / gap
    term_a = f.P_diff * math.exp(-2.0 * consts.epsilon0 / T1) / (T1 * f.P21) * f.A
    term_b = (H / T2) * f.B_diff
    bracket = term_a + term_b
    _check_denominator("S bracket", bracket, max(abs(term_a), abs(term_b)), T1, T2)
    denom = (4.0 * consts.sigma / 3.0) / T1 * bracket
    return numer / denom


def L_func(
    T1: float,
    T2: float,
    consts: PhysConsts,
    spec: TripleQuadSpec = TripleQuadSpec(),
    funcs: CollisionFunctionals | None = None,
) -> float:
    """L = S * (1/T1 + H/T2): the level-curve quantity of the nonexistence result."""
    f = funcs if funcs is not None else functionals(T1, T2, consts, spec)
    H = H_func(T1, T2, consts, spec, funcs=f)
    S = S_func(T1, T2, consts, spec, funcs=f)
    return S * (1.0 / T1 + H / T2)


def mc_oracle(
    quantity: str,
    T1: float,
    T2: float,
    consts: PhysConsts,
    n_samples: int = 10**6,
    seed: int = 0,
) -> tuple[float, float]:
    """Monte Carlo estimate of a defining 6-fold integral; returns (mean, std_error).

    Samples (v3, v4) from the zero-mean Maxwellians (variance T/2 per axis --
    importance sampling with unit weights) and averages the hard-sphere gain
    factor integrated over the scattering sphere, 2*pi*C0*sqrt(|v3-v4|^2+4*eps0).
    For quantity "B", the two temperatures share the same normal draws so the
    difference estimator vanishes exactly at T2 = T1.
    """
    if n_samples < 10**4:
        raise ValueError(f"n_samples must be >= 1e4, got {n_samples}")
    if quantity not in ("P", "P21", "A", "B"):
        raise ValueError(f"unknown quantity {quantity!r}")
    rng = np.random.default_rng(seed)
    z3 = rng.standard_normal((n_samples, 3))
    z4 = rng.standard_normal((n_samples, 3))
    pref = 2.0 * math.pi * consts.C0_kernel * consts.maxwellian_mass**2
    eps0 = consts.epsilon0

    def wgain(v3, v4):
        return np.sqrt(np.sum((v3 - v4) ** 2, axis=-1) + 4.0 * eps0)

    v4 = math.sqrt(T1 / 2.0) * z4
    if quantity == "P":
        samples = wgain(math.sqrt(T1 / 2.0) * z3, v4)
    elif quantity == "P21":
        samples = wgain(math.sqrt(T2 / 2.0) * z3, v4)
    elif quantity == "A":
        v3 = math.sqrt(T1 / 2.0) * z3
        samples = (0.5 * np.sum(v3**2, axis=-1) + eps0) * wgain(v3, v4)
    else:  # "B": common random numbers across the two temperatures
        v3a = math.sqrt(T1 / 2.0) * z3
        v3b = math.sqrt(T2 / 2.0) * z3
        samples = 0.5 * np.sum(v3a**2, axis=-1) * wgain(v3a, v4) - 0.5 * np.sum(
            v3b**2, axis=-1
        ) * wgain(v3b, v4)

    mean = pref * float(np.mean(samples))
    std_error = pref * float(np.std(samples, ddof=1)) / math.sqrt(n_samples)
    return mean, std_error


def structural_value(
    quantity: str, T1: float, T2: float, consts: PhysConsts, spec: TripleQuadSpec
) -> float:
    """Reduced-integral value carrying the sqrt(T1) structure but no constant.

    The oracle satisfies  mc == constant * structural_value  with one constant
    per quantity (c0^2 analytically); `fit_calibration` estimates it.
    """
    p = ReducedKernelParams(T1, T2, consts.epsilon0)
    p_diag = ReducedKernelParams(T1, T1, consts.epsilon0)
    s1 = math.sqrt(T1)
    if quantity == "P":
        return s1 * triple_integral("G_delta", p_diag, spec)
    if quantity == "P21":
        return s1 * triple_integral("G_delta", p, spec)
    if quantity == "A":
        return triple_integral("A_kern", p, spec)
    if quantity == "B":
        b_diff = -(s1 * triple_integral("B1", p, spec) + triple_integral("B2delta", p, spec))
        return (T2 - T1) * b_diff
    raise ValueError(f"unknown quantity {quantity!r}")


def fit_calibration(
    pairs: list[tuple[float, float]],
    consts: PhysConsts,
    spec: TripleQuadSpec = TripleQuadSpec(),
    n_samples: int = 10**6,
    seed: int = 0,
) -> dict:
    """Fit one constant per quantity against the Monte Carlo oracle.

    Least squares through the origin over the supplied (T1, T2) pairs.
    Returns {"constants": {...}, "analytic": {...}, "detail": [...]} where
    detail rows carry (quantity, T1, T2, mc, std_error, structural).
    """
    constants: dict[str, float] = {}
    detail = []
    for iq, quantity in enumerate(("P", "P21", "A", "B")):
        num = 0.0
        den = 0.0
        for ip, (T1, T2) in enumerate(pairs):
            mc, se = mc_oracle(quantity, T1, T2, consts, n_samples, seed + 1000 * iq + ip)
            sv = structural_value(quantity, T1, T2, consts, spec)
            detail.append(
                {"quantity": quantity, "T1": T1, "T2": T2, "mc": mc, "se": se, "structural": sv}
            )
            num += mc * sv
            den += sv * sv
        constants[quantity] = num / den if den > 0 else float(consts.c0**2)
    return {
        "constants": constants,
        "analytic": default_calibration(consts),
        "detail": detail,
    }
