"""Slab-geometry radiative transport and the two stationary slab solvers.

The transport part evaluates the explicit ray integrals of the monochromatic
radiation equation mu dG/dy = j - sigma*G by marching cell-by-cell with
analytic per-cell attenuation (exact for constant coefficients).

Both stationary solvers reduce to the same Fredholm equation of the second
kind on [0, L],

    u(x) = int_0^L K(x - xi) u(xi) dxi + g(x),

with the even kernel K(x) = (1/2) * E1(|x|) (logarithmic singularity at 0,
integral 1 over the line).  The discretization is a product-integration
Nystroem scheme on a uniform grid: u is piecewise linear and every kernel
moment over a cell is computed from the closed-form antiderivatives of E1,
so the singularity never meets a quadrature node.  A direct dense solve and
Picard iteration are both run; the kernel row sums are < 1 on any finite
slab, which makes Picard a contraction and cross-checks the direct path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import exp1, expn

from .constants import PhysConsts
from .errors import DomainError, NonContraction, NonPositiveW
from .physics import pseudo_planck

__all__ = [
    "SlabGrid",
    "AngleGrid",
    "BoundaryProfile",
    "RadiationField",
    "transport_solve",
    "flux",
    "angular_mean",
    "fredholm_kernel_K",
    "kernel_sup",
    "solve_lte_fredholm",
    "solve_exp_limit",
    "FredholmResult",
    "ExpLimitResult",
]


@dataclass(frozen=True)
class SlabGrid:
    """Uniform spatial nodes on [0, L], endpoints included."""

    L: float
    n_y: int = 129

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError(f"L must be > 0, got {self.L}")
        if self.n_y < 16:
            raise ValueError(f"n_y must be >= 16, got {self.n_y}")

    @property
    def y(self) -> np.ndarray:
        return np.linspace(0.0, self.L, self.n_y)

    @property
    def h(self) -> float:
        return self.L / (self.n_y - 1)


@dataclass(frozen=True)
class AngleGrid:
    """Gauss-Legendre nodes for mu = cos(psi) on (0, 1]; weights sum to 1."""

    n_mu: int = 48

    def __post_init__(self):
        if self.n_mu < 16:
            raise ValueError(f"n_mu must be >= 16, got {self.n_mu}")

    @property
    def mu(self) -> np.ndarray:
        x, _ = np.polynomial.legendre.leggauss(self.n_mu)
        return 0.5 * (x + 1.0)

    @property
    def weights(self) -> np.ndarray:
        _, w = np.polynomial.legendre.leggauss(self.n_mu)
        return 0.5 * w


class BoundaryProfile:
    """Incoming intensity as a function of mu in (0, 1].

    Named forms: zero, constant(c), planck(T) (the pseudo-Planck value at T);
    arbitrary profiles via from_function.  Always nonnegative.
    """

    def __init__(self, fn, label: str):
        self._fn = fn
        self.label = label

    @classmethod
    def zero(cls) -> "BoundaryProfile":
        return cls(lambda mu: np.zeros_like(np.asarray(mu, dtype=float)), "zero")

    @classmethod
    def constant(cls, c: float) -> "BoundaryProfile":
        if c < 0:
            raise ValueError(f"boundary intensity must be >= 0, got {c}")
        return cls(lambda mu: np.full_like(np.asarray(mu, dtype=float), c), f"constant({c})")

    @classmethod
    def planck(cls, T: float, consts: PhysConsts) -> "BoundaryProfile":
        g0 = float(pseudo_planck(T, consts))
        return cls(lambda mu: np.full_like(np.asarray(mu, dtype=float), g0), f"planck(T={T})")

    @classmethod
    def from_function(cls, fn, label: str = "custom") -> "BoundaryProfile":
        return cls(lambda mu: np.asarray(fn(np.asarray(mu, dtype=float)), dtype=float), label)

    @classmethod
    def tabulated(cls, values, angles: "AngleGrid") -> "BoundaryProfile":
        """Values on the AngleGrid nodes, linearly interpolated in mu."""
        vals = np.asarray(values, dtype=float)
        nodes = angles.mu
        if vals.shape != nodes.shape:
            raise ValueError(f"need one value per angular node, got {vals.shape}")
        if np.any(vals < 0):
            raise ValueError("boundary intensities must be >= 0")
        return cls(lambda mu: np.interp(mu, nodes, vals), "tabulated")

    def __call__(self, mu) -> np.ndarray:
        vals = np.asarray(self._fn(np.asarray(mu, dtype=float)), dtype=float)
        if np.any(vals < 0):
            raise ValueError(f"boundary profile {self.label} produced negative intensity")
        return vals


@dataclass
class RadiationField:
    """G(y_i, +-mu_j) on the tensor grid; plus/minus are the signed directions."""

    grid: SlabGrid
    angles: AngleGrid
    g_plus: np.ndarray  # (n_y, n_mu), direction +mu
    g_minus: np.ndarray  # (n_y, n_mu), direction -mu


def _cell_coeffs(nodes: np.ndarray) -> np.ndarray:
    return 0.5 * (nodes[1:] + nodes[:-1])


def _linear_emission_integral(j_lo, j_hi, sigma_c, delta, mu):
    """int over one cell of the attenuated piecewise-linear emission.

    Computes int_0^D (j_hi - s*x) * (1/mu) * exp(-sigma*x/mu) dx with
    s = (j_hi - j_lo)/D, where x is measured back from the downstream face.
    Exact for linear emission under constant per-cell absorption.
    """
    x = sigma_c * delta / mu
    s = (j_hi - j_lo) / delta
    small = x < 1e-3
    with np.errstate(divide="ignore", invalid="ignore"):
        one_minus_e = -np.expm1(-x)
        i0 = np.where(small, (delta / mu) * (1.0 - x / 2.0 + x**2 / 6.0 - x**3 / 24.0),
                      one_minus_e / np.where(sigma_c == 0, 1.0, sigma_c))
        # int x * e^(-sigma x/mu) dx / mu; series for small optical depth
        series = (delta**2 / mu) * (0.5 - x / 3.0 + x**2 / 8.0 - x**3 / 30.0 + x**4 / 144.0)
        sig = np.where(sigma_c == 0, 1.0, sigma_c)
        exact = (mu / sig**2) * one_minus_e - (delta / sig) * np.exp(-x)
        i1 = np.where(small, series, exact)
    return j_hi * i0 - s * i1


def ray_integrate(
    sigma_nodes: np.ndarray,
    emission_nodes: np.ndarray,
    a_plus: BoundaryProfile,
    a_minus: BoundaryProfile,
    grid: SlabGrid,
    angles: AngleGrid,
) -> RadiationField:
    """March the ray solution of mu dG/dy = j(y) - sigma(y) * G through the slab.

    sigma is treated as constant per cell (midpoint of the nodal values) and
    the emission as linear per cell; both choices make the sweep exact for
    constant coefficients.
    """
    y = grid.y
    mu = angles.mu
    n_y = grid.n_y
    sigma_c = _cell_coeffs(np.broadcast_to(np.asarray(sigma_nodes, dtype=float), (n_y,)))
    j = np.broadcast_to(np.asarray(emission_nodes, dtype=float), (n_y,))
    deltas = np.diff(y)

    g_plus = np.empty((n_y, angles.n_mu))
    g_plus[0] = a_plus(mu)
    for k in range(n_y - 1):
        att = np.exp(-sigma_c[k] * deltas[k] / mu)
        g_plus[k + 1] = g_plus[k] * att + _linear_emission_integral(
            j[k], j[k + 1], sigma_c[k], deltas[k], mu
        )

    g_minus = np.empty((n_y, angles.n_mu))
    g_minus[n_y - 1] = a_minus(mu)
    for k in range(n_y - 2, -1, -1):
        att = np.exp(-sigma_c[k] * deltas[k] / mu)
        g_minus[k] = g_minus[k + 1] * att + _linear_emission_integral(
            j[k + 1], j[k], sigma_c[k], deltas[k], mu
        )

    return RadiationField(grid=grid, angles=angles, g_plus=g_plus, g_minus=g_minus)


def transport_solve(
    rho,
    T,
    boundary: tuple[BoundaryProfile, BoundaryProfile],
    consts: PhysConsts,
    grid: SlabGrid,
    angles: AngleGrid,
) -> RadiationField:
    """Solve the slab radiation equation for given density/temperature fields.

    Absorption sigma = eps0 * rho * (1 - exp(-2*eps0/T)) and emission
    j = eps0 * rho * exp(-2*eps0/T); the source function j/sigma is then the
    pseudo-Planck intensity, so constant (rho, T) with Planck incoming
    boundary reproduces the equilibrium exactly.
    """
    rho = np.broadcast_to(np.asarray(rho, dtype=float), (grid.n_y,))
    T = np.broadcast_to(np.asarray(T, dtype=float), (grid.n_y,))
    if np.any(rho < 0) or np.any(T <= 0):
        raise ValueError("rho must be >= 0 and T > 0 pointwise")
    q = np.exp(-2.0 * consts.epsilon0 / T)
    sigma = consts.epsilon0 * rho * (1.0 - q)
    emission = consts.epsilon0 * rho * q
    a_plus, a_minus = boundary
    return ray_integrate(sigma, emission, a_plus, a_minus, grid, angles)


def flux(field: RadiationField, angles: AngleGrid | None = None) -> np.ndarray:
    """Net radiative flux J(y) = 2*pi * sum_j w_j mu_j (G(y, +mu_j) - G(y, -mu_j))."""
    a = angles if angles is not None else field.angles
    wmu = a.weights * a.mu
    return 2.0 * math.pi * (field.g_plus - field.g_minus) @ wmu


def angular_mean(field: RadiationField, angles: AngleGrid | None = None) -> np.ndarray:
    """Full-sphere integral int G dn = 2*pi * sum_j w_j (G(y,+mu_j) + G(y,-mu_j))."""
    a = angles if angles is not None else field.angles
    return 2.0 * math.pi * (field.g_plus + field.g_minus) @ a.weights


# ---------------------------------------------------------------------------
# Fredholm kernel K = (1/2) E1(|x|) and its product-integration machinery
# ---------------------------------------------------------------------------


def fredholm_kernel_K(x):
    """K(x) = (1/2) * int_0^(pi/2) tan(psi) exp(-|x|/cos(psi)) dpsi = E1(|x|)/2.

    Even, positive, decreasing in |x|, log-singular at 0 (DomainError there;
    the solvers integrate across the singularity analytically instead).
    """
    x = np.asarray(x, dtype=float)
    if np.any(x == 0):
        raise DomainError("K has a logarithmic singularity at x = 0")
    return 0.5 * exp1(np.abs(x))


def _m0(t):
    """Odd antiderivative of K: int_0^t K(u) du = sgn(t)/2 * (|t| E1(|t|) - e^-|t| + 1)."""
    t = np.asarray(t, dtype=float)
    s = np.abs(t)
    val = np.where(s > 0, 0.5 * (s * exp1(np.where(s > 0, s, 1.0)) - np.exp(-s) + 1.0), 0.0)
    return np.sign(t) * val


def _m1(t):
    """Even second moment: int_0^t u K(u) du = (s^2 E1(s)/2 - (s+1) e^-s / 2 + 1/2) / 2."""
    t = np.asarray(t, dtype=float)
    s = np.abs(t)
    e1 = exp1(np.where(s > 0, s, 1.0))
    return np.where(s > 0, 0.5 * (0.5 * s**2 * e1 - 0.5 * (s + 1.0) * np.exp(-s) + 0.5), 0.0)


def kernel_sup(L: float) -> float:
    """sup over x in (0, L) of int_0^L K(x - xi) dxi; attained at the midpoint."""
    return float(2.0 * _m0(L / 2.0))


def _nystrom_matrix(y: np.ndarray) -> np.ndarray:
    """Product-integration matrix A with (A u)_i ~= int_0^L K(y_i - xi) u(xi) dxi.

    u is piecewise linear on the grid; each cell integral uses the exact E1
    moments, so the diagonal (singular) cells are handled analytically.
    """
    n = len(y)
    delta = np.diff(y)
    X = y[:, None]
    b = X - y[None, :-1]
    a = X - y[None, 1:]
    i0 = _m0(b) - _m0(a)
    i1 = (X - y[None, :-1]) * i0 - (_m1(b) - _m1(a))
    A = np.zeros((n, n))
    A[:, :-1] += i0 - i1 / delta[None, :]
    A[:, 1:] += i1 / delta[None, :]
    return A


def _picard(A: np.ndarray, g: np.ndarray, tol: float = 1e-13, max_iter: int = 10_000):
    """Fixed-point iteration u <- A u + g from zero; returns (u, ratios)."""
    u = np.zeros_like(g)
    prev_diff = None
    ratios = []
    for _ in range(max_iter):
        nxt = A @ u + g
        diff = float(np.max(np.abs(nxt - u)))
        if prev_diff is not None and prev_diff > 0:
            ratios.append(diff / prev_diff)
        u = nxt
        if diff <= tol * max(1.0, float(np.max(np.abs(u)))):
            break
        prev_diff = diff
    return u, ratios


def _ensure_positive(w: np.ndarray, y: np.ndarray):
    """Reject solutions that dip <= 0 (identically-zero w is admissible)."""
    if float(np.max(np.abs(w))) > 0 and float(np.min(w)) <= 0:
        at = int(np.argmin(w))
        raise NonPositiveW(f"w({y[at]:.6g}) = {w[at]:.3e} <= 0: inadmissible boundary profile")


def _check_contraction(A: np.ndarray):
    row_sums = A.sum(axis=1)
    sup = float(np.max(row_sums))
    if sup >= 1.0:
        raise NonContraction(f"kernel row sum {sup:.6f} >= 1; quadrature misconfigured")
    return sup


def _e2_product_flux(u: np.ndarray, y: np.ndarray, boundary_term: np.ndarray, coeff: float):
    """J(y)/(2*pi) = boundary_term + coeff * int_0^L u(xi) sgn(y-xi) E2(|y-xi|) dxi.

    Piecewise-linear u with analytic E2/E3/E4 moments (mu integrated exactly),
    so the only inconsistency left is the interpolation of u itself.
    """

    def p0(t):  # even antiderivative of the odd integrand sgn(u) E2(|u|)
        s = np.abs(t)
        return 0.5 - expn(3, s)

    def p1(t):  # odd antiderivative of the even integrand |u| E2(|u|)
        s = np.abs(t)
        return np.sign(t) * (-s * expn(3, s) - expn(4, s) + 1.0 / 3.0)

    delta = np.diff(y)
    X = y[:, None]
    b = X - y[None, :-1]
    a = X - y[None, 1:]
    i0 = p0(b) - p0(a)
    i1 = (X - y[None, :-1]) * i0 - (p1(b) - p1(a))
    w_lo = i0 - i1 / delta[None, :]
    w_hi = i1 / delta[None, :]
    inner = w_lo @ u[:-1] + w_hi @ u[1:]
    return boundary_term + coeff * inner


@dataclass
class FredholmResult:
    """Output of the linearized-LTE slab solve."""

    theta: np.ndarray
    zeta: np.ndarray
    i0: float
    C0: float
    grid: SlabGrid
    h_field: RadiationField
    flux_j: np.ndarray  # product-integration flux J(y); constant in theory
    kernel_sup: float
    picard_ratio: float
    picard_gap: float  # max |Nystroem - Picard|
    residual_max: float
    alpha0: float
    # wall derivative of zeta + theta: automatically zero since zeta + theta
    # is the constant C0; recorded rather than enforced
    neumann_residual: float = 0.0


def solve_lte_fredholm(
    j0: BoundaryProfile,
    grid: SlabGrid,
    angles: AngleGrid,
    consts: PhysConsts,
    T0: float = 1.0,
    zeta_mass: float | None = None,
) -> FredholmResult:
    """Stationary temperature/density perturbations of the linearized LTE slab.

    Solves theta(x) = int_0^L K(x-xi) theta(xi) dxi - Phi'(x)/2 where Phi is
    built from the incoming perturbation j0 at y = 0 only (the constant flux
    i0 drops under the differentiation and is recovered a posteriori from the
    reconstructed field).  zeta = C0 - theta with C0 fixed by the prescribed
    integral of zeta (C0 = 0 when no mass constraint is given).

    Uses rescaled units with unit absorption depth; T0 sets the coupling
    alpha0 = (2*eps0/T0)*(1 + G0(T0)) which linearly scales theta and zeta
    but none of the flux quantities.
    """
    y = grid.y
    mu = angles.mu
    w = angles.weights
    g0 = float(pseudo_planck(T0, consts))
    alpha0 = 2.0 * consts.epsilon0 / T0 * (1.0 + g0)

    j0_vals = j0(mu)
    decay = np.exp(-y[:, None] / mu[None, :])
    g = (decay @ (w * j0_vals)) / (2.0 * alpha0)

    A = _nystrom_matrix(y)
    sup = _check_contraction(A)
    theta = np.linalg.solve(np.eye(len(y)) - A, g)
    residual_max = float(np.max(np.abs(theta - A @ theta - g)))
    theta_picard, ratios = _picard(A, g)
    picard_gap = float(np.max(np.abs(theta - theta_picard)))
    picard_ratio = float(np.max(ratios[2:])) if len(ratios) > 3 else sup

    if zeta_mass is None:
        C0 = 0.0
    else:
        C0 = (zeta_mass + float(np.trapezoid(theta, y))) / grid.L
    zeta = C0 - theta
    total = zeta + theta
    neumann = max(
        abs(float(total[1] - total[0])), abs(float(total[-1] - total[-2]))
    ) / grid.h

    h_field = ray_integrate(
        np.ones_like(y), alpha0 * theta, j0, BoundaryProfile.zero(), grid, angles
    )
    boundary_term = decay @ (w * mu * j0_vals)
    flux_j = 2.0 * math.pi * _e2_product_flux(theta, y, boundary_term, alpha0)
    i0 = float(np.mean(flux_j)) / (2.0 * math.pi)

    return FredholmResult(
        theta=theta,
        zeta=zeta,
        i0=i0,
        C0=C0,
        grid=grid,
        h_field=h_field,
        flux_j=flux_j,
        kernel_sup=sup,
        picard_ratio=picard_ratio,
        picard_gap=picard_gap,
        residual_max=residual_max,
        alpha0=alpha0,
        neumann_residual=neumann,
    )


@dataclass
class ExpLimitResult:
    """Output of the exponential-dependence slab solve."""

    w: np.ndarray
    j0: float
    H: RadiationField
    grid: SlabGrid
    flux_j: np.ndarray
    kernel_sup: float
    picard_ratio: float
    picard_gap: float
    residual_max: float
    energy_residual: np.ndarray  # int (H - w) dn at interior nodes, angle-grid route


def solve_exp_limit(
    a_plus: BoundaryProfile,
    grid: SlabGrid,
    angles: AngleGrid,
    consts: PhysConsts,
    normalize: bool = True,
) -> ExpLimitResult:
    """Stationary solution of the exponential-dependence slab model.

    Solves w(y) = int_0^L K(y-z) w(z) dz - S'(y)/2 with
    S(y) = int_0^1 mu a_+(mu) exp(-y/mu) dmu, reconstructs H along the rays,
    and recovers the constant flux j0.  The incoming profile is rescaled to
    2*pi*int a+ = 1 when `normalize` is set (zero profiles are left alone).
    Raises NonPositiveW if the converged w dips <= 0 while not identically 0.
    """
    y = grid.y
    mu = angles.mu
    wq = angles.weights

    a_vals = a_plus(mu)
    norm = 2.0 * math.pi * float(np.sum(wq * a_vals))
    if normalize and norm > 0:
        a_vals = a_vals / norm
        a_plus = BoundaryProfile.from_function(
            lambda m, base=a_plus, n=norm: base(m) / n, label=f"normalized({a_plus.label})"
        )

    decay = np.exp(-y[:, None] / mu[None, :])
    g = 0.5 * (decay @ (wq * a_vals))

    A = _nystrom_matrix(y)
    sup = _check_contraction(A)
    w = np.linalg.solve(np.eye(len(y)) - A, g)
    residual_max = float(np.max(np.abs(w - A @ w - g)))
    w_picard, ratios = _picard(A, g)
    picard_gap = float(np.max(np.abs(w - w_picard)))
    picard_ratio = float(np.max(ratios[2:])) if len(ratios) > 3 else sup

    _ensure_positive(w, y)

    H = ray_integrate(np.ones_like(y), w, a_plus, BoundaryProfile.zero(), grid, angles)
    boundary_term = decay @ (wq * mu * a_vals)
    flux_j = 2.0 * math.pi * _e2_product_flux(w, y, boundary_term, 1.0)
    j0 = float(np.mean(flux_j))
    energy_residual = angular_mean(H) - 4.0 * math.pi * w

    return ExpLimitResult(
        w=w,
        j0=j0,
        H=H,
        grid=grid,
        flux_j=flux_j,
        kernel_sup=sup,
        picard_ratio=picard_ratio,
        picard_gap=picard_gap,
        residual_max=residual_max,
        energy_residual=energy_residual,
    )
