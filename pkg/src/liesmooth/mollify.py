"""Mollifier smoothing of a strongly convex asymmetric norm.

The squared norm is convolved with the standard compactly supported bump
eta_eps over the ball of radius eps; the smoothed norm is the positively
homogeneous function whose r_M-level set coincides with the level set
{eta_eps * F^2 = r_M^2}.  The level set is stored as a radial profile
phi_eps over a sphere grid, interpolated by periodic cubics (bicubics for
n=3), which keeps the smoothed norm C^2 along every evaluation path.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import quad

from . import _sphere
from ._sphere import TWO_PI
from .asymnorm import NormConstants, NormModel, compute_constants
from .errors import ParameterError, RadialBracketError

QUAD_TOL = 1e-8
ROOTFIND_TOL = 1e-12

# fixed tensor quadrature orders over the eps-ball; the radial order is
# pinned by requiring the Euclidean kappa(eps) cross-check to 1e-10, which
# the bump integrand only reaches at 48 Gauss nodes
RADIAL_ORDER_2D = 48
ANGULAR_ORDER_2D = 64
RADIAL_ORDER_3D = 24
POLAR_ORDER_3D = 16
AZIMUTH_ORDER_3D = 32

_NORMALIZATION_CACHE: dict = {}


def _bump(s):
    """exp(1/(s^2-1)) on [0,1), 0 at s >= 1 (radial profile of eta)."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = s < 1.0
    out[inside] = np.exp(1.0 / (s[inside] ** 2 - 1.0))
    return out


def normalization_constant(dim: int) -> float:
    """C with integral of C exp(1/(||y||^2-1)) over the unit ball equal 1."""
    C = _NORMALIZATION_CACHE.get(dim)
    if C is None:
        surf = TWO_PI if dim == 2 else 2.0 * TWO_PI
        val, _ = quad(lambda s: math.exp(1.0 / (s * s - 1.0)) * s ** (dim - 1),
                      0.0, 1.0, epsabs=1e-15, epsrel=1e-14, limit=200)
        C = 1.0 / (surf * val)
        _NORMALIZATION_CACHE[dim] = C
    return C


@dataclass(frozen=True)
class Mollifier:
    """The standard mollifier eta_eps at a fixed scale."""

    dim: int
    epsilon: float
    C: float = field(init=False)

    def __post_init__(self):
        if self.epsilon <= 0.0:
            raise ParameterError("epsilon must be positive")
        if self.dim not in (2, 3):
            raise ParameterError("supported dimensions are 2 and 3")
        object.__setattr__(self, "C", normalization_constant(self.dim))
        total = self.integral()
        if abs(total - 1.0) > QUAD_TOL:
            raise ParameterError(f"mollifier mass {total} deviates from 1")

    def radial(self, rho):
        """eta_eps as a function of ||y||; exactly 0 outside [0, eps)."""
        rho = np.asarray(rho, dtype=float)
        return self.C / self.epsilon ** self.dim * _bump(rho / self.epsilon)

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        return self.radial(np.linalg.norm(y, axis=-1))

    def integral(self) -> float:
        """Mass of eta_eps by independent 1-D radial quadrature."""
        surf = TWO_PI if self.dim == 2 else 2.0 * TWO_PI
        val, _ = quad(lambda s: math.exp(1.0 / (s * s - 1.0)) * s ** (self.dim - 1),
                      0.0, 1.0, epsabs=1e-15, epsrel=1e-14, limit=200)
        return self.C * surf * val


# ---------------------------------------------------------------------------
# convolution over the eps ball

class Convolver:
    """Tensor-quadrature evaluator of (eta_eps * F^2) and its radial slope."""

    def __init__(self, norm: NormModel, mollifier: Mollifier,
                 constants: Optional[NormConstants] = None,
                 check_tau: bool = True):
        if norm.dim != mollifier.dim:
            raise ParameterError("norm and mollifier dimensions differ")
        if check_tau:
            if constants is None:
                constants = compute_constants(norm)
            if not mollifier.epsilon < constants.tau:
                raise ParameterError(
                    f"epsilon {mollifier.epsilon} must lie in (0, tau); "
                    f"tau = {constants.tau}")
        self.norm = norm
        self.mollifier = mollifier
        self.constants = constants
        eps = mollifier.epsilon
        if norm.dim == 2:
            x, w = np.polynomial.legendre.leggauss(RADIAL_ORDER_2D)
            rho = 0.5 * eps * (x + 1.0)
            wr = 0.5 * eps * w
            psi = _sphere.circle_grid(ANGULAR_ORDER_2D)
            wa = TWO_PI / ANGULAR_ORDER_2D
            dirs = _sphere.circle_points(psi)
            self.nodes = (rho[:, None, None] * dirs[None, :, :]).reshape(-1, 2)
            dens = mollifier.radial(rho) * rho * wr
            self.weights = np.repeat(dens, ANGULAR_ORDER_2D) * wa
        else:
            x, w = np.polynomial.legendre.leggauss(RADIAL_ORDER_3D)
            rho = 0.5 * eps * (x + 1.0)
            wr = 0.5 * eps * w
            xc, wc = np.polynomial.legendre.leggauss(POLAR_ORDER_3D)
            lat = np.arccos(xc)
            psi = _sphere.circle_grid(AZIMUTH_ORDER_3D)
            wa = TWO_PI / AZIMUTH_ORDER_3D
            lats = np.repeat(lat, AZIMUTH_ORDER_3D)
            lons = np.tile(psi, POLAR_ORDER_3D)
            dirs = _sphere.sphere_points(lats, lons)
            wdir = np.repeat(wc, AZIMUTH_ORDER_3D) * wa
            self.nodes = (rho[:, None, None] * dirs[None, :, :]).reshape(-1, 3)
            dens = mollifier.radial(rho) * rho ** 2 * wr
            self.weights = (dens[:, None] * wdir[None, :]).ravel()
        self.mass = float(np.sum(self.weights))

    def __call__(self, Y: np.ndarray, chunk: int = 400) -> np.ndarray:
        """(eta_eps * F^2) at an (m, n) array of points."""
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        m = Y.shape[0]
        q = self.nodes.shape[0]
        out = np.empty(m)
        step = max(1, min(m, int(2.5e6 // q)), 1) if chunk is None else chunk
        step = max(1, min(step, m))
        for i in range(0, m, step):
            block = Y[i:i + step]
            pts = (block[:, None, :] - self.nodes[None, :, :]).reshape(-1, self.norm.dim)
            vals = self.norm.values2(pts).reshape(block.shape[0], q)
            out[i:i + step] = vals @ self.weights
        return out

    def at(self, y) -> float:
        return float(self(np.asarray(y, dtype=float)[None, :])[0])

    def radial_slope(self, Y: np.ndarray, h: float = 1e-6) -> np.ndarray:
        """Central-difference radial derivative of the convolution."""
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        rhat = Y / np.linalg.norm(Y, axis=1, keepdims=True)
        return (self(Y + h * rhat) - self(Y - h * rhat)) / (2.0 * h)


def convolve_F2(norm: NormModel, mollifier: Mollifier, y,
                constants: Optional[NormConstants] = None) -> float:
    """(eta_eps * F^2)(y); requires eps in (0, tau) of the norm."""
    return Convolver(norm, mollifier, constants).at(y)


# ---------------------------------------------------------------------------
# level-set extraction

def _solve_levels(conv: Convolver, dirs: np.ndarray, r_M: float,
                  lo: float, hi: float):
    """Radii r_i with conv(r_i dirs_i) = r_M^2, vectorized over directions.

    Bisection localizes the root, safeguarded Newton (finite-difference
    slope) polishes it to ROOTFIND_TOL on the residual.
    """
    m = dirs.shape[0]
    target = r_M * r_M
    lo_v = np.full(m, lo)
    hi_v = np.full(m, hi)
    g_lo = conv(dirs * lo_v[:, None]) - target
    g_hi = conv(dirs * hi_v[:, None]) - target
    if np.any(g_lo >= 0.0) or np.any(g_hi <= 0.0):
        raise RadialBracketError(
            "radial monotonicity violated: level bracket has no sign change")
    for _ in range(14):
        mid = 0.5 * (lo_v + hi_v)
        g_mid = conv(dirs * mid[:, None]) - target
        neg = g_mid < 0.0
        lo_v = np.where(neg, mid, lo_v)
        hi_v = np.where(neg, hi_v, mid)
    r = 0.5 * (lo_v + hi_v)
    tol = ROOTFIND_TOL * max(1.0, target)
    dh = 1e-6
    g = conv(dirs * r[:, None]) - target
    for _ in range(14):
        if np.max(np.abs(g)) <= tol:
            break
        slope = (conv(dirs * (r + dh)[:, None]) - conv(dirs * (r - dh)[:, None])) / (2.0 * dh)
        step = g / slope
        r_new = np.clip(r - step, lo_v, hi_v)
        g_new = conv(dirs * r_new[:, None]) - target
        neg = g_new < 0.0
        lo_v = np.where(neg, np.maximum(lo_v, r_new), lo_v)
        hi_v = np.where(neg, hi_v, np.minimum(hi_v, r_new))
        r, g = r_new, g_new
    if np.max(np.abs(g)) > tol:
        raise RadialBracketError(
            f"level-set residual {np.max(np.abs(g)):.2e} above tolerance {tol:.2e}")
    return r


def extract_phi(norm: NormModel, mollifier: Mollifier, theta_grid=None,
                constants: Optional[NormConstants] = None,
                convolver: Optional[Convolver] = None):
    """Radial profile phi_eps(theta) of the level set {eta_eps*F^2 = r_M^2}.

    Dimension 2 only in this entry point (the n=3 profile is built inside
    build_mollified_norm on a latitude-longitude grid).  Returns the array
    of radii over ``theta_grid``.
    """
    if constants is None:
        constants = compute_constants(norm)
    conv = convolver or Convolver(norm, mollifier, constants)
    if theta_grid is None:
        theta_grid = _sphere.circle_grid(256)
    theta_grid = np.asarray(theta_grid, dtype=float)
    dirs = _sphere.circle_points(theta_grid)
    lo, hi = constants.annulus
    return _solve_levels(conv, dirs, constants.r_M, lo, hi)


# ---------------------------------------------------------------------------
# the smoothed norm

class _CircleProfile:
    """Unit-sphere values of the smoothed norm: r_M / phi_eps(theta)."""

    __slots__ = ("r_M", "phi")

    def __init__(self, r_M: float, phi: _sphere.PeriodicCubic):
        self.r_M = r_M
        self.phi = phi

    def at(self, theta: float) -> float:
        return self.r_M / self.phi.at(theta)

    def deriv_at(self, theta: float) -> float:
        p = self.phi.at(theta)
        return -self.r_M * self.phi.deriv_at(theta) / (p * p)

    def second_deriv_at(self, theta: float) -> float:
        p = self.phi.at(theta)
        dp = self.phi.deriv_at(theta)
        d2p = self.phi.second_deriv_at(theta)
        return self.r_M * (2.0 * dp * dp / p ** 3 - d2p / (p * p))

    def __call__(self, thetas):
        return self.r_M / self.phi(thetas)


class _SphereProfile:
    """Unit-sphere values of the smoothed norm on S^2."""

    __slots__ = ("r_M", "phi")

    def __init__(self, r_M: float, phi: _sphere.LatLongTable):
        self.r_M = r_M
        self.phi = phi

    def at(self, lat: float, lon: float) -> float:
        return self.r_M / self.phi.at(lat, lon)

    def partials_at(self, lat: float, lon: float):
        p = self.phi.at(lat, lon)
        d_lat, d_lon = self.phi.partials_at(lat, lon)
        return -self.r_M * d_lat / (p * p), -self.r_M * d_lon / (p * p)

    def __call__(self, lats, lons):
        return self.r_M / self.phi(lats, lons)


@dataclass(frozen=True)
class MollifiedNorm:
    """The smoothed norm with its certified constants.

    ``phi`` stores the level-set radii; evaluation is
    F_eps(r, theta) = r r_M / phi_eps(theta), positively homogeneous by
    construction.  ``gamma_eps = min(2 r_eps_m^2, gamma lambda_eps_min)``
    is the certified strong-convexity modulus of the squared smoothed norm.
    """

    base: NormModel
    constants: NormConstants
    epsilon: float
    phi: object
    r_eps_m: float
    lambda_eps_min: float
    gamma_eps: float
    lambda_margin_ok: bool

    @property
    def r_M(self) -> float:
        return self.constants.r_M

    def norm_model(self) -> NormModel:
        profile = (_CircleProfile(self.r_M, self.phi) if self.base.dim == 2
                   else _SphereProfile(self.r_M, self.phi))
        return NormModel(dim=self.base.dim, kind="mollified", profile=profile,
                         gamma=self.gamma_eps, gamma_source=self.base.gamma_source
                         if self.base.gamma is not None else "estimated",
                         label=f"{self.base.label}~eps={self.epsilon:g}")

    def value(self, y) -> float:
        return self.norm_model().value(y)


def eval_mollified(mn, y) -> float:
    """Value of the smoothed norm at y (0 at the origin by definition)."""
    norm = mn.norm_model() if isinstance(mn, MollifiedNorm) else mn
    y = np.asarray(y, dtype=float)
    if float(np.linalg.norm(y)) == 0.0:
        return 0.0
    return norm.value(y)


def build_mollified_norm(norm: NormModel, epsilon: float,
                         constants: Optional[NormConstants] = None,
                         theta_nodes: int = 256, lat_nodes: int = 17,
                         lon_nodes: int = 32, grid_offset: float = 0.0) -> MollifiedNorm:
    """Assemble the smoothed norm at scale ``epsilon``.

    Extracts the radial profile, evaluates the smoothed minimum r_eps_m on
    the unit sphere, and certifies the modulus via the radial-derivative
    quotient lambda_eps(y) = d_r(F_eps^2) / d_r(eta_eps * F^2) minimized
    over the level set (tangential differentiation of the interpolant is
    never needed).
    """
    if constants is None:
        constants = compute_constants(norm)
    if not 0.0 < epsilon < constants.tau:
        raise ParameterError(
            f"epsilon {epsilon} must lie in (0, tau); tau = {constants.tau}")
    moll = Mollifier(dim=norm.dim, epsilon=epsilon)
    conv = Convolver(norm, moll, constants, check_tau=False)
    r_M = constants.r_M
    lo, hi = constants.annulus

    if norm.dim == 2:
        theta = _sphere.circle_grid(theta_nodes) + grid_offset
        radii = _solve_levels(conv, _sphere.circle_points(theta), r_M, lo, hi)
        phi = _sphere.PeriodicCubic(radii, offset=grid_offset)
        _, phi_max = phi.extremum("max")
        r_eps_m = r_M / phi_max
        level_pts = _sphere.circle_points(theta) * radii[:, None]
        numer = 2.0 * r_M * r_M / radii
    else:
        lats_int = np.linspace(0.0, math.pi, lat_nodes)[1:-1]
        lons = _sphere.circle_grid(lon_nodes)
        LAT, LON = np.meshgrid(lats_int, lons, indexing="ij")
        dirs = _sphere.sphere_points(LAT.ravel(), LON.ravel())
        pole_n = np.array([[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]])
        radii_int = _solve_levels(conv, dirs, r_M, lo, hi)
        radii_pole = _solve_levels(conv, pole_n, r_M, lo, hi)
        V = np.empty((lat_nodes, lon_nodes))
        V[0, :] = radii_pole[0]
        V[-1, :] = radii_pole[1]
        V[1:-1, :] = radii_int.reshape(lat_nodes - 2, lon_nodes)
        phi = _sphere.LatLongTable(V)
        _, phi_max = phi.extremum("max")
        r_eps_m = r_M / phi_max
        all_r = np.concatenate([radii_int, radii_pole])
        level_pts = np.concatenate([dirs, pole_n]) * all_r[:, None]
        numer = 2.0 * r_M * r_M / all_r

    denom = conv.radial_slope(level_pts)
    lambdas = numer / denom
    lambda_min = float(np.min(lambdas))
    gamma = constants.gamma
    gamma_eps = min(2.0 * r_eps_m ** 2, gamma * lambda_min)

    window = (constants.r_m / 2.0, 1.5 * constants.r_m)
    if not window[0] < r_eps_m < window[1]:
        warnings.warn(
            f"smoothed minimum r_eps_m={r_eps_m:.6g} outside the expected "
            f"window ({window[0]:.6g}, {window[1]:.6g}); epsilon may be too "
            "large for this norm", stacklevel=2)
    margin_ok = lambda_min > 1.1 * constants.lambda_lower

    return MollifiedNorm(base=norm, constants=constants, epsilon=epsilon,
                         phi=phi, r_eps_m=float(r_eps_m),
                         lambda_eps_min=lambda_min, gamma_eps=float(gamma_eps),
                         lambda_margin_ok=bool(margin_ok))
