"""Asymmetric norms on R^n with certified geometric constants.

An asymmetric norm F is positively homogeneous, subadditive and positive
away from the origin; F(-y) may differ from F(y).  The module hosts the
catalog of test norms, the extraction of the extrema r_m, r_M of F on the
Euclidean unit sphere, the admissible smoothing radius tau, the shared
strong-convexity modulus gamma0, and sampling-based certification checks
(strong convexity, enclosing spheres, almost-radial growth).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from . import _sphere
from ._sphere import TWO_PI
from .errors import DegenerateNormError, ParameterError

NORM_KINDS = ("euclidean", "randers", "shifted_max", "table", "mollified")

TOL_HOM = 1e-9
TOL_TRI = 1e-9
TOL_SC = 1e-9
KINK_TOL = 1e-6

# stored tau sits just inside the open admissibility interval
TAU_SAFETY = 0.999


# ---------------------------------------------------------------------------
# norm models

@dataclass(frozen=True)
class NormModel:
    """An asymmetric norm on R^n.

    ``gamma`` is the modulus of convexity of F^2 when known analytically;
    ``gamma_source`` records whether downstream constants rest on an
    analytic value or on a sampled-Hessian estimate.
    """

    dim: int
    kind: str
    b: Optional[np.ndarray] = None            # randers drift
    profile: object = None                    # table / mollified radial data
    gamma: Optional[float] = None
    gamma_source: str = "analytic"
    label: str = ""

    def __post_init__(self):
        if self.kind not in NORM_KINDS:
            raise ParameterError(f"unknown norm kind {self.kind!r}")
        if self.dim not in (2, 3):
            raise ParameterError("supported dimensions are 2 and 3")
        if self.kind == "randers":
            b = np.asarray(self.b, dtype=float)
            if b.shape != (self.dim,):
                raise ParameterError("randers drift must be a vector of length dim")
            if np.linalg.norm(b) >= 1.0:
                raise ParameterError("randers drift must satisfy ||b|| < 1")
            object.__setattr__(self, "b", b)
        if self.kind in ("table", "mollified") and self.profile is None:
            raise ParameterError(f"{self.kind} norm needs a radial profile")

    # -- evaluation ---------------------------------------------------------

    @cached_property
    def _scalar(self) -> Callable:
        """Fast scalar evaluator using plain-float arithmetic."""
        kind = self.kind
        if kind == "euclidean":
            if self.dim == 2:
                return lambda y: math.hypot(y[0], y[1])
            return lambda y: math.sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2])
        if kind == "randers":
            if self.dim == 2:
                b0, b1 = float(self.b[0]), float(self.b[1])
                return lambda y: math.hypot(y[0], y[1]) + b0 * y[0] + b1 * y[1]
            b0, b1, b2 = (float(v) for v in self.b)
            return lambda y: (math.sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2])
                              + b0 * y[0] + b1 * y[1] + b2 * y[2])
        if kind == "shifted_max":
            if self.dim == 2:
                return lambda y: math.sqrt(
                    y[0] * y[0] + y[1] * y[1] + (y[0] * y[0] if y[0] > 0.0 else 0.0))
            return lambda y: math.sqrt(
                y[0] * y[0] + y[1] * y[1] + y[2] * y[2]
                + (y[0] * y[0] if y[0] > 0.0 else 0.0))
        # radial-profile kinds: F(y) = ||y|| * p(direction angles)
        profile = self.profile
        if self.dim == 2:
            def ev2(y):
                r = math.hypot(y[0], y[1])
                if r == 0.0:
                    return 0.0
                return r * profile.at(math.atan2(y[1], y[0]))
            return ev2

        def ev3(y):
            r = math.sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2])
            if r == 0.0:
                return 0.0
            lat = math.acos(max(-1.0, min(1.0, y[2] / r)))
            lon = math.atan2(y[1], y[0])
            return r * profile.at(lat, lon)
        return ev3

    def value(self, y) -> float:
        return self._scalar(y)

    def values(self, Y: np.ndarray) -> np.ndarray:
        """Vectorized F over an (m, n) array of points."""
        Y = np.asarray(Y, dtype=float)
        r = np.linalg.norm(Y, axis=-1)
        kind = self.kind
        if kind == "euclidean":
            return r
        if kind == "randers":
            return r + Y @ self.b
        if kind == "shifted_max":
            return np.sqrt(r * r + np.maximum(Y[..., 0], 0.0) ** 2)
        out = np.zeros_like(r)
        nz = r > 0.0
        if self.dim == 2:
            theta = np.arctan2(Y[..., 1], Y[..., 0])
            out[nz] = r[nz] * self.profile(theta[nz])
        else:
            lat = np.arccos(np.clip(Y[..., 2][nz] / r[nz], -1.0, 1.0))
            lon = np.arctan2(Y[..., 1], Y[..., 0])[nz]
            out[nz] = r[nz] * self.profile(lat, lon)
        return out

    def value2(self, y) -> float:
        v = self._scalar(y)
        return v * v

    def values2(self, Y) -> np.ndarray:
        v = self.values(Y)
        return v * v

    # -- derivatives of F^2 -------------------------------------------------

    def grad_f2(self, y) -> np.ndarray:
        """Gradient of F^2 where it exists (all catalog kinds are C^1)."""
        y = np.asarray(y, dtype=float)
        kind = self.kind
        if kind == "euclidean":
            return 2.0 * y
        if kind == "randers":
            r = np.linalg.norm(y)
            if r == 0.0:
                raise ParameterError("gradient of F^2 undefined direction at 0")
            F = r + float(self.b @ y)
            return 2.0 * F * (y / r + self.b)
        if kind == "shifted_max":
            g = 2.0 * y.copy()
            if y[0] > 0.0:
                g[0] += 2.0 * y[0]
            return g
        return self._profile_grad_f2(y)

    def _profile_grad_f2(self, y: np.ndarray) -> np.ndarray:
        r = np.linalg.norm(y)
        if r == 0.0:
            raise ParameterError("gradient of F^2 undefined direction at 0")
        if self.dim == 2:
            theta = math.atan2(y[1], y[0])
            p = self.profile.at(theta)
            dp = self.profile.deriv_at(theta)
            rhat = y / r
            that = np.array([-rhat[1], rhat[0]])
            grad_F = p * rhat + dp * that
        else:
            lat, lon = _sphere.angles_of(y)
            p = self.profile.at(lat, lon)
            d_lat, d_lon = self.profile.partials_at(lat, lon)
            rhat = y / r
            s, c = math.sin(lat), math.cos(lat)
            lat_hat = np.array([c * math.cos(lon), c * math.sin(lon), -s])
            lon_hat = np.array([-math.sin(lon), math.cos(lon), 0.0])
            grad_F = p * rhat + d_lat * lat_hat
            if s > 1e-12:
                grad_F = grad_F + (d_lon / s) * lon_hat
        return 2.0 * (r * p) * grad_F

    def subgradient_f2(self, y, h: float = 1e-7):
        """One-sided directional-derivative assembly of a subgradient of F^2.

        Returns (grad, is_kink).  If any coordinate's one-sided derivatives
        disagree beyond KINK_TOL the point is flagged as a kink and no
        gradient is fabricated.
        """
        y = np.asarray(y, dtype=float)
        if self.kind in ("euclidean", "randers", "shifted_max"):
            return self.grad_f2(y), False
        scale = max(1.0, float(np.linalg.norm(y)))
        g = np.zeros(self.dim)
        f0 = self.value2(y)
        kink = False
        for i in range(self.dim):
            e = np.zeros(self.dim)
            e[i] = h * scale
            dp = (self.value2(y + e) - f0) / (h * scale)
            dm = (f0 - self.value2(y - e)) / (h * scale)
            if abs(dp - dm) > KINK_TOL * scale:
                kink = True
            g[i] = 0.5 * (dp + dm)
        return (None, True) if kink else (g, False)

    def hessian_f2(self, y, h: float = 1e-4) -> np.ndarray:
        """Central-difference Hessian of F^2 (used for modulus estimates)."""
        y = np.asarray(y, dtype=float)
        n = self.dim
        H = np.zeros((n, n))
        f0 = self.value2(y)
        for i in range(n):
            ei = np.zeros(n); ei[i] = h
            H[i, i] = (self.value2(y + ei) - 2.0 * f0 + self.value2(y - ei)) / (h * h)
            for j in range(i + 1, n):
                ej = np.zeros(n); ej[j] = h
                fij = (self.value2(y + ei + ej) - self.value2(y + ei - ej)
                       - self.value2(y - ei + ej) + self.value2(y - ei - ej))
                H[i, j] = H[j, i] = fij / (4.0 * h * h)
        return H


def euclidean_norm(dim: int = 2) -> NormModel:
    return NormModel(dim=dim, kind="euclidean", gamma=2.0, label="euclidean")


def randers_norm(b) -> NormModel:
    b = np.asarray(b, dtype=float)
    return NormModel(dim=b.shape[0], kind="randers", b=b,
                     gamma=None, gamma_source="estimated",
                     label=f"randers b={tuple(b)}")


def shifted_max_norm(dim: int = 2) -> NormModel:
    # F^2 = ||y||^2 + max(0, y1)^2; the quadratic term alone certifies gamma=2
    return NormModel(dim=dim, kind="shifted_max", gamma=2.0, label="shifted_max")


def table_norm(values, dim: int = 2, gamma: Optional[float] = None) -> NormModel:
    """Norm from sampled values of F on the Euclidean unit sphere."""
    if dim == 2:
        profile = _sphere.PeriodicCubic(values)
    else:
        profile = _sphere.LatLongTable(values)
    src = "analytic" if gamma is not None else "estimated"
    return NormModel(dim=dim, kind="table", profile=profile,
                     gamma=gamma, gamma_source=src, label="table")


# ---------------------------------------------------------------------------
# certified constants

@dataclass(frozen=True)
class NormConstants:
    """Geometric constants of a norm relative to the Euclidean structure.

    r_m, r_M are the polished extrema of F on the unit sphere; tau is the
    admissible smoothing radius; gamma0 the shared strong-convexity modulus
    of the norm and all its admissible smoothings; annulus the radial shell
    [1/2, 2 r_M / r_m] on which the radial-growth bounds hold.
    """

    dim: int
    r_m: float
    r_M: float
    tau: float
    gamma: float
    gamma_source: str
    gamma0: float
    annulus: tuple = field(default=None)

    def __post_init__(self):
        if not (0.0 < self.r_m <= self.r_M):
            raise DegenerateNormError("need 0 < r_m <= r_M")
        bound = self.r_m / (8.0 * self.dim * self.r_M)
        if not self.tau < bound:
            raise ParameterError(f"tau must be below {bound}")
        object.__setattr__(self, "annulus", (0.5, 2.0 * self.r_M / self.r_m))

    @property
    def tau_bound(self) -> float:
        return self.r_m / (8.0 * self.dim * self.r_M)

    @property
    def radial_lower(self) -> float:
        return self.r_m ** 2 / 32.0

    @property
    def radial_upper(self) -> float:
        return (2.0 * self.r_m * self.r_M ** 3 + 12.0 * self.r_M ** 4) / self.r_m ** 2

    @property
    def lambda_lower(self) -> float:
        return self.r_m ** 4 / (8.0 * self.r_m * self.r_M ** 3 + 48.0 * self.r_M ** 4)


def gamma0_value(r_m: float, r_M: float, gamma: float) -> float:
    """Shared modulus min(r_m^2/2, gamma r_m^4 / (8 r_m r_M^3 + 48 r_M^4))."""
    return min(r_m ** 2 / 2.0,
               gamma * r_m ** 4 / (8.0 * r_m * r_M ** 3 + 48.0 * r_M ** 4))


@dataclass
class ExtremaResult:
    r_m: float
    r_M: float
    argmin: object
    argmax: object


def estimate_extrema(norm: NormModel, sphere_samples: int = 512) -> ExtremaResult:
    """Extrema of F over the Euclidean unit sphere.

    Deterministic quasi-uniform scan followed by a local golden-section
    polish (1e-10 in angle) around each extremal cell.
    """
    if sphere_samples < 8:
        raise ParameterError("need at least 8 sphere samples")
    if norm.dim == 2:
        thetas = _sphere.circle_grid(sphere_samples)
        vals = norm.values(_sphere.circle_points(thetas))
        step = TWO_PI / sphere_samples

        def f(t):
            return norm.value((math.cos(t), math.sin(t)))

        jmin = int(np.argmin(vals))
        t0 = thetas[jmin]
        tmin, vmin = _sphere.golden_min(f, t0 - step, t0 + step, tol=1e-10)
        jmax = int(np.argmax(vals))
        t1 = thetas[jmax]
        tmax, vneg = _sphere.golden_min(lambda t: -f(t), t1 - step, t1 + step, tol=1e-10)
        r_m, r_M = min(vmin, vals[jmin]), max(-vneg, vals[jmax])
        argmin, argmax = tmin, tmax
    else:
        pts = _sphere.fibonacci_sphere(sphere_samples)
        vals = norm.values(pts)
        radius = 2.0 * math.sqrt(4.0 / sphere_samples)

        jmin = int(np.argmin(vals))
        p0 = _sphere.angles_of(pts[jmin])
        f = lambda p: norm.value(_sphere.sphere_point(p[0], p[1]))
        pmin, vmin = _sphere.refine_on_sphere(f, p0, radius, tol=1e-10)
        jmax = int(np.argmax(vals))
        p1 = _sphere.angles_of(pts[jmax])
        pmax, vneg = _sphere.refine_on_sphere(lambda p: -f(p), p1, radius, tol=1e-10)
        r_m, r_M = min(vmin, vals[jmin]), max(-vneg, vals[jmax])
        argmin, argmax = pmin, pmax
    if r_m < 1e-12:
        raise DegenerateNormError("norm minimum on the unit sphere below 1e-12")
    return ExtremaResult(r_m=float(r_m), r_M=float(r_M), argmin=argmin, argmax=argmax)


def estimate_gamma(norm: NormModel, sphere_samples: int = 256) -> float:
    """Sampled-Hessian estimate of the modulus of convexity of F^2.

    Minimum eigenvalue of the central-difference Hessian over unit-sphere
    samples, polished around the worst cell.  Labeled an estimate; callers
    must not present it as a certified modulus.
    """
    dirs = _sphere.unit_sphere_samples(norm.dim, sphere_samples)
    lam = np.array([np.linalg.eigvalsh(norm.hessian_f2(d))[0] for d in dirs])
    j = int(np.argmin(lam))
    if norm.dim == 2:
        theta0 = math.atan2(dirs[j][1], dirs[j][0])
        step = TWO_PI / sphere_samples

        def f(t):
            return np.linalg.eigvalsh(
                norm.hessian_f2((math.cos(t), math.sin(t))))[0]
        _, v = _sphere.golden_min(f, theta0 - step, theta0 + step, tol=1e-8)
        return float(min(v, lam[j]))
    p0 = _sphere.angles_of(dirs[j])
    f = lambda p: np.linalg.eigvalsh(
        norm.hessian_f2(_sphere.sphere_point(p[0], p[1])))[0]
    _, v = _sphere.refine_on_sphere(f, p0, 2.0 * math.sqrt(4.0 / sphere_samples), tol=1e-8)
    return float(min(v, lam[j]))


def compute_constants(norm: NormModel, sphere_samples: int = 512,
                      gamma: Optional[float] = None) -> NormConstants:
    """Assemble the certified constants of a norm."""
    ext = estimate_extrema(norm, sphere_samples)
    if gamma is not None:
        g, src = float(gamma), "analytic"
    elif norm.gamma is not None:
        g, src = float(norm.gamma), norm.gamma_source
    else:
        g, src = estimate_gamma(norm), "estimated"
    if g <= 0.0:
        raise DegenerateNormError("modulus of convexity must be positive")
    tau = TAU_SAFETY * ext.r_m / (8.0 * norm.dim * ext.r_M)
    return NormConstants(dim=norm.dim, r_m=ext.r_m, r_M=ext.r_M, tau=tau,
                         gamma=g, gamma_source=src,
                         gamma0=gamma0_value(ext.r_m, ext.r_M, g))


# ---------------------------------------------------------------------------
# certification reports

@dataclass
class CheckReport:
    name: str
    passed: bool
    worst_margin: float
    detail: dict

    def __bool__(self):
        return self.passed


def _sample_points(rng: np.random.Generator, dim: int, count: int,
                   radius: float = 2.0) -> np.ndarray:
    pts = rng.normal(size=(count, dim))
    r = rng.uniform(0.2, radius, size=count)
    return pts / np.linalg.norm(pts, axis=1, keepdims=True) * r[:, None]


def check_strong_convexity(norm_eval, gamma_claim: float,
                           pair_samples: int = 4096, dim: int = None,
                           seed: int = 0, tol: float = TOL_SC) -> CheckReport:
    """Midpoint-inequality test of strong convexity of F^2 at a claimed modulus.

    ``norm_eval`` is either a NormModel or a batch callable Y -> F(Y).
    Samples (y, z, t) triples and checks
        F^2(t y + (1-t) z) <= t F^2(y) + (1-t) F^2(z)
                              - gamma/2 t (1-t) ||y - z||^2 + tol.
    Antipodal midpoint probes (z = -y, t = 1/2) are always included: they
    realize the equality case for the Euclidean norm and make the modulus
    test sharp.
    """
    if isinstance(norm_eval, NormModel):
        dim = norm_eval.dim
        fvals = norm_eval.values
    else:
        if dim is None:
            raise ParameterError("dim required for callable norm evaluators")
        fvals = norm_eval
    rng = np.random.default_rng(seed)
    y = _sample_points(rng, dim, pair_samples)
    z = _sample_points(rng, dim, pair_samples)
    t = rng.uniform(0.0, 1.0, size=pair_samples)
    n_probe = max(8, pair_samples // 16)
    yp = _sample_points(rng, dim, n_probe, radius=1.5)
    y = np.concatenate([y, yp]); z = np.concatenate([z, -yp])
    t = np.concatenate([t, np.full(n_probe, 0.5)])

    F2y = fvals(y) ** 2
    F2z = fvals(z) ** 2
    mid = y * t[:, None] + z * (1.0 - t[:, None])
    F2m = fvals(mid) ** 2
    rhs = t * F2y + (1.0 - t) * F2z - 0.5 * gamma_claim * t * (1.0 - t) * \
        np.sum((y - z) ** 2, axis=1)
    margins = F2m - rhs
    worst = float(np.max(margins))
    k = int(np.argmax(margins))
    return CheckReport(
        name="strong_convexity",
        passed=worst <= tol,
        worst_margin=worst,
        detail={"gamma_claim": gamma_claim, "samples": int(t.shape[0]),
                "worst_y": y[k].tolist(), "worst_z": z[k].tolist(),
                "worst_t": float(t[k])})


def sphere_of_norm(norm: NormModel, directions: np.ndarray) -> np.ndarray:
    """Points of S_F[0,1] along given unit directions."""
    vals = norm.values(directions)
    return directions / vals[:, None]


def check_enclosing_sphere(norm: NormModel, radius_R: Optional[float] = None,
                           samples: int = 512, gamma: Optional[float] = None,
                           tol: float = 1e-9) -> CheckReport:
    """Curvature certificate: the F-unit sphere sits inside Euclidean balls.

    For each sampled y on S_F[0,1] with subgradient a of F^2, the ball with
    center y - a/gamma and radius ||a||/gamma must contain the whole sampled
    sphere.  Kinked sample points are skipped and counted, never averaged.
    Returns the largest certified radius; if ``radius_R`` is given it is
    also checked as an upper bound.
    """
    g = float(gamma) if gamma is not None else norm.gamma
    if g is None:
        raise ParameterError("enclosing-sphere check needs a known modulus")
    dirs = _sphere.unit_sphere_samples(norm.dim, samples)
    sphere = sphere_of_norm(norm, dirs)
    worst = -np.inf
    max_R = 0.0
    skipped = 0
    for y in sphere:
        a, kink = norm.subgradient_f2(y)
        if kink:
            skipped += 1
            continue
        center = y - a / g
        R_y = float(np.linalg.norm(a)) / g
        dists = np.linalg.norm(sphere - center, axis=1)
        worst = max(worst, float(np.max(dists) - R_y))
        max_R = max(max_R, R_y)
    passed = worst <= tol
    if radius_R is not None:
        passed = passed and max_R <= radius_R + tol
    return CheckReport(
        name="enclosing_sphere", passed=passed, worst_margin=worst,
        detail={"max_radius": max_R, "skipped_kinks": skipped,
                "samples": int(samples), "gamma": g})


def check_radial_growth(norm: NormModel, constants: NormConstants,
                        v=None, t_grid=None, w_samples: int = 64,
                        seed: int = 0, batch: Optional[int] = None) -> CheckReport:
    """Almost-radial growth bounds for F^2 on the annulus.

    For v with ||v|| in [1/2, 2 r_M/r_m], w within r_m ||v|| / (4 n r_M)
    of v and t in (0, 1):
        r_m^2/32 t < F^2(w + t v/||v||) - F^2(w) < (2 r_m r_M^3 + 12 r_M^4)/r_m^2 t.
    With ``batch`` set, that many random (v, w, t) triples are drawn instead
    of the single-v sweep.
    """
    rng = np.random.default_rng(seed)
    lo_c, hi_c = constants.radial_lower, constants.radial_upper
    a_lo, a_hi = constants.annulus

    if batch is not None:
        dirs = rng.normal(size=(batch, norm.dim))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        radii = rng.uniform(a_lo, a_hi, size=batch)
        V = dirs * radii[:, None]
        eps = constants.r_m * radii / (4.0 * norm.dim * constants.r_M)
        dw = rng.normal(size=(batch, norm.dim))
        dw /= np.linalg.norm(dw, axis=1, keepdims=True)
        W = V + dw * (rng.uniform(0.0, 1.0, size=batch) * eps)[:, None]
        T = rng.uniform(1e-6, 1.0 - 1e-9, size=batch)
        inc = norm.values2(W + T[:, None] * dirs) - norm.values2(W)
        lo_margin = float(np.min(inc - lo_c * T))
        hi_margin = float(np.min(hi_c * T - inc))
        worst = -min(lo_margin, hi_margin)
        return CheckReport(
            name="radial_growth", passed=worst < 0.0, worst_margin=worst,
            detail={"samples": batch, "lower": lo_c, "upper": hi_c})

    v = np.asarray(v, dtype=float)
    nv = float(np.linalg.norm(v))
    if not (a_lo - 1e-12 <= nv <= a_hi + 1e-12):
        raise ParameterError("v must lie in the radial annulus")
    eps = constants.r_m * nv / (4.0 * norm.dim * constants.r_M)
    if t_grid is None:
        t_grid = np.linspace(1e-4, 1.0 - 1e-9, 33)
    t_grid = np.asarray(t_grid, dtype=float)
    dw = rng.normal(size=(w_samples, norm.dim))
    dw /= np.linalg.norm(dw, axis=1, keepdims=True)
    W = v[None, :] + dw * (rng.uniform(0.0, 1.0, size=w_samples) * eps)[:, None]
    W[0] = v  # always test the center
    u = v / nv
    worst = -np.inf
    for t in t_grid:
        inc = norm.values2(W + t * u) - norm.values2(W)
        worst = max(worst, float(np.max(lo_c * t - inc)),
                    float(np.max(inc - hi_c * t)))
    return CheckReport(
        name="radial_growth", passed=worst < 0.0, worst_margin=worst,
        detail={"v": v.tolist(), "w_samples": int(w_samples),
                "t_grid": [float(t_grid[0]), float(t_grid[-1])],
                "lower": lo_c, "upper": hi_c})


def check_norm_axioms(norm: NormModel, samples: int = 10_000,
                      seed: int = 0) -> CheckReport:
    """Positive homogeneity, triangle inequality and norm equivalence."""
    rng = np.random.default_rng(seed)
    y = _sample_points(rng, norm.dim, samples)
    z = _sample_points(rng, norm.dim, samples)
    mu = rng.uniform(0.0, 4.0, size=samples)
    Fy, Fz = norm.values(y), norm.values(z)
    hom = np.abs(norm.values(y * mu[:, None]) - mu * Fy)
    hom_rel = hom / np.maximum(1.0, np.abs(mu * Fy))
    tri = norm.values(y + z) - (Fy + Fz)
    ny = np.linalg.norm(y, axis=1)
    ext = estimate_extrema(norm)
    equiv = np.maximum(ext.r_m * ny - Fy, Fy - ext.r_M * ny)
    worst = float(max(np.max(hom_rel), np.max(tri), np.max(equiv)))
    return CheckReport(
        name="norm_axioms",
        passed=np.max(hom_rel) <= TOL_HOM and np.max(tri) <= TOL_TRI
        and np.max(equiv) <= 1e-8,
        worst_margin=worst,
        detail={"homogeneity": float(np.max(hom_rel)),
                "triangle": float(np.max(tri)),
                "equivalence": float(np.max(equiv))})
