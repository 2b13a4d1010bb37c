"""Dual asymmetric norm, its unique maximizer, and Lipschitz budgets.

For a strictly convex asymmetric norm F the dual value
``F*(a) = sup { a(y) : F(y) = 1 }`` is attained at a unique point u(a),
and dF*^2(a) = 2 F*(a) u(a).  The maximizer is found by a coarse angular
scan over cached unit directions followed by a derivative-polished local
ascent; the ratio a(w)/F(w) is quasiconcave on the sphere for convex F, so
scan plus local ascent is globally reliable in dimensions 2 and 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from . import _sphere
from ._sphere import TWO_PI
from .asymnorm import NormModel
from .errors import NotStrictlyConvexError, ParameterError

SCAN_2D = 192
SCAN_3D = 768
TIE_TOL = 1e-8          # angular agreement required of the two polished starts


@dataclass(frozen=True)
class DualEval:
    fstar: float
    maximizer: np.ndarray

    @property
    def grad_fstar2(self) -> np.ndarray:
        return 2.0 * self.fstar * self.maximizer


# scan tables are cached on the norm instance: directions and F values on
# the direction grid never change for a fixed norm
def _scan_table(norm: NormModel, m: int):
    cache = norm.__dict__.setdefault("_dual_scan_cache", {})
    tab = cache.get(m)
    if tab is None:
        dirs = _sphere.unit_sphere_samples(norm.dim, m)
        vals = norm.values(dirs)
        tab = (dirs, vals)
        cache[m] = tab
    return tab


def _polish_circle(norm: NormModel, ax: float, ay: float, theta0: float,
                   halfwidth: float) -> float:
    val = norm.value

    def neg(t):
        c, s = math.cos(t), math.sin(t)
        return -(ax * c + ay * s) / val((c, s))

    t, _ = _sphere.golden_min(neg, theta0 - halfwidth, theta0 + halfwidth, tol=1e-9)
    return _sphere.newton_refine_min(neg, t, 1e-7,
                                     lo=theta0 - halfwidth, hi=theta0 + halfwidth)


def _polish_sphere(norm: NormModel, alpha: np.ndarray, y0: np.ndarray,
                   radius: float) -> np.ndarray:
    """Tangent-frame quadratic-fit ascent of a(w)/F(w) on S^2."""
    val = norm.value
    a0, a1, a2 = alpha

    def neg(y):
        return -(a0 * y[0] + a1 * y[1] + a2 * y[2]) / val(y)

    y = np.asarray(y0, dtype=float)
    y /= np.linalg.norm(y)
    fy = neg(y)
    h = radius
    offs = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]
    for _ in range(64):
        if h < 1e-11:
            break
        # orthonormal tangent frame at y
        k = int(np.argmin(np.abs(y)))
        t1 = np.zeros(3); t1[k] = 1.0
        t1 -= (t1 @ y) * y
        t1 /= np.linalg.norm(t1)
        t2 = np.cross(y, t1)
        cand, vals = [], []
        for ds, dt in offs:
            p = y + h * (ds * t1 + dt * t2)
            p /= np.linalg.norm(p)
            cand.append(p)
            vals.append(neg(p))
        # quadratic fit on the 3x3 stencil; jump to its minimum if it helps
        A, rhs = [], []
        for (ds, dt), v in zip(offs, vals):
            A.append([ds * ds, dt * dt, ds * dt, ds, dt, 1.0])
            rhs.append(v)
        A.append([0.0, 0.0, 0.0, 0.0, 0.0, 1.0]); rhs.append(fy)
        coef, *_ = np.linalg.lstsq(np.array(A), np.array(rhs), rcond=None)
        qa, qb, qc, qd, qe, _ = coef
        det = 4.0 * qa * qb - qc * qc
        moved = False
        if det > 0.0 and qa > 0.0:
            s = (-2.0 * qb * qd + qc * qe) / det
            t = (-2.0 * qa * qe + qc * qd) / det
            if abs(s) <= 1.5 and abs(t) <= 1.5:
                p = y + h * (s * t1 + t * t2)
                p /= np.linalg.norm(p)
                fp = neg(p)
                if fp < fy:
                    y, fy = p, fp
                    h = max(h * 0.35, 1e-12)
                    moved = True
        if not moved:
            j = int(np.argmin(vals))
            if vals[j] < fy:
                y, fy = cand[j], vals[j]
            else:
                h *= 0.35
    return y


def dual_norm(norm: NormModel, alpha, scan: Optional[int] = None) -> DualEval:
    """F*(alpha) together with the unique maximizer on S_F[0,1].

    The Euclidean norm is self-dual and short-circuits to the exact
    maximizer alpha/||alpha||; every other kind goes through the generic
    scan-and-polish route.  Ascents from the two best scan cells must agree
    to TIE_TOL in angle, otherwise the norm is reported as not strictly
    convex.
    """
    alpha = np.asarray(alpha, dtype=float)
    na = float(np.linalg.norm(alpha))
    if na == 0.0:
        raise ParameterError("alpha must be nonzero")
    if norm.kind == "euclidean":
        u = alpha / na
        return DualEval(fstar=na, maximizer=u)

    m = scan or (SCAN_2D if norm.dim == 2 else SCAN_3D)
    dirs, fvals = _scan_table(norm, m)
    ratios = (dirs @ alpha) / fvals
    order = np.argpartition(ratios, -2)[-2:]
    j1, j2 = (order[1], order[0]) if ratios[order[1]] >= ratios[order[0]] else (order[0], order[1])

    if norm.dim == 2:
        step = TWO_PI / m
        t1 = math.atan2(dirs[j1][1], dirs[j1][0])
        t2 = math.atan2(dirs[j2][1], dirs[j2][0])
        # the ratio is unimodal on the circle, so the maximizer lies within
        # one cell of the best node; polish the second start on the union
        # bracket so both ascents can reach it
        d12 = (t2 - t1 + math.pi) % TWO_PI - math.pi
        p1 = _polish_circle(norm, alpha[0], alpha[1], t1, step)
        p2 = _polish_circle(norm, alpha[0], alpha[1], t1 + 0.5 * d12,
                            0.5 * abs(d12) + step)
        gap = abs((p1 - p2 + math.pi) % TWO_PI - math.pi)
        w1 = _sphere.circle_point(p1)
        w2 = _sphere.circle_point(p2)
        g1 = float(alpha @ w1) / norm.value(w1)
        g2 = float(alpha @ w2) / norm.value(w2)
        if gap > TIE_TOL and abs(g1 - g2) <= 1e-9 * max(1.0, abs(g1)):
            raise NotStrictlyConvexError(
                f"norm not strictly convex: maximizers {gap:.2e} apart in angle")
        w = w1 if g1 >= g2 else w2
    else:
        radius = 2.0 * math.sqrt(4.0 / m)
        w1 = _polish_sphere(norm, alpha, dirs[j1], radius)
        w2 = _polish_sphere(norm, alpha, dirs[j2], radius)
        gap = float(np.linalg.norm(w1 - w2))
        g1 = float(alpha @ w1) / norm.value(w1)
        g2 = float(alpha @ w2) / norm.value(w2)
        if gap > 10.0 * TIE_TOL and abs(g1 - g2) <= 1e-9 * max(1.0, abs(g1)):
            raise NotStrictlyConvexError(
                f"norm not strictly convex: maximizers {gap:.2e} apart")
        w = w1 if g1 >= g2 else w2

    Fw = norm.value(w)
    u = w / Fw
    fstar = float(alpha @ u)
    return DualEval(fstar=fstar, maximizer=u)


def dual_value(norm: NormModel, alpha) -> float:
    return dual_norm(norm, alpha).fstar


def dual_extrema(norm: NormModel, samples: int = 128):
    """Polished (min, max) of F* over the Euclidean unit sphere of duals."""
    dirs = _sphere.unit_sphere_samples(norm.dim, samples)
    vals = np.array([dual_norm(norm, d).fstar for d in dirs])
    if norm.dim == 2:
        step = TWO_PI / samples

        def f(t):
            return dual_norm(norm, (math.cos(t), math.sin(t))).fstar

        j = int(np.argmin(vals))
        t0 = math.atan2(dirs[j][1], dirs[j][0])
        _, lo = _sphere.golden_min(f, t0 - step, t0 + step, tol=1e-9)
        j = int(np.argmax(vals))
        t0 = math.atan2(dirs[j][1], dirs[j][0])
        _, hi = _sphere.golden_min(lambda t: -f(t), t0 - step, t0 + step, tol=1e-9)
        return min(lo, float(np.min(vals))), max(-hi, float(np.max(vals)))
    radius = 2.0 * math.sqrt(4.0 / samples)
    f = lambda p: dual_norm(norm, _sphere.sphere_point(p[0], p[1])).fstar
    j = int(np.argmin(vals))
    _, lo = _sphere.refine_on_sphere(f, _sphere.angles_of(dirs[j]), radius, tol=1e-9)
    j = int(np.argmax(vals))
    _, hi = _sphere.refine_on_sphere(lambda p: -f(p), _sphere.angles_of(dirs[j]),
                                     radius, tol=1e-9)
    return min(lo, float(np.min(vals))), max(-hi, float(np.max(vals)))


def hyperplane_distance(alpha, k1: float, k2: float) -> float:
    """Euclidean distance between the level sets {alpha = k1} and {alpha = k2}."""
    alpha = np.asarray(alpha, dtype=float)
    na = float(np.linalg.norm(alpha))
    if na == 0.0:
        raise ParameterError("alpha must be nonzero")
    return abs(k1 - k2) / na


# ---------------------------------------------------------------------------
# Lipschitz budgets

@dataclass(frozen=True)
class LipschitzBudget:
    """Constants bounding the maximizer map on a dual annulus.

    C1 = max 1/F*, C2 = max F*, C3 = max ||dF*^2|| over the compact;
    L1 = max of F* on the unit dual sphere (a Lipschitz constant of F*);
    K_u = (C1^2 C3 L1 + C1^2 C2 4/gamma) / 2 bounds the maximizer map;
    K_E = (C_tilde K_u + 1/r_m) c_hat n^3 bounds the coadjoint field.
    """

    C1: float
    C2: float
    C3: float
    L1: float
    gamma: float
    K_u: float
    C_tilde: float
    K_E: Optional[float] = None

    def __post_init__(self):
        for name in ("C1", "C2", "C3", "L1", "gamma", "K_u", "C_tilde"):
            v = getattr(self, name)
            if not (v > 0.0 and math.isfinite(v)):
                raise ParameterError(f"budget constant {name} must be positive finite")


def lipschitz_budget(norm: NormModel, annulus, gamma: float,
                     alg=None, r_m: Optional[float] = None,
                     samples: int = 128) -> LipschitzBudget:
    """Budget constants over the dual annulus {r_lo <= ||a||_* <= r_hi}."""
    r_lo, r_hi = annulus
    if not 0.0 < r_lo < r_hi:
        raise ParameterError("annulus must satisfy 0 < r_lo < r_hi")
    dirs = _sphere.unit_sphere_samples(norm.dim, samples)
    f_unit, u_norms = [], []
    for d in dirs:
        ev = dual_norm(norm, d)
        f_unit.append(ev.fstar)
        u_norms.append(float(np.linalg.norm(ev.maximizer)))
    lo, hi = dual_extrema(norm, samples)
    C1 = 1.0 / (r_lo * lo)
    C2 = r_hi * hi
    # ||dF*^2|| = 2 F* ||u||; positively homogeneous of degree 1
    C3 = r_hi * 2.0 * max(f * un for f, un in zip(f_unit, u_norms))
    L1 = hi
    K_u = 0.5 * (C1 * C1 * C3 * L1 + C1 * C1 * C2 * 4.0 / gamma)
    K_E = None
    if alg is not None:
        if r_m is None:
            raise ParameterError("K_E needs r_m of the primal norm")
        K_E = (r_hi * K_u + 1.0 / r_m) * alg.c_hat * alg.dim ** 3
    return LipschitzBudget(C1=C1, C2=C2, C3=C3, L1=L1, gamma=gamma,
                           K_u=K_u, C_tilde=r_hi, K_E=K_E)


def annulus_samples(rng: np.random.Generator, dim: int, annulus,
                    count: int) -> np.ndarray:
    r_lo, r_hi = annulus
    dirs = rng.normal(size=(count, dim))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    return dirs * rng.uniform(r_lo, r_hi, size=count)[:, None]


@dataclass
class RatioReport:
    name: str
    passed: bool
    max_ratio: float
    bound: float
    pairs: int

    def __bool__(self):
        return self.passed


def certify_u_lipschitz(norm: NormModel, annulus, gamma: float,
                        pairs: int = 10_000, seed: int = 0,
                        budget: Optional[LipschitzBudget] = None):
    """Empirical Lipschitz certification of the maximizer map.

    Samples points in the dual annulus, pairs them cyclically, and checks
    ||u(a) - u(b)|| <= K_u ||a - b||_* as well as the gradient bound
    ||dF*^2(a) - dF*^2(b)|| <= (4/gamma) ||a - b||_*.
    Returns (budget, ratio report for u, ratio report for dF*^2).
    """
    if budget is None:
        budget = lipschitz_budget(norm, annulus, gamma)
    rng = np.random.default_rng(seed)
    pts = annulus_samples(rng, norm.dim, annulus, pairs)
    evals = [dual_norm(norm, a) for a in pts]
    us = np.array([e.maximizer for e in evals])
    gr = np.array([e.grad_fstar2 for e in evals])
    d_alpha = np.linalg.norm(pts - np.roll(pts, -1, axis=0), axis=1)
    ok = d_alpha > 1e-14   # coincident pairs count as ratio 0
    du = np.linalg.norm(us - np.roll(us, -1, axis=0), axis=1)[ok]
    dg = np.linalg.norm(gr - np.roll(gr, -1, axis=0), axis=1)[ok]
    ru = float(np.max(du / d_alpha[ok])) if ok.any() else 0.0
    rg = float(np.max(dg / d_alpha[ok])) if ok.any() else 0.0
    tol = 1.0 + 1e-9
    rep_u = RatioReport("u_lipschitz", ru <= budget.K_u * tol, ru, budget.K_u, pairs)
    rep_g = RatioReport("dfstar2_lipschitz", rg <= (4.0 / gamma) * tol, rg,
                        4.0 / gamma, pairs)
    return budget, rep_u, rep_g
