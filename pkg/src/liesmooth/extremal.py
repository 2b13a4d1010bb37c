"""Vertical extremal flow on the dual algebra and group reconstruction.

The vertical equation da/dt = a([u(a), .]) is integrated with classical
fixed-step RK4; the dual value F*(a(t)) is a first integral and is
monitored at every node, with automatic step halving and restart when the
drift exceeds tolerance.  The group trajectory solves dx/dt = u^j X_j(x)
and is reconstructed by a commutator-free fourth-order two-exponential
step (the control is only Lipschitz, so fourth order is opportunistic);
a plain exponential Euler step is available as fallback.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .asymnorm import NormModel
from .dualmax import (LipschitzBudget, RatioReport, annulus_samples,
                      dual_extrema, dual_norm, lipschitz_budget)
from .errors import ConservationBreachError, ParameterError
from .liealg import LieAlgebraModel, GroupElement, coadjoint_field, group_step

SQRT3 = math.sqrt(3.0)


@dataclass
class ExtremalTrajectory:
    """Sampled vertical extremal with conserved-quantity log."""

    times: np.ndarray
    a_states: np.ndarray
    controls: np.ndarray
    fstar: np.ndarray
    annulus: tuple
    step: float
    halvings: int = 0
    group_states: Optional[list] = None

    @property
    def conservation_drift(self) -> float:
        f0 = self.fstar[self.index_of_zero]
        return float(np.max(np.abs(self.fstar - f0)) / f0)

    @property
    def index_of_zero(self) -> int:
        return int(np.argmin(np.abs(self.times)))


def dual_annulus(norm: NormModel, a0, margin: float = 1e-9,
                 extrema=None) -> tuple:
    """Shell [r*, R*] in the dual Euclidean norm trapping the flow from a0.

    F* is conserved, and lo ||a||_* <= F*(a) <= hi ||a||_* with (lo, hi)
    the extrema of F* on the unit dual sphere, so the trajectory stays in
    {F*(a0)/hi <= ||a||_* <= F*(a0)/lo}.
    """
    lo, hi = extrema if extrema is not None else dual_extrema(norm)
    c = dual_norm(norm, a0).fstar
    return (1.0 - margin) * c / hi, (1.0 + margin) * c / lo


def shared_dual_annulus(norms: Sequence[NormModel], a0, margin: float = 1e-6):
    """Common trapping shell for a family of norms (reference + smoothings)."""
    r_star, R_star = math.inf, 0.0
    for nm in norms:
        r, R = dual_annulus(nm, a0, margin=0.0)
        r_star, R_star = min(r_star, r), max(R_star, R)
    return (1.0 - margin) * r_star, (1.0 + margin) * R_star


def _integrate_leg(alg: LieAlgebraModel, norm: NormModel, a0: np.ndarray,
                   t_end: float, h: float, sign: float, cons_tol: float,
                   annulus: tuple, f0: float):
    """One direction of the flow; ``sign`` -1 integrates the reversed field.

    Returns (times, states, controls, fstar) excluding the t=0 node, or
    raises ConservationBreachError.
    """
    c = alg.c
    n = alg.dim
    r_lo, r_hi = annulus
    slack = 1.0 + 10.0 * cons_tol

    def stage_field(a):
        u = dual_norm(norm, a).maximizer
        return sign * np.einsum("i,ikm,m->k", u, c, a)

    m_full = int(math.floor(abs(t_end) / h + 1e-9))
    rem = abs(t_end) - m_full * h
    steps = [h] * m_full + ([rem] if rem > 1e-12 else [])
    times, states, controls, fvals = [], [], [], []
    a = np.array(a0, dtype=float)
    t = 0.0
    for dt in steps:
        ev = dual_norm(norm, a)
        k1 = sign * np.einsum("i,ikm,m->k", ev.maximizer, c, a)
        k2 = stage_field(a + 0.5 * dt * k1)
        k3 = stage_field(a + 0.5 * dt * k2)
        k4 = stage_field(a + dt * k3)
        a = a + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += dt
        ev_n = dual_norm(norm, a)
        drift = abs(ev_n.fstar - f0) / f0
        na = float(np.linalg.norm(a))
        if drift > cons_tol or not (r_lo / slack <= na <= r_hi * slack):
            raise ConservationBreachError(
                f"conservation breach at t={sign * t:.6g}: drift {drift:.3e}, "
                f"||a||_*={na:.6g} vs shell [{r_lo:.6g}, {r_hi:.6g}]; "
                "reduce the step size")
        times.append(sign * t)
        states.append(a.copy())
        controls.append(ev_n.maximizer)
        fvals.append(ev_n.fstar)
    return times, states, controls, fvals


def integrate_vertical(alg: LieAlgebraModel, norm: NormModel, a0,
                       span=(-5.0, 5.0), h: float = 1e-3,
                       cons_tol: float = 1e-6, annulus: Optional[tuple] = None,
                       max_halvings: int = 6) -> ExtremalTrajectory:
    """Integrate da/dt = a([u(a), .]) on [span[0], span[1]] from a(0) = a0.

    Both directions run from 0 (the backward leg integrates the reversed
    field).  On a conservation or shell breach the step is halved and the
    whole integration restarts, up to ``max_halvings``.
    """
    a0 = np.asarray(a0, dtype=float)
    if float(np.linalg.norm(a0)) == 0.0:
        raise ParameterError("a0 must be nonzero")
    ta, tb = float(span[0]), float(span[1])
    if not (ta <= 0.0 <= tb):
        raise ParameterError("time span must contain 0 (the anchor of a0)")
    if h <= 0.0:
        raise ParameterError("step size must be positive")
    if annulus is None:
        annulus = dual_annulus(norm, a0)

    ev0 = dual_norm(norm, a0)
    f0 = ev0.fstar
    step = h
    for halving in range(max_halvings + 1):
        try:
            fw = _integrate_leg(alg, norm, a0, tb, step, +1.0, cons_tol,
                                annulus, f0) if tb > 0.0 else ([], [], [], [])
            bw = _integrate_leg(alg, norm, a0, ta, step, -1.0, cons_tol,
                                annulus, f0) if ta < 0.0 else ([], [], [], [])
        except ConservationBreachError:
            if halving == max_halvings:
                raise
            step *= 0.5
            continue
        break

    times = list(reversed(bw[0])) + [0.0] + fw[0]
    states = list(reversed(bw[1])) + [a0.copy()] + fw[1]
    controls = list(reversed(bw[2])) + [ev0.maximizer] + fw[2]
    fvals = list(reversed(bw[3])) + [f0] + fw[3]
    return ExtremalTrajectory(
        times=np.array(times), a_states=np.array(states),
        controls=np.array(controls), fstar=np.array(fvals),
        annulus=annulus, step=step,
        halvings=int(round(math.log2(h / step))) if step < h else 0)


# ---------------------------------------------------------------------------
# group reconstruction

_CF4_A1 = 0.25 + SQRT3 / 6.0
_CF4_A2 = 0.25 - SQRT3 / 6.0
_GAUSS_C1 = 0.5 - SQRT3 / 6.0
_GAUSS_C2 = 0.5 + SQRT3 / 6.0


def _hermite(a0, a1, d0, d1, dt, s):
    """Cubic Hermite value at fraction s of a step of signed length dt."""
    h00 = (1.0 + 2.0 * s) * (1.0 - s) ** 2
    h10 = s * (1.0 - s) ** 2
    h01 = s * s * (3.0 - 2.0 * s)
    h11 = s * s * (s - 1.0)
    return h00 * a0 + h10 * dt * d0 + h01 * a1 + h11 * dt * d1


def reconstruct_group(traj: ExtremalTrajectory, alg: LieAlgebraModel,
                      x0: GroupElement, norm: Optional[NormModel] = None,
                      method: str = "cf4") -> ExtremalTrajectory:
    """Fill in the group states x(t) solving dx/dt = u^j(a(t)) X_j(x).

    ``cf4`` uses a commutator-free two-exponential step with the control
    evaluated at the Gauss points of each interval (the vertical state is
    interpolated there by a cubic Hermite built from the recorded field
    values); ``euler`` uses one exponential of the node control.
    """
    if not alg.has_group:
        raise ParameterError(f"algebra {alg.name!r} has no matrix realization")
    if method not in ("cf4", "euler"):
        raise ParameterError("method must be 'cf4' or 'euler'")
    if method == "cf4" and norm is None:
        raise ParameterError("cf4 reconstruction needs the norm to evaluate controls")
    m = traj.times.shape[0]
    i0 = traj.index_of_zero
    states: list = [None] * m
    states[i0] = x0

    derivs = np.array([coadjoint_field(alg, traj.a_states[k], traj.controls[k])
                       for k in range(m)])

    def advance(g, k_from, k_to):
        dt = traj.times[k_to] - traj.times[k_from]
        if method == "euler":
            return group_step(g, alg, traj.controls[k_from], dt)
        a_mid1 = _hermite(traj.a_states[k_from], traj.a_states[k_to],
                          derivs[k_from], derivs[k_to], dt, _GAUSS_C1)
        a_mid2 = _hermite(traj.a_states[k_from], traj.a_states[k_to],
                          derivs[k_from], derivs[k_to], dt, _GAUSS_C2)
        u1 = dual_norm(norm, a_mid1).maximizer
        u2 = dual_norm(norm, a_mid2).maximizer
        g = group_step(g, alg, _CF4_A1 * u1 + _CF4_A2 * u2, dt)
        return group_step(g, alg, _CF4_A2 * u1 + _CF4_A1 * u2, dt)

    for k in range(i0, m - 1):
        states[k + 1] = advance(states[k], k, k + 1)
    for k in range(i0, 0, -1):
        states[k - 1] = advance(states[k], k, k - 1)
    return replace(traj, group_states=states)


# ---------------------------------------------------------------------------
# Lipschitz certification of the coadjoint field

@dataclass
class FieldCertificate:
    bound: float
    bound_kind: str          # 'K_E' for one norm, 'K_tilde' for a family
    budget: LipschitzBudget
    reports: list            # per-norm coadjoint-field ratio reports
    u_bound: float           # K_u (single) or K_1 = K_u + 1 (family)
    u_reports: list          # per-norm maximizer-map ratio reports
    sup_field: float         # max ||E(a)||_* over the sampled shell
    passed: bool

    def __bool__(self):
        return self.passed


def certify_field_lipschitz(alg: LieAlgebraModel, norms, annulus,
                            gamma: float, pairs: int = 10_000,
                            seed: int = 0) -> FieldCertificate:
    """Empirical Lipschitz bound for the coadjoint field(s) on a dual shell.

    For a single norm the bound is K_E = (C~ K_u + 1/r_m) c^ n^3; for a
    family (reference plus smoothings) the single shared bound
    K~ = (C~ (K_u + 1) + R) c^ n^3 is used, with R the largest Euclidean
    radius of the family's unit spheres and K_u computed from the
    reference norm at the shared modulus.  The same sampling pass also
    certifies the maximizer maps against K_u (or the shared K_u + 1).
    """
    if isinstance(norms, NormModel):
        norms = [norms]
    norms = list(norms)
    base = norms[0]
    # largest ||y|| on each unit sphere is 1 / (min of F on the unit sphere)
    from .asymnorm import estimate_extrema
    inv_r = [1.0 / estimate_extrema(nm).r_m for nm in norms]
    budget = lipschitz_budget(base, annulus, gamma)
    n3 = alg.dim ** 3
    if len(norms) == 1:
        bound = (budget.C_tilde * budget.K_u + inv_r[0]) * alg.c_hat * n3
        kind = "K_E"
        u_bound = budget.K_u
    else:
        bound = (budget.C_tilde * (budget.K_u + 1.0) + max(inv_r)) * alg.c_hat * n3
        kind = "K_tilde"
        u_bound = budget.K_u + 1.0

    rng = np.random.default_rng(seed)
    pts = annulus_samples(rng, alg.dim, annulus, pairs)
    d_alpha = np.linalg.norm(pts - np.roll(pts, -1, axis=0), axis=1)
    ok = d_alpha > 1e-14
    reports, u_reports = [], []
    sup_field = 0.0
    passed = True
    tol = 1.0 + 1e-9
    for nm in norms:
        us = np.array([dual_norm(nm, a).maximizer for a in pts])
        E = np.array([coadjoint_field(alg, a, us[i]) for i, a in enumerate(pts)])
        sup_field = max(sup_field, float(np.max(np.linalg.norm(E, axis=1))))
        dE = np.linalg.norm(E - np.roll(E, -1, axis=0), axis=1)[ok]
        du = np.linalg.norm(us - np.roll(us, -1, axis=0), axis=1)[ok]
        ratio = float(np.max(dE / d_alpha[ok])) if ok.any() else 0.0
        u_ratio = float(np.max(du / d_alpha[ok])) if ok.any() else 0.0
        tag = nm.label or nm.kind
        rep = RatioReport(f"field_lipschitz[{tag}]",
                          ratio <= bound * tol + 1e-12, ratio, bound, pairs)
        u_rep = RatioReport(f"u_lipschitz[{tag}]",
                            u_ratio <= u_bound * tol + 1e-12, u_ratio,
                            u_bound, pairs)
        passed = passed and rep.passed and u_rep.passed
        reports.append(rep)
        u_reports.append(u_rep)
    return FieldCertificate(bound=bound, bound_kind=kind, budget=budget,
                            reports=reports, u_bound=u_bound,
                            u_reports=u_reports, sup_field=sup_field,
                            passed=passed)
