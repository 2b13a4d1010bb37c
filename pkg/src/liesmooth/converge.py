"""Smoothing-scale sweep: uniform convergence measured on fixed grids.

For a decreasing list of smoothing scales the harness builds each smoothed
norm, integrates the smoothed and reference extremals from the same
initial covector, and records sup-distances over fixed grids: static ones
for the norm, its dual, the maximizer map and the coadjoint field, dynamic
ones for the vertical trajectory and the reconstructed group trajectory.
Grids are fixed across the sweep so the error columns are comparable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import _sphere
from .asymnorm import (NormConstants, NormModel, check_strong_convexity,
                       compute_constants)
from .dualmax import dual_norm
from .errors import ParameterError
from .extremal import (ExtremalTrajectory, FieldCertificate, certify_field_lipschitz,
                       dual_annulus, integrate_vertical, reconstruct_group,
                       shared_dual_annulus)
from .liealg import (GroupElement, LieAlgebraModel, coadjoint_field,
                     group_distance, identity_element)
from .mollify import build_mollified_norm


@dataclass
class SweepConfig:
    """Inputs of one smoothing sweep."""

    eps_list: Sequence[float]
    span: tuple = (0.0, 3.0)
    h: float = 5e-3
    a0: Sequence[float] = (1.0, 1.0)
    x0: Optional[GroupElement] = None
    ref_refine: int = 32
    cons_tol: float = 1e-6
    mono_slack: float = 0.05
    final_over_first: float = 0.2
    theta_nodes: int = 256
    primal_radii: int = 8
    primal_dirs: int = 64
    dual_radii: int = 4
    dual_dirs: int = 48
    sc_samples: int = 2048
    pair_samples: int = 10_000
    seed: int = 0

    def __post_init__(self):
        eps = [float(e) for e in self.eps_list]
        if any(e2 >= e1 for e1, e2 in zip(eps, eps[1:])):
            raise ParameterError("eps_list must be strictly decreasing")
        if any(e <= 0.0 for e in eps):
            raise ParameterError("eps values must be positive")
        self.eps_list = eps

    def validate(self, constants: NormConstants):
        bad = [e for e in self.eps_list if e >= constants.tau]
        if bad:
            raise ParameterError(
                f"eps values {bad} are not admissible: tau = {constants.tau}")


@dataclass
class SweepRow:
    eps: float
    sup_F_err: float = math.nan
    sup_fstar_err: float = math.nan
    sup_u_err: float = math.nan
    sup_E_err: float = math.nan
    sup_a_traj_err: float = math.nan
    sup_x_traj_err: float = math.nan
    gamma0_pass: bool = False
    u_shared_pass: bool = False
    E_shared_pass: bool = False
    failure: str = ""

    ERROR_COLUMNS = ("sup_F_err", "sup_fstar_err", "sup_u_err", "sup_E_err",
                     "sup_a_traj_err", "sup_x_traj_err")


@dataclass
class ConvergenceReport:
    rows: list
    constants: NormConstants
    gamma0: float
    annulus: tuple
    certificate: Optional[FieldCertificate]
    ref_drift: float
    mono_slack: float
    final_over_first: float

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])

    def column_decays(self, name: str) -> bool:
        """Nonincreasing within slack and final/first below the cutoff."""
        v = self.column(name)
        if np.any(np.isnan(v)):
            return False
        if v[0] == 0.0:
            return bool(np.all(v == 0.0))
        mono = all(v[i + 1] <= v[i] * (1.0 + self.mono_slack)
                   for i in range(len(v) - 1))
        return mono and v[-1] < self.final_over_first * v[0]

    @property
    def all_rows_ok(self) -> bool:
        return all(not r.failure and r.gamma0_pass and r.u_shared_pass
                   and r.E_shared_pass for r in self.rows)


def _coarsen(traj: ExtremalTrajectory, h_target: float) -> ExtremalTrajectory:
    """Restrict a trajectory to the coarse grid of step ``h_target``."""
    ratio = int(round(h_target / traj.step))
    if ratio <= 1:
        return traj
    i0 = traj.index_of_zero
    m = traj.times.shape[0]
    idx = sorted(set(list(range(i0, -1, -ratio)) + list(range(i0, m, ratio))))
    sl = np.array(idx, dtype=int)
    return ExtremalTrajectory(
        times=traj.times[sl], a_states=traj.a_states[sl],
        controls=traj.controls[sl], fstar=traj.fstar[sl],
        annulus=traj.annulus, step=h_target, halvings=traj.halvings,
        group_states=None)


def _dual_grid(annulus, dim: int, n_radii: int, n_dirs: int) -> np.ndarray:
    r_lo, r_hi = annulus
    radii = np.linspace(r_lo * 1.01, r_hi * 0.99, n_radii)
    dirs = _sphere.unit_sphere_samples(dim, n_dirs)
    return (radii[:, None, None] * dirs[None, :, :]).reshape(-1, dim)


def _primal_grid(constants: NormConstants, dim: int, n_radii: int,
                 n_dirs: int) -> np.ndarray:
    lo, hi = constants.annulus
    radii = np.linspace(lo, hi, n_radii)
    dirs = _sphere.unit_sphere_samples(dim, n_dirs)
    return (radii[:, None, None] * dirs[None, :, :]).reshape(-1, dim)


def run_sweep(cfg: SweepConfig, norm: NormModel,
              alg: LieAlgebraModel) -> ConvergenceReport:
    """Execute the sweep; per-scale construction errors abort only that row."""
    constants = compute_constants(norm)
    cfg.validate(constants)
    gamma0 = constants.gamma0
    a0 = np.asarray(cfg.a0, dtype=float)
    if a0.shape != (alg.dim,):
        raise ParameterError("a0 must match the algebra dimension")
    span = (float(cfg.span[0]), float(cfg.span[1]))
    for endpoint in span:
        if abs(endpoint / cfg.h - round(endpoint / cfg.h)) > 1e-9:
            raise ParameterError("span endpoints must be multiples of the step")

    rows = [SweepRow(eps=e) for e in cfg.eps_list]
    smoothed = []
    for row in rows:
        try:
            mn = build_mollified_norm(norm, row.eps, constants,
                                      theta_nodes=cfg.theta_nodes)
            smoothed.append((row, mn, mn.norm_model()))
        except Exception as exc:  # noqa: BLE001 - recorded, sweep continues
            row.failure = f"build: {exc}"

    models = [nm for _, _, nm in smoothed]
    annulus = shared_dual_annulus([norm] + models, a0)

    # reference trajectory on a refined grid, restricted to the sweep grid
    ref_fine = integrate_vertical(alg, norm, a0, span=span,
                                  h=cfg.h / cfg.ref_refine,
                                  cons_tol=cfg.cons_tol, annulus=annulus)
    ref = _coarsen(ref_fine, cfg.h)
    ref_drift = ref_fine.conservation_drift
    x0 = cfg.x0 if cfg.x0 is not None else (
        identity_element(alg) if alg.has_group else None)
    if x0 is not None:
        ref = reconstruct_group(ref, alg, x0, norm=norm)

    # static grids, fixed across the sweep
    P = _primal_grid(constants, norm.dim, cfg.primal_radii, cfg.primal_dirs)
    F_ref = norm.values(P)
    D = _dual_grid(annulus, norm.dim, cfg.dual_radii, cfg.dual_dirs)
    ev_ref = [dual_norm(norm, a) for a in D]
    E_ref = np.array([coadjoint_field(alg, a, ev.maximizer)
                      for a, ev in zip(D, ev_ref)])

    certificate = None
    if smoothed:
        certificate = certify_field_lipschitz(
            alg, [norm] + models, annulus, gamma0,
            pairs=cfg.pair_samples, seed=cfg.seed)

    for pos, (row, mn, model) in enumerate(smoothed):
        try:
            row.sup_F_err = float(np.max(np.abs(model.values(P) - F_ref)))
            ev_eps = [dual_norm(model, a) for a in D]
            row.sup_fstar_err = float(max(
                abs(e.fstar - r.fstar) for e, r in zip(ev_eps, ev_ref)))
            row.sup_u_err = float(max(
                np.linalg.norm(e.maximizer - r.maximizer)
                for e, r in zip(ev_eps, ev_ref)))
            E_eps = np.array([coadjoint_field(alg, a, e.maximizer)
                              for a, e in zip(D, ev_eps)])
            row.sup_E_err = float(np.max(np.linalg.norm(E_eps - E_ref, axis=1)))

            traj = integrate_vertical(alg, model, a0, span=span, h=cfg.h,
                                      cons_tol=cfg.cons_tol, annulus=annulus)
            traj = _coarsen(traj, cfg.h)
            if traj.times.shape[0] != ref.times.shape[0]:
                raise ParameterError("trajectory grids misaligned across the sweep")
            row.sup_a_traj_err = float(np.max(np.linalg.norm(
                traj.a_states - ref.a_states, axis=1)))
            if x0 is not None:
                traj = reconstruct_group(traj, alg, x0, norm=model)
                row.sup_x_traj_err = float(max(
                    group_distance(alg, ge, gr) for ge, gr in
                    zip(traj.group_states, ref.group_states)))
            else:
                row.sup_x_traj_err = 0.0

            sc = check_strong_convexity(model, gamma0,
                                        pair_samples=cfg.sc_samples,
                                        seed=cfg.seed)
            row.gamma0_pass = sc.passed
            row.u_shared_pass = certificate.u_reports[pos + 1].passed
            row.E_shared_pass = certificate.reports[pos + 1].passed
        except Exception as exc:  # noqa: BLE001 - recorded, sweep continues
            row.failure = f"run: {exc}"

    return ConvergenceReport(rows=rows, constants=constants, gamma0=gamma0,
                             annulus=annulus, certificate=certificate,
                             ref_drift=ref_drift, mono_slack=cfg.mono_slack,
                             final_over_first=cfg.final_over_first)


# ---------------------------------------------------------------------------
# hypotheses of the parametric continuity theorem for the flow

@dataclass
class FilippovItem:
    index: int
    name: str
    passed: bool
    detail: str


@dataclass
class FilippovReport:
    items: list

    @property
    def passed(self) -> bool:
        return all(it.passed for it in self.items)

    def __bool__(self):
        return self.passed


def check_filippov_hypotheses(norm: NormModel, alg: LieAlgebraModel,
                              cfg: SweepConfig,
                              report: Optional[ConvergenceReport] = None) -> FilippovReport:
    """Runtime checks of the five hypotheses behind trajectory convergence.

    (1) measurability in t: the field is autonomous, vacuously true;
    (2) a uniform bound on the field over the trapping shell;
    (3) a shared Lipschitz constant (l(t) = K~, psi(rho) = rho);
    (4) pointwise convergence of the smoothed fields on the shell grid;
    (5) the reference trajectory stays inside the shell.
    """
    if report is None:
        report = run_sweep(cfg, norm, alg)
    cert = report.certificate
    items = [FilippovItem(1, "autonomous field measurable in t", True,
                          "field does not depend on t")]
    bounded = cert is not None and math.isfinite(cert.sup_field)
    items.append(FilippovItem(
        2, "uniform field bound on the shell", bounded,
        f"sup ||E||_* = {cert.sup_field:.6g}" if cert else "no certificate"))
    lips = cert is not None and cert.passed
    items.append(FilippovItem(
        3, "shared Lipschitz constant", lips,
        f"K~ = {cert.bound:.6g}, psi(rho) = rho" if cert else "no certificate"))
    ok4 = report.column_decays("sup_E_err")
    col = report.column("sup_E_err")
    items.append(FilippovItem(
        4, "pointwise field convergence on the shell", bool(ok4),
        "sup errors " + " -> ".join(f"{v:.3g}" for v in col)))
    in_shell = report.ref_drift <= cfg.cons_tol
    items.append(FilippovItem(
        5, "reference trajectory stays in the shell", bool(in_shell),
        f"conserved-value drift {report.ref_drift:.3e}"))
    return FilippovReport(items=items)
