"""Experiment orchestration: config parsing, subcommands, CSV/SVG output.

The configuration is plain key-value text with section headers::

    [norm]
    kind = randers          # euclidean | randers | shifted_max | table
    dim = 2                 # euclidean / shifted_max / table
    b = 0.5 0.0             # randers drift
    table_values =          # table: F on the uniform circle grid
    gamma =                 # optional analytic modulus override

    [algebra]
    name = aff_r            # abelian2|abelian3|aff_r|heisenberg3|so3|custom
    dim =                   # custom algebras
    c =                     # custom: n^3 numbers, row-major c[i][j][k]

    [sweep]
    eps_factors = 0.5 0.25 0.125 0.0625   # relative to tau (or eps_list = ...)
    span = 0 3
    step = 0.005
    a0 = 1 1
    ref_refine = 32

    [tolerances]
    cons_tol = 1e-6
    mono_slack = 0.05
    final_over_first = 0.2

    [run]
    seed = 0
    out = out
    theta_nodes = 256
    primal_radii = 8
    primal_dirs = 64
    dual_radii = 4
    dual_dirs = 48
    sc_samples = 2048
    pair_samples = 10000

Unknown keys are rejected by name; duplicated keys are rejected with their
line number; smoothing scales are validated against the computed tau at
load time.  Every run echoes the fully resolved configuration next to its
outputs so that reruns are reproducible byte for byte.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _sphere
from .asymnorm import (NormConstants, NormModel, check_enclosing_sphere,
                       check_norm_axioms, check_radial_growth,
                       check_strong_convexity, compute_constants,
                       euclidean_norm, randers_norm, shifted_max_norm,
                       table_norm)
from .converge import ConvergenceReport, SweepConfig, check_filippov_hypotheses, run_sweep
from .dualmax import certify_u_lipschitz, dual_norm
from .errors import ConfigError, ParameterError
from .extremal import (certify_field_lipschitz, dual_annulus,
                       integrate_vertical, reconstruct_group,
                       shared_dual_annulus)
from .liealg import LieAlgebraModel, algebra, custom_algebra, identity_element
from .mollify import Convolver, Mollifier, build_mollified_norm
from .svgplot import write_loglog

EXIT_OK = 0
EXIT_INVARIANT = 2
EXIT_CONFIG = 3

_SCHEMA = {
    "norm": ("kind", "dim", "b", "table_values", "gamma"),
    "algebra": ("name", "dim", "c"),
    "sweep": ("eps_factors", "eps_list", "span", "step", "a0", "ref_refine"),
    "tolerances": ("cons_tol", "mono_slack", "final_over_first"),
    "run": ("seed", "out", "theta_nodes", "primal_radii", "primal_dirs",
            "dual_radii", "dual_dirs", "sc_samples", "pair_samples"),
}

_DEFAULTS = {
    ("norm", "kind"): "euclidean",
    ("norm", "dim"): "2",
    ("norm", "b"): "",
    ("norm", "table_values"): "",
    ("norm", "gamma"): "",
    ("algebra", "name"): "abelian2",
    ("algebra", "dim"): "",
    ("algebra", "c"): "",
    ("sweep", "eps_factors"): "0.5 0.25 0.125 0.0625",
    ("sweep", "eps_list"): "",
    ("sweep", "span"): "0 3",
    ("sweep", "step"): "0.005",
    ("sweep", "a0"): "",
    ("sweep", "ref_refine"): "32",
    ("tolerances", "cons_tol"): "1e-6",
    ("tolerances", "mono_slack"): "0.05",
    ("tolerances", "final_over_first"): "0.2",
    ("run", "seed"): "0",
    ("run", "out"): "out",
    ("run", "theta_nodes"): "256",
    ("run", "primal_radii"): "8",
    ("run", "primal_dirs"): "64",
    ("run", "dual_radii"): "4",
    ("run", "dual_dirs"): "48",
    ("run", "sc_samples"): "2048",
    ("run", "pair_samples"): "10000",
}


def g17(x: float) -> str:
    """Full-precision decimal rendering used in every CSV."""
    return format(float(x), ".17g")


def _parse_kv(path: Path) -> dict:
    raw = dict(_DEFAULTS)
    seen: dict = {}
    section = None
    unknown = []
    for ln, line in enumerate(path.read_text().splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            section = stripped[1:-1].strip()
            if section not in _SCHEMA:
                unknown.append(f"[{section}] (line {ln})")
                section = None
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {ln}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if section is None:
            unknown.append(f"{key} (line {ln}, outside any known section)")
            continue
        if key not in _SCHEMA[section]:
            unknown.append(f"{section}.{key} (line {ln})")
            continue
        if (section, key) in seen:
            raise ConfigError(
                f"line {ln}: duplicate key {section}.{key} "
                f"(first set on line {seen[(section, key)]})")
        seen[(section, key)] = ln
        raw[(section, key)] = value
    if unknown:
        raise ConfigError("unknown configuration keys: " + ", ".join(unknown))
    return raw


def _floats(text: str):
    return [float(tok) for tok in text.split()]


@dataclass
class ExperimentConfig:
    norm: NormModel
    alg: LieAlgebraModel
    constants: NormConstants
    sweep: SweepConfig
    seed: int
    out_dir: Path
    raw: dict


def _build_norm(raw: dict) -> NormModel:
    kind = raw[("norm", "kind")]
    gamma_txt = raw[("norm", "gamma")]
    gamma = float(gamma_txt) if gamma_txt else None
    if kind == "euclidean":
        return euclidean_norm(int(raw[("norm", "dim")]))
    if kind == "randers":
        b = _floats(raw[("norm", "b")])
        if not b:
            raise ConfigError("randers norm needs the drift key norm.b")
        return randers_norm(b)
    if kind == "shifted_max":
        return shifted_max_norm(int(raw[("norm", "dim")]))
    if kind == "table":
        vals = _floats(raw[("norm", "table_values")])
        if not vals:
            raise ConfigError("table norm needs norm.table_values")
        return table_norm(vals, dim=int(raw[("norm", "dim")]), gamma=gamma)
    raise ConfigError(f"unknown norm kind {kind!r}")


def _build_algebra(raw: dict) -> LieAlgebraModel:
    name = raw[("algebra", "name")]
    if name == "custom":
        dim_txt = raw[("algebra", "dim")]
        c_txt = raw[("algebra", "c")]
        if not dim_txt or not c_txt:
            raise ConfigError("custom algebras need algebra.dim and algebra.c")
        n = int(dim_txt)
        entries = _floats(c_txt)
        if len(entries) != n ** 3:
            raise ConfigError(f"algebra.c needs {n ** 3} entries, got {len(entries)}")
        return custom_algebra(np.array(entries).reshape(n, n, n))
    try:
        return algebra(name)
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc


def parse_config(path) -> ExperimentConfig:
    """Parse, validate and fully resolve an experiment configuration."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    raw = _parse_kv(path)
    norm = _build_norm(raw)
    alg = _build_algebra(raw)
    if norm.dim != alg.dim:
        raise ConfigError(
            f"norm dimension {norm.dim} differs from algebra dimension {alg.dim}")
    constants = compute_constants(norm)

    eps_txt = raw[("sweep", "eps_list")]
    if eps_txt:
        eps_list = _floats(eps_txt)
    else:
        eps_list = [f * constants.tau for f in _floats(raw[("sweep", "eps_factors")])]
    bad = [e for e in eps_list if not 0.0 < e < constants.tau]
    if bad:
        raise ConfigError(
            f"inadmissible smoothing scales {bad}: need 0 < eps < tau, "
            f"computed tau = {g17(constants.tau)}")
    raw[("sweep", "eps_list")] = " ".join(g17(e) for e in eps_list)
    raw[("sweep", "eps_factors")] = ""

    a0_txt = raw[("sweep", "a0")]
    a0 = _floats(a0_txt) if a0_txt else [1.0] * alg.dim
    if len(a0) != alg.dim:
        raise ConfigError(f"sweep.a0 needs {alg.dim} components")
    raw[("sweep", "a0")] = " ".join(g17(v) for v in a0)

    span = _floats(raw[("sweep", "span")])
    if len(span) != 2 or span[0] > 0.0 or span[1] < 0.0 or span[0] >= span[1]:
        raise ConfigError("sweep.span must be 'a b' with a <= 0 <= b, a < b")

    try:
        sweep = SweepConfig(
            eps_list=eps_list, span=(span[0], span[1]),
            h=float(raw[("sweep", "step")]), a0=a0,
            ref_refine=int(raw[("sweep", "ref_refine")]),
            cons_tol=float(raw[("tolerances", "cons_tol")]),
            mono_slack=float(raw[("tolerances", "mono_slack")]),
            final_over_first=float(raw[("tolerances", "final_over_first")]),
            theta_nodes=int(raw[("run", "theta_nodes")]),
            primal_radii=int(raw[("run", "primal_radii")]),
            primal_dirs=int(raw[("run", "primal_dirs")]),
            dual_radii=int(raw[("run", "dual_radii")]),
            dual_dirs=int(raw[("run", "dual_dirs")]),
            sc_samples=int(raw[("run", "sc_samples")]),
            pair_samples=int(raw[("run", "pair_samples")]),
            seed=int(raw[("run", "seed")]))
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc

    return ExperimentConfig(norm=norm, alg=alg, constants=constants,
                            sweep=sweep, seed=int(raw[("run", "seed")]),
                            out_dir=Path(raw[("run", "out")]), raw=raw)


def echo_resolved(cfg: ExperimentConfig, path: Path):
    lines = []
    for section in _SCHEMA:
        lines.append(f"[{section}]")
        for key in _SCHEMA[section]:
            lines.append(f"{key} = {cfg.raw[(section, key)]}")
        lines.append("")
    path.write_text("\n".join(lines))


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(
                cell if isinstance(cell, str) else g17(cell) for cell in row) + "\n")


def read_csv(path: Path):
    lines = Path(path).read_text().splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


# ---------------------------------------------------------------------------
# subcommands

def _cmd_norm_table(cfg: ExperimentConfig) -> int:
    norm = cfg.norm
    rows = []
    if norm.dim == 2:
        header = ["theta", "F", "F2", "is_kink"]
        for theta in _sphere.circle_grid(cfg.sweep.theta_nodes):
            y = _sphere.circle_point(theta)
            _, kink = norm.subgradient_f2(y)
            F = norm.value(y)
            rows.append([theta, F, F * F, "1" if kink else "0"])
    else:
        header = ["lat", "lon", "F", "F2", "is_kink"]
        for d in _sphere.fibonacci_sphere(cfg.sweep.theta_nodes):
            lat, lon = _sphere.angles_of(d)
            _, kink = norm.subgradient_f2(d)
            F = norm.value(d)
            rows.append([lat, lon, F, F * F, "1" if kink else "0"])
    write_csv(cfg.out_dir / "norm_table.csv", header, rows)
    return EXIT_OK


def _cmd_smooth(cfg: ExperimentConfig) -> int:
    norm, constants = cfg.norm, cfg.constants
    summary = []
    failures = []
    from .converge import _primal_grid
    P = _primal_grid(constants, norm.dim, cfg.sweep.primal_radii,
                     cfg.sweep.primal_dirs)
    F_ref = norm.values(P)
    for k, eps in enumerate(cfg.sweep.eps_list):
        mn = build_mollified_norm(norm, eps, constants,
                                  theta_nodes=cfg.sweep.theta_nodes)
        model = mn.norm_model()
        conv = Convolver(norm, Mollifier(dim=norm.dim, epsilon=eps),
                         constants, check_tau=False)
        rows = []
        if norm.dim == 2:
            thetas = mn.phi.grid
            radii = mn.phi.values
            pts = _sphere.circle_points(thetas) * radii[:, None]
            residual = conv(pts) - constants.r_M ** 2
            for theta, r, res in zip(thetas, radii, residual):
                rows.append([theta, r, constants.r_M / r, res])
            header = ["theta", "phi_eps", "Ftilde_on_sphere", "residual"]
        else:
            header = ["lat", "lon", "phi_eps", "Ftilde_on_sphere", "residual"]
            lats, lons = np.meshgrid(mn.phi.lats, mn.phi.lons, indexing="ij")
            radii = mn.phi.values
            pts = _sphere.sphere_points(lats.ravel(), lons.ravel()) * \
                radii.ravel()[:, None]
            residual = conv(pts) - constants.r_M ** 2
            for (la, lo, r, res) in zip(lats.ravel(), lons.ravel(),
                                        radii.ravel(), residual):
                rows.append([la, lo, r, constants.r_M / r, res])
        write_csv(cfg.out_dir / f"smooth_eps{k}.csv", header, rows)
        sup_err = float(np.max(np.abs(model.values(P) - F_ref)))
        summary.append([eps, sup_err, mn.r_eps_m, mn.gamma_eps])
        if not np.all(np.abs(residual) < 1e-9):
            failures.append(f"eps={eps}: residual above 1e-9")
    write_csv(cfg.out_dir / "smooth_summary.csv",
              ["eps", "sup_err_vs_F", "r_eps_m", "gamma_eps"], summary)
    if failures:
        _write_failures(cfg, failures)
        return EXIT_INVARIANT
    return EXIT_OK


def _cmd_dual(cfg: ExperimentConfig) -> int:
    norm, alg = cfg.norm, cfg.alg
    models = [build_mollified_norm(norm, eps, cfg.constants,
                                   theta_nodes=cfg.sweep.theta_nodes).norm_model()
              for eps in cfg.sweep.eps_list]
    annulus = shared_dual_annulus([norm] + models, cfg.sweep.a0)
    from .converge import _dual_grid
    D = _dual_grid(annulus, norm.dim, cfg.sweep.dual_radii, cfg.sweep.dual_dirs)
    header = [f"alpha_{i + 1}" for i in range(norm.dim)] + ["fstar"] + \
        [f"u_{i + 1}" for i in range(norm.dim)] + \
        [f"fstar_eps{k}" for k in range(len(models))]
    rows = []
    for a in D:
        ev = dual_norm(norm, a)
        row = list(a) + [ev.fstar] + list(ev.maximizer)
        row += [dual_norm(m, a).fstar for m in models]
        rows.append(row)
    write_csv(cfg.out_dir / "dual.csv", header, rows)
    return EXIT_OK


def _cmd_extremal(cfg: ExperimentConfig) -> int:
    norm, alg = cfg.norm, cfg.alg
    traj = integrate_vertical(alg, norm, cfg.sweep.a0, span=cfg.sweep.span,
                              h=cfg.sweep.h, cons_tol=cfg.sweep.cons_tol)
    has_group = alg.has_group
    if has_group:
        traj = reconstruct_group(traj, alg, identity_element(alg), norm=norm)
    n = alg.dim
    header = ["t"] + [f"a_{i + 1}" for i in range(n)] + \
        [f"u_{i + 1}" for i in range(n)] + ["fstar_conserved"]
    if has_group:
        x_len = traj.group_states[0].matrix.size
        header += [f"x_{j}" for j in range(x_len)]
    rows = []
    for k in range(traj.times.shape[0]):
        row = [traj.times[k]] + list(traj.a_states[k]) + \
            list(traj.controls[k]) + [traj.fstar[k]]
        if has_group:
            row += list(np.asarray(traj.group_states[k].matrix).ravel())
        rows.append(row)
    write_csv(cfg.out_dir / "extremal.csv", header, rows)
    return EXIT_OK if traj.conservation_drift <= cfg.sweep.cons_tol \
        else EXIT_INVARIANT


def _cmd_converge(cfg: ExperimentConfig, svg: bool) -> int:
    report = run_sweep(cfg.sweep, cfg.norm, cfg.alg)
    filippov = check_filippov_hypotheses(cfg.norm, cfg.alg, cfg.sweep,
                                         report=report)
    header = ["eps"] + list(SweepRowColumns) + \
        ["gamma0_pass", "u_shared_pass", "E_shared_pass", "failure"]
    rows = []
    for r in report.rows:
        rows.append([r.eps] + [getattr(r, c) for c in SweepRowColumns] +
                    [_b(r.gamma0_pass), _b(r.u_shared_pass),
                     _b(r.E_shared_pass), r.failure])
    csv_path = cfg.out_dir / "converge_report.csv"
    write_csv(csv_path, header, rows)
    write_csv(cfg.out_dir / "filippov_report.csv",
              ["item", "name", "passed", "detail"],
              [[str(it.index), it.name, _b(it.passed), it.detail.replace(",", ";")]
               for it in filippov.items])
    if svg:
        _svg_from_csv(csv_path, cfg.out_dir / "converge_errors.svg")
    failures = [f"row eps={r.eps}: {r.failure}" for r in report.rows if r.failure]
    for col in SweepRowColumns:
        if not report.column_decays(col):
            failures.append(f"column {col} does not decay")
    if not report.all_rows_ok:
        failures.append("per-row invariant checks failed")
    if not filippov.passed:
        failures.append("hypothesis report failed")
    if failures:
        _write_failures(cfg, failures)
        return EXIT_INVARIANT
    return EXIT_OK


SweepRowColumns = ("sup_F_err", "sup_fstar_err", "sup_u_err", "sup_E_err",
                   "sup_a_traj_err", "sup_x_traj_err")


def _b(flag: bool) -> str:
    return "true" if flag else "false"


def _svg_from_csv(csv_path: Path, svg_path: Path):
    header, rows = read_csv(csv_path)
    eps = [float(r[0]) for r in rows if not r[-1]]
    series = {}
    for j, name in enumerate(header[1:7], start=1):
        series[name] = [float(r[j]) for r in rows if not r[-1]]
    write_loglog(svg_path, eps, series, title="sup errors vs smoothing scale",
                 xlabel="eps", ylabel="sup error")


def _cmd_certify(cfg: ExperimentConfig) -> int:
    norm, alg, constants = cfg.norm, cfg.alg, cfg.constants
    seed = cfg.seed
    results = []

    def record(name, passed, detail=""):
        results.append([name, _b(bool(passed)), str(detail).replace(",", ";")])

    axioms = check_norm_axioms(norm, samples=4000, seed=seed)
    record("norm_axioms", axioms.passed, f"worst={axioms.worst_margin:.3e}")
    sc = check_strong_convexity(norm, constants.gamma0, pair_samples=4096,
                                seed=seed)
    record("strong_convexity_gamma0", sc.passed, f"worst={sc.worst_margin:.3e}")
    encl = check_enclosing_sphere(norm, samples=256, gamma=constants.gamma)
    record("enclosing_sphere", encl.passed,
           f"R={encl.detail['max_radius']:.6g};skipped={encl.detail['skipped_kinks']}")
    growth = check_radial_growth(norm, constants, batch=10_000, seed=seed)
    record("radial_growth", growth.passed, f"worst={growth.worst_margin:.3e}")

    # duality identity F(dF*^2(a)) = 2 F*(a) on random covectors
    rng = np.random.default_rng(seed + 1)
    alphas = rng.normal(size=(256, norm.dim))
    worst = 0.0
    for a in alphas:
        ev = dual_norm(norm, a)
        worst = max(worst, abs(norm.value(ev.grad_fstar2) - 2.0 * ev.fstar))
    record("dual_gradient_identity", worst <= 1e-9, f"worst={worst:.3e}")

    models = [build_mollified_norm(norm, eps, constants,
                                   theta_nodes=cfg.sweep.theta_nodes).norm_model()
              for eps in cfg.sweep.eps_list]
    annulus = shared_dual_annulus([norm] + models, cfg.sweep.a0)
    _, rep_u, rep_g = certify_u_lipschitz(norm, annulus, constants.gamma0,
                                          pairs=2000, seed=seed)
    record("u_lipschitz_budget", rep_u.passed,
           f"ratio={rep_u.max_ratio:.4g};bound={rep_u.bound:.4g}")
    record("dfstar2_lipschitz", rep_g.passed,
           f"ratio={rep_g.max_ratio:.4g};bound={rep_g.bound:.4g}")
    cert = certify_field_lipschitz(alg, [norm] + models, annulus,
                                   constants.gamma0, pairs=2000, seed=seed)
    record("shared_field_lipschitz", cert.passed,
           f"bound={cert.bound:.4g};kind={cert.bound_kind}")
    for eps, model in zip(cfg.sweep.eps_list, models):
        sc_eps = check_strong_convexity(model, constants.gamma0,
                                        pair_samples=cfg.sweep.sc_samples,
                                        seed=seed)
        record(f"strong_convexity_eps={eps:g}", sc_eps.passed,
               f"worst={sc_eps.worst_margin:.3e}")
    filippov = check_filippov_hypotheses(norm, alg, cfg.sweep)
    for it in filippov.items:
        record(f"hypothesis_{it.index}", it.passed, it.detail)

    write_csv(cfg.out_dir / "certify_report.csv",
              ["suite", "passed", "detail"], results)
    failures = [r[0] for r in results if r[1] == "false"]
    if failures:
        _write_failures(cfg, [f"suite {name} failed" for name in failures])
        return EXIT_INVARIANT
    return EXIT_OK


def _write_failures(cfg: ExperimentConfig, failures):
    write_csv(cfg.out_dir / "failures.csv", ["failure"],
              [[f.replace(",", ";")] for f in failures])


# ---------------------------------------------------------------------------
# entry point

def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="liesmooth",
        description="Smoothing of asymmetric norms on Lie algebras and "
                    "coadjoint extremal flows")
    parser.add_argument("command",
                        choices=["norm-table", "smooth", "dual", "extremal",
                                 "converge", "certify"])
    parser.add_argument("--config", required=True, help="experiment config file")
    parser.add_argument("--out", default=None, help="output directory override")
    parser.add_argument("--svg", action="store_true",
                        help="emit SVG charts (converge)")
    parser.add_argument("--seed", type=int, default=None, help="seed override")
    args = parser.parse_args(argv)

    try:
        cfg = parse_config(args.config)
        if args.out is not None:
            cfg.out_dir = Path(args.out)
            cfg.raw[("run", "out")] = args.out
        if args.seed is not None:
            cfg.seed = args.seed
            cfg.sweep.seed = args.seed
            cfg.raw[("run", "seed")] = str(args.seed)
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
        echo_resolved(cfg, cfg.out_dir / "resolved.cfg")
    except (ConfigError, ParameterError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "norm-table":
            return _cmd_norm_table(cfg)
        if args.command == "smooth":
            return _cmd_smooth(cfg)
        if args.command == "dual":
            return _cmd_dual(cfg)
        if args.command == "extremal":
            return _cmd_extremal(cfg)
        if args.command == "converge":
            return _cmd_converge(cfg, args.svg)
        return _cmd_certify(cfg)
    except (ConfigError, ParameterError) as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
