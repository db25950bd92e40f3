"""Command-line front end.

Subcommands: solve, constants, uq, bound, ode, bifurcate, gridinfo.
Runs are driven by a line-oriented config file ([section] headers,
``key = value`` entries, comma-separated arrays) plus a few overriding
flags. Every output file starts with '#' metadata lines echoing the
configuration; identical configs produce byte-identical files up to the
timestamp line. Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import configparser
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .constants import CoefficientBounds, GeometryParams, evaluate_report
from .error_bounds import bound_constants, predict_error
from .grid import Grid, boundary_field, build_grid, discrete_norm
from .picard import NpbeProblem, picard_solve
from .radial_ode import (
    RadialParams,
    find_zeros,
    integrate_regularized,
    shoot_scalar_npbe,
)
from .serialize import write_csv, write_kv
from .smolyak import build_sparse_grid
from .stochastic import (
    UqStudyConfig,
    deposit_charges,
    make_charge_shift_model,
    run_uq_study,
)


class ConfigError(ValueError):
    pass


def _load_config(path: str) -> configparser.ConfigParser:
    cfg = configparser.ConfigParser(interpolation=None)
    read = cfg.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    return cfg


def _floats(text: str) -> list[float]:
    return [float(tok) for tok in text.replace(";", ",").split(",") if tok.strip()]


def _ints(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def parse_levels(text: str) -> list[int]:
    """'1..4' or '1,2,4' -> sorted level list."""
    text = text.strip()
    if ".." in text:
        a, b = text.split("..")
        lo, hi = int(a), int(b)
        if hi < lo:
            raise ConfigError(f"empty level range {text!r}")
        return list(range(lo, hi + 1))
    levels = _ints(text)
    if not levels:
        raise ConfigError(f"no levels in {text!r}")
    return sorted(levels)


def _grid_from_config(cfg: configparser.ConfigParser) -> Grid:
    if not cfg.has_section("domain"):
        raise ConfigError("config needs a [domain] section")
    sec = cfg["domain"]
    dim = sec.getint("dim", 2)
    lower = _floats(sec.get("lower", "0"))
    upper = _floats(sec.get("upper", "1"))
    nodes = _ints(sec.get("nodes", "65"))
    if len(lower) == 1:
        lower *= dim
    if len(upper) == 1:
        upper *= dim
    if len(nodes) == 1:
        nodes *= dim
    return build_grid(dim, list(zip(lower, upper)), nodes)


def _charges_from_config(grid: Grid, sec) -> np.ndarray | None:
    raw = sec.get("charges", "").strip()
    if not raw:
        return None
    rows = [r for r in raw.split(";") if r.strip()]
    centers, values = [], []
    for row in rows:
        vals = [float(t) for t in row.split(",") if t.strip()]
        if len(vals) != grid.dim + 1:
            raise ConfigError(
                f"each charge needs {grid.dim} coordinates and a magnitude, got {row!r}"
            )
        centers.append(vals[: grid.dim])
        values.append(vals[-1])
    width = sec.getfloat("mollifier_width", fallback=2.0 * max(grid.spacing))
    return deposit_charges(grid, np.array(centers), np.array(values), width)


def _problem_from_config(cfg: configparser.ConfigParser, tol_override: float | None):
    grid = _grid_from_config(cfg)
    sec = cfg["coefficients"] if cfg.has_section("coefficients") else {}
    eps = grid.sample(float(sec.get("eps", 1.0)))
    kappa_sq = grid.sample(float(sec.get("kappa_sq", 0.0)))
    f = grid.sample(float(sec.get("f", 0.0)))
    charges = _charges_from_config(grid, sec) if sec else None
    if charges is not None:
        f = f + charges
    g = boundary_field(grid, float(sec.get("g", 0.0)))
    solver = cfg["solver"] if cfg.has_section("solver") else {}
    picard_tol = tol_override or float(solver.get("picard_tol", 1e-10))
    picard_max = int(solver.get("picard_max_iter", 100))
    linear_tol = tol_override or float(solver.get("linear_tol", 1e-10))
    problem = NpbeProblem(grid=grid, eps=eps, kappa_sq=kappa_sq, f=f, g=g)
    return problem, picard_tol, picard_max, linear_tol


def _echo(cfg: configparser.ConfigParser, extra: dict[str, str] | None = None) -> dict[str, str]:
    out: dict[str, str] = {}
    for section in cfg.sections():
        for key, value in cfg[section].items():
            out[f"{section}.{key}"] = value
    if extra:
        out.update(extra)
    return out


def cmd_gridinfo(args, cfg) -> int:
    grid = _grid_from_config(cfg)
    geo = GeometryParams.from_grid(grid)
    pairs = [
        ("dim", grid.dim),
        ("nodes", "x".join(str(n) for n in grid.shape)),
        ("spacing", ",".join(f"{h:.17g}" for h in grid.spacing)),
        ("diameter", geo.diameter),
        ("volume", geo.volume),
        ("lambda1_bound", geo.lambda1_bound),
        ("lambda1_exact", geo.lambda1_exact),
    ]
    path = write_kv(Path(args.out) / "gridinfo.txt", pairs, _echo(cfg))
    print(f"wrote {path}")
    return 0


def cmd_solve(args, cfg) -> int:
    problem, picard_tol, picard_max, linear_tol = _problem_from_config(cfg, args.tol)
    result = picard_solve(
        problem, tol=picard_tol, max_iter=picard_max, linear_tol=linear_tol
    )
    grid = problem.grid
    mesh = grid.meshgrid()
    coords = [m.ravel() for m in mesh]
    rows = list(zip(*coords, result.u.ravel()))
    header = [f"x{i+1}" for i in range(grid.dim)] + ["u"]
    echo = _echo(cfg)
    out = Path(args.out)
    write_csv(out / "solution.csv", header, rows, echo)
    write_kv(
        out / "solve_summary.txt",
        [
            ("converged", result.converged),
            ("iterations", result.iterations),
            ("residual", result.residual),
            ("rho_obs", result.rho_obs),
            ("u_l2", discrete_norm(grid, result.u, "L2")),
            ("u_linf", discrete_norm(grid, result.u, "Linf")),
        ],
        echo,
    )
    print(f"{result.iterations} Picard iteration(s), residual {result.residual:.3e}")
    print(f"wrote {out / 'solution.csv'}")
    return 0


def cmd_constants(args, cfg) -> int:
    problem, *_ = _problem_from_config(cfg, None)
    grid = problem.grid
    geo = GeometryParams.from_grid(grid)
    bounds = CoefficientBounds.from_fields(grid, problem.eps, problem.kappa_sq)
    sec = cfg["constants"] if cfg.has_section("constants") else {}
    kwargs = {}
    if grid.dim == 3 or grid.dim == 1:
        kwargs["p"] = float(sec.get("p", 4.0))
    if sec:
        if sec.get("ball_radius"):
            kwargs["ball_radius"] = float(sec.get("ball_radius"))
        if sec.get("grad_zeta") and sec.get("covering_n"):
            kwargs["grad_zeta_norm"] = float(sec.get("grad_zeta"))
            kwargs["covering_n"] = int(sec.get("covering_n"))
    f_norm = discrete_norm(grid, problem.f, "L2")
    from .operator import harmonic_lift

    lift = harmonic_lift(grid, problem.g)
    w_norm = discrete_norm(grid, lift, "H2")
    report = evaluate_report(geo, bounds, f_norm=f_norm, w_norm=w_norm, **kwargs)
    echo = _echo(cfg)
    out = Path(args.out)
    kv_path = write_kv(
        out / "constants.txt",
        list(report.values.items()) + list(report.flags.items()),
        echo,
    )
    write_csv(
        out / "constants.csv",
        ["name", "value", "provenance"],
        report.rows(),
        echo,
    )
    sys.stdout.write(report.to_kv_block())
    print(f"wrote {kv_path}")
    return 0


def cmd_uq(args, cfg) -> int:
    grid = _grid_from_config(cfg)
    sec = cfg["uq"] if cfg.has_section("uq") else {}
    n_vars = int(sec.get("n_vars", 2))
    levels = parse_levels(args.levels or sec.get("levels", "1..4"))
    ref = args.ref or int(sec.get("ref", max(levels) + 1))
    jobs = args.jobs or int(sec.get("jobs", 1))
    model = make_charge_shift_model(
        grid,
        n_vars,
        eps_internal=float(sec.get("eps_internal", 2.0)),
        eps_external=float(sec.get("eps_external", 2.0)),
        kappa_sq_external=float(sec.get("kappa_sq_external", 1.0)),
        charge=float(sec.get("charge", 8.0)),
        interior_radius=float(sec.get("interior_radius", 0.1)),
        shift_amplitude=float(sec["shift_amplitude"]) if sec.get("shift_amplitude") else None,
        mollifier_width=float(sec["mollifier_width"]) if sec.get("mollifier_width") else None,
        interface_width=float(sec["interface_width"]) if sec.get("interface_width") else None,
    )
    solver = cfg["solver"] if cfg.has_section("solver") else {}
    config = UqStudyConfig(
        n_vars=n_vars,
        levels=levels,
        reference_level=ref,
        picard_tol=args.tol or float(solver.get("picard_tol", 1e-10)),
        picard_max_iter=int(solver.get("picard_max_iter", 100)),
        linear_tol=args.tol or float(solver.get("linear_tol", 1e-10)),
        jobs=jobs,
        bound_sigma_hat=float(sec["sigma_hat"]) if sec.get("sigma_hat") else None,
        bound_m_tilde=float(sec["m_tilde"]) if sec.get("m_tilde") else None,
    )
    report = run_uq_study(config, model)
    echo = _echo(
        cfg,
        {
            "cli.levels": ",".join(str(w) for w in levels),
            "cli.ref": str(ref),
            "cli.jobs": str(jobs),
            "wellposed_at_center": str(report.wellposed_at_center).lower(),
        },
    )
    rows = [
        (r.level, r.n_nodes, r.expectation, r.abs_error, r.fitted_rate, r.predicted_bound)
        for r in report.rows
    ]
    path = write_csv(
        Path(args.out) / "study.csv",
        ["w", "eta", "E_w", "abs_err", "fitted_rate", "predicted_bound"],
        rows,
        echo,
    )
    for r in report.rows:
        print(
            f"w={r.level} eta={r.n_nodes} E={r.expectation:.12e} err={r.abs_error:.3e}"
        )
    print(f"wrote {path}")
    return 0


def cmd_bound(args, cfg) -> int:
    sec = cfg["bound"] if cfg.has_section("bound") else {}
    n_vars = int(sec.get("n_vars", 2))
    sigma_hat = float(sec.get("sigma_hat", 1.0))
    m_tilde = float(sec.get("m_tilde", 1.0))
    levels = parse_levels(args.levels or sec.get("levels", "0..6"))
    params = bound_constants(n_vars, sigma_hat, m_tilde)
    rows = []
    for w in levels:
        eta = build_sparse_grid(n_vars, w).n_nodes
        regime, value = predict_error(params, w, eta)
        rows.append((w, eta, regime, value))
    echo = _echo(cfg, {k: f"{v:.17g}" for k, v in params.describe().items()})
    path = write_csv(
        Path(args.out) / "bounds.csv", ["w", "eta", "regime", "bound"], rows, echo
    )
    print(f"wrote {path}")
    return 0


def cmd_ode(args, cfg) -> int:
    sec = cfg["ode"] if cfg.has_section("ode") else {}
    params = RadialParams(
        a_coef=float(sec.get("a", 2.0)),
        kappa_tilde=float(sec.get("kappa_tilde", 1.0)),
        lam=float(sec.get("lambda", 0.0)),
        c=float(sec.get("c", 1.0)),
        eps_reg=float(sec.get("eps_reg", 1e-6)),
        step=float(sec.get("step", 1e-3)),
        r_max=float(sec.get("r_max", 15.0)),
    )
    traj = integrate_regularized(params)
    target = float(sec.get("zero_target", 0.0)) if sec else 0.0
    scan = find_zeros(traj, target=target)
    echo = _echo(cfg)
    out = Path(args.out)
    write_csv(
        out / "trajectory.csv",
        ["r", "y", "w", "H"],
        zip(traj.r, traj.y, traj.w, traj.h),
        echo,
    )
    write_csv(
        out / "zeros.csv",
        ["n", "R_n"],
        [(k + 1, z) for k, z in enumerate(scan.zeros)],
        echo,
    )
    box = _floats(sec.get("phase_box", "-3, 3, -3, 3")) if sec else [-3, 3, -3, 3]
    n_phase = int(sec.get("phase_n", 21)) if sec else 21
    ys = np.linspace(box[0], box[1], n_phase)
    ws = np.linspace(box[2], box[3], n_phase)
    rows = []
    kt, lam = params.kappa_tilde, params.lam
    for yv in ys:
        for wv in ws:
            rows.append((yv, wv, wv, -kt * kt * math.sinh(yv) + lam))
    write_csv(out / "phase.csv", ["y", "w", "dy", "dw"], rows, echo)
    print(
        f"trajectory: {len(traj)} samples, truncated={traj.truncated}, "
        f"{len(scan.zeros)} zero crossing(s)"
    )
    print(f"wrote {out / 'trajectory.csv'}")
    return 0


def cmd_bifurcate(args, cfg) -> int:
    sec = cfg["bifurcate"] if cfg.has_section("bifurcate") else {}
    etas = _floats(sec.get("etas", "-0.2, -0.1, -0.05, -0.01, 0.5"))
    bracket = _floats(sec.get("bracket", "1e-4, 5.0"))
    interval = _floats(sec.get("interval", f"0, {math.pi}"))
    rows = []
    for eta in etas:
        res = shoot_scalar_npbe(
            eta, interval=(interval[0], interval[1]), slope_bracket=(bracket[0], bracket[1])
        )
        if res is None:
            rows.append((eta, False, float("nan"), float("nan"), float("nan"), -1))
        else:
            rows.append(
                (eta, True, res.slope, res.amplitude, res.l2_norm, res.interior_zeros)
            )
    path = write_csv(
        Path(args.out) / "bifurcation.csv",
        ["eta", "found", "slope", "amplitude", "l2_norm", "interior_zeros"],
        rows,
        _echo(cfg),
    )
    for row in rows:
        print(f"eta={row[0]}: " + ("nontrivial solution" if row[1] else "none"))
    print(f"wrote {path}")
    return 0


_COMMANDS = {
    "solve": cmd_solve,
    "constants": cmd_constants,
    "uq": cmd_uq,
    "bound": cmd_bound,
    "ode": cmd_ode,
    "bifurcate": cmd_bifurcate,
    "gridinfo": cmd_gridinfo,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="npbelab",
        description="Nonlinear Poisson-Boltzmann laboratory: deterministic "
        "solves, explicit constants, sparse-grid studies, and radial "
        "shooting experiments.",
    )
    parser.add_argument("--version", action="version", version=f"npbelab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the run config file")
        p.add_argument("--out", default="out", help="output directory (default: ./out)")
        p.add_argument("--levels", default=None, help="level range A..B or comma list")
        p.add_argument("--ref", type=int, default=None, help="reference level")
        p.add_argument("--jobs", type=int, default=None, help="worker processes")
        p.add_argument("--tol", type=float, default=None, help="solver tolerance override")
    return parser


def dispatch(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        cfg = _load_config(args.config)
        return _COMMANDS[args.command](args, cfg)
    except (ConfigError, ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
