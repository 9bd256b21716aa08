"""Command-line entry point.

Subcommands cover the whole workflow: solve a single frozen-density
equilibrium, evolve the density to a stationary pattern, tabulate the mode
spectrum, trace critical transport-cost curves, scan growth rates over a
parameter plane, rerun the two spike-count sweeps, and print the contraction
diagnostics. Exit status is 0 on success, 2 on configuration or usage errors,
and 3 when a numerical procedure fails to converge.
"""

import argparse
import math
import os
import sys
from dataclasses import replace

import numpy as np

from ._version import __version__
from .analysis import count_spikes, run_sigma_sweep, run_tau_sweep
from .config import ConfigError, RunConfig, apply_overrides, default_config, parse_config
from .core import make_grid, perturbed_uniform, uniform_field
from .dynamics import simulate
from .equilibrium import instantaneous_equilibrium
from .errors import NumericalError
from .io import (
    field_from_csv,
    fmt,
    metadata_lines,
    render_heatmap_svg,
    render_line_svg,
    write_field_csv,
    write_modes_csv,
    write_sweep_csv,
)
from .kernel import build_kernel
from .stability import critical_curve, eigenvalue, mode_Z, stability_report
from .theory import apriori_bounds

OUT_ENV = "RACETRACK_FE_OUT"


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="config file (INI sections)")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--seed", type=int, metavar="U64", help="perturbation RNG seed")
    common.add_argument("--workers", type=int, metavar="N", help="parallel sweep rows")
    common.add_argument("--tau", type=float, help="transport cost override")
    common.add_argument("--sigma", type=float, help="substitution elasticity override")
    common.add_argument("--grid", type=int, metavar="N", help="number of ring nodes")
    common.add_argument("--dt", type=float, help="time step override")

    parser = argparse.ArgumentParser(
        prog="racetrack-fe",
        description="Agglomeration dynamics of mobile workers on a ring economy.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("equilibrium", parents=[common],
                       help="solve wages and prices for a frozen worker density")
    p.add_argument("--field", metavar="PATH",
                   help="worker density CSV; default is the seeded perturbed uniform state")
    sub.add_parser("simulate", parents=[common],
                   help="evolve the density until it is stationary")
    sub.add_parser("stability", parents=[common],
                   help="eigenvalue table, threshold Z*, critical transport costs")
    sub.add_parser("critical-curve", parents=[common],
                   help="critical transport cost per mode over an elasticity grid")
    sub.add_parser("heatmap", parents=[common],
                   help="growth rate of one mode over a tau x sigma plane")
    sub.add_parser("sweep-tau", parents=[common],
                   help="stationary spike counts over a list of transport costs")
    sub.add_parser("sweep-sigma", parents=[common],
                   help="stationary spike counts over a list of elasticities")
    sub.add_parser("diagnostics", parents=[common],
                   help="contraction modulus and a-priori bound constants")
    return parser


def _load_config(args) -> RunConfig:
    cfg = parse_config(args.config) if args.config else default_config()
    return apply_overrides(
        cfg,
        tau=args.tau,
        sigma=args.sigma,
        grid=args.grid,
        dt=args.dt,
        seed=args.seed,
        out=args.out,
        workers=args.workers,
    )


def _resolve_out(cli_out, cfg_out) -> str:
    out = cli_out or os.environ.get(OUT_ENV) or cfg_out or os.getcwd()
    os.makedirs(out, exist_ok=True)
    return out


def cmd_equilibrium(args, cfg: RunConfig, out: str) -> int:
    params = cfg.model
    if args.field:
        lam = field_from_csv(args.field, params.rho)
        grid = lam.grid
    else:
        grid = make_grid(cfg.grid_size, params.rho)
        lam = perturbed_uniform(grid, params.LambdaTotal, cfg.numerics)
    kern = build_kernel(grid, params)
    phi = uniform_field(grid, params.PhiTotal)
    eq = instantaneous_equilibrium(lam, phi, kern, params, cfg.numerics)
    for name, field in (("wage", eq.w), ("price_index", eq.G),
                        ("income", eq.Y), ("real_wage", eq.omega)):
        write_field_csv(field, os.path.join(out, f"{name}.csv"),
                        params, cfg.numerics, extra={"quantity": name})
    render_line_svg(
        [
            ("lambda", grid.theta, lam.values),
            ("wage", grid.theta, eq.w.values),
            ("real wage", grid.theta, eq.omega.values),
        ],
        os.path.join(out, "equilibrium.svg"),
        title="instantaneous equilibrium",
        xlabel="theta",
        ylabel="level",
    )
    print(f"wage solver: {eq.iterations} sweeps, residual {eq.residual:.3e}")
    print(f"wage range: [{eq.w.values.min():.6g}, {eq.w.values.max():.6g}]")
    print(f"real wage range: [{eq.omega.values.min():.6g}, {eq.omega.values.max():.6g}]")
    print(f"wrote {out}/wage.csv price_index.csv income.csv real_wage.csv equilibrium.svg")
    return 0


def cmd_simulate(args, cfg: RunConfig, out: str) -> int:
    params = cfg.model
    grid = make_grid(cfg.grid_size, params.rho)
    kern = build_kernel(grid, params)
    lam0 = perturbed_uniform(grid, params.LambdaTotal, cfg.numerics)
    phi = uniform_field(grid, params.PhiTotal)
    res = simulate(lam0, phi, kern, params, cfg.numerics)
    spikes = count_spikes(res.final_lambda, cfg.threshold_ratio)
    path = os.path.join(out, "final_lambda.csv")
    write_field_csv(res.final_lambda, path, params, cfg.numerics,
                    extra={"steps": res.steps_taken, "converged": res.converged})
    render_line_svg(
        [("lambda", grid.theta, res.final_lambda.values)],
        os.path.join(out, "final_lambda.svg"),
        title=f"stationary density (tau={params.tau:g}, sigma={params.sigma:g})",
        xlabel="theta",
        ylabel="lambda",
    )
    state = "stationary" if res.converged else "NOT stationary (step budget hit)"
    print(f"steps: {res.steps_taken} ({state})")
    print(f"spikes: {spikes}")
    print(f"max lambda: {res.final_lambda.values.max():.6g}")
    print(f"mass drift: {res.mass_drift:.3e}")
    print(f"wrote {path} and final_lambda.svg")
    return 0 if res.converged else 3


def cmd_stability(args, cfg: RunConfig, out: str) -> int:
    params = cfg.model
    report = stability_report(params, cfg.k_window)
    print(f"Z* = {report.z_star:.12g}")
    print("no-black-hole (sigma - 1 > mu): "
          + ("holds" if report.no_black_hole else "FAILS"))
    positive = [m for m in report.modes if m.k > 0]
    prev_sign = None
    print(f"{'k':>4} {'Z_k':>22} {'Gamma_k':>24} {'stable':>7}")
    for m in positive:
        sign = math.copysign(1.0, m.Gamma_k)
        marker = " <- sign change" if prev_sign is not None and sign != prev_sign else ""
        prev_sign = sign
        print(f"{m.k:>4} {m.Zk:>22.15g} {m.Gamma_k:>24.15g} "
              f"{str(m.stable):>7}{marker}")
    finite = {k: t for k, t in report.critical_taus.items() if math.isfinite(t)}
    if finite:
        pairs = ", ".join(f"k={k}: {t:.9g}" for k, t in sorted(finite.items()))
        print(f"critical transport costs: {pairs}")
    rows = [(m.k, params.tau, params.sigma, m.Zk, m.Gamma_k) for m in report.modes]
    path = os.path.join(out, "modes.csv")
    write_modes_csv(rows, path, params, cfg.numerics)
    render_line_svg(
        [("Gamma_k", [m.k for m in positive], [m.Gamma_k for m in positive]),
         ("zero", [positive[0].k, positive[-1].k], [0.0, 0.0])],
        os.path.join(out, "modes.svg"),
        title=f"mode growth rates (tau={params.tau:g}, sigma={params.sigma:g})",
        xlabel="k",
        ylabel="Gamma_k",
    )
    print(f"wrote {path} and modes.svg")
    return 0


def cmd_critical_curve(args, cfg: RunConfig, out: str) -> int:
    params = cfg.model
    rows = []
    series = []
    for k in cfg.curve_k:
        pts = critical_curve(k, cfg.curve_sigma_grid, params)
        xs, ys = [], []
        for sigma, tau_star in pts:
            if math.isfinite(tau_star):
                p = replace(params, sigma=sigma, tau=tau_star)
                rows.append((k, tau_star, sigma, mode_Z(k, p.alpha, p.rho),
                             eigenvalue(k, p)))
                xs.append(sigma)
                ys.append(tau_star)
            else:
                rows.append((k, math.nan, sigma, math.nan, math.nan))
                print(f"no critical point for k={k} at sigma={sigma:g}",
                      file=sys.stderr)
        series.append((f"k={k}", xs, ys))
        if ys:
            print(f"k={k}: tau* in [{min(ys):.6g}, {max(ys):.6g}] over sigma grid")
    path = os.path.join(out, "critical_curve.csv")
    write_modes_csv(rows, path, params, cfg.numerics,
                    extra={"content": "critical points: Gamma_k(tau) = 0"})
    render_line_svg(series, os.path.join(out, "critical_curve.svg"),
                    title="critical transport cost by mode",
                    xlabel="sigma", ylabel="tau*")
    print(f"wrote {path} and critical_curve.svg")
    return 0


def cmd_heatmap(args, cfg: RunConfig, out: str) -> int:
    params = cfg.model
    k = cfg.heat_k
    t0, t1, tn = cfg.heat_tau
    s0, s1, sn = cfg.heat_sigma
    taus = np.linspace(float(t0), float(t1), int(tn))
    sigmas = np.linspace(float(s0), float(s1), int(sn))
    rows = []
    z = np.empty((len(sigmas), len(taus)))
    for j, s in enumerate(sigmas):
        for i, t in enumerate(taus):
            p = replace(params, tau=float(t), sigma=float(s))
            g = eigenvalue(k, p)
            z[j][i] = g
            rows.append((k, float(t), float(s), mode_Z(k, p.alpha, p.rho), g))
    path = os.path.join(out, "heatmap.csv")
    write_modes_csv(rows, path, params, cfg.numerics,
                    extra={"content": f"Gamma_{k} over tau x sigma grid"})
    render_heatmap_svg(
        taus, sigmas, z, os.path.join(out, "heatmap.svg"),
        title=f"growth rate of mode k={k}",
        xlabel=f"tau in [{taus[0]:g}, {taus[-1]:g}]",
        ylabel=f"sigma in [{sigmas[0]:g}, {sigmas[-1]:g}]",
    )
    n_unstable = int((z > 0).sum())
    print(f"grid: {len(taus)} tau values x {len(sigmas)} sigma values, k={k}")
    print(f"unstable cells (Gamma > 0): {n_unstable} of {z.size}")
    print(f"wrote {path} and heatmap.svg")
    return 0


def _print_sweep(rows) -> None:
    print(f"{'param':>6} {'value':>10} {'spikes':>7} {'converged':>10} {'steps':>10}")
    for r in rows:
        spikes = "-" if r.spike_count is None else str(r.spike_count)
        print(f"{r.varied_param:>6} {r.value:>10.6g} {spikes:>7} "
              f"{str(r.converged):>10} {r.steps:>10}")
        if r.error:
            print(f"       failed: {r.error}")


def cmd_sweep_tau(args, cfg: RunConfig, out: str) -> int:
    sigma = args.sigma if args.sigma is not None else cfg.sweep_sigma
    rows = run_tau_sweep(sigma, cfg.tau_values, cfg.model, cfg.numerics,
                         n_nodes=cfg.grid_size, threshold_ratio=cfg.threshold_ratio,
                         workers=cfg.workers, out_dir=out)
    _print_sweep(rows)
    path = os.path.join(out, "sweep_tau.csv")
    write_sweep_csv(rows, path, cfg.model, cfg.numerics,
                    extra={"fixed_sigma": sigma})
    print(f"wrote {path}")
    return 0 if all(r.error is None for r in rows) else 3


def cmd_sweep_sigma(args, cfg: RunConfig, out: str) -> int:
    tau = args.tau if args.tau is not None else cfg.sweep_tau
    rows = run_sigma_sweep(tau, cfg.sigma_values, cfg.model, cfg.numerics,
                           n_nodes=cfg.grid_size, threshold_ratio=cfg.threshold_ratio,
                           workers=cfg.workers, out_dir=out)
    _print_sweep(rows)
    path = os.path.join(out, "sweep_sigma.csv")
    write_sweep_csv(rows, path, cfg.model, cfg.numerics,
                    extra={"fixed_tau": tau})
    print(f"wrote {path}")
    return 0 if all(r.error is None for r in rows) else 3


def cmd_diagnostics(args, cfg: RunConfig, out: str) -> int:
    params = cfg.model
    b = cfg.diagnostics_b if cfg.diagnostics_b is not None else params.LambdaTotal / 2.0
    bounds = apriori_bounds(params, b)
    lines = [f"contraction modulus = {fmt(bounds.contraction_modulus)}"]
    if not bounds.applicable:
        lines.append(f"warning: sufficient condition fails ({bounds.violated}); "
                     "bounds below the modulus are not applicable")
    else:
        for name in ("b", "Lambda1", "Lambda2", "G_L", "G_U", "w_U", "omega_U",
                     "K", "C_G", "L_G", "L_w", "L_omega", "L"):
            lines.append(f"{name} = {fmt(getattr(bounds, name))}")
        lines.append(f"existence horizon: b/K = {fmt(b / bounds.K)}, "
                     f"1/L = {fmt(1.0 / bounds.L)} (free constant not reported)")
    for ln in lines:
        print(ln)
    path = os.path.join(out, "diagnostics.txt")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(metadata_lines(params, cfg.numerics, cfg.grid_size)) + "\n")
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {path}")
    return 0


_COMMANDS = {
    "equilibrium": cmd_equilibrium,
    "simulate": cmd_simulate,
    "stability": cmd_stability,
    "critical-curve": cmd_critical_curve,
    "heatmap": cmd_heatmap,
    "sweep-tau": cmd_sweep_tau,
    "sweep-sigma": cmd_sweep_sigma,
    "diagnostics": cmd_diagnostics,
}


def cli_dispatch(argv=None) -> int:
    """Run one subcommand; returns the process exit status instead of exiting."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return int(code) if isinstance(code, int) else 0 if code is None else 2
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        cfg = _load_config(args)
        out = _resolve_out(args.out, cfg.out_dir)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return _COMMANDS[args.command](args, cfg, out)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(cli_dispatch())


if __name__ == "__main__":
    main()
