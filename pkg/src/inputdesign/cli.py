"""Command-line interface: ``inputdesign <command> [options]``.

Commands
--------
design           solve the design problem and write a run artifact
invert           draw inputs from the inverse image of an artifact's r*
verify           run the structural self-check battery for (N, n)
simulate         Monte-Carlo RLS errors of designed versus random inputs
reproduce-paper  the N=120, n=50 design-then-invert experiment end to end

Exit codes: 0 success, 1 verification or stage failure, 2 configuration
error, 3 solver not converged (best iterate still written), 4 infeasible r*.
"""

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import plotting
from .config import DEFAULT_CONFIG, ConfigError, ProblemConfig, load_config
from .design import solve_design
from .errors import Infeasible, InputDesignError, NotConverged
from .identify import FirSystem, draw_impulse_response, evaluate_design
from .inversion import MEMBERSHIP_TOL, fdie, giie, membership_check, tdie
from .io import RunArtifact, read_csv, write_csv
from .verify import run_battery

OUT_DIR_ENV = "INPUTDESIGN_OUT_DIR"

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_NOT_CONVERGED = 3
EXIT_INFEASIBLE = 4

PAIR_COLUMNS = ("l1", "scaled", "reference")


def parse_route(route, gamma=None):
    """``"fdie"``, ``"tdie"``, ``"giie"`` or ``"giie:<re>,<im>"`` -> (name, gamma)."""
    name, _, arg = route.partition(":")
    name = name.lower()
    if name not in ("fdie", "tdie", "giie"):
        raise ConfigError("route", f"unknown route {route!r}")
    if arg:
        if name != "giie":
            raise ConfigError("route", "only giie takes a gamma argument")
        try:
            re, im = (float(s) for s in arg.split(","))
        except ValueError as exc:
            raise ConfigError("route", f"expected giie:<re>,<im>, got {route!r}") from exc
        gamma = complex(re, im) if im else re
    if name == "giie" and gamma is None:
        gamma = 0.5
    return name, gamma


def generate_input(r, N, route, gamma, seed):
    if route == "fdie":
        return fdie(r, N, seed=seed)
    if route == "tdie":
        return tdie(r, N, seed=seed)
    return giie(r, N, gamma, seed=seed)


def _generate_one(job):
    r, N, route, gamma, seed = job
    u = generate_input(r, N, route, gamma, seed)
    m = membership_check(u, r)
    return u, (m.l1, m.scaled, m.residual, float(m.passed))


def generate_inputs(r, N, count, route="giie", gamma=0.5, seed=0, jobs=1):
    """``count`` inputs and their membership rows; input i uses seed ``seed + i``.

    The per-index seeding makes the output independent of ``jobs``.
    """
    r = np.asarray(r, dtype=float)
    work = [(r, N, route, gamma, seed + i) for i in range(count)]
    if jobs > 1 and count > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_generate_one, work, chunksize=max(1, count // (4 * jobs))))
    else:
        results = [_generate_one(w) for w in work]
    inputs = np.array([u for u, _ in results]).reshape(count, N)
    membership = np.array([m for _, m in results], dtype=float).reshape(count, 4)
    return inputs, membership


def write_pairs(out_dir, membership):
    pairs = np.column_stack([membership[:, 0], membership[:, 1], membership[:, 0]])
    write_csv(Path(out_dir) / "pairs.csv", "membership_pairs", pairs.reshape(-1, 3), PAIR_COLUMNS)
    plotting.membership_figure(membership[:, 0], membership[:, 1], Path(out_dir) / "membership.png")


def _out_dir(args):
    return Path(args.out_dir or os.environ.get(OUT_DIR_ENV) or "out")


def _config_from_args(args):
    data = dict(DEFAULT_CONFIG)
    if args.config:
        cfg = load_config(args.config)
        data = cfg.to_dict()
    solver = dict(data.get("solver") or {})
    if args.criterion:
        data["criterion"] = args.criterion
    if args.seed is not None:
        data["seed"] = args.seed
    if args.tol is not None:
        solver["tol"] = args.tol
    if args.max_iter is not None:
        solver["max_iter"] = args.max_iter
    data["solver"] = solver
    return ProblemConfig.from_dict(data)


def _design(cfg):
    """Solve; returns ``(solution, converged)``."""
    try:
        return solve_design(cfg.problem, cfg.solver), True
    except NotConverged as exc:
        return exc.solution, False


def _artifact(cfg, sol, converged):
    return RunArtifact(
        config=cfg.to_dict(),
        r_star=sol.r_star,
        w_star=sol.w_star,
        objective=sol.objective,
        certificate=sol.certificate,
        iterations=sol.iterations,
        converged=converged,
    )


def cmd_design(args):
    cfg = _config_from_args(args)
    sol, converged = _design(cfg)
    out = _out_dir(args)
    _artifact(cfg, sol, converged).save(out)
    plotting.spectrum_figure(sol.w_star, out / "w_star.png")
    print(f"objective {float(sol.objective)!r}")
    print(f"certificate {float(sol.certificate)!r}")
    print(f"iterations {sol.iterations}")
    print(f"artifact {out / 'design.json'}")
    if not converged:
        print(f"not converged: certificate {sol.certificate:.3e} above tolerance", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_invert(args):
    art = RunArtifact.load(args.artifact)
    route, gamma = parse_route(args.route, args.gamma)
    seed = args.seed if args.seed is not None else int(art.config.get("seed", 0))
    N = art.w_star.size
    inputs, membership = generate_inputs(art.r_star, N, args.trials, route, gamma, seed, args.jobs)
    out = _out_dir(args)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "inputs.csv", "inputs", inputs)
    write_csv(out / "membership.csv", "membership", membership, RunArtifact.MEMBERSHIP_COLUMNS)
    write_pairs(out, membership)
    passed = int(membership[:, 3].sum())
    print(f"{passed}/{args.trials} inputs pass membership (tol {MEMBERSHIP_TOL:g})")
    return EXIT_OK if passed == args.trials else EXIT_FAILED


def cmd_verify(args):
    results = run_battery(args.N, args.n, seed=args.seed or 0)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else ""))
    failed = sum(not ok for _, ok, _ in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_FAILED


def cmd_simulate(args):
    if args.artifact:
        art = RunArtifact.load(args.artifact)
        cfg = ProblemConfig.from_dict(art.config)
        sol = art
    else:
        cfg = _config_from_args(args)
        sol, converged = _design(cfg)
        if not converged:
            print("design did not converge; evaluating best iterate", file=sys.stderr)
    seed = args.seed if args.seed is not None else cfg.seed
    p = cfg.problem
    if args.theta:
        theta = read_csv(args.theta)[1].real
    else:
        theta = draw_impulse_response(p.kernel.realize(), seed)
    system = FirSystem(theta, p.sigma2)
    report = evaluate_design(p, sol, system, args.trials, seed, args.gamma, args.noiseless)
    out = _out_dir(args)
    out.mkdir(parents=True, exist_ok=True)
    table = np.column_stack([report.designed_error, report.baseline_error, report.baseline_objective])
    write_csv(out / "evaluation.csv", "evaluation", table.reshape(-1, 3),
              ("designed_error", "baseline_error", "baseline_objective"))
    if report.trials:
        plotting.error_figure(report.designed_error, report.baseline_error, out / "evaluation.png")
    designed, baseline = report.mean_errors()
    print(f"mean squared error: designed {designed:.6g}, random {baseline:.6g}")
    return EXIT_OK


def cmd_reproduce(args):
    start = time.perf_counter()
    out = _out_dir(args)
    out.mkdir(parents=True, exist_ok=True)
    summary = {"stages": {}}
    stage = "config"
    try:
        cfg = _config_from_args(args)
        stage = "design"
        sol, converged = _design(cfg)
        gap_ok = sol.certificate <= cfg.solver.tol * (1 + abs(sol.objective))
        summary["stages"]["design"] = {
            "objective": float(sol.objective),
            "certificate": float(sol.certificate),
            "iterations": int(sol.iterations),
            "passed": bool(converged and gap_ok),
        }
        print(f"design: J = {sol.objective:.6f}, certificate {sol.certificate:.3e}")
        if not (converged and gap_ok):
            raise InputDesignError("certificate above tolerance")
        stage = "invert"
        route, gamma = parse_route(args.route, args.gamma)
        inputs, membership = generate_inputs(
            sol.r_star, cfg.problem.N, args.trials, route, gamma, cfg.seed, args.jobs
        )
        art = _artifact(cfg, sol, converged)
        art.inputs, art.membership = inputs, membership
        art.save(out)
        write_pairs(out, membership)
        stage = "membership"
        rel = membership[:, 2] / cfg.problem.C if args.trials else np.zeros(0)
        passed = int(membership[:, 3].sum())
        summary["stages"]["membership"] = {
            "route": args.route,
            "inputs": args.trials,
            "passed_count": passed,
            "max_relative_residual": float(rel.max()) if rel.size else 0.0,
            "passed": passed == args.trials,
        }
        print(f"membership: {passed}/{args.trials} inputs on y = x")
        if passed != args.trials:
            raise InputDesignError(f"{args.trials - passed} inputs failed membership")
    except (InputDesignError, ValueError) as exc:
        summary["failed_stage"] = stage
        summary["error"] = str(exc)
        summary["passed"] = False
        print(f"stage {stage} failed: {exc}", file=sys.stderr)
        code = EXIT_CONFIG if isinstance(exc, ConfigError) else EXIT_FAILED
    else:
        summary["passed"] = True
        code = EXIT_OK
    summary["seconds"] = round(time.perf_counter() - start, 3)
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(f"summary {out / 'summary.json'} ({summary['seconds']} s)")
    return code


def _add_design_flags(p):
    p.add_argument("--config", help="YAML/JSON problem file (defaults to the N=120 setup)")
    p.add_argument("--criterion", choices=["D", "A", "E"], type=str.upper)
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iter", type=int)


def build_parser():
    parser = argparse.ArgumentParser(prog="inputdesign", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int)
    common.add_argument("--out-dir", help=f"output directory (default ${OUT_DIR_ENV} or ./out)")
    inv = argparse.ArgumentParser(add_help=False)
    inv.add_argument("--route", default="giie", help="fdie | tdie | giie | giie:<re>,<im>")
    inv.add_argument("--gamma", type=float, help="graph weight for giie (default 0.5)")
    inv.add_argument("--jobs", type=int, default=1, help="worker processes for input generation")

    p = sub.add_parser("design", parents=[common], help="solve the design problem")
    _add_design_flags(p)
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("invert", parents=[common, inv], help="generate inputs for r*")
    p.add_argument("artifact", help="design artifact directory or design.json")
    p.add_argument("--trials", "--count", type=int, default=100, help="number of inputs")
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("verify", help="run the self-check battery")
    p.add_argument("N", type=int)
    p.add_argument("n", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", parents=[common], help="compare RLS errors")
    _add_design_flags(p)
    p.add_argument("--artifact", help="reuse a design artifact instead of solving")
    p.add_argument("--theta", help="CSV with the true impulse response (default: draw from the kernel)")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--noiseless", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reproduce-paper", parents=[common, inv], help="N=120 experiment end to end")
    _add_design_flags(p)
    p.add_argument("--trials", "--count", type=int, default=100)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "trials", 0) is not None and getattr(args, "trials", 0) < 0:
        print("--trials must be >= 0", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Infeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (OSError, InputDesignError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
