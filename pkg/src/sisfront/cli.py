"""Command-line driver.

Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 inconclusive
classification.
"""

import argparse
import json
import os
import sys
import warnings

from . import export
from .dynamics import (
    SPREADING,
    UNDETERMINED,
    Criteria,
    ProbeSettings,
    R0Monitor,
    classify,
    find_mu_star,
    verify_attractor,
)
from .errors import (
    BracketError,
    ExpressionError,
    InconclusiveProbeError,
    NumericError,
    SisFrontError,
    ValidationError,
)
from .frontfix import FrontFixSolver, Grid, SolverOptions
from .model import check, reference_example, split_config
from .semiwave import speeds
from .spectral import principal_eigenvalue, r0_dirichlet_advection, r0_free_series, r0_properties_probe
from .steady import solve_equilibrium

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC, EXIT_INCONCLUSIVE = 0, 1, 2, 3

#: numerics accepted in a config file, with their defaults
NUMERIC_DEFAULTS = {
    "dt": 0.01,
    "n": 200,
    "t_end": 20.0,
    "output_stride": 50,
    "spectral_n": 200,
    "newton_tol": 1.0e-10,
    "newton_maxiter": 25,
    "outer_tol": 1.0e-9,
    "outer_maxiter": 20,
    "clip_tol": 1.0e-8,
    "max_halvings": 10,
    "tol_front": 1.0e-6,
    "tol_mass": 1.0e-5,
    "bracket": [1.0, 6.0],
    "width": 0.25,
    "max_horizon": 320.0,
    "workers": 1,
    "L": 50.0,
    "window": [-5.0, 5.0],
}

_SOLVER_KEYS = ("newton_tol", "newton_maxiter", "outer_tol", "outer_maxiter", "clip_tol", "max_halvings")


class StrictParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _defaults_help():
    return "numerics (config keys or flags) and defaults: " + ", ".join(
        f"{k}={v}" for k, v in NUMERIC_DEFAULTS.items())


def build_parser():
    parser = StrictParser(
        prog="sisfront",
        description="Free-boundary SIS epidemic model with advection: simulation, R0, spreading speeds.",
        epilog=_defaults_help(),
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=StrictParser)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="JSON model config")
        p.add_argument("--out", default=None, help="output directory (created if missing)")
        p.add_argument("--dt", type=float)
        p.add_argument("--n", type=int, help="interior grid nodes")
        p.add_argument("--t-end", dest="t_end", type=float)
        p.add_argument("--output-stride", dest="output_stride", type=int)
        p.add_argument("--spectral-n", dest="spectral_n", type=int)
        return p

    common(sub.add_parser("simulate", help="run the free-boundary problem and export the trajectory"))

    p = common(sub.add_parser("r0", help="reproduction number on an interval, along a run, or a property probe"))
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--interval", nargs=2, type=float, metavar=("G", "H"))
    mode.add_argument("--series", action="store_true", help="R0 along a simulated trajectory")
    mode.add_argument("--probe", action="store_true", help="monotonicity ladders")

    p = common(sub.add_parser("semiwave", help="asymptotic spreading speeds"))
    p.add_argument("--profile", action="store_true", help="also dump semi-wave profiles")

    p = common(sub.add_parser("equilibrium", help="endemic equilibrium on a truncated line"))
    p.add_argument("--L", type=float)

    common(sub.add_parser("classify", help="spreading/vanishing verdict"))

    p = common(sub.add_parser("threshold", help="enclose the critical expanding capability"))
    p.add_argument("--bracket", nargs=2, type=float, metavar=("LO", "HI"))
    p.add_argument("--width", type=float)
    p.add_argument("--workers", type=int)

    common(sub.add_parser("reproduce-paper", help="the four illustrative runs (mu in {1, 6}, alpha = +-1.5)"),
           config_required=False)
    return parser


def _resolve(args):
    if args.config is None:
        spec, numerics = reference_example(), {}
    else:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config {args.config}: {exc}") from None
        spec, numerics = split_config(data, NUMERIC_DEFAULTS)
    settings = dict(NUMERIC_DEFAULTS)
    settings.update(numerics)
    for key in NUMERIC_DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = list(value) if isinstance(value, list) else value
    problems = [k for k in ("dt", "n", "t_end", "output_stride", "spectral_n", "width", "L")
                if not (isinstance(settings[k], (int, float)) and settings[k] > 0)]
    if problems:
        raise ValidationError("numerics must be positive: " + ", ".join(problems))
    return spec, settings


def _solver_options(settings):
    return SolverOptions(**{k: settings[k] for k in _SOLVER_KEYS})


def _criteria(settings):
    return Criteria(tol_front=settings["tol_front"], tol_mass=settings["tol_mass"],
                    spectral_n=settings["spectral_n"])


def _outdir(args, default):
    path = args.out or default
    os.makedirs(path, exist_ok=True)
    return path


def _simulate(spec, settings, monitor=True, stop=False):
    solver = FrontFixSolver(spec, Grid.uniform(settings["n"]), _solver_options(settings))
    hooks = [R0Monitor(spec, settings["spectral_n"], stop_on_spreading=stop)] if monitor else []
    return solver.run(settings["dt"], settings["t_end"], hooks=hooks, output_stride=settings["output_stride"])


def cmd_simulate(args, spec, settings):
    out = _outdir(args, "out")
    traj = _simulate(spec, settings)
    paths = export.write_trajectory(out, traj)
    last = traj.front_history[-1]
    print(f"t = {last[0]:.6g}  g = {last[1]:.6g}  h = {last[2]:.6g}  sup I = {last[5]:.6g}")
    return paths, EXIT_OK


def cmd_r0(args, spec, settings):
    out = _outdir(args, "out")
    n = settings["spectral_n"]
    if args.series:
        traj = _simulate(spec, settings, monitor=False)
        series = r0_free_series(traj, spec, n)
        for t, g, h, r0 in series:
            print(f"t = {t:.6g}  ({g:.6g}, {h:.6g})  R0 = {r0:.10g}")
        return [export.write_r0_series(out, series)], EXIT_OK
    if args.probe:
        report = r0_properties_probe(spec)
        print(report.table())
        return [export.write_r0_probe(out, report)], (EXIT_OK if report.passed else EXIT_NUMERIC)
    interval = tuple(args.interval) if args.interval else (-spec.h0, spec.h0)
    r0 = r0_dirichlet_advection(interval, spec, n)
    lam, _, _ = principal_eigenvalue(interval, spec, n)
    agree = (1.0 - r0) * lam >= -1e-8
    print(f"interval = ({interval[0]:g}, {interval[1]:g})  R0 = {r0:.12g}  lambda0 = {lam:.12g}  "
          f"sign check {'ok' if agree else 'FAILED'}")
    path = export.write_csv(os.path.join(out, "r0.csv"), ["g", "h", "R0", "lambda0"],
                            [(interval[0], interval[1], r0, lam)])
    return [path], (EXIT_OK if agree else EXIT_NUMERIC)


def cmd_semiwave(args, spec, settings):
    out = _outdir(args, "out")
    check(spec)
    left, right, k0 = speeds(spec)
    for r in (right, left):
        print(f"{r.direction:<9}  k* = {r.k_star:.12g}  q'(0) = {r.slope0:.12g}")
    print(f"no advection  k0 = {k0:.12g}")
    return export.write_semiwaves(out, [right, left], profiles=args.profile), EXIT_OK


def cmd_equilibrium(args, spec, settings):
    out = _outdir(args, "out")
    check(spec)
    prof = solve_equilibrium(spec, settings["L"])
    print(f"L = {prof.L:g}  min I* = {prof.values.min():.10g}  max I* = {prof.values.max():.10g}")
    return [export.write_equilibrium(out, prof)], EXIT_OK


def cmd_classify(args, spec, settings):
    out = _outdir(args, "out")
    check(spec)
    traj = _simulate(spec, settings)
    outcome = classify(traj, spec, _criteria(settings))
    window = tuple(settings["window"])
    final = traj.final
    if outcome.verdict == SPREADING and final.g < window[0] and window[1] < final.h:
        equilibrium = solve_equilibrium(spec, settings["L"])
        report = verify_attractor(traj, equilibrium, window, outcome=outcome)
        outcome.diagnostics["attractor_window"] = list(window)
        outcome.diagnostics["attractor_error"] = report.max_error
    print(f"verdict: {outcome.verdict}")
    code = EXIT_INCONCLUSIVE if outcome.verdict == UNDETERMINED else EXIT_OK
    return [export.write_verdict(out, outcome)], code


def cmd_threshold(args, spec, settings):
    out = _outdir(args, "out")
    probe_settings = ProbeSettings(dt=settings["dt"], n=settings["n"], horizon=settings["t_end"],
                                   max_horizon=settings["max_horizon"], output_stride=settings["output_stride"],
                                   criteria=_criteria(settings))
    result = find_mu_star(spec, tuple(settings["bracket"]), settings["width"], probe_settings,
                          workers=int(settings["workers"]))
    print(f"mu* in [{result.mu_lo:.6g}, {result.mu_hi:.6g}]  (width {result.width:.3g})")
    paths = [export.write_mu_scan(out, result.probes),
             export.write_json(os.path.join(out, "threshold.json"),
                               {"mu_lo": result.mu_lo, "mu_hi": result.mu_hi,
                                "estimate": result.estimate, "monotone": result.monotone})]
    return paths, EXIT_OK


def cmd_reproduce(args, spec, settings):
    out = _outdir(args, "figures")
    paths = []
    summary = {}
    for mu in (6.0, 1.0):
        for alpha in (1.5, -1.5):
            name = f"mu{mu:g}_alpha{alpha:+g}"
            run_dir = os.path.join(out, name)
            os.makedirs(run_dir, exist_ok=True)
            case = spec.replace(mu=mu, alpha=alpha)
            check(case)
            traj = _simulate(case, settings)
            outcome = classify(traj, case, _criteria(settings))
            paths += export.write_trajectory(run_dir, traj)
            paths.append(export.write_verdict(run_dir, outcome))
            last = traj.front_history[-1]
            summary[name] = {"verdict": outcome.verdict, "g": last[1], "h": last[2], "supI": last[5]}
            print(f"{name:<16} {outcome.verdict:<12} g = {last[1]:.6g}  h = {last[2]:.6g}  sup I = {last[5]:.3g}")
    paths.append(export.write_json(os.path.join(out, "summary.json"), summary))
    ok = all(v["verdict"] == (SPREADING if k.startswith("mu6") else "vanishing") for k, v in summary.items())
    return paths, (EXIT_OK if ok else EXIT_INCONCLUSIVE)


COMMANDS = {
    "simulate": cmd_simulate,
    "r0": cmd_r0,
    "semiwave": cmd_semiwave,
    "equilibrium": cmd_equilibrium,
    "classify": cmd_classify,
    "threshold": cmd_threshold,
    "reproduce-paper": cmd_reproduce,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec, settings = _resolve(args)
        if args.command != "reproduce-paper":
            check(spec)
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            paths, code = COMMANDS[args.command](args, spec, settings)
        out = os.path.dirname(paths[0]) if args.command != "reproduce-paper" else (args.out or "figures")
        config = {"command": args.command, "model": spec.to_dict(), "numerics": settings}
        export.write_manifest(out, paths, config)
        return code
    except ExpressionError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValidationError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        for v in getattr(exc, "violations", []):
            print(f"  - {v}", file=sys.stderr)
        return EXIT_INVALID
    except InconclusiveProbeError as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (NumericError, BracketError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except SisFrontError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
