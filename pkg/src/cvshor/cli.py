"""Command-line entry point: simulate, recover, verify-appendix, fourier.

Machine-readable output goes to stdout (or ``--out``); diagnostics go to
stderr. Exit codes: 0 success, 1 usage/config error, 2 period not found.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import appendix
from .functions import (
    constant,
    cosine,
    evaluate,
    fourier_transform,
    load_tabulated_csv,
    reconstruct,
    sawtooth,
    square,
    triangle,
)
from .periods import is_rational, parse_period
from .recovery import RecoveryConfig, recover_irrational_period, recover_rational_period
from .simulator import (
    apply_fourier,
    default_n_max,
    distribution_rows,
    ideal_lattice_sample,
    lattice_rows,
    left_register_distribution,
    measure_observable,
    prepare_superposition,
    write_distribution_csv,
)

EXIT_OK, EXIT_USAGE, EXIT_NOT_FOUND = 0, 1, 2
FUNCTIONS = ("sawtooth", "triangle", "square", "cos", "constant", "tabulated")
BOOL_KEYS = {"exhaustive", "json"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _q_value(text):
    return "auto" if text == "auto" else _positive_int(text)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out")
    common.add_argument("--config")
    common.add_argument("--json", action="store_true", help="emit JSON instead of CSV where both exist")

    function = _Parser(add_help=False)
    function.add_argument("--function", choices=FUNCTIONS, default="sawtooth")
    function.add_argument("--period", default="1", help="p, a/b or sqrt:d*r")
    function.add_argument("--amplitude", type=float, default=1.0)
    function.add_argument("--table", help="x,phi_x CSV for --function tabulated")

    parser = _Parser(prog="cvshor", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", parents=[common, function], help="left-register distribution and samples")
    sim.add_argument("--mode", choices=("grid", "ideal"), default="ideal")
    sim.add_argument("--M", type=_positive_int, default=64)
    sim.add_argument("--W", type=_positive_int, default=16)
    sim.add_argument("--n-max", type=_positive_int)
    sim.add_argument("--Q", type=_positive_int, default=50)
    sim.add_argument("--samples", type=int, default=0)
    sim.add_argument("--weighting", choices=("register", "coefficient"), default="register")

    rec = sub.add_parser("recover", parents=[common, function], help="run the period-recovery loop")
    rec.add_argument("--Q", type=_q_value, default="auto")
    rec.add_argument("--n-max", type=_positive_int)
    rec.add_argument("--max-iters", type=_positive_int, default=50)
    rec.add_argument("--eps", type=float)
    rec.add_argument("--mode", choices=("grid", "ideal"), default="ideal")
    rec.add_argument("--M", type=_positive_int, default=64)
    rec.add_argument("--W", type=_positive_int, default=16)
    rec.add_argument("--weighting", choices=("register", "coefficient"), default="register")
    rec.add_argument("--period-bound", type=_positive_int)
    rec.add_argument("--precision", type=float, help="interval width; selects the irrational procedure")

    ver = sub.add_parser("verify-appendix", parents=[common], help="check the coprimality bounds")
    ver.add_argument("--a", type=_positive_int, required=True)
    ver.add_argument("--N", type=_positive_int, required=True)
    ver.add_argument("--exhaustive", action="store_true")
    ver.add_argument("--trials", type=_positive_int, default=100_000)
    ver.add_argument("--scan", type=int, help="also scan phi(a) ln ln a / a up to this a")

    fou = sub.add_parser("fourier", parents=[common, function], help="c_n table and reconstruction errors")
    fou.add_argument("--n-max", type=_positive_int, default=16)
    fou.add_argument("--terms", default="25,50,100,200,400")
    fou.add_argument("--points", type=_positive_int, default=1000)
    fou.add_argument("--errors-out")
    return parser


def read_config(path: str) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.replace("_", "-")] = value
    return values


def _config_argv(values: dict) -> list:
    argv = []
    for key, value in values.items():
        if key == "config":
            continue
        if key in BOOL_KEYS:
            if value.lower() in ("1", "true", "yes", "on"):
                argv.append(f"--{key}")
        else:
            argv.extend([f"--{key}", value])
    return argv


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        # file values first so explicit flags win
        extra = _config_argv(read_config(args.config))
        args = parser.parse_args([argv[0], *extra, *argv[1:]])
    return args


def build_spec(args):
    if args.function == "tabulated":
        if not args.table:
            raise UsageError("--function tabulated needs --table")
        return load_tabulated_csv(args.table)
    period = parse_period(args.period)
    if args.function == "sawtooth":
        return sawtooth(period, args.amplitude)
    if args.function == "triangle":
        return triangle(period, args.amplitude)
    if args.function == "square":
        return square(period, 0.0, args.amplitude)
    if args.function == "cos":
        return cosine(period)
    return constant(args.amplitude, period)


def _write(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_text(rows) -> str:
    buf = io.StringIO()
    write_distribution_csv(rows, buf)
    return buf.getvalue()


def cmd_simulate(args) -> int:
    spec = build_spec(args)
    if not is_rational(spec.period):
        raise UsageError("simulate exports exact frequencies and needs a rational period")
    rng = np.random.default_rng(args.seed)
    if args.mode == "grid":
        dist = left_register_distribution(apply_fourier(prepare_superposition(spec, args.M, args.W)))
        rows = distribution_rows(dist, threshold=1e-15)
        by_y = dist.over_y()
        draw = lambda: measure_observable(by_y, args.Q, rng)  # noqa: E731
    else:
        n_max = args.n_max or default_n_max(spec.period)
        rows = lattice_rows(spec, n_max, args.weighting)
        draw = lambda: ideal_lattice_sample(spec, n_max, args.Q, rng, args.weighting)  # noqa: E731

    if args.json:
        table = json.dumps({"rows": [
            {"k": k, "y_numer": y.numerator, "y_denom": y.denominator, "probability": p} for k, y, p in rows
        ]}) + "\n"
    else:
        table = _csv_text(rows)
    if args.samples > 0:
        lines = "".join(json.dumps(draw().to_json()) + "\n" for _ in range(args.samples))
        sys.stdout.write(lines)
        if args.out:
            with open(args.out, "w", newline="") as fh:
                fh.write(table)
    else:
        _write(args, table)
    return EXIT_OK


def cmd_recover(args) -> int:
    spec = build_spec(args)
    config = RecoveryConfig(
        Q=args.Q, n_max=args.n_max, epsilon_period=args.eps, max_iterations=args.max_iters,
        seed=args.seed, mode=args.mode, weighting=args.weighting, M=args.M, W=args.W,
        period_bound=args.period_bound,
    )
    if is_rational(spec.period) and args.precision is None:
        result = recover_rational_period(spec, config)
    else:
        precision = args.precision if args.precision is not None else 1e-6
        result = recover_irrational_period(spec, precision, config)
    _write(args, json.dumps(result.to_json()) + "\n")
    if not result.success:
        print("period not found within the iteration budget", file=sys.stderr)
        return EXIT_NOT_FOUND
    return EXIT_OK


def cmd_verify_appendix(args) -> int:
    report = appendix.verify_appendix(args.a, args.N, args.exhaustive, args.trials, args.seed)
    if args.scan is not None:
        scan = appendix.phi_ratio_scan(args.scan)
        report["phi_ratio_scan"] = {
            "a_max": args.scan,
            "minimum": {"a": scan.minimum[0], "ratio": scan.minimum[1]},
            "primorials": [{"a": a, "phi": phi, "ratio": r} for a, phi, r in scan.primorial_rows],
            "exp_minus_gamma": appendix.EXP_MINUS_GAMMA,
        }
    _write(args, json.dumps(report) + "\n")
    return EXIT_OK if report["all_pass"] else EXIT_NOT_FOUND


def cmd_fourier(args) -> int:
    spec = build_spec(args)
    comb = fourier_transform(spec, args.n_max)
    try:
        terms = [int(t) for t in args.terms.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"--terms must be comma-separated integers, got {args.terms!r}") from None
    P = spec.period_value
    # midpoints of a uniform grid avoid landing on sawtooth/square jumps
    x = spec.origin + P * (np.arange(args.points) + 0.5) / args.points
    truth = evaluate(spec, x)
    errors = [(n, float(np.max(np.abs(reconstruct(spec, x, n) - truth)))) for n in terms]

    if args.json:
        coeff_text = json.dumps({
            "coefficients": [{"n": n, "re": c.real, "im": c.imag} for n, c in sorted(comb.coefficients.items())],
            "reconstruction_error": [{"n_terms": n, "max_error": e} for n, e in errors],
        }) + "\n"
        _write(args, coeff_text)
        return EXIT_OK

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "re", "im", "abs"])
    for n, c in sorted(comb.coefficients.items()):
        writer.writerow([n, repr(c.real), repr(c.imag), repr(abs(c))])
    _write(args, buf.getvalue())
    err_buf = io.StringIO()
    writer = csv.writer(err_buf, lineterminator="\n")
    writer.writerow(["n_terms", "max_error"])
    for n, e in errors:
        writer.writerow([n, repr(e)])
    if args.errors_out:
        with open(args.errors_out, "w", newline="") as fh:
            fh.write(err_buf.getvalue())
    else:
        sys.stderr.write(err_buf.getvalue())
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "recover": cmd_recover,
    "verify-appendix": cmd_verify_appendix,
    "fourier": cmd_fourier,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
        return COMMANDS[args.command](args)
    except (UsageError, ValueError, OSError) as exc:
        print(f"cvshor: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
