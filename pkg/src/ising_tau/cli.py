"""Command-line front end.

    ising-tau painleve --s0 10 --s-min 0.05
    ising-tau tau2 --mass -1 --r-min 0.5 --r-max 6
    ising-tau spinor --mass -1 --points 0,0 2,0
    ising-tau deform --mass -1 --points 0,0 6,0 --to 0,0 2,0
    ising-tau npoint --mass -1 --points 0,0 1,0
    ising-tau validate --level quick

Options may also come from ``--config FILE`` holding ``key = value`` lines
(keys as the long option names); flags given on the command line win.
Exit status: 0 success, 2 invalid configuration, 3 numerical failure; on
failure a JSON object describing the error is written to standard error.
"""

import argparse
import json
import os
import sys

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3

THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


class ConfigError(Exception):
    pass


def _limit_threads():
    cap = os.environ.get("ISING_TAU_THREADS")
    if not cap:
        return
    try:
        n = int(cap)
    except ValueError as exc:
        raise ConfigError("ISING_TAU_THREADS must be a positive integer") from exc
    if n < 1:
        raise ConfigError("ISING_TAU_THREADS must be a positive integer")
    # only effective before numpy loads its BLAS, which main() guarantees
    for var in THREAD_VARS:
        os.environ[var] = str(n)


def _point(text):
    try:
        re, im = (float(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected re,im but got {text!r}") from exc
    return complex(re, im)


def _negative(text):
    m = float(text)
    if not m < 0:
        raise argparse.ArgumentTypeError("mass must be negative")
    return m


def _positive(text):
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError("value must be positive")
    return x


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser():
    p = _Parser(prog="ising-tau", description="Massive Ising scaling functions and spinors.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, fmt="csv"):
        sp.add_argument("--config", help="key=value file of default options")
        sp.add_argument("--output", "-o", help="output file (default: standard output)")
        sp.add_argument("--format", choices=("csv", "json"), default=fmt)

    sp = sub.add_parser("painleve", help="table of the Painlevé III transcendent")
    common(sp)
    sp.add_argument("--s0", type=float, default=10.0, help="seed radius (>= 8)")
    sp.add_argument("--s-min", type=_positive, default=0.05)
    sp.add_argument("--count", type=int, default=200, help="number of table rows")
    sp.add_argument("--tol", type=float, default=1e-12)

    sp = sub.add_parser("tau2", help="two-point scaling functions")
    common(sp)
    sp.add_argument("--mass", type=_negative, default=-1.0)
    sp.add_argument("--r-min", type=_positive, default=0.5)
    sp.add_argument("--r-max", type=_positive, default=6.0)
    sp.add_argument("--count", type=int, default=56)
    sp.add_argument("--s0", type=float, default=10.0)
    sp.add_argument("--normalization", choices=("scaled", "absolute"), default="scaled")

    sp = sub.add_parser("spinor", help="coefficient matrices of the spinors")
    common(sp, "json")
    sp.add_argument("--mass", type=_negative, default=-1.0)
    sp.add_argument("--points", type=_point, nargs="+", required=True, metavar="RE,IM")
    sp.add_argument("--tol", type=float, default=1e-6)

    sp = sub.add_parser("deform", help="carry coefficients along a path of point positions")
    common(sp, "json")
    sp.add_argument("--mass", type=_negative, default=-1.0)
    sp.add_argument("--points", type=_point, nargs="+", required=True, metavar="RE,IM")
    sp.add_argument("--to", type=_point, nargs="+", metavar="RE,IM",
                    help="end positions (straight path)")
    sp.add_argument("--rotate", type=float, help="rotate about 0 by this angle instead")
    sp.add_argument("--input", help="CoefficientSet JSON at the start (default: solve)")
    sp.add_argument("--rtol", type=float, default=1e-9)

    sp = sub.add_parser("npoint", help="radial integral of the diagonal of [𝓐]")
    common(sp, "json")
    sp.add_argument("--mass", type=_negative, default=-1.0)
    sp.add_argument("--points", type=_point, nargs="+", required=True, metavar="RE,IM")
    sp.add_argument("--t-max", type=float, default=None)
    sp.add_argument("--epsabs", type=float, default=1e-6)

    sp = sub.add_parser("validate", help="run the cross-route checks")
    sp.add_argument("--config", help="key=value file of default options")
    sp.add_argument("--level", choices=("quick", "full"), default="quick")
    return p


def _read_config(path):
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    for num, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{num}: expected key = value")
        key, val = (x.strip() for x in line.split("=", 1))
        out[key.replace("-", "_")] = val
    return out


def parse_args(argv):
    """Parse flags, filling unset options from --config."""
    parser = build_parser()
    argv = list(argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv[1:])
    command = argv[0] if argv else None
    choices = parser._subparsers._group_actions[0].choices
    if not known.config or command not in choices:
        return parser.parse_args(argv)
    values = _read_config(known.config)
    actions = {a.dest: a for a in choices[command]._actions}
    # rebuild the command line: file options first, explicit flags after, so flags win
    prefix = [command]
    for key, val in values.items():
        act = actions.get(key)
        if act is None or key in ("config", "help"):
            raise ConfigError(f"unknown config key {key!r} for {command}")
        prefix.append(act.option_strings[-1] if act.option_strings[-1].startswith("--")
                      else act.option_strings[0])
        prefix.extend(val.split() if act.nargs in ("+", "*") else [val])
    return parser.parse_args(prefix + argv[1:])


# ---- commands ---------------------------------------------------------------

def _cmd_painleve(args):
    import numpy as np

    from .painleve3 import integrate_inward

    sol = integrate_inward(args.s0, args.s_min, tol=args.tol)
    s = np.linspace(args.s0, args.s_min, args.count)
    if args.format == "csv":
        return sol.to_csv(s)
    rows = [{"s": float(x), "eta": sol.eta_at(x), "eta_prime": sol.eta_prime_at(x),
             "h": sol.h_at(x), "beta": sol.beta_at(x)} for x in s]
    return json.dumps({"seed_radius": args.s0, "max_residual": sol.max_residual(),
                       "rows": rows}, indent=2) + "\n"


def _cmd_tau2(args):
    import numpy as np

    from .painleve3 import integrate_inward, scaling_table

    if not args.r_min < args.r_max:
        raise ConfigError("r-min must be below r-max")
    s_min = min(0.05, 0.5 * abs(args.mass) * args.r_min)
    s0 = max(args.s0, abs(args.mass) * args.r_max)
    sol = integrate_inward(s0, s_min)
    table = scaling_table(np.linspace(args.r_min, args.r_max, args.count), args.mass, sol,
                          args.normalization)
    if args.format == "csv":
        return table.to_csv()
    rows = [dict(zip(("r", "plus", "free", "ratio"), map(float, row)))
            for row in zip(table.r, table.plus, table.free, table.ratio)]
    return json.dumps({"mass": table.mass, "normalization": table.normalization,
                       "error_bound": table.error_bound, "rows": rows}, indent=2) + "\n"


def _solve(points, mass, tol=1e-6):
    from .spinor_solver import PointConfiguration, coefficients, solve_spinors

    return coefficients(solve_spinors(PointConfiguration(tuple(points)), mass, tol=tol))


def _cmd_spinor(args):
    if args.format != "json":
        raise ConfigError("spinor output is JSON only")
    return _solve(args.points, args.mass, args.tol).to_json(indent=2) + "\n"


def _cmd_deform(args):
    import numpy as np

    from .isomonodromy import LinearPath, PathReport, RotationPath, integrate_path
    from .spinor_solver import CoefficientSet

    if args.format != "json":
        raise ConfigError("deform output is JSON only")
    start = np.asarray(args.points, dtype=complex)
    if (args.to is None) == (args.rotate is None):
        raise ConfigError("give exactly one of --to and --rotate")
    if args.to is not None:
        if len(args.to) != len(start):
            raise ConfigError("--to needs as many points as --points")
        path = LinearPath(start, np.asarray(args.to, dtype=complex))
    else:
        path = RotationPath(start, args.rotate)
    if args.input:
        with open(args.input, encoding="utf-8") as fh:
            initial = CoefficientSet.from_json(fh.read())
    else:
        initial = _solve(args.points, args.mass)
    report = PathReport()
    end = integrate_path(initial, path, args.mass, rtol=args.rtol, report=report)
    doc = {"endpoint": end.to_dict(),
           "report": {"accepted_steps": report.accepted, "rejected_steps": report.rejected,
                      "invariant_drift": report.max_drift}}
    return json.dumps(doc, indent=2) + "\n"


def _cmd_npoint(args):
    import numpy as np

    from .painleve3 import n_point_log_derivative, radial_family

    if args.format != "json":
        raise ConfigError("npoint output is JSON only")
    pts = np.asarray(args.points, dtype=complex)
    res = n_point_log_derivative(radial_family(pts, args.mass), pts, args.mass,
                                 t_max=args.t_max, epsabs=args.epsabs, details=True)
    doc = {"mass": args.mass, "points": [[p.real, p.imag] for p in pts],
           "log_derivative_integral": res.value, "log_scaling": res.log_scaling(len(pts), args.mass),
           "tail": res.tail, "tail_bound": res.tail_bound,
           "quadrature_error": res.quadrature_error, "t_max": res.t_max,
           "evaluations": res.evaluations}
    return json.dumps(doc, indent=2) + "\n"


def _cmd_validate(args):
    from .validation import run_suite

    results = run_suite(args.level, log=lambda line: print(line, flush=True))
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    if failed:
        from .errors import NumericalFailure
        raise NumericalFailure(f"{len(failed)} validation check(s) failed: "
                               + "; ".join(r.name for r in failed))
    return None


COMMANDS = {
    "painleve": _cmd_painleve,
    "tau2": _cmd_tau2,
    "spinor": _cmd_spinor,
    "deform": _cmd_deform,
    "npoint": _cmd_npoint,
    "validate": _cmd_validate,
}


def _fail(code, kind, message):
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}) + "\n")
    return code


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        _limit_threads()
        args = parse_args(argv)
    except ConfigError as exc:
        return _fail(EXIT_INVALID, "ConfigError", str(exc))
    from .errors import InvalidInput, NumericalFailure

    try:
        text = COMMANDS[args.command](args)
    except ConfigError as exc:
        return _fail(EXIT_INVALID, "ConfigError", str(exc))
    except InvalidInput as exc:
        return _fail(EXIT_INVALID, type(exc).__name__, str(exc))
    except NumericalFailure as exc:
        return _fail(EXIT_NUMERICAL, type(exc).__name__, str(exc))
    if text is not None:
        out = getattr(args, "output", None)
        if out:
            with open(out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
