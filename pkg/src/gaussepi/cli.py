"""Command-line front end.

Subcommands read states from JSON files, run the randomized validation
sweeps and print capacity tables. CSV output carries 12 significant digits
and ``#`` comment lines echoing the configuration.

Exit status: 0 on success, 1 on bad input, 2 when an invariant check fails.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .capacity import SweepRecord, capacity_sweep, to_units
from .epi import KINDS, EpiSweepRecord, epi_sweep, perturb_check_first_infinite, perturb_check_first_infinitesimal
from .epi import perturb_check_zeroth
from .exceptions import InvariantViolation, PreconditionError, ValidationError
from .fisher import DebruijnRecord, debruijn_sweep, random_bipartite_state
from .fock import ORACLE_TOL, oracle_residuals
from .state import GaussianState, conditional_entropy, entropy, reduce
from .symplectic import random_gaussian_covariance, symplectic_eigenvalues, symplectic_gap, validate_covariance

RICHARDSON_RANGE = (3.5, 4.5)
DEBRUIJN_TOL = 1e-8


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors map to exit 1, not argparse's default 2
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def parse_grid(text):
    """``"a:b:n"`` to ``n`` evenly spaced points from ``a`` to ``b`` inclusive."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError(f"grid {text!r} must look like start:stop:count")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ValidationError(f"grid {text!r}: {exc}") from None
    if count < 1 or not (np.isfinite(start) and np.isfinite(stop)):
        raise ValidationError(f"grid {text!r} must be finite with a positive count")
    return np.linspace(start, stop, count)


def _fmt(value):
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.12g}"


def _json_value(value):
    if isinstance(value, (int, np.integer, bool)) or value is None:
        return value
    value = float(value)
    if not np.isfinite(value):
        return None
    return float(f"{value:.12g}")


def _config_lines(config):
    return [f"# {key}={value}" for key, value in config.items()]


def _emit_table(fields, rows, config, fmt, output):
    if fmt == "json":
        payload = {
            "config": config,
            "records": [{k: _json_value(v) for k, v in zip(fields, row)} for row in rows],
        }
        text = json.dumps(payload, indent=2) + "\n"
    else:
        lines = _config_lines(config) + [",".join(fields)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        text = "\n".join(lines) + "\n"
    _write(text, output)


def _emit_json(obj, output=None):
    _write(json.dumps(obj, indent=2) + "\n", output)


def _write(text, output):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _load_state(path, validate=True):
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from None
    try:
        return GaussianState.from_dict(data, validate=validate)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"{path} is not a state file: {exc}") from None


def cmd_validate(args):
    state = _load_state(args.state, validate=False)
    report = validate_covariance(state.cov, tol=args.tol)
    _emit_json(
        {
            "ok": report.ok,
            "min_eigenvalue": report.min_eigenvalue,
            "asymmetry": report.asymmetry,
            "n_modes": state.n_modes,
        }
    )
    if not report.ok:
        print(f"uncertainty violation: min eig(M + iJ) = {report.min_eigenvalue:.6g}", file=sys.stderr)
        return 1
    return 0


def cmd_spectrum(args):
    state = _load_state(args.state)
    spectrum = symplectic_eigenvalues(state.cov)
    _emit_json(
        {
            "symplectic_eigenvalues": [_json_value(x) for x in spectrum],
            "gap": _json_value(symplectic_gap(spectrum)),
        }
    )
    return 0


def _parse_conditional(text, state):
    if "|" not in text:
        target, condition = text, ""
    else:
        target, condition = text.split("|", 1)
    target = [s for s in target.split(",") if s]
    condition = [s for s in condition.split(",") if s]
    unknown = [n for n in target + condition if n not in state.names]
    if unknown or not target:
        raise ValidationError(f"bad --conditional {text!r}; subsystems are {list(state.names)}")
    return target, condition


def cmd_entropy(args):
    state = _load_state(args.state)
    units = "bits" if args.bits else "nats"
    out = {
        "units": units,
        "entropy": _json_value(to_units(entropy(state), units)),
        "subsystems": {n: _json_value(to_units(entropy(reduce(state, n)), units)) for n in state.names},
    }
    if args.conditional:
        target, condition = _parse_conditional(args.conditional, state)
        out["conditional"] = {
            "target": target,
            "condition": condition,
            "value": _json_value(to_units(conditional_entropy(state, target, condition), units)),
        }
    _emit_json(out)
    return 0


def _check_count(count):
    if count < 1:
        raise ValidationError("--count must be positive")


def cmd_epi_check(args):
    _check_count(args.count)
    if args.modes < 1 or args.env < 0:
        raise ValidationError("--modes must be >= 1 and --env >= 0")
    records = epi_sweep(args.seed, args.count, args.modes, args.env, lam=args.lam, kind=args.kind)
    config = {
        "command": "epi-check",
        "seed": args.seed,
        "count": args.count,
        "modes": args.modes,
        "env": args.env,
        "lambda": "random" if args.lam is None else args.lam,
        "kind": args.kind,
        "units": "nats",
    }
    _emit_table(EpiSweepRecord.FIELDS, [r.values() for r in records], config, args.format, args.output)
    bad = [r.seed for r in records if r.violated]
    if bad:
        print(f"invariant violation for seeds {bad}", file=sys.stderr)
        return 2
    return 0


def cmd_debruijn_check(args):
    _check_count(args.count)
    records = debruijn_sweep(args.seed, args.count, args.modes, args.env)
    config = {"command": "debruijn-check", "seed": args.seed, "count": args.count, "units": "nats"}
    _emit_table(DebruijnRecord.FIELDS, [r.values() for r in records], config, args.format, args.output)
    lo, hi = RICHARDSON_RANGE
    bad = [r.seed for r in records if r.exact_residual > DEBRUIJN_TOL or not lo <= r.richardson_ratio <= hi]
    if bad:
        print(f"invariant violation for seeds {bad}", file=sys.stderr)
        return 2
    return 0


def cmd_perturb_check(args):
    if args.modes < 1 or args.env < 0:
        raise ValidationError("--modes must be >= 1 and --env >= 0")
    if args.eps is not None and args.eps <= 0:
        raise ValidationError("--eps must be positive")
    if args.lemma == "2":
        M = random_gaussian_covariance(args.seed, args.modes + args.env)
        report = perturb_check_zeroth(M, 1e-3 if args.eps is None else args.eps)
    elif args.lemma == "3i":
        if args.env < 1:
            raise ValidationError("lemma 3i needs --env >= 1")
        M = random_gaussian_covariance(args.seed, args.modes + args.env)
        report = perturb_check_first_infinite(M, args.modes, 1e-3 if args.eps is None else args.eps)
    else:
        state = random_bipartite_state(args.seed, args.modes, args.env)
        report = perturb_check_first_infinitesimal(state, "A", args.eps)
    out = {"lemma": args.lemma, "seed": args.seed, "modes": args.modes, "env": args.env}
    out.update(report.to_dict())
    _emit_json(out, args.output)
    if report.cluster_counts_match is False:
        print("invariant violation: cluster counts differ from multiplicities", file=sys.stderr)
        return 2
    return 0


def cmd_capacity(args):
    if (args.lambda_grid is None) == (args.lam is None) or (args.N_grid is None) == (args.N is None):
        raise ValidationError("give exactly one of --lambda-grid/--lambda and one of --N/--N-grid")
    lams = parse_grid(args.lambda_grid) if args.lambda_grid else np.array([args.lam])
    Ns = parse_grid(args.N_grid) if args.N_grid else np.array([args.N])
    units = "bits" if args.bits else "nats"
    records = capacity_sweep(lams, Ns, args.NE)
    rows = [r.values()[:3] + tuple(to_units(v, units) for v in r.values()[3:]) for r in records]
    config = {
        "command": "capacity",
        "lambda_grid": args.lambda_grid or args.lam,
        "N": args.N_grid or args.N,
        "N_E": args.NE,
        "units": units,
    }
    _emit_table(SweepRecord.FIELDS, rows, config, args.format, args.output)
    return 0


def cmd_oracle(args):
    residuals = oracle_residuals()
    _emit_json({"tolerance": ORACLE_TOL, "residuals": residuals})
    if max(residuals.values()) > ORACLE_TOL:
        print("invariant violation: oracle disagreement", file=sys.stderr)
        return 2
    return 0


def build_parser():
    parser = _Parser(prog="gaussepi", description="Gaussian-state entropy and capacity checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="covariance validity report")
    p.add_argument("state", help="state JSON file")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("spectrum", help="symplectic eigenvalues and gap")
    p.add_argument("state")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("entropy", help="total, marginal and conditional entropies")
    p.add_argument("state")
    p.add_argument("--conditional", metavar="A|B", help="comma-separated subsystem names, target|condition")
    p.add_argument("--bits", action="store_true", help="report in bits instead of nats")
    p.set_defaults(func=cmd_entropy)

    def sweep_opts(p, modes_default, env_default):
        p.add_argument("--seed", type=int, required=True)
        p.add_argument("--count", type=int, required=True)
        p.add_argument("--modes", type=int, default=modes_default)
        p.add_argument("--env", type=int, default=env_default)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", help="write here instead of stdout")

    p = sub.add_parser("epi-check", help="conditional EPI sweep over random instances")
    sweep_opts(p, 1, 0)
    p.add_argument("--lambda", dest="lam", type=float, help="fixed transmissivity (default: random per instance)")
    p.add_argument("--kind", choices=KINDS, default="general")
    p.set_defaults(func=cmd_epi_check)

    p = sub.add_parser("debruijn-check", help="entropy rate versus Fisher information")
    sweep_opts(p, None, None)
    p.set_defaults(func=cmd_debruijn_check)

    p = sub.add_parser("perturb-check", help="perturbative symplectic spectra")
    p.add_argument("--lemma", choices=("2", "3i", "3ii"), required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--eps", type=float)
    p.add_argument("--modes", type=int, default=1)
    p.add_argument("--env", type=int, default=1)
    p.add_argument("--output")
    p.set_defaults(func=cmd_perturb_check)

    p = sub.add_parser("capacity", help="capacity and bounds table")
    p.add_argument("--lambda-grid", metavar="A:B:N")
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--N", type=float)
    p.add_argument("--N-grid", metavar="A:B:N")
    p.add_argument("--NE", type=float, required=True)
    p.add_argument("--bits", action="store_true")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("oracle", help="number-basis agreement residuals")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None):
    """Entry point; returns the exit status."""
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2
    except (UsageError, ValidationError, PreconditionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
