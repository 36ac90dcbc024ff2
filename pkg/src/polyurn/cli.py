"""Command-line front end.

    polyurn regime   --model 2,1,1,2 --init 1,1
    polyurn simulate --model 2,1,1,2 --init 1,1 -n 1000 --seed 7 -o path.csv
    polyurn moments  --model 4,1,1,4 --init 1,1 -n 100
    polyurn verify   --all --seed 42 -o reports.jsonl

Exit codes: 0 success, 1 a gating check failed, 2 usage or domain error.
"""

import argparse
import contextlib
import json
import os
import sys

from . import formulas, verify
from .errors import UrnError
from .model import Regime, build_model, log_checkpoints, simulate
from .rng import RandomStream

SEED_ENV = "POLYURN_SEED"
DEFAULT_SEED = 20240601


class UsageError(Exception):
    pass


def _ints(text, count, what):
    try:
        vals = [int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"{what} must be {count} comma-separated integers, got {text!r}") from None
    if len(vals) != count:
        raise UsageError(f"{what} must be {count} comma-separated integers, got {text!r}")
    return vals


def _model(args):
    if args.model is None or args.init is None:
        raise UsageError("--model a,b,c,d and --init alpha,beta are required")
    return build_model(*_ints(args.model, 4, "--model"), *_ints(args.init, 2, "--init"))


def resolve_seed(seed):
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env, 0)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return DEFAULT_SEED


@contextlib.contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _asymptote_line(model):
    reg = model.regime
    if reg is Regime.TRADITIONAL:
        return "w_n asymptote: not applicable (b + c = 0)"
    c = formulas.w_asymptote(model)
    if reg is Regime.SMALL:
        return f"w_n ~ {c:.10g} * n^({1 - 2 * model.sigma})"
    if reg is Regime.CRITICAL:
        return f"w_n ~ {c:.10g} * log n"
    return f"w_n -> {c:.10g}"


def cmd_regime(args):
    model = _model(args)
    print(f"{model.regime.value} (σ = {model.sigma})")
    print(_asymptote_line(model))
    return 0


def cmd_simulate(args):
    model = _model(args)
    seed = resolve_seed(args.seed)
    print(f"seed = {seed}", file=sys.stderr)
    ck = log_checkpoints(args.horizon, args.per_decade) if args.per_decade else None
    traj = simulate(model, args.horizon, RandomStream(seed, args.stream), ck)
    with _output(args.out) as fh:
        traj.write_csv(fh)
    return 0


def cmd_moments(args):
    model = _model(args)
    report = formulas.moment_report(model, args.horizon)
    with _output(args.out) as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
    return 0


def _single_model_checks(model, names, args, seed):
    p = verify.PROFILES[args.profile]
    n = args.horizon
    reports = []
    for name in names:
        s = verify.derive_seed(seed, name)
        if name == "oracle":
            reports.append(verify.check_oracle([model], n or p["oracle"]))
        elif name == "beta":
            reports.append(verify.check_beta_limit(model, n or p["beta"][0], args.reps or p["beta"][1], s))
        elif name == "tradclt":
            n0 = n or p["tradclt"][0]
            reports.append(verify.check_traditional_clt(
                model, n0, args.proxy_horizon or verify.PROXY_RATIO * n0, args.reps or p["tradclt"][2], s))
        elif name == "clt":
            reports.append(verify.check_clt(model, n or p["clt"][0], args.reps or p["clt"][1], s))
        elif name == "qsl":
            reports.append(verify.check_qsl(model, n or p["qsl"], s))
        elif name == "lil":
            reports.append(verify.lil_diagnostic(model, n or p["qsl"], s))
        elif name == "large":
            reports.append(verify.check_large_urn(model, n or p["large"][0], args.reps or p["large"][1], s,
                                                  p["large"][2]))
    return reports


def cmd_verify(args):
    seed = resolve_seed(args.seed)
    if args.all:
        names = list(verify.CHECKS)
    elif args.check:
        names = [c.strip() for c in args.check.split(",")]
        bad = [c for c in names if c not in verify.CHECKS]
        if bad:
            raise UsageError(f"unknown check {bad[0]!r}; choose from {', '.join(verify.CHECKS)}")
    else:
        raise UsageError("give --all or --check NAME[,NAME...]")
    print(f"seed = {seed}", file=sys.stderr)
    if args.model is not None:
        reports = _single_model_checks(_model(args), names, args, seed)
    else:
        reports = verify.run_suite(seed, names, args.profile)
    with _output(args.out) as fh:
        for r in reports:
            fh.write(r.to_json() + "\n")
    failed = 0
    for r in reports:
        status = "diag" if r.passed is None else ("PASS" if r.passed else "FAIL")
        failed += r.passed is False
        print(f"{status:4}  {r.name:8} statistic={r.statistic:.6g} reference={r.reference:.6g}",
              file=sys.stderr)
    return 1 if failed else 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", help="replacement matrix row-major: a,b,c,d")
    common.add_argument("--init", help="initial composition: alpha,beta")

    parser = argparse.ArgumentParser(prog="polyurn", description="Balanced two-colour Pólya urns.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("regime", parents=[common], help="classify the urn and print the w_n asymptote")
    p.set_defaults(func=cmd_regime)

    p = sub.add_parser("simulate", parents=[common], help="simulate one trajectory to CSV (n,X,Y)")
    p.add_argument("-n", "--horizon", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--per-decade", type=int, default=0,
                   help="log-spaced checkpoints per decade (default: every step)")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("moments", parents=[common], help="closed-form quantities as JSON")
    p.add_argument("-n", "--horizon", type=int, required=True)
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("verify", parents=[common], help="run verification checks (JSON lines)")
    p.add_argument("--all", action="store_true")
    p.add_argument("--check", help=f"comma-separated subset of: {', '.join(verify.CHECKS)}")
    p.add_argument("--seed", type=int)
    p.add_argument("--profile", choices=sorted(verify.PROFILES), default="full")
    p.add_argument("-n", "--horizon", type=int, help="horizon for single-model checks")
    p.add_argument("--reps", type=int)
    p.add_argument("--proxy-horizon", type=int, help="N standing in for infinity in tradclt")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"polyurn: error: {exc}", file=sys.stderr)
        return 2
    except (UrnError, ValueError) as exc:
        print(f"polyurn: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
