"""Command-line entry point: ``wreathdim {compute,verify,diagnose}``."""

from __future__ import annotations

import argparse
import re
import sys
from dataclasses import dataclass
from fractions import Fraction

from .arithmetic import DEFAULT_PRECISION, DEFAULT_THRESHOLD, MIN_PRECISION
from .construction import explicit_layers, expected_order, layer_recursion, verify_layer
from .dimension import claim_diagnostics, dimension_trace, format_diagnostics, format_from_log
from .errors import SelectionInfeasibleError, ValidationError, WreathDimError
from .permgroup import DEFAULT_ENUMERATION_CAP, DEFAULT_MAX_POINTS
from .sequences import SequenceSpec, goodness_check, load_sequence_spec

_ALPHA_RE = re.compile(r"^\s*(\d+)\s*(?:/\s*(\d+)\s*)?$")
# points x elements budget for brute-force order checks
_ORDER_WORK_BUDGET = 1 << 26


@dataclass(frozen=True)
class RunConfig:
    command: str
    seq: SequenceSpec
    alpha: Fraction
    levels: int
    precision: int
    threshold: int
    max_points: int
    order_cap: int
    out: str | None
    c_list: tuple[Fraction, ...]


def parse_alpha(text: str) -> Fraction:
    """``p/q`` (or an integer) with ``0 <= p/q <= 1``; decimals are refused."""
    match = _ALPHA_RE.match(text)
    if not match:
        raise ValidationError(f"alpha must be an exact fraction p/q, got {text!r}")
    p, q = int(match.group(1)), int(match.group(2) or 1)
    if q == 0:
        raise ValidationError("alpha has a zero denominator")
    alpha = Fraction(p, q)
    if alpha > 1:
        raise ValidationError(f"alpha must lie in [0, 1], got {alpha}")
    return alpha


def parse_c_list(text: str) -> tuple[Fraction, ...]:
    values = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            value = Fraction(part)
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"bad constant {part!r} in --c-list") from None
        if value <= 0:
            raise ValidationError(f"constants in --c-list must be positive, got {part}")
        values.append(value)
    if not values:
        raise ValidationError("--c-list is empty")
    return tuple(values)


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _non_negative_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("sequence")
    src.add_argument("--family", choices=["sym", "alt", "cyc"], help="named family for every level")
    src.add_argument("--degree", type=_positive_int, help="constant degree of the family")
    src.add_argument("--degree-formula", metavar="EXPR", help="degree at level k, e.g. 'k+2'")
    src.add_argument("--spec", metavar="FILE", help="YAML sequence file")
    common.add_argument("--alpha", required=True, help="target as an exact fraction p/q")
    common.add_argument("--levels", type=_positive_int, default=5, help="number of levels (default 5)")
    common.add_argument("--precision", type=_positive_int, default=DEFAULT_PRECISION,
                        help=f"working precision in bits (default {DEFAULT_PRECISION})")
    common.add_argument("--threshold", type=_non_negative_int, default=DEFAULT_THRESHOLD,
                        help="bit length beyond which integers are carried as logarithms")
    common.add_argument("--max-points", type=_positive_int, default=DEFAULT_MAX_POINTS,
                        help="largest product domain built explicitly")
    common.add_argument("--order-cap", type=_positive_int, default=DEFAULT_ENUMERATION_CAP,
                        help="largest group enumerated by brute force")
    common.add_argument("--out", metavar="FILE", help="write the CSV trace here")
    common.add_argument("--c-list", default="2", help="comma-separated constants C for M(C)")

    parser = argparse.ArgumentParser(prog="wreathdim", description="Dimension quotients of layered wreath subgroups.")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("compute", parents=[common], help="tabulate D_n and residuals as CSV")
    sub.add_parser("verify", parents=[common], help="check explicit groups against the recursion")
    sub.add_parser("diagnose", parents=[common], help="goodness, growth and claim diagnostics")
    return parser


def _sequence_from_args(args) -> SequenceSpec:
    if args.spec:
        if args.family or args.degree or args.degree_formula:
            raise ValidationError("--spec cannot be combined with --family/--degree/--degree-formula")
        return load_sequence_spec(args.spec)
    if not args.family:
        raise ValidationError("give --spec FILE or --family with --degree/--degree-formula")
    if (args.degree is None) == (args.degree_formula is None):
        raise ValidationError("--family needs exactly one of --degree and --degree-formula")
    if args.degree is not None:
        return SequenceSpec.constant(args.family, args.degree)
    return SequenceSpec.family_formula(args.family, args.degree_formula)


def config_from_args(args) -> RunConfig:
    if args.precision < MIN_PRECISION:
        raise ValidationError(f"--precision must be at least {MIN_PRECISION}")
    return RunConfig(args.command, _sequence_from_args(args), parse_alpha(args.alpha), args.levels,
                     args.precision, args.threshold, args.max_points, args.order_cap, args.out,
                     parse_c_list(args.c_list))


def cmd_compute(cfg: RunConfig, out=sys.stdout, err=sys.stderr) -> int:
    layers = layer_recursion(cfg.seq, cfg.alpha, cfg.levels, prec=cfg.precision, threshold=cfg.threshold,
                             order_cap=cfg.order_cap)
    trace = dimension_trace(layers, cfg.alpha, cfg.seq)
    text = trace.to_csv()
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
        report = out
    else:
        out.write(text)
        report = err
    last = trace.final
    print(f"D_{last.n} = {last.D!r}", file=report)
    print(f"residual = {format_from_log(last.residual_log)}", file=report)
    print(f"error bound = {format_from_log(last.error_log)}", file=report)
    return 0


def cmd_verify(cfg: RunConfig, out=sys.stdout, err=sys.stderr) -> int:
    try:
        layers = explicit_layers(cfg.seq, cfg.alpha, cfg.max_points, levels=cfg.levels)
    except SelectionInfeasibleError as exc:
        print(f"selection infeasible at level {exc.level}: need {exc.count} orbits, "
              f"block sizes {exc.block_sizes}", file=err)
        return exc.exit_code
    params = layer_recursion(cfg.seq, cfg.alpha, len(layers), prec=cfg.precision, threshold=cfg.threshold,
                             order_cap=cfg.order_cap)
    ok = True
    for i, layer in enumerate(layers):
        history = params[: i + 1]
        try:
            predicted = expected_order(history)
            check_order = predicted <= cfg.order_cap and predicted * layer.domain.size <= _ORDER_WORK_BUDGET
        except WreathDimError:
            check_order = False
        report = verify_layer(layer, params[i], previous=layers[i - 1] if i else None, history=history,
                              check_order=check_order, order_cap=cfg.order_cap)
        for line in report.lines():
            print(line, file=out)
        if not check_order:
            print(f"level {layer.level} order: skipped (beyond enumeration budget)", file=out)
        mins = [layer.partition.orbits[j].min_point for j in layer.selected]
        shown = " ".join(map(str, mins[:32])) + (" ..." if len(mins) > 32 else "")
        print(f"level {layer.level} selected orbit min points: {shown}", file=out)
        ok = ok and report.passed
    if layers.truncated:
        print(f"level {layers.truncated_at}: truncated (domain exceeds {cfg.max_points} points)", file=out)
    print("all checks passed" if ok else "verification FAILED", file=out)
    return 0 if ok else 5


def cmd_diagnose(cfg: RunConfig, out=sys.stdout, err=sys.stderr) -> int:
    layers = layer_recursion(cfg.seq, cfg.alpha, max(cfg.levels, 2), prec=cfg.precision, threshold=cfg.threshold,
                             order_cap=cfg.order_cap)
    good = goodness_check(cfg.seq, max(cfg.levels, 2) + 1, prec=cfg.precision, cap=cfg.order_cap)
    report = claim_diagnostics(layers, cfg.seq, cfg.alpha, cfg.c_list, goodness=good)
    growth = report.growth
    print("growth: mtilde_n >= n at every level: " + ("yes" if all(growth.at_least_level) else "no"), file=out)
    print("mtilde ratios: " + " ".join(format_from_log(x) for x in growth.ratio_logs), file=out)
    for C, M in sorted(growth.thresholds.items()):
        print(f"growth M({C}) = {M}", file=out)
    out.write(format_diagnostics(report))
    final = {name: format_from_log(v) for name, v in report.limit_distances().items()}
    print("distance to limit at last level: " + ", ".join(f"{k}={v}" for k, v in final.items()), file=out)
    if cfg.out:
        trace = dimension_trace(layers, cfg.alpha, cfg.seq)
        with open(cfg.out, "w", newline="") as fh:
            fh.write(trace.to_csv())
    return 0


COMMANDS = {"compute": cmd_compute, "verify": cmd_verify, "diagnose": cmd_diagnose}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg, out, err)
    except WreathDimError as exc:
        print(f"error: {exc}", file=err)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
