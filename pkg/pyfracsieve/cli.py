# -----------------------------------------------------------------------------
# Copyright 2025 by PyFracSieve Authors, see AUTHORS for more details.
#
# Distributed under the terms of the MIT/X11 license.
#
# The full license is in the file LICENCE, distributed with this software.
# -----------------------------------------------------------------------------
"""Command line interface.

Exit statuses: 0 on success or positive verdicts, 1 for computed negative or
indeterminate verdicts, 2 for usage, configuration and domain errors and 3
for any other failure.

"""

import argparse
import json
import logging
import sys

from . import census as census_module
from .errors import ConfigurationError, DomainError, PyFracSieveError
from .expressions import parse_lambda, parse_range
from .init import get_default_tables
from .quadrature import QuadSpec, integrate_Tr, integrate_Tr_qmc
from .reports import document, dumps, make_manifest, tool_version, write_csv, write_json
from .sieve_functions import DEFAULT_GRID_END, DEFAULT_STEP, build_tables
from .verdict import (
    POSITIVE,
    check_theorem,
    classical_dimension,
    critical_lambda,
    delta,
    theorem_holds,
)

logger = logging.getLogger(__name__)


EXIT_OK = 0

EXIT_VERDICT = 1

EXIT_USAGE = 2

EXIT_INTERNAL = 3


def _fmt(value):
    """Human readable rendering with 10 significant digits."""
    if isinstance(value, float):
        return "{:.10g}".format(value)
    return str(value)


class _Output(object):
    """Collect what a command prints, writes to CSV and to JSON."""

    def __init__(self, args):
        self.args = args

    def emit(self, command, manifest, result, rows=(), lines=()):
        args = self.args
        doc = document(command, manifest, result)
        if args.json:
            print(dumps(doc))
        else:
            for line in lines:
                print(line)
        if args.csv and rows:
            write_csv(args.csv, rows)
        if args.manifest:
            write_json(args.manifest, doc["manifest"])
        return doc


def _tables(args):
    if args.grid_end == DEFAULT_GRID_END and args.step == DEFAULT_STEP:
        return get_default_tables()
    return build_tables(args.grid_end, args.step)


def _quad_spec(args, r):
    return QuadSpec(
        r,
        lower_exponent=(
            float(args.lower_exponent) if getattr(args, "lower_exponent", None) else None
        ),
        rel_tol=args.tol_rel,
        abs_tol=args.tol_abs,
        max_depth=getattr(args, "max_depth", 12),
        mc_samples=getattr(args, "samples", 2**20),
        mc_seed=args.seed,
        mc_replicates=getattr(args, "replicates", 16),
        mc_mapping=getattr(args, "mapping", "nested"),
        threads=args.threads,
    )


# --- Commands ----------------------------------------------------------------


def cmd_sievefn(args, out):
    tables = _tables(args)
    points = parse_range(args.arg)
    function = {"omega": tables.omega, "f": tables.sieve_f, "F": tables.sieve_F}
    values = function[args.function](points)
    rows = [{"arg": float(a), "value": float(v)} for a, v in zip(points, values)]
    result = {"function": args.function, "tolerance": tables.tolerance, "points": rows}
    manifest = make_manifest(
        "sievefn", {"function": args.function, "arg": args.arg}, tables
    )
    lines = ["{}({}) = {}".format(args.function, _fmt(r["arg"]), _fmt(r["value"])) for r in rows]
    lines.append("table tolerance {:.3g}".format(tables.tolerance))
    out.emit("sievefn", manifest, result, rows, lines)
    return EXIT_OK


def cmd_integral(args, out):
    tables = _tables(args)
    spec = _quad_spec(args, args.r)
    if args.method == "qmc":
        result = integrate_Tr_qmc(spec, tables)
    else:
        result = integrate_Tr(spec, tables)
    manifest = make_manifest(
        "integral", {"r": args.r, "method": result.method}, tables, spec, args.seed
    )
    row = {
        "r": args.r,
        "method": result.method,
        "value": result.value,
        "error_estimate": result.error_estimate,
        "evaluations": result.evaluations,
    }
    lines = [
        "T_{} = {} +/- {:.3g} ({}, {} evaluations)".format(
            args.r, _fmt(result.value), result.error_estimate, result.method, result.evaluations
        )
    ]
    out.emit("integral", manifest, result, [row], lines)
    return EXIT_OK


def _report_row(report):
    return {
        "lambda": report.lambda_,
        "r": report.r,
        "k": report.k,
        "s": report.s,
        "f_s": report.f_s,
        "T_r": report.T_r,
        "T_r_error": report.T_r_error,
        "delta": report.delta,
        "error_bar": report.error_bar,
        "verdict": report.verdict,
    }


def _report_line(report):
    return "lambda={} r={} s={} f(s)={} T_r={} delta={} +/- {:.3g} {}".format(
        report.lambda_,
        report.r,
        _fmt(report.s),
        _fmt(report.f_s),
        _fmt(report.T_r),
        _fmt(report.delta),
        report.error_bar,
        report.verdict,
    )


def cmd_verify(args, out):
    tables = _tables(args)
    spec = _quad_spec(args, args.r)
    report = delta(args.lambda_, args.r, tables, spec)
    manifest = make_manifest(
        "verify", {"lambda": args.lambda_, "r": args.r}, tables, spec
    )
    out.emit("verify", manifest, report, [_report_row(report)], [_report_line(report)])
    return EXIT_OK if report.verdict == POSITIVE else EXIT_VERDICT


def cmd_theorem(args, out):
    tables = _tables(args)
    spec = _quad_spec(args, 4)
    reports = check_theorem(tables, spec)
    holds = theorem_holds(reports)
    manifest = make_manifest("theorem", {}, tables, spec)
    classical = [classical_dimension(report.lambda_) for report in reports]
    lines = [
        "{} (classical r = {})".format(_report_line(report), dim)
        for report, dim in zip(reports, classical)
    ]
    lines.append("all positive: {}".format(holds))
    rows = [
        dict(_report_row(report), classical_r=dim)
        for report, dim in zip(reports, classical)
    ]
    out.emit(
        "theorem",
        manifest,
        {"holds": holds, "reports": reports, "classical_dimensions": classical},
        rows,
        lines,
    )
    return EXIT_OK if holds else EXIT_VERDICT


def cmd_threshold(args, out):
    tables = _tables(args)
    spec = _quad_spec(args, args.r)
    result = critical_lambda(args.r, tables, spec)
    manifest = make_manifest("threshold", {"r": args.r}, tables, spec)
    low, high = result.bracket
    lines = [
        "r={} lambda*={} +/- {:.3g} in [{}, {}] (1/lambda* = {}), closed form {}".format(
            args.r,
            _fmt(result.lambda_star),
            result.uncertainty,
            _fmt(low),
            _fmt(high),
            _fmt(1 / result.lambda_star),
            _fmt(result.closed_form),
        ),
        "classical sieve weights give r = {} at lambda*".format(result.classical_r),
    ]
    row = {
        "r": args.r,
        "lambda_star": result.lambda_star,
        "low": low,
        "high": high,
        "iterations": result.iterations,
        "closed_form": result.closed_form,
        "uncertainty": result.uncertainty,
        "certified": result.certified,
        "classical_r": result.classical_r,
    }
    out.emit("threshold", manifest, result, [row], lines)
    return EXIT_OK if result.certified else EXIT_VERDICT


def _census_config(args, moduli=None):
    config = census_module.CensusConfig(
        x=args.x,
        lambda_=args.lambda_,
        r=args.r,
        segment_size=args.segment,
        residue_moduli=tuple(moduli or args.moduli),
        strict=False,
        threads=args.threads,
    )
    if args.x < 10**3 or args.segment < 10**4:
        logger.warning("Running below desk scale: x = {}, segment = {}".format(args.x, args.segment))
    return config


def _census_row(result):
    return {
        "x": result.x,
        "lambda": result.lambda_,
        "r": result.r,
        "prime_count": result.prime_count,
        "solution_count": result.solution_count,
        "pr_count": result.pr_count,
        "predicted_main_term": result.predicted_main_term,
        "boundary_cases": result.boundary_cases,
        "omega_histogram": result.omega_histogram,
    }


def cmd_census(args, out):
    config = _census_config(args)
    result = census_module.run_census(config)
    payload = {"census": result}
    tables = None
    lines = [
        "x={} lambda={} r={}: {} primes, {} solutions, {} P_{} (main term {})".format(
            result.x,
            result.lambda_,
            result.r,
            result.prime_count,
            result.solution_count,
            result.pr_count,
            result.r,
            _fmt(result.predicted_main_term),
        )
    ]
    if args.lower_bound:
        tables = _tables(args)
        bound = census_module.pr_lower_bound(
            args.x, args.lambda_, args.r, tables, _quad_spec(args, args.r)
        )
        payload["lower_bound"] = {
            "value": bound.value,
            "main_term": bound.main_term,
            "log_level": bound.log_level,
            "delta": bound.delta_report.delta,
        }
        lines.append("leading lower bound term {}".format(_fmt(bound.value)))
    parameters = {
        "x": args.x,
        "lambda": args.lambda_,
        "r": args.r,
        "segment_size": args.segment,
        "residue_moduli": list(config.residue_moduli),
    }
    manifest = make_manifest("census", parameters, tables)
    doc = out.emit("census", manifest, payload, [_census_row(result)], lines)
    prefix = args.output or _census_prefix(args)
    logger.info("Writing {0}.json and {0}.csv".format(prefix))
    write_json(prefix + ".json", doc)
    write_csv(prefix + ".csv", [_census_row(result)])
    return EXIT_OK


def _census_prefix(args):
    """Default output prefix, census_x1000000_lambda10-151_r4 for instance."""
    lambda_ = str(args.lambda_).replace("/", "-")
    return "census_x{}_lambda{}_r{}".format(args.x, lambda_, args.r)


def cmd_rough(args, out):
    tables = _tables(args)
    result = census_module.rough_count(args.x, args.y, args.z, tables, args.segment)
    ratio = result.observed / result.predicted if result.predicted else None
    row = {
        "x": args.x,
        "y": args.y,
        "z": args.z,
        "u": result.u,
        "observed": result.observed,
        "predicted": result.predicted,
        "ratio": ratio,
    }
    manifest = make_manifest("rough", {"x": args.x, "y": args.y, "z": args.z}, tables)
    lines = [
        "observed {} predicted {} (u = {})".format(
            result.observed, _fmt(result.predicted), _fmt(result.u)
        )
    ]
    out.emit("rough", manifest, row, [row], lines)
    return EXIT_OK


def cmd_equidist(args, out):
    moduli = sorted(set(args.moduli) | {args.d})
    result = census_module.run_census(_census_config(args, moduli))
    rows, non_coprime = census_module.equidistribution_report(result, args.d)
    manifest = make_manifest(
        "equidist",
        {"x": args.x, "lambda": args.lambda_, "r": args.r, "d": args.d},
    )
    lines = [
        "{} mod {}: observed {} expected {} deviation {}".format(
            row.residue, args.d, row.observed, _fmt(row.expected), _fmt(row.deviation)
        )
        for row in rows
    ]
    lines += [
        "{} mod {} (not coprime): {}".format(residue, args.d, count)
        for residue, count in non_coprime.items()
    ]
    payload = {
        "d": args.d,
        "solution_count": result.solution_count,
        "rows": rows,
        "non_coprime": non_coprime,
    }
    csv_rows = [dict(row._asdict(), d=args.d) for row in rows]
    out.emit("equidist", manifest, payload, csv_rows, lines)
    return EXIT_OK


def cmd_tables(args, out):
    tables = _tables(args)
    tables.dump(args.path)
    manifest = make_manifest("tables", {"path": args.path}, tables)
    result = {
        "path": args.path,
        "grid_end": tables.grid_end,
        "step": tables.step,
        "tolerance": tables.tolerance,
    }
    out.emit("tables", manifest, result, [result], ["tables written to {}".format(args.path)])
    return EXIT_OK


# --- Parser ------------------------------------------------------------------


def _lambda(text):
    try:
        return parse_lambda(text)
    except ConfigurationError as e:
        raise argparse.ArgumentTypeError(str(e))


def _moduli(text):
    if isinstance(text, (list, tuple)):
        return [int(d) for d in text]
    try:
        return [int(d) for d in text.split(",") if d.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("Invalid moduli '{}'".format(text))


def _common_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON document")
    common.add_argument("--csv", metavar="PATH", help="append CSV rows to PATH")
    common.add_argument("--manifest", metavar="PATH", help="write the run manifest to PATH")
    common.add_argument("--config", metavar="PATH", help="JSON file of option defaults")
    common.add_argument("--tol-abs", type=float, default=1e-7, help="absolute tolerance")
    common.add_argument("--tol-rel", type=float, default=1e-5, help="relative tolerance")
    common.add_argument("--seed", type=int, default=0, help="seed of the QMC scramblings")
    common.add_argument("--threads", type=int, default=1, help="worker threads")
    common.add_argument("--grid-end", type=float, default=DEFAULT_GRID_END)
    common.add_argument("--step", type=float, default=DEFAULT_STEP)
    common.add_argument("-v", "--verbose", action="count", default=0)
    return common


def _census_arguments(parser, required):
    parser.add_argument("--x", type=int, required=required("x"), help="enumerate (x, 2x]")
    parser.add_argument(
        "--lambda", dest="lambda_", type=_lambda, required=required("lambda_"), help="a/b or decimal"
    )
    parser.add_argument("--r", type=int, default=4)
    parser.add_argument("--segment", type=int, default=10**6, help="segment size")
    parser.add_argument(
        "--moduli",
        type=_moduli,
        default=list(census_module.DEFAULT_MODULI),
        help="comma separated moduli",
    )


def build_parser(defaults=None):
    """Parser of the pyfracsieve command.

    Parameters
    ----------
    defaults : dict, optional
        Option defaults read from a configuration file. Options they provide
        are no longer required on the command line.

    """
    defaults = defaults or {}

    def required(dest):
        return dest not in defaults

    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="pyfracsieve",
        description="Linear sieve numerics and desk-scale prime census.",
    )
    parser.add_argument("--version", action="version", version=tool_version())
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
    dimensions = list(range(4, 8))

    p = sub.add_parser("sievefn", parents=[common], help="evaluate omega, f or F")
    p.add_argument("function", choices=["omega", "f", "F"])
    p.add_argument("arg", help="number or start:stop[:step]")
    p.set_defaults(handler=cmd_sievefn)

    p = sub.add_parser("integral", parents=[common], help="compute T_r")
    p.add_argument("--r", type=int, choices=dimensions, default=4)
    p.add_argument("--method", choices=["nested", "qmc"], default="nested")
    p.add_argument("--lower-exponent", type=_lambda)
    p.add_argument("--max-depth", type=int, default=12)
    p.add_argument("--samples", type=int, default=2**20)
    p.add_argument("--replicates", type=int, default=16)
    p.add_argument("--mapping", choices=["nested", "box"], default="nested")
    p.set_defaults(handler=cmd_integral)

    p = sub.add_parser("verify", parents=[common], help="sign of Delta_r(lambda)")
    p.add_argument("--lambda", dest="lambda_", type=_lambda, required=required("lambda_"))
    p.add_argument("--r", type=int, choices=dimensions, required=required("r"))
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("theorem", parents=[common], help="check the four pairs")
    p.set_defaults(handler=cmd_theorem)

    p = sub.add_parser("threshold", parents=[common], help="critical lambda")
    p.add_argument("--r", type=int, choices=dimensions, required=required("r"))
    p.set_defaults(handler=cmd_threshold)

    p = sub.add_parser("census", parents=[common], help="count solutions in (x, 2x]")
    _census_arguments(p, required)
    p.add_argument("--lower-bound", action="store_true", help="report the P_r lower bound")
    p.add_argument(
        "--output",
        metavar="PREFIX",
        help="write PREFIX.json and PREFIX.csv, census_x<x>_lambda<a>-<b>_r<r> by default",
    )
    p.set_defaults(handler=cmd_census)

    p = sub.add_parser("rough", parents=[common], help="count z-rough integers")
    p.add_argument("--x", type=int, required=required("x"))
    p.add_argument("--y", type=int, required=required("y"))
    p.add_argument("--z", type=float, required=required("z"))
    p.add_argument("--segment", type=int, default=10**6)
    p.set_defaults(handler=cmd_rough)

    p = sub.add_parser("equidist", parents=[common], help="residue classes of the solutions")
    _census_arguments(p, required)
    p.add_argument("--d", type=int, required=required("d"), help="modulus")
    p.set_defaults(handler=cmd_equidist)

    p = sub.add_parser("tables", parents=[common], help="write the sieve tables")
    p.add_argument("path")
    p.set_defaults(handler=cmd_tables)

    if defaults:
        for subparser in sub.choices.values():
            subparser.set_defaults(**defaults)
    return parser


def _read_config(argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return {}
    try:
        with open(known.config, encoding="utf-8") as fp:
            defaults = json.load(fp)
    except (OSError, ValueError) as e:
        raise ConfigurationError("Cannot read the configuration {}: {}".format(known.config, e))
    if not isinstance(defaults, dict):
        raise ConfigurationError("The configuration must be a JSON object")
    defaults = {k.replace("-", "_"): v for k, v in defaults.items()}
    if "lambda" in defaults:
        defaults["lambda_"] = defaults.pop("lambda")
    logger.debug("Defaults read from {}: {}".format(known.config, defaults))
    return defaults


def parse_args(argv=None):
    """Parse the arguments, applying the defaults of a --config file.

    Values given on the command line take precedence over the file.

    """
    return build_parser(_read_config(argv)).parse_args(argv)


def _configure_logging(verbosity):
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(verbosity, 2)]
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("pyfracsieve")
    root.handlers = [h for h in root.handlers if not isinstance(h, logging.StreamHandler)]
    root.addHandler(handler)
    root.setLevel(level)


def main(argv=None):
    """Entry point of the pyfracsieve command, returns the exit status."""
    try:
        args = parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    except ConfigurationError as e:
        print("pyfracsieve: error: {}".format(e), file=sys.stderr)
        return EXIT_USAGE
    _configure_logging(args.verbose)
    try:
        return args.handler(args, _Output(args))
    except (DomainError, ConfigurationError) as e:
        logger.error(str(e))
        return EXIT_USAGE
    except PyFracSieveError as e:
        logger.error(str(e))
        return EXIT_INTERNAL
    except Exception:
        logger.exception("Unexpected failure")
        return EXIT_INTERNAL