"""Command-line front end for the crossings analyzer."""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import sys
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from . import __version__
from .config import ContourConfig, Tolerances, contour_config_for
from .const import (
    CONF_BIG_RADIUS,
    CONF_CRITICAL_TOL,
    CONF_INDENT_RADIUS,
    CONF_REFINE_DEG,
    CONF_SAMPLES_PER_DECADE,
    CSV_COLUMNS,
    CURVE_KIND_NICHOLS_MULTI,
    CURVE_KIND_NICHOLS_SINGLE,
    CURVE_KIND_NYQUIST,
    CURVE_KINDS,
    DEFAULT_PLOT_HEIGHT,
    DEFAULT_PLOT_WIDTH,
    EXIT_DISAGREEMENT,
    EXIT_MARGINAL,
    EXIT_NUMERIC,
    EXIT_OK,
    EXIT_USAGE,
    MODE_MULTIPLE,
    MODE_SINGLE,
)
from .contour import build_contour, refine
from .diagnostics import (
    build_report_document,
    build_sweep_document,
    build_verify_document,
    dump_json,
    dump_text,
)
from .exceptions import InputError, InvalidConfig, MarginalError, NumericError
from .fresponse import MappedCurve, detect_ray_crossings, map_response
from .nichols import NicholsCurve, detect_nichols_crossings, to_nichols
from .svg import PlotSeries, render_nichols_svg, render_nyquist_svg
from .tflang import FactoredTF, parse_tf
from .verdict import assess, fuzz_verify, gain_sweep

_LOGGER = logging.getLogger(__name__)

FORMAT_JSON = "json"
FORMAT_TEXT = "text"


def parse_gains(text: str) -> list[float]:
    """Parse "a,b,c" or a log-spaced range "lo:hi:n"."""
    text = text.strip()
    if not text:
        raise InvalidConfig("gain list is empty")
    try:
        if ":" in text:
            low_text, high_text, count_text = text.split(":")
            low, high, count = float(low_text), float(high_text), int(count_text)
            if count < 1 or low * high <= 0:
                raise InvalidConfig(f"invalid gain range {text!r}")
            gains = np.geomspace(low, high, count).tolist()
        else:
            gains = [float(part) for part in text.split(",")]
    except ValueError as err:
        raise InvalidConfig(f"invalid gain list {text!r}") from err
    for gain in gains:
        if not math.isfinite(gain) or gain == 0.0:
            raise InvalidConfig(f"gain {gain} must be finite and nonzero")
    return gains


def _load_tf(args: argparse.Namespace) -> FactoredTF:
    tf = parse_tf(args.tf)
    if args.gain is not None:
        if not math.isfinite(args.gain) or args.gain == 0.0:
            raise InvalidConfig(f"gain {args.gain} must be finite and nonzero")
        tf = tf.with_gain(args.gain)
    return tf


def _contour_config(args: argparse.Namespace, tf: FactoredTF) -> ContourConfig:
    overrides = {
        CONF_BIG_RADIUS: args.radius,
        CONF_INDENT_RADIUS: args.indent,
        CONF_SAMPLES_PER_DECADE: args.samples,
        CONF_REFINE_DEG: args.refine_deg,
    }
    return contour_config_for(tf, {k: v for k, v in overrides.items() if v is not None})


def _tolerances(args: argparse.Namespace) -> Tolerances:
    overrides = {}
    if args.tol is not None:
        overrides[CONF_CRITICAL_TOL] = args.tol
    return Tolerances.from_dict(overrides)


def _mapped_curve(tf: FactoredTF, cfg: ContourConfig) -> MappedCurve:
    return map_response(tf, refine(build_contour(tf, cfg), tf, cfg))


def _write(out: str, text: str) -> None:
    if out == "-":
        sys.stdout.write(text)
        return
    Path(out).write_text(text, encoding="utf-8", newline="")
    _LOGGER.info("Wrote %s", out)


def _emit(args: argparse.Namespace, document: dict) -> None:
    if args.format == FORMAT_TEXT:
        sys.stdout.write(dump_text(document))
    else:
        sys.stdout.write(dump_json(document))


def cmd_analyze(args: argparse.Namespace) -> int:
    """Run the full pipeline and print the report document."""
    tf = _load_tf(args)
    tolerances = _tolerances(args)
    cfg = _contour_config(args, tf)
    report = assess(tf, cfg, tolerances, half_chart=args.half_chart)
    _emit(args, build_report_document(args.tf, report, tolerances))
    if report.verdict.is_marginal:
        _LOGGER.error("Marginal configuration: %s", report.verdict.reason)
        return EXIT_MARGINAL
    return EXIT_OK


def _csv_cell(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def curve_csv(curve: MappedCurve, kind: str) -> str:
    """Render the mapped curve as CSV rows of the requested chart."""
    if kind == CURVE_KIND_NYQUIST:
        rows = curve.rows()
    else:
        mode = MODE_SINGLE if kind == CURVE_KIND_NICHOLS_SINGLE else MODE_MULTIPLE
        rows = to_nichols(curve, mode).rows()
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_csv_cell(row[column]) for column in CSV_COLUMNS])
    return buffer.getvalue()


def cmd_curve(args: argparse.Namespace) -> int:
    """Export the mapped contour as CSV."""
    tf = _load_tf(args)
    cfg = _contour_config(args, tf)
    _write(args.out, curve_csv(_mapped_curve(tf, cfg), args.kind))
    return EXIT_OK


def _plot_series(
    tf: FactoredTF, cfg: ContourConfig, kind: str, tolerances: Tolerances
) -> PlotSeries:
    curve = _mapped_curve(tf, cfg)
    plotted: MappedCurve | NicholsCurve = curve
    if kind != CURVE_KIND_NYQUIST:
        mode = MODE_SINGLE if kind == CURVE_KIND_NICHOLS_SINGLE else MODE_MULTIPLE
        plotted = to_nichols(curve, mode)
    try:
        if isinstance(plotted, NicholsCurve):
            crossings = tuple(detect_nichols_crossings(plotted, tolerances.tol_db))
        else:
            crossings = tuple(detect_ray_crossings(curve, tolerances.critical_tol))
    except MarginalError as err:
        _LOGGER.warning("No crossings drawn for %s: %s", tf, err)
        crossings = ()
    return PlotSeries(gain=tf.gain, curve=plotted, crossings=crossings)


def cmd_plot(args: argparse.Namespace) -> int:
    """Render a static SVG chart, optionally overlaying several gains."""
    tf = _load_tf(args)
    tolerances = _tolerances(args)
    cfg = _contour_config(args, tf)
    variants = [tf]
    if args.gains is not None:
        variants = [tf.with_gain(k) for k in parse_gains(args.gains)]
    series = [_plot_series(variant, cfg, args.kind, tolerances) for variant in variants]
    if args.kind == CURVE_KIND_NYQUIST:
        svg = render_nyquist_svg(series, args.width, args.height)
    else:
        title = "Nichols chart"
        if args.kind == CURVE_KIND_NICHOLS_MULTI:
            title = "Nichols chart (multiple sheets)"
        svg = render_nichols_svg(series, args.width, args.height, title)
    _write(args.out, svg)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    """Assess the loop function for every gain in the list."""
    gains = parse_gains(args.gains)
    tf = parse_tf(args.tf)
    tolerances = _tolerances(args)
    cfg = _contour_config(args, tf)
    results = gain_sweep(tf, gains, cfg, tolerances)
    _emit(args, build_sweep_document(args.tf, results))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    """Run the randomized differential check against the closed-loop oracle."""
    result = fuzz_verify(args.seed, args.count, args.max_order)
    _emit(args, build_verify_document(args.seed, args.count, args.max_order, result))
    if result.disagreements:
        _LOGGER.error("%s disagreements found", len(result.disagreements))
        return EXIT_DISAGREEMENT
    return EXIT_OK


def _add_tf_options(parser: argparse.ArgumentParser, gain: bool = True) -> None:
    parser.add_argument("--tf", required=True, help="loop transfer function, e.g. 5/((s+1)(s/2+1))")
    if gain:
        parser.add_argument("--gain", type=float, help="replace the gain of the normalized form")
    parser.add_argument("--radius", type=float, help="radius of the closing arc")
    parser.add_argument("--indent", type=float, help="radius of imaginary-axis indents")
    parser.add_argument("--samples", type=int, help="minimum samples per decade")
    parser.add_argument("--refine-deg", type=float, help="largest phase step between samples")
    parser.add_argument("--tol", type=float, help="critical point tolerance")


def _add_format(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=(FORMAT_JSON, FORMAT_TEXT), default=FORMAT_JSON)


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with one subcommand per operation."""
    parser = argparse.ArgumentParser(
        prog="crossings",
        description="Closed-loop stability from signed crossings on Nyquist and Nichols charts.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log debug output to stderr")
    commands = parser.add_subparsers(dest="command", required=True)

    analyze = commands.add_parser("analyze", help="assess closed-loop stability")
    _add_tf_options(analyze)
    _add_format(analyze)
    analyze.add_argument(
        "--half-chart", action="store_true", help="count Nichols crossings on omega >= 0 only"
    )
    analyze.set_defaults(handler=cmd_analyze)

    curve = commands.add_parser("curve", help="export the mapped contour as CSV")
    _add_tf_options(curve)
    curve.add_argument("--kind", choices=CURVE_KINDS, default=CURVE_KIND_NYQUIST)
    curve.add_argument("--out", default="-", help="output path, - for stdout")
    curve.set_defaults(handler=cmd_curve)

    plot = commands.add_parser("plot", help="render a static SVG chart")
    _add_tf_options(plot)
    plot.add_argument("--kind", choices=CURVE_KINDS, default=CURVE_KIND_NYQUIST)
    plot.add_argument("--out", default="-", help="output path, - for stdout")
    plot.add_argument("--width", type=int, default=DEFAULT_PLOT_WIDTH)
    plot.add_argument("--height", type=int, default=DEFAULT_PLOT_HEIGHT)
    plot.add_argument("--gains", help='overlay gains, "a,b,c" or "lo:hi:n"')
    plot.set_defaults(handler=cmd_plot)

    sweep = commands.add_parser("sweep", help="assess a list of gains")
    _add_tf_options(sweep, gain=False)
    sweep.add_argument("--gains", required=True, help='"a,b,c" or "lo:hi:n" (log spaced)')
    _add_format(sweep)
    sweep.set_defaults(handler=cmd_sweep)

    verify = commands.add_parser("verify", help="randomized check against the root oracle")
    verify.add_argument("--count", type=int, default=1000)
    verify.add_argument("--seed", type=int, default=42)
    verify.add_argument("--max-order", type=int, default=6)
    _add_format(verify)
    verify.set_defaults(handler=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_OK if err.code in (0, None) else EXIT_USAGE

    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )
    try:
        return args.handler(args)
    except InputError as err:
        _LOGGER.error("%s", err)
        return EXIT_USAGE
    except MarginalError as err:
        _LOGGER.error("Marginal configuration: %s", err)
        return EXIT_MARGINAL
    except NumericError as err:
        _LOGGER.error("Numeric failure: %s", err)
        return EXIT_NUMERIC
