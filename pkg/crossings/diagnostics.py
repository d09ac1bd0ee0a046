"""Report documents for analyses, sweeps and verification runs."""

from __future__ import annotations

import json
from collections.abc import Iterable
from typing import Any

from .config import Tolerances
from .const import METHOD_NYQUIST, SCHEMA_VERSION, format_float
from .fresponse import Crossing
from .tflang import print_tf
from .verdict import FuzzResult, StabilityReport


def _number(value: float | int | None) -> float | int | None:
    if value is None or isinstance(value, int):
        return value
    return format_float(float(value))


def _complex(value: complex) -> dict[str, float]:
    return {"re": format_float(value.real), "im": format_float(value.imag)}


def _crossing(crossing: Crossing) -> dict[str, Any]:
    data = crossing.as_dict()
    data["t"] = _number(data["t"])
    data["omega"] = _number(data["omega"])
    data["location"] = _number(data["location"])
    return data


def _verdict(report: StabilityReport) -> dict[str, Any]:
    verdict = report.verdict
    return {
        "kind": verdict.kind,
        "n_z": verdict.n_z,
        "reason": verdict.reason,
        "text": str(verdict),
    }


def build_report_document(
    tf_text: str,
    report: StabilityReport,
    tolerances: Tolerances | None = None,
) -> dict[str, Any]:
    """Return the report document for one analysis."""
    tf = report.tf
    tolerances = tolerances or Tolerances()
    oracle = None
    if report.oracle is not None:
        oracle = {
            "closed_loop_rhp": report.oracle.closed_loop_rhp,
            "routh_rhp": report.oracle.routh_rhp,
            "agrees": report.oracle_agrees,
        }

    return {
        "schema_version": SCHEMA_VERSION,
        "tf_text": tf_text,
        "tf": print_tf(tf),
        "config": {
            "contour": {k: _number(v) for k, v in report.config.as_dict().items()},
            "tolerances": {k: _number(v) for k, v in tolerances.as_dict().items()},
        },
        "open_loop": {
            "poles": [_complex(p) for p in tf.poles],
            "zeros": [_complex(z) for z in tf.zeros],
            "imag_axis_poles": [_complex(p) for p in report.imag_axis_poles],
            "n_p": report.n_p,
            "relative_degree": tf.relative_degree,
        },
        "crossings": {
            method: [_crossing(c) for c in crossings]
            for method, crossings in report.crossings.items()
        },
        "n_by_method": dict(report.n_by_method),
        "n_z": report.n_z,
        "verdict": _verdict(report),
        "oracle": oracle,
        "warnings": list(report.warnings),
        "samples": report.samples,
    }


def build_sweep_document(
    tf_text: str, results: Iterable[tuple[float, StabilityReport]]
) -> dict[str, Any]:
    """Return one row per gain of a sweep."""
    rows = []
    for gain, report in results:
        rows.append(
            {
                "gain": _number(gain),
                "tf": print_tf(report.tf),
                "n_p": report.n_p,
                "n": report.n_by_method.get(METHOD_NYQUIST),
                "n_z": report.n_z,
                "verdict": str(report.verdict),
            }
        )
    return {"schema_version": SCHEMA_VERSION, "tf_text": tf_text, "results": rows}


def build_verify_document(
    seed: int, count: int, max_order: int, result: FuzzResult
) -> dict[str, Any]:
    """Return agreement statistics and shrunk counterexamples."""
    return {
        "schema_version": SCHEMA_VERSION,
        "seed": seed,
        "count": count,
        "max_order": max_order,
        "agreements": result.agreements,
        "skipped": result.skipped,
        "disagreements": [print_tf(tf) for tf in result.disagreements],
        "reasons": list(result.reasons),
    }


def dump_json(document: dict[str, Any]) -> str:
    """Serialize a document deterministically."""
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


def _format(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    if value is None:
        return "-"
    return str(value)


def dump_text(document: dict[str, Any]) -> str:
    """Render a report document as plain text."""
    if "results" in document:
        lines = [f"tf: {document['tf_text']}", "gain            N_p  N    N_z  verdict"]
        for row in document["results"]:
            lines.append(
                f"{_format(row['gain']):<15} {_format(row['n_p']):<4} "
                f"{_format(row['n']):<4} {_format(row['n_z']):<4} {row['verdict']}"
            )
        return "\n".join(lines) + "\n"

    if "agreements" in document:
        lines = [
            f"seed: {document['seed']}",
            f"count: {document['count']}",
            f"agreements: {document['agreements']}",
            f"skipped: {document['skipped']}",
            f"disagreements: {len(document['disagreements'])}",
        ]
        reasons = document.get("reasons") or [""] * len(document["disagreements"])
        for tf, reason in zip(document["disagreements"], reasons, strict=True):
            lines.append(f"  {tf}  {reason}".rstrip())
        return "\n".join(lines) + "\n"

    open_loop = document["open_loop"]
    lines = [
        f"tf: {document['tf']}",
        f"verdict: {document['verdict']['text']}",
        f"N_p: {_format(open_loop['n_p'])}",
        f"N_z: {_format(document['n_z'])}",
    ]
    for method, count in document["n_by_method"].items():
        lines.append(f"N[{method}]: {count}")
    for method, crossings in document["crossings"].items():
        for crossing in crossings:
            lines.append(
                f"crossing[{method}]: t={_format(crossing['t'])} "
                f"omega={_format(crossing['omega'])} "
                f"location={_format(crossing['location'])} "
                f"sign={crossing['sign']:+d} kind={crossing['kind']}"
            )
    oracle = document["oracle"]
    if oracle is not None:
        lines.append(
            f"oracle: roots={oracle['closed_loop_rhp']} routh={oracle['routh_rhp']} "
            f"agrees={oracle['agrees']}"
        )
    lines.extend(f"warning: {warning}" for warning in document["warnings"])
    return "\n".join(lines) + "\n"
