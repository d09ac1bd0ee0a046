"""Test report documents and their text renderings."""

from __future__ import annotations

import json

from crossings.const import METHOD_NYQUIST, SCHEMA_VERSION
from crossings.diagnostics import (
    build_report_document,
    build_sweep_document,
    build_verify_document,
    dump_json,
    dump_text,
)
from crossings.verdict import FuzzResult, assess, gain_sweep

from .conftest import loop_text, make_loop


def test_report_document() -> None:
    """Test the report document of an unstable loop."""
    report = assess(make_loop("three_lags", 15))
    document = build_report_document(loop_text("three_lags", 15), report)

    assert document["schema_version"] == SCHEMA_VERSION
    assert document["tf"] == "15/((s/1+1)(s/2+1)(s/3+1))"
    assert document["verdict"] == {
        "kind": "Unstable",
        "n_z": 2,
        "reason": None,
        "text": "Unstable(2)",
    }
    assert document["open_loop"]["n_p"] == 0
    assert document["open_loop"]["relative_degree"] == 3
    assert {"re": -1.0, "im": 0.0} in document["open_loop"]["poles"]
    assert document["n_by_method"][METHOD_NYQUIST] == 2
    assert document["oracle"] == {"closed_loop_rhp": 2, "routh_rhp": 2, "agrees": True}
    assert len(document["crossings"][METHOD_NYQUIST]) == 2
    assert document["crossings"][METHOD_NYQUIST][0]["sign"] == 1
    assert document["samples"] > 0
    assert isinstance(document["config"]["contour"]["max_samples"], int)


def test_dump_json_is_deterministic() -> None:
    """Test serializing twice gives identical text that loads back."""
    text = loop_text("unstable_poles", 5)
    first = dump_json(build_report_document(text, assess(make_loop("unstable_poles", 5))))
    second = dump_json(build_report_document(text, assess(make_loop("unstable_poles", 5))))
    assert first == second
    assert first.endswith("\n")
    assert json.loads(first)["verdict"]["text"] == "Stable"


def test_dump_text_report() -> None:
    """Test the plain-text rendering of a report."""
    report = assess(make_loop("three_lags", 15))
    text = dump_text(build_report_document(loop_text("three_lags", 15), report))
    assert "verdict: Unstable(2)" in text
    assert "N_p: 0" in text
    assert "N_z: 2" in text
    assert f"N[{METHOD_NYQUIST}]: 2" in text
    assert f"crossing[{METHOD_NYQUIST}]:" in text
    assert "oracle: roots=2 routh=2 agrees=True" in text


def test_marginal_report_document() -> None:
    """Test a marginal verdict carries its reason and no oracle."""
    report = assess(make_loop("three_lags", 10))
    document = build_report_document(loop_text("three_lags", 10), report)
    assert document["verdict"]["kind"] == "Marginal"
    assert document["verdict"]["reason"]
    assert document["n_z"] is None
    assert document["oracle"] is None
    assert "N_z: -" in dump_text(document)


def test_sweep_document() -> None:
    """Test one row per gain."""
    results = gain_sweep(make_loop("three_lags", 1), [5, 15])
    document = build_sweep_document("1/((s/1+1)(s/2+1)(s/3+1))", results)
    assert [row["verdict"] for row in document["results"]] == ["Stable", "Unstable(2)"]
    assert [row["n"] for row in document["results"]] == [0, 2]
    text = dump_text(document)
    assert "gain            N_p  N    N_z  verdict" in text
    assert text.rstrip().endswith("Unstable(2)")


def test_verify_document() -> None:
    """Test verification statistics."""
    result = FuzzResult(
        agreements=7,
        skipped=1,
        disagreements=(make_loop("three_lags", 5),),
        reasons=("NoConvergence: stuck",),
    )
    document = build_verify_document(42, 9, 6, result)
    assert document["disagreements"] == ["5/((s/1+1)(s/2+1)(s/3+1))"]
    assert document["reasons"] == ["NoConvergence: stuck"]
    text = dump_text(document)
    assert "agreements: 7" in text
    assert "disagreements: 1" in text
    assert "NoConvergence: stuck" in text
