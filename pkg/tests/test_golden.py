"""Pinned structured reports for the reference scenarios.

Any intentional change to the report schema or to a computed invariant
must regenerate these files; an unintentional byte difference is a
regression.
"""
import pathlib

import pytest

from valkit.cli import parse_config_dict, render_structured, run

GOLDEN_DIR = pathlib.Path(__file__).parent / "golden"

CASES = {
    "artin_schreier_p2": {"scenario": "artin-schreier", "p": 2, "va": "-1", "format": "structured"},
    "artin_schreier_p3": {"scenario": "artin-schreier", "p": 3, "va": "-1", "format": "structured"},
    "kummer_p3_threshold": {"scenario": "kummer-schedule", "p": 3, "vp": "1", "format": "structured"},
    "kummer_p3_below": {
        "scenario": "kummer-schedule",
        "p": 3,
        "vp": "1",
        "gamma": "1/3",
        "format": "structured",
    },
    "hensel_immediate": {"scenario": "hensel-immediate", "format": "structured"},
    "unramified": {"scenario": "unramified", "format": "structured"},
}


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden_report(name):
    expected = (GOLDEN_DIR / f"{name}.json").read_bytes()
    got = render_structured(run(parse_config_dict(CASES[name]))).encode("utf-8")
    assert got == expected
