"""One test per acceptance criterion; each records a PASS/FAIL line for the summary."""

import pytest

from xisp.suites import run_suite

CRITERIA = [
    (1, "tsirelson-oracle"),
    (2, "three-bar-sandwich"),
    (3, "schreier-oracle"),
    (4, "restriction-bound"),
    (5, "basic-inequality"),
    (6, "scc-upper-certificates"),
    (7, "inequality-harness"),
    (8, "dependent-sequence"),
    (10, "budget-monotonicity"),
]


def _check(number, suite, record):
    result = run_suite(suite)
    status = "PASS" if result.passed else "FAIL"
    line = f"{status} criterion {number}: {suite} ({result.claim})"
    record(line)
    print(line)
    for detail in result.lines:
        print("   ", detail[:300])
    assert result.passed, "\n".join(result.lines)


@pytest.mark.parametrize("number,suite", CRITERIA, ids=[s for _, s in CRITERIA])
def test_criterion(number, suite, acceptance_line):
    _check(number, suite, acceptance_line)


def test_certificate_soundness(acceptance_line):
    _check(9, "certificate-soundness", acceptance_line)
