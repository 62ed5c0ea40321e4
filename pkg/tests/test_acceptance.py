"""One test per acceptance criterion; the terminal summary repeats one PASS/FAIL line each."""

import json

import pytest

from niltheta.acceptance import CRITERIA, run_criterion

RESULTS = {}


@pytest.mark.parametrize("cid", list(CRITERIA), ids=[f"{int(c):02d}-{CRITERIA[c][0]}" for c in CRITERIA])
def test_criterion(cid):
    result = run_criterion(cid)
    RESULTS[cid] = result
    print(result.line())
    assert result.passed, json.dumps(result.details, default=str, indent=1)
