"""One test per acceptance criterion; each prints a PASS/FAIL line.

Set ACCEPTANCE_SCALE=small for fewer random seeds (truncations are unchanged).
"""

import json

import pytest

from h2trunc.acceptance import CRITERIA, PRESETS, CriterionResult, current_scale

LINES: list[str] = []


@pytest.mark.parametrize("number,name,fn", CRITERIA, ids=[f"c{n:02d}" for n, _, _ in CRITERIA])
def test_criterion(number, name, fn):
    import time

    t0 = time.perf_counter()
    passed, detail = fn(PRESETS[current_scale()])
    res = CriterionResult(number, name, bool(passed), detail, time.perf_counter() - t0)
    LINES.append(res.line())
    print(res.line())
    assert res.passed, json.dumps(detail, default=str)[:2000]
