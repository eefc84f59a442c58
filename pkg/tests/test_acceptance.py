"""Acceptance gate: every criterion at its pinned tolerance, one line each."""

import pytest

from sublap.acceptance import ACCEPTANCE


@pytest.mark.parametrize("criterion", ACCEPTANCE, ids=lambda fn: fn.__name__)
def test_criterion(criterion):
    res = criterion()
    print(f"{'PASS' if res.passed else 'FAIL'} {res.ident}: {res.detail}")
    assert res.passed, f"{res.ident}: {res.detail}"
