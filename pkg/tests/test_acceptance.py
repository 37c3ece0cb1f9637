"""Acceptance gate: runs every verification criterion at its stated tolerance
and prints one PASS/FAIL line per criterion (visible with ``pytest -s`` or on
failure).  The same suite backs the CLI ``verify`` subcommand.
"""

import pytest

from vbroadcast.acceptance import run_all

N_CRITERIA = 11


@pytest.fixture(scope="module")
def suite():
    results = {r.cid: r for r in run_all()}
    assert len(results) == N_CRITERIA
    return results


@pytest.mark.parametrize("cid", range(1, N_CRITERIA + 1))
def test_criterion(suite, cid):
    r = suite[cid]
    print(f"{'PASS' if r.passed else 'FAIL'} [{r.cid:2d}] {r.name}: {r.details}")
    assert r.passed, f"criterion {r.cid} ({r.name}): {r.details}"
