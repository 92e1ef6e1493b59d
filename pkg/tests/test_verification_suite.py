# tests/test_verification_suite.py
import sys
import os
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import pytest

from src.services.verification_suite import (SUITES, check_classification,
                                             check_hadamard_identities,
                                             check_parafermions,
                                             check_product_state_ca, check_sinkhorn,
                                             check_wedge, check_yang_baxter, run_suite)


@pytest.mark.parametrize("check", [
    check_hadamard_identities,
    check_wedge,
    check_parafermions,
    check_product_state_ca,
    check_classification,
])
def test_fast_checks_pass(check):
    result = check()
    assert result.passed, result.detail
    assert result.elapsed >= 0


@pytest.mark.parametrize("check", [check_sinkhorn, check_yang_baxter])
def test_sinkhorn_backed_checks_pass(check):
    result = check()
    assert result.passed, result.detail
    if check is check_sinkhorn:
        assert all(f"q={q}: 20/20" in result.detail for q in range(2, 8))


def test_all_suite_lists_every_check():
    assert len(SUITES["all"]) == 12
    named = {check for suite, checks in SUITES.items() if suite != "all" for check in checks}
    assert named == set(SUITES["all"])


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("everything")


if __name__ == "__main__":
    print("🚀 Starting Verification Suite Tests")
    exit_code = pytest.main([__file__, "-q"])
    print(f"\n🎯 Verification suite: {'✅ PASSED' if exit_code == 0 else '❌ FAILED'}")
    sys.exit(exit_code)
