import numpy as np
import pytest

ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def prop1_sum(S, H):
    """Brute-force 1/2 sum_ij |s_ij| ||h_i - h_j||^2."""
    n = S.shape[0]
    total = 0.0
    for i in range(n):
        for j in range(n):
            diff = H[:, i] - H[:, j]
            total += abs(S[i, j]) * float(diff @ diff)
    return 0.5 * total


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1])):
        ok, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
