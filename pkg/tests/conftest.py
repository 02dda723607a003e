import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

_ACCEPTANCE_LINES = []


def dense_hadamard(m):
    """H^{⊗m} as an explicit matrix (test oracle only)."""
    h = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2)
    out = np.array([[1.0]])
    for _ in range(m):
        out = np.kron(out, h)
    return out


def kraus_channel(a_value, S_mask, n, rho):
    """sum_s K_s rho K_s^dagger with K_s = D_a P_s, built from explicit matrices."""
    d = 1 << n
    phases = np.array([(-1) ** bin(a_value & x).count("1") for x in range(d)], dtype=float)
    D = np.diag(phases)
    out = np.zeros((d, d), dtype=complex)
    for s in {x & S_mask for x in range(d)}:
        P = np.diag([1.0 if (x & S_mask) == s else 0.0 for x in range(d)])
        K = D @ P
        out += K @ rho @ K.conj().T
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def acceptance_report():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
