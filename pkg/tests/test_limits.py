import numpy as np
import pytest
from hypothesis import given, strategies as st

from leakybv.errors import CapacityError, DimensionError
from leakybv.limits import (
    Ensemble,
    cloning_overlap_check,
    erasure_obstruction_check,
    holevo_chi,
    leakage_accessible_information_curve,
)
from leakybv.qstate import DensityMatrix, StateVector, basis_state, plus_state, random_density, random_state, to_density
from leakybv.gf2 import BitString

# chi of {|0>, |+>} with equal weights: H2(cos^2(pi/8)), mpmath to 30 digits.
CHI_ZERO_PLUS = 0.600876036692856101
ZERO = basis_state(BitString.from_str("0"))
ONE = basis_state(BitString.from_str("1"))


def test_holevo_examples():
    orth = Ensemble(((0.5, to_density(ZERO)), (0.5, to_density(ONE))))
    assert holevo_chi(orth).chi == pytest.approx(1.0, abs=1e-12)
    same = Ensemble(((0.5, to_density(ZERO)), (0.5, to_density(ZERO))))
    assert holevo_chi(same).chi == pytest.approx(0.0, abs=1e-12)
    mixed = Ensemble(((0.5, to_density(ZERO)), (0.5, to_density(plus_state()))))
    report = holevo_chi(mixed)
    assert report.chi == pytest.approx(CHI_ZERO_PLUS, abs=1e-12)
    assert report.bound == 1.0


def test_holevo_of_maximally_mixed_members():
    e = Ensemble(((1.0, DensityMatrix(np.eye(4) / 4)),))
    assert holevo_chi(e).chi == pytest.approx(0.0, abs=1e-12)


@given(st.integers(1, 3), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_holevo_bounded_by_qubit_count(m, size, seed):
    rng = np.random.default_rng(seed)
    w = rng.random(size)
    w /= w.sum()
    e = Ensemble(tuple((float(p), random_density(m, rng, rank=int(rng.integers(1, (1 << m) + 1)))) for p in w))
    chi = holevo_chi(e).chi
    assert -1e-12 <= chi <= m + 1e-12


def test_ensemble_invariants():
    with pytest.raises(ValueError):
        Ensemble(((0.7, to_density(ZERO)), (0.7, to_density(ONE))))
    with pytest.raises(DimensionError):
        Ensemble(((0.5, to_density(ZERO)), (0.5, DensityMatrix(np.eye(4) / 4))))


def test_cloning_examples():
    assert cloning_overlap_check(ZERO, ONE).cloneable
    assert cloning_overlap_check(ZERO, ZERO).cloneable
    r = cloning_overlap_check(ZERO, plus_state())
    assert not r.cloneable
    assert r.lhs == pytest.approx(2**-0.5) and r.rhs == pytest.approx(0.5)
    # Same ray up to a global phase: nothing to contradict.
    shifted = StateVector(1j * plus_state().amps)
    assert cloning_overlap_check(plus_state(), shifted).cloneable


def test_erasure_examples():
    assert not erasure_obstruction_check(ZERO, ONE).erasable_by_isolated_unitary
    assert erasure_obstruction_check(ZERO, StateVector(-ZERO.amps)).erasable_by_isolated_unitary
    assert not erasure_obstruction_check(ZERO, plus_state()).erasable_by_isolated_unitary


def test_overlap_checks_need_matching_dimension(rng):
    with pytest.raises(DimensionError):
        cloning_overlap_check(ZERO, random_state(2, rng))


@pytest.mark.parametrize("n", range(1, 6))
def test_curve_is_n_minus_k(n):
    curve = leakage_accessible_information_curve(n, trials=3, seed=11)
    assert curve.chains[0] == tuple(range(1, n + 1))
    assert len(curve.chains) == 3
    for row in curve.chi:
        assert row[0] == pytest.approx(n, abs=1e-10)
        assert all(row[k] >= row[k + 1] - 1e-12 for k in range(n))
        assert row == pytest.approx([n - k for k in range(n + 1)], abs=1e-10)


def test_curve_frozen_table():
    assert leakage_accessible_information_curve(3).table() == pytest.approx({0: 3.0, 1: 2.0, 2: 1.0, 3: 0.0}, abs=1e-10)


def test_curve_chain_argument_and_caps():
    curve = leakage_accessible_information_curve(3, chain=[3, 1, 2])
    assert curve.chains == ((3, 1, 2),)
    with pytest.raises(ValueError):
        leakage_accessible_information_curve(3, chain=[1, 1, 2])
    with pytest.raises(CapacityError):
        leakage_accessible_information_curve(9)
    a = leakage_accessible_information_curve(4, trials=2, seed=1, policy="random")
    b = leakage_accessible_information_curve(4, trials=2, seed=1, policy="random")
    assert a.chains == b.chains
