import itertools

import numpy as np
import pytest

from conftest import kraus_channel
from leakybv.errors import DimensionError
from leakybv.gf2 import BitString, SubsetMask, dot_mod2, subvector
from leakybv.oracle import (
    OracleSpec,
    RegisterLayout,
    apply_leaky_oracle,
    apply_reduced_channel,
    apply_standard_oracle,
    block_labels,
    block_projector,
    leaky_permutation,
)
from leakybv.qstate import (
    DensityMatrix,
    basis_state,
    hadamard_all,
    minus_state,
    random_density,
    random_state,
    reduced_density,
    tensor,
)

B = BitString.from_str


def _leaky(a, S, x, y, e):
    spec = OracleSpec(a, S)
    psi = tensor(tensor(basis_state(x), basis_state(y)), basis_state(e))
    return apply_leaky_oracle(spec, psi, RegisterLayout.for_spec(spec))


def test_documented_leaky_examples():
    # a=101, S={3}, x=111: answer flips by a.x = 0, witness picks up x_3 = 1.
    out = _leaky(B("101"), SubsetMask.of([3], 3), B("111"), B("0"), B("0"))
    assert out.amplitude(B("11101")) == 1.0
    # a=11, S={1,2}, x=10: answer 1, witness 10.
    out = _leaky(B("11"), SubsetMask.of([1, 2], 2), B("10"), B("0"), B("00"))
    assert out.amplitude(B("10110")) == 1.0


def test_layout_mismatch_rejected():
    spec = OracleSpec(B("10"), SubsetMask.of([1], 2))
    with pytest.raises(DimensionError):
        apply_leaky_oracle(spec, random_state(4, np.random.default_rng(0)), RegisterLayout(2, 0))
    with pytest.raises(DimensionError):
        OracleSpec(B("10"), SubsetMask.of([1], 3))


@pytest.mark.parametrize("n", range(1, 5))
def test_leaky_oracle_is_the_stated_permutation(n):
    strings = list(BitString.all_strings(n))
    for S in SubsetMask.all_subsets(n):
        k = S.k
        for a in strings:
            perm = leaky_permutation(OracleSpec(a, S))
            assert sorted(perm.tolist()) == list(range(1 << (n + 1 + k)))
            assert np.array_equal(perm[perm], np.arange(perm.size))
            for x, y, e in itertools.product(strings, (0, 1), range(1 << k)):
                src = x.index << (1 + k) | y << k | e
                want = x.index << (1 + k) | (y ^ dot_mod2(a, x)) << k | (e ^ subvector(x, S).value)
                assert perm[src] == want


@pytest.mark.parametrize("n", range(1, 5))
def test_empty_leak_is_standard_oracle(n, rng):
    for a in BitString.all_strings(n):
        spec = OracleSpec(a, SubsetMask.empty(n))
        psi = random_state(n + 1, rng)
        leaky = apply_leaky_oracle(spec, psi, RegisterLayout(n))
        std = apply_standard_oracle(spec, psi, RegisterLayout(n))
        assert np.array_equal(leaky.amps, std.amps)


@pytest.mark.parametrize("n", range(1, 6))
def test_block_projectors_resolve_identity(n):
    for S in SubsetMask.all_subsets(n):
        Ps = [block_projector(BitString(s, S.k), S) for s in range(1 << S.k)]
        assert np.array_equal(sum(Ps), np.eye(1 << n))
        for i, j in itertools.combinations(range(len(Ps)), 2):
            assert not np.any(Ps[i] @ Ps[j])
        for P in Ps:
            assert np.array_equal(P @ P, P)


def test_block_labels_example():
    labels = block_labels(SubsetMask.of([1, 3], 3))
    assert labels.tolist() == [0, 1, 0, 1, 2, 3, 2, 3]


@pytest.mark.parametrize("n", range(1, 5))
def test_channel_matches_kraus_sum(n, rng):
    for S in SubsetMask.all_subsets(n):
        for a in BitString.all_strings(n):
            rho = random_density(n, rng)
            got = apply_reduced_channel(OracleSpec(a, S), rho).entries
            want = kraus_channel(a.value, S.bitmask, n, rho.entries)
            assert np.max(np.abs(got - want)) < 1e-12


@pytest.mark.parametrize("n", range(1, 5))
def test_channel_matches_unitary_then_trace(n):
    for S in SubsetMask.all_subsets(n):
        for a in BitString.all_strings(n):
            spec = OracleSpec(a, S)
            k = S.k
            query = hadamard_all(basis_state(BitString.zeros(n)))
            psi = tensor(query, minus_state())
            if k:
                psi = tensor(psi, basis_state(BitString.zeros(k)))
            out = apply_leaky_oracle(spec, psi, RegisterLayout.for_spec(spec))
            red = reduced_density(out, SubsetMask(tuple(range(1, n + 1)), n + 1 + k))
            d = 1 << n
            chan = apply_reduced_channel(spec, DensityMatrix(np.full((d, d), 1.0 / d)))
            assert np.max(np.abs(red.entries - chan.entries)) < 1e-12


def test_channel_ignores_leaked_part_of_a(rng):
    n = 4
    S = SubsetMask.of([2, 4], n)
    rho = random_density(n, rng)
    base = apply_reduced_channel(OracleSpec(B("1010"), S), rho).entries
    for a in BitString.all_strings(n):
        if a.value & ~S.bitmask & 0xF == 0b1010 & ~S.bitmask & 0xF:
            assert np.max(np.abs(apply_reduced_channel(OracleSpec(a, S), rho).entries - base)) < 1e-15


@pytest.mark.parametrize("answer", ["zero", "one", "random"])
@pytest.mark.parametrize("n", range(1, 5))
def test_no_cross_block_coherence_for_any_answer_state(n, answer, rng):
    ans = {"zero": basis_state(B("0")), "one": basis_state(B("1")), "random": random_state(1, rng)}[answer]
    for S in SubsetMask.all_subsets(n):
        if S.k == 0:
            continue
        a = BitString(int(rng.integers(1 << n)), n)
        spec = OracleSpec(a, S)
        psi = tensor(tensor(random_state(n, rng), ans), basis_state(BitString.zeros(S.k)))
        out = apply_leaky_oracle(spec, psi, RegisterLayout.for_spec(spec))
        red = reduced_density(out, SubsetMask(tuple(range(1, n + 1)), n + 1 + S.k)).entries
        labels = block_labels(S)
        cross = labels[:, None] != labels[None, :]
        assert np.max(np.abs(red[cross]), initial=0.0) < 1e-12
