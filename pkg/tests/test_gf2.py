import itertools

import pytest

from leakybv.errors import CapacityError, DimensionError
from leakybv.gf2 import BitString, SubsetMask, dot_mod2, scatter, subvector, xor

B = BitString.from_str


def test_dot_examples():
    assert dot_mod2(B("101"), B("111")) == 0
    assert dot_mod2(B("11"), B("10")) == 1
    for x in BitString.all_strings(4):
        assert dot_mod2(BitString.zeros(4), x) == 0


def test_dot_length_mismatch():
    with pytest.raises(DimensionError):
        dot_mod2(B("10"), B("101"))


def test_xor_examples():
    assert xor(B("1010"), B("0110")) == B("1100")
    x = B("10110")
    assert xor(x, x) == BitString.zeros(5)
    assert xor(x, BitString.zeros(5)) == x
    with pytest.raises(DimensionError):
        xor(B("1"), B("11"))


def test_subvector_examples():
    x = B("10110")
    S = SubsetMask.of([1, 3], 5)
    assert subvector(x, S) == B("11")
    assert subvector(x, S.complement()) == B("010")
    assert subvector(x, SubsetMask.empty(5)).n == 0
    assert subvector(x, SubsetMask.full(5)) == x


def test_scatter_examples():
    assert scatter(B("11"), SubsetMask.of([1, 3], 5)) == B("10100")
    assert scatter(BitString.zeros(0), SubsetMask.empty(4)) == BitString.zeros(4)
    with pytest.raises(DimensionError):
        scatter(B("1"), SubsetMask.of([1, 2], 3))


def test_text_forms_and_layout():
    x = B("10110")
    assert str(x) == "10110"
    assert x.index == 0b10110
    assert x[1] == 1 and x[2] == 0
    assert str(SubsetMask.of([3, 1], 4)) == "{1,3}"
    assert str(SubsetMask.empty(3)) == "{}"
    assert SubsetMask.of([1, 3], 4).bitmask == 0b1010


def test_invariant_violations():
    with pytest.raises(CapacityError):
        BitString(0, 25)
    with pytest.raises(ValueError):
        B("10a")
    with pytest.raises(ValueError):
        SubsetMask.of([1, 1], 3)
    with pytest.raises(DimensionError):
        SubsetMask.of([4], 3)
    with pytest.raises(ValueError):
        SubsetMask((2, 1), 3)


@pytest.mark.parametrize("n", range(1, 11))
def test_split_recombine_exhaustive(n):
    subsets = list(SubsetMask.all_subsets(n)) if n <= 6 else [SubsetMask.of(range(1, n + 1, 2), n), SubsetMask.of([n], n)]
    for S in subsets:
        Sbar = S.complement()
        assert S.k + Sbar.k == n
        for x in BitString.all_strings(n):
            back = xor(scatter(subvector(x, S), S), scatter(subvector(x, Sbar), Sbar))
            assert back == x
            v = subvector(x, S)
            assert subvector(scatter(v, S), S) == v
            assert subvector(scatter(v, S), Sbar) == BitString.zeros(Sbar.k)


@pytest.mark.parametrize("n", range(1, 7))
def test_dot_is_linear(n):
    strings = list(BitString.all_strings(n))
    for a, x, y in itertools.product(strings, repeat=3):
        assert dot_mod2(a, xor(x, y)) == dot_mod2(a, x) ^ dot_mod2(a, y)


@pytest.mark.parametrize("n", range(1, 7))
def test_block_phase_cancels_leaked_part(n):
    strings = list(BitString.all_strings(n))
    for S in SubsetMask.all_subsets(n):
        Sbar = S.complement()
        for a in strings:
            for x in strings[:: max(1, len(strings) // 8)]:
                for xp in strings:
                    if subvector(x, S) != subvector(xp, S):
                        continue
                    lhs = dot_mod2(a, xor(x, xp))
                    rhs = dot_mod2(subvector(a, Sbar), xor(subvector(x, Sbar), subvector(xp, Sbar)))
                    assert lhs == rhs
