"""Bitstrings over F_2 and coordinate subsets.

Index convention used everywhere in the package: coordinate 1 is the
leftmost character of the text form and the most significant bit of the
integer basis index.  A length-n string ``x`` therefore has integer value
``sum(x_i << (n - i))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import CapacityError, DimensionError

MAX_BITS = 24


@dataclass(frozen=True, order=True)
class BitString:
    """Immutable element of F_2^n packed into a machine integer."""

    value: int
    n: int

    def __post_init__(self):
        if not 0 <= self.n <= MAX_BITS:
            raise CapacityError(f"bitstring length {self.n} outside 0..{MAX_BITS}", cap="bitstring_length")
        if not 0 <= self.value < (1 << self.n):
            raise DimensionError(f"value {self.value} does not fit in {self.n} bits")

    @classmethod
    def from_str(cls, text: str) -> BitString:
        if any(c not in "01" for c in text):
            raise ValueError(f"not a binary string: {text!r}")
        return cls(int(text, 2) if text else 0, len(text))

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> BitString:
        value = 0
        for b in bits:
            if b not in (0, 1):
                raise ValueError(f"bit must be 0 or 1, got {b!r}")
            value = (value << 1) | int(b)
        return cls(value, len(bits))

    @classmethod
    def zeros(cls, n: int) -> BitString:
        return cls(0, n)

    @classmethod
    def unit(cls, i: int, n: int) -> BitString:
        """Standard basis vector e_i (1-based coordinate)."""
        if not 1 <= i <= n:
            raise DimensionError(f"coordinate {i} outside 1..{n}")
        return cls(1 << (n - i), n)

    @classmethod
    def all_strings(cls, n: int) -> Iterator[BitString]:
        for v in range(1 << n):
            yield cls(v, n)

    @property
    def index(self) -> int:
        return self.value

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> (self.n - i)) & 1 for i in range(1, self.n + 1))

    def __getitem__(self, i: int) -> int:
        """Bit at 1-based coordinate ``i``."""
        if not 1 <= i <= self.n:
            raise IndexError(i)
        return (self.value >> (self.n - i)) & 1

    def __len__(self) -> int:
        return self.n

    def __str__(self) -> str:
        return format(self.value, f"0{self.n}b") if self.n else ""

    def __repr__(self) -> str:
        return f"BitString('{self}')"


@dataclass(frozen=True)
class SubsetMask:
    """Subset of coordinates {1..n}, stored ascending."""

    members: tuple[int, ...]
    n: int

    def __post_init__(self):
        if not 0 <= self.n <= MAX_BITS:
            raise CapacityError(f"ambient length {self.n} outside 0..{MAX_BITS}", cap="bitstring_length")
        m = self.members
        if any(not 1 <= i <= self.n for i in m):
            raise DimensionError(f"subset {set(m)} not contained in 1..{self.n}")
        if any(m[j] >= m[j + 1] for j in range(len(m) - 1)):
            raise ValueError("subset members must be strictly ascending (no duplicates)")

    @classmethod
    def of(cls, members: Iterable[int], n: int) -> SubsetMask:
        ms = list(members)
        if len(set(ms)) != len(ms):
            raise ValueError(f"duplicate coordinates in {ms}")
        return cls(tuple(sorted(ms)), n)

    @classmethod
    def full(cls, n: int) -> SubsetMask:
        return cls(tuple(range(1, n + 1)), n)

    @classmethod
    def empty(cls, n: int) -> SubsetMask:
        return cls((), n)

    @classmethod
    def from_bitmask(cls, mask: int, n: int) -> SubsetMask:
        return cls(tuple(i for i in range(1, n + 1) if (mask >> (n - i)) & 1), n)

    @classmethod
    def all_subsets(cls, n: int) -> Iterator[SubsetMask]:
        for mask in range(1 << n):
            yield cls.from_bitmask(mask, n)

    @property
    def k(self) -> int:
        return len(self.members)

    @property
    def bitmask(self) -> int:
        """Integer with a 1 at the basis-index bit of every member."""
        out = 0
        for i in self.members:
            out |= 1 << (self.n - i)
        return out

    def complement(self) -> SubsetMask:
        inside = set(self.members)
        return SubsetMask(tuple(i for i in range(1, self.n + 1) if i not in inside), self.n)

    def __contains__(self, i: int) -> bool:
        return i in self.members

    def __str__(self) -> str:
        return "{" + ",".join(map(str, self.members)) + "}"


def _check_same_length(x: BitString, y: BitString):
    if x.n != y.n:
        raise DimensionError(f"length mismatch: {x.n} vs {y.n}")


def dot_mod2(a: BitString, x: BitString) -> int:
    _check_same_length(a, x)
    return (a.value & x.value).bit_count() & 1


def xor(x: BitString, y: BitString) -> BitString:
    _check_same_length(x, y)
    return BitString(x.value ^ y.value, x.n)


def subvector(x: BitString, S: SubsetMask) -> BitString:
    """Coordinates of ``x`` at the members of ``S``, ascending index order."""
    if S.n != x.n:
        raise DimensionError(f"subset over {S.n} coordinates applied to length-{x.n} string")
    v = 0
    for i in S.members:
        v = (v << 1) | x[i]
    return BitString(v, S.k)


def scatter(v: BitString, S: SubsetMask) -> BitString:
    """Place ``v`` at the positions of ``S`` in a length-n string, zeros elsewhere."""
    if v.n != S.k:
        raise DimensionError(f"length-{v.n} string cannot fill {S.k} positions")
    out = 0
    for j, i in enumerate(S.members, start=1):
        out |= v[j] << (S.n - i)
    return BitString(out, S.n)


# Vectorized forms over arrays of basis indices, used by the amplitude kernels.

def parity(values: np.ndarray) -> np.ndarray:
    """Popcount mod 2, elementwise."""
    return (np.bitwise_count(values) & 1).astype(np.int8)


def gather_bits(indices: np.ndarray, S: SubsetMask) -> np.ndarray:
    """Integer value of ``subvector`` for every basis index in ``indices``."""
    out = np.zeros_like(indices)
    for i in S.members:
        out = (out << 1) | ((indices >> (S.n - i)) & 1)
    return out


def sign_vector(a: BitString) -> np.ndarray:
    """(-1)^{a.x} for every x in F_2^n, indexed by basis index."""
    xs = np.arange(1 << a.n, dtype=np.int64)
    return 1 - 2 * parity(xs & a.value).astype(np.int64)
