"""Reversible Bernstein–Vazirani oracles and the leaked-witness reduced channel.

Register order for the enlarged system is query (high bits), answer, then
witness (low bits), so a basis index decomposes as
``x << (1 + k) | y << k | e``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CapacityError, DimensionError
from .gf2 import BitString, SubsetMask, gather_bits, parity, sign_vector
from .qstate import MAX_DENSITY_QUBITS, MAX_STATE_QUBITS, DensityMatrix, StateVector


@dataclass(frozen=True)
class OracleSpec:
    a: BitString
    S: SubsetMask

    def __post_init__(self):
        if self.a.n != self.S.n:
            raise DimensionError(f"hidden string has length {self.a.n} but S lives in 1..{self.S.n}")

    @property
    def n(self) -> int:
        return self.a.n

    @property
    def k(self) -> int:
        return self.S.k


@dataclass(frozen=True)
class RegisterLayout:
    n_query: int
    n_witness: int = 0
    n_answer: int = 1

    def __post_init__(self):
        if self.n_answer != 1:
            raise ValueError("the answer register is a single qubit")
        if self.total > MAX_STATE_QUBITS:
            raise CapacityError(
                f"layout needs {self.total} qubits > {MAX_STATE_QUBITS}", cap="statevector_qubits"
            )

    @classmethod
    def for_spec(cls, spec: OracleSpec) -> RegisterLayout:
        return cls(spec.n, spec.k)

    @property
    def total(self) -> int:
        return self.n_query + self.n_answer + self.n_witness


def apply_function_oracle(values: Sequence[int], psi: StateVector) -> StateVector:
    """|x>|y> -> |x>|y XOR f(x)> for a truth table ``values`` indexed by x."""
    f = np.asarray(values, dtype=np.int64)
    n = psi.m - 1
    if f.size != 1 << n:
        raise DimensionError(f"truth table of size {f.size} does not match {n} query qubits")
    idx = np.arange(1 << psi.m, dtype=np.int64)
    return StateVector(psi.amps[idx ^ f[idx >> 1]])


def apply_standard_oracle(spec: OracleSpec, psi: StateVector, layout: RegisterLayout) -> StateVector:
    if layout.n_witness != 0 or layout.n_query != spec.n:
        raise DimensionError("standard oracle needs a witness-free layout matching the spec")
    if psi.m != spec.n + 1:
        raise DimensionError(f"state has {psi.m} qubits, expected {spec.n + 1}")
    return apply_function_oracle(parity(np.arange(1 << spec.n) & spec.a.value), psi)


def apply_phase_oracle(spec: OracleSpec, psi: StateVector) -> StateVector:
    if psi.m != spec.n:
        raise DimensionError(f"phase oracle acts on {spec.n} qubits, state has {psi.m}")
    return StateVector(psi.amps * sign_vector(spec.a))


def leaky_permutation(spec: OracleSpec) -> np.ndarray:
    """Image of every basis index under W_a^S.

    The map is an involution, so it is also its own inverse index table.
    """
    n, k = spec.n, spec.k
    idx = np.arange(1 << (n + 1 + k), dtype=np.int64)
    x = idx >> (k + 1)
    flip = parity(x & spec.a.value).astype(np.int64) << k
    return idx ^ flip ^ gather_bits(x, spec.S)


def apply_leaky_oracle(spec: OracleSpec, psi: StateVector, layout: RegisterLayout) -> StateVector:
    """|x>|y>|e> -> |x>|y XOR a.x>|e XOR x_S>, as an index permutation."""
    if layout.n_query != spec.n or layout.n_witness != spec.k:
        raise DimensionError("register layout does not match the oracle spec")
    if psi.m != layout.total:
        raise DimensionError(f"state has {psi.m} qubits, layout needs {layout.total}")
    perm = leaky_permutation(spec)
    out = np.empty_like(psi.amps)
    out[perm] = psi.amps
    return StateVector(out)


def block_labels(S: SubsetMask) -> np.ndarray:
    """x_S as an integer, for every query basis index x."""
    return gather_bits(np.arange(1 << S.n, dtype=np.int64), S)


def block_projector(s: BitString, S: SubsetMask) -> np.ndarray:
    """Diagonal projector onto {x : x_S = s} as a dense 0/1 matrix."""
    if s.n != S.k:
        raise DimensionError(f"block label of length {s.n} for a subset of size {S.k}")
    return np.diag((block_labels(S) == s.value).astype(np.float64))


def _coherence_mask(S: SubsetMask) -> np.ndarray:
    labels = block_labels(S)
    return labels[:, None] == labels[None, :]


def _channel_sign(a: BitString) -> np.ndarray:
    d = sign_vector(a)
    return np.outer(d, d)


def apply_reduced_channel(spec: OracleSpec, rho: DensityMatrix) -> DensityMatrix:
    """Dephase across x_S blocks, then conjugate by the phase oracle.

    Entry (x, x') survives only when x_S == x'_S and picks up
    (-1)^{a.(x XOR x')}.
    """
    if rho.m != spec.n:
        raise DimensionError(f"channel acts on {spec.n} qubits, state has {rho.m}")
    if spec.n > MAX_DENSITY_QUBITS:
        raise CapacityError(f"n={spec.n} > {MAX_DENSITY_QUBITS}", cap="density_qubits")
    out = np.where(_coherence_mask(spec.S), rho.entries * _channel_sign(spec.a), 0.0)
    return DensityMatrix(out)
