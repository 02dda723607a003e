"""Dense pure states, density matrices, and the transforms acting on them.

Layout: basis index ``i`` of an m-qubit array is the BitString whose
coordinate 1 is the most significant bit of ``i``.  Reshaping an amplitude
vector to ``[2] * m`` in C order therefore puts qubit ``q`` on axis ``q - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from .errors import CapacityError, DimensionError, PositivityError
from .gf2 import BitString, SubsetMask

MAX_STATE_QUBITS = 24
MAX_DENSITY_QUBITS = 12

NORM_TOL = 1e-10
ENTRY_TOL = 1e-12
EIG_FLOOR = -1e-9
# Distribution entries at or below this are reported as outside the support.
SUPPORT_TOL = 1e-12

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


def pairwise_sum(values: np.ndarray):
    """Tree summation in a fixed, platform-independent order.

    The array is zero-padded to a power of two and folded in halves, so the
    rounding behaviour does not depend on SIMD width or thread count.
    """
    x = np.asarray(values).ravel()
    if x.size == 0:
        return x.dtype.type(0)
    size = 1 << (x.size - 1).bit_length()
    if size != x.size:
        x = np.concatenate([x, np.zeros(size - x.size, dtype=x.dtype)])
    while x.size > 1:
        half = x.size // 2
        x = x[:half] + x[half:]
    return x[0]


def _qubits_of(n: int) -> int:
    m = n.bit_length() - 1
    if n <= 0 or (1 << m) != n:
        raise DimensionError(f"array length {n} is not a power of two")
    return m


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StateVector:
    amps: np.ndarray
    m: int = field(init=False)

    def __post_init__(self):
        amps = _readonly(self.amps)
        if amps.ndim != 1:
            raise DimensionError("amplitudes must be one-dimensional")
        m = _qubits_of(amps.size)
        if not 1 <= m <= MAX_STATE_QUBITS:
            raise CapacityError(f"{m} qubits outside 1..{MAX_STATE_QUBITS}", cap="statevector_qubits")
        norm2 = float(pairwise_sum(amps.real**2 + amps.imag**2))
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: |psi|^2 = {norm2!r}")
        object.__setattr__(self, "amps", amps)
        object.__setattr__(self, "m", m)

    def norm(self) -> float:
        return float(np.sqrt(pairwise_sum(np.abs(self.amps) ** 2)))

    def inner(self, other: StateVector) -> complex:
        """<self|other>."""
        if other.m != self.m:
            raise DimensionError(f"qubit count mismatch: {self.m} vs {other.m}")
        return complex(pairwise_sum(np.conj(self.amps) * other.amps))

    def amplitude(self, x: BitString) -> complex:
        if x.n != self.m:
            raise DimensionError(f"basis label of length {x.n} on {self.m} qubits")
        return complex(self.amps[x.index])


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    entries: np.ndarray
    m: int = field(init=False)

    def __post_init__(self):
        rho = _readonly(self.entries)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise DimensionError(f"density matrix must be square, got shape {rho.shape}")
        m = _qubits_of(rho.shape[0])
        if not 0 <= m <= MAX_DENSITY_QUBITS:
            raise CapacityError(f"{m} qubits outside 0..{MAX_DENSITY_QUBITS}", cap="density_qubits")
        if np.max(np.abs(rho - rho.conj().T)) > ENTRY_TOL:
            raise ValueError("density matrix is not Hermitian")
        tr = complex(pairwise_sum(np.diagonal(rho)))
        if abs(tr - 1.0) > NORM_TOL:
            raise ValueError(f"density matrix trace {tr!r} != 1")
        object.__setattr__(self, "entries", rho)
        object.__setattr__(self, "m", m)

    def trace(self) -> complex:
        return complex(pairwise_sum(np.diagonal(self.entries)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])

    def check_positive(self) -> None:
        """Raise PositivityError if the spectrum dips below the floor.

        Kept out of the constructor: eigendecomposition is O(8^m).
        """
        lam = self.min_eigenvalue()
        if lam < EIG_FLOOR:
            raise PositivityError(f"minimum eigenvalue {lam!r} below {EIG_FLOOR}")


@dataclass(frozen=True, eq=False)
class Distribution:
    """Outcome probabilities, held densely by basis index."""

    probs: np.ndarray
    m: int = field(init=False)

    def __post_init__(self):
        p = np.array(self.probs, dtype=np.float64, copy=True)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "m", _qubits_of(p.size))
        if np.any(p < 0.0) or np.any(p > 1.0 + NORM_TOL):
            raise ValueError("probabilities must lie in [0, 1]")
        total = float(pairwise_sum(p))
        if abs(total - 1.0) > NORM_TOL:
            raise ValueError(f"probabilities sum to {total!r}")

    def __getitem__(self, z: BitString) -> float:
        if z.n != self.m:
            raise DimensionError(f"outcome of length {z.n} for {self.m}-qubit distribution")
        return float(self.probs[z.index])

    def support(self) -> list[BitString]:
        return [BitString(int(i), self.m) for i in np.flatnonzero(self.probs > SUPPORT_TOL)]

    def items(self) -> Iterator[tuple[BitString, float]]:
        """Support entries in ascending basis-index order."""
        for z in self.support():
            yield z, float(self.probs[z.index])

    def as_dict(self) -> dict[str, float]:
        return {str(z): p for z, p in self.items()}


# --- constructors -----------------------------------------------------------

def basis_state(x: BitString) -> StateVector:
    amps = np.zeros(1 << x.n, dtype=np.complex128)
    amps[x.index] = 1.0
    return StateVector(amps)


def minus_state() -> StateVector:
    return StateVector(np.array([_INV_SQRT2, -_INV_SQRT2]))


def plus_state() -> StateVector:
    return StateVector(np.array([_INV_SQRT2, _INV_SQRT2]))


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """a ⊗ b with a's qubits in the high-order coordinates."""
    if a.m + b.m > MAX_STATE_QUBITS:
        raise CapacityError(
            f"tensor product needs {a.m + b.m} qubits > {MAX_STATE_QUBITS}", cap="statevector_qubits"
        )
    return StateVector(np.kron(a.amps, b.amps))


def to_density(psi: StateVector) -> DensityMatrix:
    if psi.m > MAX_DENSITY_QUBITS:
        raise CapacityError(f"{psi.m} qubits > {MAX_DENSITY_QUBITS} for a density matrix", cap="density_qubits")
    return DensityMatrix(np.outer(psi.amps, psi.amps.conj()))


def random_state(m: int, rng: np.random.Generator) -> StateVector:
    """Haar-distributed pure state."""
    v = rng.normal(size=1 << m) + 1j * rng.normal(size=1 << m)
    return StateVector(v / np.linalg.norm(v))


def random_density(m: int, rng: np.random.Generator, rank: Optional[int] = None) -> DensityMatrix:
    """Random mixed state G G† / Tr from a complex Gaussian G (Ginibre ensemble)."""
    d = 1 << m
    g = rng.normal(size=(d, rank or d)) + 1j * rng.normal(size=(d, rank or d))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return DensityMatrix(rho / np.trace(rho).real)


# --- Walsh–Hadamard ---------------------------------------------------------

def _wht_leading(arr: np.ndarray, m: int, qubits: tuple[int, ...]) -> np.ndarray:
    """Unnormalized butterflies on the leading axis of ``arr`` (length 2^m)."""
    rest = arr.shape[1:]
    out = np.array(arr, dtype=np.complex128, order="C", copy=True)
    for q in qubits:
        view = out.reshape((1 << (q - 1), 2, 1 << (m - q)) + rest)
        lo = view[:, 0].copy()
        hi = view[:, 1]
        view[:, 0] += hi
        lo -= hi
        view[:, 1] = lo
    return out


def _targets(targets: Optional[SubsetMask], m: int) -> tuple[int, ...]:
    if targets is None:
        return tuple(range(1, m + 1))
    if targets.n != m:
        raise DimensionError(f"targets over {targets.n} coordinates applied to {m} qubits")
    return targets.members


def hadamard_all(psi: StateVector, targets: Optional[SubsetMask] = None) -> StateVector:
    """H on every qubit in ``targets`` (default: all), by fast Walsh–Hadamard."""
    qs = _targets(targets, psi.m)
    out = _wht_leading(psi.amps, psi.m, qs)
    return StateVector(out * _INV_SQRT2 ** len(qs))


def hadamard_density(rho: DensityMatrix, targets: Optional[SubsetMask] = None) -> DensityMatrix:
    """H^T rho H^T for the tensor of Hadamards on ``targets``."""
    qs = _targets(targets, rho.m)
    half = _wht_leading(rho.entries, rho.m, qs)
    full = _wht_leading(half.T, rho.m, qs).T
    out = full * 0.5 ** len(qs)
    # H is real symmetric; re-symmetrize away the last-ulp asymmetry.
    return DensityMatrix((out + out.conj().T) / 2)


# --- reductions -------------------------------------------------------------

def _keep_axes(keep: SubsetMask, m: int) -> tuple[list[int], list[int]]:
    if keep.n != m:
        raise DimensionError(f"keep mask over {keep.n} coordinates applied to {m} qubits")
    kept = [q - 1 for q in keep.members]
    traced = [q - 1 for q in keep.complement().members]
    return kept, traced


def partial_trace(rho: DensityMatrix, keep: SubsetMask) -> DensityMatrix:
    """Reduced operator on the qubits in ``keep`` (ascending order)."""
    m = rho.m
    kept, traced = _keep_axes(keep, m)
    dk, dt = 1 << len(kept), 1 << len(traced)
    t = rho.entries.reshape([2] * (2 * m))
    perm = kept + traced + [m + q for q in kept] + [m + q for q in traced]
    t = t.transpose(perm).reshape(dk, dt, dk, dt)
    return DensityMatrix(np.einsum("iaja->ij", t))


def reduced_density(psi: StateVector, keep: SubsetMask) -> DensityMatrix:
    """Partial trace of |psi><psi| without forming the full projector."""
    m = psi.m
    kept, traced = _keep_axes(keep, m)
    if len(kept) > MAX_DENSITY_QUBITS:
        raise CapacityError(f"{len(kept)} kept qubits > {MAX_DENSITY_QUBITS}", cap="density_qubits")
    mat = psi.amps.reshape([2] * m).transpose(kept + traced).reshape(1 << len(kept), 1 << len(traced))
    rho = mat @ mat.conj().T
    return DensityMatrix((rho + rho.conj().T) / 2)


def measure_distribution(rho: DensityMatrix) -> Distribution:
    diag = np.diagonal(rho.entries).real.copy()
    worst = float(diag.min())
    if worst < EIG_FLOOR:
        raise PositivityError(f"diagonal entry {worst!r} below {EIG_FLOOR}")
    diag[diag < 0.0] = 0.0
    return Distribution(diag)


def measure_statevector(psi: StateVector) -> Distribution:
    return Distribution(psi.amps.real**2 + psi.amps.imag**2)


def sample(dist: Distribution, shots: int, seed: int) -> dict[BitString, int]:
    """Multinomial counts from a Philox4x64 counter-based generator.

    The generator is keyed by ``seed`` alone, so a fixed (distribution, shots,
    seed) triple always yields the same counts.
    """
    if shots < 1:
        raise ValueError("shots must be positive")
    rng = np.random.Generator(np.random.Philox(seed))
    p = dist.probs / pairwise_sum(dist.probs)
    counts = rng.multinomial(shots, p)
    return {BitString(int(i), dist.m): int(counts[i]) for i in np.flatnonzero(counts)}


def purity(rho: DensityMatrix) -> float:
    e = rho.entries
    return float(pairwise_sum(e.real**2 + e.imag**2))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy in bits; 0 log 0 = 0."""
    lam = np.linalg.eigvalsh(rho.entries)
    if lam[0] < EIG_FLOOR:
        raise PositivityError(f"eigenvalue {lam[0]!r} below {EIG_FLOOR}")
    lam = lam[lam > 0.0]
    return float(max(-np.sum(lam * np.log2(lam)), 0.0))
