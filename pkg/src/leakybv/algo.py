"""Algorithm drivers: Deutsch–Jozsa, Bernstein–Vazirani (exact and leaky),
the hybrid coherent/value recovery strategy, Grover search, and exact parity."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .errors import CapacityError, DimensionError
from .gf2 import BitString, SubsetMask, dot_mod2, scatter, subvector, xor
from .oracle import (
    OracleSpec,
    RegisterLayout,
    apply_function_oracle,
    apply_leaky_oracle,
    apply_phase_oracle,
    apply_reduced_channel,
)
from .qstate import (
    DensityMatrix,
    Distribution,
    StateVector,
    basis_state,
    hadamard_all,
    hadamard_density,
    measure_distribution,
    measure_statevector,
    minus_state,
    purity,
    reduced_density,
    tensor,
)

Promise = Literal["none", "constant_or_balanced"]
LeakyPath = Literal["fast", "statevector"]

MAX_LEAKY_FAST_N = 12
MAX_LEAKY_STATEVECTOR_N = 10
MAX_GROVER_N = 20


@dataclass(frozen=True)
class BooleanFunctionTable:
    n: int
    values: tuple[int, ...]
    promise: Promise = "none"

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if self.n < 1:
            raise DimensionError("function tables need n >= 1")
        if len(self.values) != 1 << self.n:
            raise DimensionError(f"table has {len(self.values)} entries, expected 2^{self.n}")
        if any(v not in (0, 1) for v in self.values):
            raise ValueError("table entries must be bits")
        if self.promise == "constant_or_balanced":
            ones = sum(self.values)
            if ones not in (0, 1 << self.n) and 2 * ones != 1 << self.n:
                raise ValueError(f"table with {ones} ones is neither constant nor balanced")
        elif self.promise != "none":
            raise ValueError(f"unknown promise {self.promise!r}")

    @classmethod
    def from_str(cls, text: str, promise: Promise = "none") -> BooleanFunctionTable:
        n = len(text).bit_length() - 1
        return cls(n, tuple(int(c) for c in text), promise)

    def __str__(self) -> str:
        return "".join(map(str, self.values))


@dataclass(frozen=True)
class QueryLedger:
    coherent_queries: int = 0
    value_queries: int = 0

    @property
    def total(self) -> int:
        return self.coherent_queries + self.value_queries


@dataclass(frozen=True, eq=False)
class LeakyRunResult:
    exact_dist: Distribution
    recovered_Sbar: BitString
    certain: bool
    purity: float
    query_count: int
    reduced_state: DensityMatrix


def query_cost(n: int, k: int) -> int:
    """Cost of the coherent-then-value strategy: 1 + k below k = n, else n."""
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside 0..{n}")
    return n if k == n else 1 + k


# --- Deutsch–Jozsa ----------------------------------------------------------

def deutsch_jozsa_state(f: BooleanFunctionTable) -> StateVector:
    """Query register after spread, kickback, detect (answer qubit in |->)."""
    n = f.n
    if n + 1 > 24:
        raise CapacityError(f"n={n} needs {n + 1} qubits", cap="statevector_qubits")
    query = SubsetMask(tuple(range(1, n + 1)), n + 1)
    psi = tensor(basis_state(BitString.zeros(n)), minus_state())
    psi = hadamard_all(psi, query)
    psi = apply_function_oracle(f.values, psi)
    psi = hadamard_all(psi, query)
    # Kickback leaves the answer qubit in |->; project it out.
    pair = psi.amps.reshape(-1, 2)
    return StateVector((pair[:, 0] - pair[:, 1]) / math.sqrt(2))


def deutsch_jozsa_amplitude(f: BooleanFunctionTable) -> complex:
    return deutsch_jozsa_state(f).amps[0].item()


def deutsch_partition_label(f: BooleanFunctionTable) -> str:
    """'constant' or 'balanced' for a one-bit function, read from interference."""
    if f.n != 1:
        raise DimensionError("Deutsch's problem takes a one-bit function")
    amp = deutsch_jozsa_amplitude(f)
    label = "constant" if abs(amp) > 0.5 else "balanced"
    expected = "constant" if f.values[0] ^ f.values[1] == 0 else "balanced"
    if label != expected:
        raise RuntimeError(f"interference gave {label} for table {f}")
    return label


# --- Bernstein–Vazirani -----------------------------------------------------

def bernstein_vazirani_exact(a: BitString) -> Distribution:
    spec = OracleSpec(a, SubsetMask.empty(a.n))
    psi = hadamard_all(basis_state(BitString.zeros(a.n)))
    psi = apply_phase_oracle(spec, psi)
    return measure_statevector(hadamard_all(psi))


def _leaky_reduced_statevector(spec: OracleSpec) -> DensityMatrix:
    n, k = spec.n, spec.k
    psi = tensor(hadamard_all(basis_state(BitString.zeros(n))), minus_state())
    if k:
        psi = tensor(psi, basis_state(BitString.zeros(k)))
    psi = apply_leaky_oracle(spec, psi, RegisterLayout.for_spec(spec))
    return reduced_density(psi, SubsetMask(tuple(range(1, n + 1)), n + 1 + k))


def _leaky_reduced_fast(spec: OracleSpec) -> DensityMatrix:
    d = 1 << spec.n
    uniform = DensityMatrix(np.full((d, d), 1.0 / d))
    return apply_reduced_channel(spec, uniform)


def leaky_reduced_state(a: BitString, S: SubsetMask, path: LeakyPath = "fast") -> DensityMatrix:
    """Query-register state after one leaky query with the witness traced out."""
    spec = OracleSpec(a, S)
    if path == "fast":
        if spec.n > MAX_LEAKY_FAST_N:
            raise CapacityError(f"n={spec.n} > {MAX_LEAKY_FAST_N} on the channel path", cap="leaky_fast_n")
        return _leaky_reduced_fast(spec)
    if path == "statevector":
        if spec.n > MAX_LEAKY_STATEVECTOR_N:
            raise CapacityError(
                f"n={spec.n} > {MAX_LEAKY_STATEVECTOR_N} on the statevector path", cap="leaky_statevector_n"
            )
        return _leaky_reduced_statevector(spec)
    raise ValueError(f"unknown path {path!r}")


def run_leaky_bv(a: BitString, S: SubsetMask, path: LeakyPath = "fast") -> LeakyRunResult:
    rho = leaky_reduced_state(a, S, path)
    dist = measure_distribution(hadamard_density(rho))
    Sbar = S.complement()
    support = dist.support()
    labels = {subvector(z, Sbar) for z in support}
    if len(labels) == 1:
        (recovered,) = labels
    else:
        recovered = subvector(BitString(int(np.argmax(dist.probs)), a.n), Sbar)
    return LeakyRunResult(
        exact_dist=dist,
        recovered_Sbar=recovered,
        certain=len(labels) == 1,
        purity=purity(rho),
        query_count=1,
        reduced_state=rho,
    )


class ValueOracle:
    """Classical access to f_a(x) = a.x, counting calls."""

    def __init__(self, a: BitString):
        self._a = a
        self.calls = 0

    def __call__(self, x: BitString) -> int:
        self.calls += 1
        return dot_mod2(self._a, x)


def hybrid_recover(a: BitString, S: SubsetMask, path: LeakyPath = "fast") -> tuple[BitString, QueryLedger]:
    """One leaky interference query for a_Sbar, then value queries on e_i, i in S."""
    n, k = a.n, S.k
    values = ValueOracle(a)
    coherent = 0
    known = BitString.zeros(n)
    todo = S
    if k < n:
        res = run_leaky_bv(a, S, path)
        coherent += res.query_count
        if not res.certain:
            raise RuntimeError("interference readout did not fix the unleaked coordinates")
        known = scatter(res.recovered_Sbar, S.complement())
    else:
        todo = SubsetMask.full(n)
    leaked = BitString.from_bits([values(BitString.unit(i, n)) for i in todo.members])
    recovered = xor(known, scatter(leaked, todo))
    return recovered, QueryLedger(coherent_queries=coherent, value_queries=values.calls)


# --- Grover -----------------------------------------------------------------

def grover_optimal_iterations(n: int) -> int:
    """Iteration count putting (2t+1)θ closest to π/2.

    round(π/4 · 2^{n/2}) overshoots at n = 2, where one iteration is exact.
    """
    return math.floor(math.pi / (4 * math.asin(2 ** (-n / 2))))


def grover_success_probability(n: int, iterations: int) -> float:
    theta = math.asin(2 ** (-n / 2))
    return math.sin((2 * iterations + 1) * theta) ** 2


def grover_search(n: int, marked: BitString, iterations: int) -> Distribution:
    if n > MAX_GROVER_N:
        raise CapacityError(f"n={n} > {MAX_GROVER_N}", cap="grover_n")
    if marked.n != n:
        raise DimensionError(f"marked string has length {marked.n}, expected {n}")
    if iterations < 0:
        raise ValueError("iterations must be nonnegative")
    d = 1 << n
    amps = np.full(d, d**-0.5, dtype=np.complex128)
    for _ in range(iterations):
        amps[marked.index] *= -1
        # Inversion about the mean: H (2|0><0| - I) H.
        amps = hadamard_all(StateVector(amps)).amps.copy()
        amps *= -1
        amps[0] *= -1
        amps = hadamard_all(StateVector(amps)).amps.copy()
    return measure_statevector(StateVector(amps))


# --- exact parity -----------------------------------------------------------

def exact_parity(bits: Sequence[int]) -> tuple[int, QueryLedger]:
    """Parity of ``bits`` with ceil(N/2) Deutsch queries on consecutive pairs.

    Each query is over a one-bit oracle x -> (b_i, b_j)[x]; an odd trailing bit
    is paired with a constant 0.
    """
    b = [int(v) for v in bits]
    if not b:
        raise ValueError("need at least one bit")
    if any(v not in (0, 1) for v in b):
        raise ValueError("inputs must be bits")
    if len(b) % 2:
        b.append(0)
    result = 0
    queries = 0
    for i in range(0, len(b), 2):
        label = deutsch_partition_label(BooleanFunctionTable(1, (b[i], b[i + 1])))
        queries += 1
        result ^= label == "balanced"
    return int(result), QueryLedger(coherent_queries=queries)
