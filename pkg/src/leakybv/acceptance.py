"""Acceptance battery: every exit criterion at its pinned tolerance.

Each ``criterion_*`` function returns a :class:`CriterionResult`; expected
values are computed from closed forms evaluated independently of the
simulation path under test.  ``quick=True`` shrinks the sweeps for smoke
runs and never changes a tolerance.
"""

from __future__ import annotations

import functools
import math
import os
import tempfile
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import oracle
from .algo import (
    BooleanFunctionTable,
    deutsch_jozsa_amplitude,
    exact_parity,
    grover_search,
    hybrid_recover,
    leaky_reduced_state,
    run_leaky_bv,
)
from .exdsl import ExperimentSpec, parse, parse_with_diagnostics, render
from .gf2 import BitString, SubsetMask
from .limits import Ensemble, cloning_overlap_check, erasure_obstruction_check, holevo_chi
from .qstate import (
    StateVector,
    basis_state,
    hadamard_all,
    random_density,
    random_state,
    to_density,
)

SEED = 20240611


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    measured: float
    tolerance: float
    passed: bool
    seconds: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"[{status}] C{self.number:02d} {self.name}: measured={self.measured:.3e} "
            f"tol={self.tolerance:.1e} time={self.seconds:.2f}s {self.detail}".rstrip()
        )


def _rng(offset: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(SEED + offset))


def _timed(number: int, name: str, tolerance: float, fn: Callable[[], tuple[float, bool, str]]) -> CriterionResult:
    start = time.perf_counter()
    try:
        measured, passed, detail = fn()
    except Exception as exc:  # a broken invariant is a failed criterion, not a crash
        measured, passed, detail = float("nan"), False, f"raised {type(exc).__name__}: {exc}"
    return CriterionResult(number, name, float(measured), tolerance, bool(passed), time.perf_counter() - start, detail)


def _random_subsets(rng: np.random.Generator, n: int, count: int) -> list[SubsetMask]:
    return [SubsetMask.from_bitmask(int(m), n) for m in rng.integers(0, 1 << n, size=count)]


def _law(a: BitString, S: SubsetMask) -> np.ndarray:
    """2^-k 1[z_Sbar == a_Sbar] for every z, from index arithmetic alone."""
    z = np.arange(1 << a.n)
    keep = ((1 << a.n) - 1) ^ S.bitmask
    return np.where(((z ^ a.value) & keep) == 0, 2.0**-S.k, 0.0)


# --- criteria 1 and 6: one brute-force sweep ---------------------------------

@functools.lru_cache(maxsize=2)
def _distribution_sweep(quick: bool) -> tuple[float, float, int]:
    rng = _rng(1)
    worst_p = worst_purity = 0.0
    runs = 0
    exhaustive_to, sampled = (4, range(5, 7)) if quick else (5, range(6, 9))
    per_n = 4 if quick else 20
    plan = [(n, list(SubsetMask.all_subsets(n))) for n in range(1, exhaustive_to + 1)]
    plan += [(n, _random_subsets(rng, n, per_n)) for n in sampled]
    for n, subsets in plan:
        for S in subsets:
            for a in BitString.all_strings(n):
                res = run_leaky_bv(a, S, path="statevector")
                worst_p = max(worst_p, float(np.max(np.abs(res.exact_dist.probs - _law(a, S)))))
                worst_purity = max(worst_purity, abs(res.purity - 2.0**-S.k))
                runs += 1
    return worst_p, worst_purity, runs


def criterion_01_distribution_law(quick: bool = False) -> CriterionResult:
    def body():
        worst, _, runs = _distribution_sweep(quick)
        return worst, worst <= 1e-10, f"runs={runs}"

    return _timed(1, "leakage distribution law", 1e-10, body)


def criterion_06_purity_law(quick: bool = False) -> CriterionResult:
    def body():
        _, worst, runs = _distribution_sweep(quick)
        return worst, worst <= 1e-10, f"runs={runs}"

    return _timed(6, "purity law Tr rho^2 = 2^-k", 1e-10, body)


# --- criterion 2 ------------------------------------------------------------

def criterion_02_channel_equivalence(quick: bool = False) -> CriterionResult:
    def body():
        worst = 0.0
        top = 4 if quick else 6
        for n in range(1, top + 1):
            rho0 = to_density(hadamard_all(basis_state(BitString.zeros(n))))
            for S in SubsetMask.all_subsets(n):
                for a in BitString.all_strings(n):
                    ref = leaky_reduced_state(a, S, path="statevector").entries
                    fast = oracle.apply_reduced_channel(oracle.OracleSpec(a, S), rho0).entries
                    worst = max(worst, float(np.max(np.abs(ref - fast))))
        return worst, worst <= 1e-12, f"n<={top}"

    return _timed(2, "statevector+trace == reduced channel", 1e-12, body)


# --- criterion 3 ------------------------------------------------------------

def criterion_03_aS_independence(quick: bool = False) -> CriterionResult:
    def body():
        rng = _rng(3)
        worst = 0.0
        top = 4 if quick else 6
        for n in range(1, top + 1):
            for S in SubsetMask.all_subsets(n):
                keep = ((1 << n) - 1) ^ S.bitmask
                for _ in range(10):
                    rho = random_density(n, rng)
                    first: dict[int, np.ndarray] = {}
                    for a in BitString.all_strings(n):
                        out = oracle.apply_reduced_channel(oracle.OracleSpec(a, S), rho).entries
                        ref = first.setdefault(a.value & keep, out)
                        worst = max(worst, float(np.max(np.abs(out - ref))))
        return worst, worst <= 1e-12, f"n<={top}"

    return _timed(3, "channel depends on a only through a_Sbar", 1e-12, body)


# --- criterion 4 ------------------------------------------------------------

def criterion_04_query_cost(quick: bool = False) -> CriterionResult:
    def body():
        rng = _rng(4)
        n, trials = (6, 5) if quick else (8, 50)
        failures = 0
        for k in range(n + 1):
            expected = 1 + k if k < n else n
            for _ in range(trials):
                a = BitString(int(rng.integers(0, 1 << n)), n)
                S = SubsetMask.of((int(i) + 1 for i in rng.choice(n, size=k, replace=False)), n)
                got, ledger = hybrid_recover(a, S)
                failures += (got != a) or (ledger.total != expected)
        return failures, failures == 0, f"n={n} trials/k={trials}"

    return _timed(4, "hybrid recovery cost 1+k / n", 0.0, body)


# --- criterion 5 ------------------------------------------------------------

def criterion_05_endpoints(quick: bool = False) -> CriterionResult:
    def body():
        worst = 0.0
        top = 5 if quick else 8
        for n in range(1, top + 1):
            uniform = np.full(1 << n, 2.0**-n)
            for a in BitString.all_strings(n):
                r0 = run_leaky_bv(a, SubsetMask.empty(n), path="statevector")
                point = np.zeros(1 << n)
                point[a.value] = 1.0
                worst = max(worst, float(np.max(np.abs(r0.exact_dist.probs - point))), abs(r0.purity - 1.0))
                rn = run_leaky_bv(a, SubsetMask.full(n), path="statevector")
                worst = max(worst, float(np.max(np.abs(rn.exact_dist.probs - uniform))), abs(rn.purity - 2.0**-n))
        return worst, worst <= 1e-10, f"n<={top}"

    return _timed(5, "k=0 point mass / k=n uniform", 1e-10, body)


# --- criterion 7 ------------------------------------------------------------

def _promise_table(rng: np.random.Generator, n: int) -> tuple[BooleanFunctionTable, float]:
    d = 1 << n
    if rng.integers(0, 2):
        c = int(rng.integers(0, 2))
        return BooleanFunctionTable(n, (c,) * d, "constant_or_balanced"), 1.0 - 2 * c
    values = np.zeros(d, dtype=int)
    values[rng.choice(d, size=d // 2, replace=False)] = 1
    return BooleanFunctionTable(n, tuple(values), "constant_or_balanced"), 0.0


def criterion_07_deutsch_jozsa(quick: bool = False) -> CriterionResult:
    def body():
        rng = _rng(7)
        worst = 0.0
        count = 40 if quick else 200
        for _ in range(count):
            n = int(rng.integers(1, 9))
            values = rng.integers(0, 2, size=1 << n)
            f = BooleanFunctionTable(n, tuple(values))
            direct = float(np.sum((-1.0) ** values)) / (1 << n)
            worst = max(worst, abs(deutsch_jozsa_amplitude(f) - direct))
        for _ in range(10 if quick else 50):
            f, target = _promise_table(rng, int(rng.integers(1, 9)))
            worst = max(worst, abs(deutsch_jozsa_amplitude(f) - target))
        return worst, worst <= 1e-12, f"random={count}"

    return _timed(7, "Deutsch-Jozsa amplitude", 1e-12, body)


# --- criterion 8 ------------------------------------------------------------

def criterion_08_exact_parity(quick: bool = False) -> CriterionResult:
    def body():
        failures = 0
        top = 6 if quick else 10
        for N in range(1, top + 1):
            for v in range(1 << N):
                bits = [(v >> (N - 1 - i)) & 1 for i in range(N)]
                got, ledger = exact_parity(bits)
                failures += got != (sum(bits) & 1) or ledger.coherent_queries != math.ceil(N / 2)
        return failures, failures == 0, f"N<={top}"

    return _timed(8, "exact parity with ceil(N/2) queries", 0.0, body)


# --- criterion 9 ------------------------------------------------------------

def criterion_09_grover(quick: bool = False) -> CriterionResult:
    def body():
        rng = _rng(9)
        worst = 0.0
        top = 8 if quick else 12
        for n in range(1, top + 1):
            marked = BitString(int(rng.integers(0, 1 << n)), n)
            theta = math.asin(2 ** (-n / 2))
            # Range from the rounded estimate; it bounds the exact optimum.
            for t in range(2 * round(math.pi / 4 * 2 ** (n / 2)) + 1):
                p = grover_search(n, marked, t)[marked]
                worst = max(worst, abs(p - math.sin((2 * t + 1) * theta) ** 2))
        exact = abs(grover_search(2, BitString.from_str("01"), 1)[BitString.from_str("01")] - 1.0)
        return worst, worst <= 1e-9 and exact <= 1e-12, f"n<={top} |P(n=2,t=1)-1|={exact:.1e}"

    return _timed(9, "Grover rotation law", 1e-9, body)


# --- criterion 10 -----------------------------------------------------------

def _binary_entropy(p: float) -> float:
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def criterion_10_holevo(quick: bool = False) -> CriterionResult:
    def body():
        rng = _rng(10)
        violations = 0
        for _ in range(50 if quick else 200):
            m = int(rng.integers(1, 5))
            size = int(rng.integers(1, 7))
            weights = rng.dirichlet(np.ones(size))
            members = []
            for _ in range(size):
                if rng.integers(0, 2):
                    members.append(to_density(random_state(m, rng)))
                else:
                    members.append(random_density(m, rng, rank=int(rng.integers(1, (1 << m) + 1))))
            chi = holevo_chi(Ensemble(tuple(zip(weights, members)))).chi
            violations += not (0.0 <= chi <= m + 1e-9)
        # Average of |0><0| and |+><+| is [[3/4, 1/4], [1/4, 1/4]]; roots of
        # its characteristic polynomial by the quadratic formula.
        tr, det = 1.0, 3 / 16 - 1 / 16
        lam = (tr + math.sqrt(tr * tr - 4 * det)) / 2
        oracle_chi = _binary_entropy(lam)
        plus = StateVector(np.array([1, 1]) / math.sqrt(2))
        two = Ensemble(((0.5, to_density(basis_state(BitString.from_str("0")))), (0.5, to_density(plus))))
        err = abs(holevo_chi(two).chi - oracle_chi)
        return err, violations == 0 and err <= 1e-9, f"bound violations={violations}"

    return _timed(10, "Holevo bound and two-state value", 1e-9, body)


# --- criterion 11 -----------------------------------------------------------

def _pair(rng: np.random.Generator, m: int, cls: int) -> tuple[StateVector, StateVector]:
    psi = random_state(m, rng)
    if cls == 0:
        return psi, random_state(m, rng)
    if cls == 1:
        return psi, StateVector(psi.amps * np.exp(1j * rng.uniform(0, 2 * math.pi)))
    if cls == 2:
        # Gram-Schmidt a random state against psi.
        v = random_state(m, rng).amps
        v = v - np.vdot(psi.amps, v) * psi.amps
        return psi, StateVector(v / np.linalg.norm(v))
    return psi, psi


def criterion_11_cloning_erasure(quick: bool = False) -> CriterionResult:
    def body():
        rng = _rng(11)
        s = 1 / math.sqrt(2)
        zero, one = np.array([1, 0]), np.array([0, 1])
        edge = [
            (zero, zero), (zero, one), (zero, np.array([s, s])),
            (zero, np.array([0.5, math.sqrt(3) / 2])), (zero, 1j * zero),
            (np.array([s, s]), np.array([s, -s])),
        ]
        pairs = [(StateVector(x), StateVector(y)) for x, y in edge]
        for i in range(100 if quick else 500):
            pairs.append(_pair(rng, int(rng.integers(1, 5)), i % 4))
        wrong = 0
        for psi, phi in pairs:
            ov = complex(np.vdot(psi.amps, phi.amps))
            ray = abs(abs(ov) - 1.0) <= 1e-10
            wrong += cloning_overlap_check(psi, phi).cloneable != (abs(ov) <= 1e-10 or ray)
            wrong += erasure_obstruction_check(psi, phi).erasable_by_isolated_unitary != ray
        return wrong, wrong == 0, f"pairs={len(pairs)}"

    return _timed(11, "no-cloning / no-erasure classification", 0.0, body)


# --- criterion 12 -----------------------------------------------------------

def random_spec(rng: np.random.Generator) -> ExperimentSpec:
    """A random valid spec; used by the round-trip check."""
    kind = ("leaky_bv", "bv", "deutsch_jozsa", "grover", "parity", "holevo_curve", "sweep")[int(rng.integers(0, 7))]
    n = int(rng.integers(1, 9))
    seed = int(rng.integers(0, 2**63)) * int(rng.integers(1, 3))
    output = ("csv", "json")[int(rng.integers(0, 2))]
    sampled = {}
    if kind in ("leaky_bv", "bv", "deutsch_jozsa", "grover"):
        shots = rng.integers(0, 2)
        sampled = {"mode": "shots" if shots else "exact", "shots": int(rng.integers(1, 10**6)) if shots else None}
    if kind == "parity":
        return ExperimentSpec(kind, bits=BitString(int(rng.integers(0, 1 << n)), n), seed=seed, output=output)
    if kind in ("holevo_curve", "sweep"):
        policy = ("nested_prefix", "random")[int(rng.integers(0, 2))]
        extra = {"k": int(rng.integers(0, n + 1)) if rng.integers(0, 2) else None} if kind == "sweep" else {}
        return ExperimentSpec(kind, n=n, trials=int(rng.integers(1, 100)), subset_policy=policy,
                              seed=seed, output=output, **extra)
    if kind == "deutsch_jozsa":
        f = "".join(map(str, rng.integers(0, 2, size=1 << n)))
        return ExperimentSpec(kind, n=n, f=f, promise="none", seed=seed, output=output, **sampled)
    if kind == "grover":
        it = "optimal" if rng.integers(0, 2) else int(rng.integers(0, 50))
        return ExperimentSpec(kind, n=n, marked=BitString(int(rng.integers(0, 1 << n)), n), iterations=it,
                              seed=seed, output=output, **sampled)
    a = "random" if rng.integers(0, 2) else BitString(int(rng.integers(0, 1 << n)), n)
    if kind == "bv":
        return ExperimentSpec(kind, n=n, a=a, seed=seed, output=output, **sampled)
    if rng.integers(0, 2):
        S, k = "random_subset", int(rng.integers(0, n + 1))
    else:
        S = SubsetMask.from_bitmask(int(rng.integers(0, 1 << n)), n)
        k = S.k
    return ExperimentSpec(kind, n=n, a=a, S=S, k=k, seed=seed, output=output, **sampled)


def _noise(rng: np.random.Generator, template: bytes) -> bytes:
    style = int(rng.integers(0, 3))
    if style == 0:
        return rng.bytes(int(rng.integers(0, 4096)))
    if style == 1:
        alphabet = np.frombuffer(b"experiment leaky_bv{}=,#01234\n\r\t Sakn", dtype=np.uint8)
        return bytes(rng.choice(alphabet, size=int(rng.integers(0, 4096))))
    blob = bytearray(template)
    for _ in range(int(rng.integers(1, 8))):
        pos = int(rng.integers(0, len(blob) + 1))
        if rng.integers(0, 2) and blob:
            del blob[min(pos, len(blob) - 1)]
        else:
            blob.insert(pos, int(rng.integers(0, 256)))
    return bytes(blob)


_DETERMINISM_SPECS = (
    "experiment leaky_bv { n=6 a=random S=random_subset k=3 mode=shots shots=5000 seed=11 output=csv }",
    "experiment bv { n=4 a=1011 mode=shots shots=1000 seed=7 output=json }",
    "experiment grover { n=5 marked=10110 mode=shots shots=777 seed=3 }",
    "experiment sweep { n=5 trials=3 subset_policy=random seed=5 }",
)


def criterion_12_determinism_and_parser(quick: bool = False) -> CriterionResult:
    def body():
        from .cli import run

        problems = 0
        with tempfile.TemporaryDirectory() as tmp:
            for i, text in enumerate(_DETERMINISM_SPECS):
                path = os.path.join(tmp, f"s{i}.qex")
                with open(path, "w") as fh:
                    fh.write(text)
                outs = []
                for rep in range(2):
                    out = os.path.join(tmp, f"s{i}_{rep}.out")
                    problems += run(path, out) != 0
                    with open(out, "rb") as fh:
                        outs.append(fh.read())
                problems += outs[0] != outs[1]
        rng = _rng(12)
        for _ in range(200 if quick else 1000):
            spec = random_spec(rng)
            problems += parse(render(spec)) != spec
        template = render(random_spec(rng)).encode()
        for _ in range(1000 if quick else 10_000):
            blob = _noise(rng, template)
            try:
                spec, diags = parse_with_diagnostics(blob)
            except Exception:  # noqa: BLE001 - any escape is a failure
                problems += 1
                continue
            problems += spec is None and not diags
        return problems, problems == 0, "determinism, round-trip, fuzz"

    return _timed(12, "determinism and parser round-trip", 0.0, body)


CRITERIA = (
    criterion_01_distribution_law,
    criterion_02_channel_equivalence,
    criterion_03_aS_independence,
    criterion_04_query_cost,
    criterion_05_endpoints,
    criterion_06_purity_law,
    criterion_07_deutsch_jozsa,
    criterion_08_exact_parity,
    criterion_09_grover,
    criterion_10_holevo,
    criterion_11_cloning_erasure,
    criterion_12_determinism_and_parser,
)


def run_battery(quick: bool = False) -> list[CriterionResult]:
    _distribution_sweep.cache_clear()
    return [c(quick) for c in CRITERIA]
