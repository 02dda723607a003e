"""Holevo quantity, cloning and erasure overlap checks, and the accessible
information of leaked Bernstein–Vazirani states as the leak grows."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np

from .algo import leaky_reduced_state
from .errors import CapacityError, DimensionError
from .gf2 import BitString, SubsetMask
from .qstate import NORM_TOL, DensityMatrix, StateVector, von_neumann_entropy

MAX_CURVE_N = 8


@dataclass(frozen=True, eq=False)
class Ensemble:
    items: tuple[tuple[float, DensityMatrix], ...]

    def __post_init__(self):
        items = tuple((float(p), rho) for p, rho in self.items)
        object.__setattr__(self, "items", items)
        if not items:
            raise ValueError("empty ensemble")
        if len({rho.m for _, rho in items}) != 1:
            raise DimensionError("ensemble members live on different qubit counts")
        if any(p < 0 for p, _ in items):
            raise ValueError("negative ensemble weight")
        total = sum(p for p, _ in items)
        if abs(total - 1.0) > NORM_TOL:
            raise ValueError(f"ensemble weights sum to {total!r}")

    @property
    def m(self) -> int:
        return self.items[0][1].m

    def average(self) -> DensityMatrix:
        avg = sum(p * rho.entries for p, rho in self.items)
        return DensityMatrix((avg + avg.conj().T) / 2)


@dataclass(frozen=True)
class HolevoReport:
    chi: float
    bound: float
    average_state_entropy: float
    conditional_term: float


def holevo_chi(e: Ensemble) -> HolevoReport:
    avg_entropy = von_neumann_entropy(e.average())
    conditional = sum(p * von_neumann_entropy(rho) for p, rho in e.items)
    chi = avg_entropy - conditional
    # Concavity makes chi >= 0; absorb last-digit cancellation only.
    if -1e-12 < chi < 0.0:
        chi = 0.0
    return HolevoReport(chi=chi, bound=float(e.m), average_state_entropy=avg_entropy, conditional_term=conditional)


@dataclass(frozen=True)
class CloningReport:
    lhs: complex
    rhs: complex
    cloneable: bool


@dataclass(frozen=True)
class ErasureReport:
    overlap: complex
    erasable_by_isolated_unitary: bool


def _check_pair(psi: StateVector, phi: StateVector):
    if psi.m != phi.m:
        raise DimensionError(f"states on {psi.m} and {phi.m} qubits")


def cloning_overlap_check(psi: StateVector, phi: StateVector) -> CloningReport:
    """A cloner must send <psi|phi> to <psi|phi>^2.

    Only orthogonal pairs and pairs on the same ray (|<psi|phi>| = 1) escape
    the contradiction.
    """
    _check_pair(psi, phi)
    lhs = psi.inner(phi)
    ok = abs(lhs) <= 1e-10 or abs(abs(lhs) - 1.0) <= 1e-10
    return CloningReport(lhs=lhs, rhs=lhs * lhs, cloneable=ok)


def erasure_obstruction_check(phi1: StateVector, phi2: StateVector) -> ErasureReport:
    """A unitary merging both states into |0> would force |<phi1|phi2>| = 1."""
    _check_pair(phi1, phi2)
    overlap = phi1.inner(phi2)
    return ErasureReport(overlap=overlap, erasable_by_isolated_unitary=abs(abs(overlap) - 1.0) <= 1e-10)


# --- leakage vs accessible information --------------------------------------

@dataclass(frozen=True)
class InformationCurve:
    """Holevo quantity of the uniform-a ensemble, per chain and per k."""

    n: int
    chains: tuple[tuple[int, ...], ...]
    chi: tuple[tuple[float, ...], ...]

    def table(self, chain: int = 0) -> dict[int, float]:
        return dict(enumerate(self.chi[chain]))


def _ensemble_for(n: int, S: SubsetMask) -> Ensemble:
    w = 1.0 / (1 << n)
    return Ensemble(tuple((w, leaky_reduced_state(a, S)) for a in BitString.all_strings(n)))


def leakage_accessible_information_curve(
    n: int,
    trials: int = 1,
    seed: int = 0,
    policy: Literal["nested_prefix", "random"] = "nested_prefix",
    chain: Optional[Sequence[int]] = None,
) -> InformationCurve:
    """chi(k) for the ensemble {rho_a^{S_k} : a uniform}, along nested chains.

    Chain 0 is ``chain`` if given, else the prefix order 1, 2, ..., n (or a
    random order under ``policy='random'``).  Further chains are random
    coordinate orders drawn from ``seed``.
    """
    if not 1 <= n <= MAX_CURVE_N:
        raise CapacityError(f"n={n} outside 1..{MAX_CURVE_N}", cap="holevo_curve_n")
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = np.random.Generator(np.random.Philox(seed))
    orders: list[tuple[int, ...]] = []
    for t in range(trials):
        if t == 0 and chain is not None:
            order = tuple(chain)
            if sorted(order) != list(range(1, n + 1)):
                raise ValueError(f"chain {order} is not an ordering of 1..{n}")
        elif t == 0 and policy == "nested_prefix":
            order = tuple(range(1, n + 1))
        else:
            order = tuple(int(i) for i in rng.permutation(n) + 1)
        orders.append(order)
    chis = []
    for order in orders:
        row = []
        for k in range(n + 1):
            row.append(holevo_chi(_ensemble_for(n, SubsetMask.of(order[:k], n))).chi)
        chis.append(tuple(row))
    return InformationCurve(n=n, chains=tuple(orders), chi=tuple(chis))
