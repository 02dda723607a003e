"""Command-line runner for ``.qex`` experiments, leakage sweeps, and the
acceptance battery.

    leakybv run SPEC.qex [--out PATH|-] [--seed N]
    leakybv sweep --n 8 [--k K] [--trials T] [--subset-policy nested_prefix|random] [--seed N] [--out PATH|-]
    leakybv verify [--out PATH|-] [--quick]

Exit codes: 0 success, 1 parse diagnostics, 2 capacity error, 3 failed check.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass, field, replace
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__
from .algo import (
    BooleanFunctionTable,
    bernstein_vazirani_exact,
    deutsch_jozsa_state,
    exact_parity,
    grover_optimal_iterations,
    grover_search,
    grover_success_probability,
    hybrid_recover,
    run_leaky_bv,
)
from .errors import CapacityError
from .exdsl import RANDOM, RANDOM_SUBSET, ExperimentSpec, parse_with_diagnostics, render
from .gf2 import BitString, SubsetMask
from .limits import leakage_accessible_information_curve
from .qstate import Distribution, measure_statevector, sample

EXIT_OK, EXIT_DIAGNOSTICS, EXIT_CAPACITY, EXIT_CHECK_FAILED = 0, 1, 2, 3
MAX_SWEEP_N = 10

# Shape of every JSON document written by ``run`` and ``sweep``.
JSON_SCHEMA = {
    "type": "object",
    "required": ["tool", "version", "seed", "spec", "resolved", "result", "columns", "rows"],
    "additionalProperties": False,
    "properties": {
        "tool": {"const": "leakybv"},
        "version": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0},
        "spec": {"type": "string"},
        "resolved": {
            "type": "object",
            "required": ["a", "S"],
            "properties": {
                "a": {"type": ["string", "null"], "pattern": "^[01]*$"},
                "S": {"type": ["string", "null"], "pattern": r"^\{(\d+(,\d+)*)?\}$"},
            },
        },
        "result": {"type": "object"},
        "columns": {"type": "array", "items": {"type": "string"}},
        "rows": {"type": "array", "items": {"type": "object"}},
    },
}

SWEEP_COLUMNS = (
    "row_type", "n", "k", "trial", "a", "S", "queries_total", "q_strat",
    "recovery_exact", "support_size", "purity", "check",
)


@dataclass
class RunRecord:
    spec_echo: str
    resolved_a: Optional[BitString]
    resolved_S: Optional[SubsetMask]
    columns: tuple[str, ...]
    rows: list[tuple]
    seed: int
    output: str = "csv"
    meta: dict[str, Any] = field(default_factory=dict)
    wall_time_ms: float = 0.0
    ok: bool = True


@dataclass(frozen=True)
class SweepPlan:
    n: int
    k_range: tuple[int, int]
    trials_per_k: int = 10
    seed: int = 0
    subset_policy: str = "nested_prefix"

    def __post_init__(self):
        lo, hi = self.k_range
        if not 0 <= lo <= hi <= self.n:
            raise ValueError(f"k range {lo}..{hi} not within 0..{self.n}")
        if self.trials_per_k < 1:
            raise ValueError("trials_per_k must be positive")
        if self.subset_policy not in ("nested_prefix", "random"):
            raise ValueError(f"unknown subset policy {self.subset_policy!r}")


# --- randomness -------------------------------------------------------------

def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _random_bits(rng: np.random.Generator, n: int) -> BitString:
    return BitString(int(rng.integers(0, 1 << n)), n)


def _random_subset(rng: np.random.Generator, n: int, k: int) -> SubsetMask:
    return SubsetMask.of((int(i) + 1 for i in rng.choice(n, size=k, replace=False)), n)


def resolve(spec: ExperimentSpec) -> tuple[Optional[BitString], Optional[SubsetMask], int]:
    """Resolve ``random`` tokens in the fixed order a, S, sampling sub-seed."""
    rng = _rng(spec.seed)
    a = spec.a
    if a == RANDOM:
        a = _random_bits(rng, spec.n)
    S = spec.S
    if S == RANDOM_SUBSET:
        S = _random_subset(rng, spec.n, spec.k)
    sample_seed = int(rng.integers(0, 2**63))
    return a, S, sample_seed


# --- execution --------------------------------------------------------------

def _dist_rows(spec: ExperimentSpec, dist: Distribution, sample_seed: int):
    if spec.mode == "shots":
        counts = sample(dist, spec.shots, sample_seed)
        return ("outcome", "count"), [(z, c) for z, c in sorted(counts.items())]
    return ("outcome", "probability"), list(dist.items())


def execute(spec: ExperimentSpec) -> RunRecord:
    start = time.perf_counter()
    a, S, sample_seed = resolve(spec)
    meta: dict[str, Any] = {}
    kind = spec.kind
    if kind == "leaky_bv":
        res = run_leaky_bv(a, S)
        columns, rows = _dist_rows(spec, res.exact_dist, sample_seed)
        meta.update(
            k=S.k, purity=res.purity, recovered_Sbar=res.recovered_Sbar,
            certain=res.certain, coherent_queries=res.query_count,
        )
    elif kind == "bv":
        columns, rows = _dist_rows(spec, bernstein_vazirani_exact(a), sample_seed)
        meta.update(coherent_queries=1)
    elif kind == "deutsch_jozsa":
        f = BooleanFunctionTable.from_str(spec.f, spec.promise)
        psi = deutsch_jozsa_state(f)
        amp = complex(psi.amps[0])
        columns, rows = _dist_rows(spec, measure_statevector(psi), sample_seed)
        label = "constant" if abs(abs(amp) - 1) < 1e-9 else "balanced" if abs(amp) < 1e-9 else "neither"
        meta.update(amplitude_re=amp.real, amplitude_im=amp.imag, label=label, coherent_queries=1)
    elif kind == "grover":
        t = grover_optimal_iterations(spec.n) if spec.iterations == "optimal" else spec.iterations
        dist = grover_search(spec.n, spec.marked, t)
        columns, rows = _dist_rows(spec, dist, sample_seed)
        meta.update(
            iterations=t, success_probability=dist[spec.marked],
            predicted_success_probability=grover_success_probability(spec.n, t),
        )
    elif kind == "parity":
        bit, ledger = exact_parity(spec.bits.bits)
        columns = ("parity", "coherent_queries", "value_queries", "total_queries")
        rows = [(bit, ledger.coherent_queries, ledger.value_queries, ledger.total)]
        meta.update(parity=bit, coherent_queries=ledger.coherent_queries)
    elif kind == "holevo_curve":
        curve = leakage_accessible_information_curve(spec.n, spec.trials, spec.seed, spec.subset_policy)
        columns = ("chain", "order", "k", "chi")
        rows = [
            (c, "{" + ",".join(map(str, order)) + "}", k, chi)
            for c, (order, chis) in enumerate(zip(curve.chains, curve.chi))
            for k, chi in enumerate(chis)
        ]
    elif kind == "sweep":
        k_range = (spec.k, spec.k) if spec.k is not None else (0, spec.n)
        plan = SweepPlan(spec.n, k_range, spec.trials, spec.seed, spec.subset_policy)
        record = run_sweep(plan, spec_echo=render(spec), output=spec.output)
        record.wall_time_ms = (time.perf_counter() - start) * 1e3
        return record
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return RunRecord(
        spec_echo=render(spec), resolved_a=a if isinstance(a, BitString) else None,
        resolved_S=S if isinstance(S, SubsetMask) else None, columns=columns, rows=rows,
        seed=spec.seed, output=spec.output, meta=meta,
        wall_time_ms=(time.perf_counter() - start) * 1e3,
    )


def _expected_cost(n: int, k: int) -> int:
    # Re-derived here rather than imported so the sweep cross-checks algo.
    return 1 + k if k < n else n


def plan_spec(plan: SweepPlan, output: str = "csv") -> ExperimentSpec:
    """The sweep spec equivalent to ``plan``; only single-k or full ranges have one."""
    lo, hi = plan.k_range
    if (lo, hi) != (0, plan.n) and lo != hi:
        raise ValueError("a partial k range has no .qex form")
    return ExperimentSpec(
        kind="sweep", n=plan.n, k=None if (lo, hi) == (0, plan.n) else lo, trials=plan.trials_per_k,
        subset_policy=plan.subset_policy, seed=plan.seed, output=output,
    )


def run_sweep(plan: SweepPlan, spec_echo: str = "", output: str = "csv") -> RunRecord:
    if plan.n > MAX_SWEEP_N:
        raise CapacityError(f"sweep n={plan.n} > {MAX_SWEEP_N}", cap="sweep_n")
    start = time.perf_counter()
    rng = _rng(plan.seed)
    n = plan.n
    rows: list[tuple] = []
    all_ok = True
    for k in range(plan.k_range[0], plan.k_range[1] + 1):
        trial_rows = []
        for t in range(plan.trials_per_k):
            a = _random_bits(rng, n)
            if plan.subset_policy == "nested_prefix":
                S = SubsetMask(tuple(range(1, k + 1)), n)
            else:
                S = _random_subset(rng, n, k)
            recovered, ledger = hybrid_recover(a, S)
            res = run_leaky_bv(a, S)
            support = len(res.exact_dist.support())
            ok = (
                ledger.total == _expected_cost(n, k)
                and recovered == a
                and support == 2**k
                and abs(res.purity - 2.0**-k) <= 1e-10
            )
            trial_rows.append(
                ("trial", n, k, t, a, S, ledger.total, _expected_cost(n, k), recovered == a, support, res.purity,
                 "ok" if ok else "FAIL")
            )
        k_ok = all(r[-1] == "ok" for r in trial_rows)
        all_ok &= k_ok
        totals = {r[6] for r in trial_rows}
        rows.extend(trial_rows)
        rows.append(
            ("aggregate", n, k, "", "", "", totals.pop() if len(totals) == 1 else -1, _expected_cost(n, k),
             all(r[8] for r in trial_rows), 2**k, float(np.mean([r[10] for r in trial_rows])),
             "ok" if k_ok else "FAIL")
        )
    return RunRecord(
        spec_echo=spec_echo or render(plan_spec(plan, output)), resolved_a=None, resolved_S=None, columns=SWEEP_COLUMNS, rows=rows,
        seed=plan.seed, output=output, wall_time_ms=(time.perf_counter() - start) * 1e3, ok=all_ok,
    )


# --- serialization ----------------------------------------------------------

def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _json_value(v):
    if isinstance(v, (BitString, SubsetMask)):
        return str(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    return v


def to_csv(record: RunRecord) -> str:
    out = io.StringIO()
    out.write(f"# leakybv {__version__}\n")
    out.write(f"# seed: {record.seed}\n")
    for line in record.spec_echo.splitlines():
        out.write(f"# spec: {line}\n")
    if record.resolved_a is not None:
        out.write(f"# resolved_a: {record.resolved_a}\n")
    if record.resolved_S is not None:
        out.write(f"# resolved_S: {record.resolved_S}\n")
    for key, value in record.meta.items():
        out.write(f"# {key}: {_cell(value)}\n")
    # Subset cells such as {1,3} contain commas; let csv quote them.
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(record.columns)
    writer.writerows([_cell(v) for v in row] for row in record.rows)
    return out.getvalue()


def to_json(record: RunRecord) -> str:
    doc = {
        "tool": "leakybv",
        "version": __version__,
        "seed": record.seed,
        "spec": record.spec_echo,
        "resolved": {
            "a": _json_value(record.resolved_a),
            "S": _json_value(record.resolved_S),
        },
        "result": {k: _json_value(v) for k, v in record.meta.items()},
        "columns": list(record.columns),
        "rows": [{c: _json_value(v) for c, v in zip(record.columns, row)} for row in record.rows],
    }
    return json.dumps(doc, indent=2) + "\n"


def serialize(record: RunRecord) -> str:
    return to_json(record) if record.output == "json" else to_csv(record)


def _emit(text: str, out_path: str):
    if out_path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# --- subcommands ------------------------------------------------------------

def run(spec_path: str, out_path: str = "-", seed: Optional[int] = None) -> int:
    try:
        with open(spec_path, "rb") as fh:
            source = fh.read()
    except OSError as exc:
        print(f"{spec_path}: {exc.strerror}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    spec, diags = parse_with_diagnostics(source)
    for d in diags:
        print(f"{spec_path}:{d}", file=sys.stderr)
    if spec is None:
        return EXIT_DIAGNOSTICS
    if seed is not None:
        spec = replace(spec, seed=seed)
    try:
        record = execute(spec)
    except CapacityError as exc:
        print(f"capacity error ({exc.cap}): {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    _emit(serialize(record), out_path)
    print(f"wall_time_ms={record.wall_time_ms:.1f}", file=sys.stderr)
    return EXIT_OK if record.ok else EXIT_CHECK_FAILED


def sweep(plan: SweepPlan, out_path: str = "-") -> int:
    try:
        record = run_sweep(plan, output="json" if out_path.endswith(".json") else "csv")
    except CapacityError as exc:
        print(f"capacity error ({exc.cap}): {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    _emit(serialize(record), out_path)
    if not record.ok:
        print("sweep: per-row checks failed", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def verify(out_path: str = "-", quick: bool = False) -> int:
    from .acceptance import run_battery

    results = run_battery(quick=quick)
    lines = [r.line() for r in results]
    passed = all(r.passed for r in results)
    lines.append(f"{'ALL PASS' if passed else 'FAIL'}: {sum(r.passed for r in results)}/{len(results)} criteria")
    _emit("\n".join(lines) + "\n", out_path)
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="leakybv", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="execute a .qex experiment file")
    r.add_argument("spec")
    r.add_argument("--out", default="-")
    r.add_argument("--seed", type=int)

    s = sub.add_parser("sweep", help="hybrid-recovery and leakage-law sweep over k")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int, help="restrict to a single k (default: 0..n)")
    s.add_argument("--trials", type=int, default=10)
    s.add_argument("--subset-policy", choices=("nested_prefix", "random"), default="nested_prefix")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default="-")

    v = sub.add_parser("verify", help="run the acceptance battery")
    v.add_argument("--out", default="-")
    v.add_argument("--quick", action="store_true", help="reduced sweep sizes")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "run":
        return run(args.spec, args.out, args.seed)
    if args.command == "sweep":
        k_range = (args.k, args.k) if args.k is not None else (0, args.n)
        try:
            plan = SweepPlan(args.n, k_range, args.trials, args.seed, args.subset_policy)
        except ValueError as exc:
            print(f"sweep: {exc}", file=sys.stderr)
            return EXIT_DIAGNOSTICS
        return sweep(plan, args.out)
    return verify(args.out, args.quick)


if __name__ == "__main__":
    sys.exit(main())
