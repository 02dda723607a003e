"""Query cost, support size and purity of the leaky readout as k grows.

    python scripts/leakage_sweep.py --n 8 --trials 20 --out results/leakage_n8.csv
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

import numpy as np

from leakybv.algo import hybrid_recover, query_cost, run_leaky_bv
from leakybv.gf2 import BitString, SubsetMask


@dataclass(frozen=True)
class SweepConfig:
    n: int = 8
    trials: int = 20
    seed: int = 0
    out: str = "-"


def sweep(cfg: SweepConfig):
    rng = np.random.Generator(np.random.Philox(cfg.seed))
    for k in range(cfg.n + 1):
        costs, purities, supports, exact = [], [], [], 0
        for _ in range(cfg.trials):
            a = BitString(int(rng.integers(0, 1 << cfg.n)), cfg.n)
            S = SubsetMask.of((rng.permutation(cfg.n)[:k] + 1).tolist(), cfg.n)
            got, ledger = hybrid_recover(a, S)
            res = run_leaky_bv(a, S)
            exact += got == a
            costs.append(ledger.total)
            purities.append(res.purity)
            supports.append(len(res.exact_dist.support()))
        yield {
            "k": k,
            "mean_queries": float(np.mean(costs)),
            "q_strat": query_cost(cfg.n, k),
            "exact_fraction": exact / cfg.trials,
            "mean_support": float(np.mean(supports)),
            "mean_purity": float(np.mean(purities)),
        }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=SweepConfig.n)
    p.add_argument("--trials", type=int, default=SweepConfig.trials)
    p.add_argument("--seed", type=int, default=SweepConfig.seed)
    p.add_argument("--out", default=SweepConfig.out)
    cfg = SweepConfig(**vars(p.parse_args(argv)))
    fh = sys.stdout if cfg.out == "-" else open(cfg.out, "w", newline="")
    rows = list(sweep(cfg))
    writer = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    if fh is not sys.stdout:
        fh.close()


if __name__ == "__main__":
    main()
