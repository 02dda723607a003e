"""Accessible information chi(k) of the uniform-a ensemble of leaked states.

Prints one row per k for each nested chain, next to the n - k reference.
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

from leakybv.limits import leakage_accessible_information_curve


@dataclass(frozen=True)
class CurveConfig:
    n: int = 5
    chains: int = 3
    seed: int = 0


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=CurveConfig.n)
    p.add_argument("--chains", type=int, default=CurveConfig.chains)
    p.add_argument("--seed", type=int, default=CurveConfig.seed)
    cfg = CurveConfig(**vars(p.parse_args(argv)))
    curve = leakage_accessible_information_curve(cfg.n, trials=cfg.chains, seed=cfg.seed)
    print("chain,order,k,chi,n_minus_k")
    for c, order in enumerate(curve.chains):
        label = "-".join(map(str, order))
        for k, chi in enumerate(curve.chi[c]):
            print(f"{c},{label},{k},{chi:.12f},{cfg.n - k}")


if __name__ == "__main__":
    main()
