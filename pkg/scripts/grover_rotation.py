"""Simulated Grover success probability against sin^2((2t+1) theta)."""

from __future__ import annotations

import argparse
import math
from dataclasses import dataclass

from leakybv.algo import grover_optimal_iterations, grover_search
from leakybv.gf2 import BitString


@dataclass(frozen=True)
class GroverConfig:
    n: int = 8
    marked: int = 0


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=GroverConfig.n)
    p.add_argument("--marked", type=int, default=GroverConfig.marked)
    cfg = GroverConfig(**vars(p.parse_args(argv)))
    marked = BitString(cfg.marked, cfg.n)
    theta = math.asin(2 ** (-cfg.n / 2))
    t_opt = grover_optimal_iterations(cfg.n)
    print("t,simulated,closed_form,abs_error")
    for t in range(2 * t_opt + 1):
        sim = grover_search(cfg.n, marked, t)[marked]
        ref = math.sin((2 * t + 1) * theta) ** 2
        print(f"{t},{sim:.15f},{ref:.15f},{abs(sim - ref):.2e}")


if __name__ == "__main__":
    main()
