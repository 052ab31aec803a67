"""Witness deviation against noise strength for every built-in channel family.

Prints CSV with one row per (family, theta, param). The default setup is
A = Z on |+>; the theta grid includes pi/4, where depolarizing noise is
invisible to the witness.

    python3 scripts/witness_sweep.py --points 11 > sweep.csv
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field

import numpy as np

from weakval import noise
from weakval.qstate import make_pure


@dataclass
class SweepConfig:
    thetas: list[float] = field(default_factory=lambda: [np.pi / 8, np.pi / 4, np.pi / 2])
    max_param: float = 0.2
    points: int = 21
    families: list[str] = field(default_factory=lambda: sorted(noise.FAMILIES))


def run(cfg: SweepConfig, out=sys.stdout) -> None:
    a = np.diag([1.0, -1.0]).astype(complex)
    psi = make_pure(np.array([1.0, 1.0]) / np.sqrt(2))
    grid = np.linspace(0.0, cfg.max_param, cfg.points)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["family", "theta", "param", "ideal", "real", "delta", "flags"])
    for name in cfg.families:
        for theta in cfg.thetas:
            reports = noise.witness_sweep(a, psi, theta, noise.FAMILIES[name](a, theta), grid)
            for g, r in zip(grid, reports):
                w.writerow([name, f"{theta:.6f}", f"{g:.4f}", f"{r.ideal:.12g}", f"{r.real_val:.12g}",
                            f"{r.delta:.6e}", ";".join(r.flags)])


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--max-param", type=float, default=SweepConfig.max_param)
    p.add_argument("--points", type=int, default=SweepConfig.points)
    p.add_argument("--family", action="append", choices=sorted(noise.FAMILIES))
    a = p.parse_args()
    cfg = SweepConfig(max_param=a.max_param, points=a.points)
    if a.family:
        cfg.families = a.family
    run(cfg)


if __name__ == "__main__":
    main()
