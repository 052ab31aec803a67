"""Weak value phase across postselection angles, exact and shot-estimated.

For A = Z, psi = |+> and phi = Rx(t) Ry(s)|0>, prints the exact weak value,
its phase from the strong-expectation pair (x, y), and the phase rebuilt
from sampled expectations. Angles where the weak value vanishes or the
states are orthogonal are reported as such rather than skipped.

    python3 scripts/phase_scan.py --steps 12 --shots 20000
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from weakval import measure, phase, weakcore
from weakval.errors import DomainError
from weakval.qstate import Gate, prepare, seq


@dataclass
class ScanConfig:
    steps: int = 12
    tilt: float = 0.6  # the Rx angle, which makes the weak value complex
    shots: int = 20000
    seed: int = 42


def run(cfg: ScanConfig) -> list[dict]:
    a = np.diag([1.0, -1.0]).astype(complex)
    psi = prepare(seq(Gate("h", (0,))), 2)
    rows = []
    for k, s in enumerate(np.linspace(-np.pi, np.pi, cfg.steps, endpoint=False)):
        phi = prepare(seq(Gate("ry", (0,), angle=float(s)), Gate("rx", (0,), angle=cfg.tilt)), 2)
        row = {"s": float(s)}
        try:
            w = weakcore.weak_value(a, psi, phi)
            rep = phase.recover_phase(a, psi, phi)
            est = measure.sampled_weak_value(a, psi, phi, cfg.shots, measure.derive_seed(cfg.seed, k))
            row.update(weak_value=w, phase=rep.phase, sampled_phase=est.phase, sampled_modulus=est.modulus)
        except DomainError as exc:
            row["note"] = type(exc).__name__
        rows.append(row)
    return rows


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--steps", type=int, default=ScanConfig.steps)
    p.add_argument("--tilt", type=float, default=ScanConfig.tilt)
    p.add_argument("--shots", type=int, default=ScanConfig.shots)
    p.add_argument("--seed", type=int, default=ScanConfig.seed)
    a = p.parse_args()
    print(f"{'s':>8} {'Re A_w':>10} {'Im A_w':>10} {'phase':>9} {'sampled':>9} {'|A_w|':>8} {'sampled':>8}")
    for r in run(ScanConfig(a.steps, a.tilt, a.shots, a.seed)):
        if "note" in r:
            print(f"{r['s']:8.4f}  {r['note']}")
            continue
        w = r["weak_value"]
        sp = "n/a" if r["sampled_phase"] is None else f"{r['sampled_phase']:9.4f}"
        sm = "n/a" if r["sampled_modulus"] is None else f"{r['sampled_modulus']:8.4f}"
        print(f"{r['s']:8.4f} {w.real:10.4f} {w.imag:10.4f} {r['phase']:9.4f} {sp:>9} {abs(w):8.4f} {sm:>8}")


if __name__ == "__main__":
    main()
