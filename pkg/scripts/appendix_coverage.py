"""Coverage of the 3-sigma reproduction bands over many seeds.

Runs the pure and mixed reproduction experiments once per seed and reports
how often each estimate lands inside its band. For a well-calibrated
binomial band the fraction should sit near 0.997 at large shot counts.

    python3 scripts/appendix_coverage.py --seeds 500 --shots 10000
"""

from __future__ import annotations

import argparse
import json
from dataclasses import asdict, dataclass

from weakval.cli import reproduce_appendix


@dataclass
class CoverageConfig:
    seeds: int = 200
    shots: int = 10000
    first_seed: int = 0


def run(cfg: CoverageConfig) -> dict:
    inside = [0, 0]
    worst = [0.0, 0.0]
    for seed in range(cfg.first_seed, cfg.first_seed + cfg.seeds):
        for k, e in enumerate(reproduce_appendix(cfg.shots, seed)["experiments"]):
            z = abs(e["estimate"] - e["exact"]) / e["sigma"] if e["sigma"] > 0 else 0.0
            worst[k] = max(worst[k], z)
            inside[k] += e["status"] == "PASS"
    return {
        "config": asdict(cfg),
        "pure": {"coverage": inside[0] / cfg.seeds, "max_z": worst[0]},
        "mixed": {"coverage": inside[1] / cfg.seeds, "max_z": worst[1]},
    }


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seeds", type=int, default=CoverageConfig.seeds)
    p.add_argument("--shots", type=int, default=CoverageConfig.shots)
    p.add_argument("--first-seed", type=int, default=CoverageConfig.first_seed)
    a = p.parse_args()
    print(json.dumps(run(CoverageConfig(a.seeds, a.shots, a.first_seed)), indent=2))


if __name__ == "__main__":
    main()
