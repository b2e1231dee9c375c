#!/usr/bin/env python3
"""Run every experiment at a = pi and again at a = 1.

Usage: python3 scripts/run_all.py [OUT_ROOT] [SEED]

Each (experiment, a) pair gets its own output directory under OUT_ROOT
(default "pwosc_out").  Exit code is nonzero if any run's asserted
invariants fail; uncertified cells are reported but are not failures.
"""

from __future__ import annotations

import math
import sys
from pathlib import Path

from pwosc.harness import EXPERIMENT_NAMES, ExperimentConfig, run_experiment


def main() -> int:
    out_root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("pwosc_out")
    seed = int(sys.argv[2]) if len(sys.argv) > 2 else 0
    all_pass = True
    for name in EXPERIMENT_NAMES:
        for tag, a in (("a_pi", math.pi), ("a_one", 1.0)):
            cfg = ExperimentConfig(
                experiment=name, a=a, seed=seed,
                out_dir=str(out_root / f"{name}_{tag}"),
            )
            report = run_experiment(cfg)
            status = "ok" if report["invariants_pass"] else "FAIL"
            print(
                f"{name} [{tag}]: {status} "
                f"({report['runtime']:.1f}s, failures={report['failures']}, "
                f"excluded={report['excluded']})"
            )
            for inv in report["invariants"]:
                if not inv["passed"]:
                    print(f"    [FAIL] {inv['name']}: {inv['detail']}")
            all_pass = all_pass and report["invariants_pass"]
    return 0 if all_pass else 1


if __name__ == "__main__":
    raise SystemExit(main())
