"""Run every scenario config under configs/ and write result artifacts.

Usage: python scripts/run_baseline.py [--out results] [--config NAME ...]
"""

import argparse
import sys
from pathlib import Path

from freqlab import load_config, run_scenario
from freqlab.reporting import emit_results
from freqlab.runner import worst_status

REPO = Path(__file__).resolve().parent.parent


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument(
        "--config", action="append",
        help="config file name under configs/ (repeatable; default: all)",
    )
    args = ap.parse_args(argv)

    names = args.config or sorted(
        p.name for p in (REPO / "configs").glob("*.toml") if "sweep" not in p.name
    )
    records = []
    for name in names:
        cfg = load_config(REPO / "configs" / name)
        rec = run_scenario(cfg)
        records.append(rec)
        bad = [c for c in rec.checks if c.status in ("fail", "error")]
        line = "ok" if not bad else ", ".join(f"{c.name}:{c.status}" for c in bad)
        print(f"{rec.scenario_id:40s} {line}")

    paths = emit_results(records, Path(args.out))
    for p in paths.values():
        print("wrote", p)
    return 0 if worst_status(records) == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
