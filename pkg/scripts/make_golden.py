"""Regenerate the golden fixtures consumed by the plotting package tests.

Runs one baseline scenario plus a small two-member sweep and copies the
CSV/JSON artifacts into frontend/tests/fixtures/.  The harness is
deterministic, so reruns must be byte-identical; a dirty diff after
running this script means the numerics changed.
"""

import sys
from pathlib import Path

from freqlab import load_config
from freqlab.reporting import emit_results
from freqlab.runner import run_scenario
from freqlab.sweep import run_sweep

REPO = Path(__file__).resolve().parent.parent
FIXTURES = REPO / "frontend" / "tests" / "fixtures"


def main() -> int:
    cfg = load_config(REPO / "configs" / "baseline_interval.toml")
    rec = run_scenario(cfg)

    sweep_cfg = load_config(REPO / "configs" / "sweep_drift.toml")
    result = run_sweep(
        sweep_cfg, {"coefficients.seed": [1, 2, 3, 4]}, workers=1
    )

    paths = emit_results(
        [rec] + result.records, FIXTURES, summary=result.summary
    )
    for p in paths.values():
        print("wrote", p)
    return 0


if __name__ == "__main__":
    sys.exit(main())
