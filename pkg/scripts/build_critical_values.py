"""Regenerate the bundled critical value table shipped in ``mfmonitor/data``.

Usage: python scripts/build_critical_values.py [output.json]
"""

import logging
import sys
import time
from pathlib import Path

from mfmonitor.detector.calibration import CriticalValueTable

WEIGHTS = [0.0, 0.1, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45]
ALPHAS = [0.01, 0.025, 0.05, 0.1]
SEED = 20240101

if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO)
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else (
        Path(__file__).resolve().parents[1] / "src" / "mfmonitor" / "data" / "critical_values.json")
    table = CriticalValueTable()
    start = time.time()
    table.calibrate(WEIGHTS, ALPHAS, n_paths=1_000_000, n_steps=10_000, seed=SEED)
    table.save(out)
    print(f"wrote {len(table)} entries to {out} in {time.time() - start:.0f}s")
