"""Small replication study: empirical size and median delays.

Uses 200 replications per cell so it finishes in about a minute; pass a
larger count as the first argument for tighter estimates.

    python3 demos/size_table.py [n_reps]
"""

import sys

from mfmonitor.simulate import TABLE_FAMILIES, run_table


def main(n_reps=200):
    grid = [(50, 50, 20)]
    for scenario in ("null", "loading_switch", "factor_emerge"):
        res = run_table(grid, TABLE_FAMILIES, (0.05, 0.10), n_reps=n_reps,
                        scenario=scenario, master_seed=0)
        print(res.to_text())


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 200)
