"""Print the four convergence tables (errors and observed rates at T = 1).

    python scripts/reproduce_tables.py            # all four tables
    python scripts/reproduce_tables.py --table 3
"""

import argparse
import time

from fracmim.harness import convergence_study

STEPS = [1 / 8, 1 / 16, 1 / 32, 1 / 64, 1 / 128]
ALPHAS = [0.1, 0.5, 0.9]
# table id -> (example, refined axis)
LAYOUT = {1: (1, "time"), 2: (1, "space"), 3: (2, "time"), 4: (2, "space")}


def print_table(table_id: int, fixed: float) -> None:
    example, axis = LAYOUT[table_id]
    start = time.perf_counter()
    reports = [convergence_study(example, a, axis, fixed, STEPS) for a in ALPHAS]
    label = "tau" if axis == "time" else "h"
    print(f"\nTable {table_id}: example {example}, {label} refined, other step 1/{round(1 / fixed)}")
    print(f"{label:>7}" + "".join(f"   alpha={a:<4}  rate  " for a in ALPHAS))
    for i, step in enumerate(STEPS):
        cells = []
        for rep in reports:
            row = rep.rows[i]
            rate = f"{row.rate:.4f}" if row.rate is not None else "      "
            cells.append(f"  {row.error:.4e}  {rate}")
        print(f"  1/{round(1 / step):<4}" + "".join(cells))
    print(f"({time.perf_counter() - start:.1f} s)")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--table", type=int, choices=sorted(LAYOUT), action="append")
    parser.add_argument("--fixed-step", type=float, default=1 / 2000)
    args = parser.parse_args()
    for table_id in args.table or sorted(LAYOUT):
        print_table(table_id, args.fixed_step)


if __name__ == "__main__":
    main()
