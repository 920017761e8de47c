"""Classify every cell of the four-qubit marginal root table and print a markdown report.

    python3 scripts/reproduce_table.py --samples 5 --seed 0
"""
import argparse
import time
from dataclasses import dataclass

from polyroof.atlas import reproduce_table, table_markdown


@dataclass
class TableRun:
    samples: int = 5
    seed: int = 0
    threads: int = 1


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=TableRun.samples)
    ap.add_argument("--seed", type=int, default=TableRun.seed)
    ap.add_argument("--threads", type=int, default=TableRun.threads)
    run = TableRun(**vars(ap.parse_args()))

    start = time.perf_counter()
    reports, ok = reproduce_table(samples_per_cell=run.samples, seed=run.seed, threads=run.threads)
    print(table_markdown(reports))
    matched = sum(r.ok for r in reports)
    print(f"\n{matched}/{len(reports)} cells match in {time.perf_counter() - start:.1f} s")


if __name__ == "__main__":
    main()
