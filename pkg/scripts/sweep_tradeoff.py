#!/usr/bin/env python3
"""Sweep the relevance/diversity blend and tabulate what each weight buys.

For each lambda on a grid, re-rank the example corpus and report the
selection, its mean relevance, its diversity, and the blended objective.
The endpoints are the pure strategies: lambda 0 ignores relevance entirely,
lambda 1 is a plain top-k relevance sort.
"""

import argparse
import csv
import pathlib
import sys

from newsdiv.aspect_model import load_schema
from newsdiv.corpus_io import load_corpus
from newsdiv.diversify import rerank_combined

DEFAULT_FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--fixtures", type=pathlib.Path, default=DEFAULT_FIXTURES)
    parser.add_argument("--k", type=int, default=4, help="selection size")
    parser.add_argument("--steps", type=int, default=10,
                        help="number of lambda intervals between 0 and 1")
    parser.add_argument("--csv", type=pathlib.Path, default=None,
                        help="also write the sweep as CSV")
    args = parser.parse_args(argv)

    schema = load_schema((args.fixtures / "example_schema.json").read_text())
    pool = load_corpus(schema, (args.fixtures / "example_corpus.jsonl").read_text()).docs()
    by_id = {d.id: d for d in pool}

    rows = []
    for step in range(args.steps + 1):
        lam = step / args.steps
        result = rerank_combined(schema, pool, args.k, lam)
        mean_rel = sum(by_id[i].relevance for i in result.selected) / args.k
        rows.append(
            {
                "lambda": round(lam, 6),
                "selected": " ".join(result.selected),
                "mean_relevance": round(mean_rel, 12),
                "diversity": round(result.diversity.overall, 12),
                "objective": round(result.objective, 12),
            }
        )

    header = f"{'lambda':>7}  {'selection':<16} {'mean_rel':>9} {'diversity':>10} {'objective':>10}"
    print(header)
    print("-" * len(header))
    for row in rows:
        print(f"{row['lambda']:>7.2f}  {row['selected']:<16} "
              f"{row['mean_relevance']:>9.4f} {row['diversity']:>10.4f} "
              f"{row['objective']:>10.4f}")

    if args.csv:
        with args.csv.open("w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
        print(f"\nwrote {args.csv}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
