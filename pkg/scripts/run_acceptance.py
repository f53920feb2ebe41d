"""Run the acceptance criteria and print one line per criterion.

    python scripts/run_acceptance.py            # all fourteen
    python scripts/run_acceptance.py 1 6 14     # a subset
    python scripts/run_acceptance.py --out results/   # also write CSV + markdown

Exit status is 0 when every selected criterion passes, 1 otherwise.
"""
import argparse
import sys

from skbounds.criteria import CRITERIA, run_criterion
from skbounds.report import run_report


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("numbers", nargs="*", type=int, help="criteria to run (default: all)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", help="write the full 'all' suite report to this directory instead")
    args = ap.parse_args(argv)

    if args.out:
        status, _ = run_report("all", args.out, seed=args.seed)
        return status
    numbers = args.numbers or sorted(CRITERIA)
    unknown = set(numbers) - set(CRITERIA)
    if unknown:
        ap.error(f"unknown criteria: {sorted(unknown)}")
    failed = []
    for n in numbers:
        res = run_criterion(n, seed=args.seed)
        print(res.line(), flush=True)
        if not res.passed:
            failed.append(n)
    print(f"{len(numbers) - len(failed)}/{len(numbers)} passed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
