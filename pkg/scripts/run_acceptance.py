"""Run acceptance criteria and print one pass/fail line each.

    python scripts/run_acceptance.py            # all thirteen
    python scripts/run_acceptance.py 1 4 12     # a subset
"""
import argparse

from sl2harmonic.acceptance import N_CHECKS, run_check


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("ids", type=int, nargs="*", help="criteria to run (default: all)")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    failures = 0
    for idx in args.ids or range(1, N_CHECKS + 1):
        res = run_check(idx, seed=args.seed)
        print(res.line(), flush=True)
        failures += not (res.passed and res.in_budget)
    print(f"{failures} failing")


if __name__ == "__main__":
    main()
