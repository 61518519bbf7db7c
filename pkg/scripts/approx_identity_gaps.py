"""Gap ||(z^2 r_z)^{*4} * h_1 - h_1|| over z in {gamma+1, 2 gamma, 4 gamma, 8 gamma}."""
import argparse

from sl2harmonic.acceptance import approx_identity_gaps


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, nargs="*", default=[0, 1, 4])
    args = ap.parse_args()
    for m in args.m:
        gaps = approx_identity_gaps(m)
        cells = " ".join(f"{g:.4g}" for g in gaps)
        print(f"m={m}: {cells}  final/initial {gaps[-1] / gaps[0]:.4f}")


if __name__ == "__main__":
    main()
