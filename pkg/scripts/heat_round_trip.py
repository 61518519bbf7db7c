"""Materialize h_t, transform it back and report the sup-relative symbol error."""
import argparse

import numpy as np

from sl2harmonic import forward_transform, heat_kernel, heat_symbol


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, nargs="*", default=[0, 1, 4])
    ap.add_argument("--t", type=float, nargs="*", default=[0.5, 1.0, 2.0])
    args = ap.parse_args()
    lam = np.linspace(0, 10, 101)
    for m in args.m:
        for t in args.t:
            ref = heat_symbol(m, t)(1j * lam)
            got = forward_transform(heat_kernel(m, t), 1j * lam)
            err = np.max(np.abs(got - ref)) / np.max(np.abs(ref))
            print(f"m={m} t={t}: {err:.3e}")


if __name__ == "__main__":
    main()
