"""Residues of 1/c_m: closed form, exact Gamma-function value, and contour integral."""
import argparse

import numpy as np

from sl2harmonic import c_inv_poles, c_inverse, residue_stated


def contour_residue(m, s0, radius=0.25, n_pts=256):
    u = np.exp(2j * np.pi * np.arange(n_pts) / n_pts)
    return complex(np.mean(radius * u * c_inverse(m, s0 + radius * u)))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m-max", type=int, default=10)
    args = ap.parse_args()
    print(f"{'m':>3} {'pole':>6} {'closed form':>12} {'exact':>12} {'contour':>16}")
    for m in range(2, args.m_max + 1):
        for p in c_inv_poles(m):
            num = contour_residue(m, float(p.location))
            print(f"{m:>3} {str(p.location):>6} {str(residue_stated(m, p.j)):>12} "
                  f"{str(p.residue):>12} {num.real:>16.10g}")


if __name__ == "__main__":
    main()
