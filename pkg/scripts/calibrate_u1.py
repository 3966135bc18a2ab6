"""Invert the gap equation for the coupling that yields a target order parameter.

With the target Delta0 = 0.0786 + 0.0777i at U0 = 1.8, kappa = 0.1, N = 10 the
recovered coupling is close to U0 + i kappa / 2, which is the library default.
The script also prints the gap obtained from the competing sign convention.
"""
import argparse

import numpy as np

from nhjump.models.bcs import BcsParams, bcs_gap_solve, gap_residual


def coupling_for(p: BcsParams, delta: complex) -> complex:
    e = np.sqrt(p.xi().astype(complex) ** 2 + delta ** 2)
    return p.N / np.sum(0.5 / e)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--U0", type=float, default=1.8)
    ap.add_argument("--kappa", type=float, default=0.1)
    ap.add_argument("--N", type=int, default=10)
    ap.add_argument("--target", type=complex, default=0.0786 + 0.0777j)
    args = ap.parse_args()
    p = BcsParams(U0=args.U0, kappa=args.kappa, N=args.N)
    u1 = coupling_for(p, args.target)
    print(f"coupling reproducing the target: {u1.real:.5f}{u1.imag:+.5f}i")
    print(f"(U1 - U0) / kappa = {(u1 - p.U0) / p.kappa:.4f}")
    for label, c in (("U0 + i kappa/2", p.U0 + 0.5j * p.kappa),
                     ("U0 - i kappa/2", p.U0 - 0.5j * p.kappa)):
        q = BcsParams(U0=p.U0, kappa=p.kappa, N=p.N, U1=c)
        try:
            d = bcs_gap_solve(q)
            print(f"{label:15s} Delta0 = {d.real:.5f}{d.imag:+.5f}i  residual "
                  f"{gap_residual(q, d):.1e}")
        except ArithmeticError as exc:
            print(f"{label:15s} no root: {exc}")


if __name__ == "__main__":
    main()
