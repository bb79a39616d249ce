"""Quadrature oracle for the pairing of x θ_n with the shifted Gaussian window.

Integrates the closed form x·(n/2π)·χ̂_n(n x)·exp(-(x - 0.3)²) over the
grid box piecewise with scipy's adaptive quadrature, independently of the
FFT machinery. The printed value and error estimate fix ``PAIRING_TOL``.
"""

import argparse
import math

import numpy as np
from scipy.integrate import quad

from quasigen.mollifier import CutoffFamily


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=32)
    ap.add_argument("--X", type=float, default=8.0)
    ap.add_argument("--pieces", type=int, default=256)
    args = ap.parse_args()
    fam = CutoffFamily()
    n = args.n

    def f(x: float) -> float:
        theta = n / (2 * math.pi) * fam.transform(n, np.array([n * x]))[0]
        return x * theta * math.exp(-((x - 0.3) ** 2))

    total = err = 0.0
    edges = np.linspace(-args.X, args.X, args.pieces + 1)
    for a, b in zip(edges[:-1], edges[1:]):
        v, e = quad(f, a, b, limit=200, epsabs=1e-16)
        total += v
        err += e
    print(f"n={n} value={total:.3e} error_estimate={err:.3e}")


if __name__ == "__main__":
    main()
