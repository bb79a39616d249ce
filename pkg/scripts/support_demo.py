"""Support estimates of embedded point masses at several tile sizes."""

import argparse

from quasigen import embed as E
from quasigen.mollifier import build_mollifier
from quasigen.specgrid import Grid


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", default="-1,1", help="comma-separated point masses")
    ap.add_argument("--rho", default="0.125,0.25,0.5")
    ap.add_argument("--n-max", type=int, default=64)
    args = ap.parse_args()

    M = build_mollifier(range(1, args.n_max + 1), Grid())
    f = None
    for p in (float(v) for v in args.points.split(",")):
        d = E.CompactFunctional.delta(p)
        f = d if f is None else f + d
    rep = E.embed(f, M)
    for rho in (float(v) for v in args.rho.split(",")):
        est = E.support(rep, rho, region=(-4, 4))
        print(f"rho={rho:<6} components={est.components} intervals={est.intervals}")


if __name__ == "__main__":
    main()
