"""Regenerate tests/data/bessel_k_table.csv with 30-digit mpmath values."""

from pathlib import Path

import mpmath as mp
import numpy as np

mp.mp.dps = 30
OUT = Path(__file__).resolve().parents[1] / "tests" / "data" / "bessel_k_table.csv"


def main():
    us = np.unique(np.concatenate([np.geomspace(1e-4, 50, 120), [0.5, 1.0, 1.9999, 2.0, 2.0001, 3.0]]))
    with OUT.open("w") as fh:
        fh.write("u,K0,K1,K2\n")
        for u in us:
            k = [mp.besselk(n, mp.mpf(float(u))) for n in range(3)]
            fh.write(f"{float(u)!r}," + ",".join(mp.nstr(v, 20) for v in k) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
