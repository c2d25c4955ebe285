#!/usr/bin/env python3
"""Regenerate the packaged gamma cache.

Estimates the bunched-pattern 2*gamma_q (the conjectured maximiser over
patterns) for every (m, n) the rate-loss command may ask for, and writes
them to the package data directory.  Runtime is a few minutes at the
default 1e6 samples thanks to the product form of the bunched estimator.
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from qdl_lab import cache, mc


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--m", default="10,20,30,40", help="comma-separated mode counts")
    parser.add_argument("--samples", type=int, default=1_000_000)
    parser.add_argument("--seed", type=int, default=20_250_808)
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument(
        "--out",
        default=str(Path(__file__).resolve().parents[1] / "src/qdl_lab/data/gamma_cache.csv"),
    )
    args = parser.parse_args()

    out = Path(args.out)
    if out.exists():
        out.unlink()
    m_list = [int(tok) for tok in args.m.split(",")]
    t0 = time.perf_counter()
    for m in m_list:
        rows = []
        for n in range(2, m + 1):
            rec = mc.estimate_gamma_q(m, n, (n,), args.samples, args.seed, workers=args.workers)
            rows.append(cache.row_from_gamma(rec))
            print(
                f"m={m:3d} n={n:3d} two_gamma={rec.two_gamma_q:12.4f} "
                f"stderr={rec.stderr:10.4f} [{time.perf_counter() - t0:7.1f} s]",
                flush=True,
            )
        cache.append_rows(out, rows)
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
