#!/usr/bin/env python3
"""Rate-loss trade-off per optical mode for several interferometer sizes.

Thin wrapper over the ``rate`` command machinery: consumes the packaged
gamma cache, maximises the net rate over the photon number at each
transmissivity, and renders CSV + SVG.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from qdl_lab.bounds import rate_loss_curve
from qdl_lab.cache import load_merged
from qdl_lab.svg import line_chart


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--m", default="10,20,30,40")
    parser.add_argument("--eta-start", type=float, default=0.5)
    parser.add_argument("--eta-stop", type=float, default=1.0)
    parser.add_argument("--eta-steps", type=int, default=51)
    parser.add_argument("--beta", type=float, default=1.0)
    parser.add_argument("--out", default="out/rate_loss.csv")
    args = parser.parse_args()

    etas = list(np.linspace(args.eta_start, args.eta_stop, args.eta_steps))
    rows = load_merged()
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    series = []
    with out.open("w") as fh:
        fh.write("m,eta,best_n,rate_per_mode\n")
        for m in (int(tok) for tok in args.m.split(",")):
            curve = rate_loss_curve(m, etas, rows, beta=args.beta)
            series.append((f"m={m}", etas, [p.rate_per_mode for p in curve]))
            for p in curve:
                fh.write(f"{m},{p.eta},{p.best_n},{p.rate_per_mode}\n")
    line_chart(
        series, out.with_suffix(".svg"),
        x_label="transmissivity eta", y_label="net bits per mode",
    )
    print(f"wrote {out} and {out.with_suffix('.svg')}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
