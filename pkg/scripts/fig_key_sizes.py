#!/usr/bin/env python3
"""Message length vs key consumption as the photon number grows.

Sweeps n with m = n^3 and xi = 0.01, evaluating log2 M and log2 K_eps
in the diluted-photon regime for several security-parameter schedules
(eps = 2^-sqrt(n), eps = 2^-n, and fixed eps = 1e-10).  Writes a CSV and
an SVG chart; the locking advantage is the gap between the message curve
and the key curves.
"""

import argparse
import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from qdl_lab import bounds, mc
from qdl_lab.svg import line_chart


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-max", type=int, default=40)
    parser.add_argument("--xi", type=float, default=0.01)
    parser.add_argument("--out", default="out/key_sizes.csv")
    args = parser.parse_args()

    schedules = [("s=0.5", 0.5), ("s=1", 1.0), ("eps=1e-10", None)]
    ns = list(range(2, args.n_max + 1))
    rows = []
    curves: dict[str, list[float]] = {label: [] for label, _ in schedules}
    log2_m_curve = []
    for n in ns:
        m = n**3
        c_min, gamma = mc.no_collision_values(m, n)
        log2_c_min = math.log2(c_min)
        log2_m = None
        for label, s in schedules:
            eps = 1e-10 if s is None else 2.0 ** (-(n**s))
            rep = bounds.k_epsilon_single(
                m, n, xi=args.xi, epsilon=eps, gamma=gamma, log2_c_min=log2_c_min
            )
            log2_m = rep.log2_M
            curves[label].append(rep.log2_K_epsilon)
            rows.append((n, m, label, eps, rep.log2_M, rep.log2_K_epsilon))
        log2_m_curve.append(log2_m)

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w") as fh:
        fh.write("n,m,schedule,epsilon,log2_M,log2_K_epsilon\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")
    series = [("log2 M", ns, log2_m_curve)] + [
        (f"log2 K ({label})", ns, curves[label]) for label, _ in schedules
    ]
    line_chart(series, out.with_suffix(".svg"), x_label="photon number n", y_label="bits")
    print(f"wrote {out} and {out.with_suffix('.svg')}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
