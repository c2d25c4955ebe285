"""Command-line front end.

Commands: estimate, keysize, rate, simulate, tables, dim.  Machine
output is CSV (stdout or --out) with a version header line
``# qdl-lab v<semver> cmd=<name> seed=<seed>``; human diagnostics go to
stderr.  Every command honours --seed for byte-identical output across
runs and worker counts.

Exit codes: 0 success, 2 usage error, 3 cache miss, 4 resource cap.
"""

from __future__ import annotations

import argparse
import math
import os
import secrets
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from . import __version__, bounds, cache, mc, protocol, reference
from .errors import CacheMissError, DomainError, ResourceError
from .fock import (
    PhotonPattern,
    as_pattern,
    dim_hilbert,
    enumerate_patterns,
    log2_dim_hilbert,
    log2_num_codewords,
    num_codewords,
)
from .mc import DEFAULT_C_SAMPLES, DEFAULT_GAMMA_SAMPLES
from .svg import line_chart

LONG_RUN_SECONDS = 60.0


def _msg(text: str) -> None:
    print(text, file=sys.stderr)


def _resolve_seed(args: argparse.Namespace) -> int:
    if args.seed is not None:
        return args.seed
    seed = secrets.randbelow(2**63)
    _msg(f"seed={seed} (generated; pass --seed {seed} to reproduce)")
    return seed


def _resolve_workers(args: argparse.Namespace) -> int:
    if args.workers == 0:
        return os.cpu_count() or 1
    return args.workers


def _write_csv(
    out: Optional[str], cmd: str, seed: int, header: Sequence[str], rows: Sequence[Sequence]
) -> None:
    lines = [f"# qdl-lab v{__version__} cmd={cmd} seed={seed}"]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(str(v) for v in row))
    text = "\n".join(lines) + "\n"
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)
        _msg(f"wrote {out}")


def _fmt(x: float) -> str:
    return repr(float(x))


def _load_config_file(argv: Sequence[str]) -> dict:
    """Flat key=value config file; flags override its entries."""
    path = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
    if path is None:
        return {}
    overrides = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DomainError(f"config line is not key=value: {line!r}")
        key, value = line.split("=", 1)
        overrides[key.strip().replace("-", "_")] = value.strip()
    return overrides


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed (generated and printed if absent)")
    common.add_argument("--workers", type=int, default=1, help="worker processes; 0 = auto")
    common.add_argument("--out", default=None, help="output CSV path ('-' or absent = stdout)")
    common.add_argument("--cache", default="gamma_cache.csv", help="user cache CSV (merged over the packaged one)")
    common.add_argument("--samples", type=int, default=None, help="Monte Carlo sample count override")
    common.add_argument("--accept-long", action="store_true", help="acknowledge long-running estimations")
    common.add_argument("--config", default=None, help="flat key=value config file")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="qdl-lab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"qdl-lab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dim", parents=[common], help="space dimensions and pattern count")
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)

    p = sub.add_parser("estimate", parents=[common], help="Monte Carlo c_q / gamma_q estimation")
    p.add_argument("kind", choices=["c", "gamma"])
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--pattern", default=None, help="dash-joined pattern, e.g. 2-1")
    group.add_argument(
        "--all-patterns", action="store_true", help="estimate every pattern of (m, n); the default"
    )

    p = sub.add_parser("keysize", parents=[common], help="minimum pool size log2 K_epsilon")
    p.add_argument("m", type=int, nargs="?")
    p.add_argument("n", type=int, nargs="?")
    p.add_argument("--xi", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--nu", type=int, default=None, help="evaluate the nu-channel-use bound")
    p.add_argument(
        "--gamma-source",
        choices=["no-collision", "cache", "literal"],
        default="no-collision",
    )
    p.add_argument("--gamma", type=float, default=None, help="gamma value for --gamma-source literal")
    p.add_argument("--fig2", action="store_true", help="sweep n with m = n^3")
    p.add_argument("--s", type=float, default=0.5, help="epsilon = 2^(-n^s) exponent for --fig2")
    p.add_argument("--n-max", type=int, default=40, help="largest n in the --fig2 sweep")

    p = sub.add_parser("rate", parents=[common], help="rate-loss trade-off from cached gamma values")
    p.add_argument("--m", dest="m_list", default="10,20,30,40", help="comma-separated mode counts")
    p.add_argument("--eta-start", type=float, default=0.5)
    p.add_argument("--eta-stop", type=float, default=1.0)
    p.add_argument("--eta-steps", type=int, default=26)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--svg", default=None, help="SVG chart path (default: derived from --out)")

    p = sub.add_parser("simulate", parents=[common], help="end-to-end protocol simulation")
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)
    p.add_argument("--K", type=int, default=16)
    p.add_argument("--xi", type=float, default=1.0)
    p.add_argument("--eta", type=float, default=1.0)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--transcript", default=None, help="write per-trial transcript CSV here")

    p = sub.add_parser("tables", parents=[common], help="re-estimate a published table")
    p.add_argument("which", choices=["I", "II", "III", "IV", "V"])

    return parser


def cmd_dim(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else 0
    m, n = args.m, args.n
    d = dim_hilbert(m, n)
    rows = [[
        m,
        n,
        d,
        _fmt(log2_dim_hilbert(m, n)),
        num_codewords(m, n) if n <= m else 0,
        _fmt(log2_num_codewords(m, n)) if n <= m else "",
        len(enumerate_patterns(m, n)),
    ]]
    _write_csv(args.out, "dim", seed, ["m", "n", "d", "log2_d", "C", "log2_C", "patterns"], rows)
    return 0


def _patterns_for(args: argparse.Namespace) -> list[PhotonPattern]:
    all_q = enumerate_patterns(args.m, args.n)
    if args.pattern is None:
        return all_q  # default to the full pattern set
    valid = ", ".join(q.label() for q in all_q)
    try:
        q = PhotonPattern.from_label(args.pattern)
    except DomainError:
        raise DomainError(f"cannot parse pattern {args.pattern!r}; valid patterns: {valid}")
    if q.parts not in {p.parts for p in all_q}:
        raise DomainError(f"{args.pattern!r} is not a pattern of n={args.n}; valid patterns: {valid}")
    return [q]


def cmd_estimate(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args)
    workers = _resolve_workers(args)
    if args.n > args.m:
        raise DomainError(f"need n <= m, got ({args.m}, {args.n})")
    patterns = _patterns_for(args)
    samples = args.samples or (DEFAULT_C_SAMPLES if args.kind == "c" else DEFAULT_GAMMA_SAMPLES)
    rows = []
    cache_rows = []
    for q in patterns:
        est = mc.estimate_moments(args.m, args.n, q, samples, seed, workers)
        if args.kind == "gamma":
            two_gamma = 2.0 * est.ratio
            stderr = 2.0 * est.stderr_ratio
            rows.append([args.m, args.n, q.label(), "two_gamma", _fmt(two_gamma), _fmt(stderr), samples, seed])
            cache_rows.append(
                cache.CacheRow(args.m, args.n, q, "two_gamma", two_gamma, stderr, samples, seed)
            )
        else:
            fac = q.norm_factor()
            rows.append([args.m, args.n, q.label(), "c", _fmt(est.mean), _fmt(est.stderr_mean), samples, seed])
            rows.append(
                [args.m, args.n, q.label(), "raw_c", _fmt(fac * est.mean), _fmt(fac * est.stderr_mean), samples, seed]
            )
            cache_rows.append(cache.CacheRow(args.m, args.n, q, "c", est.mean, est.stderr_mean, samples, seed))
            cache_rows.append(
                cache.CacheRow(args.m, args.n, q, "raw_c", fac * est.mean, fac * est.stderr_mean, samples, seed)
            )
    _write_csv(args.out, "estimate", seed, cache.HEADER, rows)
    cache.append_rows(args.cache, cache_rows)
    _msg(f"appended {len(cache_rows)} record(s) to {args.cache}")
    return 0


def _keysize_gamma(args: argparse.Namespace, m: int, n: int) -> tuple[float, float]:
    """Resolve (gamma, log2_c_min) from the requested source."""
    if args.gamma_source == "no-collision":
        c_min, gamma = mc.no_collision_values(m, n)
        return gamma, math.log2(c_min)
    log2_c_min = mc.log2_conjectured_c_min(m, n)
    if args.gamma_source == "literal":
        if args.gamma is None:
            raise DomainError("--gamma-source literal requires --gamma")
        return args.gamma, log2_c_min
    rows = cache.load_merged(args.cache)
    records = [
        mc.GammaRecord(r.m, r.n, r.q, r.value, r.stderr, r.samples, r.seed)
        for r in rows
        if r.kind == "two_gamma" and r.m == m and r.n == n
    ]
    if not records:
        raise CacheMissError(f"no two_gamma cache records for (m, n) = ({m}, {n})")
    bound = mc.gamma_bound(m, n, records)
    _msg(
        f"gamma from cache: {bound.two_gamma:.4g} at q={bound.argmax.label()} "
        f"({'exhaustive' if bound.exhaustive else 'conjectured maximiser'})"
    )
    return bound.two_gamma, log2_c_min


def cmd_keysize(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else 0
    if args.fig2:
        rows = []
        for n in range(2, args.n_max + 1):
            m = n**3
            eps = args.eps if args.eps is not None else 2.0 ** (-(n**args.s))
            c_min, gamma = mc.no_collision_values(m, n)
            rep = bounds.k_epsilon_single(
                m, n, xi=args.xi, epsilon=eps, gamma=gamma, log2_c_min=math.log2(c_min)
            )
            rows.append(
                [n, m, _fmt(eps), _fmt(rep.log2_M), _fmt(rep.log2_K_epsilon), rep.active_branch]
            )
        _write_csv(
            args.out, "keysize", seed, ["n", "m", "epsilon", "log2_M", "log2_K_epsilon", "branch"], rows
        )
        return 0

    if args.m is None or args.n is None:
        raise DomainError("keysize requires positional m and n (or --fig2)")
    if args.eps is None:
        raise DomainError("keysize requires --eps")
    gamma, log2_c_min = _keysize_gamma(args, args.m, args.n)
    if args.nu is not None:
        rep = bounds.k_epsilon_multi(
            args.m, args.n, args.nu, args.xi, args.eps, gamma, log2_c_min=log2_c_min
        )
    else:
        rep = bounds.k_epsilon_single(
            args.m, args.n, xi=args.xi, epsilon=args.eps, gamma=gamma, log2_c_min=log2_c_min
        )
    print(f"log2_M          = {rep.log2_M:.3f}")
    print(f"log2_K_epsilon  = {rep.log2_K_epsilon:.3f}")
    print(f"active_branch   = {rep.active_branch}")
    print(f"margin_bits     = {rep.margin_bits:.3f}")
    if args.out:
        header = [
            "m", "n", "nu", "xi", "epsilon", "gamma", "log2_c_min",
            "log2_M", "log2_K_epsilon", "active_branch", "margin_bits",
        ]
        row = [
            rep.m, rep.n, rep.nu, _fmt(args.xi), _fmt(args.eps), _fmt(gamma), _fmt(rep.log2_c_min),
            _fmt(rep.log2_M), _fmt(rep.log2_K_epsilon), rep.active_branch, _fmt(rep.margin_bits),
        ]
        _write_csv(args.out, "keysize", seed, header, [row])
    return 0


def cmd_rate(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else 0
    m_list = [int(tok) for tok in args.m_list.split(",") if tok]
    if args.eta_steps < 2 or not (0.0 <= args.eta_start < args.eta_stop <= 1.0):
        raise DomainError("need 0 <= eta-start < eta-stop <= 1 and eta-steps >= 2")
    etas = [
        args.eta_start + i * (args.eta_stop - args.eta_start) / (args.eta_steps - 1)
        for i in range(args.eta_steps)
    ]
    rows = []
    series = []
    cache_rows = cache.load_merged(args.cache)
    for m in m_list:
        curve = bounds.rate_loss_curve(m, etas, cache_rows, beta=args.beta, n_max=args.n_max)
        series.append((f"m={m}", [p.eta for p in curve], [p.rate_per_mode for p in curve]))
        for p in curve:
            rows.append([m, _fmt(p.eta), p.best_n, _fmt(p.rate_per_mode), _fmt(p.rate)])
    _write_csv(args.out, "rate", seed, ["m", "eta", "best_n", "rate_per_mode", "rate"], rows)
    svg_path = args.svg
    if svg_path is None and args.out not in (None, "-"):
        svg_path = str(Path(args.out).with_suffix(".svg"))
    if svg_path:
        line_chart(series, svg_path, x_label="transmissivity eta", y_label="net bits per mode")
        _msg(f"wrote {svg_path}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args)
    workers = _resolve_workers(args)
    config = protocol.ProtocolConfig(
        m=args.m, n=args.n, K=args.K, xi=args.xi, eta=args.eta, trials=args.trials, seed=seed
    )
    summary = protocol.run_trials(config, workers=workers, collect_records=args.transcript is not None)
    closed_form = bounds.mutual_info_lossy(args.m, args.n, args.eta)
    print(f"keyed_success_rate = {summary.keyed_success_rate:.6f}")
    print(f"keyed_mi_bits      = {summary.keyed_mi_bits:.6f} (plug-in bias <= {summary.keyed_bias_bound:.2e})")
    print(f"blind_mi_bits      = {summary.blind_mi_bits:.6f}")
    print(f"closed_form_mi     = {closed_form:.6f}  (keyed deviation {summary.keyed_mi_bits - closed_form:+.4f})")
    if args.out:
        header = [
            "m", "n", "K", "M", "xi", "eta", "trials", "seed",
            "keyed_success_rate", "keyed_mi_bits", "blind_mi_bits", "closed_form_mi_bits",
        ]
        row = [
            summary.m, summary.n, summary.K, summary.M, _fmt(summary.xi), _fmt(summary.eta),
            summary.trials, summary.seed, _fmt(summary.keyed_success_rate),
            _fmt(summary.keyed_mi_bits), _fmt(summary.blind_mi_bits), _fmt(closed_form),
        ]
        _write_csv(args.out, "simulate", seed, header, [row])
    if args.transcript:
        header = ["trial", "x", "k", "clicks", "detected", "decoded", "ambiguity"]
        rows = [
            [
                r.trial,
                r.x,
                r.k,
                r.clicks,
                "-".join(str(v) for v in r.detected.occupations),
                "" if r.decoded is None else r.decoded,
                r.ambiguity,
            ]
            for r in summary.records
        ]
        _write_csv(args.transcript, "simulate-transcript", seed, header, rows)
    return 0


def _table_entries(which: str) -> list[tuple[int, int, PhotonPattern, float]]:
    if which == "I":
        src = reference.TABLE_I
    else:
        src = reference.gamma_tables()[which]
    out = []
    for (m, n), patterns in sorted(src.items()):
        for parts, value in patterns.items():
            out.append((m, n, PhotonPattern(parts), value))
    return out


def cmd_tables(args: argparse.Namespace) -> int:
    seed = _resolve_seed(args)
    workers = _resolve_workers(args)
    entries = _table_entries(args.which)
    samples = args.samples or (DEFAULT_C_SAMPLES if args.which == "I" else DEFAULT_GAMMA_SAMPLES)

    pilot_t = time.perf_counter()
    for m, n, q, _ in entries:
        mc.estimate_moments(m, n, q, mc.MIN_SAMPLES, seed, workers=1)
    pilot = time.perf_counter() - pilot_t
    eta_seconds = pilot * samples / mc.MIN_SAMPLES
    _msg(f"estimated runtime ~{eta_seconds:.0f} s for table {args.which} at {samples} samples")
    if eta_seconds > LONG_RUN_SECONDS and not args.accept_long:
        raise DomainError(
            f"table {args.which} needs ~{eta_seconds:.0f} s; rerun with --accept-long "
            "(or lower --samples)"
        )

    rows = []
    if args.which == "I":
        header = ["m", "n", "q", "c", "stderr_c", "raw_c", "stderr_raw", "published"]
        for m, n, q, published in entries:
            est = mc.estimate_moments(m, n, q, samples, seed, workers)
            fac = q.norm_factor()
            rows.append(
                [m, n, q.label(), _fmt(est.mean), _fmt(est.stderr_mean),
                 _fmt(fac * est.mean), _fmt(fac * est.stderr_mean), _fmt(published)]
            )
    else:
        header = ["m", "n", "q", "two_gamma", "stderr", "published", "dev_sigma"]
        for m, n, q, published in entries:
            rec = mc.estimate_gamma_q(m, n, q, samples, seed, workers)
            dev = (rec.two_gamma_q - published) / rec.stderr if rec.stderr else float("inf")
            rows.append(
                [m, n, q.label(), _fmt(rec.two_gamma_q), _fmt(rec.stderr), _fmt(published), _fmt(dev)]
            )
    _write_csv(args.out, "tables", seed, header, rows)
    return 0


_HANDLERS = {
    "dim": cmd_dim,
    "estimate": cmd_estimate,
    "keysize": cmd_keysize,
    "rate": cmd_rate,
    "simulate": cmd_simulate,
    "tables": cmd_tables,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    overrides = _load_config_file(argv)
    if overrides:
        typed: dict = {}
        for key, value in overrides.items():
            if key in ("seed", "workers", "samples", "K", "trials", "nu", "n_max", "eta_steps"):
                typed[key] = int(value)
            elif key in ("xi", "eta", "eps", "beta", "gamma", "s", "eta_start", "eta_stop"):
                typed[key] = float(value)
            else:
                typed[key] = value
        parser.set_defaults(**typed)
        for sub_action in parser._subparsers._group_actions:
            for sub in sub_action.choices.values():
                sub.set_defaults(**typed)
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except DomainError as exc:
        _msg(f"error: {exc}")
        return 2
    except CacheMissError as exc:
        _msg(f"cache miss: {exc}")
        return 3
    except ResourceError as exc:
        _msg(f"resource cap: {exc}")
        return 4


if __name__ == "__main__":
    sys.exit(main())
