"""Seeded Monte Carlo estimation of the averaged-state coefficients c_q
and the concentration factor gamma_q.

For a fixed single-occupancy codeword psi = |1,...,1,0,...,0> and a
representative phi_q carrying pattern q on the leading modes, the
estimators accumulate X = |<phi_q| U |psi>|^2 over Haar draws of U.
c_q is E[X]; the tables' convention "2 gamma_q" is 2 E[X^2] / E[X]^2.

Samples are accumulated in fixed 4096-sample chunks whose RNG streams
derive from (seed, chunk index), and chunk sums are combined in index
order with compensated addition, so results are bit-identical for any
worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError
from .fock import (
    PatternLike,
    PhotonPattern,
    as_pattern,
    dim_hilbert,
    enumerate_patterns,
    log2_dim_hilbert,
)
from .linop import _permanent_batch, stiefel_batch

CHUNK = 4096

MIN_SAMPLES = 1_000

#: Spec'd defaults: c_q runs are cheap, gamma_q runs want the full 1e6.
DEFAULT_C_SAMPLES = 200_000
DEFAULT_GAMMA_SAMPLES = 1_000_000

_BOOTSTRAP_RESAMPLES = 200


@dataclass(frozen=True)
class MomentEstimate:
    """First and second moments of X with their standard errors."""

    mean: float
    second_moment: float
    stderr_mean: float
    stderr_ratio: float
    samples: int
    seed: int
    m: int
    n: int
    q: PhotonPattern

    @property
    def ratio(self) -> float:
        """E[X^2] / E[X]^2 (>= 1 by Jensen up to sampling noise)."""
        return self.second_moment / self.mean**2


@dataclass(frozen=True)
class GammaRecord:
    """A single numeric 2*gamma_q value with its provenance."""

    m: int
    n: int
    q: PhotonPattern
    two_gamma_q: float
    stderr: float
    samples: int
    seed: int


@dataclass(frozen=True)
class GammaBound:
    """Result of maximising 2*gamma_q over supplied records."""

    two_gamma: float
    exhaustive: bool
    conjecture_based: bool
    argmax: PhotonPattern


def _chunk_rng(seed: int, chunk_idx: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(chunk_idx),))
    return np.random.Generator(np.random.PCG64(ss))


def _pattern_columns(q: PhotonPattern) -> np.ndarray:
    cols: list[int] = []
    for j, qj in enumerate(q.parts):
        cols.extend([j] * qj)
    return np.array(cols, dtype=np.intp)


def _chunk_power_sums(args: tuple[int, int, tuple[int, ...], int, int, int]) -> np.ndarray:
    """Power sums (sum X, sum X^2, sum X^3, sum X^4) for one chunk."""
    m, n, parts, seed, chunk_idx, count = args
    q = PhotonPattern(parts)
    rng = _chunk_rng(seed, chunk_idx)
    ncols = len(parts)
    frame = stiefel_batch(rng, count, m, ncols)
    if ncols == 1:
        # fully bunched pattern: the permanent of the repeated-column
        # submatrix collapses to n! times a product of column entries
        x = np.prod(np.abs(frame[:, :n, 0]) ** 2, axis=1) * math.factorial(n)
    else:
        a = frame[:, :n, :][:, :, _pattern_columns(q)]
        x = np.abs(_permanent_batch(a)) ** 2 / q.norm_factor()
    return np.array([x.sum(), (x**2).sum(), (x**3).sum(), (x**4).sum()])


def _neumaier_combine(rows: Sequence[np.ndarray]) -> np.ndarray:
    total = np.zeros(4)
    comp = np.zeros(4)
    for row in rows:
        t = total + row
        comp += np.where(np.abs(total) >= np.abs(row), (total - t) + row, (row - t) + total)
        total = t
    return total + comp


def _validate(m: int, n: int, q: PhotonPattern, samples: int) -> None:
    if n > m:
        raise DomainError(f"codeword needs n <= m, got (m, n) = ({m}, {n})")
    if q.n != n:
        raise DomainError(f"pattern {q.parts} is not a pattern of n = {n}")
    if len(q.parts) > m:
        raise DomainError(f"pattern {q.parts} does not fit in m = {m} modes")
    if samples < MIN_SAMPLES:
        raise DomainError(f"need samples >= {MIN_SAMPLES}, got {samples}")


def _chunk_plan(samples: int) -> list[tuple[int, int]]:
    plan = []
    idx = 0
    left = samples
    while left > 0:
        size = min(CHUNK, left)
        plan.append((idx, size))
        left -= size
        idx += 1
    return plan


def estimate_moments(
    m: int,
    n: int,
    q: PatternLike,
    samples: int,
    seed: int,
    workers: int = 1,
) -> MomentEstimate:
    """Monte Carlo moments of X = |<phi_q|U|psi>|^2 under Haar U.

    Deterministic for a given seed regardless of ``workers``.  The ratio
    standard error comes from first-order propagation with the sample
    covariance of (X, X^2); a block bootstrap over chunk sums takes over
    when the propagated estimate is degenerate.
    """
    q = as_pattern(q)
    _validate(m, n, q, samples)
    plan = _chunk_plan(samples)
    tasks = [(m, n, q.parts, seed, idx, size) for idx, size in plan]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk_sums = list(pool.map(_chunk_power_sums, tasks, chunksize=8))
    else:
        chunk_sums = [_chunk_power_sums(t) for t in tasks]
    s = _neumaier_combine(chunk_sums)
    nN = float(samples)
    m1, m2, m3, m4 = (float(v) for v in s / nN)

    var_x = max(m2 - m1**2, 0.0)
    stderr_mean = math.sqrt(var_x / nN)

    ratio = m2 / m1**2
    var22 = max(m4 - m2**2, 0.0)
    cov12 = m3 - m1 * m2
    rel_var = var22 / m2**2 + 4.0 * var_x / m1**2 - 4.0 * cov12 / (m1 * m2)
    stderr_ratio = ratio * math.sqrt(max(rel_var, 0.0) / nN)
    if not math.isfinite(stderr_ratio) or rel_var <= 0.0 or stderr_ratio > 0.5 * ratio:
        stderr_ratio = _bootstrap_ratio_stderr(chunk_sums, plan, seed)

    return MomentEstimate(
        mean=m1,
        second_moment=m2,
        stderr_mean=stderr_mean,
        stderr_ratio=stderr_ratio,
        samples=samples,
        seed=seed,
        m=m,
        n=n,
        q=q,
    )


def _bootstrap_ratio_stderr(
    chunk_sums: Sequence[np.ndarray], plan: Sequence[tuple[int, int]], seed: int
) -> float:
    """Block bootstrap of E[X^2]/E[X]^2 over per-chunk sums."""
    sums = np.array([row[:2] for row in chunk_sums])
    sizes = np.array([size for _, size in plan], dtype=float)
    k = len(plan)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=[int(seed), 0xB007])))
    ratios = np.empty(_BOOTSTRAP_RESAMPLES)
    for b in range(_BOOTSTRAP_RESAMPLES):
        pick = rng.integers(0, k, size=k)
        tot = sums[pick].sum(axis=0)
        nn = sizes[pick].sum()
        mean = tot[0] / nn
        ratios[b] = (tot[1] / nn) / mean**2
    return float(np.std(ratios))


def estimate_c_q(
    m: int, n: int, q: PatternLike, samples: int, seed: int, workers: int = 1
) -> float:
    """c_q = E_U[|<phi_q|U|psi>|^2]; equals 1/d for every pattern."""
    return estimate_moments(m, n, q, samples, seed, workers).mean


def estimate_raw_c_q(
    m: int, n: int, q: PatternLike, samples: int, seed: int, workers: int = 1
) -> float:
    """Unnormalised permanent second moment (prod q_j!) * c_q.

    This is the quantity some published tables report for bunched
    patterns; it differs from c_q exactly by the repeated-mode factor.
    """
    q = as_pattern(q)
    return q.norm_factor() * estimate_moments(m, n, q, samples, seed, workers).mean


def estimate_gamma_q(
    m: int, n: int, q: PatternLike, samples: int, seed: int, workers: int = 1
) -> GammaRecord:
    """Tables-convention 2*gamma_q = 2 E[X^2]/E[X]^2 with standard error.

    The ratio is normalisation independent: any constant factor on X
    cancels between numerator and denominator.
    """
    est = estimate_moments(m, n, q, samples, seed, workers)
    return GammaRecord(
        m=m,
        n=n,
        q=est.q,
        two_gamma_q=2.0 * est.ratio,
        stderr=2.0 * est.stderr_ratio,
        samples=samples,
        seed=seed,
    )


def gamma_bound(m: int, n: int, records: Sequence[GammaRecord]) -> GammaBound:
    """Max of 2*gamma_q over records, flagging the coverage that backs it.

    Coverage is either exhaustive over all patterns of (m, n) or rests on
    the conjecture that the fully bunched pattern maximises the ratio.
    """
    records = [r for r in records if r.m == m and r.n == n]
    if not records:
        raise DomainError(f"no gamma records supplied for (m, n) = ({m}, {n})")
    have = {r.q.parts for r in records}
    all_patterns = {p.parts for p in enumerate_patterns(m, n)}
    exhaustive = all_patterns <= have
    conjecture_based = not exhaustive
    if conjecture_based and (n,) not in have:
        raise DomainError(
            f"records for (m, n) = ({m}, {n}) cover neither all patterns nor "
            f"the conjectured maximiser {(n,)}"
        )
    best = max(records, key=lambda r: r.two_gamma_q)
    return GammaBound(
        two_gamma=best.two_gamma_q,
        exhaustive=exhaustive,
        conjecture_based=conjecture_based,
        argmax=best.q,
    )


def conjectured_c_min(m: int, n: int) -> float:
    """Conjectured minimum coefficient, 1/dim of the n-photon space."""
    return 1.0 / dim_hilbert(m, n)


def log2_conjectured_c_min(m: int, n: int) -> float:
    return -log2_dim_hilbert(m, n)


def no_collision_values(m: int, n: int) -> tuple[float, float]:
    """(c_min, gamma) in the diluted regime m >> n^2 >> 1.

    Returns (n!/m^n, 2(n+1)).  The single-photon case is exact rather
    than asymptotic: the factor-2 penalty of the basis-vector reduction
    is not needed there, so gamma = 2 and c_min = 1/m.
    """
    if n > m:
        raise DomainError(f"need n <= m, got ({m}, {n})")
    if n == 1:
        return 1.0 / m, 2.0
    return math.factorial(n) / float(m) ** n, 2.0 * (n + 1)
