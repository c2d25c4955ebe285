"""Closed-form key sizes, consumption rates, failure probabilities, and
lossy mutual information, all evaluated in log space.

The minimum pool size for security parameter epsilon is

    K_eps = max{ gamma * [ (256/eps^3) (d/M) ln(20/(eps c_min))
                           + (32/eps^2) ln M ],
                 (32/eps^2) (ln 2d)^2 / (M c_min) }

with d the n-photon space dimension and M the number of codewords in
use.  The first branch comes from the heavy-tail (Maurer) concentration
step, the second from the matrix Chernoff step; the report records which
one is active.  Everything is computed from log2 quantities so the
m = 8000, n = 20 regime (K ~ 2^127) never leaves floating point range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import CacheMissError, DomainError
from .fock import log2_dim_hilbert, log2_num_codewords
from .mc import log2_conjectured_c_min

LN2 = math.log(2.0)


@dataclass(frozen=True)
class SecurityParams:
    """Scalar knobs of the protocol analysis."""

    epsilon: float
    xi: float = 1.0
    beta: float = 1.0
    eta: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon < 1.0:
            raise DomainError(f"need 0 < epsilon < 1, got {self.epsilon}")
        if not 0.0 < self.xi <= 1.0:
            raise DomainError(f"need 0 < xi <= 1, got {self.xi}")
        if not 0.0 <= self.beta <= 1.0:
            raise DomainError(f"need 0 <= beta <= 1, got {self.beta}")
        if not 0.0 <= self.eta <= 1.0:
            raise DomainError(f"need 0 <= eta <= 1, got {self.eta}")


@dataclass(frozen=True)
class KeySizeReport:
    """log2 of the key-space size with branch diagnostics and input echo."""

    log2_M: float
    log2_K_epsilon: float
    active_branch: str  # "maurer" | "chernoff"
    gamma_used: float
    log2_c_min: float
    m: int
    n: int
    nu: int
    epsilon: float
    log2_d: float
    log2_maurer: float
    log2_chernoff: float

    @property
    def k_epsilon_int(self) -> Optional[int]:
        """ceil(K_eps) when it fits comfortably in exact float range."""
        if self.log2_K_epsilon < 52:
            return max(1, math.ceil(2.0**self.log2_K_epsilon))
        return None

    @property
    def margin_bits(self) -> float:
        """log2 M - log2 K_eps; positive when locking beats one-time pad."""
        return self.log2_M - self.log2_K_epsilon


def _resolve_log2_c_min(c_min: Optional[float], log2_c_min: Optional[float]) -> float:
    if log2_c_min is not None:
        if c_min is not None:
            raise DomainError("pass either c_min or log2_c_min, not both")
        return float(log2_c_min)
    if c_min is None:
        raise DomainError("one of c_min or log2_c_min is required")
    if not 0.0 < c_min <= 1.0:
        raise DomainError(f"need 0 < c_min <= 1, got {c_min}")
    return math.log2(c_min)


def _resolve_log2_M(
    m: int, n: int, M: Optional[float], xi: Optional[float]
) -> float:
    if M is not None:
        if xi is not None:
            raise DomainError("pass either M or xi, not both")
        if M < 1:
            raise DomainError(f"need M >= 1, got {M}")
        return math.log2(M)
    if xi is None:
        raise DomainError("one of M or xi is required")
    if not 0.0 < xi <= 1.0:
        raise DomainError(f"need 0 < xi <= 1, got {xi}")
    return math.log2(xi) + log2_num_codewords(m, n)


def k_epsilon_single(
    m: int,
    n: int,
    M: Optional[float] = None,
    *,
    xi: Optional[float] = None,
    epsilon: float,
    gamma: float,
    c_min: Optional[float] = None,
    log2_c_min: Optional[float] = None,
) -> KeySizeReport:
    """Minimum scrambling-pool size for one channel use.

    ``M`` may be given directly (any real >= 1) or via the code-space
    fraction ``xi``.  ``gamma`` is the concentration ratio in the tables'
    doubled convention; ``c_min`` may be supplied in log2 form for the
    regimes where it underflows.
    """
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"need 0 < epsilon < 1, got {epsilon}")
    if gamma < 1.0:
        raise DomainError(f"need gamma >= 1, got {gamma}")
    l2c = _resolve_log2_c_min(c_min, log2_c_min)
    l2M = _resolve_log2_M(m, n, M, xi)
    l2d = log2_dim_hilbert(m, n)

    ln_eps = math.log(epsilon)
    ln_M = l2M * LN2
    ln_d = l2d * LN2
    ln_c = l2c * LN2

    # ln(20 / (eps c_min)) — already a log, safe as a plain float
    ln_inner = math.log(20.0) - ln_eps - ln_c

    term_a = math.log(256.0) - 3.0 * ln_eps + ln_d - ln_M + math.log(ln_inner)
    term_b = (
        math.log(32.0) - 2.0 * ln_eps + math.log(ln_M) if ln_M > 0.0 else -math.inf
    )
    ln_maurer = math.log(gamma) + np.logaddexp(term_a, term_b)
    ln_chernoff = (
        math.log(32.0) - 2.0 * ln_eps + 2.0 * math.log(LN2 + ln_d) - ln_M - ln_c
    )

    ln_k = max(ln_maurer, ln_chernoff)
    return KeySizeReport(
        log2_M=l2M,
        log2_K_epsilon=ln_k / LN2,
        active_branch="maurer" if ln_maurer >= ln_chernoff else "chernoff",
        gamma_used=gamma,
        log2_c_min=l2c,
        m=m,
        n=n,
        nu=1,
        epsilon=epsilon,
        log2_d=l2d,
        log2_maurer=ln_maurer / LN2,
        log2_chernoff=ln_chernoff / LN2,
    )


def k_epsilon_multi(
    m: int,
    n: int,
    nu: int,
    xi: float,
    epsilon: float,
    gamma: float,
    c_min: Optional[float] = None,
    log2_c_min: Optional[float] = None,
) -> KeySizeReport:
    """Pool size for nu channel uses with local unitaries.

    Same structure as the single-use bound with M = xi C^nu, d^nu,
    gamma^nu, c_min^nu and the printed constants 512 and 64 in the
    heavy-tail branch.
    """
    if nu < 1:
        raise DomainError(f"need nu >= 1, got {nu}")
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"need 0 < epsilon < 1, got {epsilon}")
    if gamma < 1.0:
        raise DomainError(f"need gamma >= 1, got {gamma}")
    if not 0.0 < xi <= 1.0:
        raise DomainError(f"need 0 < xi <= 1, got {xi}")
    l2c = _resolve_log2_c_min(c_min, log2_c_min)
    l2d = log2_dim_hilbert(m, n)
    l2C = log2_num_codewords(m, n)
    l2M = math.log2(xi) + nu * l2C

    ln_eps = math.log(epsilon)
    ln_M = l2M * LN2
    ln_c = l2c * LN2
    ln_d = l2d * LN2

    ln_inner = math.log(20.0) - ln_eps - nu * ln_c
    term_a = math.log(512.0) - 3.0 * ln_eps + nu * ln_d - ln_M + math.log(ln_inner)
    term_b = (
        math.log(64.0) - 2.0 * ln_eps + math.log(ln_M) if ln_M > 0.0 else -math.inf
    )
    ln_maurer = nu * math.log(gamma) + np.logaddexp(term_a, term_b)
    ln_chernoff = (
        math.log(32.0)
        - 2.0 * ln_eps
        + 2.0 * math.log(LN2 + nu * ln_d)
        - ln_M
        - nu * ln_c
    )
    ln_k = max(ln_maurer, ln_chernoff)
    return KeySizeReport(
        log2_M=l2M,
        log2_K_epsilon=ln_k / LN2,
        active_branch="maurer" if ln_maurer >= ln_chernoff else "chernoff",
        gamma_used=gamma,
        log2_c_min=l2c,
        m=m,
        n=n,
        nu=nu,
        epsilon=epsilon,
        log2_d=l2d,
        log2_maurer=ln_maurer / LN2,
        log2_chernoff=ln_chernoff / LN2,
    )


def key_consumption_rate(
    gamma: float,
    m: int,
    n: int,
    c_min: Optional[float] = None,
    log2_c_min: Optional[float] = None,
) -> float:
    """Asymptotic secret-key consumption in bits per channel use:

        k = max{ log2 gamma + log2(d/C), log2(1 / (C c_min)) }.
    """
    if gamma < 1.0:
        raise DomainError(f"need gamma >= 1, got {gamma}")
    l2c = _resolve_log2_c_min(c_min, log2_c_min)
    l2d = log2_dim_hilbert(m, n)
    l2C = log2_num_codewords(m, n)
    return max(math.log2(gamma) + l2d - l2C, -l2C - l2c)


def mutual_info_lossy(m: int, n: int, eta: float) -> float:
    """I(X;Y|key) in bits through a transmissivity-eta loss channel.

    Each photon survives independently with probability eta; a receiver
    who knows the key photo-detects the surviving subset, which is
    compatible with binomial(m-k, n-k) codewords after k clicks.
    """
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"need 0 <= eta <= 1, got {eta}")
    if n > m:
        raise DomainError(f"need n <= m, got ({m}, {n})")
    l2C = log2_num_codewords(m, n)
    if eta == 1.0:
        return l2C
    if eta == 0.0:
        return 0.0
    acc = 0.0
    for k in range(n):  # the k = n term is log2 C(m-n, 0) = 0
        pmf = math.comb(n, k) * eta**k * (1.0 - eta) ** (n - k)
        acc += pmf * log2_num_codewords(m - k, n - k)
    return l2C - acc


def net_rate(
    m: int,
    n: int,
    eta: float,
    beta: float,
    gamma: float,
    c_min: Optional[float] = None,
    log2_c_min: Optional[float] = None,
) -> float:
    """Net key bits per channel use; negative when locking loses."""
    if not 0.0 <= beta <= 1.0:
        raise DomainError(f"need 0 <= beta <= 1, got {beta}")
    info = mutual_info_lossy(m, n, eta)
    k = key_consumption_rate(gamma, m, n, c_min=c_min, log2_c_min=log2_c_min)
    return beta * info - k


@dataclass(frozen=True)
class RatePoint:
    eta: float
    best_n: int
    rate_per_mode: float
    rate: float


def rate_loss_curve(
    m: int,
    eta_grid: Sequence[float],
    cache_rows,
    beta: float = 1.0,
    n_max: Optional[int] = None,
) -> list[RatePoint]:
    """Loss-rate trade-off: maximise the net rate over n at each eta.

    gamma values come from cached bunched-pattern records (the
    conjectured maximiser); c_min is the conjectured 1/d.  n = 1 uses
    the exact single-photon values instead of a cache entry.  Missing
    cache records raise with the full list of required (m, n) pairs.
    """
    from .cache import lookup_two_gamma_bunched

    if n_max is None:
        n_max = m
    n_max = min(n_max, m)
    candidates = list(range(1, n_max + 1))
    gammas: dict[int, float] = {}
    missing: list[tuple[int, int]] = []
    for n in candidates:
        if n == 1:
            gammas[n] = 2.0
            continue
        try:
            gammas[n] = lookup_two_gamma_bunched(cache_rows, m, n).value
        except CacheMissError:
            missing.append((m, n))
    if missing:
        raise CacheMissError(
            "missing bunched two_gamma cache records for (m, n) pairs: "
            + ", ".join(str(p) for p in missing)
        )
    consumption = {
        n: key_consumption_rate(gammas[n], m, n, log2_c_min=log2_conjectured_c_min(m, n))
        for n in candidates
    }
    out: list[RatePoint] = []
    for eta in eta_grid:
        best_n, best_r = None, -math.inf
        for n in candidates:
            r = beta * mutual_info_lossy(m, n, eta) - consumption[n]
            if r > best_r:
                best_n, best_r = n, r
        out.append(RatePoint(eta=float(eta), best_n=best_n, rate_per_mode=best_r / m, rate=best_r))
    return out


def failure_prob_bounds(
    K: float,
    M: float,
    d: float,
    epsilon: float,
    c_min: Optional[float] = None,
    gamma: float = 2.0,
    log2_c_min: Optional[float] = None,
) -> tuple[float, float]:
    """(ln p1, ln p2) bounds on the two bad events of the construction:

        ln p1 <= ln(2d) - (eps/4) sqrt(M K c_min / 2)
        ln p2 <= 2d ln(20/(eps c_min)) + (eps M / 4) ln M
                 - K M eps^3 / (128 gamma)

    Values may be positive (vacuous) for small K.
    """
    if K < 1 or M < 1 or d < 1:
        raise DomainError("need K, M, d >= 1")
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"need 0 < epsilon < 1, got {epsilon}")
    if gamma < 1.0:
        raise DomainError(f"need gamma >= 1, got {gamma}")
    l2c = _resolve_log2_c_min(c_min, log2_c_min)
    ln_c = l2c * LN2
    half_log = 0.5 * (math.log(M) + math.log(K) + ln_c - math.log(2.0))
    ln_p1 = math.log(2.0 * d) - (epsilon / 4.0) * math.exp(half_log)
    ln_inner = math.log(20.0) - math.log(epsilon) - ln_c
    ln_p2 = (
        2.0 * d * ln_inner
        + (epsilon * M / 4.0) * math.log(M)
        - K * M * epsilon**3 / (128.0 * gamma)
    )
    return ln_p1, ln_p2
