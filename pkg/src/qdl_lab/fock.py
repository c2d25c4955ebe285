"""Fock-space combinatorics for n photons in m optical modes.

Basis states are occupation tuples ``(n_1, ..., n_m)`` with ``sum = n``.
The canonical ordering is descending lexicographic on the occupation
tuple, so ``|n,0,...,0>`` always has index 0.  A photon *pattern* is the
multiset of nonzero occupations, normalised to non-increasing order;
patterns label the bunching subspaces that the Haar-averaged state is
block diagonal over.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence, Union

import numpy as np

from .errors import DomainError, ResourceError

#: Largest basis size enumerate_basis / output distributions will materialise.
BASIS_CAP = 10_000_000

LN2 = math.log(2.0)


def _check_mn(m: int, n: int) -> None:
    if m < 1 or n < 0:
        raise DomainError(f"need m >= 1 and n >= 0, got (m, n) = ({m}, {n})")


@dataclass(frozen=True)
class ModeConfig:
    """Occupation numbers of m modes holding n photons in total."""

    occupations: tuple[int, ...]

    def __post_init__(self) -> None:
        occ = tuple(int(v) for v in self.occupations)
        object.__setattr__(self, "occupations", occ)
        if len(occ) < 1 or any(v < 0 for v in occ):
            raise DomainError(f"invalid occupations {occ}")

    @property
    def m(self) -> int:
        return len(self.occupations)

    @property
    def n(self) -> int:
        return sum(self.occupations)

    @property
    def modes(self) -> tuple[int, ...]:
        """Indices of occupied modes, each repeated by its occupancy."""
        out: list[int] = []
        for i, v in enumerate(self.occupations):
            out.extend([i] * v)
        return tuple(out)

    def is_single_occupancy(self) -> bool:
        return all(v <= 1 for v in self.occupations)

    def __iter__(self) -> Iterator[int]:
        return iter(self.occupations)

    def __len__(self) -> int:
        return len(self.occupations)

    def __getitem__(self, i: int) -> int:
        return self.occupations[i]


@dataclass(frozen=True)
class PhotonPattern:
    """Non-increasing positive parts summing to the photon number."""

    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        parts = tuple(int(v) for v in self.parts)
        object.__setattr__(self, "parts", parts)
        if any(v <= 0 for v in parts):
            raise DomainError(f"pattern parts must be positive, got {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise DomainError(f"pattern parts must be non-increasing, got {parts}")

    @property
    def n(self) -> int:
        return sum(self.parts)

    @property
    def num_modes_occupied(self) -> int:
        return len(self.parts)

    def subspace_dim(self, m: int) -> int:
        """Number of distinct ModeConfigs on m modes with this pattern."""
        if m < len(self.parts):
            raise DomainError(f"pattern {self.parts} needs at least {len(self.parts)} modes")
        counts: dict[int, int] = {}
        for v in self.parts:
            counts[v] = counts.get(v, 0) + 1
        denom = math.factorial(m - len(self.parts))
        for c in counts.values():
            denom *= math.factorial(c)
        return math.factorial(m) // denom

    def norm_factor(self) -> int:
        """prod_j q_j!, the repeated-mode normalisation of the pattern."""
        out = 1
        for v in self.parts:
            out *= math.factorial(v)
        return out

    def label(self) -> str:
        """Dash-joined parts, e.g. ``2-1`` for pattern (2, 1)."""
        return "-".join(str(v) for v in self.parts)

    @classmethod
    def from_label(cls, text: str) -> "PhotonPattern":
        try:
            parts = tuple(int(tok) for tok in text.strip().split("-"))
        except ValueError as exc:
            raise DomainError(f"cannot parse pattern label {text!r}") from exc
        return cls(parts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __len__(self) -> int:
        return len(self.parts)


PatternLike = Union[PhotonPattern, Sequence[int]]


def as_pattern(q: PatternLike) -> PhotonPattern:
    if isinstance(q, PhotonPattern):
        return q
    return PhotonPattern(tuple(q))


@dataclass(frozen=True)
class CodeBook:
    """Ordered collection of distinct single-occupancy codewords."""

    codewords: tuple[ModeConfig, ...]

    def __post_init__(self) -> None:
        if not self.codewords:
            raise DomainError("empty codebook")
        m = self.codewords[0].m
        n = self.codewords[0].n
        seen = set()
        for cw in self.codewords:
            if cw.m != m or cw.n != n:
                raise DomainError("codewords disagree on (m, n)")
            if not cw.is_single_occupancy():
                raise DomainError(f"codeword {cw.occupations} is not single occupancy")
            if cw.occupations in seen:
                raise DomainError(f"duplicate codeword {cw.occupations}")
            seen.add(cw.occupations)

    @property
    def m(self) -> int:
        return self.codewords[0].m

    @property
    def n(self) -> int:
        return self.codewords[0].n

    @property
    def M(self) -> int:
        return len(self.codewords)

    def index_of(self, config: ModeConfig) -> int:
        for i, cw in enumerate(self.codewords):
            if cw.occupations == config.occupations:
                return i
        raise DomainError(f"{config.occupations} is not in the codebook")

    def __len__(self) -> int:
        return len(self.codewords)

    def __getitem__(self, i: int) -> ModeConfig:
        return self.codewords[i]


def dim_hilbert(m: int, n: int) -> int:
    """Dimension binomial(n+m-1, n) of the n-photon m-mode space."""
    _check_mn(m, n)
    return math.comb(n + m - 1, n)


def log2_dim_hilbert(m: int, n: int) -> float:
    """log2 of dim_hilbert computed in log space (safe for m ~ 1e4)."""
    _check_mn(m, n)
    return (math.lgamma(n + m) - math.lgamma(n + 1) - math.lgamma(m)) / LN2


def num_codewords(m: int, n: int) -> int:
    """Number binomial(m, n) of single-occupancy basis states."""
    _check_mn(m, n)
    if n > m:
        raise DomainError(f"no single-occupancy states for n={n} > m={m}")
    return math.comb(m, n)


def log2_num_codewords(m: int, n: int) -> float:
    _check_mn(m, n)
    if n > m:
        raise DomainError(f"no single-occupancy states for n={n} > m={m}")
    return (math.lgamma(m + 1) - math.lgamma(n + 1) - math.lgamma(m - n + 1)) / LN2


def enumerate_basis(m: int, n: int, cap: int = BASIS_CAP) -> tuple[ModeConfig, ...]:
    """All occupation tuples in descending lexicographic order.

    The position of a config in this sequence is its canonical index; see
    ``rank`` and ``unrank`` for the matching bijections.
    """
    d = dim_hilbert(m, n)
    if d > cap:
        raise ResourceError(f"basis size {d} exceeds cap {cap} for (m, n) = ({m}, {n})")
    return _basis_cached(m, n)


@functools.lru_cache(maxsize=256)
def _basis_cached(m: int, n: int) -> tuple[ModeConfig, ...]:
    out: list[ModeConfig] = []
    occ = [0] * m

    def fill(pos: int, left: int) -> None:
        if pos == m - 1:
            occ[pos] = left
            out.append(ModeConfig(tuple(occ)))
            return
        for v in range(left, -1, -1):
            occ[pos] = v
            fill(pos + 1, left - v)
        occ[pos] = 0

    fill(0, n)
    return tuple(out)


def rank(config: ModeConfig) -> int:
    """Canonical index of a config under the descending-lex order."""
    m, n = config.m, config.n
    r = 0
    left = n
    for pos in range(m - 1):
        v = config.occupations[pos]
        # configs with a larger occupancy at this position come first
        for w in range(left, v, -1):
            r += dim_hilbert(m - pos - 1, left - w)
        left -= v
    return r


def unrank(m: int, n: int, i: int) -> ModeConfig:
    """Inverse of ``rank``: the i-th config in canonical order."""
    d = dim_hilbert(m, n)
    if not 0 <= i < d:
        raise DomainError(f"index {i} out of range [0, {d}) for (m, n) = ({m}, {n})")
    occ = []
    left = n
    for pos in range(m - 1):
        for v in range(left, -1, -1):
            block = dim_hilbert(m - pos - 1, left - v)
            if i < block:
                occ.append(v)
                left -= v
                break
            i -= block
    occ.append(left)
    return ModeConfig(tuple(occ))


def pattern_of(config: ModeConfig) -> PhotonPattern:
    """Multiset of nonzero occupations, sorted non-increasing."""
    parts = tuple(sorted((v for v in config.occupations if v > 0), reverse=True))
    return PhotonPattern(parts)


def config_for_pattern(m: int, q: PatternLike) -> ModeConfig:
    """Representative config with pattern q placed on the leading modes."""
    q = as_pattern(q)
    if len(q.parts) > m:
        raise DomainError(f"pattern {q.parts} does not fit in {m} modes")
    return ModeConfig(tuple(q.parts) + (0,) * (m - len(q.parts)))


def enumerate_patterns(m: int, n: int) -> list[PhotonPattern]:
    """All photon patterns (partitions of n into at most m parts).

    Ordered descending-lexicographically, i.e. the fully bunched pattern
    ``(n,)`` first and the no-collision pattern ``(1, ..., 1)`` last.
    """
    _check_mn(m, n)
    if n == 0:
        return []
    out: list[PhotonPattern] = []

    def parts_of(left: int, most: int, acc: list[int]) -> None:
        if left == 0:
            out.append(PhotonPattern(tuple(acc)))
            return
        if len(acc) == m:
            return
        for v in range(min(left, most), 0, -1):
            acc.append(v)
            parts_of(left - v, v, acc)
            acc.pop()

    parts_of(n, n, [])
    return out


def codeword_config(m: int, n: int) -> ModeConfig:
    """The reference codeword |1,...,1,0,...,0> on the first n modes."""
    if n > m:
        raise DomainError(f"codeword needs n <= m, got ({m}, {n})")
    return ModeConfig((1,) * n + (0,) * (m - n))


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def sample_codebook(m: int, n: int, xi: float, rng: Union[int, np.random.Generator]) -> CodeBook:
    """Uniform sample of M = max(1, round(xi*C)) single-occupancy codewords.

    Sampling is without replacement and deterministic for a given seed.
    Rounding is half-up so the cardinality is reproducible across
    platforms.
    """
    if not 0 < xi <= 1:
        raise DomainError(f"need 0 < xi <= 1, got {xi}")
    C = num_codewords(m, n)
    M = max(1, _round_half_up(xi * C))
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(int(rng))
    if C <= 1_000_000:
        picks = rng.permutation(C)[:M]
    else:
        chosen: set[int] = set()
        order: list[int] = []
        while len(order) < M:
            r = int(rng.integers(C))
            if r not in chosen:
                chosen.add(r)
                order.append(r)
        picks = np.array(order)
    codewords = tuple(_unrank_combination(m, n, int(r)) for r in picks)
    return CodeBook(codewords)


def _unrank_combination(m: int, n: int, r: int) -> ModeConfig:
    """r-th n-subset of m modes in lexicographic order, as a ModeConfig."""
    occ = [0] * m
    need = n
    pos = 0
    while need > 0:
        block = math.comb(m - pos - 1, need - 1)
        if r < block:
            occ[pos] = 1
            need -= 1
        else:
            r -= block
        pos += 1
    return ModeConfig(tuple(occ))
