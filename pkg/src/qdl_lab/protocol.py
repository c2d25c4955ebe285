"""End-to-end simulation of the locking protocol: key selection,
encoding, scrambling, optional loss, keyed decoding, and empirical
mutual-information diagnostics.

Loss is applied in the codeword basis: uniform single-photon loss
commutes with any passive interferometer, and the keyed receiver applies
the exact inverse unitary, so the detected click statistics match the
loss-channel analysis without simulating mixed states over variable
photon number.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .errors import DomainError, ResourceError
from .fock import CodeBook, ModeConfig, dim_hilbert, sample_codebook, unrank
from .linop import UnitaryMatrix, haar_batch, output_distribution

SHARD = 4096

#: Cap on trials * d, the cost driver of the blind-measurement diagnostics.
DEFAULT_BUDGET = 50_000_000

LN2 = math.log(2.0)


@dataclass(frozen=True)
class ProtocolConfig:
    m: int
    n: int
    K: int
    xi: float = 1.0
    eta: float = 1.0
    trials: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n > self.m or self.n < 1:
            raise DomainError(f"need 1 <= n <= m, got ({self.m}, {self.n})")
        if self.K < 1:
            raise DomainError(f"need K >= 1, got {self.K}")
        if self.trials < 1:
            raise DomainError(f"need trials >= 1, got {self.trials}")
        if not 0.0 < self.xi <= 1.0:
            raise DomainError(f"need 0 < xi <= 1, got {self.xi}")
        if not 0.0 <= self.eta <= 1.0:
            raise DomainError(f"need 0 <= eta <= 1, got {self.eta}")


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    x: int
    k: int
    clicks: int
    detected: ModeConfig
    decoded: Optional[int]
    ambiguity: int


@dataclass(frozen=True)
class DecodeResult:
    decoded: Optional[int]
    ambiguity: tuple[int, ...]


@dataclass
class StateHandle:
    """Scrambled codeword (k, x) with a lazily computed output distribution."""

    x: int
    k: int
    codeword: ModeConfig
    unitary: UnitaryMatrix
    _dist: Optional[np.ndarray] = field(default=None, repr=False)

    def distribution(self) -> np.ndarray:
        if self._dist is None:
            self._dist = output_distribution(self.unitary, self.codeword)
        return self._dist


@dataclass(frozen=True)
class TrialSummary:
    m: int
    n: int
    K: int
    M: int
    xi: float
    eta: float
    trials: int
    seed: int
    keyed_success_rate: float
    keyed_mi_bits: float
    blind_mi_bits: float
    keyed_bias_bound: float
    blind_bias_bound: float
    records: Optional[tuple[TrialRecord, ...]] = None


def gen_unitary_pool(
    m: int, K: int, seed: Union[int, np.random.Generator]
) -> tuple[UnitaryMatrix, ...]:
    """K i.i.d. Haar unitaries; bitwise stable for a given seed."""
    if K < 1:
        raise DomainError(f"need K >= 1, got {K}")
    if isinstance(seed, (int, np.integer)):
        rng = np.random.default_rng(int(seed))
    else:
        rng = seed
    return tuple(UnitaryMatrix(u) for u in haar_batch(rng, K, m))


def encode(x: int, k: int, codebook: CodeBook, pool: Sequence[UnitaryMatrix]) -> StateHandle:
    """Alice's side: codeword x scrambled by pool member k."""
    if not 0 <= x < len(codebook):
        raise DomainError(f"message index {x} out of range [0, {len(codebook)})")
    if not 0 <= k < len(pool):
        raise DomainError(f"key index {k} out of range [0, {len(pool)})")
    return StateHandle(x=x, k=k, codeword=codebook[x], unitary=pool[k])


def lossy_channel(
    codeword: ModeConfig, eta: float, rng: np.random.Generator
) -> ModeConfig:
    """Each photon of a single-occupancy codeword survives w.p. eta."""
    if not codeword.is_single_occupancy():
        raise DomainError("lossy_channel expects a single-occupancy codeword")
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"need 0 <= eta <= 1, got {eta}")
    occ = list(codeword.occupations)
    for i, v in enumerate(occ):
        if v and rng.random() >= eta:
            occ[i] = 0
    return ModeConfig(tuple(occ))


def decode_with_key(
    k: int,
    pool: Sequence[UnitaryMatrix],
    received: ModeConfig,
    codebook: CodeBook,
) -> DecodeResult:
    """Bob's side: inverse unitary then photo-detection.

    The inverse composes with the scrambler to the exact identity, so the
    detected clicks are the surviving codeword modes.  With all n clicks
    the message is recovered uniquely; with fewer, the result is the set
    of codewords containing the detected sub-configuration.
    """
    if not 0 <= k < len(pool):
        raise DomainError(f"key index {k} out of range [0, {len(pool)})")
    if received.m != codebook.m:
        raise DomainError("received configuration does not match the codebook modes")
    clicks = received.n
    if clicks > codebook.n:
        raise DomainError(f"{clicks} clicks exceed the {codebook.n}-photon codewords")
    det = received.occupations
    compatible = tuple(
        i
        for i, cw in enumerate(codebook.codewords)
        if all(cw.occupations[j] >= det[j] for j in range(len(det)))
    )
    if len(compatible) == 1:
        return DecodeResult(decoded=compatible[0], ambiguity=compatible)
    return DecodeResult(decoded=None, ambiguity=compatible)


def eavesdrop_photodetect(handle: StateHandle, rng: np.random.Generator) -> ModeConfig:
    """Key-blind photodetection of the scrambled state.

    A diagnostic lower bound on the accessible information: one sampled
    computational-basis outcome, with no claim of measurement optimality.
    """
    dist = handle.distribution()
    u = rng.random()
    idx = int(np.searchsorted(np.cumsum(dist), u))
    idx = min(idx, len(dist) - 1)
    return unrank(handle.codeword.m, handle.codeword.n, idx)


def empirical_mutual_info(counts: Union[Mapping, np.ndarray]) -> float:
    """Plug-in estimate of I(X;Y) in bits from a joint count table."""
    if isinstance(counts, np.ndarray):
        items = [
            ((i, j), float(c))
            for (i, j), c in np.ndenumerate(counts)
            if c
        ]
        if np.any(counts < 0):
            raise DomainError("counts must be non-negative")
    else:
        items = [(key, float(c)) for key, c in counts.items() if c]
        if any(c < 0 for _, c in items):
            raise DomainError("counts must be non-negative")
    total = sum(c for _, c in items)
    if total <= 0:
        raise DomainError("count table is empty")
    px: dict = {}
    py: dict = {}
    for (x, y), c in items:
        px[x] = px.get(x, 0.0) + c
        py[y] = py.get(y, 0.0) + c
    acc = 0.0
    for (x, y), c in items:
        acc += c / total * math.log2(c * total / (px[x] * py[y]))
    return max(acc, 0.0)


def _shard_rng(seed: int, shard_idx: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=[int(seed), 3, int(shard_idx)])
    return np.random.Generator(np.random.PCG64(ss))


def _run_shard(
    args: tuple[ProtocolConfig, int, int, int, bool]
) -> tuple[dict, dict, int, list[TrialRecord]]:
    config, shard_idx, start, count, collect = args
    codebook = _codebook_for(config)
    pool = _pool_for(config)
    rng = _shard_rng(config.seed, shard_idx)
    M, K, n = len(codebook), config.K, config.n

    xs = rng.integers(0, M, size=count)
    ks = rng.integers(0, K, size=count)
    u_blind = rng.random(size=count)
    keep = rng.random(size=(count, n)) < config.eta

    dist_cum: dict[tuple[int, int], np.ndarray] = {}
    keyed_counts: dict = {}
    blind_counts: dict = {}
    successes = 0
    records: list[TrialRecord] = []
    for t in range(count):
        x, k = int(xs[t]), int(ks[t])
        codeword = codebook[x]
        occ = list(codeword.occupations)
        for slot, mode in enumerate(codeword.modes):
            if not keep[t, slot]:
                occ[mode] = 0
        detected = ModeConfig(tuple(occ))
        result = decode_with_key(k, pool, detected, codebook)
        if result.decoded == x:
            successes += 1
        key_y = detected.occupations
        keyed_counts[(x, key_y)] = keyed_counts.get((x, key_y), 0) + 1

        pair = (k, x)
        if pair not in dist_cum:
            dist_cum[pair] = np.cumsum(
                output_distribution(pool[k], codebook[x])
            )
        z = int(np.searchsorted(dist_cum[pair], u_blind[t]))
        z = min(z, len(dist_cum[pair]) - 1)
        blind_counts[(x, z)] = blind_counts.get((x, z), 0) + 1

        if collect:
            records.append(
                TrialRecord(
                    trial=start + t,
                    x=x,
                    k=k,
                    clicks=detected.n,
                    detected=detected,
                    decoded=result.decoded,
                    ambiguity=len(result.ambiguity),
                )
            )
    return keyed_counts, blind_counts, successes, records


def _codebook_for(config: ProtocolConfig) -> CodeBook:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=[config.seed, 2])))
    return sample_codebook(config.m, config.n, config.xi, rng)


def _pool_for(config: ProtocolConfig) -> tuple[UnitaryMatrix, ...]:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=[config.seed, 1])))
    return gen_unitary_pool(config.m, config.K, rng)


def run_trials(
    config: ProtocolConfig,
    workers: int = 1,
    collect_records: bool = False,
    budget: int = DEFAULT_BUDGET,
) -> TrialSummary:
    """Simulate the protocol and report empirical diagnostics.

    Trials are sharded by index with per-shard RNG streams, so the
    transcript is identical for any worker count.  The summary carries
    plug-in mutual-information estimates for the keyed receiver and for
    a key-blind photodetector, with their standard bias bounds.
    """
    d = dim_hilbert(config.m, config.n)
    if config.trials * d > budget:
        raise ResourceError(
            f"trials*d = {config.trials * d} exceeds budget {budget}; "
            "reduce trials or raise the budget"
        )
    shards = []
    start = 0
    idx = 0
    while start < config.trials:
        size = min(SHARD, config.trials - start)
        shards.append((config, idx, start, size, collect_records))
        start += size
        idx += 1
    if workers > 1 and len(shards) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_shard, shards, chunksize=1))
    else:
        parts = [_run_shard(s) for s in shards]

    keyed_counts: dict = {}
    blind_counts: dict = {}
    successes = 0
    records: list[TrialRecord] = []
    for kc, bc, succ, recs in parts:
        for key, c in kc.items():
            keyed_counts[key] = keyed_counts.get(key, 0) + c
        for key, c in bc.items():
            blind_counts[key] = blind_counts.get(key, 0) + c
        successes += succ
        records.extend(recs)

    M = len(_codebook_for(config))
    n_keyed_y = len({y for _, y in keyed_counts})
    n_blind_y = len({y for _, y in blind_counts})
    bias = lambda ny: (M - 1) * (ny - 1) / (2.0 * config.trials * LN2)
    return TrialSummary(
        m=config.m,
        n=config.n,
        K=config.K,
        M=M,
        xi=config.xi,
        eta=config.eta,
        trials=config.trials,
        seed=config.seed,
        keyed_success_rate=successes / config.trials,
        keyed_mi_bits=empirical_mutual_info(keyed_counts),
        blind_mi_bits=empirical_mutual_info(blind_counts),
        keyed_bias_bound=bias(n_keyed_y),
        blind_bias_bound=bias(n_blind_y),
        records=tuple(records) if collect_records else None,
    )
