"""Interferometer sampling and exact multiphoton transition amplitudes.

The mode convention is that of passive linear optics: a unitary U maps
input creation operator i to ``sum_j U[i, j] a_j^dag``.  A transition
amplitude between occupation states is then a matrix permanent of the
submatrix of U whose rows repeat per input occupancy and whose columns
repeat per output occupancy, divided by the usual sqrt-factorial
normalisation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError, ResourceError
from .fock import BASIS_CAP, ModeConfig, dim_hilbert, enumerate_basis

#: Default cap on the size of matrices fed to the exact permanent.
PERMANENT_CAP = 25

UNITARITY_TOL = 1e-12


@dataclass(frozen=True)
class UnitaryMatrix:
    """An m-by-m complex matrix verified unitary at construction."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DomainError(f"expected a square matrix, got shape {a.shape}")
        dev = np.max(np.abs(a.conj().T @ a - np.eye(a.shape[0])))
        if dev > UNITARITY_TOL:
            raise DomainError(f"matrix is not unitary: max |U^dag U - I| = {dev:.3e}")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    def dagger(self) -> "UnitaryMatrix":
        return UnitaryMatrix(self.entries.conj().T)


Amplitude = complex


def haar_unitary(m: int, rng: Union[int, np.random.Generator]) -> UnitaryMatrix:
    """Draw one unitary from the Haar measure on U(m).

    Uses QR of a complex Ginibre matrix with the phase of the triangular
    factor's diagonal divided out, which makes the density exactly
    invariant rather than merely unitary.
    """
    if m < 1:
        raise DomainError(f"need m >= 1, got {m}")
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(int(rng))
    return UnitaryMatrix(haar_batch(rng, 1, m)[0])


def haar_batch(rng: np.random.Generator, count: int, m: int) -> np.ndarray:
    """Stack of ``count`` Haar unitaries, shape (count, m, m)."""
    return stiefel_batch(rng, count, m, m)


def stiefel_batch(rng: np.random.Generator, count: int, m: int, ncols: int) -> np.ndarray:
    """Haar-distributed orthonormal m-by-ncols frames, shape (count, m, ncols).

    The result is distributed as the first ``ncols`` columns of a Haar
    unitary; sampling only the needed columns keeps the Monte Carlo
    estimators cheap at large m.
    """
    if not 1 <= ncols <= m:
        raise DomainError(f"need 1 <= ncols <= m, got ncols={ncols}, m={m}")
    g = rng.standard_normal((count, m, ncols)) + 1j * rng.standard_normal((count, m, ncols))
    q, r = np.linalg.qr(g)
    d = np.einsum("...ii->...i", r)
    q = q * (d / np.abs(d))[:, None, :]
    return q


def permanent(a: np.ndarray, cap: int = PERMANENT_CAP) -> Amplitude:
    """Exact permanent of a square complex matrix via Ryser's formula.

    Subsets are walked in Gray-code order so each step updates the row
    sums with a single column; compensated accumulation is switched on
    for k >= 16 where the alternating sum starts losing digits.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"permanent needs a square matrix, got shape {a.shape}")
    k = a.shape[0]
    if k > cap:
        raise DomainError(f"matrix size {k} exceeds permanent cap {cap}")
    if k == 0:
        return 1.0 + 0.0j
    return complex(_permanent_batch(a[None, :, :])[0])


def _permanent_batch(a: np.ndarray) -> np.ndarray:
    """Ryser permanents of a stack of k-by-k matrices, shape (b, k, k)."""
    b, k, _ = a.shape
    row_sums = np.zeros((b, k), dtype=complex)
    total = np.zeros(b, dtype=complex)
    comp = np.zeros(b, dtype=complex)
    compensated = k >= 16
    gray = 0
    for idx in range(1, 1 << k):
        new_gray = idx ^ (idx >> 1)
        bit = gray ^ new_gray
        j = bit.bit_length() - 1
        if new_gray & bit:
            row_sums += a[:, :, j]
        else:
            row_sums -= a[:, :, j]
        gray = new_gray
        sign = -1.0 if (new_gray.bit_count() % 2) else 1.0
        term = sign * np.prod(row_sums, axis=1)
        if compensated:
            # Neumaier update keeps the alternating sum accurate
            t = total + term
            lost = np.where(
                np.abs(total) >= np.abs(term),
                (total - t) + term,
                (term - t) + total,
            )
            comp += lost
            total = t
        else:
            total += term
    total += comp
    if k % 2:
        total = -total
    return total


def _expanded_indices(config: ModeConfig) -> list[int]:
    out: list[int] = []
    for i, v in enumerate(config.occupations):
        out.extend([i] * v)
    return out


def transition_amplitude(
    u: UnitaryMatrix, config_in: ModeConfig, config_out: ModeConfig
) -> Amplitude:
    """Amplitude <out| U |in> for Fock states of equal photon number.

    Rows of the permanent submatrix are drawn from the input occupations
    and columns from the output occupations, matching the row-index mode
    evolution convention.
    """
    m = u.m
    if config_in.m != m or config_out.m != m:
        raise DomainError("configs do not match the unitary's mode count")
    n = config_in.n
    if config_out.n != n:
        raise DomainError(
            f"photon number mismatch: {config_in.occupations} vs {config_out.occupations}"
        )
    if n == 0:
        return 1.0 + 0.0j
    rows = _expanded_indices(config_in)
    cols = _expanded_indices(config_out)
    sub = u.entries[np.ix_(rows, cols)]
    norm = 1.0
    for v in config_in.occupations:
        norm *= math.factorial(v)
    for v in config_out.occupations:
        norm *= math.factorial(v)
    return complex(permanent(sub) / math.sqrt(norm))


def output_distribution(
    u: UnitaryMatrix, config_in: ModeConfig, cap: int = BASIS_CAP
) -> np.ndarray:
    """Photodetection probabilities over the canonical basis for U|in>.

    All d permanents are evaluated in one batched Ryser pass.
    """
    m = u.m
    n = config_in.n
    if config_in.m != m:
        raise DomainError("config does not match the unitary's mode count")
    d = dim_hilbert(m, n)
    if d > cap:
        raise ResourceError(f"distribution size {d} exceeds cap {cap}")
    if n == 0:
        return np.ones(1)
    basis = enumerate_basis(m, n, cap=cap)
    rows = _expanded_indices(config_in)
    cols = np.array([_expanded_indices(cfg) for cfg in basis])  # (d, n)
    sub = u.entries[np.array(rows)[:, None], cols[:, None, :]]  # (d, n, n)
    in_norm = 1.0
    for v in config_in.occupations:
        in_norm *= math.factorial(v)
    out_norms = np.array(
        [math.prod(math.factorial(v) for v in cfg.occupations) for cfg in basis]
    )
    perms = _permanent_batch(sub)
    return np.abs(perms) ** 2 / (in_norm * out_norms)


def dagger(u: UnitaryMatrix) -> UnitaryMatrix:
    """Conjugate transpose (the decoding unitary for a keyed receiver)."""
    return u.dagger()
