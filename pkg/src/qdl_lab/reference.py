"""Published reference estimates bundled for comparison.

These are externally reported numerical values of the coefficient c_q
(table I) and of the doubled concentration ratio 2*gamma_q (tables
II-V), keyed by (m, n) and photon pattern.  The ``tables`` command
re-estimates every entry and prints both side by side.  Patterns are
stored in the package's non-increasing convention regardless of how the
source ordered them.

Reference values are point estimates with no reported error bars; the
test suite treats them as comparison targets, not ground truth (exact
moment computations supersede them where available).
"""

from __future__ import annotations

from .fock import PhotonPattern

# (m, n) -> {pattern parts -> published c_q}
TABLE_I: dict[tuple[int, int], dict[tuple[int, ...], float]] = {
    (6, 2): {(1, 1): 0.0471, (2,): 0.0977},
    (10, 2): {(1, 1): 0.0181, (2,): 0.0369},
    (20, 2): {(1, 1): 0.00476, (2,): 0.00959},
    (10, 3): {(1, 1, 1): 0.00451, (2, 1): 0.00914, (3,): 0.0283},
    (20, 3): {(1, 1, 1): 0.000648, (2, 1): 0.00131, (3,): 0.00398},
    (30, 10): {(1,) * 10: 1.56e-9, (9, 1): 0.00068, (10,): 0.0072},
}

# (m, n) -> {pattern parts -> published 2*gamma_q}
TABLE_II: dict[tuple[int, int], dict[tuple[int, ...], float]] = {
    (6, 2): {(1, 1): 3.770, (2,): 4.314},
    (10, 2): {(1, 1): 4.256, (2,): 5.136},
    (20, 2): {(1, 1): 4.751, (2,): 5.894},
    (40, 2): {(1, 1): 4.593, (2,): 5.882},
    (10, 3): {(1, 1, 1): 4.562, (2, 1): 5.366, (3,): 6.968},
    (40, 3): {(1, 1, 1): 5.475, (2, 1): 6.853, (3,): 9.717},
}

TABLE_III: dict[tuple[int, int], dict[tuple[int, ...], float]] = {
    (20, 4): {
        (1, 1, 1, 1): 5.44,
        (3, 1): 8.91,
        (2, 1, 1): 6.60,
        (2, 2): 8.38,
        (4,): 13.31,
    },
    (20, 5): {
        (1, 1, 1, 1, 1): 5.45,
        (3, 1, 1): 8.44,
        (4, 1): 12.13,
        (2, 2, 1): 7.80,
        (3, 2): 10.50,
        (2, 1, 1, 1): 6.50,
        (5,): 16.93,
    },
    (20, 6): {
        (1, 1, 1, 1, 1, 1): 5.34,
        (2, 2, 1, 1): 7.26,
        (3, 3): 12.86,
        (2, 2, 2): 8.72,
        (3, 1, 1, 1): 7.77,
        (5, 1): 15.89,
        (2, 1, 1, 1, 1): 6.16,
        (4, 2): 13.42,
        (4, 1, 1): 10.50,
        (3, 2, 1): 9.50,
        (6,): 26.34,
    },
    (20, 8): {
        (6, 1, 1): 15.81,
        (3, 2, 1, 1, 1): 7.30,
        (4, 4): 18.04,
        (4, 2, 2): 11.11,
        (2, 2, 1, 1, 1, 1): 5.98,
        (2, 2, 2, 2): 7.95,
        (3, 3, 2): 10.91,
        (5, 1, 1, 1): 11.03,
        (6, 2): 19.18,
        (3, 3, 1, 1): 9.09,
        (1, 1, 1, 1, 1, 1, 1, 1): 4.92,
        (7, 1): 24.34,
        (8,): 34.86,
    },
    (30, 4): {
        (1, 1, 1, 1): 5.92,
        (3, 1): 9.97,
        (2, 1, 1): 7.28,
        (2, 2): 9.47,
        (4,): 15.07,
    },
    (30, 5): {
        (1, 1, 1, 1, 1): 6.12,
        (3, 1, 1): 10.10,
        (4, 1): 14.63,
        (2, 2, 1): 9.30,
        (3, 2): 12.88,
        (2, 1, 1, 1): 7.44,
        (5,): 19.12,
    },
    (30, 6): {
        (1, 1, 1, 1, 1, 1): 6.11,
        (2, 2, 1, 1): 9.03,
        (3, 3): 16.74,
        (2, 2, 2): 11.19,
        (5, 1): 20.82,
        (2, 1, 1, 1, 1): 7.29,
        (4, 2): 17.44,
        (4, 1, 1): 13.98,
        (3, 1, 1, 1): 9.72,
        (3, 2, 1): 11.99,
        (6,): 33.20,
    },
    (30, 8): {
        (6, 1, 1): 23.70,
        (3, 2, 1, 1, 1): 9.63,
        (4, 4): 27.56,
        (4, 2, 2): 17.58,
        (2, 2, 1, 1, 1, 1): 7.63,
        (2, 2, 2, 2): 10.10,
        (3, 3, 2): 17.84,
        (5, 1, 1, 1): 15.70,
        (6, 2): 35.89,
        (3, 3, 1, 1): 12.80,
        (1, 1, 1, 1, 1, 1, 1, 1): 5.82,
        (7, 1): 34.43,
        (8,): 61.69,
    },
}

TABLE_IV: dict[tuple[int, int], dict[tuple[int, ...], float]] = {
    (40, 4): {
        (1, 1, 1, 1): 6.09,
        (3, 1): 10.60,
        (2, 1, 1): 7.59,
        (2, 2): 9.81,
        (4,): 15.91,
    },
    (40, 5): {
        (1, 1, 1, 1, 1): 6.51,
        (3, 1, 1): 11.01,
        (4, 1): 16.08,
        (2, 2, 1): 10.02,
        (3, 2): 13.93,
        (2, 1, 1, 1): 8.050,
        (5,): 20.18,
    },
    (40, 6): {
        (1, 1, 1, 1, 1, 1): 6.68,
        (2, 2, 1, 1): 10.03,
        (3, 3): 19.82,
        (2, 2, 2): 13.04,
        (5, 1): 23.15,
        (2, 1, 1, 1, 1): 8.16,
        (4, 2): 20.40,
        (4, 1, 1): 15.57,
        (3, 1, 1, 1): 10.91,
        (3, 2, 1): 13.88,
        (6,): 35.95,
    },
    (40, 8): {
        (6, 1, 1): 32.65,
        (3, 2, 1, 1, 1): 12.24,
        (4, 4): 47.54,
        (4, 2, 2): 23.89,
        (2, 2, 1, 1, 1, 1): 9.09,
        (2, 2, 2, 2): 14.25,
        (3, 3, 2): 20.99,
        (5, 1, 1, 1): 21.25,
        (6, 2): 36.11,
        (3, 3, 1, 1): 17.05,
        (1, 1, 1, 1, 1, 1, 1, 1): 6.484,
        (7, 1): 56.08,
        (8,): 67.49,
    },
}

# fully bunched pattern only: (m, n) -> published 2*gamma_(n)
TABLE_V: dict[tuple[int, int], float] = {
    (20, 9): 40.84,
    (20, 10): 53.87,
    (30, 9): 73.45,
    (30, 10): 111.5,
    (30, 11): 124.6,
    (30, 12): 164.7,
    (30, 13): 201.4,
    (40, 9): 114.5,
    (40, 10): 161.2,
    (40, 11): 207.2,
    (40, 12): 259.7,
    (40, 13): 422.1,
    (60, 4): 16.63,
    (60, 6): 43.59,
    (60, 8): 112.6,
    (60, 10): 230.2,
    (60, 12): 500.4,
    (60, 14): 722.7,
    (60, 16): 1877.0,
    (60, 18): 2.526e4,
}


def gamma_tables() -> dict[str, dict[tuple[int, int], dict[tuple[int, ...], float]]]:
    """All 2*gamma_q tables in a uniform (m, n) -> pattern -> value shape."""
    v_as_patterns = {
        (m, n): {(n,): value} for (m, n), value in TABLE_V.items()
    }
    return {"II": TABLE_II, "III": TABLE_III, "IV": TABLE_IV, "V": v_as_patterns}


def published_two_gamma(m: int, n: int, q: PhotonPattern) -> float:
    """Reference 2*gamma_q for (m, n, q); KeyError when not tabulated."""
    for table in gamma_tables().values():
        entry = table.get((m, n))
        if entry and q.parts in entry:
            return entry[q.parts]
    raise KeyError(f"no published 2*gamma for (m={m}, n={n}, q={q.label()})")
