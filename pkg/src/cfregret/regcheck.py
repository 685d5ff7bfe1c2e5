"""Combinatorial regularity checks over sign matrices, a brute-force reference
implementation for cross-validation, the matching probability bound, and
balls-and-bins occupancy helpers."""

import itertools
import math

import numpy as np


class TooLarge(Exception):
    """Subset-times-pattern work would exceed the enumeration budget."""


ENUMERATION_BUDGET = 10_000_000


def _check_matrix(mat):
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] < 1 or mat.shape[1] < 1:
        raise ValueError("need a nonempty 2-d sign matrix")
    if not np.isin(mat, (-1, 1)).all():
        raise ValueError("matrix entries must be +1 or -1")
    return mat


def pattern_counts(mat, cols):
    """Occurrences of each of the 2^r sign patterns over the given columns,
    indexed by LSB-first bit code of the +1 positions."""
    r = len(cols)
    bits = (mat[:, list(cols)] > 0).astype(np.int64)
    codes = bits @ (np.int64(1) << np.arange(r, dtype=np.int64))
    return np.bincount(codes, minlength=2 ** r)


def column_deviation(mat, r, budget=ENUMERATION_BUDGET):
    """Worst relative deviation of any (column subset, pattern) count from the
    uniform share m/2^r, over unordered subsets."""
    mat = _check_matrix(mat)
    m, n = mat.shape
    if not 1 <= r <= n:
        raise ValueError("subset size out of range")
    if math.comb(n, r) * 2 ** r > budget:
        raise TooLarge(f"{math.comb(n, r)} subsets x {2 ** r} patterns exceeds budget {budget}")
    target = m / 2 ** r
    worst = 0.0
    for cols in itertools.combinations(range(n), r):
        counts = pattern_counts(mat, cols)
        dev = float(np.abs(counts - target).max()) / target
        if dev > worst:
            worst = dev
    return worst


def is_column_regular(mat, r, epsilon, budget=ENUMERATION_BUDGET):
    return column_deviation(mat, r, budget=budget) <= epsilon


def row_deviation(mat, r, budget=ENUMERATION_BUDGET):
    return column_deviation(np.asarray(mat).T, r, budget=budget)


def is_row_regular(mat, r, epsilon, budget=ENUMERATION_BUDGET):
    return is_column_regular(np.asarray(mat).T, r, epsilon, budget=budget)


def reference_column_regular(mat, r, epsilon):
    """Independent slow path: ordered tuples of distinct columns, explicit
    pattern loop. Verdicts must agree with the subset-based check."""
    mat = _check_matrix(mat)
    m, n = mat.shape
    target = m / 2 ** r
    for cols in itertools.permutations(range(n), r):
        sub = mat[:, list(cols)]
        for pattern in itertools.product((-1, 1), repeat=r):
            count = int(np.sum(np.all(sub == np.array(pattern), axis=1)))
            if abs(count - target) > epsilon * target:
                return False
    return True


def regularity_probability_bound(m, n, r, epsilon):
    """Lower bound on the chance a uniform random sign matrix is regular."""
    return 1.0 - 2.0 * (2.0 * n) ** r * math.exp(-epsilon ** 2 * m / (3.0 * 2 ** r))


def all_sign_patterns(q):
    """2^q x q matrix whose row t has +1 exactly at the set bits of t,
    LSB-first."""
    if not 1 <= q <= 24:
        raise ValueError("pattern count 2^q out of range")
    rows = np.arange(2 ** q, dtype=np.int64)[:, None]
    bits = (rows >> np.arange(q, dtype=np.int64)) & 1
    return (bits * 2 - 1).astype(np.int8)


def balls_bins_nonempty(m, n, rng):
    """Nonempty bin count after m uniform throws into n bins."""
    return len(np.unique(rng.integers(0, n, size=m)))


def expected_nonempty(n, m):
    return n * (1.0 - (1.0 - 1.0 / n) ** m)


def occupancy_tail_bound(m, n):
    """Lower bound on Pr[at least m/2 bins nonempty], valid for m <= n/4."""
    if m > n / 4:
        raise ValueError("tail bound needs m <= n/4")
    return 1.0 - math.exp(-m / 2.0)
