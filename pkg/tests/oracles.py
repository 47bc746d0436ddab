"""Independent reference implementations used only by the tests.

Deliberately different routes from the library: progressions are generated
from explicit binomial-basis coefficients (not difference-ladder
extrapolation), polynomial extension goes through exact Lagrange
interpolation, and extremal values come from full 2^n subset enumeration.
Slow and simple beats fast and shared here.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb

import numpy as np


def lagrange_extend(prefix: tuple[int, ...], length: int) -> list[Fraction]:
    """Values at x=1..length of the unique degree<len(prefix) polynomial
    through (1, prefix[0]), (2, prefix[1]), ..."""
    xs = range(1, len(prefix) + 1)
    out = []
    for x in range(1, length + 1):
        total = Fraction(0)
        for i, (xi, yi) in enumerate(zip(xs, prefix)):
            term = Fraction(yi)
            for j, xj in enumerate(xs):
                if j != i:
                    term *= Fraction(x - xj, xi - xj)
            total += term
        out.append(total)
    return out


def exact_degree(seq) -> int:
    """Degree of the interpolating polynomial: differences until constant."""
    row = [Fraction(v) for v in seq]
    deg = 0
    while any(v != row[0] for v in row):
        row = [b - a for a, b in zip(row, row[1:])]
        deg += 1
    return deg


def coefficient_progressions(n: int, k: int, degree: int):
    """Yield (exact_degree, start, diff, values) for every k-term progression
    of degree <= `degree` with values inside [1..n].

    Sequences are generated as p(j) = a + sum_i c_i * C(j-1, i) over integer
    coefficients with c_m != 0, m = exact degree; the coefficient bound
    |c_i| <= 2^(i-1)(n-1) follows from the difference growth bound for
    in-range sequences.  diff is the constant value of the m-th differences,
    which in this basis is c_m.
    """
    for m in range(1, degree + 1):
        ranges = [
            range(-(2 ** (i - 1)) * (n - 1), 2 ** (i - 1) * (n - 1) + 1)
            for i in range(1, m + 1)
        ]
        for cs in itertools.product(*ranges):
            if cs[-1] == 0:
                continue
            shape = [
                sum(c * comb(j - 1, i + 1) for i, c in enumerate(cs))
                for j in range(1, k + 1)
            ]
            lo, hi = 1 - min(shape), n - max(shape)
            for a in range(lo, hi + 1):
                yield m, a, cs[-1], tuple(a + s for s in shape)


def oracle_forbidden_masks(n: int, k: int, degree: int) -> set[int]:
    """Value-set bitmasks (bit v-1 for value v) of all in-range progressions."""
    masks = set()
    for _m, _a, _b, values in coefficient_progressions(n, k, degree):
        bits = 0
        for v in values:
            bits |= 1 << (v - 1)
        masks.add(bits)
    return masks


def oracle_count_types(n: int, k: int, degree: int) -> int:
    """Number of distinct (exact degree, start, diff) triples realized in [1..n]."""
    return len(
        {(m, a, b) for m, a, b, _v in coefficient_progressions(n, k, degree)}
    )


def oracle_exact_r(n: int, k: int, degree: int) -> int:
    """Extremal free-set size by scanning all 2^n subsets (n <= 20)."""
    if n > 20:
        raise ValueError("full enumeration capped at n = 20")
    if n == 0:
        return 0
    if k <= degree + 1:
        return 1  # see exact_r: every nonconstant window interpolates
    masks = oracle_forbidden_masks(n, k, degree)
    subsets = np.arange(1 << n, dtype=np.uint32)
    ok = np.ones(subsets.shape, dtype=bool)
    for m in sorted(masks):
        mv = np.uint32(m)
        ok &= (subsets & mv) != mv
    sizes = np.bitwise_count(subsets).astype(np.int64)
    sizes[~ok] = -1
    return int(sizes.max())


def oracle_lex_min_witness(n: int, k: int, degree: int) -> tuple[int, ...]:
    """Lexicographically least maximum-size free subset, by enumeration."""
    if k <= degree + 1:
        return (1,) if n >= 1 else ()
    masks = oracle_forbidden_masks(n, k, degree)
    subsets = np.arange(1 << n, dtype=np.uint32)
    ok = np.ones(subsets.shape, dtype=bool)
    for m in sorted(masks):
        mv = np.uint32(m)
        ok &= (subsets & mv) != mv
    sizes = np.bitwise_count(subsets).astype(np.int64)
    sizes[~ok] = -1
    best = int(sizes.max())
    candidates = np.nonzero(sizes == best)[0]
    tuples = [
        tuple(v + 1 for v in range(n) if s >> v & 1) for s in candidates
    ]
    return min(tuples)


def lemma1_trials(degree: int, trials: int, seed: int):
    """Random vector polynomials concentrated on a sphere, with their lead norms.

    Draws coefficient matrices for P(t) = sum_m coeff[m] t^m (degree exactly
    `degree`), evaluates squared norms at t = 1..2*degree+1, and reports
    (delta, lead_norm) where delta is half the spread of those norms around
    their central radius -- the tightest concentration radius the sample
    satisfies.  Any correct lead-coefficient bound must dominate lead_norm
    at that delta.
    """
    rng = np.random.default_rng(seed)
    npts = 2 * degree + 1
    ts = np.arange(1, npts + 1, dtype=float)
    powers = ts[None, :] ** np.arange(degree + 1)[:, None]
    out = []
    for _ in range(trials):
        dim = int(rng.integers(1, 5))
        scale = float(rng.uniform(0.01, 1.0))
        coeff = rng.normal(0.0, scale, size=(degree + 1, dim))
        values = coeff.T @ powers  # (dim, npts): P(t) per column
        norms = (values ** 2).sum(axis=0)
        delta = float(norms.max() - norms.min()) / 2.0
        lead = float(np.sqrt(coeff[degree] @ coeff[degree]))
        out.append((delta, lead))
    return out
