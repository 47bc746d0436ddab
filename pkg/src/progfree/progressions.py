"""Exact detection of polynomial progressions in integer sets.

A k-term progression of degree D is the value sequence Q(1), ..., Q(k) of a
nonconstant polynomial Q of degree at most D.  Over exact arithmetic this is
equivalent to: the sequence is nonconstant and its (D+1)-st finite differences
vanish.  Everything in this module is exact — sequences hold ints or
``fractions.Fraction``; no float ever enters.

Provided:
    delta, delta_binomial   -- iterated forward differences (two routes)
    is_progression          -- membership test for the degree-D class
    classify                -- minimal difference-level type (degree, start, step)
    extrapolate             -- unique degree-<=D extension of a (D+1)-prefix
    find_progressions       -- all progression types inside a finite set
    count_types             -- exact count of realizable types inside [1..N]
    lift_modular_progression-- exact lift of a torus progression to coefficients
    IntSet, ProgressionType -- small value types used across the package
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, NamedTuple, Optional, Sequence, Union

import numpy as np

Number = Union[int, Fraction]


class DegenerateParameters(ValueError):
    """Raised when (k, D) make detection meaningless (k <= D+1)."""


class LemmaViolation(ValueError):
    """Raised when inputs contradict an exact structural guarantee."""


class ProgressionType(NamedTuple):
    """Type triple of a progression: least n with constant nonzero n-th
    differences, the first term, and that constant difference value."""

    degree: int
    start: Number
    diff: Number


@dataclass(frozen=True)
class IntSet:
    """Sorted distinct integers inside the universe [1..universe]."""

    universe: int
    members: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.universe < 0:
            raise ValueError("universe must be nonnegative")
        prev = 0
        for m in self.members:
            if not isinstance(m, int):
                raise ValueError("members must be ints")
            if m <= prev or m > self.universe:
                raise ValueError("members must be sorted, distinct, in [1..universe]")
            prev = m

    @classmethod
    def from_iterable(cls, universe: int, items: Iterable[int]) -> "IntSet":
        return cls(universe, tuple(sorted(set(int(x) for x in items))))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, x) -> bool:
        return x in set(self.members)

    def mask(self) -> int:
        """Bitmask with bit (m-1) set for each member m."""
        out = 0
        for m in self.members:
            out |= 1 << (m - 1)
        return out


# When enabled (the test suite turns it on), delta() verifies the iterated
# ladder against the closed binomial form on every call.
CROSSCHECK_DELTA = False


def _as_tuple(seq: Sequence[Number]) -> tuple[Number, ...]:
    return tuple(seq)


def delta(seq: Sequence[Number], order: int) -> tuple[Number, ...]:
    """Iterated forward difference: order applications of (a_i) -> (a_{i+1}-a_i).

    Exact; requires 1 <= order < len(seq).
    """
    s = _as_tuple(seq)
    if order < 1:
        raise ValueError("order must be >= 1")
    if order >= len(s):
        raise ValueError("order must be < len(seq)")
    out = s
    for _ in range(order):
        out = tuple(out[i + 1] - out[i] for i in range(len(out) - 1))
    if CROSSCHECK_DELTA:
        alt = delta_binomial(s, order)
        if alt != out:
            raise AssertionError("difference ladder disagrees with binomial form")
    return out


def delta_binomial(seq: Sequence[Number], order: int) -> tuple[Number, ...]:
    """Closed form: n-th difference at v is sum_i C(n,i) (-1)^i a_{v+n-i}.

    Same contract as delta(); kept as an independent route for cross-checking.
    """
    s = _as_tuple(seq)
    if order < 1:
        raise ValueError("order must be >= 1")
    if order >= len(s):
        raise ValueError("order must be < len(seq)")
    coeffs = [comb(order, i) * (-1) ** (order - i) for i in range(order + 1)]
    return tuple(
        sum(coeffs[i] * s[v + i] for i in range(order + 1))
        for v in range(len(s) - order)
    )


def _is_constant(seq: Sequence[Number]) -> bool:
    s = _as_tuple(seq)
    return all(x == s[0] for x in s[1:])


def is_progression(seq: Sequence[Number], max_degree: int) -> bool:
    """True iff seq is nonconstant and lies on a polynomial of degree <= max_degree.

    Criterion: the (max_degree+1)-st differences vanish.  Sequences too short
    for that criterion (len <= max_degree+1) are progressions whenever
    nonconstant, since any len points lie on a degree len-1 polynomial.
    """
    if max_degree < 0:
        raise ValueError("max_degree must be >= 0")
    s = _as_tuple(seq)
    if len(s) == 0:
        raise ValueError("empty sequence")
    if _is_constant(s):
        return False
    if len(s) <= max_degree + 1:
        return True
    return all(x == 0 for x in delta(s, max_degree + 1))


def classify(seq: Sequence[Number]) -> Optional[ProgressionType]:
    """Type triple (n, first term, constant n-th difference), or None if constant.

    n is the least order whose differences are constant and nonzero; it equals
    the degree of the interpolating polynomial, and the constant equals
    n! times its lead coefficient.
    """
    s = _as_tuple(seq)
    if len(s) == 0:
        raise ValueError("empty sequence")
    if _is_constant(s):
        return None
    level = s
    for n in range(1, len(s)):
        level = tuple(level[i + 1] - level[i] for i in range(len(level) - 1))
        if _is_constant(level):
            if level[0] == 0:
                # Impossible in exact arithmetic: a vanishing constant level
                # means the previous level was already constant.
                raise LemmaViolation("minimal constant difference level is zero")
            return ProgressionType(n, s[0], level[0])
    raise LemmaViolation("nonconstant sequence with no constant difference level")


def extrapolate(prefix: Sequence[Number], degree: int, k: int) -> tuple[Number, ...]:
    """Extend a (degree+1)-term prefix to k terms along its interpolating polynomial.

    The result is the unique length-k sequence agreeing with prefix whose
    (degree+1)-st differences vanish.  Exact.
    """
    p = _as_tuple(prefix)
    if degree < 0 or len(p) != degree + 1:
        raise ValueError("prefix length must equal degree + 1")
    if k < len(p):
        raise ValueError("k must be >= len(prefix)")
    # Newton forward ladder: keep the trailing entry of each difference row.
    tails = [p]
    for _ in range(degree):
        prev = tails[-1]
        tails.append(tuple(prev[i + 1] - prev[i] for i in range(len(prev) - 1)))
    edge = [row[-1] for row in tails]  # edge[j] = last entry of j-th differences
    out = list(p)
    for _ in range(k - len(p)):
        for j in range(degree - 1, -1, -1):
            edge[j] = edge[j] + edge[j + 1]
        out.append(edge[0])
    return tuple(out)


def find_progressions(
    A: Union[IntSet, Iterable[int]],
    k: int,
    max_degree: int,
    limit: Optional[int] = None,
) -> list[tuple[ProgressionType, tuple[int, ...]]]:
    """All k-term progressions of degree <= max_degree with every value in A.

    Enumerates ordered (max_degree+1)-tuples of values from A (repetitions
    allowed) as the leading terms, extrapolates to k terms, and tests the tail
    for membership.  Results are deduplicated by exact type triple and returned
    sorted by it, one witness sequence per type.  With limit, enumeration stops
    once that many distinct types have been seen (enumeration order is the
    deterministic lexicographic order over sorted A).

    Cost is |A|^(max_degree+1) * k value operations.
    """
    if max_degree < 1:
        raise DegenerateParameters("max_degree must be >= 1")
    if k < max_degree + 2:
        raise DegenerateParameters(
            "k must be >= max_degree + 2; shorter windows make every "
            "nonconstant sequence a progression"
        )
    values = tuple(sorted(set(A)))
    member = set(values)
    found: dict[ProgressionType, tuple[int, ...]] = {}
    for head in itertools.product(values, repeat=max_degree + 1):
        if _is_constant(head):
            continue
        seq = extrapolate(head, max_degree, k)
        if any(v not in member for v in seq[max_degree + 1:]):
            continue
        ptype = classify(seq)
        assert ptype is not None  # head is nonconstant
        if ptype not in found:
            found[ptype] = seq
            if limit is not None and len(found) >= limit:
                break
    return sorted(found.items())


def count_types(n: int, k: int, max_degree: int) -> int:
    """Exact number of type triples realized by k-term progressions in [1..n].

    A triple (m, a, b) with 1 <= m <= max_degree is counted when some k-term
    sequence inside [1..n] has constant nonzero m-th differences equal to b and
    first term a.  Equivalently: some polynomial p of degree exactly m, integer
    valued on 1..k with values in [1..n], has p(1) = a and m! * lead(p) = b.

    Always below 2^(max_degree+1) * n^2: the j-th differences of a sequence
    inside [1..n] are bounded by 2^(j-1) * (n - 1) in absolute value.
    """
    if n < 1 or max_degree < 1 or k < max_degree:
        raise ValueError("need n >= 1 and k >= max_degree >= 1")
    total = 0
    for m in range(1, max_degree + 1):
        if k >= m + 1:
            total += _count_types_of_degree(n, k, m)
    return total


@lru_cache(maxsize=4096)
def _count_types_of_degree(n: int, k: int, m: int) -> int:
    """Count realized (start, diff) pairs for degree exactly m, vectorized.

    Writes p(j) = a + sum_{i=1..m} c_i * C(j-1, i) with integer c_i (the
    binomial coordinates of an integer-valued polynomial), c_m = b != 0.
    For fixed (c_1..c_m) the feasible starts a form the contiguous range
    [1 - min_j s_j, n - max_j s_j] where s_j = sum c_i C(j-1, i); distinct
    (a, b) pairs are counted by unioning those ranges per b.
    """
    if n == 1:
        return 0
    # axis i holds c_{i+1}; the last axis is b = c_m
    ranges = [np.arange(-(2 ** i) * (n - 1), (2 ** i) * (n - 1) + 1, dtype=np.int32)
              for i in range(m)]
    shape = tuple(len(r) for r in ranges)
    smin = np.zeros(shape, dtype=np.int32)
    smax = np.zeros(shape, dtype=np.int32)
    for j in range(1, k):  # j is the 0-based evaluation point; s at j=0 is 0
        s = np.zeros(shape, dtype=np.int32)
        for i, r in enumerate(ranges):
            cview = r.reshape([-1 if ax == i else 1 for ax in range(m)])
            s += cview * comb(j, i + 1)
        np.minimum(smin, s, out=smin)
        np.maximum(smax, s, out=smax)
    lo = 1 - smin  # smallest feasible start; >= 1 since s vanishes at j=0
    hi = n - smax  # largest feasible start; <= n likewise
    b_axis = m - 1
    nb = shape[b_axis]
    lo = np.moveaxis(lo, b_axis, 0).reshape(nb, -1)
    hi = np.moveaxis(hi, b_axis, 0).reshape(nb, -1)
    valid = lo <= hi
    b_vals = ranges[b_axis]
    # union of integer ranges per b via a difference array over starts 1..n
    diff = np.zeros((nb, n + 2), dtype=np.int32)
    b_idx = np.nonzero(valid)[0]
    np.add.at(diff, (b_idx, lo[valid]), 1)
    np.add.at(diff, (b_idx, hi[valid] + 1), -1)
    covered = np.cumsum(diff, axis=1)[:, 1:n + 1] > 0
    counts = covered.sum(axis=1)
    counts[b_vals == 0] = 0
    return int(counts.sum())


def box_half_width(degree: int) -> Fraction:
    """Half-width of the open centering box: 2^(-degree-1)."""
    return Fraction(1, 2 ** (degree + 1))


def lift_modular_progression(
    points: Sequence[Sequence[Number]], degree: int
) -> list[tuple[Fraction, ...]]:
    """Lift torus points with integral (degree+1)-st differences to coefficients.

    points are rational d-vectors, all inside the open box
    (-2^(-degree-1), 2^(-degree-1))^d, whose componentwise (degree+1)-st
    differences are integral.  Inside that box the binomial triangle
    inequality forces those differences to vanish exactly; anything else
    (including non-integral differences) raises LemmaViolation, signalling
    points outside the box or float contamination upstream.

    Returns the monomial coefficient vectors P_0..P_degree of the unique
    degree-<=degree vector polynomial through the points, as Fraction tuples.
    """
    pts = [tuple(Fraction(c) for c in p) for p in points]
    if len(pts) < degree + 2:
        raise ValueError("need at least degree + 2 points")
    dim = len(pts[0])
    if any(len(p) != dim for p in pts):
        raise ValueError("points must share a dimension")
    for h in range(dim):
        coord = tuple(p[h] for p in pts)
        if any(x != 0 for x in delta(coord, degree + 1)):
            raise LemmaViolation(
                "nonzero (degree+1)-st differences: points not all inside the "
                "centering box, or floats contaminated the inputs"
            )
    # Newton forward form on the first degree+1 points, expanded to monomials.
    # p(j) = sum_i  d_i * C(j-1, i)  with d_i the i-th difference at the start.
    coeffs = [[Fraction(0)] * (degree + 1) for _ in range(dim)]
    for h in range(dim):
        coord = tuple(p[h] for p in pts[: degree + 1])
        diffs = [coord[0]]
        level = coord
        for _ in range(degree):
            level = tuple(level[i + 1] - level[i] for i in range(len(level) - 1))
            diffs.append(level[0])
        # C(j-1, i) as a polynomial in j: prod_{t=1..i} (j - t) / i!
        basis = [Fraction(1)]  # constant polynomial 1
        for i in range(degree + 1):
            if i > 0:
                new = [Fraction(0)] * (len(basis) + 1)
                for e, c in enumerate(basis):  # multiply by (j - i)
                    new[e] -= c * i
                    new[e + 1] += c
                basis = [c / i for c in new]  # running factorial division
            for e, c in enumerate(basis):
                coeffs[h][e] += diffs[i] * c
    return [tuple(coeffs[h][e] for h in range(dim)) for e in range(degree + 1)]
