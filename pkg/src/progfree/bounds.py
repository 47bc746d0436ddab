"""Closed-form density lower bounds and volume computations.

Everything here evaluates in log space (log base 2 for the density formulas)
so the evaluators stay finite for universe sizes far beyond float range:
callers may pass the universe size directly or as its base-2 logarithm.

The density bounds follow one shape: constant * (log2 N)^(1/(2m)) divided by
2 raised to m * 2^((m-1)/2) * degree^((m-1)/m) * (log2 N)^(1/m), where m is
the recursion depth ceil(log2(k/degree)).  The leading constant is known
explicitly only for the 3-term degree-1 form and for the single-shell
construction; elsewhere it is symbolic and reported as 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb, lgamma
from typing import Optional

import numpy as np

from .constructions import (
    AnnuliSpec,
    UnsupportedParameters,
    recursion_depth,
    sample_normalized_statistic,
)

# sqrt(360)/(e * pi^(3/2)): the explicit 3-term degree-1 density constant.
R3_CONSTANT = math.sqrt(360.0) / (math.e * math.pi ** 1.5)

MIN_MC_SAMPLES = 10 ** 4


def lemma1_bound(degree: int, delta: float) -> float:
    """Largest possible lead-coefficient norm: 2^degree * sqrt(delta/(2*degree)!).

    A degree-degree polynomial whose 2*degree+1 sample norms all lie within
    delta of a common radius has lead coefficient no larger than this; at
    delta=0 the lead must vanish exactly.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    return 2 ** degree * math.sqrt(delta / math.factorial(2 * degree))


def ball_volume_log(dim: int, x: float) -> float:
    """Natural log of ball_volume(dim, x); -inf at x = 0.

    Computed as dim * log(x) + log-volume of the unit ball, so the scaling
    law log vol(d, x) = d*log(x) + log vol(d, 1) holds exactly in floats.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if x < 0:
        raise ValueError("radius must be nonnegative")
    if x == 0.0:
        return -math.inf
    unit = (
        math.log(2.0)
        + (dim / 2.0) * math.log(math.pi)
        - lgamma(dim / 2.0)
        - math.log(dim)
    )
    return dim * math.log(x) + unit


def ball_volume(dim: int, x: float) -> float:
    """Volume of the dim-dimensional ball of radius x: 2 pi^(d/2) x^d / (Gamma(d/2) d)."""
    if dim >= 1 and x == 0.0:
        return 0.0
    return math.exp(ball_volume_log(dim, x))


@dataclass(frozen=True)
class VolumeEstimate:
    """Monte Carlo annuli volume relative to the centering box (vol / 2^(-dim*degree))."""

    relative_volume: float
    std_error: float
    samples: int


def mc_annuli_volume(spec: AnnuliSpec, samples: int, seed) -> VolumeEstimate:
    """Fraction of uniform box samples whose normalized statistic hits the shells.

    Chunked and fully determined by the seed.  Uses the unguarded intervals:
    this estimates the geometric volume, not the guarded membership rule
    (the guard is smaller than any statistical resolution here anyway).
    """
    if samples < MIN_MC_SAMPLES:
        raise ValueError(f"need at least {MIN_MC_SAMPLES} samples")
    t = sample_normalized_statistic(spec.degree, spec.dim, samples, seed)
    hits = np.zeros(samples, dtype=bool)
    for lo, hi in spec.intervals(0.0):
        hits |= (t > lo) & (t < hi)
    p = float(hits.mean())
    return VolumeEstimate(
        relative_volume=p,
        std_error=math.sqrt(p * (1.0 - p) / samples),
        samples=samples,
    )


@dataclass(frozen=True)
class BoundReport:
    """Evaluated density lower bounds for one (universe, k, degree).

    density uses the general form with its unknown constant set to 1
    (constant_symbolic records that); exponent is the power of 2 divided out,
    reported separately so the dominant term can be audited.  r3_density is
    present for k=3, degree=1 (explicit constant); base_case_density is
    present when k <= 4*degree, where the single-shell construction applies
    (its constant at degree 1 is exactly twice the r3 constant; both are
    reported rather than reconciled).
    """

    universe_log2: float
    k: int
    degree: int
    depth: int
    density: float
    exponent: float
    constant_symbolic: bool
    r3_density: Optional[float] = None
    r3_constant: Optional[float] = None
    base_case_density: Optional[float] = None
    base_case_constant: Optional[float] = None


def base_case_constant(degree: int) -> float:
    """Explicit single-shell density constant: sqrt(90)/(e pi^(3/2)) * 2^degree/degree^(1/4) * C(2*degree, degree)."""
    if degree < 1:
        raise ValueError("degree must be >= 1")
    return (
        math.sqrt(90.0)
        / (math.e * math.pi ** 1.5)
        * 2 ** degree
        / degree ** 0.25
        * comb(2 * degree, degree)
    )


def _universe_log2(n, log2_n) -> float:
    if (n is None) == (log2_n is None):
        raise ValueError("give exactly one of n and log2_n")
    if n is not None:
        if n < 2:
            raise ValueError("n must be >= 2")
        return math.log2(n)
    if log2_n < 1.0:
        raise ValueError("log2_n must be >= 1 (n >= 2)")
    return float(log2_n)


def theorem_bound(n=None, k: int = 3, degree: int = 1, *, log2_n=None) -> BoundReport:
    """General density lower bound for k-term degree-`degree` free sets.

    density = (log2 N)^(1/(2m)) / 2^exponent with
    exponent = m * 2^((m-1)/2) * degree^((m-1)/m) * (log2 N)^(1/m),
    m = ceil(log2(k/degree)); the overall constant is unknown and set to 1.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    if k <= 2 * degree:
        raise UnsupportedParameters("need k > 2 * degree")
    log_n = _universe_log2(n, log2_n)
    depth = recursion_depth(k, degree)
    exponent = (
        depth
        * 2.0 ** ((depth - 1) / 2.0)
        * degree ** ((depth - 1) / depth)
        * log_n ** (1.0 / depth)
    )
    log2_density = (1.0 / (2 * depth)) * math.log2(log_n) - exponent

    r3_density = r3_constant = None
    if k == 3 and degree == 1:
        r3_constant = R3_CONSTANT
        r3_density = 2.0 ** (
            math.log2(R3_CONSTANT)
            + 0.25 * math.log2(2.0 * log_n)
            - 2.0 * math.sqrt(2.0 * log_n)
        )

    base_density = base_constant = None
    if k <= 4 * degree:
        base_constant = base_case_constant(degree)
        base_density = 2.0 ** (
            math.log2(base_constant)
            + 0.25 * math.log2(2.0 * log_n)
            - math.sqrt(8.0 * degree * log_n)
        )

    return BoundReport(
        universe_log2=log_n,
        k=k,
        degree=degree,
        depth=depth,
        density=2.0 ** log2_density,
        exponent=exponent,
        constant_symbolic=True,
        r3_density=r3_density,
        r3_constant=r3_constant,
        base_case_density=base_density,
        base_case_constant=base_constant,
    )


def corollary_bound(n=None, k: int = 3, *, log2_n=None) -> BoundReport:
    """Degree-1 specialization of theorem_bound (identical code path)."""
    if k < 3:
        raise ValueError("k must be >= 3")
    return theorem_bound(n, k, 1, log2_n=log2_n)


def rho_third_moment(degree: int) -> float:
    """Centered third absolute moment constant 2^(-6*degree) (3+2*sqrt(3))/11340.

    Equals E|X^2 - 2^(-2*degree)/12|^3 for X uniform on the centering-box
    interval (-2^(-degree-1), 2^(-degree-1)).  It feeds the Berry-Esseen step
    behind the shell-volume estimate; nothing in this package consumes it,
    but it is kept (and tested by quadrature) as a documented constant.
    """
    if degree < 0:
        raise ValueError("degree must be >= 0")
    return (3.0 + 2.0 * math.sqrt(3.0)) / 11340.0 / 2.0 ** (6 * degree)
