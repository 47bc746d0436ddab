"""Constructions of dense progression-free subsets of [1..N].

Two families:

* Torus sets.  Draw a direction theta and shift a uniformly on the centered
  d-torus and keep n when n*theta + a lands in a union of thin spherical
  shells ("annuli") inside the small centering box.  A polynomial progression
  surviving the map would force, via the exact lift, a polynomial whose values
  sit on |inner_set| shells indexed by an inner progression-free set, which is
  impossible; the few accidental progressions are removed by deleting each
  found type's start element, and the result is re-certified by the exact
  detector.

* Digit sets.  Lattice points of {1..P-1}^d on a single best sphere, pushed
  through the carry-free digit map x -> sum x_i (2P)^(i-1).  Certified 3-AP
  free.

The recursive driver schedules dimensions and shell widths, recursing on the
inner set with the degree doubled until a single shell suffices.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, lgamma
from typing import Optional, Union

import numpy as np

from .progressions import (
    DegenerateParameters,
    IntSet,
    ProgressionType,
    find_progressions,
)

# Membership guard band: annuli intervals are shrunk by this amount at both
# ends so float jitter in n*theta+a can only drop candidates (density loss),
# never admit a point whose exact position is outside.  Exactness of results
# rests on the detector, not on this.
GUARD_BAND = 1e-12

# Elementary-step ceiling for exact detection: |A|^(D+1) * k.
DETECTION_BUDGET = 10 ** 9

MIN_MC_SAMPLES = 10 ** 4

_Z_GRID_POINTS = 201

# Floors of scheduled quantities forgive this much float dust so that exact
# powers (e.g. 2 * 8^(1/3) = 4) do not round down.
_FLOOR_NUDGE = 1e-9


class UnsupportedParameters(ValueError):
    """Raised for parameter ranges the construction cannot serve (k <= 2D)."""


def mu_sigma(degree: int, dim: int) -> tuple[Fraction, float]:
    """Mean and standard deviation of ||x||^2 for x uniform in the centering box.

    Per coordinate uniform on (-2^(-degree-1), 2^(-degree-1)):
    mean 2^(-2*degree) * dim / 12, variance 2^(-4*degree) * dim / 180.
    The mean is exact; sigma is the float square root of the exact variance.
    """
    if degree < 0 or dim < 1:
        raise ValueError("need degree >= 0 and dim >= 1")
    mu = Fraction(dim, 12 * 4 ** degree)
    return mu, math.sqrt(float(norm_variance(degree, dim)))


def norm_variance(degree: int, dim: int) -> Fraction:
    """Exact variance of ||x||^2 for x uniform in the centering box."""
    return Fraction(dim, 180 * 16 ** degree)


@dataclass(frozen=True)
class AnnuliSpec:
    """Union of shells in the centering box.

    A point x of the open box (-2^(-degree-1), 2^(-degree-1))^dim belongs when
    the normalized statistic (||x||^2 - mu) / sigma lies in the union over
    members a of inner_set of the open intervals z - (a-1)/n0 +- delta.
    z is in normalized units (so the admissible band z in [-1, 1] is one
    sigma either side of the mean);  2*delta <= 1/n0 keeps shells disjoint.
    """

    inner_set: IntSet
    n0: int
    degree: int
    dim: int
    delta: float
    z: float

    def __post_init__(self) -> None:
        if self.n0 < 1 or self.inner_set.universe != self.n0:
            raise ValueError("inner_set universe must equal n0 >= 1")
        if self.degree < 0 or self.dim < 1:
            raise ValueError("need degree >= 0 and dim >= 1")
        if not (self.delta > 0):
            raise ValueError("delta must be positive")
        if 2.0 * self.delta * self.n0 > 1.0 + 1e-9:
            raise ValueError("shell disjointness requires 2*delta <= 1/n0")
        if abs(self.z) > 1.0 + 1e-9:
            raise ValueError("z must lie within one sigma of the mean (|z| <= 1)")

    def intervals(self, guard: float = 0.0) -> list[tuple[float, float]]:
        """Open (lo, hi) intervals for the normalized statistic, shrunk by guard."""
        out = []
        for a in self.inner_set:
            center = self.z - (a - 1) / self.n0
            out.append((center - self.delta + guard, center + self.delta - guard))
        return out


def annuli_contains(spec: AnnuliSpec, point) -> bool:
    """Guarded membership of a float point in the annuli union.

    The box test is strict; each interval is shrunk by GUARD_BAND at both
    ends, so answers are stable under float jitter of that size.
    """
    x = np.asarray(point, dtype=float)
    if x.shape != (spec.dim,):
        raise ValueError("point dimension mismatch")
    half = 2.0 ** -(spec.degree + 1)
    if not np.all(np.abs(x) < half):
        return False
    mu, sigma = _mu_sigma_floats(spec.degree, spec.dim)
    t = (float(np.dot(x, x)) - mu) / sigma
    return any(lo < t < hi for lo, hi in spec.intervals(GUARD_BAND))


def _mu_sigma_floats(degree: int, dim: int) -> tuple[float, float]:
    mu, sigma = mu_sigma(degree, dim)
    return float(mu), sigma


def sample_normalized_statistic(
    degree: int, dim: int, samples: int, seed, chunk: int = 1 << 16
) -> np.ndarray:
    """Normalized ||x||^2 statistic for uniform box samples (chunked, seeded)."""
    if samples < 1:
        raise ValueError("samples must be positive")
    rng = np.random.default_rng(seed)
    half = 2.0 ** -(degree + 1)
    mu, sigma = _mu_sigma_floats(degree, dim)
    rows = max(1, min(chunk, (1 << 22) // max(1, dim)))
    out = np.empty(samples)
    done = 0
    while done < samples:
        m = min(rows, samples - done)
        x = (rng.random((m, dim)) - 0.5) * (2.0 * half)
        out[done:done + m] = (np.einsum("ij,ij->i", x, x) - mu) / sigma
        done += m
    return out


def choose_z(
    inner_set: IntSet,
    n0: int,
    degree: int,
    dim: int,
    delta: float,
    samples: int,
    seed,
) -> float:
    """Pick the shell offset z maximizing Monte Carlo annuli volume.

    Evaluates a fixed grid of 201 candidates across [-1, 1] (normalized units)
    against one common set of box samples, so candidates are compared on
    identical randomness.  Ties break toward the grid midpoint.  Deterministic
    given the seed.
    """
    if samples < MIN_MC_SAMPLES:
        raise ValueError(f"need at least {MIN_MC_SAMPLES} samples")
    if 2.0 * delta * n0 > 1.0 + 1e-9:
        raise ValueError("shell disjointness requires 2*delta <= 1/n0")
    t = np.sort(sample_normalized_statistic(degree, dim, samples, seed))
    grid = np.linspace(-1.0, 1.0, _Z_GRID_POINTS)
    offsets = (np.asarray(inner_set.members, dtype=float) - 1.0) / n0
    centers = grid[:, None] - offsets[None, :]
    # shells are disjoint, so per-interval counts add up
    counts = (
        np.searchsorted(t, centers + delta) - np.searchsorted(t, centers - delta)
    ).sum(axis=1)
    best = counts.max()
    ties = grid[counts == best]
    return float(min(ties, key=lambda z: (abs(z), z)))


def delta_formula(n, degree: int, dim: int) -> float:
    """Scheduled shell half-width for universe size n.

    Computed in log space:
    (1/(pi*F)) * (d/((d+2)*2^(degree+1)))^(2/d) * Gamma(d/2)^(2/d)
        / (n^(2/d) * sigma),
    with F = 4^degree / C(2*degree, degree) and sigma the box-norm deviation.
    Asymptotically (3*sqrt(5)/(e*pi)) * C(2*degree, degree) * sqrt(d) / n^(2/d).
    """
    return delta_formula_ln(math.log(n), degree, dim)


def delta_formula_ln(ln_n: float, degree: int, dim: int) -> float:
    """delta_formula with the universe size given as a natural log (large-n safe)."""
    if dim < 1 or degree < 0 or ln_n < 0:
        raise ValueError("need dim >= 1, degree >= 0, n >= 1")
    d = dim
    cap_f = 4 ** degree / comb(2 * degree, degree)
    _, sigma = _mu_sigma_floats(degree, d)
    log_delta = (
        -math.log(math.pi * cap_f)
        + (2.0 / d) * (math.log(d / ((d + 2) * 2 ** (degree + 1)))
                       + lgamma(d / 2.0) - ln_n)
        - math.log(sigma)
    )
    return math.exp(log_delta)


def n0_formula(n, degree: int, dim: int) -> float:
    """Scheduled inner universe size (real-valued; the driver floors it).

    (e*pi/(3*sqrt(5))) * n^(2/d) / (4^degree * C(2*degree, degree) * sqrt(d)).
    """
    if dim < 1 or degree < 0:
        raise ValueError("need dim >= 1 and degree >= 0")
    const = math.e * math.pi / (3.0 * math.sqrt(5.0))
    return (
        const
        * math.exp((2.0 / dim) * math.log(n))
        / (4 ** degree * comb(2 * degree, degree) * math.sqrt(dim))
    )


def base_case_dim(n, degree: int) -> int:
    """Single-shell torus dimension: floor(sqrt(2 log2(n) / degree)), at least 1."""
    if degree < 1 or n < 1:
        raise ValueError("need degree >= 1 and n >= 1")
    return max(1, int(math.sqrt(2.0 * math.log2(n) / degree) + _FLOOR_NUDGE))


def inductive_dim(n, degree: int, depth: int) -> int:
    """Recursive-level torus dimension: floor(2^(depth/2) (log2(n)/degree)^(1/(depth+1)))."""
    if degree < 1 or n < 1 or depth < 1:
        raise ValueError("need degree >= 1, n >= 1, depth >= 1")
    log_n = math.log2(n)
    if log_n <= 0:
        return 1
    value = 2.0 ** (depth / 2.0) * (log_n / degree) ** (1.0 / (depth + 1))
    return max(1, int(value + _FLOOR_NUDGE))


def recursion_depth(k: int, degree: int) -> int:
    """Least m with k <= 2^m * degree (the driver's level count), exactly."""
    if degree < 1 or k <= 2 * degree:
        raise UnsupportedParameters("need k > 2 * degree")
    depth = 1
    while (2 ** depth) * degree < k:
        depth += 1
    return depth


@dataclass(frozen=True)
class TorusConfig:
    """Everything needed to rebuild one torus set deterministically."""

    n: int
    k: int
    degree: int
    dim: int
    annuli: AnnuliSpec
    seed: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.k <= 2 * self.degree:
            raise UnsupportedParameters("need k > 2 * degree")
        if self.dim != self.annuli.dim or self.degree != self.annuli.degree:
            raise ValueError("annuli dim/degree must match the config")
        cap = 2.0 ** (-2 * self.degree)
        if 2.0 * self.annuli.delta * self.annuli.n0 > cap * (1.0 + 1e-9):
            raise ValueError(
                "coupling violated: need 2 * delta * n0 <= 2^(-2*degree) "
                "for the removal bound"
            )


@dataclass(frozen=True)
class BehrendConfig:
    """Parameters of a digit-map sphere set (radius_sq as actually used)."""

    n: int
    dim: int
    p: int
    radius_sq: int


@dataclass
class ConstructionResult:
    """A constructed set plus the evidence trail.

    removed lists (type, start element) for every progression type deleted
    during cleanup; certified means the exact detector re-ran clean on the
    final set; inner_verified records whether the inner set's freeness was
    itself re-checked (False only when the detection budget forbade it);
    levels carries one diagnostics dict per driver level, outermost first.
    """

    result: IntSet
    removed: tuple[tuple[ProgressionType, int], ...]
    config: object
    certified: bool
    inner_verified: bool = True
    levels: tuple = ()

    @property
    def pre_removal_size(self) -> int:
        # several recorded types can share a start element; only distinct
        # starts correspond to actual deletions
        return len(self.result) + len({start for _type, start in self.removed})


def _center_mod(values):
    """Reduce reals into the centered unit cell [-1/2, 1/2)."""
    return ((values + 0.5) % 1.0) - 0.5


def _detection_cost(size: int, k: int, degree: int) -> int:
    return size ** (degree + 1) * k


def _verify_inner_set(inner: IntSet, k: int, degree: int, budget: int) -> bool:
    """Check the inner set is free of k-term progressions of 2*degree.

    Returns whether the check ran (ValueError when it ran and failed).  For
    k <= 2*degree + 1 every nonconstant k-term sequence qualifies, so only
    sets of size <= 1 are admissible and the check is direct.
    """
    inner_degree = 2 * degree
    if k <= inner_degree + 1:
        if len(inner) > 1:
            raise ValueError(
                "inner set must be a singleton when k <= 2*degree + 1"
            )
        return True
    if _detection_cost(len(inner), k, inner_degree) > budget:
        return False
    hits = find_progressions(inner, k, inner_degree)
    if hits:
        raise ValueError(
            f"inner set contains a {k}-term progression of degree "
            f"<= {inner_degree}: type {hits[0][0]}"
        )
    return True


def build_torus_set(
    config: TorusConfig,
    *,
    detection_budget: int = DETECTION_BUDGET,
    force_detection: bool = False,
) -> ConstructionResult:
    """Draw the torus set for config, clean it up, and certify it.

    Membership is decided by annuli_contains on n*theta + a reduced to the
    centered cell (a vectorized prefilter proposes candidates; the guarded
    scalar test confirms each).  Every progression type the detector finds
    loses its start element; one sweep suffices since deletion cannot create
    progressions, and the detector re-runs clean before the result is marked
    certified.  If |A|^(degree+1)*k exceeds the budget and force_detection is
    not set, the raw set is returned with certified=False.
    """
    spec = config.annuli
    inner_verified = _verify_inner_set(
        spec.inner_set, config.k, config.degree, detection_budget
    )
    rng = np.random.default_rng(np.random.SeedSequence(config.seed))
    theta = rng.random(config.dim) - 0.5
    shift = rng.random(config.dim) - 0.5

    mu, sigma = _mu_sigma_floats(config.degree, config.dim)
    half = 2.0 ** -(config.degree + 1)
    raw_intervals = spec.intervals(0.0)  # unguarded superset for the prefilter
    members: list[int] = []
    rows = max(1, (1 << 22) // max(1, config.dim))
    for start in range(1, config.n + 1, rows):
        idx = np.arange(start, min(start + rows, config.n + 1))
        pts = _center_mod(idx[:, None] * theta[None, :] + shift[None, :])
        mask = np.all(np.abs(pts) < half, axis=1)
        t = (np.einsum("ij,ij->i", pts, pts) - mu) / sigma
        hit = np.zeros(len(idx), dtype=bool)
        for lo, hi in raw_intervals:
            hit |= (t > lo) & (t < hi)
        for n_val in idx[mask & hit]:
            point = _center_mod(int(n_val) * theta + shift)
            if annuli_contains(spec, point):
                members.append(int(n_val))

    initial = IntSet.from_iterable(config.n, members)
    if (
        _detection_cost(len(initial), config.k, config.degree) > detection_budget
        and not force_detection
    ):
        return ConstructionResult(
            result=initial,
            removed=(),
            config=config,
            certified=False,
            inner_verified=inner_verified,
        )

    current = set(initial.members)
    removed: list[tuple[ProgressionType, int]] = []
    sweep_guard = 2 ** (config.degree + 1) * config.n * config.n
    while True:
        found = find_progressions(
            IntSet.from_iterable(config.n, current), config.k, config.degree
        )
        if not found:
            break
        if len(removed) + len(found) > sweep_guard:
            raise RuntimeError(
                "removal loop exceeded the type-count bound; detector and "
                "removal disagree"
            )
        for ptype, _seq in found:
            removed.append((ptype, ptype.start))
        current -= {ptype.start for ptype, _seq in found}

    return ConstructionResult(
        result=IntSet.from_iterable(config.n, current),
        removed=tuple(removed),
        config=config,
        certified=True,
        inner_verified=inner_verified,
    )


def single_shell_config(
    n: int,
    k: int,
    degree: int,
    seed: int,
    *,
    dim: Optional[int] = None,
    delta: Optional[float] = None,
    z_samples: int = 20000,
) -> TorusConfig:
    """Scheduled one-shell torus config (trivial inner set).

    dim and delta default to the schedule (delta capped by the coupling
    bound 2*delta <= 2^(-2*degree)); explicit overrides are validated, not
    silently adjusted.
    """
    ss = np.random.SeedSequence(seed)
    seed_build, seed_z = (int(s) for s in ss.generate_state(2, dtype=np.uint64))
    if dim is None:
        dim = base_case_dim(n, degree)
    cap = 2.0 ** (-2 * degree)
    if delta is None:
        delta = min(delta_formula(n, degree, dim), cap / 2.0)
    inner = IntSet(1, (1,))
    z = choose_z(inner, 1, degree, dim, delta, z_samples, seed_z)
    annuli = AnnuliSpec(
        inner_set=inner, n0=1, degree=degree, dim=dim, delta=delta, z=z
    )
    return TorusConfig(
        n=n, k=k, degree=degree, dim=dim, annuli=annuli, seed=seed_build
    )


def build_behrend_set(
    n: int,
    dim: int,
    p: int,
    radius_sq: Optional[int] = None,
    *,
    detection_budget: int = DETECTION_BUDGET,
    force_detection: bool = False,
) -> ConstructionResult:
    """Digit-map image of the fullest sphere of {1..p-1}^dim; certified 3-AP free.

    Squared radii of lattice points range over at most dim*(p-1)^2 - dim + 1
    values, so the best sphere holds at least (p-1)^dim / #values points
    (asserted from the realized value count).  The digit map
    x -> sum x_i (2p)^(i-1) adds without carrying for pair sums (coordinates
    stay below p < 2p/2), so 3-AP freeness transfers; higher-order structure
    does not, which is why this builder certifies only k=3, degree 1.
    """
    if p < 2 or dim < 1:
        raise ValueError("need p >= 2 and dim >= 1")
    max_image = (p - 1) * ((2 * p) ** dim - 1) // (2 * p - 1)
    if max_image > n:
        raise ValueError(
            f"digit map exceeds the universe: max image {max_image} > n={n}"
        )
    by_radius: dict[int, list[tuple[int, ...]]] = {}
    for point in itertools.product(range(1, p), repeat=dim):
        by_radius.setdefault(sum(c * c for c in point), []).append(point)
    if radius_sq is None:
        best = max(by_radius.items(), key=lambda kv: (len(kv[1]), -kv[0]))
        radius_sq = best[0]
        # only the auto-selected fullest sphere carries the pigeonhole guarantee
        assert len(best[1]) * len(by_radius) >= (p - 1) ** dim, "pigeonhole broken"
    elif radius_sq not in by_radius:
        raise ValueError(f"no lattice point has squared radius {radius_sq}")
    sphere = by_radius[radius_sq]
    weights = [(2 * p) ** i for i in range(dim)]
    elements = sorted(sum(c * w for c, w in zip(pt, weights)) for pt in sphere)
    result = IntSet(n, tuple(elements))
    config = BehrendConfig(n=n, dim=dim, p=p, radius_sq=radius_sq)
    if _detection_cost(len(result), 3, 1) > detection_budget and not force_detection:
        return ConstructionResult(result, (), config, certified=False)
    hits = find_progressions(result, 3, 1)
    if hits:  # mathematically impossible; keep the evidence if it ever fires
        raise RuntimeError(f"sphere set contains a 3-term progression: {hits[0]}")
    return ConstructionResult(result, (), config, certified=True)


# Inner universes smaller than this are solved exactly instead of recursively.
RECURSION_FLOOR = 8


def rankin_driver(
    n: int,
    k: int,
    degree: int,
    seed,
    *,
    z_samples: int = 20000,
    detection_budget: int = DETECTION_BUDGET,
    force_detection: bool = False,
    recursion_floor: int = RECURSION_FLOOR,
) -> ConstructionResult:
    """Recursive torus construction of a k-term degree-`degree` free subset of [1..n].

    Scheduling per level (depth = least m with k <= 2^m * degree; k <= 2*degree
    is unsupported):

    * depth == 2 (k <= 4*degree): single shell, inner set {1}, base dimension.
    * deeper: recursive dimension; the inner universe n0 comes from the
      schedule.  n0 < 1 falls back to the single shell (valid for every
      k > 2*degree); n0 < RECURSION_FLOOR uses the exact solver's optimum on
      [1..n0]; otherwise the inner set is built by recursing with the degree
      doubled.  The shell width is the scheduled delta clipped into
      [2^(-2*degree)/(8*n0), 2^(-2*degree)/(2*n0)], which enforces the
      coupling window 1/4 * 2^(-2*degree) <= 2*delta*n0 <= 2^(-2*degree); the
      raw formula overshoots the upper edge by up to a factor ~2.

    Deterministic given seed (an int or a numpy SeedSequence); every level,
    the z-search, and the theta/a draw use split substreams.  The returned
    levels tuple records per-level diagnostics, outermost first.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    if k <= 2 * degree:
        raise UnsupportedParameters(
            "need k > 2 * degree: shorter windows admit no free set denser "
            "than a singleton"
        )
    if n < 1:
        raise ValueError("n must be >= 1")
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    seed_build, seed_z, seed_inner = (
        int(s) for s in ss.generate_state(3, dtype=np.uint64)
    )

    depth = recursion_depth(k, degree)
    cap = 2.0 ** (-2 * degree)
    branch = "base"
    inner_levels: tuple = ()
    if depth == 2:
        dim = base_case_dim(n, degree)
        n0, inner = 1, IntSet(1, (1,))
    else:
        dim = inductive_dim(n, degree, depth)
        n0_real = n0_formula(n, degree, dim)
        if n0_real < 1.0:
            branch = "base"
            dim = base_case_dim(n, degree)
            n0, inner = 1, IntSet(1, (1,))
        elif n0_real < recursion_floor:
            branch = "inductive-exact"
            n0 = int(n0_real)
            from .exactsolver import exact_r  # local import; solver uses this module's types

            inner = exact_r(n0, k, 2 * degree).witness
        else:
            branch = "inductive"
            n0 = int(n0_real)
            inner_result = rankin_driver(
                n0,
                k,
                2 * degree,
                np.random.SeedSequence(seed_inner),
                z_samples=z_samples,
                detection_budget=detection_budget,
                force_detection=force_detection,
                recursion_floor=recursion_floor,
            )
            if not inner_result.certified:
                raise RuntimeError(
                    "inner level returned uncertified; cannot build on it"
                )
            inner = inner_result.result
            if len(inner) == 0:
                # a singleton is free of any nonconstant progression, so it
                # is always a valid (if minimal) annuli index set
                inner = IntSet(n0, (1,))
            inner_levels = inner_result.levels

    raw_delta = delta_formula(n, degree, dim)
    if branch == "base":
        delta = min(raw_delta, cap / 2.0)
    else:
        delta = min(max(raw_delta, cap / (8.0 * n0)), cap / (2.0 * n0))
    z = choose_z(inner, n0, degree, dim, delta, z_samples, seed_z)
    annuli = AnnuliSpec(
        inner_set=inner, n0=n0, degree=degree, dim=dim, delta=delta, z=z
    )
    config = TorusConfig(
        n=n, k=k, degree=degree, dim=dim, annuli=annuli, seed=seed_build
    )
    built = build_torus_set(
        config, detection_budget=detection_budget, force_detection=force_detection
    )
    record = {
        "n": n,
        "k": k,
        "degree": degree,
        "depth": depth,
        "branch": branch,
        "dim": dim,
        "n0": n0,
        "inner_size": len(inner),
        "delta": delta,
        "delta_formula": raw_delta,
        "z": z,
        "coupling": 2.0 * delta * n0,
        "pre_removal_size": built.pre_removal_size,
        "size": len(built.result),
        "removed": len(built.removed),
        "certified": built.certified,
        "inner_verified": built.inner_verified,
        "seed_build": seed_build,
    }
    built.levels = (record,) + inner_levels
    return built
