"""Exact extremal values: largest progression-free subsets of [1..n].

The forbidden objects are value sets of k-term progressions of degree at most
`degree` lying inside [1..n]; each is a bitmask over elements.  A subset is
free iff it contains no mask entirely.  Branch and bound decides elements from
n downward, include-first, checking only the masks whose minimum element is
the one being added (all other mask elements are already decided then), and
pruning branches that cannot beat the incumbent.  A second bounded search,
ascending and include-first, converts the optimal size into the
lexicographically smallest witness.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .progressions import IntSet, extrapolate

DEFAULT_NODE_BUDGET = 10 ** 7

# O(M^2) mask minimization is skipped above this many masks.
_SUBSET_FILTER_CAP = 5000


class BudgetExceeded(RuntimeError):
    """Search ran out of nodes; carries the best feasible set found so far."""

    def __init__(self, lower_bound: int, witness: IntSet, nodes: int):
        super().__init__(
            f"node budget exhausted after {nodes} nodes; "
            f"best feasible size so far {lower_bound}"
        )
        self.lower_bound = lower_bound
        self.witness = witness
        self.nodes = nodes


@dataclass(frozen=True)
class ExactRecord:
    """One solved instance.  canonical marks the witness as lexicographically
    least among the maximum-size free sets (False only if the witness search
    hit the node budget; the value is optimal either way)."""

    n: int
    k: int
    degree: int
    value: int
    witness: IntSet
    nodes: int
    canonical: bool = True


def forbidden_masks(n: int, k: int, degree: int) -> list[int]:
    """Bitmasks (bit v-1 for value v) of all in-range progression value sets.

    Every degree-<= sequence is determined by its first degree+1 terms, so
    enumerating prefixes in [1..n]^(degree+1) and extending by the difference
    ladder covers each sequence exactly once.  Masks containing another mask
    are dropped: avoiding the smaller one already avoids the larger.
    """
    if degree < 1 or k < degree + 2:
        raise ValueError("need degree >= 1 and k >= degree + 2")
    masks = set()
    for prefix in itertools.product(range(1, n + 1), repeat=degree + 1):
        if all(x == prefix[0] for x in prefix):
            continue  # constant prefix extends to a constant sequence
        seq = extrapolate(prefix, degree, k)
        if all(1 <= v <= n for v in seq[degree + 1:]):
            m = 0
            for v in seq:
                m |= 1 << (v - 1)
            masks.add(m)
    ordered = sorted(masks, key=lambda m: (m.bit_count(), m))
    if len(ordered) > _SUBSET_FILTER_CAP:
        return ordered
    kept: list[int] = []
    for m in ordered:
        if not any(m & small == small for small in kept):
            kept.append(m)
    return kept


def _group_by(masks: list[int], key) -> dict[int, list[int]]:
    out: dict[int, list[int]] = {}
    for m in masks:
        out.setdefault(key(m), []).append(m)
    return out


def _bits_to_set(n: int, mask: int) -> IntSet:
    return IntSet.from_iterable(
        n, (v + 1 for v in range(n) if mask >> v & 1)
    )


def exact_r(
    n: int, k: int, degree: int, *, node_budget: int = DEFAULT_NODE_BUDGET
) -> ExactRecord:
    """Maximum size of a subset of [1..n] with no k-term degree-<= progression.

    Raises BudgetExceeded (with the best lower bound found) if the
    optimization search outruns node_budget.
    """
    if n < 0 or k < 2 or degree < 1:
        raise ValueError("need n >= 0, k >= 2, degree >= 1")
    if n == 0:
        return ExactRecord(n, k, degree, 0, IntSet(0, ()), 0)
    if k <= degree + 1:
        # every k-tuple of values interpolates a degree-<k polynomial, so any
        # nonconstant window is forbidden and only singletons survive
        return ExactRecord(n, k, degree, 1, IntSet(n, (1,)), 0)

    masks = forbidden_masks(n, k, degree)
    by_min = _group_by(masks, key=lambda m: (m & -m).bit_length())
    by_max = _group_by(masks, key=lambda m: m.bit_length())
    nodes = 0
    best = 0
    best_mask = 0

    def descend(v: int, chosen: int, size: int) -> None:
        nonlocal nodes, best, best_mask
        nodes += 1
        if nodes > node_budget:
            raise BudgetExceeded(best, _bits_to_set(n, best_mask), nodes)
        if size + v <= best:
            return
        if v == 0:
            best, best_mask = size, chosen
            return
        bit = 1 << (v - 1)
        grown = chosen | bit
        if all(m & ~grown for m in by_min.get(v, ())):
            descend(v - 1, grown, size + 1)
        descend(v - 1, chosen, size)

    descend(n, 0, 0)
    value = best

    canonical = True
    witness_mask = best_mask
    budget_left = node_budget  # the witness pass gets a fresh allowance

    def ascend(v: int, chosen: int, size: int) -> int:
        nonlocal nodes, budget_left
        nodes += 1
        budget_left -= 1
        if budget_left < 0:
            return -1
        if size == value:
            return chosen
        if v > n or size + (n - v + 1) < value:
            return 0
        bit = 1 << (v - 1)
        grown = chosen | bit
        if all(m & ~grown for m in by_max.get(v, ())):
            got = ascend(v + 1, grown, size + 1)
            if got:
                return got
        return ascend(v + 1, chosen, size)

    if value > 0:
        got = ascend(1, 0, 0)
        if got > 0:
            witness_mask = got
        else:
            canonical = False  # witness search out of budget; keep pass-1 set

    return ExactRecord(
        n, k, degree, value, _bits_to_set(n, witness_mask), nodes, canonical
    )


def exact_r_table(
    n_max: int, k: int, degree: int, *, node_budget: int = DEFAULT_NODE_BUDGET
) -> tuple[ExactRecord, ...]:
    """exact_r for every universe size 1..n_max."""
    return tuple(
        exact_r(n, k, degree, node_budget=node_budget)
        for n in range(1, n_max + 1)
    )
