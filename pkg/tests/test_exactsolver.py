import functools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from progfree import (
    BudgetExceeded,
    IntSet,
    exact_r,
    exact_r_table,
    find_progressions,
    forbidden_masks,
)

from oracles import oracle_exact_r, oracle_forbidden_masks, oracle_lex_min_witness

# the full n <= 16 sweep runs in the acceptance suite; this is the quick grid
SMALL_CASES = [
    (n, k, degree)
    for k, degree in ((3, 1), (4, 1), (5, 1), (5, 2))
    for n in (0, 1, 2, 3, 5, 8, 11)
]


def set_mask(members) -> int:
    out = 0
    for v in members:
        out |= 1 << (v - 1)
    return out


@functools.cache
def masks_for(n, k, degree):
    return tuple(forbidden_masks(n, k, degree))


class TestForbiddenMasks:
    @pytest.mark.parametrize("n,k,degree", [(8, 3, 1), (9, 4, 1), (10, 5, 2)])
    def test_kept_masks_are_the_minimal_oracle_masks(self, n, k, degree):
        oracle = oracle_forbidden_masks(n, k, degree)
        minimal = {
            m
            for m in oracle
            if not any(o != m and m & o == o for o in oracle)
        }
        assert set(forbidden_masks(n, k, degree)) == minimal

    def test_every_oracle_mask_is_covered(self):
        kept = forbidden_masks(10, 3, 1)
        for m in oracle_forbidden_masks(10, 3, 1):
            assert any(m & small == small for small in kept)

    def test_rejects_degenerate_windows(self):
        with pytest.raises(ValueError):
            forbidden_masks(10, 3, 0)
        with pytest.raises(ValueError):
            forbidden_masks(10, 3, 2)  # k < degree + 2

    @given(
        st.sampled_from([(3, 1), (4, 1), (4, 2), (5, 2)]),
        st.integers(4, 11),
        st.data(),
    )
    @settings(max_examples=60, deadline=None)
    def test_mask_avoidance_equals_detector_freeness(self, kd, n, data):
        k, degree = kd
        members = sorted(
            data.draw(st.sets(st.integers(1, n), max_size=n))
        )
        covered = any(
            set_mask(members) & m == m for m in masks_for(n, k, degree)
        )
        free = find_progressions(IntSet.from_iterable(n, members), k, degree) == []
        assert free == (not covered)


class TestExactR:
    @pytest.mark.parametrize("n,k,degree", SMALL_CASES)
    def test_agrees_with_full_enumeration(self, n, k, degree):
        record = exact_r(n, k, degree)
        assert record.value == oracle_exact_r(n, k, degree)

    def test_known_three_term_values(self):
        table = exact_r_table(20, 3, 1)
        assert tuple(r.value for r in table) == (
            1, 2, 2, 3, 4, 4, 4, 4, 5, 5, 6, 6, 7, 8, 8, 8, 8, 8, 8, 9,
        )

    @pytest.mark.parametrize("n,k,degree", SMALL_CASES)
    def test_witness_is_free_and_has_reported_size(self, n, k, degree):
        record = exact_r(n, k, degree)
        assert len(record.witness) == record.value
        assert record.witness.universe == n
        assert find_progressions(record.witness, k, degree) == []

    @pytest.mark.parametrize(
        "n,k,degree", [(7, 3, 1), (11, 3, 1), (9, 4, 1), (8, 5, 2)]
    )
    def test_witness_is_lexicographically_least(self, n, k, degree):
        record = exact_r(n, k, degree)
        assert record.canonical
        assert record.witness.members == oracle_lex_min_witness(n, k, degree)

    def test_table_grows_by_at_most_one(self):
        values = [r.value for r in exact_r_table(16, 4, 1)]
        for prev, cur in zip(values, values[1:]):
            assert prev <= cur <= prev + 1

    def test_two_value_sequences_block_even_windows(self):
        # (a, b, b, a) is a 4-term quadratic, so only singletons survive
        record = exact_r(10, 4, 2)
        assert record.value == 1
        assert record.witness.members == (1,)

    def test_five_term_quadratics_need_three_values(self):
        # a parabola hits each value at most twice: 2 values cover <= 4 terms
        assert exact_r(2, 5, 2).value == 2

    def test_short_window_shortcut(self):
        record = exact_r(10, 2, 1)
        assert record.value == 1 and record.witness.members == (1,)
        assert exact_r(10, 3, 2).value == 1

    def test_empty_universe(self):
        record = exact_r(0, 3, 1)
        assert record.value == 0 and record.witness.members == ()

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            exact_r(-1, 3, 1)
        with pytest.raises(ValueError):
            exact_r(5, 1, 1)
        with pytest.raises(ValueError):
            exact_r(5, 3, 0)


class TestBudget:
    def test_budget_exhaustion_carries_partial_result(self):
        with pytest.raises(BudgetExceeded) as info:
            exact_r(16, 3, 1, node_budget=5)
        err = info.value
        assert err.nodes == 6  # raises on the first node past the budget
        assert err.lower_bound == 0 and len(err.witness) == 0

    def test_partial_lower_bound_is_feasible(self):
        with pytest.raises(BudgetExceeded) as info:
            exact_r(16, 3, 1, node_budget=300)
        err = info.value
        assert 0 < err.lower_bound <= 8  # true optimum is 8
        assert len(err.witness) == err.lower_bound
        assert find_progressions(err.witness, 3, 1) == []

    def test_sufficient_budget_succeeds(self):
        record = exact_r(16, 3, 1)
        assert record.value == 8
        assert record.nodes <= 10 ** 6
