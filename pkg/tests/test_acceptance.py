"""End-to-end acceptance checks, one test per shipping criterion.

Run with ``pytest tests/test_acceptance.py -v`` to get one pass/fail line per
criterion.  The heavyweight construction matrix is built once per session and
shared by the certification and coupling-window checks.
"""

import dataclasses
import math
import time

import mpmath
import numpy as np
import pytest

from progfree import (
    IntSet,
    R3_CONSTANT,
    build_behrend_set,
    build_torus_set,
    choose_z,
    corollary_bound,
    count_types,
    delta_formula,
    exact_r,
    exact_r_table,
    lemma1_bound,
    mc_annuli_volume,
    mu_sigma,
    rankin_driver,
    single_shell_config,
    theorem_bound,
)
from progfree.bounds import ball_volume_log
from progfree.constructions import AnnuliSpec

from oracles import lemma1_trials, oracle_exact_r

CERT_PAIRS = [(3, 1), (4, 1), (5, 1), (5, 2), (9, 1)]
CERT_SIZES = [10 ** 3, 10 ** 4, 10 ** 5]
CERT_SEEDS = range(5)


@pytest.fixture(scope="session")
def certification_matrix():
    """Recursive-driver runs over the full (k, degree) x N x seed grid."""
    start = time.perf_counter()
    runs = [
        rankin_driver(n, k, degree, seed)
        for k, degree in CERT_PAIRS
        for n in CERT_SIZES
        for seed in CERT_SEEDS
    ]
    return runs, time.perf_counter() - start


def test_criterion_01_exact_solver_matches_exhaustive_enumeration():
    start = time.perf_counter()
    for k in (3, 4, 5):
        for degree in (1, 2):
            for n in range(0, 17):
                assert exact_r(n, k, degree).value == oracle_exact_r(
                    n, k, degree
                ), (n, k, degree)
    table = tuple(r.value for r in exact_r_table(20, 3, 1))
    assert table == tuple(oracle_exact_r(n, 3, 1) for n in range(1, 21))
    assert table == (
        1, 2, 2, 3, 4, 4, 4, 4, 5, 5, 6, 6, 7, 8, 8, 8, 8, 8, 8, 9,
    )
    assert time.perf_counter() - start < 300


def test_criterion_02_constructions_certify_across_the_grid(
    certification_matrix,
):
    runs, elapsed = certification_matrix
    assert len(runs) == len(CERT_PAIRS) * len(CERT_SIZES) * len(CERT_SEEDS)
    uncertified = [
        (r.config.n, r.config.k, r.config.degree)
        for r in runs
        if not (r.certified and r.inner_verified)
    ]
    assert uncertified == []
    assert elapsed < 1800


def test_criterion_03_pre_removal_size_matches_volume_prediction():
    config = single_shell_config(10 ** 4, 3, 1, seed=0)
    mc = mc_annuli_volume(config.annuli, 10 ** 6, seed=123)
    box_fraction = 2.0 ** -(config.dim * config.degree)
    target = 10 ** 4 * mc.relative_volume * box_fraction

    sizes = [
        build_torus_set(dataclasses.replace(config, seed=s)).pre_removal_size
        for s in range(50)
    ]
    mean = float(np.mean(sizes))
    se_mean = float(np.std(sizes, ddof=1)) / math.sqrt(len(sizes))
    se_target = 10 ** 4 * box_fraction * mc.std_error
    combined = math.hypot(se_mean, se_target)
    assert abs(mean - target) <= 3 * combined, (mean, target, combined)


def test_criterion_04_scheduled_width_solves_the_mass_equation():
    rng = np.random.default_rng(2024)
    for _ in range(20):
        degree = int(rng.integers(1, 4))
        dim = int(rng.integers(1, 101))
        n = float(10.0 ** rng.uniform(2.0, 12.0))
        d = delta_formula(n, degree, dim)
        cap_f = 4 ** degree / math.comb(2 * degree, degree)
        _, sigma = mu_sigma(degree, dim)
        log_mass = (
            (degree + 1) * math.log(2.0)
            + math.log(n)
            + ball_volume_log(dim, math.sqrt(cap_f * sigma * d))
        )
        complement = 1.0 - math.exp(log_mass)
        assert abs(complement - dim / (dim + 2)) <= 1e-9, (n, degree, dim)


def test_criterion_05_inductive_levels_respect_the_coupling_window(
    certification_matrix,
):
    runs, _ = certification_matrix
    inductive_levels = 0
    for run in runs:
        for level in run.levels:
            cap = 2.0 ** (-2 * level["degree"])
            coupling = level["coupling"]
            assert coupling <= cap * (1 + 1e-12)
            if level["branch"] != "base":
                inductive_levels += 1
                assert cap / 4 * (1 - 1e-12) <= coupling
    assert inductive_levels > 0  # the window check must not be vacuous


def test_criterion_06_lead_coefficient_bound_survives_random_trials():
    total = 0
    for degree, trials in ((1, 4000), (2, 3000), (3, 3000)):
        for spread, lead in lemma1_trials(degree, trials, seed=degree):
            total += 1
            assert lead <= lemma1_bound(degree, spread), (degree, spread, lead)
    assert total == 10 ** 4
    for degree in (1, 2, 3, 4):
        assert lemma1_bound(degree, 0.0) == 0.0


def test_criterion_07_type_count_stays_below_the_closed_form_cap():
    start = time.perf_counter()
    for degree in (1, 2, 3):
        for k in range(degree + 2, 10):
            for n in range(1, 31):
                assert count_types(n, k, degree) <= 2 ** (degree + 1) * n * n - 1
    assert time.perf_counter() - start < 60


def test_criterion_08_high_dimension_volume_matches_gaussian_prediction():
    start = time.perf_counter()
    dim, delta = 1000, 0.01
    inner = IntSet(1, (1,))
    z = choose_z(inner, 1, 1, dim, delta, 100_000, seed=77)
    spec = AnnuliSpec(
        inner_set=inner, n0=1, degree=1, dim=dim, delta=delta, z=z
    )
    est = mc_annuli_volume(spec, 10 ** 6, seed=78)
    assert est.relative_volume >= 0.4 * delta
    gaussian = 2.0 / math.sqrt(2.0 * math.pi) * delta * math.exp(-z * z / 2.0)
    assert abs(est.relative_volume - gaussian) <= 3 * est.std_error
    assert time.perf_counter() - start < 120


def test_criterion_09_constants_and_degree_one_bounds_agree():
    mpmath.mp.dps = 50
    independent = float(
        mpmath.sqrt(360) / (mpmath.e * mpmath.pi ** mpmath.mpf("1.5"))
    )
    assert abs(R3_CONSTANT - independent) <= 1e-4

    for log_n in (2.0, 10.0, 64.0, 333.3, 4096.0):
        for k in (3, 4, 5, 9):
            thm = theorem_bound(log2_n=log_n, k=k, degree=1)
            cor = corollary_bound(log2_n=log_n, k=k)
            for a, b in (
                (thm.density, cor.density),
                (thm.exponent, cor.exponent),
            ):
                assert a == pytest.approx(b, rel=1e-12)
            assert thm == cor


def test_criterion_10_constructions_stay_below_exact_optima():
    # every certified construction at solvable sizes is bounded by the optimum
    for k, degree in CERT_PAIRS:
        for n in (8, 12, 16):
            optimum = exact_r(n, k, degree).value
            for seed in (0, 1):
                built = rankin_driver(n, k, degree, seed)
                if built.certified:
                    assert len(built.result) <= optimum, (n, k, degree, seed)
    digit = build_behrend_set(14, 2, 3)
    assert digit.certified and len(digit.result) <= exact_r(14, 3, 1).value

    # sanity floor: the interval-shell variant reaches half the optimum at
    # n=16 for at least one of twenty draws (seed 9 attains size 4 of 8)
    optimum = exact_r(16, 3, 1).value
    assert optimum == 8
    best = 0
    for seed in range(20):
        cfg = single_shell_config(16, 3, 1, seed, dim=1, delta=0.125)
        built = build_torus_set(cfg)
        assert built.certified
        best = max(best, len(built.result))
    assert best * 2 >= optimum, best
