import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fdsrank.constructions import local_exact_count
from fdsrank.digraph import Digraph, alpha_p_flow
from fdsrank.errors import ResourceLimitError
from fdsrank.fds import Membership, essential_inputs, format_fds, materialize, membership
from fdsrank.sampling import (
    RejectionCapError,
    estimate_average_periodic_rank,
    estimate_average_rank,
    estimate_average_scaled_rank,
    sample_contained,
    sample_exact,
    trial_seed,
)

from conftest import digraphs


def test_empty_digraph_gives_constants():
    f = sample_contained(Digraph.empty(3), 2, 0)
    assert all(nb == () for nb in f.neighbourhoods)
    assert len(set(materialize(f).tolist())) == 1
    assert membership(f, Digraph.empty(3)) == Membership.EXACT
    assert format_fds(sample_exact(Digraph.empty(3), 2, 0)) == format_fds(f)


def test_fixed_seed_is_deterministic():
    D = Digraph.complete(3, loops=True)
    assert sample_contained(D, 3, 42) == sample_contained(D, 3, 42)
    assert sample_exact(D, 3, 42) == sample_exact(D, 3, 42)
    assert sample_contained(D, 3, 42) != sample_contained(D, 3, 43)


def test_contained_loop_is_uniform_over_unary_tables():
    counts = {}
    for seed in range(4000):
        t = tuple(sample_contained(Digraph.loops(1), 2, seed).tables[0].tolist())
        counts[t] = counts.get(t, 0) + 1
    assert set(counts) == {(0, 0), (0, 1), (1, 0), (1, 1)}
    assert all(abs(c - 1000) < 150 for c in counts.values())


def test_exact_loop_is_uniform_over_identity_and_negation():
    counts = {}
    for seed in range(2000):
        t = tuple(sample_exact(Digraph.loops(1), 2, seed).tables[0].tolist())
        counts[t] = counts.get(t, 0) + 1
    assert set(counts) == {(0, 1), (1, 0)}
    assert abs(counts[(0, 1)] - 1000) < 120


@settings(max_examples=80, deadline=None)
@given(digraphs(max_n=4), st.integers(2, 4), st.integers(0, 2**32))
def test_sample_exact_is_exact(D, q, seed):
    assert membership(sample_exact(D, q, seed), D) == Membership.EXACT


def test_acceptance_rate_on_clique_with_loops():
    # reported, not asserted as a law: the fraction of 2-input tables
    # essential in both inputs should be near 10/16
    rng = np.random.default_rng(0)
    draws = rng.integers(0, 2, size=(4000, 4))
    rate = np.mean([all(essential_inputs(2, 2, t)) for t in draws])
    print(f"empirical 2-input acceptance {rate:.4f} vs {local_exact_count(2, 2) / 16:.4f}")
    assert 0.55 < rate < 0.70


def test_rejection_cap():
    with pytest.raises(RejectionCapError):
        sample_exact(Digraph.loops(1), 2, 0, max_attempts=0)
    # vertices with no inputs accept the first draw
    sample_exact(Digraph.empty(2), 2, 0, max_attempts=1)


def test_table_guard(monkeypatch):
    monkeypatch.setenv("FDSRANK_STATE_LIMIT", "16")
    with pytest.raises(ResourceLimitError):
        sample_contained(Digraph.complete(3, loops=True), 3, 0)


def test_trial_seeds_differ_and_repeat():
    a = np.random.default_rng(trial_seed(1, 0)).integers(0, 2**62)
    b = np.random.default_rng(trial_seed(1, 1)).integers(0, 2**62)
    c = np.random.default_rng(trial_seed(1, 0)).integers(0, 2**62)
    assert a != b and a == c


def test_estimates_reproducible_and_worker_independent():
    D = Digraph.cycle(3)
    one = estimate_average_scaled_rank(D, 4, 40, seed=5)
    assert one == estimate_average_scaled_rank(D, 4, 40, seed=5)
    assert one == estimate_average_scaled_rank(D, 4, 40, seed=5, workers=2)
    assert one != estimate_average_scaled_rank(D, 4, 40, seed=6)


def test_single_trial_has_zero_stderr():
    # loops only, q = 2: the only exact systems are products of x and not-x
    est = estimate_average_rank(Digraph.loops(3), 2, 1, seed=9)
    assert est.mean == 8 and est.stderr == 0.0
    with pytest.raises(ValueError):
        estimate_average_rank(Digraph.loops(3), 2, 0, seed=9)


def test_scaled_rank_never_exceeds_alpha():
    D = Digraph(4, frozenset({(1, 2), (2, 1), (3, 1), (4, 3), (4, 4)}))
    est = estimate_average_scaled_rank(D, 3, 200, seed=1)
    assert est.mean <= alpha_p_flow(D, 1)


def test_single_loop_average_image():
    eps = 1 - math.exp(-1)
    r = estimate_average_rank(Digraph.loops(1), 256, 2000, seed=3).mean / 256
    assert abs(r - eps) <= 0.01


def test_two_loops_average_image():
    eps2 = (1 - math.exp(-1)) ** 2
    r = estimate_average_rank(Digraph.loops(2), 64, 2000, seed=4).mean / 64**2
    assert abs(r - eps2) <= 0.03 * eps2


def test_two_cycle_scaled_rank_approaches_alpha():
    means = [estimate_average_scaled_rank(Digraph.cycle(2), q, 300, seed=11).mean for q in (4, 8, 16, 32, 64)]
    print("2-cycle mean scaled rank:", [round(m, 4) for m in means])
    assert all(a < b for a, b in zip(means, means[1:]))
    assert means[-1] > 2 - 0.25


def test_periodic_rank_single_loop():
    target = math.sqrt(math.pi * 100 / 2)
    per = estimate_average_periodic_rank(Digraph.loops(1), 100, 2000, seed=8).mean
    assert abs(per - target) <= 0.15 * target


def test_periodic_rank_clique_with_loops():
    target = math.sqrt(math.pi * 1024 / 2)
    per = estimate_average_periodic_rank(Digraph.complete(2, loops=True), 32, 500, seed=8).mean
    assert abs(per - target) <= 0.15 * target
