"""Uniform random systems with a given interaction graph and Monte-Carlo
estimates of their average rank and periodic rank."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import NamedTuple

import numpy as np

from .digraph import Digraph, alpha_p_flow
from .errors import FdsRankError, ResourceLimitError
from .fds import Fds, essential_inputs, materialize, periodic_rank, rank, scaled, state_limit

DEFAULT_REJECTION_CAP = 10_000


class Estimate(NamedTuple):
    mean: float
    stderr: float


class RejectionCapError(FdsRankError):
    """Rejection sampling gave up before drawing an exact system."""


def trial_seed(seed: int, trial: int) -> np.random.SeedSequence:
    """Seed of trial ``trial`` under master seed ``seed``; numpy's
    SeedSequence hashes the pair, so any worker split gives the same draws."""
    return np.random.SeedSequence([int(seed), int(trial)])


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _check_tables(D: Digraph, q: int) -> None:
    limit = state_limit()
    for v in D.vertices:
        size = q ** D.in_degree(v)
        if size > limit:
            raise ResourceLimitError(f"table of vertex {v} would have {size} entries (limit {limit})")


def sample_contained(D: Digraph, q: int, seed) -> Fds:
    """Uniform over systems whose interaction graph is contained in ``D``:
    every table entry over the in-neighbourhoods is an independent uniform letter."""
    _check_tables(D, q)
    rng = _rng(seed)
    tables = [rng.integers(0, q, size=q ** len(nb)) for nb in D.in_lists]
    return Fds(q, D.in_lists, tables)


def sample_exact(D: Digraph, q: int, seed, max_attempts: int = DEFAULT_REJECTION_CAP) -> Fds:
    """Uniform over systems whose interaction graph is exactly ``D``.

    Rejection is done vertex by vertex: a table is redrawn until it depends
    on every in-neighbour. Vertices are independent, so this is the same
    distribution as rejecting whole systems, at a fraction of the cost.
    """
    _check_tables(D, q)
    rng = _rng(seed)
    tables = []
    for v, nb in enumerate(D.in_lists, start=1):
        for _ in range(max_attempts):
            tab = rng.integers(0, q, size=q ** len(nb))
            if all(essential_inputs(q, len(nb), tab)):
                tables.append(tab)
                break
        else:
            raise RejectionCapError(
                f"vertex {v}: no table depending on all {len(nb)} inputs in {max_attempts} draws (q = {q})"
            )
    return Fds(q, D.in_lists, tables)


def _trial(args) -> tuple[int, int]:
    D, q, seed, trial, bound, want_periodic = args
    f = sample_exact(D, q, trial_seed(seed, trial))
    T = materialize(f)
    r = rank(T)
    if r > bound:
        raise AssertionError(f"trial {trial}: rank {r} exceeds q^alpha_1 = {bound}")
    return r, periodic_rank(T) if want_periodic else -1


def _run(D: Digraph, q: int, trials: int, seed: int, periodic: bool, workers: int) -> list[tuple[int, int]]:
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    bound = q ** alpha_p_flow(D, 1)
    jobs = [(D, q, seed, i, bound, periodic) for i in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_trial, jobs, chunksize=max(1, trials // (4 * workers))))
    return [_trial(job) for job in jobs]


def _summarize(values) -> Estimate:
    a = np.asarray(values, dtype=float)
    if a.size == 1:
        return Estimate(float(a[0]), 0.0)
    # summation in trial order keeps results reproducible
    mean = float(np.add.reduce(a) / a.size)
    stderr = float(np.std(a, ddof=1) / np.sqrt(a.size))
    return Estimate(mean, stderr)


def estimate_average_rank(D: Digraph, q: int, trials: int, seed: int, workers: int = 1) -> Estimate:
    """Mean ``|Im f|`` over uniform draws from systems with interaction graph ``D``."""
    return _summarize([r for r, _ in _run(D, q, trials, seed, False, workers)])


def estimate_average_scaled_rank(D: Digraph, q: int, trials: int, seed: int, workers: int = 1) -> Estimate:
    """Mean ``log_q |Im f|``; each draw is checked against ``q^alpha_1(D)``."""
    return _summarize([float(scaled(r, q)) for r, _ in _run(D, q, trials, seed, False, workers)])


def estimate_average_periodic_rank(D: Digraph, q: int, trials: int, seed: int, workers: int = 1) -> Estimate:
    """Mean number of periodic points. Exploration only: no limit law is claimed."""
    return _summarize([per for _, per in _run(D, q, trials, seed, True, workers)])
