"""Named verification suites, runnable from ``fdsrank verify`` and pytest.

Each suite returns a :class:`CriterionResult`; a suite passes only if every
check holds and it finishes inside its time budget.
"""

from __future__ import annotations

import functools
import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .constructions import (
    check_complete_schedule,
    complete_schedule_system,
    copy_walk_fds,
    count_exact_permutations,
    degree2_obstruction_check,
    kn_boolean,
    red_light_fds,
)
from .digraph import (
    Digraph,
    all_digraphs,
    alpha_p_bruteforce,
    alpha_p_flow,
    edmonds_alpha1,
    random_digraph,
    walk_certificate,
)
from .fds import (
    Membership,
    apply_schedule,
    interaction_graph,
    is_permutation,
    iterate,
    materialize,
    membership,
    periodic_points,
    random_block_sequential,
    rank,
)
from .sampling import (
    estimate_average_periodic_rank,
    estimate_average_rank,
    sample_contained,
    sample_exact,
)

SEED = 20160519


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    ok: bool
    detail: str
    seconds: float
    limit: float

    @property
    def passed(self) -> bool:
        return self.ok and self.seconds <= self.limit

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.number:2d} {self.name:<18} {self.seconds:7.2f}s/{self.limit:g}s  {self.detail}"


def labelled_digraphs(n: int) -> list[Digraph]:
    return list(all_digraphs(n, up_to_isomorphism=False))


@functools.lru_cache(maxsize=None)
def small_suite() -> tuple[Digraph, ...]:
    """One digraph per isomorphism class on at most 4 vertices."""
    return tuple(D for n in range(1, 5) for D in all_digraphs(n))


@functools.lru_cache(maxsize=None)
def _certificate(D: Digraph, p: int):
    return walk_certificate(D, p)


def functional_graph_cycles(T) -> set[int]:
    """States lying on cycles of ``x -> T[x]``, by walking from every state
    and colouring: a walk that meets its own trail closes a cycle."""
    T = [int(t) for t in T]
    state = [0] * len(T)  # 0 unseen, 1 on current trail, 2 finished
    cyclic: set[int] = set()
    for start in range(len(T)):
        trail = []
        x = start
        while state[x] == 0:
            state[x] = 1
            trail.append(x)
            x = T[x]
        if state[x] == 1:
            cyclic.update(trail[trail.index(x) :])
        for y in trail:
            state[y] = 2
    return cyclic


# -- criteria ---------------------------------------------------------------------------


def flow_oracle() -> tuple[bool, str]:
    checked = mismatches = 0
    for n in range(1, 4):
        for D in labelled_digraphs(n):
            for p in (1, 2, 3):
                checked += 1
                mismatches += alpha_p_flow(D, p) != alpha_p_bruteforce(D, p)
    rng = np.random.default_rng(SEED)
    for _ in range(500):
        D = random_digraph(int(rng.integers(4, 7)), rng)
        for p in range(1, D.n + 1):
            checked += 1
            mismatches += alpha_p_flow(D, p) != alpha_p_bruteforce(D, p)
    return mismatches == 0, f"{checked} (D, p) pairs, {mismatches} mismatches"


def edmonds() -> tuple[bool, str]:
    rng = np.random.default_rng(SEED + 1)
    mismatches = 0
    for _ in range(1000):
        D = random_digraph(int(rng.integers(1, 7)), rng)
        mismatches += alpha_p_flow(D, 1) != edmonds_alpha1(D)
    return mismatches == 0, f"1000 digraphs, {mismatches} mismatches"


def upper_bound() -> tuple[bool, str]:
    rng = np.random.default_rng(SEED + 2)
    violations = 0
    for _ in range(200):
        D = random_digraph(int(rng.integers(1, 5)), rng)
        q = int(rng.choice([2, 3]))
        T = materialize(sample_contained(D, q, rng))
        for p in range(1, 6):
            violations += rank(iterate(T, p)) > q ** alpha_p_flow(D, p)
    return violations == 0, f"200 systems x 5 iterates, {violations} violations"


def copy_attainment() -> tuple[bool, str]:
    cases = failures = 0
    for D in small_suite():
        if not D.arcs:
            continue
        for p in range(1, 5):
            cases += 1
            f = copy_walk_fds(D, p, _certificate(D, p))
            T = materialize(f)
            good = rank(iterate(T, p)) == 2 ** alpha_p_flow(D, p) and membership(f, D) != Membership.NEITHER
            failures += not good
    return failures == 0, f"{cases} (D, p) cases, {failures} failures"


def red_light_attainment() -> tuple[bool, str]:
    cases = failures = flagged = 0
    for D in small_suite():
        if not D.arcs:
            continue
        has_source = any(not nb for nb in D.in_lists)
        for p in range(1, 5):
            walks = _certificate(D, p)
            for q in (3, 4):
                cases += 1
                f = red_light_fds(D, q, p, walks)
                if rank(iterate(materialize(f), p)) != q ** alpha_p_flow(D, p):
                    failures += 1
                elif interaction_graph(f) != D:
                    if has_source:
                        flagged += 1
                    else:
                        failures += 1
    return failures == 0, f"{cases} (D, p, q) cases, {failures} failures, {flagged} flagged source cases"


def kn_permutations() -> tuple[bool, str]:
    bad = []
    for n in (2, 4, 5, 6, 7):
        f = kn_boolean(n)
        if not (is_permutation(materialize(f)) and interaction_graph(f) == Digraph.complete(n)):
            bad.append(n)
    k3 = count_exact_permutations(Digraph.complete(3))
    return not bad and k3 == 0, f"K_n failures {bad}; permutations in F[K_3, 2]: {k3}"


def block_sequential_bound() -> tuple[bool, str]:
    rng = np.random.default_rng(SEED + 3)
    violations = 0
    for _ in range(500):
        D = random_digraph(int(rng.integers(1, 5)), rng)
        q = int(rng.choice([2, 3]))
        f = sample_exact(D, q, rng)
        sigma = random_block_sequential(D.n, rng)
        violations += rank(apply_schedule(f, sigma)) > q ** alpha_p_flow(D, 1)
    return violations == 0, f"500 triples, {violations} violations"


def complete_schedule() -> tuple[bool, str]:
    failures = permutations = bounded = 0
    for D in small_suite():
        built = complete_schedule_system(D, 2, seed=SEED)
        T = apply_schedule(built.fds, built.schedule)
        report = check_complete_schedule(built, T)
        if not built.acyclic:
            ok = report.ok and is_permutation(T)
            permutations += ok
        else:
            ok = report.ok
            bounded += ok
        failures += not ok
    return failures == 0, (
        f"{len(small_suite())} digraphs: {permutations} permutations (T = 0), "
        f"{bounded} periodic bounds (T > 0), {failures} failures"
    )


def degree2() -> tuple[bool, str]:
    details = []
    ok = True
    cycle_loops = Digraph(4, Digraph.cycle(4).arcs | Digraph.loops(4).arcs)
    for label, D in (("bidirected C4", Digraph.bidirected_cycle(4)), ("C4 + loops", cycle_loops)):
        report = degree2_obstruction_check(D)
        worst = max(report.max_rank.values())
        ok &= report.systems == 10**4 and worst <= 2**4 - 1 and set(report.max_rank) == {1, 2, 3, 4}
        details.append(f"{label}: max rank {worst} over {report.systems}")
    return ok, "; ".join(details)


def averages() -> tuple[bool, str]:
    eps = 1 - math.exp(-1)
    r1 = estimate_average_rank(Digraph.loops(1), 256, 2000, SEED).mean / 256
    r2 = estimate_average_rank(Digraph.loops(2), 64, 2000, SEED).mean / 64**2
    target = math.sqrt(math.pi * 1024 / 2)
    per = estimate_average_periodic_rank(Digraph.complete(2, loops=True), 32, 500, SEED).mean
    ok1 = abs(r1 - eps) <= 0.01
    ok2 = abs(r2 - eps**2) <= 0.03 * eps**2
    ok3 = abs(per - target) <= 0.15 * target
    return ok1 and ok2 and ok3, (
        f"K1 loop {r1:.4f} vs {eps:.4f}; two loops {r2:.4f} vs {eps ** 2:.4f}; "
        f"periodic {per:.2f} vs {target:.2f}"
    )


def periodic_oracle() -> tuple[bool, str]:
    rng = np.random.default_rng(SEED + 4)
    mismatches = 0
    for _ in range(300):
        q = int(rng.choice([2, 3]))
        n = int(rng.integers(1, 7 if q == 2 else 5))
        if rng.random() < 0.5:
            T = rng.integers(0, q**n, size=q**n)
        else:
            T = materialize(sample_contained(random_digraph(n, rng), q, rng))
        mismatches += set(periodic_points(T).tolist()) != functional_graph_cycles(T)
    return mismatches == 0, f"300 maps, {mismatches} mismatches"


SUITES: dict[str, tuple[int, Callable[[], tuple[bool, str]], float]] = {
    "flow-oracle": (1, flow_oracle, 120),
    "edmonds": (2, edmonds, 30),
    "upper-bound": (3, upper_bound, 120),
    "copy": (4, copy_attainment, 120),
    "red-light": (5, red_light_attainment, 180),
    "kn": (6, kn_permutations, 60),
    "block-sequential": (7, block_sequential_bound, 120),
    "complete-schedule": (8, complete_schedule, 120),
    "degree2": (9, degree2, 60),
    "averages": (10, averages, 180),
    "periodic-oracle": (11, periodic_oracle, 10),
}


def run_suite(name: str) -> CriterionResult:
    number, check, limit = SUITES[name]
    start = time.perf_counter()
    ok, detail = check()
    return CriterionResult(number, name, bool(ok), detail, time.perf_counter() - start, limit)


def suite_names(name: str) -> list[str]:
    if name == "all":
        return list(SUITES)
    if name not in SUITES:
        raise KeyError(name)
    return [name]
