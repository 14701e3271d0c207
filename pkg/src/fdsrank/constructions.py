"""Extremal systems with prescribed interaction graphs, and exhaustive
checks of the cases where no such system exists."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .digraph import (
    Digraph,
    WalkFamily,
    alpha_p_flow,
    cycle_path_family,
    scc_summary,
    shortest_cycle_through,
)
from .errors import ConstructionError, InputError, ResourceLimitError
from .fds import (
    Fds,
    Schedule,
    assignments,
    check_state_space,
    classify_schedule,
    essential_inputs,
    periodic_rank,
)
from .galois import Gf2mField, gf2m_matrix_det

DEFAULT_RETRIES = 64
ENUMERATION_BUDGET = 10**6


def _unique_predecessors(walks: WalkFamily) -> dict[int, int]:
    pred = {}
    for v, us in walks.predecessors().items():
        if len(us) != 1:
            raise ConstructionError(f"vertex {v} follows several vertices {sorted(us)} in the walk family")
        pred[v] = next(iter(us))
    return pred


def copy_walk_fds(D: Digraph, p: int, walks: WalkFamily) -> Fds:
    """Boolean system where each walk vertex copies its predecessor and all
    other vertices are constant 0. ``f^p`` has rank ``2^len(walks)``."""
    if walks.p != p:
        raise InputError(f"walk family has length {walks.p}, expected {p}")
    walks.validate(D)
    pred = _unique_predecessors(walks)
    nbrs, tables = [], []
    for v in D.vertices:
        if v in pred:
            nbrs.append((pred[v],))
            tables.append([0, 1])
        else:
            nbrs.append(())
            tables.append([0])
    return Fds(2, nbrs, tables)


def red_light_fds(D: Digraph, q: int, p: int, walks: WalkFamily) -> Fds:
    """System over ``q >= 3`` letters with interaction graph exactly ``D``.

    A walk vertex copies its predecessor unless every other in-neighbour
    shows 2 and the predecessor shows 0 or 1, in which case it flips that
    bit. A vertex off the walks (from position 1 on) outputs 1 iff all its
    in-neighbours show 1; with no in-neighbours that is the constant 1.
    """
    if q < 3:
        raise InputError(f"red-light construction needs q >= 3, got {q}")
    if walks.p != p:
        raise InputError(f"walk family has length {walks.p}, expected {p}")
    walks.validate(D)
    pred = _unique_predecessors(walks)
    for u, vs in walks.successors().items():
        if len(vs) != 1:
            raise ConstructionError(f"vertex {u} precedes several vertices {sorted(vs)} in the walk family")

    def rule(v: int, X: np.ndarray) -> np.ndarray:
        nb = D.in_lists[v - 1]
        if v not in pred:
            return np.all(X == 1, axis=1).astype(np.int64)
        j = nb.index(pred[v])
        xw = X[:, j]
        others = np.delete(X, j, axis=1)
        flip = (xw <= 1) & np.all(others == 2, axis=1)
        return np.where(flip, 1 - xw, xw)

    return Fds.from_rules(q, D.in_lists, rule)


# -- complete digraphs over {0, 1} ----------------------------------------------------


def _kn_map(X: np.ndarray) -> np.ndarray:
    """Boolean permutation of {0,1}^n with interaction graph K_n, applied
    row-wise to a 0/1 array of shape (states, n)."""
    n = X.shape[1]
    if n % 2 == 0:
        return (X.sum(axis=1, keepdims=True) - X) % 2
    if n == 5:
        Y = np.empty_like(X)
        rotate = (X[:, 3] == X[:, 4])[:, None]
        Y[:, :3] = np.where(rotate, X[:, [2, 0, 1]], X[:, [1, 2, 0]])
        head_zero = np.all(X[:, :3] == 0, axis=1)[:, None]
        swapped = X[:, [4, 3]]
        Y[:, 3:] = np.where(head_zero, swapped, 1 - swapped)
        return Y
    Y = np.empty_like(X)
    g = _kn_map(X[:, : n - 2])
    tail_equal = (X[:, n - 2] == X[:, n - 1])[:, None]
    Y[:, : n - 2] = np.where(tail_equal, g, 1 - g)
    head_zero = np.all(X[:, : n - 2] == 0, axis=1)[:, None]
    swapped = X[:, [n - 1, n - 2]]
    Y[:, n - 2 :] = np.where(head_zero, swapped, 1 - swapped)
    return Y


def kn_boolean(n: int) -> Fds:
    """A Boolean permutation whose interaction graph is the loopless complete
    digraph ``K_n`` (``n >= 2``, ``n != 3``): the map ``(J - I)x`` over GF(2)
    for even ``n``; for odd ``n`` a fixed 5-vertex permutation lifted two
    coordinates at a time."""
    if n < 2 or n == 3:
        raise InputError(f"no Boolean permutation with interaction graph K_{n} is constructed for n = {n}")
    check_state_space(2, n - 1)
    nbrs = [tuple(u for u in range(1, n + 1) if u != v) for v in range(1, n + 1)]

    def rule(v: int, X: np.ndarray) -> np.ndarray:
        full = np.insert(X, v - 1, 0, axis=1)
        return _kn_map(full)[:, v - 1]

    return Fds.from_rules(2, nbrs, rule)


def clique_loops_transposition(n: int) -> Fds:
    """Boolean system on the complete digraph with loops that swaps the
    all-zero and all-one states and fixes every other state."""
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    check_state_space(2, n)
    nbrs = [tuple(range(1, n + 1))] * n

    def rule(v: int, X: np.ndarray) -> np.ndarray:
        constant = np.all(X == X[:, :1], axis=1)
        return np.where(constant, 1 - X[:, v - 1], X[:, v - 1])

    return Fds.from_rules(2, nbrs, rule)


# -- complete schedules ------------------------------------------------------------------


def covering_cycles(D: Digraph) -> list[tuple[int, ...]]:
    """Cycles covering every vertex that lies on some cycle: a maximum
    vertex-disjoint family first, then a shortest cycle through each vertex
    still uncovered (these may overlap earlier ones)."""
    cycles, _ = cycle_path_family(D, D.n)
    covered = set().union(*cycles) if cycles else set()
    trivial = scc_summary(D).trivial
    for v in D.vertices:
        if v in covered or v in trivial:
            continue
        c = shortest_cycle_through(D, v)
        if c is None:  # pragma: no cover - non-trivial component implies a cycle
            raise AssertionError(f"vertex {v} is in a non-trivial component without a cycle")
        cycles.append(c)
        covered.update(c)
    return cycles


@dataclass
class CompleteScheduleSystem:
    fds: Fds
    schedule: Schedule
    cycles: list[tuple[int, ...]]
    acyclic: frozenset[int]
    weights: dict[tuple[int, int], int]
    sentinel: int | None
    attempts: int
    field: Gf2mField = field(repr=False)


def _cycle_block_matrix(cycle: tuple[int, ...], weights: dict[tuple[int, int], int]) -> list[list[int]]:
    vs = sorted(cycle)
    return [[weights.get((u, v), 0) for u in vs] for v in vs]


def complete_schedule_system(
    D: Digraph, m: int, seed: int, retries: int = DEFAULT_RETRIES
) -> CompleteScheduleSystem:
    """Linear system over GF(2^m) on the cyclic part of ``D`` plus a sentinel
    letter ``2^m`` that poisons everything downstream, run under the
    complete schedule (acyclic vertices, C_1, ..., C_k).

    Arc weights are drawn uniformly from the nonzero field elements and
    redrawn until the weight matrix restricted to every covering cycle is
    nonsingular. With no acyclic vertices the sentinel is dropped and the
    alphabet is GF(2^m) itself.
    """
    if not 2 <= m <= 16:
        raise InputError(f"field degree m must be in 2..16, got {m}")
    F = Gf2mField(m)
    rng = np.random.default_rng(seed)
    acyclic = scc_summary(D).trivial
    cycles = covering_cycles(D)
    arcs = D.sorted_arcs()
    for attempt in range(1, retries + 1):
        draws = rng.integers(1, F.order, size=len(arcs))
        weights = {a: int(w) for a, w in zip(arcs, draws)}
        if all(gf2m_matrix_det(F, _cycle_block_matrix(c, weights)) for c in cycles):
            break
    else:
        raise ConstructionError(
            f"no nonsingular cycle weights after {retries} draws (seed {seed}, m = {m}); "
            "retry with another seed or a larger field"
        )

    sentinel = F.order if acyclic else None
    q = F.order + 1 if acyclic else F.order

    def rule(v: int, X: np.ndarray) -> np.ndarray:
        nb = D.in_lists[v - 1]
        if sentinel is not None:
            poisoned = np.any(X == sentinel, axis=1)
            X = np.where(X == sentinel, 0, X)
        out = np.zeros(len(X), dtype=np.int64)
        if v not in acyclic:
            for j, u in enumerate(nb):
                out ^= F.mul_array(weights[(u, v)], X[:, j])
        if sentinel is not None:
            out = np.where(poisoned, sentinel, out)
        return out

    f = Fds.from_rules(q, D.in_lists, rule)
    blocks = ([acyclic] if acyclic else []) + [frozenset(c) for c in cycles]
    return CompleteScheduleSystem(f, Schedule(tuple(blocks)), cycles, acyclic, weights, sentinel, attempt, F)


def complete_schedule_fds(D: Digraph, m: int, seed: int, retries: int = DEFAULT_RETRIES) -> tuple[Fds, Schedule]:
    built = complete_schedule_system(D, m, seed, retries)
    return built.fds, built.schedule


def invariant_states(built: CompleteScheduleSystem) -> np.ndarray:
    """States with field letters everywhere and 0 on the acyclic vertices."""
    f = built.fds
    n = f.n
    letters = built.field.order
    free = [v for v in range(1, n + 1) if v not in built.acyclic]
    X = assignments(letters, len(free))
    weights = f.q ** (np.array(free, dtype=np.int64) - 1)
    return X @ weights if free else np.zeros(1, dtype=np.int64)


@dataclass(frozen=True)
class CompleteScheduleReport:
    complete: bool
    invariant_size: int
    closed: bool
    injective: bool
    periodic_rank: int
    bound: int

    @property
    def ok(self) -> bool:
        return self.complete and self.closed and self.injective and self.periodic_rank >= self.bound


def check_complete_schedule(built: CompleteScheduleSystem, T: np.ndarray) -> CompleteScheduleReport:
    """Check that the scheduled map ``T`` permutes the invariant state set."""
    X = invariant_states(built)
    image = T[X]
    closed = bool(np.isin(image, X).all())
    injective = np.unique(image).size == X.size
    return CompleteScheduleReport(
        complete=classify_schedule(built.schedule, built.fds.n).complete,
        invariant_size=int(X.size),
        closed=closed,
        injective=bool(injective),
        periodic_rank=periodic_rank(T),
        bound=built.field.order ** (built.fds.n - len(built.acyclic)),
    )


# -- exhaustive search over F[D, q] ------------------------------------------------------


def essential_tables(q: int, k: int) -> np.ndarray:
    """All tables ``[q]^k -> [q]`` depending on each of their ``k`` inputs."""
    count = q ** (q**k)
    if count > ENUMERATION_BUDGET:
        raise ResourceLimitError(f"{count} local functions of arity {k} over {q} letters")
    tables = assignments(q, q**k)
    keep = [i for i, t in enumerate(tables) if all(essential_inputs(q, k, t))]
    return tables[keep]


def exact_systems_maps(D: Digraph, q: int = 2, budget: int = ENUMERATION_BUDGET) -> np.ndarray:
    """Transition maps of every system with interaction graph exactly ``D``,
    one row per system."""
    size = check_state_space(q, D.n)
    states = np.arange(size, dtype=np.int64)
    per_vertex = []
    total = 1
    for v in D.vertices:
        nb = D.in_lists[v - 1]
        tabs = essential_tables(q, len(nb))
        idx = np.zeros(size, dtype=np.int64)
        for j, u in enumerate(nb):
            idx += (states // q ** (u - 1) % q) * q**j
        per_vertex.append(tabs[:, idx] * q ** (v - 1))
        total *= len(tabs)
    if total > budget:
        raise ResourceLimitError(f"{total} systems exceed the enumeration budget")
    maps = np.zeros((1, size), dtype=np.int64)
    for L in per_vertex:
        maps = (maps[:, None, :] + L[None, :, :]).reshape(-1, size)
    return maps


def _row_ranks(maps: np.ndarray) -> np.ndarray:
    s = np.sort(maps, axis=1)
    return (np.diff(s, axis=1) != 0).sum(axis=1) + 1


def max_ranks_of_iterates(maps: np.ndarray, ps) -> dict[int, int]:
    """For each ``p`` in ``ps``, the largest rank of ``f^p`` over the rows."""
    ps = sorted(ps)
    out = {}
    current = maps
    done = 1
    for p in ps:
        while done < p:
            current = np.take_along_axis(maps, current, axis=1)
            done += 1
        out[p] = int(_row_ranks(current).max()) if len(current) else 0
    return out


@dataclass(frozen=True)
class Degree2Report:
    n: int
    systems: int
    max_rank: dict[int, int]
    bound: dict[int, int]

    @property
    def strict(self) -> bool:
        return all(self.max_rank[p] < self.bound[p] for p in self.max_rank)

    def lines(self) -> list[str]:
        out = [f"systems {self.systems}"]
        for p in sorted(self.max_rank):
            out.append(f"p {p}: max rank {self.max_rank[p]} < {self.bound[p]}: {self.max_rank[p] < self.bound[p]}")
        return out


def degree2_obstruction_check(D: Digraph) -> Degree2Report:
    """Largest rank of ``f^p`` over all Boolean systems with interaction
    graph exactly ``D`` (every in-degree 2, perfect 1-walk packing)."""
    for v in D.vertices:
        if D.in_degree(v) != 2:
            raise InputError(f"vertex {v} has in-degree {D.in_degree(v)}, expected 2")
    if alpha_p_flow(D, 1) != D.n:
        raise InputError("digraph has no perfect packing of independent arcs")
    if D.n > 5:
        raise ResourceLimitError(f"10^{D.n} systems is beyond the enumeration budget (n <= 5)")
    maps = exact_systems_maps(D, 2)
    ps = range(1, D.n + 1)
    return Degree2Report(
        n=D.n,
        systems=len(maps),
        max_rank=max_ranks_of_iterates(maps, ps),
        bound={p: 2 ** alpha_p_flow(D, p) for p in ps},
    )


def count_exact_permutations(D: Digraph, q: int = 2) -> int:
    maps = exact_systems_maps(D, q)
    return int((_row_ranks(maps) == maps.shape[1]).sum())


def local_exact_count(q: int, k: int) -> int:
    """Number of functions ``[q]^k -> [q]`` depending on all ``k`` inputs,
    by inclusion-exclusion over the set of inputs actually used."""
    return sum((-1) ** (k - j) * comb(k, j) * q ** (q**j) for j in range(k + 1))
