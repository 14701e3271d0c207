"""Finite dynamical systems over ``[q] = {0, ..., q-1}``.

A system on ``n`` vertices is stored as one lookup table per vertex over its
declared neighbourhood. States are integers in ``[0, q^n)``, little-endian
mixed radix: vertex 1 is the least significant digit. Table indices use the
same convention over the neighbourhood (first listed neighbour least
significant).

Whole-system questions (rank, periodic points, schedules) work on
materialized transition maps: int64 arrays ``T`` with ``T[x] = f(x)``.
"""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .digraph import Digraph
from .errors import InputError, ResourceLimitError

DEFAULT_STATE_LIMIT = 1 << 22


def state_limit() -> int:
    """Largest ``q^n`` that may be materialized; ``FDSRANK_STATE_LIMIT`` overrides."""
    raw = os.environ.get("FDSRANK_STATE_LIMIT")
    if raw is None:
        return DEFAULT_STATE_LIMIT
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"FDSRANK_STATE_LIMIT must be an integer, got {raw!r}") from None


def check_state_space(q: int, n: int) -> int:
    size = q**n
    limit = state_limit()
    if size > limit:
        raise ResourceLimitError(f"state space q^n = {q}^{n} = {size} exceeds limit {limit}")
    return size


class Fds:
    """A finite dynamical system given by local lookup tables.

    ``neighbourhoods[v - 1]`` is the ascending tuple of vertices read by
    ``f_v``; ``tables[v - 1]`` has length ``q ** len(neighbourhoods[v - 1])``.
    """

    def __init__(self, q: int, neighbourhoods: Sequence[Sequence[int]], tables: Sequence[Sequence[int]]):
        if q < 2:
            raise InputError(f"alphabet size must be >= 2, got {q}")
        if len(neighbourhoods) != len(tables):
            raise InputError("need exactly one table per neighbourhood")
        n = len(neighbourhoods)
        if n < 1:
            raise InputError("a system needs at least one vertex")
        nbrs = []
        tabs = []
        for v, (nb, tab) in enumerate(zip(neighbourhoods, tables), start=1):
            nb = tuple(int(u) for u in nb)
            if list(nb) != sorted(set(nb)):
                raise InputError(f"neighbourhood of {v} must be strictly ascending, got {nb}")
            if nb and not (1 <= nb[0] and nb[-1] <= n):
                raise InputError(f"neighbourhood of {v} leaves 1..{n}")
            tab = np.array(tab, dtype=np.int64)
            if tab.ndim != 1 or len(tab) != q ** len(nb):
                raise InputError(f"table of {v} has length {tab.size}, expected {q ** len(nb)}")
            if tab.size and (tab.min() < 0 or tab.max() >= q):
                raise InputError(f"table of {v} has entries outside [0, {q})")
            tab.setflags(write=False)
            nbrs.append(nb)
            tabs.append(tab)
        self.q = int(q)
        self.n = n
        self.neighbourhoods: tuple[tuple[int, ...], ...] = tuple(nbrs)
        self.tables: tuple[np.ndarray, ...] = tuple(tabs)

    @classmethod
    def from_rules(
        cls,
        q: int,
        neighbourhoods: Sequence[Sequence[int]],
        rule: Callable[[int, np.ndarray], np.ndarray],
    ) -> "Fds":
        """Tabulate ``rule(v, X)``, where ``X`` has one row per neighbourhood
        assignment of ``v`` (columns in neighbourhood order) in table order."""
        tables = []
        for v, nb in enumerate(neighbourhoods, start=1):
            tables.append(np.asarray(rule(v, assignments(q, len(nb))), dtype=np.int64))
        return cls(q, neighbourhoods, tables)

    @classmethod
    def from_global_map(cls, q: int, n: int, T: np.ndarray, neighbourhoods: Sequence[Sequence[int]]) -> "Fds":
        """Read local tables off a full transition map whose ``v``-th
        coordinate only depends on ``neighbourhoods[v - 1]``."""
        T = np.asarray(T, dtype=np.int64)
        tables = []
        for v, nb in enumerate(neighbourhoods, start=1):
            X = assignments(q, len(nb))
            states = X @ (q ** (np.array(nb, dtype=np.int64) - 1)) if nb else np.zeros(1, dtype=np.int64)
            tables.append(T[states] // q ** (v - 1) % q)
        return cls(q, neighbourhoods, tables)

    def declared_digraph(self) -> Digraph:
        return Digraph(self.n, frozenset((u, v) for v, nb in enumerate(self.neighbourhoods, 1) for u in nb))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Fds):
            return NotImplemented
        return (
            self.q == other.q
            and self.neighbourhoods == other.neighbourhoods
            and all(np.array_equal(a, b) for a, b in zip(self.tables, other.tables))
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Fds(q={self.q}, n={self.n}, neighbourhoods={self.neighbourhoods})"


def assignments(q: int, k: int) -> np.ndarray:
    """All of ``[q]^k`` as rows, little-endian order (row ``i`` encodes ``i``)."""
    idx = np.arange(q**k, dtype=np.int64)
    return (idx[:, None] // q ** np.arange(k, dtype=np.int64)) % q


def encode(x: Sequence[int], q: int) -> int:
    value = 0
    for d in reversed(list(x)):
        if not 0 <= d < q:
            raise InputError(f"digit {d} outside [0, {q})")
        value = value * q + int(d)
    return value


def decode(value: int, q: int, n: int) -> tuple[int, ...]:
    if not 0 <= value < q**n:
        raise InputError(f"state {value} outside [0, {q}^{n})")
    digits = []
    for _ in range(n):
        value, d = divmod(value, q)
        digits.append(d)
    return tuple(digits)


# -- evaluation ----------------------------------------------------------------------


def _local_index(f: Fds, v: int, digit: Callable[[int], object]):
    idx = 0
    scale = 1
    for u in f.neighbourhoods[v - 1]:
        idx = idx + digit(u) * scale
        scale *= f.q
    return idx


def evaluate(f: Fds, x: int) -> int:
    digits = decode(x, f.q, f.n)
    y = [int(f.tables[v - 1][_local_index(f, v, lambda u: digits[u - 1])]) for v in range(1, f.n + 1)]
    return encode(y, f.q)


def apply_block(f: Fds, S: Iterable[int], x: int) -> int:
    """Update exactly the coordinates in ``S`` (in parallel), keep the rest."""
    S = _vertex_set(S, f.n)
    digits = decode(x, f.q, f.n)
    y = list(digits)
    for v in S:
        y[v - 1] = int(f.tables[v - 1][_local_index(f, v, lambda u: digits[u - 1])])
    return encode(y, f.q)


class _DigitCache:
    def __init__(self, states: np.ndarray, q: int):
        self.states = states
        self.q = q
        self._cols: dict[int, np.ndarray] = {}

    def __call__(self, u: int) -> np.ndarray:
        col = self._cols.get(u)
        if col is None:
            col = self.states // self.q ** (u - 1) % self.q
            self._cols[u] = col
        return col


def _local_values(f: Fds, digits: _DigitCache, v: int) -> np.ndarray:
    idx = _local_index(f, v, digits)
    tab = f.tables[v - 1]
    if isinstance(idx, int):
        return np.full(len(digits.states), tab[idx], dtype=np.int64)
    return tab[idx]


def block_map(f: Fds, S: Iterable[int]) -> np.ndarray:
    """Transition map of ``f^(S)``."""
    S = _vertex_set(S, f.n)
    size = check_state_space(f.q, f.n)
    states = np.arange(size, dtype=np.int64)
    digits = _DigitCache(states, f.q)
    T = states.copy()
    for v in sorted(S):
        weight = f.q ** (v - 1)
        T += (_local_values(f, digits, v) - digits(v)) * weight
    return T


def materialize(f: Fds) -> np.ndarray:
    return block_map(f, range(1, f.n + 1))


def compose(outer: np.ndarray, inner: np.ndarray) -> np.ndarray:
    """Map of ``outer o inner``."""
    return outer[inner]


def iterate(T: np.ndarray, p: int) -> np.ndarray:
    """Map of the ``p``-th iterate, by repeated squaring."""
    if p < 1:
        raise InputError(f"iteration count must be >= 1, got {p}")
    T = np.asarray(T, dtype=np.int64)
    result = None
    base = T
    while p:
        if p & 1:
            result = base if result is None else base[result]
        p >>= 1
        if p:
            base = base[base]
    return result


def rank(T: np.ndarray) -> int:
    return int(np.unique(T).size)


def exact_log(value: int, q: int) -> int | None:
    """``k`` with ``q**k == value``, or None."""
    k = 0
    power = 1
    while power < value:
        power *= q
        k += 1
    return k if power == value else None


def scaled(count: int, q: int) -> int | float:
    """``log_q(count)``: an int when ``count`` is a power of ``q``, else a float."""
    k = exact_log(count, q)
    return k if k is not None else math.log(count) / math.log(q)


def scaled_rank(T: np.ndarray, q: int) -> int | float:
    return scaled(rank(T), q)


def is_permutation(T: np.ndarray) -> bool:
    return rank(T) == len(T)


def periodic_points(T: np.ndarray) -> np.ndarray:
    """States on cycles of the functional graph, found as the stable image:
    apply ``T`` to the current set until it stops shrinking."""
    T = np.asarray(T, dtype=np.int64)
    S = np.unique(T)
    while True:
        image = np.unique(T[S])
        if image.size == S.size:
            return S
        S = image


def periodic_rank(T: np.ndarray) -> int:
    return int(periodic_points(T).size)


def scaled_periodic_rank(T: np.ndarray, q: int) -> int | float:
    return scaled(periodic_rank(T), q)


# -- interaction graph ----------------------------------------------------------------


def essential_inputs(q: int, k: int, table: np.ndarray) -> list[bool]:
    """Which of the ``k`` table inputs the table depends on essentially."""
    if k == 0:
        return []
    # Fortran order puts the least significant (first) neighbour on axis 0
    cube = np.asarray(table).reshape((q,) * k, order="F")
    out = []
    for axis in range(k):
        first = np.take(cube, [0], axis=axis)
        out.append(bool(np.any(cube != first)))
    return out


def interaction_graph(f: Fds) -> Digraph:
    arcs = set()
    for v, (nb, tab) in enumerate(zip(f.neighbourhoods, f.tables), start=1):
        for u, essential in zip(nb, essential_inputs(f.q, len(nb), tab)):
            if essential:
                arcs.add((u, v))
    return Digraph(f.n, frozenset(arcs))


class Membership(enum.Enum):
    EXACT = "exact"
    CONTAINED = "contained"
    NEITHER = "neither"

    def __str__(self) -> str:
        return self.value


def membership(f: Fds, D: Digraph) -> Membership:
    """EXACT if IG(f) = D, CONTAINED if IG(f) is a proper subgraph of D."""
    if f.n != D.n:
        raise InputError(f"system has {f.n} vertices, digraph has {D.n}")
    ig = interaction_graph(f)
    if ig.arcs == D.arcs:
        return Membership.EXACT
    if ig.arcs < D.arcs:
        return Membership.CONTAINED
    return Membership.NEITHER


# -- schedules ------------------------------------------------------------------------


def _vertex_set(S: Iterable[int], n: int) -> frozenset[int]:
    S = frozenset(int(v) for v in S)
    for v in S:
        if not 1 <= v <= n:
            raise InputError(f"vertex {v} outside 1..{n}")
    return S


@dataclass(frozen=True)
class Schedule:
    """Blocks applied left to right; each block updates its vertices in parallel."""

    blocks: tuple[frozenset[int], ...]

    def __post_init__(self):
        blocks = tuple(frozenset(int(v) for v in b) for b in self.blocks)
        if not blocks:
            raise InputError("a schedule needs at least one block")
        for b in blocks:
            if not b:
                raise InputError("schedule blocks must be nonempty")
            if min(b) < 1:
                raise InputError(f"schedule vertex {min(b)} < 1")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def of(cls, *blocks: Iterable[int]) -> "Schedule":
        return cls(tuple(frozenset(b) for b in blocks))

    @classmethod
    def parallel(cls, n: int) -> "Schedule":
        return cls((frozenset(range(1, n + 1)),))

    def check(self, n: int) -> None:
        for b in self.blocks:
            if max(b) > n:
                raise InputError(f"schedule vertex {max(b)} outside 1..{n}")


@dataclass(frozen=True)
class ScheduleClass:
    complete: bool
    block_sequential: bool
    parallel: bool


def classify_schedule(sigma: Schedule, n: int) -> ScheduleClass:
    sigma.check(n)
    V = frozenset(range(1, n + 1))
    complete = frozenset().union(*sigma.blocks) == V
    disjoint = sum(len(b) for b in sigma.blocks) == len(frozenset().union(*sigma.blocks))
    return ScheduleClass(
        complete=complete,
        block_sequential=complete and disjoint,
        parallel=sigma.blocks == (V,),
    )


def apply_schedule(f: Fds, sigma: Schedule) -> np.ndarray:
    """Map of ``f^(sigma_t) o ... o f^(sigma_1)``."""
    sigma.check(f.n)
    T = None
    for block in sigma.blocks:
        B = block_map(f, block)
        T = B if T is None else B[T]
    return T


def random_block_sequential(n: int, rng: np.random.Generator) -> Schedule:
    """A uniformly shuffled vertex order cut into blocks at random points."""
    order = rng.permutation(np.arange(1, n + 1))
    cuts = sorted(int(c) for c in np.nonzero(rng.random(n - 1) < 0.5)[0] + 1)
    pieces = np.split(order, cuts)
    return Schedule(tuple(frozenset(int(v) for v in piece) for piece in pieces))


def random_complete(n: int, rng: np.random.Generator, max_blocks: int = 4) -> Schedule:
    """Random blocks, topped up until every vertex appears."""
    blocks = []
    for _ in range(int(rng.integers(1, max_blocks + 1))):
        b = frozenset(int(v) for v in np.nonzero(rng.random(n) < 0.5)[0] + 1)
        if b:
            blocks.append(b)
    missing = frozenset(range(1, n + 1)) - frozenset().union(*blocks) if blocks else frozenset(range(1, n + 1))
    if missing:
        blocks.append(missing)
    return Schedule(tuple(blocks))


# -- text formats -----------------------------------------------------------------------


def _content_lines(text: str) -> list[str]:
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]


def _ints(words: Sequence[str], where: str) -> list[int]:
    try:
        return [int(w) for w in words]
    except ValueError:
        raise InputError(f"non-integer value in {where!r}") from None


def parse_fds(text: str) -> Fds:
    lines = _content_lines(text)
    if not lines:
        raise InputError("empty FDS file")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "fds":
        raise InputError(f"expected 'fds <q> <n>', got {lines[0]!r}")
    q, n = _ints(head[1:], lines[0])
    if n < 1:
        raise InputError(f"vertex count must be >= 1, got {n}")
    if len(lines) != 1 + 2 * n:
        raise InputError(f"expected {2 * n} nbr/tab lines after the header, got {len(lines) - 1}")
    nbrs, tabs = [], []
    for v in range(1, n + 1):
        for kind, line, sink in (("nbr", lines[2 * v - 1], nbrs), ("tab", lines[2 * v], tabs)):
            label, sep, rest = line.partition(":")
            if not sep or label.split() != [kind, str(v)]:
                raise InputError(f"expected '{kind} {v}: ...', got {line!r}")
            sink.append(_ints(rest.split(), line))
    return Fds(q, nbrs, tabs)


def format_fds(f: Fds) -> str:
    out = [f"fds {f.q} {f.n}"]
    for v, (nb, tab) in enumerate(zip(f.neighbourhoods, f.tables), start=1):
        out.append(f"nbr {v}:" + "".join(f" {u}" for u in nb))
        out.append(f"tab {v}:" + "".join(f" {int(x)}" for x in tab))
    return "\n".join(out) + "\n"


def parse_schedule(text: str, n: int | None = None) -> Schedule:
    """One block per line. Comment lines are skipped; blank lines between
    blocks would be empty blocks and are rejected."""
    lines = [ln.strip() for ln in text.splitlines() if not ln.strip().startswith("#")]
    while lines and not lines[-1]:
        lines.pop()
    while lines and not lines[0]:
        lines.pop(0)
    blocks = []
    for ln in lines:
        if not ln:
            raise InputError("empty schedule block")
        blocks.append(frozenset(_ints(ln.split(), ln)))
    sigma = Schedule(tuple(blocks))
    if n is not None:
        sigma.check(n)
    return sigma


def format_schedule(sigma: Schedule) -> str:
    return "".join(" ".join(str(v) for v in sorted(b)) + "\n" for b in sigma.blocks)
