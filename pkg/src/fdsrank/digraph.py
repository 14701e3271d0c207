"""Digraphs and walk packing.

Vertices are labelled ``1..n``; loops are allowed, repeated arcs are not.
The central quantity is the maximum number of pairwise independent
``p``-walks, computed here in three independent ways: a unit-capacity
max-flow on a layered graph, an exhaustive search over vertex-disjoint
cycle/path families, and (for ``p = 1``) the König-Ore/Edmonds deficiency
formula.
"""

from __future__ import annotations

import functools
import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

from .errors import InputError, ResourceLimitError

Arc = tuple[int, int]

BRUTEFORCE_LIMIT = 7
BRUTEFORCE_NODE_BUDGET = 2_000_000
EDMONDS_LIMIT = 20


@dataclass(frozen=True)
class Digraph:
    """A digraph on vertices ``1..n`` given by its arc set."""

    n: int
    arcs: frozenset[Arc] = field(default_factory=frozenset)

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise InputError(f"vertex count must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        arcs = frozenset((int(u), int(v)) for u, v in self.arcs)
        for u, v in arcs:
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise InputError(f"arc ({u}, {v}) has an endpoint outside 1..{self.n}")
        object.__setattr__(self, "arcs", arcs)

    @classmethod
    def from_arcs(cls, n: int, arcs: Iterable[Sequence[int]]) -> "Digraph":
        """Build a digraph from an arc list, rejecting repeated arcs."""
        arc_list = [(int(u), int(v)) for u, v in arcs]
        if len(set(arc_list)) != len(arc_list):
            seen: set[Arc] = set()
            for a in arc_list:
                if a in seen:
                    raise InputError(f"repeated arc {a}")
                seen.add(a)
        return cls(n, frozenset(arc_list))

    # -- common families -------------------------------------------------

    @classmethod
    def empty(cls, n: int) -> "Digraph":
        return cls(n)

    @classmethod
    def cycle(cls, n: int) -> "Digraph":
        """Directed cycle 1 -> 2 -> ... -> n -> 1 (a loop when n = 1)."""
        return cls(n, frozenset((v, v % n + 1) for v in range(1, n + 1)))

    @classmethod
    def path(cls, n: int) -> "Digraph":
        return cls(n, frozenset((v, v + 1) for v in range(1, n)))

    @classmethod
    def complete(cls, n: int, loops: bool = False) -> "Digraph":
        vs = range(1, n + 1)
        return cls(n, frozenset((u, v) for u in vs for v in vs if loops or u != v))

    @classmethod
    def loops(cls, n: int) -> "Digraph":
        return cls(n, frozenset((v, v) for v in range(1, n + 1)))

    @classmethod
    def bidirected_cycle(cls, n: int) -> "Digraph":
        arcs = set()
        for v in range(1, n + 1):
            w = v % n + 1
            arcs.add((v, w))
            arcs.add((w, v))
        return cls(n, frozenset(arcs))

    # -- adjacency ---------------------------------------------------------

    @functools.cached_property
    def in_lists(self) -> tuple[tuple[int, ...], ...]:
        """``in_lists[v - 1]`` is the ascending in-neighbourhood of ``v``."""
        ins: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.arcs:
            ins[v - 1].append(u)
        return tuple(tuple(sorted(x)) for x in ins)

    @functools.cached_property
    def out_lists(self) -> tuple[tuple[int, ...], ...]:
        outs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.arcs:
            outs[u - 1].append(v)
        return tuple(tuple(sorted(x)) for x in outs)

    def in_nbrs(self, v: int) -> tuple[int, ...]:
        self._check_vertex(v)
        return self.in_lists[v - 1]

    def out_nbrs(self, v: int) -> tuple[int, ...]:
        self._check_vertex(v)
        return self.out_lists[v - 1]

    def in_degree(self, v: int) -> int:
        return len(self.in_nbrs(v))

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    def sorted_arcs(self) -> list[Arc]:
        return sorted(self.arcs)

    def is_subgraph_of(self, other: "Digraph") -> bool:
        return self.n == other.n and self.arcs <= other.arcs

    def _check_vertex(self, v: int) -> None:
        if not 1 <= v <= self.n:
            raise InputError(f"vertex {v} outside 1..{self.n}")

    def __str__(self) -> str:
        return format_digraph(self).rstrip("\n")


# -- text format ------------------------------------------------------------


def parse_digraph(text: str) -> Digraph:
    """Parse the line-oriented ``digraph <n>`` format."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise InputError("empty digraph file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "digraph":
        raise InputError(f"expected 'digraph <n>', got {lines[0]!r}")
    try:
        n = int(head[1])
    except ValueError:
        raise InputError(f"bad vertex count {head[1]!r}") from None
    arcs = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise InputError(f"expected 'u v', got {ln!r}")
        try:
            arcs.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise InputError(f"non-integer vertex in {ln!r}") from None
    return Digraph.from_arcs(n, arcs)


def format_digraph(D: Digraph) -> str:
    out = [f"digraph {D.n}"]
    out.extend(f"{u} {v}" for u, v in D.sorted_arcs())
    return "\n".join(out) + "\n"


# -- walks --------------------------------------------------------------------


@dataclass(frozen=True)
class WalkFamily:
    """A family of ``p``-walks, each a tuple of ``p + 1`` vertices."""

    p: int
    walks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "walks", tuple(tuple(int(x) for x in w) for w in self.walks))

    def __len__(self) -> int:
        return len(self.walks)

    def problems(self, D: Digraph) -> list[str]:
        """Every reason this family fails to be an independent family in ``D``."""
        bad = []
        if self.p < 1:
            bad.append(f"walk length {self.p} < 1")
        for w in self.walks:
            if len(w) != self.p + 1:
                bad.append(f"walk {w} does not have {self.p + 1} vertices")
                continue
            for v in w:
                if not 1 <= v <= D.n:
                    bad.append(f"walk {w} leaves 1..{D.n}")
                    break
            else:
                for a in zip(w, w[1:]):
                    if a not in D.arcs:
                        bad.append(f"walk {w} uses missing arc {a}")
        if not bad:
            for s in range(self.p + 1):
                column = [w[s] for w in self.walks]
                if len(set(column)) != len(column):
                    bad.append(f"walks collide at position {s}")
        return bad

    def is_valid(self, D: Digraph) -> bool:
        return not self.problems(D)

    def validate(self, D: Digraph) -> None:
        bad = self.problems(D)
        if bad:
            raise InputError("invalid walk family: " + "; ".join(bad))

    def predecessors(self) -> dict[int, set[int]]:
        """Map each vertex to the set of vertices preceding it on some walk."""
        pred: dict[int, set[int]] = {}
        for w in self.walks:
            for a, b in zip(w, w[1:]):
                pred.setdefault(b, set()).add(a)
        return pred

    def successors(self) -> dict[int, set[int]]:
        succ: dict[int, set[int]] = {}
        for w in self.walks:
            for a, b in zip(w, w[1:]):
                succ.setdefault(a, set()).add(b)
        return succ

    def is_consistent(self) -> bool:
        """True when the arcs used by the walks form disjoint paths and cycles."""
        return all(len(s) == 1 for s in self.predecessors().values()) and all(
            len(s) == 1 for s in self.successors().values()
        )


def in_neighbourhood(D: Digraph, S: Iterable[int]) -> frozenset[int]:
    out: set[int] = set()
    for v in S:
        out.update(D.in_nbrs(v))
    return frozenset(out)


# -- layered max-flow ----------------------------------------------------------


class _UnitNetwork:
    """Residual network with integer capacities; edges stored in flat lists."""

    def __init__(self, size: int):
        self.adj: list[list[int]] = [[] for _ in range(size)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add_edge(self, u: int, v: int, c: int = 1) -> None:
        self.adj[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(c)
        self.adj[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(0)

    def max_flow(self, s: int, t: int) -> int:
        flow = 0
        to, cap, adj = self.to, self.cap, self.adj
        while True:
            parent_edge = [-1] * len(adj)
            parent_edge[s] = -2
            queue = deque([s])
            while queue and parent_edge[t] == -1:
                u = queue.popleft()
                for e in adj[u]:
                    v = to[e]
                    if cap[e] > 0 and parent_edge[v] == -1:
                        parent_edge[v] = e
                        queue.append(v)
            if parent_edge[t] == -1:
                return flow
            v = t
            while v != s:
                e = parent_edge[v]
                cap[e] -= 1
                cap[e ^ 1] += 1
                v = to[e ^ 1]
            flow += 1


def _layered_flow(D: Digraph, p: int) -> tuple[int, list[tuple[int, ...]]]:
    """Max number of vertex-disjoint paths through ``p + 1`` copies of ``V``.

    Node ids: 0 super-source, 1 super-sink, then an (in, out) pair for each
    (layer, vertex). Adjacency is inserted in ascending (layer, vertex) order
    so the augmenting paths, and hence the decomposition, are reproducible.
    """
    n = D.n

    def vin(s: int, v: int) -> int:
        return 2 + 2 * (s * n + v - 1)

    net = _UnitNetwork(2 + 2 * n * (p + 1))
    for v in D.vertices:
        net.add_edge(0, vin(0, v))
    for s in range(p + 1):
        for u in D.vertices:
            net.add_edge(vin(s, u), vin(s, u) + 1)
            if s < p:
                for v in D.out_lists[u - 1]:
                    net.add_edge(vin(s, u) + 1, vin(s + 1, v))
            else:
                net.add_edge(vin(s, u) + 1, 1)
    value = net.max_flow(0, 1)

    def flow_target(node: int) -> int:
        for e in net.adj[node]:
            if e % 2 == 0 and net.cap[e] == 0:
                return net.to[e]
        raise AssertionError("flow conservation violated")  # pragma: no cover

    walks = []
    for e in net.adj[0]:
        if e % 2 == 0 and net.cap[e] == 0:
            node = net.to[e]
            walk = []
            for _ in range(p + 1):
                walk.append((node - 2) // 2 % n + 1)
                node = flow_target(node + 1)
            walks.append(tuple(walk))
    return value, walks


def alpha_p_flow(D: Digraph, p: int) -> int:
    """Maximum number of pairwise independent ``p``-walks in ``D``."""
    if p < 1:
        raise InputError(f"walk length must be >= 1, got {p}")
    value, _ = _layered_flow(D, min(p, D.n))
    return value


# -- cycle/path families ------------------------------------------------------------


def _ham_tables(D: Digraph) -> tuple[list[bool], list[bool]]:
    """For every vertex subset (bitmask over 0-based vertices) decide whether
    it carries a Hamiltonian path or a Hamiltonian cycle of ``D``."""
    n = D.n
    size = 1 << n
    outmask = [0] * n
    for u, v in D.arcs:
        outmask[u - 1] |= 1 << (v - 1)
    # ends[mask]: vertices v such that some path covering mask ends at v
    ends = [0] * size
    # from_low[mask]: same, restricted to paths starting at mask's lowest vertex
    from_low = [0] * size
    for mask in range(1, size):
        low = mask & -mask
        if mask == low:
            ends[mask] = mask
            from_low[mask] = mask
            continue
        e = fl = 0
        rest = mask
        while rest:
            b = rest & -rest
            rest ^= b
            prev = mask ^ b
            if _reaches(ends[prev], outmask, b):
                e |= b
            if b != low and _reaches(from_low[prev], outmask, b):
                fl |= b
        ends[mask] = e
        from_low[mask] = fl
    has_path = [False] + [ends[m] != 0 for m in range(1, size)]
    has_cycle = [False] * size
    for mask in range(1, size):
        low = mask & -mask
        s = low.bit_length() - 1
        if mask == low:
            has_cycle[mask] = bool(outmask[s] & low)
            continue
        r = from_low[mask]
        while r:
            c = r & -r
            r ^= c
            if outmask[c.bit_length() - 1] & low:
                has_cycle[mask] = True
                break
    return has_path, has_cycle


def _reaches(tails: int, outmask: list[int], b: int) -> bool:
    while tails:
        c = tails & -tails
        tails ^= c
        if outmask[c.bit_length() - 1] & b:
            return True
    return False


def alpha_p_bruteforce(
    D: Digraph,
    p: int,
    limit: int = BRUTEFORCE_LIMIT,
    node_budget: int = BRUTEFORCE_NODE_BUDGET,
) -> int:
    """Best value of a vertex-disjoint family of cycles and paths, where a
    cycle scores its length and a path on ``m`` vertices scores ``max(m - p, 0)``.

    Exhaustive: the lowest unused vertex is either left out or assigned to one
    component (a vertex set carrying a Hamiltonian cycle or path of ``D``).
    """
    if p < 1:
        raise InputError(f"walk length must be >= 1, got {p}")
    if D.n > limit:
        raise ResourceLimitError(f"brute force limited to n <= {limit}, got n = {D.n}")
    has_path, has_cycle = _ham_tables(D)
    score = [0] * (1 << D.n)
    for mask in range(1, 1 << D.n):
        k = mask.bit_count()
        best = 0
        if has_cycle[mask]:
            best = k
        if has_path[mask]:
            best = max(best, k - p)
        score[mask] = best

    visits = 0

    @functools.lru_cache(maxsize=None)
    def best(rem: int) -> int:
        nonlocal visits
        if rem == 0:
            return 0
        low = rem & -rem
        others = rem ^ low
        result = best(others)
        sub = others
        while True:
            visits += 1
            if visits > node_budget:
                raise ResourceLimitError(f"brute-force node budget {node_budget} exhausted")
            comp = sub | low
            if score[comp]:
                result = max(result, score[comp] + best(rem ^ comp))
            if sub == 0:
                break
            sub = (sub - 1) & others
        return result

    return best((1 << D.n) - 1)


def cycle_path_family(D: Digraph, p: int) -> tuple[list[tuple[int, ...]], list[tuple[int, ...]]]:
    """An optimal family of vertex-disjoint cycles and paths for ``p``.

    Solved as a min-cost circulation: each vertex carries at most one unit,
    each arc used earns 1, and each path start costs ``p - 1``; a path on
    ``m`` vertices then earns ``m - p`` and a cycle earns its length. Paths
    earning nothing are dropped. Cycles are returned rotated to start at
    their smallest vertex.
    """
    if p < 1:
        raise InputError(f"walk length must be >= 1, got {p}")
    G = nx.DiGraph()
    G.add_edge("s", "t", capacity=0, weight=0)
    G.add_edge("t", "s", capacity=D.n, weight=0)
    for v in D.vertices:
        G.add_edge(("i", v), ("o", v), capacity=1, weight=0)
        G.add_edge("s", ("i", v), capacity=1, weight=p - 1)
        G.add_edge(("o", v), "t", capacity=1, weight=0)
    for u, v in D.sorted_arcs():
        G.add_edge(("o", u), ("i", v), capacity=1, weight=-1)
    _, flow = nx.network_simplex(G)

    succ: dict[int, int] = {}
    for u, v in D.sorted_arcs():
        if flow[("o", u)][("i", v)]:
            succ[u] = v
    used = [v for v in D.vertices if flow[("i", v)][("o", v)]]
    starts = [v for v in D.vertices if flow["s"][("i", v)]]
    seen: set[int] = set()
    paths = []
    for v in starts:
        path = [v]
        while path[-1] in succ:
            path.append(succ[path[-1]])
        seen.update(path)
        if len(path) > p:
            paths.append(tuple(path))
    cycles = []
    for v in used:
        if v in seen:
            continue
        cyc = [v]
        while succ[cyc[-1]] != v:
            cyc.append(succ[cyc[-1]])
        seen.update(cyc)
        cycles.append(tuple(cyc))
    return cycles, paths


def family_walks(cycles: Sequence[Sequence[int]], paths: Sequence[Sequence[int]], p: int) -> WalkFamily:
    """The ``p``-walks read off a disjoint cycle/path family: every rotation
    of each cycle, and every window of ``p + 1`` consecutive path vertices."""
    walks = []
    for c in cycles:
        ell = len(c)
        for a in range(ell):
            walks.append(tuple(c[(a + s) % ell] for s in range(p + 1)))
    for path in paths:
        for b in range(len(path) - p):
            walks.append(tuple(path[b : b + p + 1]))
    return WalkFamily(p, tuple(sorted(walks)))


def walk_certificate(D: Digraph, p: int) -> WalkFamily:
    """A maximum independent family of ``p``-walks.

    The layered max-flow decomposition is returned when the walks it yields
    use every vertex with a single predecessor and a single successor (the
    shape the copy and red-light builders need). Otherwise the walks are read
    off an optimal disjoint cycle/path family instead, which always has that
    shape and the same size.
    """
    if p < 1:
        raise InputError(f"walk length must be >= 1, got {p}")
    value, walks = _layered_flow(D, p)
    family = WalkFamily(p, tuple(walks))
    if family.is_consistent():
        return family
    family = family_walks(*cycle_path_family(D, p), p)
    if len(family) != value:  # pragma: no cover - guarded by the test suite
        raise AssertionError(f"family certificate has {len(family)} walks, flow says {value}")
    return family


def edmonds_alpha1(D: Digraph, limit: int = EDMONDS_LIMIT) -> int:
    """``n - max |S| - |N^-(S)|`` over all vertex subsets ``S``."""
    if D.n > limit:
        raise ResourceLimitError(f"subset enumeration limited to n <= {limit}, got n = {D.n}")
    nbr = np.zeros(1, dtype=np.int64)
    size = np.zeros(1, dtype=np.int64)
    for v in D.vertices:
        m = 0
        for u in D.in_lists[v - 1]:
            m |= 1 << (u - 1)
        nbr = np.concatenate([nbr, nbr | m])
        size = np.concatenate([size, size + 1])
    deficiency = size - _popcount(nbr)
    return D.n - int(deficiency.max())


def _popcount(a: np.ndarray) -> np.ndarray:
    a = a.copy()
    count = np.zeros_like(a)
    while np.any(a):
        count += a & 1
        a >>= 1
    return count


# -- strong components ---------------------------------------------------------------


@dataclass(frozen=True)
class SccSummary:
    components: tuple[tuple[int, ...], ...]
    trivial_count: int
    trivial: frozenset[int]

    def on_cycle(self, v: int) -> bool:
        return v not in self.trivial


def strongly_connected_components(D: Digraph) -> list[tuple[int, ...]]:
    """Tarjan's algorithm, iterative; components sorted by smallest vertex."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    comps: list[tuple[int, ...]] = []
    counter = 0
    for root in D.vertices:
        if root in index:
            continue
        work = [(root, iter(D.out_lists[root - 1]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(D.out_lists[w - 1])))
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            else:
                work.pop()
                if work:
                    parent = work[-1][0]
                    low[parent] = min(low[parent], low[v])
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack.discard(w)
                        comp.append(w)
                        if w == v:
                            break
                    comps.append(tuple(sorted(comp)))
    return sorted(comps)


def scc_summary(D: Digraph) -> SccSummary:
    comps = strongly_connected_components(D)
    trivial = frozenset(c[0] for c in comps if len(c) == 1 and (c[0], c[0]) not in D.arcs)
    return SccSummary(tuple(comps), len(trivial), trivial)


def has_cycle_cover(D: Digraph) -> bool:
    return alpha_p_flow(D, D.n) == D.n


def shortest_cycle_through(D: Digraph, v: int) -> tuple[int, ...] | None:
    """A shortest cycle through ``v`` (starting at ``v``), or None."""
    if (v, v) in D.arcs:
        return (v,)
    parent = {v: None}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        for w in D.out_lists[u - 1]:
            if w == v:
                cyc = [u]
                while parent[cyc[-1]] is not None:
                    cyc.append(parent[cyc[-1]])
                return tuple(reversed(cyc))
            if w not in parent:
                parent[w] = u
                queue.append(w)
    return None


# -- digraph suites ------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def all_digraphs(n: int, up_to_isomorphism: bool = True) -> tuple[Digraph, ...]:
    """Every digraph on ``n`` vertices (loops allowed), optionally one per
    isomorphism class. Feasible for ``n <= 4``."""
    if n > 4:
        raise ResourceLimitError(f"digraph enumeration limited to n <= 4, got {n}")
    k = n * n
    masks = np.arange(1 << k, dtype=np.int64)
    if up_to_isomorphism:
        canon = masks.copy()
        for perm in itertools.permutations(range(n)):
            image = np.zeros_like(masks)
            for u in range(n):
                for v in range(n):
                    bit = (masks >> (u * n + v)) & 1
                    image |= bit << (perm[u] * n + perm[v])
            np.minimum(canon, image, out=canon)
        masks = np.unique(canon)
    out = []
    for mask in masks.tolist():
        arcs = frozenset((i // n + 1, i % n + 1) for i in range(k) if mask >> i & 1)
        out.append(Digraph(n, arcs))
    return tuple(out)


def random_digraph(n: int, rng: np.random.Generator, density: float | None = None) -> Digraph:
    """Each of the ``n^2`` possible arcs present independently."""
    if density is None:
        density = float(rng.uniform(0.15, 0.6))
    present = rng.random((n, n)) < density
    return Digraph(n, frozenset((u + 1, v + 1) for u, v in zip(*np.nonzero(present))))
