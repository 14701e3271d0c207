import pytest
from hypothesis import given, settings

from fdsrank.digraph import (
    Digraph,
    WalkFamily,
    all_digraphs,
    alpha_p_bruteforce,
    alpha_p_flow,
    cycle_path_family,
    edmonds_alpha1,
    family_walks,
    format_digraph,
    has_cycle_cover,
    in_neighbourhood,
    parse_digraph,
    scc_summary,
    walk_certificate,
)
from fdsrank.errors import InputError, ResourceLimitError

from conftest import digraphs, max_independent_walks


def test_in_neighbourhood(star):
    assert in_neighbourhood(star, {2, 3}) == {1}
    assert in_neighbourhood(star, {1}) == frozenset()
    assert in_neighbourhood(Digraph.cycle(2), {1, 2}) == {1, 2}
    with pytest.raises(InputError):
        in_neighbourhood(star, {4})


def test_digraph_rejects_bad_arcs():
    with pytest.raises(InputError):
        Digraph(2, frozenset({(1, 3)}))
    with pytest.raises(InputError):
        Digraph.from_arcs(2, [(1, 2), (1, 2)])
    with pytest.raises(InputError):
        Digraph(0)


def test_alpha_flow_examples(cycle4, path3, star):
    assert alpha_p_flow(cycle4, 2) == 4
    assert alpha_p_flow(path3, 1) == 2
    assert alpha_p_flow(path3, 3) == 0
    assert alpha_p_flow(star, 1) == 1
    with pytest.raises(InputError):
        alpha_p_flow(cycle4, 0)


def test_derived_values_match_walk_enumeration(path3, star):
    assert max_independent_walks(path3, 1) == 2
    assert max_independent_walks(star, 1) == 1


def test_bruteforce_examples(cycle4, path3):
    assert alpha_p_bruteforce(cycle4, 2) == 4
    assert alpha_p_bruteforce(path3, 1) == 2
    for p in (1, 2, 5):
        assert alpha_p_bruteforce(Digraph.empty(2), p) == 0


def test_bruteforce_guards():
    with pytest.raises(ResourceLimitError):
        alpha_p_bruteforce(Digraph.cycle(8), 1)
    with pytest.raises(ResourceLimitError):
        alpha_p_bruteforce(Digraph.complete(6, loops=True), 1, node_budget=10)


def test_edmonds_examples(star):
    assert edmonds_alpha1(star) == 1
    assert edmonds_alpha1(Digraph.empty(2)) == 0
    assert edmonds_alpha1(Digraph.cycle(2)) == 2
    with pytest.raises(ResourceLimitError):
        edmonds_alpha1(Digraph.empty(21))


def test_walk_certificate_examples(cycle4, path3, star):
    assert set(walk_certificate(cycle4, 2).walks) == {(1, 2, 3), (2, 3, 4), (3, 4, 1), (4, 1, 2)}
    assert walk_certificate(path3, 2).walks == ((1, 2, 3),)
    cert = walk_certificate(star, 1)
    assert len(cert) == 1 and cert.walks[0] in {(1, 2), (1, 3)}


def test_certificate_is_deterministic():
    D = Digraph.complete(4, loops=True)
    assert walk_certificate(D, 3) == walk_certificate(D, 3)


def test_certificate_beyond_n_uses_cycles():
    D = Digraph(3, frozenset({(1, 2), (2, 1), (2, 3)}))
    cert = walk_certificate(D, 7)
    assert len(cert) == 2 and cert.is_valid(D)


def test_walk_family_problems(path3):
    assert WalkFamily(1, ((1, 2), (2, 3))).is_valid(path3)
    assert not WalkFamily(1, ((1, 2), (1, 2))).is_valid(path3)
    assert not WalkFamily(1, ((2, 1),)).is_valid(path3)
    assert not WalkFamily(2, ((1, 2),)).is_valid(path3)
    with pytest.raises(InputError):
        WalkFamily(1, ((3, 1),)).validate(path3)


def test_scc_examples(path3):
    assert scc_summary(path3).trivial_count == 3
    s = scc_summary(Digraph(3, frozenset({(1, 2), (2, 1), (2, 3)})))
    assert s.components == ((1, 2), (3,)) and s.trivial_count == 1
    assert scc_summary(Digraph.loops(1)).trivial_count == 0


def test_has_cycle_cover(cycle4, path3):
    assert has_cycle_cover(cycle4)
    assert not has_cycle_cover(path3)
    assert has_cycle_cover(Digraph.loops(2))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_flow_matches_bruteforce_all_labelled(n):
    for D in all_digraphs(n, up_to_isomorphism=False):
        for p in range(1, n + 1):
            assert alpha_p_flow(D, p) == alpha_p_bruteforce(D, p), (D, p)


def test_flow_matches_bruteforce_n4_classes():
    # one digraph per isomorphism class; both sides are relabelling-invariant
    for D in all_digraphs(4):
        for p in range(1, 5):
            assert alpha_p_flow(D, p) == alpha_p_bruteforce(D, p), (D, p)


@settings(max_examples=60, deadline=None)
@given(digraphs(max_n=3))
def test_flow_matches_definition(D):
    for p in (1, 2):
        assert alpha_p_flow(D, p) == max_independent_walks(D, p)


@settings(max_examples=200, deadline=None)
@given(digraphs(max_n=6))
def test_flow_properties(D):
    values = [alpha_p_flow(D, p) for p in range(1, D.n + 3)]
    assert all(0 <= v <= D.n for v in values)
    assert all(a >= b for a, b in zip(values, values[1:]))
    assert values[D.n - 1] == values[D.n] == values[D.n + 1]
    assert values[0] == edmonds_alpha1(D)
    assert (values[D.n - 1] == D.n) == has_cycle_cover(D)


@settings(max_examples=200, deadline=None)
@given(digraphs(max_n=6))
def test_certificates_are_valid_and_maximum(D):
    for p in (1, 2, D.n):
        cert = walk_certificate(D, p)
        assert cert.is_valid(D)
        assert cert.is_consistent()
        assert len(cert) == alpha_p_flow(D, p)


@settings(max_examples=150, deadline=None)
@given(digraphs(max_n=6))
def test_cycle_path_family_value(D):
    for p in (1, 2, 3):
        cycles, paths = cycle_path_family(D, p)
        used = [v for c in cycles for v in c] + [v for P in paths for v in P]
        assert len(used) == len(set(used))
        value = sum(len(c) for c in cycles) + sum(len(P) - p for P in paths)
        assert value == alpha_p_flow(D, p)
        assert len(family_walks(cycles, paths, p)) == value


@settings(max_examples=100, deadline=None)
@given(digraphs(max_n=6))
def test_trivial_components_are_exactly_acyclic_vertices(D):
    s = scc_summary(D)
    assert sorted(v for c in s.components for v in c) == list(D.vertices)
    on_cycle = {v for v in D.vertices if any(set(c) >= {v} and len(c) > 1 for c in s.components) or (v, v) in D.arcs}
    assert s.trivial == set(D.vertices) - on_cycle
    assert (s.trivial_count == 0) == (len(on_cycle) == D.n)


def test_inconsistent_flow_walks_are_repaired():
    # 3 is reached from 1 at one step and from 2 at the next
    D = Digraph(5, frozenset({(1, 3), (2, 3), (4, 2), (3, 5)}))
    cert = walk_certificate(D, 2)
    assert cert.is_consistent() and len(cert) == 2


def test_text_format_round_trip():
    D = Digraph(3, frozenset({(1, 1), (1, 2), (3, 2)}))
    assert parse_digraph(format_digraph(D)) == D
    text = "# comment\ndigraph 2\n\n1 2\n# another\n2 2\n"
    assert parse_digraph(text).arcs == {(1, 2), (2, 2)}


@pytest.mark.parametrize(
    "text",
    ["", "graph 2\n", "digraph x\n", "digraph 2\n1 2 3\n", "digraph 2\n1 3\n", "digraph 2\n1 2\n1 2\n", "digraph 2\na b\n"],
)
def test_text_format_errors(text):
    with pytest.raises(InputError):
        parse_digraph(text)


def test_isomorphism_class_counts():
    # loops allowed: 2, 10, 104, 3044 classes
    assert [len(all_digraphs(n)) for n in range(1, 5)] == [2, 10, 104, 3044]
