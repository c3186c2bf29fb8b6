import itertools

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from fpgroups.catalog import recipe
from fpgroups.freewords import Alphabet, reduce
from fpgroups.graphs import (
    DECIDABLE,
    UNDECIDABLE,
    UNKNOWN,
    GraphError,
    LabelledDigraph,
    StateLimitExceeded,
    build_bgamma,
    classify_membership,
    find_induced_c4,
    find_induced_copy,
    find_induced_p3k,
    find_induced_p4,
    find_induced_s2l,
    gamma1,
    gamma2,
    is_c4_free,
    is_forest,
    is_p4_free,
    is_transitive_forest,
    make_bristled,
    make_complete,
    make_cycle,
    make_p3k,
    make_path,
    make_star,
    named_graph,
    raag_word_problem,
    rabsag_monoid_word_problem,
    star_parameters,
)
from fpgroups.presentations import detect_rabsag, presentations_match

from oracles import C4, P4, atlas, has_induced, is_trivially_perfect, raag_trivial_bfs


@pytest.mark.parametrize("G", atlas(7), ids=lambda g: f"atlas{g.number_of_nodes()}_{g.number_of_edges()}")
def test_predicates_against_isomorphism_oracle(G):
    assert (find_induced_p4(G) is None) == (not has_induced(G, P4)) == is_p4_free(G)
    assert (find_induced_c4(G) is None) == (not has_induced(G, C4)) == is_c4_free(G)
    assert is_forest(G) == nx.is_forest(G)


@pytest.mark.parametrize("G", atlas(6), ids=lambda g: f"atlas{g.number_of_nodes()}_{g.number_of_edges()}")
def test_transitive_forest_is_trivially_perfect(G):
    assert is_transitive_forest(G) == is_trivially_perfect(G)


def test_witnesses_are_induced():
    G = make_path(6)
    a, b, c, d = find_induced_p4(G)
    sub = nx.Graph()
    sub.add_nodes_from((a, b, c, d))
    sub.add_edges_from((x, y) for x, y in itertools.combinations((a, b, c, d), 2) if G.edge(x, y) is not None)
    assert nx.is_isomorphic(sub, nx.path_graph(4))
    assert find_induced_c4(make_cycle(4)) is not None
    assert find_induced_c4(make_cycle(5)) is None


labelled_graphs = st.integers(2, 5).flatmap(
    lambda n: st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.sampled_from([1, 1, 2, 3])), max_size=8).map(
        lambda es: _graph(n, es)
    )
)


def _graph(n, es):
    names = [f"v{i}" for i in range(n)]
    seen, edges = set(), []
    for u, v, m in es:
        if u == v or frozenset((u, v)) in seen:
            continue
        seen.add(frozenset((u, v)))
        edges.append((names[u], m, names[v]))
    return LabelledDigraph(names, edges)


def brute_p3k(G):
    for c, v, w in itertools.permutations(G.vertices, 3):
        e, f, g = G.edge(c, v), G.edge(c, w), G.edge(v, w)
        if e and f and g is None and e.m >= 2 and e.u == c and f.m == 1:
            return True
    return False


def brute_s2l(G):
    for c, v, w in itertools.permutations(G.vertices, 3):
        e, f = G.edge(c, v), G.edge(c, w)
        if e and f and G.edge(v, w) is None and e.m == f.m >= 2 and e.u == f.u == c:
            return True
    return False


@given(labelled_graphs)
def test_labelled_finders_against_brute_force(G):
    assert (find_induced_p3k(G) is not None) == brute_p3k(G)
    assert (find_induced_s2l(G) is not None) == brute_s2l(G)
    p3k = find_induced_p3k(G)
    if p3k is not None:
        assert find_induced_copy(G, make_p3k(p3k[1])) is not None


@given(labelled_graphs)
def test_bgamma_round_trip(G):
    P = build_bgamma(G)
    assert len(P.relators) == len(G.edges)
    assert detect_rabsag(P) == G
    assert LabelledDigraph.from_json(G.to_json()) == G


def test_validation():
    with pytest.raises(GraphError):
        LabelledDigraph(["a", "b"], [("a", 1, "c")])
    with pytest.raises(GraphError):
        LabelledDigraph(["a"], [("a", 1, "a")])
    with pytest.raises(GraphError):
        LabelledDigraph(["a", "b"], [("a", 0, "b")])
    with pytest.raises(GraphError):
        LabelledDigraph(["a", "b"], [("a", 1, "b"), ("b", 1, "a")])
    with pytest.raises(GraphError):
        LabelledDigraph(["a", "b"], [("a", 2, "b"), ("b", 3, "a")])
    with pytest.raises(GraphError):
        LabelledDigraph.from_json('{"edges": []}')
    assert LabelledDigraph(["a", "b"], [("b", 1, "a")]).edges[0].u == "a"


def test_adjacency_matrix():
    M = make_p3k(3).adjacency_matrix()
    assert M == [[0, 3, 1], [0, 0, 0], [1, 0, 0]]


def test_named_graphs():
    S = make_star(3, 2)
    assert star_parameters(S) == (3, 2)
    assert star_parameters(make_path(4)) is None
    assert named_graph("gamma2") == gamma2()
    with pytest.raises(GraphError):
        named_graph("petersen")
    B = make_bristled(3, 2)
    assert len(B.vertices) == 1 + 2 + 2 * 2
    assert sum(e.m == 2 for e in B.edges) == 4


@pytest.mark.parametrize("k,l", [(2, 2), (2, 3), (3, 2)])
def test_bristled_star_is_the_star_subgroup(k, l):
    # B(bristled star) and the STARBS target are the same presentation up to relabelling
    assert presentations_match(build_bgamma(make_bristled(k, l)), recipe("STARBS", k, l).target).matched


# the statuses claimed for each named graph: (subgroup, submonoid, rational)
D, U, Q = DECIDABLE, UNDECIDABLE, UNKNOWN
NAMED = [
    ("P4", make_path(4), (Q, U, U)),
    ("P5", make_path(5), (Q, U, U)),
    ("C4", make_cycle(4), (U, U, U)),
    ("K3", make_complete(3), (D, D, D)),
    ("Gamma1", gamma1(), (Q, U, U)),
    ("Gamma2", gamma2(), (U, U, U)),
] + [
    (f"S{k}{l}", make_star(k, l), (D, D, D) if 1 in (k, l) else (Q, U, U)) for k in (1, 2, 3) for l in (1, 2, 3)
] + [
    (f"P3_{k}", make_p3k(k), (D, D, D) if k == 1 else (Q, U, U)) for k in (1, 2, 3)
]


@pytest.mark.parametrize("name,G,expected", NAMED, ids=[n for n, _, _ in NAMED])
def test_classification(name, G, expected):
    rep = classify_membership(G)
    assert tuple(rep.verdicts().values()) == expected
    for c in rep.certificates:
        assert c.verdict in (DECIDABLE, UNDECIDABLE)
    assert rep.to_json()["graph"] == G.to_json()


def test_classification_is_monotone():
    # undecidable subgroup membership forces the harder problems; decidable rational forces the easier
    for _, G, _ in NAMED:
        v = classify_membership(G).verdicts()
        if v["subgroup_membership"] == U:
            assert v["submonoid_membership"] == v["rational_subset"] == U
        if v["rational_subset"] == D:
            assert v["submonoid_membership"] == v["subgroup_membership"] == D


def test_labelled_graph_with_plain_c4():
    G = LabelledDigraph(["a", "b", "c", "d", "e"], [("a", 1, "b"), ("b", 1, "c"), ("c", 1, "d"), ("d", 1, "a"), ("e", 2, "a")])
    v = classify_membership(G).verdicts()
    assert v["subgroup_membership"] == U


def _commute(G):
    return lambda x, y: G.edge(G.vertices[x], G.vertices[y]) is not None


@pytest.mark.parametrize("G", [make_path(4), make_cycle(4), make_star(3, 1)], ids=["P4", "C4", "S31"])
@given(data=st.data())
def test_raag_word_problem_against_bfs(G, data):
    n = len(G.vertices)
    ls = data.draw(st.lists(st.tuples(st.integers(0, n - 1), st.sampled_from((1, -1))), max_size=8))
    A = Alphabet(G.vertices)
    assert raag_word_problem(G, reduce(A, ls)) == raag_trivial_bfs(ls, _commute(G))


def test_raag_word_problem_examples():
    G = make_path(4)
    A = Alphabet(G.vertices)
    assert raag_word_problem(G, A.word("[v0, v1]"))
    assert not raag_word_problem(G, A.word("[v0, v2]"))
    assert raag_word_problem(G, A.word("v1 v0 v2 v1^-1 v2^-1 v0^-1"))
    assert not raag_word_problem(G, A.word("v1 v0 v2 v1^-1 v0^-1 v2^-1"))
    with pytest.raises(GraphError):
        raag_word_problem(make_star(1, 2), Alphabet(["x0", "x1"]).word("x0"))


def test_monoid_word_problem():
    G = make_star(1, 2)
    A = Alphabet(G.vertices)
    assert rabsag_monoid_word_problem(G, A.word("x0 x1^2"), A.word("x1^2 x0"))
    assert not rabsag_monoid_word_problem(G, A.word("x0 x1"), A.word("x1 x0"))
    assert rabsag_monoid_word_problem(G, A.word("x0 x1^2 x0"), A.word("x1^2 x0^2"))
    assert not rabsag_monoid_word_problem(G, A.word("x0"), A.word("x0^2"))
    with pytest.raises(ValueError):
        rabsag_monoid_word_problem(G, A.word("x0^-1"), A.word("x0"))
    K = make_complete(4)
    B = Alphabet(K.vertices)
    with pytest.raises(StateLimitExceeded):
        rabsag_monoid_word_problem(K, B.word("v0 v1 v2 v3 v0 v1 v2 v3"), B.word("v3 v3 v2 v2 v1 v1 v0 v0"), max_states=50)
