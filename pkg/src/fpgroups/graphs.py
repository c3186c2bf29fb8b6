"""Labelled digraphs, the groups B(Gamma), graph predicates and word problems.

An edge ``(u, m, v)`` contributes the relation ``u v^m = v^m u``.  Labels are
stored as ``|m|``; a negative input label gives the same group and is kept
only as metadata.  Label 1 edges are undirected.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import networkx as nx

from .freewords import Alphabet, Word, commutator
from .presentations import Presentation


class GraphError(ValueError):
    pass


class StateLimitExceeded(RuntimeError):
    """A breadth-first closure hit its state cap before deciding."""


@dataclass(frozen=True)
class Edge:
    u: str
    m: int
    v: str
    negative: bool = False

    @property
    def directed(self) -> bool:
        return self.m != 1

    def to_json(self) -> list:
        return [self.u, -self.m if self.negative else self.m, self.v]


@dataclass(frozen=True)
class LabelledDigraph:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]

    def __init__(self, vertices: Iterable[str], edges: Iterable = ()):
        vertices = tuple(vertices)
        Alphabet(vertices)  # validates names
        pos = {v: i for i, v in enumerate(vertices)}
        out = {}
        for e in edges:
            if isinstance(e, Edge):
                u, m, v = e.u, (-e.m if e.negative else e.m), e.v
            else:
                u, m, v = e
            if u not in pos or v not in pos:
                raise GraphError(f"edge {(u, m, v)} uses an unknown vertex")
            if u == v:
                raise GraphError(f"loop at {u}")
            if not isinstance(m, int) or isinstance(m, bool) or m == 0:
                raise GraphError(f"edge {(u, m, v)} needs a nonzero integer label")
            neg = m < 0 and abs(m) != 1
            m = abs(m)
            if m == 1 and pos[u] > pos[v]:
                u, v = v, u
            pair = frozenset((u, v))
            if pair in out:
                old = out[pair]
                if (old.u, old.m, old.v) == (u, m, v):
                    raise GraphError(f"duplicate edge {(u, m, v)}")
                raise GraphError(f"two edges on the pair {u}, {v}: {old.to_json()} and {[u, m, v]}")
            out[pair] = Edge(u, m, v, neg)
        ordered = sorted(out.values(), key=lambda e: (pos[e.u], pos[e.v]))
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", tuple(ordered))

    # --- views -----------------------------------------------------------

    def edge(self, a: str, b: str) -> Edge | None:
        for e in self.edges:
            if {e.u, e.v} == {a, b}:
                return e
        return None

    def adjacency_matrix(self) -> list[list[int]]:
        """``M[i][j] = m`` for an edge ``v_i -> v_j`` (both ways for label 1)."""
        pos = {v: i for i, v in enumerate(self.vertices)}
        n = len(self.vertices)
        M = [[0] * n for _ in range(n)]
        for e in self.edges:
            M[pos[e.u]][pos[e.v]] = e.m
            if e.m == 1:
                M[pos[e.v]][pos[e.u]] = 1
        return M

    def is_raag(self) -> bool:
        return all(e.m == 1 for e in self.edges)

    def induced(self, vertices: Iterable[str]) -> "LabelledDigraph":
        keep = set(vertices)
        order = [v for v in self.vertices if v in keep]
        return LabelledDigraph(order, [e for e in self.edges if e.u in keep and e.v in keep])

    def relabel(self, mapping: Mapping[str, str]) -> "LabelledDigraph":
        return LabelledDigraph(
            [mapping[v] for v in self.vertices],
            [Edge(mapping[e.u], e.m, mapping[e.v], e.negative) for e in self.edges],
        )

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "edges": [e.to_json() for e in self.edges]}

    @classmethod
    def from_json(cls, data: Mapping | str) -> "LabelledDigraph":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            return cls(data["vertices"], [tuple(e) for e in data.get("edges", [])])
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, GraphError):
                raise
            raise GraphError(f"malformed graph JSON: {exc}") from None

    @classmethod
    def from_undirected(cls, G: nx.Graph) -> "LabelledDigraph":
        return cls([str(v) for v in G.nodes], [(str(a), 1, str(b)) for a, b in G.edges])


def build_bgamma(G: LabelledDigraph) -> Presentation:
    """The presentation with one relator ``[u, v^m]`` per edge ``(u, m, v)``."""
    A = Alphabet(G.vertices)
    return Presentation(A, [commutator(A.gen(e.u), A.gen(e.v) ** e.m) for e in G.edges])


def underlying_undirected(G: LabelledDigraph) -> nx.Graph:
    H = nx.Graph()
    H.add_nodes_from(G.vertices)
    H.add_edges_from((e.u, e.v) for e in G.edges)
    return H


def _undirected(G) -> nx.Graph:
    return underlying_undirected(G) if isinstance(G, LabelledDigraph) else G


# --- predicates -----------------------------------------------------------------


def is_forest(G) -> bool:
    G = _undirected(G)
    parent = {v: v for v in G.nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in G.edges:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
    return True


def find_induced_c4(G) -> tuple | None:
    """An induced 4-cycle ``(a, x, b, y)`` or ``None``.

    Two non-adjacent vertices with two non-adjacent common neighbours.
    """
    G = _undirected(G)
    nodes = list(G.nodes)
    for a, b in itertools.combinations(nodes, 2):
        if G.has_edge(a, b):
            continue
        common = [v for v in nodes if G.has_edge(a, v) and G.has_edge(b, v)]
        for x, y in itertools.combinations(common, 2):
            if not G.has_edge(x, y):
                return (a, x, b, y)
    return None


def find_induced_p4(G) -> tuple | None:
    """An induced path ``(a, b, c, d)`` or ``None``, searched by its middle edge."""
    G = _undirected(G)
    for b, c in G.edges:
        for b_, c_ in ((b, c), (c, b)):
            left = [a for a in G.neighbors(b_) if a != c_ and not G.has_edge(a, c_)]
            right = [d for d in G.neighbors(c_) if d != b_ and not G.has_edge(d, b_)]
            for a in left:
                for d in right:
                    if a != d and not G.has_edge(a, d):
                        return (a, b_, c_, d)
    return None


def is_c4_free(G) -> bool:
    """No induced 4-cycle.

    This is what the decidability literature on RAAGs calls chordal; it is
    weaker than the graph-theoretic notion, which also forbids longer
    chordless cycles.
    """
    return find_induced_c4(G) is None


def is_p4_free(G) -> bool:
    return find_induced_p4(G) is None


def is_transitive_forest(G) -> bool:
    return is_c4_free(G) and is_p4_free(G)


def find_induced_p3k(G: LabelledDigraph) -> tuple[tuple[str, str, str], int] | None:
    """An induced ``P_{3,k}``, ``k >= 2``: ``((center, labelled end, plain end), k)``.

    The center has an out-edge of label ``k`` and an undirected edge, and the
    two far ends are not adjacent.
    """
    for e in G.edges:
        if e.m < 2:
            continue
        c, v = e.u, e.v
        for f in G.edges:
            if f.m != 1 or c not in (f.u, f.v):
                continue
            w = f.v if f.u == c else f.u
            if w != v and G.edge(v, w) is None:
                return (c, v, w), e.m
    return None


def find_induced_s2l(G: LabelledDigraph) -> tuple[tuple[str, str, str], int] | None:
    """A center with out-edges of one label ``l >= 2`` to two non-adjacent vertices."""
    for c in G.vertices:
        out: dict[int, list[str]] = {}
        for e in G.edges:
            if e.u == c and e.m >= 2:
                out.setdefault(e.m, []).append(e.v)
        for m, ends in out.items():
            for a, b in itertools.combinations(ends, 2):
                if G.edge(a, b) is None:
                    return (c, a, b), m
    return None


def find_induced_copy(G: LabelledDigraph, pattern: LabelledDigraph) -> dict[str, str] | None:
    """An embedding of ``pattern`` onto an induced subgraph of ``G`` (labels respected)."""
    k = len(pattern.vertices)
    want = {frozenset((e.u, e.v)): e for e in pattern.edges}
    for chosen in itertools.permutations(G.vertices, k):
        phi = dict(zip(pattern.vertices, chosen))
        ok = True
        for a, b in itertools.combinations(pattern.vertices, 2):
            e, f = want.get(frozenset((a, b))), G.edge(phi[a], phi[b])
            if (e is None) != (f is None):
                ok = False
            elif e is not None and (e.m != f.m or (e.m != 1 and (phi[e.u], phi[e.v]) != (f.u, f.v))):
                ok = False
            if not ok:
                break
        if ok:
            return phi
    return None


# --- named graphs ---------------------------------------------------------------


def make_path(n: int, prefix: str = "v") -> LabelledDigraph:
    names = [f"{prefix}{i}" for i in range(n)]
    return LabelledDigraph(names, [(names[i], 1, names[i + 1]) for i in range(n - 1)])


def make_cycle(n: int, prefix: str = "v") -> LabelledDigraph:
    names = [f"{prefix}{i}" for i in range(n)]
    return LabelledDigraph(names, [(names[i], 1, names[(i + 1) % n]) for i in range(n)])


def make_complete(n: int, prefix: str = "v") -> LabelledDigraph:
    names = [f"{prefix}{i}" for i in range(n)]
    return LabelledDigraph(names, [(a, 1, b) for a, b in itertools.combinations(names, 2)])


def make_star(k: int, l: int) -> LabelledDigraph:
    """``S_{k,l}``: center ``x0`` with out-edges of label ``l`` to ``x1..xk``."""
    if k < 1 or l < 1:
        raise GraphError("star parameters must be at least 1")
    names = ["x0"] + [f"x{i}" for i in range(1, k + 1)]
    return LabelledDigraph(names, [("x0", l, f"x{i}") for i in range(1, k + 1)])


def make_bristled(k: int, l: int) -> LabelledDigraph:
    """The bristled star: ``x0`` joined to arms ``x1..xl``, each arm with ``k - 1`` bristles.

    Arm ``xi`` has out-edges of label ``l`` to ``xi_1 .. xi_{k-1}``.  This is
    the graph of the index ``l`` subgroup found in ``B(S_{k,l})``.
    """
    if k < 1 or l < 1:
        raise GraphError("star parameters must be at least 1")
    arms = [f"x{i}" for i in range(1, l + 1)]
    names = ["x0"] + arms
    edges = [("x0", 1, a) for a in arms]
    for a in arms:
        for j in range(1, k):
            names.append(f"{a}_{j}")
            edges.append((a, l, f"{a}_{j}"))
    return LabelledDigraph(names, edges)


def make_p3k(k: int) -> LabelledDigraph:
    """``P_{3,k}``: ``w0 -> w1`` with label ``k`` and ``w2 - w0``."""
    return LabelledDigraph(["w0", "w1", "w2"], [("w0", k, "w1"), ("w2", 1, "w0")])


def gamma1() -> LabelledDigraph:
    return make_p3k(2)


def gamma2() -> LabelledDigraph:
    """A square ``w0 w1 w2 w3`` with the chord ``w0 -> w2`` of label 2."""
    return LabelledDigraph(
        ["w0", "w1", "w2", "w3"],
        [("w0", 2, "w2"), ("w0", 1, "w1"), ("w1", 1, "w2"), ("w2", 1, "w3"), ("w3", 1, "w0")],
    )


def named_graph(name: str, *params: int) -> LabelledDigraph:
    table = {
        "path": make_path,
        "cycle": make_cycle,
        "complete": make_complete,
        "star": make_star,
        "bristled": make_bristled,
        "p3k": make_p3k,
        "gamma1": gamma1,
        "gamma2": gamma2,
    }
    if name not in table:
        raise GraphError(f"unknown graph family {name!r}")
    return table[name](*params)


def star_parameters(G: LabelledDigraph) -> tuple[int, int] | None:
    """``(k, l)`` if ``G`` is isomorphic to ``S_{k,l}``."""
    n = len(G.vertices)
    if n < 2 or len(G.edges) != n - 1:
        return None
    labels = {e.m for e in G.edges}
    if len(labels) != 1:
        return None
    l = labels.pop()
    for c in G.vertices:
        if l == 1:
            ok = all(c in (e.u, e.v) for e in G.edges)
        else:
            ok = all(e.u == c for e in G.edges)
        if ok:
            return n - 1, l
    return None


# --- classification -------------------------------------------------------------

DECIDABLE, UNDECIDABLE, UNKNOWN = "decidable", "undecidable", "unknown"
PROBLEMS = ("subgroup_membership", "submonoid_membership", "rational_subset")


@dataclass
class Certificate:
    problem: str
    verdict: str
    reason: str
    witness: list

    def to_json(self) -> dict:
        return {"problem": self.problem, "verdict": self.verdict, "reason": self.reason, "witness": self.witness}


@dataclass
class ClassificationReport:
    graph: LabelledDigraph
    subgroup_membership: str = UNKNOWN
    submonoid_membership: str = UNKNOWN
    rational_subset: str = UNKNOWN
    certificates: list[Certificate] = field(default_factory=list)

    def verdicts(self) -> dict[str, str]:
        return {p: getattr(self, p) for p in PROBLEMS}

    def to_json(self) -> dict:
        return {
            "graph": self.graph.to_json(),
            **self.verdicts(),
            "certificates": [c.to_json() for c in self.certificates],
        }


# Undecidability propagates upward (subgroup -> submonoid -> rational) and
# decidability downward, since each problem is a special case of the next.
_UP = {"subgroup_membership": PROBLEMS, "submonoid_membership": PROBLEMS[1:], "rational_subset": PROBLEMS[2:]}
_DOWN = {"rational_subset": PROBLEMS, "submonoid_membership": PROBLEMS[1:2], "subgroup_membership": PROBLEMS[:1]}


def _raag_certificates(H: LabelledDigraph, via: str) -> list[Certificate]:
    out = []
    c4 = find_induced_c4(H)
    if c4 is not None:
        out.append(Certificate(
            "subgroup_membership", UNDECIDABLE,
            f"induced C4 {via}: A(C4) = F2 x F2 embeds; Lohrey-Steinberg (1)", list(c4)))
    p4 = find_induced_p4(H)
    if p4 is not None:
        out.append(Certificate(
            "submonoid_membership", UNDECIDABLE,
            f"induced P4 {via}: A(P4) embeds; Lohrey-Steinberg (2) and (3)", list(p4)))
    return out


def classify_membership(G: LabelledDigraph) -> ClassificationReport:
    """Apply the known decidability criteria for membership problems in ``B(G)``.

    Undecidability certificates come from forbidden induced subgraphs.  A
    decidable verdict is only issued when no such certificate exists and ``G``
    is a transitive forest RAAG or a single labelled edge.  Anything else is
    ``unknown``.
    """
    rep = ClassificationReport(G)
    bad: list[Certificate] = []
    if G.is_raag():
        bad += _raag_certificates(G, "in the RAAG graph")
    else:
        found = {}
        for quad in itertools.combinations(G.vertices, 4):
            H = G.induced(quad)
            if not H.is_raag():
                continue
            for cert in _raag_certificates(H, "on label-1 edges"):
                found.setdefault(cert.problem, cert)
            if len(found) == 2:
                break
        bad += list(found.values())
        p3k = find_induced_p3k(G)
        if p3k is not None:
            (c, v, w), k = p3k
            bad.append(Certificate(
                "submonoid_membership", UNDECIDABLE,
                f"induced P_(3,{k}): B(P_(3,k)) contains A(P4) for k >= 2", [c, v, w]))
        s2l = find_induced_s2l(G)
        if s2l is not None:
            (c, a, b), l = s2l
            bad.append(Certificate(
                "submonoid_membership", UNDECIDABLE,
                f"induced S_(2,{l}): B(S_(k,l)) contains B(P_(3,l)) for k, l >= 2", [c, a, b]))
        phi = find_induced_copy(G, gamma2())
        if phi is not None:
            bad.append(Certificate(
                "subgroup_membership", UNDECIDABLE,
                "induced Gamma_2: B(Gamma_2) has an index 2 subgroup containing F2 x F2",
                [phi[v] for v in gamma2().vertices]))

    for cert in bad:
        rep.certificates.append(cert)
        for p in _UP[cert.problem]:
            setattr(rep, p, UNDECIDABLE)
            if p != cert.problem:
                rep.certificates.append(Certificate(p, UNDECIDABLE, f"implied by {cert.problem}", cert.witness))
    if bad:
        return rep

    good = None
    if G.is_raag():
        good = Certificate(
            "rational_subset", DECIDABLE,
            "transitive forest RAAG: Lohrey-Steinberg (2) and (3)", list(G.vertices))
    else:
        star = star_parameters(G)
        if star is not None and star[0] == 1:
            good = Certificate(
                "rational_subset", DECIDABLE,
                f"B(S_(1,{star[1]})) = BS({star[1]},{star[1]}) is a finite extension of F x Z",
                list(G.vertices))
    if good is not None:
        rep.certificates.append(good)
        for p in _DOWN[good.problem]:
            setattr(rep, p, DECIDABLE)
            if p != good.problem:
                rep.certificates.append(Certificate(p, DECIDABLE, f"special case of {good.problem}", good.witness))
    return rep


# --- word problems --------------------------------------------------------------


def _commutes(G, a: str, b: str) -> bool:
    if isinstance(G, LabelledDigraph):
        e = G.edge(a, b)
        return e is not None and e.m == 1
    return G.has_edge(a, b)


def raag_word_problem(G, w: Word) -> bool:
    """Decide ``w = 1`` in ``A(G)`` by repeated shuffle cancellation.

    The leftmost letter ``x^e`` that has a later ``x^-e`` reachable past
    letters commuting with ``x`` is cancelled against it; ``w = 1`` iff the
    word empties.
    """
    if isinstance(G, LabelledDigraph) and not G.is_raag():
        raise GraphError("raag_word_problem needs a graph with all labels 1")
    names = w.alphabet.names
    letters = list(w.letters())
    while True:
        hit = None
        for i, (x, e) in enumerate(letters):
            for j in range(i + 1, len(letters)):
                y, f = letters[j]
                if y == x:
                    if f == -e:
                        hit = (i, j)
                    break
                if not _commutes(G, names[x], names[y]):
                    break
            if hit:
                break
        if hit is None:
            return not letters
        i, j = hit
        del letters[j]
        del letters[i]


def rabsag_monoid_word_problem(G: LabelledDigraph, u: Word, v: Word, max_states: int = 10 ** 6) -> bool:
    """Decide ``u = v`` in the monoid ``B_m(G)`` by breadth-first closure.

    Every rule ``a b^m <-> b^m a`` preserves length, so the class of ``u`` is
    finite.  Hitting ``max_states`` raises ``StateLimitExceeded``.
    """
    if not u.is_positive() or not v.is_positive():
        raise ValueError("monoid words must be positive")
    if u.alphabet.names != G.vertices or v.alphabet.names != G.vertices:
        raise GraphError("words must be over the graph's vertices")
    if len(u) != len(v):
        return False
    idx = {name: i for i, name in enumerate(G.vertices)}
    rules = []
    for e in G.edges:
        a, b = idx[e.u], idx[e.v]
        lhs, rhs = (a,) + (b,) * e.m, (b,) * e.m + (a,)
        rules += [(lhs, rhs), (rhs, lhs)]
    start = tuple(g for g, _ in u.letters())
    goal = tuple(g for g, _ in v.letters())
    seen = {start}
    queue = deque([start])
    while queue:
        w = queue.popleft()
        if w == goal:
            return True
        for lhs, rhs in rules:
            k = len(lhs)
            for i in range(len(w) - k + 1):
                if w[i:i + k] == lhs:
                    nxt = w[:i] + rhs + w[i + k:]
                    if nxt not in seen:
                        if len(seen) >= max_states:
                            raise StateLimitExceeded(f"more than {max_states} words in the class")
                        seen.add(nxt)
                        queue.append(nxt)
    return False
