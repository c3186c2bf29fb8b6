"""Named group families, finite-index subgroup recipes and their verification.

Each recipe names a group, a finite list of subgroup generators, the index
the subgroup should have, and a target presentation.  ``verify`` runs the
whole pipeline (coset enumeration, Reidemeister-Schreier, optional basis
change, Tietze simplification, matching) and records every intermediate
result in a ``VerificationReport``.

Where a family has infinitely many subgroup generators in the usual
description (all conjugates ``a^i b a^-i``), the recipe keeps a finite
sublist.  That sublist generates a subgroup of the intended one, so a
coset enumeration returning the expected index proves the two agree.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .cosets import CosetOverflow
from .freewords import Alphabet, Word, commutator, conjugate, invert, product, relabel
from .graphs import build_bgamma, find_induced_c4, gamma1, gamma2, make_star
from .presentations import (
    AbelianInvariants,
    MatchReport,
    Presentation,
    abelianization,
    apply_script,
    detect_raag,
    format_presentation,
    presentations_match,
    tietze_simplify,
    tietze_substitute,
)
from .reidschreier import SubgroupPresentation, subgroup_presentation

log = logging.getLogger(__name__)


class CatalogError(ValueError):
    pass


# --- families -------------------------------------------------------------------

FAMILIES = ("torus_knot", "inflated_torus", "moldavanskii", "bs", "inflated_bs", "newman", "h_group", "bob")


def _need(cond: bool, msg: str):
    if not cond:
        raise CatalogError(msg)


def build_family(name: str, *params: int) -> Presentation:
    """The defining presentation of a named family."""
    ab = Alphabet("ab")
    a, b = ab.gens()
    if name == "torus_knot":
        _need(len(params) == 2 and min(params) >= 0, "torus_knot takes m, n >= 0")
        m, n = params
        return Presentation(ab, [a ** m * b ** n])
    if name == "inflated_torus":
        _need(len(params) == 3, "inflated_torus takes p, q, k")
        p, q, k = params
        _need(p >= 2 and q >= 2 and k >= 1, "inflated_torus needs p, q >= 2 and k >= 1")
        return Presentation(ab, [(a ** p * b ** q) ** k])
    if name == "moldavanskii":
        _need(len(params) == 2 and min(params) >= 1, "moldavanskii takes m, n >= 1")
        m, n = params
        return Presentation(ab, [commutator(a ** m, b ** n)])
    if name == "bs":
        _need(len(params) == 2 and 0 not in params, "bs takes nonzero m, n")
        m, n = params
        return Presentation(ab, [conjugate(a ** m, b) * a ** -n])
    if name == "inflated_bs":
        _need(len(params) == 3, "inflated_bs takes k, m, n")
        k, m, n = params
        _need(k >= 1 and m != 0 and n != 0, "inflated_bs needs k >= 1 and nonzero m, n")
        return Presentation(ab, [(conjugate(a ** m, b) * a ** -n) ** k])
    if name == "newman":
        _need(len(params) == 2 and min(params) >= 1, "newman takes p, q >= 1")
        p, q = params
        A = Alphabet(["y"] + [f"x{i}" for i in range(1, p + 1)])
        y = A.gen("y")
        rhs = product(A, [conjugate(y ** q, A.gen(f"x{i}")) for i in range(1, p + 1)])
        return Presentation(A, [invert(y) * rhs])
    if name == "h_group":
        _need(len(params) == 1 and params[0] >= 0, "h_group takes m >= 0")
        (m,) = params
        A = Alphabet("abc")
        return Presentation(A, [A.word(f"a c^{m + 1} a b c^{m} b")])
    if name == "bob":
        _need(len(params) == 1 and params[0] >= 1, "bob takes i >= 1")
        (i,) = params
        return Presentation(ab, [commutator(a * b ** i, b ** i * a)])
    raise CatalogError(f"unknown family {name!r}; known: {', '.join(FAMILIES)}")


# --- recipes --------------------------------------------------------------------


def raag_presentation(names: Sequence[str], edges: Sequence[tuple[str, str]]) -> Presentation:
    A = Alphabet(names)
    return Presentation(A, [commutator(A.gen(x), A.gen(y)) for x, y in edges])


@dataclass
class SubgroupRecipe:
    prop_id: str
    params: tuple[int, ...]
    group: Presentation
    generators: list[Word]
    expected_index: int
    target: Presentation
    # (transversal word, generator name) -> conventional symbol name
    names: dict[tuple[tuple, str], str] = field(default_factory=dict)
    basis_change: tuple[dict, dict] | None = None
    basis_target: Presentation | None = None
    script: list[dict] | None = None
    checks: list[Callable] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "prop_id": self.prop_id,
            "params": list(self.params),
            "group": format_presentation(self.group),
            "generators": [str(w) for w in self.generators],
            "expected_index": self.expected_index,
            "target": format_presentation(self.target),
        }


def _key(w: Word, gen: str) -> tuple[tuple, str]:
    return (w.syllables, gen)


def _torus(m: int, n: int) -> SubgroupRecipe:
    _need(m >= 2 and n >= 2, "TORUS needs m, n >= 2")
    G = build_family("torus_knot", m, n)
    A = G.alphabet
    a, b = A.gens()
    gens = [a ** m] + [commutator(a ** i, b ** j) for i in range(m) for j in range(n)]
    gens = [w for w in gens if w]
    k = (m - 1) * (n - 1)
    target = raag_presentation(["alpha"] + [f"beta_{i}" for i in range(1, k + 1)],
                               [("alpha", f"beta_{i}") for i in range(1, k + 1)])
    names = {}
    for i in range(m):
        for j in range(n):
            t = a ** i * b ** j
            names[_key(t, "a")] = f"alpha_{i}_{j}" if i != m - 1 else f"gamma_{j}"
            if j == n - 1:
                names[_key(t, "b")] = f"beta_{i}"

    def star_check(rep: "VerificationReport"):
        G = detect_raag(rep.simplified)
        if G is None:
            return False, "simplified presentation is not a RAAG"
        degs = sorted(d for _, d in G.degree())
        ok = G.number_of_nodes() == k + 1 and G.number_of_edges() == k and (k <= 1 or degs[-1] == k)
        return ok, f"commutation graph has {G.number_of_nodes()} vertices, {G.number_of_edges()} edges, max degree {degs[-1] if degs else 0}"

    return SubgroupRecipe("TORUS", (m, n), G, gens, m * n, target, names, checks=[("star_with_%d_leaves" % k, star_check)])


def _gamma1() -> SubgroupRecipe:
    G = build_bgamma(gamma1())
    A = G.alphabet
    w0, w1, w2 = A.gens()
    gens = [w0, w2, w1 ** 2, conjugate(w0, w1), conjugate(w2, w1)]
    e = A.identity()
    names = {
        _key(e, "w0"): "beta_1", _key(e, "w2"): "beta_0",
        _key(w1, "w0"): "beta_3", _key(w1, "w1"): "beta_2", _key(w1, "w2"): "beta_4",
    }
    target = raag_presentation([f"beta_{i}" for i in range(5)], [(f"beta_{i}", f"beta_{i + 1}") for i in range(4)])
    return SubgroupRecipe("GAMMA1", (), G, gens, 2, target, names, checks=[("exact_relators", _exact_check)])


def _starbs(k: int, l: int) -> SubgroupRecipe:
    _need(k >= 2 and l >= 2, "STARBS needs k, l >= 2")
    G = build_bgamma(make_star(k, l))
    A = G.alphabet
    xk = A.gen(f"x{k}")
    gens = [xk ** l] + [conjugate(A.gen(f"x{j}"), xk ** i) for i in range(l) for j in range(k)]
    names = {_key(xk ** (l - 1), f"x{k}"): "alpha"}
    for i in range(l):
        names[_key(xk ** i, "x0")] = f"beta_{i}"
        for j in range(1, k):
            names[_key(xk ** i, f"x{j}")] = f"beta_{i}_{j}"
    tnames = ["alpha"] + [f"beta_{i}" for i in range(l)] + [f"beta_{i}_{j}" for i in range(l) for j in range(1, k)]
    T = Alphabet(tnames)
    rels = [commutator(T.gen("alpha"), T.gen(f"beta_{i}")) for i in range(l)]
    rels += [commutator(T.gen(f"beta_{i}"), T.gen(f"beta_{i}_{j}") ** l) for i in range(l) for j in range(1, k)]
    return SubgroupRecipe("STARBS", (k, l), G, gens, l, Presentation(T, rels), names,
                          checks=[("exact_relators", _exact_check)])


def _chordal() -> SubgroupRecipe:
    G = build_bgamma(gamma2())
    A = G.alphabet
    w0, w1, w2, w3 = A.gens()
    gens = [w1, w2 ** 2, w3, w0, conjugate(w0, w2)]
    b = [f"beta_{i}" for i in range(5)]
    edges = [(b[0], b[1]), (b[0], b[2]), (b[0], b[4]), (b[0], b[3]),
             (b[1], b[2]), (b[1], b[4]), (b[2], b[3]), (b[4], b[3])]
    target = raag_presentation(b, edges)

    def c4_check(rep: "VerificationReport"):
        G = detect_raag(rep.simplified)
        if G is None:
            return False, "simplified presentation is not a RAAG"
        c4 = find_induced_c4(G)
        hub = [v for v, d in G.degree() if d == G.number_of_nodes() - 1]
        ok = c4 is not None and len(hub) == 1 and G.number_of_edges() == 8
        return ok, f"induced C4 {c4}, hub {hub}"

    return SubgroupRecipe("CHORDAL", (), G, gens, 2, target, checks=[("induced_c4_and_hub", c4_check)])


def _mt(m: int, n: int) -> SubgroupRecipe:
    _need(m >= 1 and n >= 1, "MT needs m, n >= 1")
    G = build_family("moldavanskii", m, n)
    A = G.alphabet
    a, b = A.gens()
    gens = [a ** m] + [conjugate(b, a ** i) for i in range(m)]
    names = {_key(a ** (m - 1), "a"): "alpha"}
    for i in range(m):
        names[_key(a ** i, "b")] = f"beta_{i + 1}"
    T = Alphabet(["alpha"] + [f"beta_{i}" for i in range(1, m + 1)])
    target = Presentation(T, [commutator(T.gen("alpha"), T.gen(f"beta_{i}") ** n) for i in range(1, m + 1)])
    return SubgroupRecipe("MT", (m, n), G, gens, m, target, names, checks=[("exact_relators", _exact_check)])


def _sqtorus(m: int) -> SubgroupRecipe:
    _need(m >= 1, "SQTORUS needs m >= 1")
    G = build_family("inflated_torus", 2, 2 * m + 1, 2)
    A = G.alphabet
    a, b = A.gens()
    gens = [a ** 2, a * b, a * invert(b)]
    e = A.identity()
    names = {_key(e, "b"): "alpha", _key(a, "b"): "beta", _key(a, "a"): "gamma"}
    # alpha -> alpha beta^-1, beta -> beta, gamma -> beta gamma
    basis = ({"alpha": "alpha*beta^-1", "gamma": "beta*gamma"}, {"alpha": "alpha*beta", "gamma": "beta^-1*gamma"})
    T = Alphabet(["alpha", "beta", "gamma"])
    basis_target = Presentation(T, [T.word(f"beta gamma alpha^{m + 1} gamma beta alpha^{m}")])
    return SubgroupRecipe("SQTORUS", (m,), G, gens, 2, build_family("h_group", m), names,
                          basis_change=basis, basis_target=basis_target,
                          checks=[("basis_change_result", _basis_check)])


def newman_rewritten(p: int, q: int) -> Word:
    """``prod_{j<p-1} (beta_j beta_{j+1}^-1 alpha^-q) * beta_{p-1} alpha beta_0^-1 alpha^-q``."""
    T = Alphabet(["alpha"] + [f"beta_{i}" for i in range(p)])
    al = T.gen("alpha")
    be = [T.gen(f"beta_{i}") for i in range(p)]
    parts = []
    for j in range(p - 1):
        parts += [be[j], invert(be[j + 1]), al ** -q]
    parts += [be[p - 1], al, invert(be[0]), al ** -q]
    return product(T, parts)


def _newman(p: int, q: int) -> SubgroupRecipe:
    _need(p >= 2 and q >= 1, "NEWMAN needs p >= 2 and q >= 1")
    G = build_family("inflated_bs", p, 1, p * q)
    A = G.alphabet
    a, b = A.gens()
    gens = [a ** p] + [conjugate(b, a ** i) for i in range(p)]
    names = {_key(a ** (p - 1), "a"): "alpha"}
    for i in range(p):
        names[_key(a ** i, "b")] = f"beta_{i}"
    target_word = newman_rewritten(p, q)

    def rotation_check(rep: "VerificationReport"):
        sp = rep.subgroup
        Rp = (conjugate(a, b) * a ** (-p * q)) ** p
        A = Alphabet(rep.renaming)
        base = _rename_word(sp, rep.renaming, sp.rewriter.express(Rp))
        want = relabel(target_word, A, [(A.index(n), 1) for n in target_word.alphabet.names])
        if base != want:
            return False, f"tau(R^p) = {base}, expected {want}"
        bad = []
        for i in range(1, p):
            img = _rename_word(sp, rep.renaming, sp.rewriter.express(conjugate(Rp, a ** i)))
            if not _is_rotation(img, base):
                bad.append(f"i={i}: {img}")
        return not bad, "every conjugate rewrites to a rotation of tau(R^p)" if not bad else "; ".join(bad)

    checks = [("tau_R_p_rotations", rotation_check)]
    if (p, q) == (2, 1):
        E = Alphabet("abc")
        example = Presentation(E, [conjugate(E.gen("a"), E.gen("b")) * conjugate(E.gen("a"), E.gen("c")) * E.gen("a") ** -1])

        def example_check(rep: "VerificationReport"):
            mr = presentations_match(rep.simplified, example)
            return mr.matched, "; ".join(mr.evidence)

        checks.append(("matches_a^b_a^c=a", example_check))
    return SubgroupRecipe("NEWMAN", (p, q), G, gens, p, build_family("newman", p, q), names, checks=checks)


def _is_rotation(u: Word, v: Word) -> bool:
    lu, lv = list(u.letters()), list(v.letters())
    if len(lu) != len(lv):
        return False
    return any(lu[i:] + lu[:i] == lv for i in range(len(lu))) or not lu


RECIPES = {
    "TORUS": (_torus, 2),
    "GAMMA1": (_gamma1, 0),
    "STARBS": (_starbs, 2),
    "CHORDAL": (_chordal, 0),
    "MT": (_mt, 2),
    "SQTORUS": (_sqtorus, 1),
    "NEWMAN": (_newman, 2),
}

# parameter sets covered by ``verify --all``
DEFAULT_RUNS = (
    [("TORUS", (m, n)) for m in (2, 3) for n in (2, 3)]
    + [("MT", (m, n)) for m in (1, 2, 3) for n in (1, 2, 3)]
    + [("STARBS", (k, l)) for k in (2, 3) for l in (2, 3)]
    + [("GAMMA1", ()), ("CHORDAL", ())]
    + [("SQTORUS", (m,)) for m in (1, 2)]
    + [("NEWMAN", pq) for pq in ((2, 1), (2, 2), (3, 1))]
)


def recipe(prop_id: str, *params: int) -> SubgroupRecipe:
    key = prop_id.upper()
    if key not in RECIPES:
        raise CatalogError(f"unknown recipe id {prop_id!r}; known: {', '.join(RECIPES)}")
    build, arity = RECIPES[key]
    if len(params) != arity:
        raise CatalogError(f"{key} takes {arity} integer parameter(s), got {len(params)}")
    return build(*params)


# --- verification ---------------------------------------------------------------


def _rename(sp: SubgroupPresentation, names: dict) -> tuple[Presentation, list[str]]:
    T = sp.transversal
    out = []
    for s in sp.rewriter.gens:
        if s.trivial:
            continue
        key = (T.reps[s.coset].syllables, sp.table.alphabet.names[s.gen])
        out.append(names.get(key, s.name))
    P = sp.presentation
    A = Alphabet(out)
    ident = [(i, 1) for i in range(len(out))]
    return Presentation(A, [relabel(r, A, ident) for r in P.relators]), out


def _rename_word(sp: SubgroupPresentation, renaming: list[str], w: Word) -> Word:
    A = Alphabet(renaming)
    return relabel(w, A, [(i, 1) for i in range(len(renaming))])


def _exact_check(rep: "VerificationReport"):
    ok = rep.renamed.same_as(rep.recipe.target)
    return ok, "relators equal the target's exactly" if ok else f"{rep.renamed} differs from {rep.recipe.target}"


def _basis_check(rep: "VerificationReport"):
    ok = rep.after_basis.same_as(rep.recipe.basis_target)
    return ok, f"{rep.after_basis} vs {rep.recipe.basis_target}"


@dataclass
class VerificationReport:
    recipe: SubgroupRecipe
    computed_index: int | None = None
    subgroup: SubgroupPresentation | None = None
    renaming: list[str] | None = None
    renamed: Presentation | None = None
    after_basis: Presentation | None = None
    simplified: Presentation | None = None
    simplify_steps: list = field(default_factory=list)
    used_script: bool = False
    match: MatchReport | None = None
    abelianization: tuple[AbelianInvariants, AbelianInvariants] | None = None
    invariant_violations: list[str] = field(default_factory=list)
    checks: dict[str, tuple[bool, str]] = field(default_factory=dict)
    errors: list[str] = field(default_factory=list)
    transcript: str | None = None

    @property
    def index_ok(self) -> bool:
        return self.computed_index == self.recipe.expected_index

    @property
    def verdict(self) -> str:
        if self.errors or not self.index_ok:
            return "failed"
        if self.invariant_violations or not all(ok for ok, _ in self.checks.values()):
            return "failed"
        if self.match is None or not self.match.matched:
            return "inconclusive"
        return "verified"

    def to_json(self) -> dict:
        r = self.recipe
        return {
            "recipe": f"{r.prop_id}" + "".join(f" {p}" for p in r.params),
            "prop_id": r.prop_id,
            "params": list(r.params),
            "verdict": self.verdict,
            "index": self.computed_index,
            "expected_index": r.expected_index,
            "index_ok": self.index_ok,
            "subgroup_generators": [str(w) for w in r.generators],
            "transversal": None if self.subgroup is None else [str(w) for w in self.subgroup.transversal.reps],
            "presentation_before": None if self.renamed is None else format_presentation(self.renamed),
            "after_basis_change": None if self.after_basis is None else format_presentation(self.after_basis),
            "presentation_after": None if self.simplified is None else format_presentation(self.simplified),
            "target": format_presentation(r.target),
            "simplification_steps": [s.to_json() for s in self.simplify_steps],
            "used_script": self.used_script,
            "match": None if self.match is None else self.match.to_json(),
            "abelianization": None if self.abelianization is None else {
                "subgroup": self.abelianization[0].to_json(),
                "target": self.abelianization[1].to_json(),
                "equal": self.abelianization[0] == self.abelianization[1],
            },
            "invariant_violations": self.invariant_violations,
            "checks": {k: {"ok": ok, "detail": d} for k, (ok, d) in self.checks.items()},
            "errors": self.errors,
            "transcript": self.transcript,
        }

    def summary(self) -> str:
        r = self.recipe
        head = f"{r.prop_id}" + "".join(f" {p}" for p in r.params)
        lines = [f"{head}: {self.verdict}", f"  index {self.computed_index} (expected {r.expected_index})"]
        if self.renamed is not None:
            lines.append(f"  subgroup     {self.renamed}")
        if self.after_basis is not None:
            lines.append(f"  basis change {self.after_basis}")
        if self.simplified is not None:
            lines.append(f"  simplified   {self.simplified}")
        lines.append(f"  target       {r.target}")
        if self.match is not None:
            lines.append(f"  match: {self.match.verdict}")
            if self.match.relabeling:
                rel = ", ".join(f"{k} -> {v if s > 0 else v + '^-1'}" for k, (v, s) in self.match.relabeling.items())
                lines.append(f"  relabelling: {rel}")
        for k, (ok, d) in self.checks.items():
            lines.append(f"  check {k}: {'ok' if ok else 'FAILED'} ({d})")
        for e in self.errors + self.invariant_violations:
            lines.append(f"  error: {e}")
        return "\n".join(lines)


def verify(
    prop_id: str,
    *params: int,
    max_cosets: int = 100000,
    budget: int = 10000,
    trace_path: str | None = None,
) -> VerificationReport:
    """Run one recipe end to end; failures are recorded in the report, not raised."""
    r = recipe(prop_id, *params)
    rep = VerificationReport(r)
    try:
        sp = subgroup_presentation(r.group, r.generators, max_cosets=max_cosets, trace=trace_path is not None)
    except CosetOverflow as exc:
        rep.errors.append(f"coset enumeration overflow: {exc}")
        return rep
    rep.subgroup = sp
    rep.computed_index = sp.index
    if not rep.index_ok:
        rep.errors.append(f"index {sp.index} differs from expected {r.expected_index}")
    if trace_path is not None:
        with open(trace_path, "w") as fh:
            json.dump(sp.to_json(), fh, indent=2)
        rep.transcript = trace_path
    rep.renamed, rep.renaming = _rename(sp, r.names)
    start = abelianization(rep.renamed)
    current = rep.renamed
    if r.basis_change is not None:
        try:
            current = tietze_substitute(current, *r.basis_change)
        except ValueError as exc:
            rep.errors.append(f"basis change rejected: {exc}")
            return rep
        rep.after_basis = current
        if abelianization(current) != start:
            rep.invariant_violations.append("abelianization changed under the basis change")
    result = tietze_simplify(current, budget=budget)
    if result.exhausted and r.script:
        log.info("generic simplifier exhausted its budget; replaying the recipe script")
        result = apply_script(current, r.script)
        rep.used_script = True
    rep.simplified = result.presentation
    rep.simplify_steps = result.steps
    for step in result.steps:
        if step.invariants is not None and step.invariants != start:
            rep.invariant_violations.append(f"abelianization changed at step: {step.detail}")
    rep.match = presentations_match(rep.simplified, r.target, budget=budget)
    if not rep.match.matched and r.script and not rep.used_script:
        scripted = apply_script(current, r.script)
        for step in scripted.steps:
            if step.invariants is not None and step.invariants != start:
                rep.invariant_violations.append(f"abelianization changed at step: {step.detail}")
        m2 = presentations_match(scripted.presentation, r.target, budget=budget)
        if m2.matched:
            rep.simplified, rep.simplify_steps, rep.used_script, rep.match = scripted.presentation, scripted.steps, True, m2
    rep.abelianization = (start, abelianization(r.target))
    if rep.abelianization[0] != rep.abelianization[1]:
        rep.invariant_violations.append(
            f"abelianization of the subgroup {start} differs from the target's {rep.abelianization[1]}"
        )
    for name, check in r.checks:
        try:
            rep.checks[name] = check(rep)
        except Exception as exc:  # a failing check must not hide the rest of the report
            rep.checks[name] = (False, f"check raised {exc!r}")
    return rep


def verify_all(max_cosets: int = 100000, budget: int = 10000, workers: int = 1) -> list[VerificationReport]:
    """Every default run, in a fixed order."""
    if workers <= 1:
        return [verify(p, *ps, max_cosets=max_cosets, budget=budget) for p, ps in DEFAULT_RUNS]
    from concurrent.futures import ThreadPoolExecutor

    # reports hold closures and live tables, so threads rather than processes
    with ThreadPoolExecutor(workers) as pool:
        futs = [pool.submit(verify, p, *ps, max_cosets=max_cosets, budget=budget) for p, ps in DEFAULT_RUNS]
        return [f.result() for f in futs]
