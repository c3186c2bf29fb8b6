"""Finite group presentations and Tietze transformations.

Relators are stored in canonical form: the shortlex-least letter rotation of
the relator or of its inverse.  Two relators that differ by rotation or
inversion therefore compare equal, which makes duplicate detection and
multiset matching straightforward.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import networkx as nx

from .freewords import (
    Alphabet,
    ParseError,
    Word,
    WordError,
    WordParser,
    cyclically_reduce,
    format_syllable,
    invert,
    letter_key,
    reduce,
    relabel,
    substitute,
    tokenize,
)

log = logging.getLogger(__name__)


class PresentationError(ValueError):
    pass


def _letters(w: Word) -> list[tuple[int, int]]:
    return list(w.letters())


def _least_rotation(letters: list[tuple[int, int]]) -> tuple[int, ...]:
    keys = [letter_key(x) for x in letters]
    n = len(keys)
    best = None
    for i in range(n):
        rot = tuple(keys[i:] + keys[:i])
        if best is None or rot < best:
            best = rot
    return best


def canonical_relator(w: Word) -> Word:
    """Shortlex-least rotation of the cyclic reduction of ``w`` or its inverse."""
    core, _ = cyclically_reduce(w)
    if not core:
        return core
    fwd = _least_rotation(_letters(core))
    bwd = _least_rotation(_letters(invert(core)))
    keys = min(fwd, bwd)
    return reduce(w.alphabet, [(k // 2, -1 if k % 2 else 1) for k in keys])


@dataclass(frozen=True)
class Presentation:
    alphabet: Alphabet
    relators: tuple[Word, ...]

    def __init__(self, alphabet: Alphabet | Iterable[str], relators: Iterable[Word] = ()):
        if not isinstance(alphabet, Alphabet):
            alphabet = Alphabet(alphabet)
        seen = set()
        out = []
        for r in relators:
            if r.alphabet != alphabet:
                raise PresentationError(f"relator {r} is not over {alphabet}")
            c = canonical_relator(r)
            if c and c.syllables not in seen:
                seen.add(c.syllables)
                out.append(c)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "relators", tuple(out))

    @property
    def generators(self) -> tuple[str, ...]:
        return self.alphabet.names

    def __len__(self):
        return sum(len(r) for r in self.relators)

    def __str__(self):
        return format_presentation(self)

    def __repr__(self):
        return f"Presentation({format_presentation(self)!r})"

    def same_as(self, other: "Presentation") -> bool:
        """Equal generator names and equal relator sets, in any generator order."""
        if set(self.generators) != set(other.generators) or len(self.generators) != len(other.generators):
            return False
        ours = self.reordered(other.alphabet)
        return set(r.syllables for r in ours.relators) == set(r.syllables for r in other.relators)

    def reordered(self, alphabet: Alphabet) -> "Presentation":
        """The same presentation over ``alphabet``, a permutation of our generator names."""
        mapping = [(alphabet.index(name), 1) for name in self.generators]
        return Presentation(alphabet, [relabel(r, alphabet, mapping) for r in self.relators])

    def to_json(self) -> dict:
        return {"generators": list(self.generators), "relators": [format_relator(r) for r in self.relators]}

    @classmethod
    def from_json(cls, data: Mapping) -> "Presentation":
        alphabet = Alphabet(data["generators"])
        rels = []
        for text in data.get("relators", []):
            w = _parse_relexpr(text, alphabet)
            if not canonical_relator(w):
                raise PresentationError(f"relator {text!r} is trivial after reduction")
            rels.append(w)
        return cls(alphabet, rels)


# --- text format --------------------------------------------------------------


def format_relator(w: Word) -> str:
    """Print a relator, using ``[x, y]`` sugar when it is a single-syllable commutator."""
    s = w.syllables
    names = w.alphabet.names
    if len(s) == 4 and s[2] == (s[0][0], -s[0][1]) and s[3] == (s[1][0], -s[1][1]):
        return f"[{format_syllable(names[s[0][0]], s[0][1])}, {format_syllable(names[s[1][0]], s[1][1])}]"
    return str(w)


def format_presentation(P: Presentation) -> str:
    rels = ", ".join(format_relator(r) for r in P.relators)
    gens = ", ".join(P.generators)
    return f"< {gens} | {rels} >" if rels else f"< {gens} | >"


def _parse_relexpr(text: str, alphabet: Alphabet) -> Word:
    tokens = tokenize(text)
    parser = WordParser(tokens, alphabet, len(text))
    w = parser.expr()
    if parser.peek() is not None and parser.peek()[1] == "=":
        parser.i += 1
        w = w * invert(parser.expr())
    if parser.peek() is not None:
        raise ParseError(f"unexpected token {parser.peek()[1]!r}", parser.position())
    return w


def parse_presentation(text: str) -> Presentation:
    """Parse ``< a, b | r1, u = v, ... >``.

    Relations ``u = v`` are stored as ``u v^-1``.  A relator that reduces to
    the identity is an error.
    """
    text = text.strip()
    if text.startswith("{"):
        return Presentation.from_json(json.loads(text))
    tokens = tokenize(text)
    pos = 0

    def expect(op):
        nonlocal pos
        if pos >= len(tokens) or tokens[pos][1] != op:
            where = tokens[pos][2] if pos < len(tokens) else len(text)
            raise ParseError(f"expected {op!r}", where)
        pos += 1

    expect("<")
    names = []
    while True:
        if pos >= len(tokens) or tokens[pos][0] != "name":
            where = tokens[pos][2] if pos < len(tokens) else len(text)
            raise ParseError("expected generator name", where)
        names.append(tokens[pos][1])
        pos += 1
        if pos < len(tokens) and tokens[pos][1] == ",":
            pos += 1
            continue
        break
    expect("|")
    try:
        alphabet = Alphabet(names)
    except WordError as exc:
        raise ParseError(str(exc), tokens[0][2]) from None
    relators = []
    if pos < len(tokens) and tokens[pos][1] == ">":
        pos += 1
    else:
        while True:
            # split at top-level commas: brackets may contain commas of their own
            depth = 0
            start = pos
            while pos < len(tokens):
                v = tokens[pos][1]
                if v in "([":
                    depth += 1
                elif v in ")]":
                    depth -= 1
                elif depth == 0 and v in (",", ">"):
                    break
                pos += 1
            if pos >= len(tokens):
                raise ParseError("expected '>'", len(text))
            chunk = tokens[start:pos]
            if not chunk:
                raise ParseError("empty relator", tokens[pos][2])
            parser = WordParser(chunk, alphabet, tokens[pos][2])
            w = parser.expr()
            if parser.peek() is not None and parser.peek()[1] == "=":
                parser.i += 1
                w = w * invert(parser.expr())
            if parser.peek() is not None:
                raise ParseError(f"unexpected token {parser.peek()[1]!r}", parser.position())
            if not canonical_relator(w):
                raise PresentationError(f"relator at position {chunk[0][2]} is trivial after reduction")
            relators.append(w)
            sep = tokens[pos][1]
            pos += 1
            if sep == ">":
                break
    if pos != len(tokens):
        raise ParseError("trailing input", tokens[pos][2])
    return Presentation(alphabet, relators)


# --- integer matrices and abelianization --------------------------------------


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entries length must equal rows * cols")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        if any(len(r) != cols for r in rows):
            raise ValueError("ragged matrix")
        return cls(len(rows), cols, tuple(int(x) for r in rows for x in r))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)], n)

    def to_rows(self) -> list[list[int]]:
        return [list(self.entries[i * self.cols:(i + 1) * self.cols]) for i in range(self.rows)]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        a, b = self.to_rows(), other.to_rows()
        out = [[sum(a[i][k] * b[k][j] for k in range(self.cols)) for j in range(other.cols)] for i in range(self.rows)]
        return IntMatrix.from_rows(out, other.cols)

    def diagonal(self) -> list[int]:
        return [self[i, i] for i in range(min(self.rows, self.cols))]


def smith_normal_form(M: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(D, left, right)`` with ``left @ M @ right == D`` in Smith form."""
    m, n = M.rows, M.cols
    A = M.to_rows()
    L = IntMatrix.identity(m).to_rows()
    R = IntMatrix.identity(n).to_rows()

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        L[i], L[j] = L[j], L[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in R:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, c):
        A[dst] = [x + c * y for x, y in zip(A[dst], A[src])]
        L[dst] = [x + c * y for x, y in zip(L[dst], L[src])]

    def add_col(dst, src, c):
        for row in A:
            row[dst] += c * row[src]
        for row in R:
            row[dst] += c * row[src]

    for t in range(min(m, n)):
        cells = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not cells:
            break
        _, i, j = min(cells)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            line = [(abs(A[i][t]), i, t) for i in range(t, m) if A[i][t]]
            line += [(abs(A[t][j]), t, j) for j in range(t + 1, n) if A[t][j]]
            _, i, j = min(line)
            if i != t:
                swap_rows(t, i)
            if j != t:
                swap_cols(t, j)
            p = A[t][t]
            clean = True
            for i in range(t + 1, m):
                q = A[i][t] // p
                if q:
                    add_row(i, t, -q)
                clean &= A[i][t] == 0
            for j in range(t + 1, n):
                q = A[t][j] // p
                if q:
                    add_col(j, t, -q)
                clean &= A[t][j] == 0
            if not clean:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            L[t] = [-x for x in L[t]]
    return IntMatrix.from_rows(A, n), IntMatrix.from_rows(L, m), IntMatrix.from_rows(R, n)


@dataclass(frozen=True)
class AbelianInvariants:
    torsion: tuple[int, ...]
    free_rank: int

    def __str__(self):
        parts = [f"C{d}" for d in self.torsion] + (["Z^%d" % self.free_rank] if self.free_rank else [])
        return " x ".join(parts) if parts else "1"

    def to_json(self) -> dict:
        return {"torsion": list(self.torsion), "free_rank": self.free_rank}


def exponent_matrix(P: Presentation) -> IntMatrix:
    n = len(P.alphabet)
    return IntMatrix.from_rows([[r.exponent_sum(g) for g in range(n)] for r in P.relators], n)


def abelianization(P: Presentation) -> AbelianInvariants:
    n = len(P.alphabet)
    D, _, _ = smith_normal_form(exponent_matrix(P))
    diag = [d for d in D.diagonal() if d]
    return AbelianInvariants(tuple(d for d in diag if d > 1), n - len(diag))


# --- Tietze transformations ---------------------------------------------------


def _gen_index(P: Presentation, gen) -> int:
    return P.alphabet.index(gen) if isinstance(gen, str) else gen


def tietze_eliminate(P: Presentation, gen, relator_index: int) -> Presentation:
    """Solve relator ``relator_index`` for ``gen`` and substitute everywhere else."""
    g = _gen_index(P, gen)
    if not 0 <= relator_index < len(P.relators):
        raise PresentationError(f"no relator with index {relator_index}")
    r = P.relators[relator_index]
    letters = _letters(r)
    hits = [i for i, (x, _) in enumerate(letters) if x == g]
    if len(hits) != 1:
        raise PresentationError(
            f"generator {P.alphabet.names[g]} occurs {len(hits)} times in relator {format_relator(r)}"
        )
    i = hits[0]
    sign = letters[i][1]
    rest = reduce(P.alphabet, letters[i + 1:] + letters[:i])
    # g^sign * rest = 1
    value = invert(rest) if sign > 0 else rest
    target = P.alphabet.without(g)
    images = []
    for j in range(len(P.alphabet)):
        if j == g:
            images.append(None)
        else:
            images.append(target.gen(P.alphabet.names[j]))
    images[g] = relabel(value, target, [(j - (j > g), 1) if j != g else (0, 0) for j in range(len(P.alphabet))])
    rels = [substitute(w, images, target) for k, w in enumerate(P.relators) if k != relator_index]
    return Presentation(target, rels)


def _as_map(P: Presentation, mapping: Mapping) -> list[Word]:
    images = list(P.alphabet.gens())
    for key, img in mapping.items():
        if isinstance(img, str):
            img = P.alphabet.word(img)
        images[_gen_index(P, key)] = img
    return images


def tietze_substitute(P: Presentation, mapping: Mapping, inverse: Mapping) -> Presentation:
    """Rewrite relators through a free-group automorphism.

    ``mapping`` and ``inverse`` send generators (names or indices) to words;
    unspecified generators are fixed.  Both compositions are checked to be the
    identity on generators before the relators are rewritten.
    """
    fwd = _as_map(P, mapping)
    bwd = _as_map(P, inverse)
    for g, x in enumerate(P.alphabet.gens()):
        if substitute(fwd[g], bwd, P.alphabet) != x or substitute(bwd[g], fwd, P.alphabet) != x:
            raise PresentationError(f"supplied inverse does not undo the substitution on {P.alphabet.names[g]}")
    return Presentation(P.alphabet, [substitute(r, fwd, P.alphabet) for r in P.relators])


def commuting_pairs(relators: Iterable[Word]) -> set[frozenset[int]]:
    """Generator pairs ``{x, y}`` with ``[x, y]`` among the relators."""
    out = set()
    for r in relators:
        s = r.syllables
        if (
            len(s) == 4
            and all(abs(e) == 1 for _, e in s)
            and s[2] == (s[0][0], -s[0][1])
            and s[3] == (s[1][0], -s[1][1])
        ):
            out.add(frozenset((s[0][0], s[1][0])))
    return out


def _shuffle_cancel(r: Word, pairs: set[frozenset[int]], max_conjugates: int) -> Word | None:
    """Cancel one pair ``z ... z^-1`` whose separating letters all commute with ``z``."""
    L = _letters(r)
    n = len(L)
    for i in range(n):
        z, e = L[i]
        moved = 0
        for step in range(1, n):
            y, f = L[(i + step) % n]
            if y == z and f == -e:
                if moved == 0 or moved > max_conjugates:
                    break
                j = (i + step) % n
                keep = [L[k] for k in range(n) if k not in (i, j)]
                return reduce(r.alphabet, keep)
            if y == z:
                break
            if frozenset((y, z)) not in pairs:
                break
            moved += 1
    return None


def _piece_replace(r: Word, s: Word) -> Word | None:
    """Replace more than half of a rotation of ``s^(+-1)`` inside cyclic ``r``."""
    R = _letters(r)
    n = len(R)
    k = len(s)
    cands = []
    for base in (s, invert(s)):
        S = _letters(base)
        for t in range(k):
            cands.append(S[t:] + S[:t])
    for length in range(k, k // 2, -1):
        if length > n:
            continue
        for S in cands:
            piece = S[:length]
            for pos in range(n):
                if all(R[(pos + q) % n] == piece[q] for q in range(length)):
                    others = [R[(pos + length + q) % n] for q in range(n - length)]
                    repl = [(g, -e) for g, e in reversed(S[length:])]
                    return reduce(r.alphabet, repl + others)
    return None


@dataclass
class TietzeStep:
    kind: str
    detail: str
    invariants: AbelianInvariants | None = None
    presentation: Presentation | None = None

    def to_json(self) -> dict:
        out = {"kind": self.kind, "detail": self.detail}
        if self.invariants is not None:
            out["abelianization"] = self.invariants.to_json()
        if self.presentation is not None:
            out["presentation"] = format_presentation(self.presentation)
        return out


@dataclass
class SimplifyResult:
    presentation: Presentation
    steps: list[TietzeStep] = field(default_factory=list)
    exhausted: bool = False
    invariants_ok: bool = True


def _elimination_candidate(P: Presentation):
    best = None
    for k, r in enumerate(P.relators):
        for g in sorted(r.generators_used()):
            if r.occurrences(g) != 1:
                continue
            growth = sum(w.occurrences(g) for j, w in enumerate(P.relators) if j != k) * (len(r) - 2)
            key = (len(r), growth, r.shortlex_key(), -g)
            if best is None or key < best[0]:
                best = (key, g, k)
    return None if best is None else best[1:]


def _shorten_once(P: Presentation, max_conjugates: int):
    rels = list(P.relators)
    for k, r in enumerate(rels):
        others = rels[:k] + rels[k + 1:]
        new = _shuffle_cancel(r, commuting_pairs(others), max_conjugates)
        if new is not None:
            return k, new, "commutation"
        for s in sorted(others, key=len):
            new = _piece_replace(r, s)
            if new is not None and len(canonical_relator(new)) < len(r):
                return k, new, f"substitution of {format_relator(s)}"
    return None


def tietze_simplify(
    P: Presentation,
    budget: int = 10000,
    max_conjugates: int = 4,
    check_invariants: bool = True,
) -> SimplifyResult:
    """Simplify by generator elimination and relator shortening.

    Rules run in a fixed order until nothing applies or the step budget runs
    out: drop trivial and duplicate relators, eliminate a generator occurring
    once in a relator (shortest relator first), then shorten one relator using
    the others.  With ``check_invariants`` the abelianization is recomputed
    after every step and compared with the input's.
    """
    start = abelianization(P) if check_invariants else None
    result = SimplifyResult(P)
    steps = 0
    while True:
        if steps >= budget:
            result.exhausted = True
            break
        cand = _elimination_candidate(P)
        if cand is not None:
            g, k = cand
            name = P.alphabet.names[g]
            relator = format_relator(P.relators[k])
            P = tietze_eliminate(P, g, k)
            step = TietzeStep("eliminate", f"{name} via {relator}")
        else:
            short = _shorten_once(P, max_conjugates)
            if short is None:
                break
            k, new, how = short
            old = P.relators[k]
            rels = list(P.relators)
            rels[k] = new
            P = Presentation(P.alphabet, rels)
            step = TietzeStep("shorten", f"{format_relator(old)} -> {format_relator(canonical_relator(new))} by {how}")
        steps += 1
        if check_invariants:
            step.invariants = abelianization(P)
            if step.invariants != start:
                result.invariants_ok = False
                log.error("abelianization changed at step %s", step.detail)
        result.steps.append(step)
    result.presentation = P
    return result


def apply_script(P: Presentation, script: Sequence[Mapping], check_invariants: bool = True) -> SimplifyResult:
    """Replay an explicit move list.

    Moves are ``{"eliminate": name, "relator": text}`` (the relator is located
    up to rotation and inversion) or ``{"substitute": {...}, "inverse": {...}}``.
    Every move goes through the validated Tietze primitives.
    """
    start = abelianization(P) if check_invariants else None
    result = SimplifyResult(P)
    for move in script:
        if "eliminate" in move:
            target = canonical_relator(_parse_relexpr(move["relator"], P.alphabet))
            try:
                k = [r.syllables for r in P.relators].index(target.syllables)
            except ValueError:
                raise PresentationError(f"relator {move['relator']!r} not present in {P}") from None
            P = tietze_eliminate(P, move["eliminate"], k)
            step = TietzeStep("eliminate", f"{move['eliminate']} via {move['relator']}")
        elif "substitute" in move:
            P = tietze_substitute(P, move["substitute"], move["inverse"])
            step = TietzeStep("substitute", json.dumps(move["substitute"], sort_keys=True))
        else:
            raise PresentationError(f"unknown move {move!r}")
        if check_invariants:
            step.invariants = abelianization(P)
            if step.invariants != start:
                result.invariants_ok = False
        result.steps.append(step)
    result.presentation = P
    return result


# --- recognising RAAG and RABSAG presentations ---------------------------------


def detect_raag(P: Presentation) -> nx.Graph | None:
    """The commutation graph, if every relator is a commutator of two generators."""
    if len(commuting_pairs(P.relators)) != len(P.relators):
        return None
    G = nx.Graph()
    G.add_nodes_from(P.generators)
    for pair in commuting_pairs(P.relators):
        x, y = sorted(pair)
        G.add_edge(P.generators[x], P.generators[y])
    return G


def detect_rabsag(P: Presentation, diagnostics: list[str] | None = None):
    """The labelled digraph, if every relator has the shape ``[u, v^m]``.

    Returns ``None`` otherwise; reasons are appended to ``diagnostics``.
    """
    from .graphs import Edge, LabelledDigraph

    def fail(msg):
        if diagnostics is not None:
            diagnostics.append(msg)
        return None

    names = P.generators
    edges = {}
    for r in P.relators:
        s = r.syllables
        if not (len(s) == 4 and s[2] == (s[0][0], -s[0][1]) and s[3] == (s[1][0], -s[1][1])):
            return fail(f"relator {format_relator(r)} is not of the form [u, v^m]")
        (x, e), (y, f) = s[0], s[1]
        if abs(e) == 1:
            u, m, v = x, abs(f), y
        elif abs(f) == 1:
            u, m, v = y, abs(e), x
        else:
            return fail(f"relator {format_relator(r)} has both exponents of size > 1")
        if m == 1 and u > v:
            u, v = v, u
        pair = frozenset((u, v))
        if pair in edges:
            return fail(f"two relations on the pair {names[u]}, {names[v]}")
        edges[pair] = Edge(names[u], m, names[v], negative=(e * f < 0 and m > 1))
    return LabelledDigraph(names, sorted(edges.values(), key=lambda ed: (names.index(ed.u), names.index(ed.v))))


# --- matching presentations up to relabelling ----------------------------------


@dataclass
class MatchReport:
    matched: bool
    relabeling: dict[str, tuple[str, int]] | None
    evidence: list[str]

    @property
    def verdict(self) -> str:
        return "matched" if self.matched else "inconclusive"

    def to_json(self) -> dict:
        return {
            "matched": self.matched,
            "verdict": self.verdict,
            "relabeling": None
            if self.relabeling is None
            else {k: (v if s > 0 else f"{v}^-1") for k, (v, s) in self.relabeling.items()},
            "evidence": self.evidence,
        }


def _cyclic_variants(w: Word) -> list[list[tuple[int, int]]]:
    out = []
    for base in (w, invert(w)):
        L = _letters(base)
        out.extend(L[t:] + L[:t] for t in range(len(L)))
    return out


def find_relabeling(P: Presentation, Q: Presentation) -> list[tuple[int, int]] | None:
    """A signed generator bijection carrying P's relators onto Q's (up to rotation/inversion)."""
    n = len(P.alphabet)
    if n != len(Q.alphabet) or len(P.relators) != len(Q.relators):
        return None
    if sorted(len(r) for r in P.relators) != sorted(len(r) for r in Q.relators):
        return None

    def profile(r: Word):
        return sorted(abs(e) for _, e in r.syllables)

    prels = sorted(P.relators, key=lambda r: (-len(r), r.shortlex_key()))
    qvariants = [_cyclic_variants(r) for r in Q.relators]
    qprof = [profile(r) for r in Q.relators]
    fwd: dict[int, tuple[int, int]] = {}
    used_q: set[int] = set()

    def extend(k: int, used_rel: frozenset) -> bool:
        if k == len(prels):
            return True
        rp = _letters(prels[k])
        prof = profile(prels[k])
        for qi, variants in enumerate(qvariants):
            if qi in used_rel or len(variants[0]) != len(rp) or qprof[qi] != prof:
                continue
            for var in variants:
                added = []
                ok = True
                for (g, s), (h, t) in zip(rp, var):
                    want = (h, s * t)
                    if g in fwd:
                        if fwd[g] != want:
                            ok = False
                            break
                    elif h in used_q:
                        ok = False
                        break
                    else:
                        fwd[g] = want
                        used_q.add(h)
                        added.append(g)
                if ok and extend(k + 1, used_rel | {qi}):
                    return True
                for g in added:
                    used_q.discard(fwd.pop(g)[0])
        return False

    if not extend(0, frozenset()):
        return None
    free_p = [g for g in range(n) if g not in fwd]
    free_q = [h for h in range(n) if h not in used_q]
    for g, h in zip(free_p, free_q):
        fwd[g] = (h, 1)
    return [fwd[g] for g in range(n)]


def presentations_match(P: Presentation, Q: Presentation, budget: int = 10000) -> MatchReport:
    """Search for a relabelling certificate that P and Q present the same group.

    A positive answer is a proof of isomorphism.  A negative answer only
    means no certificate was found.
    """
    evidence = []
    ab_p, ab_q = abelianization(P), abelianization(Q)
    evidence.append(
        f"abelianization {'agrees' if ab_p == ab_q else 'differs'}: {ab_p} vs {ab_q}"
    )
    candidates = [("as given", P, Q)]
    if ab_p == ab_q:
        sp = tietze_simplify(P, budget).presentation
        sq = tietze_simplify(Q, budget).presentation
        candidates.append(("after simplification", sp, sq))
    for label, A, B in candidates:
        mapping = find_relabeling(A, B)
        evidence.append(
            f"{label}: {len(A.alphabet)} vs {len(B.alphabet)} generators, "
            f"{len(A.relators)} vs {len(B.relators)} relators, "
            + ("relabelling found" if mapping else "no relabelling")
        )
        if mapping is not None:
            relab = {A.generators[g]: (B.generators[h], s) for g, (h, s) in enumerate(mapping)}
            return MatchReport(True, relab, evidence)
    evidence.append("inconclusive: no certificate found, which does not prove non-isomorphism")
    return MatchReport(False, None, evidence)
