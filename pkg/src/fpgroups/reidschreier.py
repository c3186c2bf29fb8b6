"""Reidemeister-Schreier rewriting.

Given a complete coset table for ``H`` in ``G = <X | R>`` and a Schreier
transversal ``T``, the Schreier generators are ``s(t, a) = t a rep(t a)^-1``
for ``t`` in ``T`` and ``a`` in ``X``.  Those lying on the spanning tree
freely reduce to the identity and are dropped.  ``H`` is presented on the
remaining symbols by the rewrites of ``t r t^-1`` for all ``t`` and ``r``.

Symbols are named ``s_<coset>_<generator>`` with 1-based cosets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .cosets import CosetTable, Transversal, schreier_transversal, todd_coxeter, transversal_problems
from .freewords import Alphabet, Word, invert, product, reduce, substitute
from .presentations import Presentation


@dataclass(frozen=True)
class SchreierGen:
    coset: int
    gen: int
    name: str
    word: Word
    trivial: bool


@dataclass(frozen=True)
class TraceStep:
    letter: str
    before: int
    after: int
    emitted: str | None

    def to_json(self) -> dict:
        return {"letter": self.letter, "from": self.before + 1, "to": self.after + 1, "emits": self.emitted}


def schreier_generators(table: CosetTable, T: Transversal) -> list[SchreierGen]:
    X = table.alphabet
    out = []
    for c in range(len(table)):
        for g in range(len(X)):
            d = table.rows[c][2 * g]
            w = reduce(X, T.reps[c].syllables + ((g, 1),) + invert(T.reps[d]).syllables)
            out.append(SchreierGen(c, g, f"s_{c + 1}_{X.names[g]}", w, not w))
    return out


@dataclass
class Rewriter:
    """The rewriting map tau onto the nontrivial Schreier generators."""

    table: CosetTable
    transversal: Transversal
    gens: list[SchreierGen] = field(init=False)
    alphabet: Alphabet = field(init=False)

    def __post_init__(self):
        self.gens = schreier_generators(self.table, self.transversal)
        live = [s for s in self.gens if not s.trivial]
        self.alphabet = Alphabet(s.name for s in live)
        self._symbol = {}
        for s in live:
            self._symbol[(s.coset, s.gen)] = self.alphabet.index(s.name)

    def symbol(self, coset: int, gen: int) -> int | None:
        return self._symbol.get((coset, gen))

    def tau(self, w: Word, start: int = 0, trace: list[TraceStep] | None = None) -> tuple[Word, int]:
        """Rewrite ``w`` read from coset ``start``; returns the image and the end coset.

        A letter ``a`` read at coset ``c`` emits ``s(c, a)``.  A letter
        ``a^-1`` taking ``c`` to ``c'`` emits ``s(c', a)^-1``.
        """
        X = self.table.alphabet
        c = start
        raw = []
        for g, s in w.letters():
            if s > 0:
                d = self.table.rows[c][2 * g]
                k = self.symbol(c, g)
            else:
                d = self.table.rows[c][2 * g + 1]
                k = self.symbol(d, g)
            if k is not None:
                raw.append((k, s))
            if trace is not None:
                name = None if k is None else self.alphabet.names[k] + ("" if s > 0 else "^-1")
                trace.append(TraceStep(X.names[g] + ("" if s > 0 else "^-1"), c, d, name))
            c = d
        return reduce(self.alphabet, raw), c

    def express(self, w: Word) -> Word:
        """Write an element of ``H`` in the Schreier generators."""
        image, end = self.tau(w)
        if end != 0:
            raise ValueError(f"{w} does not lie in the subgroup")
        return image

    def lift(self, u: Word) -> Word:
        """Map a word in the Schreier generators back to the ambient free group."""
        images = [s.word for s in self.gens if not s.trivial]
        return substitute(u, images, self.table.alphabet)


def rewrite_tau(w: Word, table: CosetTable, T: Transversal, start: int = 0, trace: list | None = None) -> Word:
    return Rewriter(table, T).tau(w, start, trace)[0]


@dataclass
class SubgroupPresentation:
    presentation: Presentation
    table: CosetTable
    transversal: Transversal
    rewriter: Rewriter
    group: Presentation
    images: list[tuple[int, int, Word]]
    traces: list[list[TraceStep]] | None = None

    @property
    def index(self) -> int:
        return len(self.table)

    def generator_words(self) -> dict[str, Word]:
        return {s.name: s.word for s in self.rewriter.gens if not s.trivial}

    def to_json(self) -> dict:
        T = self.transversal
        out = {
            "index": self.index,
            "transversal": [str(w) for w in T.reps],
            "generators": {k: str(v) for k, v in self.generator_words().items()},
            "presentation": self.presentation.to_json(),
            "coset_table": self.table.to_json(),
        }
        if self.traces is not None:
            out["traces"] = [
                {
                    "coset": c + 1,
                    "relator": str(self.group.relators[k]),
                    "image": str(w),
                    "steps": [s.to_json() for s in st],
                }
                for (c, k, w), st in zip(self.images, self.traces)
            ]
        return out


def subgroup_presentation(
    P: Presentation,
    subgroup: Sequence[Word],
    max_cosets: int = 100000,
    letters: str = "positive",
    trace: bool = False,
) -> SubgroupPresentation:
    """Reidemeister-Schreier presentation of the subgroup generated by ``subgroup``.

    Rewriting ``t r t^-1`` from coset 0 equals rewriting ``r`` from the coset
    of ``t``: the transversal prefix contributes only tree symbols, which are
    trivial.  The relators are computed the second way.
    """
    table = todd_coxeter(P, subgroup, max_cosets=max_cosets)
    T = schreier_transversal(table, letters)
    problems = transversal_problems(table, T)
    if problems:
        raise RuntimeError("; ".join(problems))
    rw = Rewriter(table, T)
    raw = []
    traces = [] if trace else None
    for c in range(len(table)):
        for k, r in enumerate(P.relators):
            st = [] if trace else None
            image, end = rw.tau(r, c, st)
            if end != c:
                raise RuntimeError(f"relator {r} does not close at coset {c + 1}")
            raw.append((c, k, image))
            if trace:
                traces.append(st)
    pres = Presentation(rw.alphabet, [w for _, _, w in raw])
    return SubgroupPresentation(pres, table, T, rw, P, raw, traces)


def conjugate_relator(t: Word, r: Word) -> Word:
    return product(t.alphabet, [t, r, invert(t)])
