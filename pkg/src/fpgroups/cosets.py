"""Coset enumeration (Todd-Coxeter, HLT strategy) and Schreier transversals.

Cosets are numbered from 0 internally; the subgroup itself is coset 0.  The
JSON form and all user-facing names use 1-based numbers.  Table columns are
ordered ``a, a^-1, b, b^-1, ...``, i.e. column ``2g`` is generator ``g`` and
column ``2g + 1`` is its inverse.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping, Sequence

from .freewords import Alphabet, Word, reduce
from .presentations import Presentation

UNDEF = -1


class CosetOverflow(RuntimeError):
    """The enumeration exceeded its coset or definition limit."""


class TableError(ValueError):
    pass


def column(letter: tuple[int, int]) -> int:
    g, s = letter
    return 2 * g + (0 if s > 0 else 1)


def column_letter(col: int) -> tuple[int, int]:
    return (col // 2, 1 if col % 2 == 0 else -1)


def column_name(alphabet: Alphabet, col: int) -> str:
    name = alphabet.names[col // 2]
    return name if col % 2 == 0 else f"{name}^-1"


@dataclass(frozen=True)
class CosetTable:
    alphabet: Alphabet
    rows: tuple[tuple[int, ...], ...]

    @property
    def index(self) -> int:
        return len(self.rows)

    def __len__(self):
        return len(self.rows)

    def act(self, coset: int, letter: tuple[int, int]) -> int:
        return self.rows[coset][column(letter)]

    def act_word(self, coset: int, w: Word) -> int:
        for letter in w.letters():
            coset = self.rows[coset][column(letter)]
            if coset == UNDEF:
                return UNDEF
        return coset

    def is_complete(self) -> bool:
        return all(x != UNDEF for row in self.rows for x in row)

    def check(self, P: Presentation | None = None, subgroup: Sequence[Word] = ()) -> None:
        """Raise ``TableError`` unless the table is a consistent permutation action.

        With ``P`` every relator must fix every coset; every subgroup
        generator must fix coset 0.
        """
        n = len(self.rows)
        for c, row in enumerate(self.rows):
            if len(row) != 2 * len(self.alphabet):
                raise TableError("row width does not match alphabet")
            for col, d in enumerate(row):
                if not 0 <= d < n:
                    raise TableError(f"entry ({c}, {column_name(self.alphabet, col)}) undefined")
                if self.rows[d][col ^ 1] != c:
                    raise TableError(f"column {column_name(self.alphabet, col)} is not inverse to its partner")
        if P is not None:
            for r in P.relators:
                for c in range(n):
                    if self.act_word(c, r) != c:
                        raise TableError(f"relator {r} does not fix coset {c + 1}")
        for h in subgroup:
            if self.act_word(0, h) != 0:
                raise TableError(f"subgroup generator {h} does not fix the base coset")

    def to_json(self) -> dict:
        action = {}
        for col in range(2 * len(self.alphabet)):
            action[column_name(self.alphabet, col)] = [row[col] + 1 for row in self.rows]
        return {"n": len(self.rows), "generators": list(self.alphabet.names), "action": action}

    @classmethod
    def from_json(cls, data: Mapping, alphabet: Alphabet | None = None) -> "CosetTable":
        if alphabet is None:
            alphabet = Alphabet(data["generators"])
        n = data["n"]
        cols = []
        for col in range(2 * len(alphabet)):
            name = column_name(alphabet, col)
            if name in data["action"]:
                cols.append([x - 1 for x in data["action"][name]])
            else:
                fwd = data["action"][column_name(alphabet, col ^ 1)]
                inv = [UNDEF] * n
                for c, d in enumerate(fwd):
                    inv[d - 1] = c
                cols.append(inv)
        table = cls(alphabet, tuple(tuple(cols[k][c] for k in range(len(cols))) for c in range(n)))
        table.check()
        return table


class _Enumerator:
    def __init__(self, ncols: int, max_cosets: int, max_definitions: int):
        self.ncols = ncols
        self.table: list[list[int]] = [[UNDEF] * ncols]
        self.parent = [0]
        self.live = 1
        self.max_cosets = max_cosets
        self.max_definitions = max_definitions
        self.queue: deque[int] = deque()

    def find(self, c: int) -> int:
        root = c
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[c] != root:
            self.parent[c], c = root, self.parent[c]
        return root

    def alive(self, c: int) -> bool:
        return self.parent[c] == c

    def define(self, c: int, x: int) -> None:
        if self.live >= self.max_cosets:
            raise CosetOverflow(f"more than {self.max_cosets} live cosets")
        if len(self.table) >= self.max_definitions:
            raise CosetOverflow(f"more than {self.max_definitions} coset definitions")
        d = len(self.table)
        self.table.append([UNDEF] * self.ncols)
        self.parent.append(d)
        self.live += 1
        self.table[c][x] = d
        self.table[d][x ^ 1] = c

    def merge(self, a: int, b: int) -> None:
        a, b = self.find(a), self.find(b)
        if a == b:
            return
        if a > b:
            a, b = b, a
        self.parent[b] = a
        self.live -= 1
        self.queue.append(b)

    def coincidence(self, a: int, b: int) -> None:
        self.merge(a, b)
        while self.queue:
            e = self.queue.popleft()
            for x in range(self.ncols):
                f = self.table[e][x]
                if f == UNDEF:
                    continue
                self.table[f][x ^ 1] = UNDEF
                e1, f1 = self.find(e), self.find(f)
                if self.table[e1][x] != UNDEF:
                    self.merge(f1, self.table[e1][x])
                elif self.table[f1][x ^ 1] != UNDEF:
                    self.merge(e1, self.table[f1][x ^ 1])
                else:
                    self.table[e1][x] = f1
                    self.table[f1][x ^ 1] = e1

    def scan_and_fill(self, c: int, w: Sequence[int]) -> None:
        T = self.table
        f = b = c
        i, j = 0, len(w) - 1
        while True:
            while i <= j and T[f][w[i]] != UNDEF:
                f = T[f][w[i]]
                i += 1
            if i > j:
                if f != b:
                    self.coincidence(f, b)
                return
            while j >= i and T[b][w[j] ^ 1] != UNDEF:
                b = T[b][w[j] ^ 1]
                j -= 1
            if j < i:
                self.coincidence(f, b)
                return
            if j == i:
                T[f][w[i]] = b
                T[b][w[i] ^ 1] = f
                return
            self.define(f, w[i])


def todd_coxeter(
    P: Presentation,
    subgroup: Sequence[Word] = (),
    max_cosets: int = 100000,
    max_definitions: int | None = None,
) -> CosetTable:
    """Enumerate the cosets of ``<subgroup>`` in the group presented by ``P``.

    Raises ``CosetOverflow`` when more than ``max_cosets`` cosets are alive at
    once or more than ``max_definitions`` (default ``20 * max_cosets``) have
    been made in total; infinite index therefore always ends in overflow.
    The completed table is renumbered by breadth-first search from coset 0.
    """
    for h in subgroup:
        if h.alphabet != P.alphabet:
            raise ValueError(f"subgroup generator {h} is not over {P.alphabet}")
    if max_definitions is None:
        max_definitions = 20 * max_cosets
    ncols = 2 * len(P.alphabet)
    en = _Enumerator(ncols, max_cosets, max_definitions)
    rels = [[column(x) for x in r.letters()] for r in P.relators]
    for h in subgroup:
        en.scan_and_fill(0, [column(x) for x in h.letters()])
    c = 0
    while c < len(en.table):
        for r in rels:
            if not en.alive(c):
                break
            en.scan_and_fill(c, r)
        if en.alive(c):
            for x in range(ncols):
                if en.table[c][x] == UNDEF:
                    en.define(c, x)
        c += 1
    return _standardize(P.alphabet, en)


def _standardize(alphabet: Alphabet, en: _Enumerator) -> CosetTable:
    order = {0: 0}
    queue = deque([0])
    while queue:
        c = queue.popleft()
        for x in range(en.ncols):
            d = en.find(en.table[c][x])
            if d not in order:
                order[d] = len(order)
                queue.append(d)
    rows = [None] * len(order)
    for c, k in order.items():
        rows[k] = tuple(order[en.find(en.table[c][x])] for x in range(en.ncols))
    return CosetTable(alphabet, tuple(rows))


def permutation_table(alphabet: Alphabet, perms: Mapping[str, Sequence[int]]) -> CosetTable:
    """Build a table from 0-based permutations, one per generator."""
    n = len(next(iter(perms.values())))
    rows = [[UNDEF] * (2 * len(alphabet)) for _ in range(n)]
    for name, perm in perms.items():
        g = alphabet.index(name)
        if sorted(perm) != list(range(n)):
            raise TableError(f"action of {name} is not a permutation")
        for c, d in enumerate(perm):
            rows[c][2 * g] = d
            rows[d][2 * g + 1] = c
    table = CosetTable(alphabet, tuple(tuple(r) for r in rows))
    table.check()
    return table


# --- transversals -------------------------------------------------------------


@dataclass(frozen=True)
class Transversal:
    """Coset representatives as a spanning tree rooted at coset 0.

    ``parent[c]`` is ``(coset, letter)`` with ``rep(c) = rep(coset) * letter``.
    """

    table: CosetTable
    parent: tuple[tuple[int, tuple[int, int]] | None, ...]
    reps: tuple[Word, ...]

    def __len__(self):
        return len(self.reps)

    def coset_of(self, w: Word) -> int:
        return self.table.act_word(0, w)


def schreier_transversal(table: CosetTable, letters: str = "positive") -> Transversal:
    """Breadth-first spanning tree, giving shortlex-least representatives.

    With ``letters="positive"`` only generators (not inverses) label tree
    edges; over a complete table they still reach every coset because each
    generator permutes a finite set.  ``letters="all"`` allows inverses too.
    """
    if letters not in ("positive", "all"):
        raise ValueError("letters must be 'positive' or 'all'")
    if not table.is_complete():
        raise TableError("transversal needs a complete table")
    cols = range(0, 2 * len(table.alphabet), 2 if letters == "positive" else 1)
    n = len(table)
    parent: list = [None] * n
    reps: list = [None] * n
    reps[0] = table.alphabet.identity()
    queue = deque([0])
    while queue:
        c = queue.popleft()
        for col in cols:
            d = table.rows[c][col]
            if reps[d] is None:
                letter = column_letter(col)
                parent[d] = (c, letter)
                reps[d] = reduce(table.alphabet, reps[c].syllables + (letter,))
                queue.append(d)
    if any(r is None for r in reps):
        raise TableError("generators do not reach every coset")
    return Transversal(table, tuple(parent), tuple(reps))


def representative(table: CosetTable, T: Transversal, w: Word) -> Word:
    """The representative of the coset reached by tracing ``w`` from coset 0."""
    return T.reps[table.act_word(0, w)]


def transversal_problems(table: CosetTable, reps) -> list[str]:
    """Violations of the Schreier transversal conditions; empty when ``reps`` is valid.

    ``reps`` is a ``Transversal`` or a list of words indexed by coset.
    """
    if isinstance(reps, Transversal):
        reps = reps.reps
    reps = list(reps)
    problems = []
    if len(reps) != len(table):
        return [f"{len(reps)} representatives for {len(table)} cosets"]
    if reps[0]:
        problems.append("the base coset is not represented by the empty word")
    known = {w.syllables for w in reps}
    for c, w in enumerate(reps):
        if table.act_word(0, w) != c:
            problems.append(f"representative {w} does not lead to coset {c + 1}")
        letters = list(w.letters())
        for k in range(len(letters)):
            prefix = reduce(w.alphabet, letters[:k])
            if prefix.syllables not in known:
                problems.append(f"representative {w} has prefix {prefix} outside the transversal")
                break
    if len(known) != len(reps):
        problems.append("representatives repeated")
    return problems


def validate_transversal(table: CosetTable, reps) -> bool:
    return not transversal_problems(table, reps)
