"""Words in free groups.

A word is stored in syllable form: a tuple of ``(generator index, exponent)``
pairs with no zero exponents and no two adjacent syllables on the same
generator.  Words are immutable and every operation returns a new word.

Conventions follow the rest of the package: ``x^y = y x y^-1`` and
``[x, y] = x y x^-1 y^-1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


class WordError(ValueError):
    """Raised for malformed words or alphabet mismatches."""


@dataclass(frozen=True)
class Alphabet:
    names: tuple[str, ...]

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        for name in names:
            if not isinstance(name, str) or not NAME_RE.match(name):
                raise WordError(f"invalid generator name {name!r}")
        if len(set(names)) != len(names):
            raise WordError(f"duplicate generator names in {names}")
        object.__setattr__(self, "names", names)

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __repr__(self):
        return f"Alphabet({list(self.names)})"

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise WordError(f"unknown generator {name!r}") from None

    def gen(self, name_or_index) -> "Word":
        i = name_or_index if isinstance(name_or_index, int) else self.index(name_or_index)
        return reduce(self, [(i, 1)])

    def gens(self) -> list["Word"]:
        return [self.gen(i) for i in range(len(self))]

    def identity(self) -> "Word":
        return Word(self, ())

    def word(self, text: str) -> "Word":
        return parse_word(text, self)

    def without(self, index: int) -> "Alphabet":
        return Alphabet(n for i, n in enumerate(self.names) if i != index)


@dataclass(frozen=True)
class Word:
    alphabet: Alphabet
    syllables: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prev = None
        n = len(self.alphabet)
        for g, e in self.syllables:
            if not 0 <= g < n:
                raise WordError(f"generator index {g} out of range for {self.alphabet}")
            if e == 0 or g == prev:
                raise WordError(f"syllables {self.syllables} are not freely reduced")
            prev = g

    # --- views -----------------------------------------------------------

    def letters(self) -> Iterator[tuple[int, int]]:
        """Expand into single letters ``(gen, +1 | -1)``."""
        for g, e in self.syllables:
            s = 1 if e > 0 else -1
            for _ in range(abs(e)):
                yield (g, s)

    def __len__(self):
        return sum(abs(e) for _, e in self.syllables)

    def __bool__(self):
        return bool(self.syllables)

    def is_positive(self) -> bool:
        return all(e > 0 for _, e in self.syllables)

    def generators_used(self) -> set[int]:
        return {g for g, _ in self.syllables}

    def occurrences(self, gen: int) -> int:
        return sum(abs(e) for g, e in self.syllables if g == gen)

    def exponent_sum(self, gen: int) -> int:
        return sum(e for g, e in self.syllables if g == gen)

    def shortlex_key(self):
        return (len(self), tuple(letter_key(x) for x in self.letters()))

    def __lt__(self, other: "Word"):
        return self.shortlex_key() < other.shortlex_key()

    # --- algebra ---------------------------------------------------------

    def __mul__(self, other: "Word") -> "Word":
        return concat(self, other)

    def __invert__(self) -> "Word":
        return invert(self)

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return invert(self) ** (-n)
        out = self.alphabet.identity()
        for _ in range(n):
            out = concat(out, self)
        return out

    def inverse(self) -> "Word":
        return invert(self)

    def __str__(self):
        return format_word(self)

    def __repr__(self):
        return f"Word({format_word(self)!r})"


def letter_key(letter: tuple[int, int]) -> int:
    """Order letters by generator index, with ``g < g^-1``."""
    g, s = letter
    return 2 * g + (0 if s > 0 else 1)


def _push(out: list[list[int]], g: int, e: int):
    if e == 0:
        return
    if out and out[-1][0] == g:
        out[-1][1] += e
        if out[-1][1] == 0:
            out.pop()
    else:
        out.append([g, e])


def reduce(alphabet: Alphabet, raw: Iterable[tuple[int, int]]) -> Word:
    """Freely reduce a raw sequence of ``(gen, exponent)`` pairs."""
    n = len(alphabet)
    out: list[list[int]] = []
    for g, e in raw:
        if not isinstance(g, int) or not 0 <= g < n:
            raise WordError(f"generator index {g!r} out of range for {alphabet}")
        _push(out, g, int(e))
    return Word(alphabet, tuple((g, e) for g, e in out))


def from_letters(alphabet: Alphabet, letters: Iterable[tuple[int, int]]) -> Word:
    return reduce(alphabet, letters)


def _check_same(u: Word, v: Word):
    if u.alphabet != v.alphabet:
        raise WordError(f"alphabet mismatch: {u.alphabet} vs {v.alphabet}")


def invert(w: Word) -> Word:
    return Word(w.alphabet, tuple((g, -e) for g, e in reversed(w.syllables)))


def concat(u: Word, v: Word) -> Word:
    _check_same(u, v)
    return reduce(u.alphabet, u.syllables + v.syllables)


def product(alphabet: Alphabet, words: Iterable[Word]) -> Word:
    raw: list[tuple[int, int]] = []
    for w in words:
        if w.alphabet != alphabet:
            raise WordError(f"alphabet mismatch: {w.alphabet} vs {alphabet}")
        raw.extend(w.syllables)
    return reduce(alphabet, raw)


def conjugate(x: Word, y: Word) -> Word:
    """Return ``x^y = y x y^-1``."""
    _check_same(x, y)
    return reduce(x.alphabet, y.syllables + x.syllables + invert(y).syllables)


def commutator(x: Word, y: Word) -> Word:
    """Return ``[x, y] = x y x^-1 y^-1``."""
    _check_same(x, y)
    return reduce(x.alphabet, x.syllables + y.syllables + invert(x).syllables + invert(y).syllables)


def cyclically_reduce(w: Word) -> tuple[Word, Word]:
    """Split ``w`` as ``conjugator * core * conjugator^-1`` with ``core`` cyclically reduced.

    The core has at most one syllable or distinct first and last generators,
    so ``a^2 b a^3`` yields the core ``a^5 b``.
    """
    syl = [list(s) for s in w.syllables]
    left: list[tuple[int, int]] = []
    while len(syl) >= 2 and syl[0][0] == syl[-1][0]:
        g, e0 = syl[0]
        e1 = syl[-1][1]
        if (e0 > 0) == (e1 > 0) or abs(e0) >= abs(e1):
            left.append((g, -e1))
            syl.pop()
            syl[0][1] = e0 + e1
            if syl[0][1] == 0:
                syl.pop(0)
        else:
            left.append((g, e0))
            syl.pop(0)
            syl[-1][1] = e0 + e1
    conj = reduce(w.alphabet, left)
    core = reduce(w.alphabet, [tuple(s) for s in syl])
    return core, conj


def is_cyclically_reduced(w: Word) -> bool:
    s = w.syllables
    return len(s) <= 1 or s[0][0] != s[-1][0]


def rotations(w: Word) -> Iterator[Word]:
    """All letter-level cyclic rotations of a cyclically reduced word."""
    letters = list(w.letters())
    for i in range(len(letters)):
        yield reduce(w.alphabet, letters[i:] + letters[:i])


def substitute(w: Word, images: Sequence[Word], target: Alphabet) -> Word:
    """Apply the homomorphism sending generator ``i`` to ``images[i]``."""
    raw: list[tuple[int, int]] = []
    for g, e in w.syllables:
        img = images[g]
        if img.alphabet != target:
            raise WordError("image word lives over the wrong alphabet")
        piece = img.syllables if e > 0 else invert(img).syllables
        raw.extend(piece * abs(e))
    return reduce(target, raw)


def relabel(w: Word, target: Alphabet, mapping: Sequence[tuple[int, int]]) -> Word:
    """Send generator ``i`` to ``target`` letter ``mapping[i] = (j, sign)``."""
    return reduce(target, [(mapping[g][0], mapping[g][1] * e) for g, e in w.syllables])


# --- text syntax -----------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<int>[+-]?\d+)|(?P<op>[()\[\],*^=<>|]))")


class ParseError(WordError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


def tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    return tokens


def _segment(ident: str, alphabet: Alphabet, pos: int) -> list[int]:
    """Split a run of identifier characters into known generator names."""
    if ident in alphabet.names:
        return [alphabet.index(ident)]
    names = sorted(alphabet.names, key=len, reverse=True)
    memo: dict[int, list[int] | None] = {}

    def go(i: int):
        if i == len(ident):
            return []
        if i in memo:
            return memo[i]
        memo[i] = None
        for name in names:
            if ident.startswith(name, i):
                rest = go(i + len(name))
                if rest is not None:
                    memo[i] = [alphabet.index(name)] + rest
                    break
        return memo[i]

    out = go(0)
    if out is None:
        raise ParseError(f"unknown generator {ident!r}", pos)
    return out


class WordParser:
    """Recursive-descent parser over a token list; shared with presentation parsing."""

    def __init__(self, tokens, alphabet: Alphabet, text_len: int = 0):
        self.tokens = tokens
        self.i = 0
        self.alphabet = alphabet
        self.text_len = text_len

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def position(self):
        tok = self.peek()
        return tok[2] if tok else self.text_len

    def expect(self, op: str):
        tok = self.peek()
        if tok is None or tok[1] != op:
            raise ParseError(f"expected {op!r}", self.position())
        self.i += 1

    def at_atom(self):
        tok = self.peek()
        return tok is not None and (tok[0] == "name" or tok[1] in ("(", "[") or (tok[0] == "int" and tok[1] == "1"))

    def expr(self) -> Word:
        parts = [self.term()]
        while True:
            tok = self.peek()
            if tok is not None and tok[1] == "*":
                self.i += 1
                parts.append(self.term())
            elif self.at_atom():
                parts.append(self.term())
            else:
                break
        return product(self.alphabet, parts)

    def term(self) -> Word:
        base = self.atom()
        while True:
            tok = self.peek()
            if tok is None or tok[1] != "^":
                return base
            self.i += 1
            tok = self.peek()
            if tok is None or tok[0] != "int":
                raise ParseError("expected integer exponent", self.position())
            self.i += 1
            base = base ** int(tok[1])

    def atom(self) -> Word:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", self.position())
        kind, value, pos = tok
        if kind == "name":
            self.i += 1
            idx = _segment(value, self.alphabet, pos)
            gens = [self.alphabet.gen(j) for j in idx]
            if self.peek() is not None and self.peek()[1] == "^":
                # the exponent binds to the last generator of a juxtaposed run
                head = product(self.alphabet, gens[:-1])
                last = gens[-1]
                return head * self._exponentiate(last)
            return product(self.alphabet, gens)
        if kind == "int" and value == "1":
            self.i += 1
            return self.alphabet.identity()
        if value == "(":
            self.i += 1
            w = self.expr()
            self.expect(")")
            return w
        if value == "[":
            self.i += 1
            x = self.expr()
            self.expect(",")
            y = self.expr()
            self.expect("]")
            return commutator(x, y)
        raise ParseError(f"unexpected token {value!r}", pos)

    def _exponentiate(self, base: Word) -> Word:
        while self.peek() is not None and self.peek()[1] == "^":
            self.i += 1
            tok = self.peek()
            if tok is None or tok[0] != "int":
                raise ParseError("expected integer exponent", self.position())
            self.i += 1
            base = base ** int(tok[1])
        return base


def parse_word(text: str, alphabet: Alphabet) -> Word:
    """Parse the word syntax: juxtaposition or ``*``, ``^n``, ``[x, y]``, parentheses, ``1``."""
    tokens = tokenize(text)
    parser = WordParser(tokens, alphabet, len(text))
    if not tokens:
        return alphabet.identity()
    w = parser.expr()
    if parser.peek() is not None:
        raise ParseError(f"unexpected token {parser.peek()[1]!r}", parser.position())
    return w


def format_syllable(name: str, e: int) -> str:
    return name if e == 1 else f"{name}^{e}"


def format_word(w: Word) -> str:
    if not w.syllables:
        return "1"
    return "*".join(format_syllable(w.alphabet.names[g], e) for g, e in w.syllables)
