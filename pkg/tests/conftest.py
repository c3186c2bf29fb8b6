import random

import pytest
from hypothesis import settings, strategies as st

from fpgroups.freewords import Alphabet, reduce

settings.register_profile("default", max_examples=150, deadline=None)
settings.load_profile("default")

AB = Alphabet("ab")
ABC = Alphabet("abc")


def naive_reduce(letters):
    """Stack-based free reduction over single letters; the oracle for ``reduce``."""
    out = []
    for g, s in letters:
        if out and out[-1] == (g, -s):
            out.pop()
        else:
            out.append((g, s))
    return out


def letters_strategy(n_gens: int, max_len: int = 12):
    return st.lists(st.tuples(st.integers(0, n_gens - 1), st.sampled_from((1, -1))), max_size=max_len)


def words(alphabet: Alphabet, max_len: int = 12):
    return letters_strategy(len(alphabet), max_len).map(lambda ls: reduce(alphabet, ls))


def random_word(rng: random.Random, alphabet: Alphabet, length: int):
    return reduce(alphabet, [(rng.randrange(len(alphabet)), rng.choice((1, -1))) for _ in range(length)])


@pytest.fixture
def rng():
    return random.Random(20261014)
