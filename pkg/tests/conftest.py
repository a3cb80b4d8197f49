import random

import pytest

from stable4.words import Word


@pytest.fixture
def rng():
    return random.Random(20240817)


def random_word(rng: random.Random, n_gens: int, max_len: int) -> Word:
    letters = [
        (rng.randrange(n_gens), rng.choice((-2, -1, 1, 2)))
        for _ in range(rng.randrange(max_len + 1))
    ]
    return Word(tuple(letters))
