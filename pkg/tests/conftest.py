import itertools

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from wordlediff.wordbank import WordBank, load_sgb

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def sgb():
    return load_sgb()


@pytest.fixture(scope="session")
def abc_words():
    """All 243 five-letter words over the alphabet {a, b, c}."""
    return ["".join(t) for t in itertools.product("abc", repeat=5)]


def random_bank(rng: np.random.Generator, size: int, letters: str = "abcdefgh") -> WordBank:
    words = set()
    while len(words) < size:
        words.add("".join(rng.choice(list(letters), size=5)))
    return WordBank.from_words(sorted(words))
