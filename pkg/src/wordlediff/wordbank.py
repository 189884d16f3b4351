"""The 5-letter wordbank and the frequency tables derived from it."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from typing import Iterable, TextIO

import numpy as np

from .coloring import WORD_LENGTH, encode, letter_counts

log = logging.getLogger(__name__)

ALPHABET = "abcdefghijklmnopqrstuvwxyz"


class EmptyWordBankError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class WordBank:
    words: tuple[str, ...]
    index: dict[str, int] = field(repr=False)

    @classmethod
    def from_words(cls, words: Iterable[str]) -> "WordBank":
        words = tuple(dict.fromkeys(words))
        return cls(words, {w: i for i, w in enumerate(words)})

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: object) -> bool:
        return word in self.index

    def __iter__(self):
        return iter(self.words)

    @cached_property
    def encoded(self) -> np.ndarray:
        return encode(self.words)

    @cached_property
    def counts(self) -> np.ndarray:
        return letter_counts(self.encoded)

    def with_word(self, word: str) -> "WordBank":
        """This bank, or a copy with `word` appended when it is missing."""
        if word in self:
            return self
        return WordBank.from_words(self.words + (word,))


def _is_valid(token: str) -> bool:
    return len(token) == WORD_LENGTH and token.isascii() and token.isalpha()


def load_wordbank(source: TextIO | Iterable[str]) -> WordBank:
    """Read one token per line; keep valid 5-letter a-z words in file order.

    Tokens with non-ASCII letters are skipped (and counted in a warning);
    other wrong-length or non-alphabetic tokens are dropped silently.
    """
    words = []
    skipped_non_ascii = 0
    for line in source:
        token = line.strip().lower()
        if not token:
            continue
        if _is_valid(token):
            words.append(token)
        elif token.isalpha() and not token.isascii():
            skipped_non_ascii += 1
    if skipped_non_ascii:
        log.warning("skipped %d token(s) with non-ASCII letters", skipped_non_ascii)
    bank = WordBank.from_words(words)
    if not len(bank):
        raise EmptyWordBankError("wordbank contains no valid 5-letter words")
    return bank


def load_sgb() -> WordBank:
    """The bundled Stanford GraphBase list of 5757 five-letter words."""
    with resources.files("wordlediff.data").joinpath("sgb-words.txt").open() as fh:
        return load_wordbank(fh)


@dataclass(frozen=True)
class LetterFreqTable:
    freq: np.ndarray  # (26,)

    def __getitem__(self, letter: str) -> float:
        return float(self.freq[ALPHABET.index(letter)])


@dataclass(frozen=True)
class OrderFreqTable:
    cond: np.ndarray  # (26, 5); cond[l, i] = P(position i | l in word)

    def __getitem__(self, key: tuple[str, int]) -> float:
        """``table["a", 4]`` with a 1-indexed position."""
        letter, position = key
        return float(self.cond[ALPHABET.index(letter), position - 1])


def letter_frequency(bank: WordBank) -> LetterFreqTable:
    """Fraction of bank words containing each letter at least once."""
    present = bank.counts > 0
    return LetterFreqTable(present.sum(axis=0) / len(bank))


def order_frequency(bank: WordBank) -> OrderFreqTable:
    enc = bank.encoded
    at_position = np.zeros((26, WORD_LENGTH))
    for i in range(WORD_LENGTH):
        at_position[:, i] = np.bincount(enc[:, i], minlength=26)
    containing = (bank.counts > 0).sum(axis=0).astype(float)
    cond = np.divide(
        at_position, containing[:, None], out=np.zeros_like(at_position), where=containing[:, None] > 0
    )
    return OrderFreqTable(cond)


def positional_probability(bank: WordBank) -> np.ndarray:
    """(26, 5) probability a bank word has a given letter at a given position.

    Equal to letter frequency times the conditional order frequency.
    """
    return letter_frequency(bank).freq[:, None] * order_frequency(bank).cond


def _colored_totals(guess_counts: np.ndarray, target_counts: np.ndarray) -> np.ndarray:
    """Sum over targets of the colored-tile count for each guess row.

    The number of non-gray tiles for a (guess, target) pair is
    sum over letters of min(mult in guess, mult in target), so the total
    over targets only needs, per letter, how many targets hold at least
    k copies.
    """
    at_least = np.stack(
        [(target_counts >= k).sum(axis=0) for k in range(1, WORD_LENGTH + 1)], axis=1
    )  # (26, 5)
    cumulative = np.concatenate([np.zeros((26, 1), dtype=np.int64), np.cumsum(at_least, axis=1)], axis=1)
    letters = np.arange(26)
    return cumulative[letters[None, :], guess_counts].sum(axis=1)


def mean_colored_as_guess(bank: WordBank) -> np.ndarray:
    """Mean colored tiles each word earns as a guess against a uniform bank target."""
    return _colored_totals(bank.counts, bank.counts) / len(bank)


def common_guess_words(bank: WordBank, k: int) -> list[str]:
    """The `k` bank words with the highest mean colored-tile count as guesses.

    Ties are broken lexicographically.
    """
    if not 0 < k <= len(bank):
        raise ValueError(f"k must be in 1..{len(bank)}, got {k}")
    totals = _colored_totals(bank.counts, bank.counts)  # integer, so ties are exact
    order = sorted(range(len(bank)), key=lambda i: (-totals[i], bank.words[i]))
    return [bank.words[i] for i in order[:k]]
