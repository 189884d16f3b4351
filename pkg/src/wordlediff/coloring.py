"""Wordle tile feedback and the candidate-pool filter built on it.

Feedback follows the official duplicate-letter rule: greens are assigned
first and consume their target letters, then yellows are handed out left
to right while unconsumed copies of the letter remain.

Besides the scalar API (:func:`feedback`, :func:`compatible`,
:func:`pool_size`) there is a vectorized path (:func:`encode`,
:func:`pattern_codes`) used for whole-bank computations.  Patterns are
packed into base-3 integers ``sum(color_i * 3**i)`` with Gray=0,
Yellow=1, Green=2, so there are 243 codes.
"""

from __future__ import annotations

import enum
from collections import Counter
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

if TYPE_CHECKING:
    from .wordbank import WordBank

WORD_LENGTH = 5
N_PATTERNS = 3**WORD_LENGTH
_POW3 = 3 ** np.arange(WORD_LENGTH)


class InvalidWordError(ValueError):
    pass


class TileColor(enum.IntEnum):
    GRAY = 0
    YELLOW = 1
    GREEN = 2

    def __str__(self) -> str:
        return self.name.capitalize()


Pattern = tuple  # tuple of 5 TileColor


def check_word(word: str) -> str:
    if len(word) != WORD_LENGTH or not word.isascii() or not word.isalpha() or not word.islower():
        raise InvalidWordError(f"not a lowercase 5-letter a-z word: {word!r}")
    return word


def feedback(guess: str, target: str) -> Pattern:
    """Tile colors shown for `guess` when the answer is `target`."""
    check_word(guess)
    check_word(target)
    tiles = [TileColor.GRAY] * WORD_LENGTH
    remaining = Counter()
    for i, (g, t) in enumerate(zip(guess, target)):
        if g == t:
            tiles[i] = TileColor.GREEN
        else:
            remaining[t] += 1
    for i, g in enumerate(guess):
        if tiles[i] is TileColor.GREEN:
            continue
        if remaining[g] > 0:
            tiles[i] = TileColor.YELLOW
            remaining[g] -= 1
    return tuple(tiles)


def pattern_code(pattern: Sequence[int]) -> int:
    if len(pattern) != WORD_LENGTH:
        raise ValueError(f"pattern must have {WORD_LENGTH} tiles, got {len(pattern)}")
    return int(sum(int(c) * 3**i for i, c in enumerate(pattern)))


def decode_pattern(code: int) -> Pattern:
    return tuple(TileColor((code // 3**i) % 3) for i in range(WORD_LENGTH))


def compatible(candidate: str, guess: str, observed: Sequence[int]) -> bool:
    """True iff `candidate` would have produced exactly `observed` for `guess`."""
    if len(observed) != WORD_LENGTH:
        raise ValueError(f"pattern must have {WORD_LENGTH} tiles, got {len(observed)}")
    return feedback(guess, candidate) == tuple(TileColor(c) for c in observed)


def pool_size(target: str, guess: str, bank: "WordBank") -> int:
    """Number of bank words consistent with the feedback `guess` gets on `target`."""
    if target not in bank:
        raise KeyError(f"target {target!r} is not in the wordbank")
    observed = feedback(guess, target)
    codes = pattern_codes(guess, bank.encoded)
    return int(np.count_nonzero(codes == pattern_code(observed)))


# -- vectorized path ---------------------------------------------------------


def encode(words: Iterable[str]) -> np.ndarray:
    """Words as an (n, 5) uint8 array of letter indices 0..25."""
    words = list(words)
    for w in words:
        check_word(w)
    if not words:
        return np.zeros((0, WORD_LENGTH), dtype=np.uint8)
    buf = np.frombuffer("".join(words).encode("ascii"), dtype=np.uint8)
    return (buf.reshape(-1, WORD_LENGTH) - ord("a")).astype(np.uint8)


def pattern_codes(guess: str | np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Pattern codes of one guess against every row of an encoded target array."""
    g = encode([guess])[0] if isinstance(guess, str) else np.asarray(guess, dtype=np.uint8)
    targets = np.asarray(targets, dtype=np.uint8)
    n = targets.shape[0]
    green = targets == g[None, :]
    # unconsumed letter counts per target after greens
    remaining = np.zeros((n, 26), dtype=np.int8)
    rows = np.repeat(np.arange(n), WORD_LENGTH)
    np.add.at(remaining, (rows, targets.ravel()), (~green).ravel().astype(np.int8))
    colors = 2 * green.astype(np.int64)
    for i in range(WORD_LENGTH):
        letter = g[i]
        yellow = ~green[:, i] & (remaining[:, letter] > 0)
        colors[:, i] += yellow
        remaining[yellow, letter] -= 1
    return colors @ _POW3


def letter_counts(encoded: np.ndarray) -> np.ndarray:
    """(n, 26) letter multiplicities of encoded words."""
    encoded = np.asarray(encoded)
    counts = np.zeros((encoded.shape[0], 26), dtype=np.int64)
    rows = np.repeat(np.arange(encoded.shape[0]), WORD_LENGTH)
    np.add.at(counts, (rows, encoded.ravel()), 1)
    return counts
