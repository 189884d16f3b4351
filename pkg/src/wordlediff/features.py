"""Per-word difficulty predictors.

Vowels, unique letters and usage depend only on the word.  Tile averages,
positional entropy and subset entropy depend on the wordbank, and subset
entropy also on a distribution of opening guesses (by default uniform over
the 30 best guesses by mean colored tiles).
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import astuple, dataclass, fields
from importlib import resources
from typing import Iterable, Mapping, Sequence, TextIO

import numpy as np

from .coloring import WORD_LENGTH, check_word, encode, letter_counts, pattern_codes
from .wordbank import (
    ALPHABET,
    LetterFreqTable,
    OrderFreqTable,
    WordBank,
    _colored_totals,
    common_guess_words,
    letter_frequency,
    order_frequency,
)

log = logging.getLogger(__name__)

VOWELS = frozenset("aeiou")
N_COMMON_GUESSES = 30


class UsageTable(Mapping[str, float]):
    """Word -> relative usage frequency; missing words read as 0."""

    def __init__(self, values: Mapping[str, float]):
        for word, v in values.items():
            if not v >= 0:
                raise ValueError(f"usage frequency for {word!r} must be >= 0, got {v}")
        self._values = dict(values)

    @classmethod
    def from_csv(cls, fh: TextIO) -> "UsageTable":
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip().lower() for f in reader.fieldnames[:2]] != ["word", "frequency"]:
            raise ValueError("usage table needs a 'word,frequency' header")
        return cls({row["word"].strip().lower(): float(row["frequency"]) for row in reader})

    @classmethod
    def bundled(cls) -> "UsageTable":
        with resources.files("wordlediff.data").joinpath("usage.csv").open() as fh:
            return cls.from_csv(fh)

    def __getitem__(self, word: str) -> float:
        return self._values[word]

    def __iter__(self):
        return iter(self._values)

    def __len__(self) -> int:
        return len(self._values)


@dataclass(frozen=True)
class WordFeatures:
    vowels: int
    unique_letters: int
    usage: float
    avg_green: float
    avg_yellow: float
    avg_colored: float
    positional_entropy: float
    subset_entropy: float


FEATURE_NAMES = tuple(f.name for f in fields(WordFeatures))


@dataclass(frozen=True)
class GuessDistribution:
    support: tuple[str, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if not self.support or len(self.support) != len(self.weights):
            raise ValueError("guess distribution needs a non-empty support with one weight per word")
        if any(w < 0 for w in self.weights) or not math.isclose(sum(self.weights), 1.0, abs_tol=1e-9):
            raise ValueError("guess weights must be non-negative and sum to 1")

    @classmethod
    def uniform(cls, words: Sequence[str]) -> "GuessDistribution":
        return cls(tuple(words), tuple([1.0 / len(words)] * len(words)))

    @classmethod
    def weighted(cls, pairs: Iterable[tuple[str, float]]) -> "GuessDistribution":
        pairs = list(pairs)
        total = sum(w for _, w in pairs)
        return cls(tuple(g for g, _ in pairs), tuple(w / total for _, w in pairs))

    @classmethod
    def common(cls, bank: WordBank, k: int = N_COMMON_GUESSES) -> "GuessDistribution":
        return cls.uniform(common_guess_words(bank, k))


def vowel_count(word: str) -> int:
    return sum(c in VOWELS for c in check_word(word))


def unique_letters(word: str) -> int:
    return len(set(check_word(word)))


def usage_frequency(word: str, table: Mapping[str, float]) -> float:
    if word not in table:
        log.warning("no usage frequency for %r; using 0", word)
        return 0.0
    return float(table[word])


def avg_tiles(target: str, bank: WordBank) -> tuple[float, float, float]:
    """Mean (green, yellow, colored) tiles when `target` is the answer and
    guesses are drawn uniformly from the bank."""
    if not len(bank):
        raise ValueError("empty wordbank")
    green, yellow, colored = _tile_means(encode([target]), bank)
    return float(green[0]), float(yellow[0]), float(colored[0])


def _tile_means(targets: np.ndarray, bank: WordBank):
    enc = bank.encoded
    n = len(bank)
    at_position = np.stack([np.bincount(enc[:, i], minlength=26) for i in range(WORD_LENGTH)], axis=1)
    green = at_position[targets, np.arange(WORD_LENGTH)].sum(axis=1) / n
    # min(mult) is symmetric in guess/target, so the colored totals are too
    colored = _colored_totals(letter_counts(targets), bank.counts) / n
    return green, colored - green, colored


def _position_probs(tables: tuple[OrderFreqTable, LetterFreqTable] | np.ndarray) -> np.ndarray:
    if isinstance(tables, np.ndarray):
        return tables
    order, letters = tables
    return letters.freq[:, None] * order.cond


def positional_entropy(word: str, tables: tuple[OrderFreqTable, LetterFreqTable] | np.ndarray) -> float:
    """Sum over positions of -P log2 P, with P the chance a bank word has this
    letter at this position.  `tables` is ``(order_table, letter_table)``."""
    probs = _position_probs(tables)
    total = 0.0
    for i, ch in enumerate(check_word(word)):
        p = probs[ALPHABET.index(ch), i]
        if p <= 0:
            raise ValueError(f"letter {ch!r} never occurs at position {i + 1} in the wordbank")
        total -= p * math.log2(p)
    return float(total)


def information_factor(target: str, guess: str, bank: WordBank) -> float:
    """log2 of the factor by which the candidate pool shrinks: log2(n / n1)."""
    if target not in bank:
        raise KeyError(f"target {target!r} is not in the wordbank")
    codes = pattern_codes(guess, bank.encoded)
    n1 = np.count_nonzero(codes == codes[bank.index[target]])
    return math.log2(len(bank) / n1)


def subset_entropy(target: str, dist: GuessDistribution, bank: WordBank) -> float:
    """Expected information factor of `target` over guesses drawn from `dist`."""
    return sum(w * information_factor(target, g, bank) for g, w in zip(dist.support, dist.weights))


def subset_entropies(bank: WordBank, dist: GuessDistribution) -> np.ndarray:
    """Subset entropy of every bank word as target, in bank order."""
    n = len(bank)
    out = np.zeros(n)
    for g, w in zip(dist.support, dist.weights):
        codes = pattern_codes(g, bank.encoded)
        sizes = np.bincount(codes, minlength=243)[codes]
        out += w * np.log2(n / sizes)
    return out


def feature_vector(
    word: str, bank: WordBank, usage: Mapping[str, float], dist: GuessDistribution
) -> WordFeatures:
    return feature_table([word], bank, usage, dist)[0]


def feature_table(
    words: Sequence[str], bank: WordBank, usage: Mapping[str, float], dist: GuessDistribution
) -> list[WordFeatures]:
    """Features for many words at once.

    Words outside the bank are scored as if appended to it; that extended
    bank only serves the pool computations (subset entropy), while tile
    averages and positional entropy use the original bank.
    """
    for w in words:
        check_word(w)
    tables = (order_frequency(bank), letter_frequency(bank))
    green, yellow, colored = _tile_means(encode(words), bank) if words else ([], [], [])
    base_entropy = subset_entropies(bank, dist)
    rows = []
    for k, w in enumerate(words):
        if w in bank:
            se = float(base_entropy[bank.index[w]])
        else:
            ext = bank.with_word(w)
            se = subset_entropy(w, dist, ext)
        rows.append(
            WordFeatures(
                vowels=vowel_count(w),
                unique_letters=unique_letters(w),
                usage=usage_frequency(w, usage),
                avg_green=float(green[k]),
                avg_yellow=float(yellow[k]),
                avg_colored=float(colored[k]),
                positional_entropy=positional_entropy(w, tables),
                subset_entropy=se,
            )
        )
    return rows


def write_features_csv(fh: TextIO, words: Sequence[str], rows: Sequence[WordFeatures | None],
                       errors: Sequence[str | None] | None = None) -> None:
    """One row per word, columns ``word`` + feature fields + ``error``."""
    out = csv.writer(fh, lineterminator="\n")
    out.writerow(["word", *FEATURE_NAMES, "error"])
    errors = errors or [None] * len(words)
    for w, row, err in zip(words, rows, errors):
        if row is None:
            out.writerow([w, *[""] * len(FEATURE_NAMES), err or "unknown error"])
        else:
            out.writerow([w, *(repr(v) for v in astuple(row)), ""])


def read_features_csv(fh: TextIO) -> dict[str, WordFeatures]:
    """Inverse of :func:`write_features_csv`; rows with an error are skipped."""
    types = {f.name: f.type for f in fields(WordFeatures)}
    out = {}
    for row in csv.DictReader(fh):
        if row.get("error"):
            continue
        out[row["word"]] = WordFeatures(
            **{k: (int(row[k]) if types[k] in (int, "int") else float(row[k])) for k in FEATURE_NAMES}
        )
    return out
