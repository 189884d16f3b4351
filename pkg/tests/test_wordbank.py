import io
import logging

import numpy as np
import pytest
from hypothesis import given, strategies as st

from wordlediff.coloring import feedback, pattern_codes
from wordlediff.wordbank import (
    ALPHABET,
    EmptyWordBankError,
    WordBank,
    common_guess_words,
    letter_frequency,
    load_wordbank,
    mean_colored_as_guess,
    order_frequency,
    positional_probability,
)

words5 = st.text(alphabet="abcdefg", min_size=5, max_size=5)


def test_load_keeps_valid_words_in_order():
    bank = load_wordbank(io.StringIO("bread\ncrumb\ntoast\n"))
    assert bank.words == ("bread", "crumb", "toast")
    assert [bank.index[w] for w in bank.words] == [0, 1, 2]


def test_load_lowercases_filters_and_dedups():
    bank = load_wordbank(["Bread", "bread", "abc", "toast!", "crumbs", " crumb ", ""])
    assert bank.words == ("bread", "crumb")


def test_non_ascii_only_bank_is_an_error(caplog):
    with caplog.at_level(logging.WARNING):
        with pytest.raises(EmptyWordBankError):
            load_wordbank(["naïve"])
    assert "non-ASCII" in caplog.text


def test_sgb_has_5757_words(sgb):
    assert len(sgb) == 5757
    assert all(len(w) == 5 and w.isascii() and w.isalpha() and w.islower() for w in sgb)
    assert len(set(sgb.words)) == len(sgb)


def test_letter_frequency_hand_counts():
    f = letter_frequency(WordBank.from_words(["aaaaa"]))
    assert f["a"] == 1.0 and f.freq.sum() == 1.0
    f = letter_frequency(WordBank.from_words(["bread", "toast"]))
    assert f["t"] == 0.5
    assert f["a"] == 1.0


def test_sgb_s_and_e_most_common(sgb):
    top2 = {ALPHABET[i] for i in np.argsort(letter_frequency(sgb).freq)[-2:]}
    assert top2 == {"s", "e"}


def test_order_frequency_hand_counts():
    assert np.all(order_frequency(WordBank.from_words(["aaaaa"])).cond[0] == 1.0)
    t = order_frequency(WordBank.from_words(["bread", "crumb"]))
    assert t["b", 1] == 0.5 and t["b", 5] == 0.5
    assert t["z", 3] == 0.0


@given(st.lists(words5, min_size=1, max_size=25, unique=True))
def test_presence_counts_sum_to_distinct_letters(words):
    bank = WordBank.from_words(words)
    total = letter_frequency(bank).freq.sum() * len(bank)
    assert total == pytest.approx(sum(len(set(w)) for w in words), abs=1e-9)


@given(st.lists(words5, min_size=1, max_size=25, unique=True))
def test_order_rows_sum_between_one_and_five(words):
    bank = WordBank.from_words(words)
    cond = order_frequency(bank).cond
    present = letter_frequency(bank).freq > 0
    sums = cond.sum(axis=1)
    assert np.all(sums[present] >= 1 - 1e-12) and np.all(sums[present] <= 5 + 1e-12)
    assert np.all(sums[~present] == 0)
    assert np.all((cond >= 0) & (cond <= 1))


def test_positional_probability_counts_words_with_letter_at_position():
    bank = WordBank.from_words(["bread", "crumb", "toast", "beast"])
    p = positional_probability(bank)
    for li, letter in enumerate(ALPHABET):
        for i in range(5):
            assert p[li, i] == pytest.approx(sum(w[i] == letter for w in bank) / len(bank))


def _brute_colored_mean(bank):
    return {g: np.mean([sum(c != 0 for c in feedback(g, t)) for t in bank]) for g in bank}


def test_colored_means_match_feedback_brute_force():
    rng = np.random.default_rng(3)
    words = sorted({"".join(rng.choice(list("abcdeeo"), 5)) for _ in range(40)})
    bank = WordBank.from_words(words)
    brute = _brute_colored_mean(bank)
    np.testing.assert_allclose(mean_colored_as_guess(bank), [brute[w] for w in bank], atol=1e-12)


def test_common_guess_tie_break_is_lexicographic():
    bank = WordBank.from_words(["bbbbb", "aaaaa"])
    assert common_guess_words(bank, 1) == ["aaaaa"]
    assert sorted(common_guess_words(bank, 2)) == sorted(bank.words)


def test_common_guess_k_out_of_range():
    bank = WordBank.from_words(["bbbbb", "aaaaa"])
    with pytest.raises(ValueError):
        common_guess_words(bank, 3)
    with pytest.raises(ValueError):
        common_guess_words(bank, 0)


def test_sgb_top30_matches_brute_force_ranking(sgb):
    # exhaustive: colored tiles read off the feedback pattern of every pair
    digits = np.array([(code // 3**i) % 3 for code in range(243) for i in range(5)]).reshape(243, 5)
    non_gray = (digits != 0).sum(axis=1)
    totals = np.array([non_gray[pattern_codes(g, sgb.encoded)].sum() for g in sgb.words])
    ranked = sorted(range(len(sgb)), key=lambda i: (-totals[i], sgb.words[i]))[:30]
    top = common_guess_words(sgb, 30)
    assert top == [sgb.words[i] for i in ranked]
    assert top == common_guess_words(sgb, 30)
