import random
from fractions import Fraction as Q

import pytest

from cil.errors import DepthCapError
from cil.examples import load_system
from cil.words import Word, all_words, generation_cut, parent, repeated, shift


def w(text, n=3):
    return Word.parse(text, n)


def test_parent_examples():
    assert parent(w("321")) == w("32")
    assert parent(w("3")) == w("")
    assert parent(repeated(1, 5, 3)) == repeated(1, 4, 3)
    with pytest.raises(ValueError):
        parent(w(""))


def test_shift_examples():
    assert shift(w("1234", 4), 2) == w("34", 4)
    assert shift(w("1234", 4), 0) == w("1234", 4)
    assert shift(w("1234", 4), 4) == w("", 4)
    with pytest.raises(ValueError):
        shift(w("12", 4), 3)


def test_shift_length_and_composition_identity():
    cant = load_system("cantor-1-3")
    i, j = Word((1, 2), 2), Word((2, 1, 1), 2)
    ij = i.concat(j)
    for k in range(len(ij) + 1):
        assert len(ij.shift(k)) == len(i) + len(j) - k
    # phi_ij = phi_(ij|_k) o phi_(sigma^k(ij)) checked by evaluation
    for x in (Q(0), Q(1), Q(1, 7)):
        for k in range(len(ij) + 1):
            lhs = cant.evaluate_word(ij, x)
            rhs = cant.evaluate_word(ij.prefix(k), cant.evaluate_word(ij.shift(k), x))
            assert lhs == rhs


def test_word_display_and_parse():
    assert w("321").display() == "321"
    assert Word((), 3).display() == "∅"
    big = Word((1, 12, 3), 12)
    assert big.display() == "1,12,3"
    assert Word.parse(big.display(), 12) == big


def test_generation_cut_cantor():
    cant = load_system("cantor-1-3")
    cut = generation_cut(cant, Q(1, 9))
    assert len(cut) == 4 and all(len(word) == 2 for word in cut)
    # boundary convention: at or above diam(F) the cut is the first generation
    cut1 = generation_cut(cant, Q(2))
    assert sorted(word.symbols for word in cut1) == [(1,), (2,)]


def test_generation_cut_wsc_is_full_level():
    wsc = load_system("wsc")
    for n in (1, 2, 3, 4):
        cut = generation_cut(wsc, Q(1, 3**n))
        assert len(cut) == 3**n
        assert all(len(word) == n for word in cut)


def test_generation_cut_depth_cap():
    cant = load_system("cantor-1-3")
    with pytest.raises(DepthCapError):
        generation_cut(cant, Q(1, 3**40), max_len=8)


def test_cut_completeness_on_random_streams():
    cant = load_system("cantor-1-3")
    cut = generation_cut(cant, Q(1, 3**5))
    rng = random.Random(7)
    for _ in range(500):
        stream = [rng.randint(1, 2) for _ in range(12)]
        cut.covering_prefix(stream)  # raises if not exactly one match


def test_cut_monotonicity_under_refinement():
    cant = load_system("cantor-1-3")
    coarse = generation_cut(cant, Q(1, 9))
    fine = generation_cut(cant, Q(1, 81))
    coarse_set = set(word.symbols for word in coarse)
    for word in fine:
        assert any(word.symbols[: len(c)] == c for c in coarse_set)


def test_all_words_count():
    assert sum(1 for _ in all_words(3, 4)) == 81
