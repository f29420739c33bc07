from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tilinglab.errors import SchemaError, WordNotInLanguage
from tilinglab.seqdyn import (CorrelationSet, WordSubstitution, correlation_set, gap_density, gap_profile,
                              gap_union, legal_words_upto, seq_language, seq_primitive, word_rule_parse)
from tilinglab.subst import load_catalog

from oracles import scan_hits

FIB = WordSubstitution({"a": "ab", "b": "a"}, name="fib")
PER = WordSubstitution({"a": "ab", "b": "ab"}, name="per")
TM = WordSubstitution({"a": "ab", "b": "ba"}, name="thue_morse")


def test_language_examples():
    assert seq_language(FIB, 2) == {"ab", "ba", "aa"}
    assert seq_language(FIB, 1) == {"a", "b"}
    assert seq_language(TM, 1) == {"a", "b"}
    assert seq_language(PER, 2) == {"ab", "ba"}
    with pytest.raises(ValueError):
        seq_language(FIB, 0)


@pytest.mark.parametrize("z", [FIB, TM, WordSubstitution({"a": "abbb", "b": "a"})])
def test_language_matches_long_iterate(z):
    long = z.iterate("a", 12)
    for m in range(1, 8):
        want = {long[i:i + m] for i in range(len(long) - m + 1)}
        assert seq_language(z, m) == want


def test_language_counts_sturmian():
    # Fibonacci is Sturmian: m + 1 factors of each length m
    for m in range(1, 15):
        assert len(seq_language(FIB, m)) == m + 1


def test_language_upto_contains_slices():
    allw = legal_words_upto(FIB, 6)
    for m in range(1, 7):
        assert seq_language(FIB, m) == {w for w in allw if len(w) == m}


def test_primitive_examples():
    assert seq_primitive(FIB)
    assert not seq_primitive(WordSubstitution({"a": "a", "b": "b"}))
    assert not seq_primitive(WordSubstitution({"a": "b", "b": "a"}))
    assert seq_primitive(TM)


def test_word_rule_schema():
    z = word_rule_parse('{"kind": "word", "images": {"a": "ab", "b": "a"}}')
    assert z.apply("ab") == "aba"
    with pytest.raises(SchemaError):
        word_rule_parse('{"kind": "word", "images": {"a": "ac"}}')
    with pytest.raises(SchemaError):
        WordSubstitution({"a": ""})
    assert load_catalog("fibonacci_word").images == {"a": "ab", "b": "a"}


def test_correlation_examples():
    assert 0 in correlation_set(FIB, "aa", "aa", 5).hits
    assert 1 not in correlation_set(FIB, "aa", "aa", 5).hits
    assert 1 in correlation_set(FIB, "a", "b", 3).hits
    assert correlation_set(FIB, "aa", "aa", 5).sorted_hits() == [0, 3, 5]


def test_correlation_overlap():
    # w2 placed inside w1 must agree with it on the overlap
    assert 2 in correlation_set(FIB, "aba", "ab", 4).hits
    assert 1 not in correlation_set(FIB, "ab", "ab", 4).hits
    assert 1 not in correlation_set(FIB, "aba", "ab", 4).hits


def test_correlation_rejects_illegal_words():
    with pytest.raises(WordNotInLanguage):
        correlation_set(FIB, "bb", "a", 3)
    with pytest.raises(WordNotInLanguage):
        correlation_set(FIB, "a", "aaa", 3)


fib_words = st.sampled_from(sorted(w for w in legal_words_upto(FIB, 4)))


@settings(max_examples=60, deadline=None)
@given(fib_words, fib_words, st.integers(min_value=0, max_value=60))
def test_correlation_matches_scan(w1, w2, N):
    long = FIB.iterate("a", 15)
    assert correlation_set(FIB, w1, w2, N).hits == scan_hits(long, w1, w2, N)


@settings(max_examples=40, deadline=None)
@given(fib_words, fib_words, st.integers(min_value=0, max_value=40))
def test_correlation_reversal(w1, w2, N):
    rev = FIB.reversed()
    a = correlation_set(FIB, w1, w2, N).hits
    b = correlation_set(rev, w2[::-1], w1[::-1], N).hits
    # w1 ... w2 at offset n reads as rev(w2) ... rev(w1) at offset n + |w2| - |w1|
    shift = len(w2) - len(w1)
    assert {n for n in a if n + shift >= 0 and n + shift <= N} == {n - shift for n in b if 0 <= n - shift <= N}


@settings(max_examples=30, deadline=None)
@given(fib_words, fib_words, st.integers(min_value=0, max_value=30), st.integers(min_value=1, max_value=30))
def test_correlation_prefix_consistent(w1, w2, N, extra):
    small = correlation_set(FIB, w1, w2, N).hits
    big = correlation_set(FIB, w1, w2, N + extra).hits
    assert small == {n for n in big if n <= N}


def test_periodic_control_period_two():
    for w1, w2 in [("a", "a"), ("ab", "ba"), ("b", "ab")]:
        hits = correlation_set(PER, w1, w2, 200).hits
        assert all((n in hits) == (n + 2 in hits) for n in range(2, 199))
    assert correlation_set(PER, "a", "a", 20).sorted_hits() == list(range(0, 21, 2))
    assert correlation_set(PER, "ab", "ba", 20).sorted_hits() == list(range(1, 21, 2))


def test_gap_density_examples():
    full = CorrelationSet("a", "a", 9, frozenset(range(10)))
    assert gap_density(full) == 0
    evens = CorrelationSet("a", "a", 99, frozenset(range(0, 100, 2)))
    assert gap_density(evens) == Fraction(1, 2)


def test_fibonacci_density_fixture():
    c = correlation_set(FIB, "a", "a", 1000)
    assert len(c.hits) == 1001
    assert gap_density(c) == 0
    prof = gap_profile(c)
    assert prof.tail_max[0] == 0


def test_gap_profile_limsup():
    c = correlation_set(FIB, "aa", "aa", 300)
    prof = gap_profile(c)
    assert prof.prefix[-1] == gap_density(c)
    assert all(t >= p for t, p in zip(prof.tail_max, prof.prefix))
    assert all(a >= b for a, b in zip(prof.tail_max, prof.tail_max[1:]))


def test_gap_union():
    J = gap_union(FIB, "a", 50)
    # b never sits at offset 0 from a
    assert 0 in J
    assert J == {n for n in range(51) if n not in correlation_set(FIB, "a", "a", 50).hits
                 or n not in correlation_set(FIB, "a", "b", 50).hits}
