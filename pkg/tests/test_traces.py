import pytest
from hypothesis import given, settings, strategies as st

from tracepds.errors import InputError
from tracepds.traces import (DependenceAlphabet, Trace, factorizations, fnf_of_word,
                             is_efnf, pop_letter, split_by, trace_concat, trace_eq)

import bruteforce as bf

EMSO = DependenceAlphabet("abT", [("a", "T"), ("b", "T")])
AB_FREE = DependenceAlphabet("ab")
AB_FULL = DependenceAlphabet("ab", [("a", "b")])
ABCD = DependenceAlphabet("abcd", [("a", "b"), ("b", "c"), ("c", "d")])


def ref(alpha):
    return bf.Alpha(alpha.letters, alpha.dependency_pairs())


def tr(w, alpha=EMSO):
    return Trace.from_word(w, alpha)


def test_connected_examples():
    assert EMSO.connected([])
    assert EMSO.connected(["a", "T"])
    assert not EMSO.connected(["a", "b"])
    assert EMSO.connected(["a", "b", "T"])
    with pytest.raises(InputError):
        EMSO.connected(["z"])


def test_twins():
    assert AB_FULL.twin_class("a") == {"a", "b"}
    assert EMSO.twin_class("a") == {"a"}
    assert EMSO.twin_index() == 3
    assert AB_FREE.twin_class("a") == {"a"}
    assert AB_FULL.twin_index() == 1


def test_dependence_closure():
    al = DependenceAlphabet("xyz", [("y", "x")])
    assert al.depends("x", "y") and al.depends("y", "x")
    assert al.depends("z", "z")
    assert al.independent("x", "z")
    assert al.D(["x"]) == {"x", "y"}


def test_alphabet_text_roundtrip():
    al = DependenceAlphabet.from_text("letters a b T\n# comment\ndep a T\ndep T b\n")
    assert al == EMSO
    assert DependenceAlphabet.from_text(al.to_text()) == al


@pytest.mark.parametrize("text,line", [
    ("letters a b\ndep a c\n", 2),
    ("letters a\nletters b\n", 2),
    ("letters a\nfoo\n", 2),
])
def test_alphabet_text_errors(text, line):
    with pytest.raises(InputError) as e:
        DependenceAlphabet.from_text(text)
    assert e.value.line == line


def test_fnf_examples():
    assert tr("aab", AB_FREE).fnf_str() == "{a,b}{a}"
    assert tr("").blocks == ()
    assert tr("abT").fnf_str() == "{a,b}{T}"
    assert tr("Tab").fnf_str() == "{T}{a,b}"


def test_concat_and_eq_examples():
    x = tr("aTb")
    assert trace_concat(x, tr("")) == x
    assert trace_concat(tr("a", AB_FREE), tr("b", AB_FREE)).fnf_str() == "{a,b}"
    assert not trace_eq(tr("aT"), tr("Ta"))
    with pytest.raises(InputError):
        trace_eq(tr("a"), tr("a", AB_FREE))


def test_pop_examples():
    assert pop_letter(tr("ab", AB_FREE), "a") == tr("b", AB_FREE)
    assert pop_letter(tr("aT"), "a") is None
    assert pop_letter(tr("aT"), "T") == tr("a")
    assert pop_letter(tr(""), "a") is None


def test_factorization_examples():
    w = tr("a").blocks
    pairs = {split_by(w, c, EMSO) for c in factorizations(w, EMSO)}
    assert pairs == {(tr("a"), tr("")), (tr(""), tr("a"))}
    aT = tr("aT").blocks
    a_bit = EMSO.bit("a")
    assert (a_bit, 0) not in set(factorizations(aT, EMSO))
    w = tr("aab", AB_FREE)
    found = {split_by(w.blocks, c, AB_FREE) for c in factorizations(w.blocks, AB_FREE)}
    assert len(found) == len(bf.factor_pairs(bf.klass(w.word(), ref(AB_FREE)), ref(AB_FREE)))


def test_efnf():
    a, b, T = (EMSO.bit(x) for x in "abT")
    assert is_efnf([a, T], EMSO)
    assert not is_efnf([a, b], EMSO)
    assert is_efnf([a, 0, 0], EMSO)
    assert not is_efnf([0, a], EMSO)


def test_linearizations_match_swap_closure():
    t = tr("abTba")
    assert set(t.linearizations()) == bf.klass(t.word(), ref(EMSO))


words = st.lists(st.sampled_from("abcd"), max_size=10).map(tuple)


@settings(max_examples=150, deadline=None)
@given(words, words)
def test_fnf_equality_is_swap_equivalence(u, v):
    r = ref(ABCD)
    assert (tr(u, ABCD) == tr(v, ABCD)) == (v in bf.klass(u, r))


@settings(max_examples=150, deadline=None)
@given(words)
def test_fnf_invariants(w):
    t = fnf_of_word(w, ABCD)
    assert sorted(t.word()) == sorted(w)
    assert all(b for b in t.blocks)
    assert is_efnf(t.blocks, ABCD)
    assert t.word() in bf.klass(w, ref(ABCD))


@settings(max_examples=100, deadline=None)
@given(words, words, words)
def test_concat_associative_with_unit(x, y, z):
    X, Y, Z = (tr(w, ABCD) for w in (x, y, z))
    assert (X * Y) * Z == X * (Y * Z)
    assert X * tr("", ABCD) == X == tr("", ABCD) * X
    assert (X * Y).word() in bf.klass(x + y, ref(ABCD))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.sampled_from("abcd"), max_size=6).map(tuple))
def test_factorizations_sound_and_complete(w):
    t = tr(w, ABCD)
    r = ref(ABCD)
    got = set()
    for c in factorizations(t.blocks, ABCD):
        x, y = split_by(t.blocks, c, ABCD)
        assert x * y == t
        got.add((bf.klass(x.word(), r), bf.klass(y.word(), r)))
    assert got == bf.factor_pairs(bf.klass(t.word(), r), r)


@settings(max_examples=100, deadline=None)
@given(words, st.sampled_from("abcd"))
def test_pop_matches_reference(w, a):
    t = tr(w, ABCD)
    x = t.pop(a)
    expect = bf.pop(bf.klass(w, ref(ABCD)), a, ref(ABCD))
    if expect is None:
        assert x is None
    else:
        assert bf.klass(x.word(), ref(ABCD)) == expect
