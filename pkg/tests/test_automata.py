import random
from itertools import product

import pytest

from tracepds import automata as fa
from tracepds.automata import Domain, EpsilonNfa, Nfa
from tracepds.errors import InputError
from tracepds.traces import DependenceAlphabet

AB = Domain("ab")
ABC = Domain("abc")


def lang(a, n=6):
    return fa.words(a, n)


def all_words(domain, n):
    return {w for k in range(n + 1) for w in product(domain, repeat=k)}


def star_of(word, domain=AB):
    return fa.star(fa.word_automaton(domain, word))


def astar_bstar_b():
    # a*b*b
    return Nfa.from_edges(AB, 3, {0}, {2},
                          [(0, "a", 0), (0, "b", 1), (1, "b", 1), (0, "b", 2), (1, "b", 2)])


def random_nfa(rng, domain, n=3):
    edges = [(s, a, t) for s in range(n) for a in domain for t in range(n)
             if rng.random() < 0.3]
    init = {rng.randrange(n)}
    final = {s for s in range(n) if rng.random() < 0.4}
    return Nfa.from_edges(domain, n, init, final, edges)


def test_eps_elimination_examples():
    e = EpsilonNfa(AB)
    s = e.add_state()
    e.add_eps(s, s)
    e.initial.add(s)
    e.final.add(s)
    assert lang(fa.eps_eliminate(e)) == {()}

    e = EpsilonNfa(AB)
    p, q, r = e.add_state(), e.add_state(), e.add_state()
    e.add_eps(p, q)
    e.add(q, "a", r)
    e.initial.add(p)
    e.final.add(r)
    n = fa.eps_eliminate(e)
    assert n.delta[p]["a"] == {r}
    assert lang(n) == {("a",)}


def test_eps_elimination_preserves_path_language():
    e = EpsilonNfa(AB)
    s, t, u = e.add_state(), e.add_state(), e.add_state()
    e.add_path(s, "a", s)
    e.add_path(s, "", t)
    e.add_path(t, "b", t)
    e.add_path(t, "b", u)
    e.initial.add(s)
    e.final.add(u)
    assert lang(fa.eps_eliminate(e)) == lang(astar_bstar_b())


def test_boolean_examples():
    L = astar_bstar_b()
    assert fa.is_empty(fa.intersect(L, fa.complement(L)))
    u = fa.union(fa.word_automaton(AB, "a"), fa.word_automaton(AB, "b"))
    assert lang(u) == {("a",), ("b",)}
    with pytest.raises(InputError):
        fa.union(fa.word_automaton(AB, "a"), fa.word_automaton(ABC, "a"))


def test_emptiness_and_equivalence_examples():
    assert fa.is_empty(Nfa(AB, 2, {0}, ()))
    x = star_of("ab")
    y = Nfa.from_edges(AB, 3, {0}, {0, 2}, [(0, "a", 1), (1, "b", 2), (2, "a", 1)])
    assert fa.equivalent(x, y) == (True, None)
    bstar = Nfa.from_edges(AB, 2, {0}, {0, 1}, [(0, "a", 0), (0, "b", 1), (1, "b", 1)])
    ok, cex = fa.equivalent(astar_bstar_b(), bstar)
    assert not ok and cex == ()


def test_counterexample_is_shortest():
    a = fa.finite_language(AB, ["aab", "b"])
    b = fa.finite_language(AB, ["aab", "ba"])
    ok, cex = fa.equivalent(a, b)
    assert not ok and cex == ("b",)
    ok, cex = fa.is_subset(a, b)
    assert not ok and cex == ("b",)


def test_hom_quotient_examples():
    L = fa.word_automaton(AB, "ab")
    cstar = fa.star(fa.word_automaton(AB, "b"))
    q = fa.right_quotient(fa.concat(L, cstar), cstar)
    assert fa.is_subset(L, q)[0]
    assert lang(q, 4) >= {("a",), ("a", "b"), ("a", "b", "b")}

    three = Domain([(x, y, z) for x in "ab" for y in "ab" for z in "ab"])
    two = Domain([(x, z) for x in "ab" for z in "ab"])
    single = fa.word_automaton(three, [("a", "b", "a"), ("b", "b", "a")])
    img = fa.hom_image(single, lambda s: ((s[0], s[2]),), two)
    assert fa.equivalent(img, fa.word_automaton(two, [("a", "a"), ("b", "a")]))[0]

    pre = fa.inv_hom_image(fa.word_automaton(AB, "aa"), {"a": ("a",), "b": ()}, AB)
    assert ("b", "a", "b", "a") in lang(pre)


def test_swap_image_examples():
    free = DependenceAlphabet("ab")
    assert lang(fa.swap_image(fa.word_automaton(AB, "ab"), free)) == {("b", "a")}
    emso = DependenceAlphabet("abT", [("a", "T"), ("b", "T")])
    aT = Domain("abT")
    assert fa.is_empty(fa.swap_image(fa.word_automaton(aT, "aT"), emso))
    abc = DependenceAlphabet("abc", [("a", "c"), ("b", "c")])
    assert lang(fa.swap_image(fa.word_automaton(ABC, "abc"), abc)) == {("b", "a", "c")}


def test_reverse_examples():
    assert lang(fa.reverse(fa.word_automaton(AB, "ab"))) == {("b", "a")}
    assert lang(fa.reverse(fa.epsilon(AB))) == {()}
    astar_b = fa.concat(star_of("a"), fa.word_automaton(AB, "b"))
    want = {("b",) + ("a",) * k for k in range(4)}
    assert lang(fa.reverse(astar_b), 4) == want


def test_minimal_dfa_canonical():
    x = fa.minimal_dfa(star_of("ab"))
    y = fa.minimal_dfa(Nfa.from_edges(AB, 3, {0}, {0, 2},
                                      [(0, "a", 1), (1, "b", 2), (2, "a", 1)]))
    assert fa.same_structure(x, y)
    assert x.is_deterministic()
    assert fa.minimal_dfa(Nfa(AB, 3, {0}, ())).n == 0


@pytest.mark.parametrize("seed", range(25))
def test_boolean_ops_against_enumeration(seed):
    rng = random.Random(seed)
    a, b = random_nfa(rng, AB), random_nfa(rng, AB)
    La, Lb = lang(a, 5), lang(b, 5)
    U = all_words(AB, 5)
    assert lang(fa.union(a, b), 5) == La | Lb
    assert lang(fa.intersect(a, b), 5) == La & Lb
    assert lang(fa.complement(a), 5) == U - La
    assert lang(fa.determinize(a), 5) == La
    assert lang(fa.minimal_dfa(a), 5) == La
    assert lang(fa.concat(a, b), 5) == {x + y for x in lang(a, 5) for y in lang(b, 5)
                                        if len(x + y) <= 5}
    n = a.n * b.n + 1
    ok, cex = fa.equivalent(a, b)
    assert ok == (lang(a, n) == lang(b, n))
    if not ok:
        assert (cex in lang(a, len(cex))) != (cex in lang(b, len(cex)))
        diff = lang(a, len(cex)) ^ lang(b, len(cex))
        assert min(len(w) for w in diff) == len(cex)


@pytest.mark.parametrize("seed", range(15))
def test_swap_image_against_enumeration(seed):
    rng = random.Random(seed)
    al = DependenceAlphabet("abc", [("a", "c")])
    a = random_nfa(rng, ABC)
    want = set()
    for w in lang(a, 5):
        for i in range(len(w) - 1):
            if al.independent(w[i], w[i + 1]):
                want.add(w[:i] + (w[i + 1], w[i]) + w[i + 2:])
    assert lang(fa.swap_image(a, al), 5) == want


@pytest.mark.parametrize("seed", range(10))
def test_right_quotient_against_enumeration(seed):
    rng = random.Random(seed)
    a, r = random_nfa(rng, AB), random_nfa(rng, AB)
    got = lang(fa.right_quotient(a, r), 3)
    La, Lr = lang(a, 7), lang(r, 4)
    want = {u for u in all_words(AB, 3) if any(u + v in La for v in Lr)}
    assert got == want
