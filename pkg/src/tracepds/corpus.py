"""Example systems and a generator of random loop-connected tPDS."""

from .errors import PreconditionError
from .system import Tpds, Transition, check_p1, validate
from .traces import DependenceAlphabet

EMSO_TEXT = """\
# a and b commute, both depend on T
letters a b T
dep a T
dep b T
states p q r
trans p T aT p
trans p T T q
trans q T bT q
trans q T b r
trans r b - r
trans q T - r
trans r a - r
"""


def emso_system():
    return Tpds.from_text(EMSO_TEXT)


def pcp_system(pairs=(("a", "a"),)):
    """The PCP encoding for tiles ``(u_i, v_i)`` over ``{a, b}``; the primed
    copies are written ``A`` and ``B``."""
    prime = {"a": "A", "b": "B"}
    alphabet = DependenceAlphabet(
        "abABT", [("a", "b"), ("A", "B")] + [(x, "T") for x in "abAB"])
    trans = []
    for u, v in pairs:
        w = tuple(u) + tuple(prime[c] for c in v) + ("T",)
        trans += [("i", "T", w, "p"), ("p", "T", w, "p")]
    trans.append(("p", "T", ("T",), "r"))
    for x in "ab":
        w = (x, prime[x], "T")
        trans += [("i", "T", w, "q"), ("q", "T", w, "q")]
    trans.append(("q", "T", ("T",), "r"))
    return Tpds(alphabet, ["i", "p", "q", "r"], trans)


def random_alphabet(rng, max_letters=4, min_letters=2):
    n = rng.randint(min_letters, max_letters)
    letters = "abcd"[:n]
    deps = [(x, y) for i, x in enumerate(letters) for y in letters[i + 1:]
            if rng.random() < 0.5]
    return DependenceAlphabet(letters, deps)


def _p2_closure(system, limit):
    al = system.alphabet
    trans = set(system.transitions)
    while True:
        added = set()
        by_src = {}
        for t in trans:
            by_src.setdefault(t.src, []).append(t)
        for t1 in sorted(trans, key=system._key):
            for t2 in sorted(by_src.get(t1.dst, ()), key=system._key):
                if not al.independent(t1.read, t2.read):
                    continue
                ok = any(Transition(t1.src, t2.read, t2.push, m) in trans
                         and Transition(m, t1.read, t1.push, t2.dst) in trans
                         for m in system.states)
                if not ok:
                    added.add(Transition(t1.src, t2.read, t2.push, t1.dst))
                    added.add(Transition(t1.dst, t1.read, t1.push, t2.dst))
        new = added - trans
        if not new:
            return system.with_transitions(trans)
        trans |= new
        if len(trans) > limit:
            return None


def random_tpds(rng, max_states=3, max_letters=4, max_push=2, max_transitions=12,
                max_initial=7, tries=1000):
    """A random tPDS whose saturation is loop-connected (unsaturated form).

    Push words only use letters ``x`` with ``D(x) ⊆ D(a)`` for the read
    letter ``a``, so (P1) holds by construction; (P2) is enforced by adding
    commuted transitions.
    """
    for _ in range(tries):
        al = random_alphabet(rng, max_letters, min(3, max_letters))
        states = "pqr"[:rng.randint(min(2, max_states), max_states)]
        trans = []
        for _ in range(rng.randint(3, max_initial)):
            a = rng.choice(al.letters)
            da = al.dep_letter(a)
            allowed = [x for x in al.letters if not al.dep_letter(x) & ~da]
            n = 0 if rng.random() < 0.4 else rng.randint(1, max_push)
            w = tuple(rng.choice(allowed) for _ in range(n))
            trans.append((rng.choice(states), a, w, rng.choice(states)))
        system = Tpds(al, states, trans)
        assert check_p1(system)[0]
        system = _p2_closure(system, max_transitions)
        if system is None:
            continue
        try:
            sat = validate(system)
        except PreconditionError:
            continue
        if len(sat.transitions) > 2 * max_transitions:
            continue
        return system
    raise RuntimeError("no loop-connected system generated")
