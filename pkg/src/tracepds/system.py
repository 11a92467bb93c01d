"""Trace-pushdown systems: parsing, the two tPDS conditions, saturation,
loop-connectedness and the split into pop and push sub-systems."""

import hashlib
from collections import namedtuple

from .errors import InputError, PreconditionError
from .graphs import disconnected_cycle
from .traces import DependenceAlphabet


class Transition(namedtuple("Transition", "src read push dst")):
    """``src --read | push--> dst``; ``push`` is a tuple of letters."""

    __slots__ = ()

    def __str__(self):
        return f"{self.src} --{self.read}|{''.join(self.push) or '-'}--> {self.dst}"


FLAGS = ("p1", "p2", "saturated", "loop_connected")


class Tpds:
    """A pushdown system over a trace monoid.

    Transitions are kept sorted by state, letter and push word so every
    derived artifact is deterministic.  ``flags`` only records checks that
    succeeded on exactly this transition set.
    """

    def __init__(self, alphabet, states, transitions, flags=()):
        self.alphabet = alphabet
        self.states = tuple(states)
        if len(set(self.states)) != len(self.states):
            raise InputError("duplicate state names")
        self._sindex = {s: i for i, s in enumerate(self.states)}
        trans = set()
        for t in transitions:
            p, a, w, q = t
            w = tuple(w)
            for s in (p, q):
                if s not in self._sindex:
                    raise InputError(f"unknown state {s!r}")
            for x in (a,) + w:
                if x not in alphabet:
                    raise InputError(f"unknown letter {x!r}")
            trans.add(Transition(p, a, w, q))
        self.transitions = tuple(sorted(trans, key=self._key))
        self.flags = frozenset(flags)

    def _key(self, t):
        idx = self.alphabet.index
        return (self._sindex[t.src], idx(t.read), len(t.push),
                tuple(idx(x) for x in t.push), self._sindex[t.dst])

    def state_index(self, s):
        try:
            return self._sindex[s]
        except KeyError:
            raise InputError(f"unknown state {s!r}") from None

    def with_transitions(self, transitions, flags=()):
        return Tpds(self.alphabet, self.states, transitions, flags)

    def with_flags(self, *flags):
        return Tpds(self.alphabet, self.states, self.transitions, self.flags | set(flags))

    def __eq__(self, other):
        return (isinstance(other, Tpds) and self.alphabet == other.alphabet
                and self.states == other.states
                and self.transitions == other.transitions)

    def __hash__(self):
        return hash((self.alphabet, self.states, self.transitions))

    def __repr__(self):
        return (f"Tpds(states={list(self.states)}, letters={list(self.alphabet.letters)}, "
                f"transitions={len(self.transitions)})")

    # -- text format ---------------------------------------------------
    def to_text(self):
        lines = [self.alphabet.to_text().rstrip("\n"),
                 "states " + " ".join(self.states)]
        for t in self.transitions:
            lines.append(f"trans {t.src} {t.read} {''.join(t.push) or '-'} {t.dst}")
        return "\n".join(lines) + "\n"

    def digest(self):
        return hashlib.sha256(self.to_text().encode()).hexdigest()

    @classmethod
    def from_text(cls, text):
        alpha_lines = []
        states = None
        trans = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            words = raw.split("#", 1)[0].split()
            if not words:
                alpha_lines.append("")
                continue
            kw = words[0]
            if kw in ("letters", "dep"):
                alpha_lines.append(raw)
                continue
            alpha_lines.append("")
            if kw == "states":
                if states is not None:
                    raise InputError("duplicate 'states' line", lineno)
                states = words[1:]
                if not states:
                    raise InputError("no states declared", lineno)
            elif kw == "trans":
                if len(words) != 5:
                    raise InputError("expected 'trans P A WORD Q'", lineno)
                trans.append((lineno, words[1:]))
            else:
                raise InputError(f"unexpected keyword {kw!r}", lineno)
        alphabet = DependenceAlphabet.from_text("\n".join(alpha_lines))
        for lineno, raw in enumerate(text.splitlines(), 1):
            words = raw.split("#", 1)[0].split()
            if words and words[0] == "letters":
                for a in words[1:]:
                    if len(a) != 1 or a == "-":
                        raise InputError(f"letter {a!r} must be a single character "
                                         "other than '-'", lineno)
        if states is None:
            raise InputError("missing 'states' line")
        known = set(states)
        out = []
        for lineno, (p, a, w, q) in trans:
            for s in (p, q):
                if s not in known:
                    raise InputError(f"unknown state {s!r}", lineno)
            word = () if w == "-" else tuple(w)
            for x in (a,) + word:
                if x not in alphabet:
                    raise InputError(f"unknown letter {x!r}", lineno)
            out.append((p, a, word, q))
        return cls(alphabet, states, out)


def load(path):
    with open(path, encoding="utf-8") as fh:
        return Tpds.from_text(fh.read())


# ---------------------------------------------------------------------------
# conditions

def check_p1(system):
    """``D(w) ⊆ D(a)`` for every transition; returns ``(ok, offender)``."""
    al = system.alphabet
    for t in system.transitions:
        if al.dep_mask(al.mask(t.push)) & ~al.dep_mask(al.bit(t.read)):
            return False, t
    return True, None


def check_p2(system):
    """Independent reads commute; returns ``(ok, (t1, t2))``."""
    al = system.alphabet
    by_src = {}
    for t in system.transitions:
        by_src.setdefault(t.src, []).append(t)
    present = set(system.transitions)
    for t1 in system.transitions:
        for t2 in by_src.get(t1.dst, ()):
            if not al.independent(t1.read, t2.read):
                continue
            if not any(Transition(t1.src, t2.read, t2.push, m) in present
                       and Transition(m, t1.read, t1.push, t2.dst) in present
                       for m in system.states):
                return False, (t1, t2)
    return True, None


def saturate(system):
    """Least superset closed under
    ``(p,a,ubv,q), (q,b,ε,r), b ∥ v  ⟹  (p,a,uv,r)``."""
    al = system.alphabet
    trans = set(system.transitions)
    pops = {}
    for t in trans:
        if not t.push:
            pops.setdefault(t.src, set()).add(t)
    changed = True
    while changed:
        changed = False
        for t in sorted(trans, key=system._key):
            w = t.push
            tail = 0
            for i in range(len(w) - 1, -1, -1):
                b = w[i]
                if al.dep_mask(al.bit(b)) & tail:
                    tail |= al.bit(b)
                    continue
                for pop in sorted(pops.get(t.dst, ()), key=system._key):
                    if pop.read != b:
                        continue
                    new = Transition(t.src, t.read, w[:i] + w[i + 1:], pop.dst)
                    if new not in trans:
                        trans.add(new)
                        if not new.push:
                            pops.setdefault(new.src, set()).add(new)
                        changed = True
                tail |= al.bit(b)
    flags = system.flags & {"p1", "p2"}
    return system.with_transitions(trans, flags | {"saturated"})


def is_saturated(system):
    return saturate(system).transitions == system.transitions


def loop_graph(system):
    """Nodes ``(state, letter)``; an edge ``(p,a) → (q,b)`` labelled
    ``alph(u)`` for every transition ``(p,a,ubv,q)`` with ``b ∥ v``.

    Returns ``(nodes, edges)`` with edges ``(u, label_mask, v, transition)``.
    """
    al = system.alphabet
    nodes = [(s, a) for s in system.states for a in al.letters]
    nid = {n: i for i, n in enumerate(nodes)}
    edges = []
    for t in system.transitions:
        w = t.push
        tail = 0
        for i in range(len(w) - 1, -1, -1):
            b = w[i]
            if not al.dep_mask(al.bit(b)) & tail:
                edges.append((nid[(t.src, t.read)], al.mask(w[:i]),
                              nid[(t.dst, b)], t))
            tail |= al.bit(b)
    return nodes, edges


def check_loop_connected(system):
    """``(ok, witness)``; the witness is a closed walk of loop-graph edges
    ``((p, a), letters, (q, b), transition)`` whose letters are disconnected."""
    if "saturated" not in system.flags and not is_saturated(system):
        raise PreconditionError("system is not saturated", flag="saturated")
    al = system.alphabet
    nodes, edges = loop_graph(system)
    walk = disconnected_cycle(len(nodes), [e[:3] for e in edges], al)
    if walk is None:
        return True, None
    steps = [(nodes[edges[j][0]], al.letters_of(edges[j][1]), nodes[edges[j][2]],
              edges[j][3]) for j in walk]
    return False, steps


def validate(system):
    """Run P1, P2, saturation and loop-connectedness in that order.

    Returns the saturated system with every flag set, or raises
    :class:`PreconditionError` naming the first failed condition.
    """
    ok, bad = check_p1(system)
    if not ok:
        raise PreconditionError(f"P1 fails on {bad}", flag="p1", witness=bad)
    ok, bad = check_p2(system)
    if not ok:
        raise PreconditionError(f"P2 fails on {bad[0]} ; {bad[1]}", flag="p2",
                                witness=bad)
    sat = saturate(system.with_flags("p1", "p2"))
    ok, bad = check_p2(sat)
    if not ok:
        raise PreconditionError(f"P2 fails after saturation on {bad[0]} ; {bad[1]}",
                                flag="p2", witness=bad)
    ok, walk = check_loop_connected(sat)
    if not ok:
        raise PreconditionError("not loop-connected", flag="loop-connected",
                                witness=walk)
    return sat.with_flags("loop_connected")


def split(system):
    """``(pop system, {twin class index: push system})``.

    The pop system holds the transitions pushing ε; the push system of a
    twin class holds those reading a letter of the class and pushing a
    nonempty word.  Every class gets an entry, possibly empty.
    """
    al = system.alphabet
    classes = al.twin_classes()
    member = {a: i for i, c in enumerate(classes) for a in c}
    eps = [t for t in system.transitions if not t.push]
    push = {i: [] for i in range(len(classes))}
    for t in system.transitions:
        if t.push:
            push[member[t.read]].append(t)
    flags = system.flags
    return (system.with_transitions(eps, flags),
            {i: system.with_transitions(ts, flags) for i, ts in push.items()})
