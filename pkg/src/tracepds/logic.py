"""First-order logic over the trace structure S(P) and the configuration
graph G(P).

Grammar (``EX``/``ALL`` bind as far right as possible; ``->`` is right
associative and binds weakest)::

    φ ::= EX x . φ | ALL x . φ | φ -> φ | φ | φ | φ & φ | ~φ | (φ)
        | true | false | t = t
        | step[p,q](t, t) | reach[p,q](t, t)              # s-level
        | state[p](t) | t -> t | t ->* t                   # g-level
    t ::= x | const("WORD") | conf(p, "WORD")

A term followed by ``->`` or ``->*`` is a step atom, never an implication.
"""

import re
from dataclasses import dataclass
from itertools import product

from . import relations as rel
from .errors import InputError
from .traces import Trace


# ---------------------------------------------------------------------------
# syntax

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    word: str


@dataclass(frozen=True)
class Conf:
    state: str
    word: str


@dataclass(frozen=True)
class Bool:
    value: bool


@dataclass(frozen=True)
class Eq:
    left: object
    right: object


@dataclass(frozen=True)
class Rel:
    kind: str      # "step" or "reach"
    p: str
    q: str
    left: object
    right: object


@dataclass(frozen=True)
class State:
    p: str
    term: object


@dataclass(frozen=True)
class Arrow:
    star: bool
    left: object
    right: object


@dataclass(frozen=True)
class Not:
    body: object


@dataclass(frozen=True)
class And:
    left: object
    right: object


@dataclass(frozen=True)
class Or:
    left: object
    right: object


@dataclass(frozen=True)
class Implies:
    left: object
    right: object


@dataclass(frozen=True)
class Exists:
    var: str
    body: object


@dataclass(frozen=True)
class Forall:
    var: str
    body: object


def show(f):
    """Render a formula back into the input syntax."""
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Const):
        return f'const("{f.word}")'
    if isinstance(f, Conf):
        return f'conf({f.state},"{f.word}")'
    if isinstance(f, Bool):
        return "true" if f.value else "false"
    if isinstance(f, Eq):
        return f"{show(f.left)} = {show(f.right)}"
    if isinstance(f, Rel):
        return f"{f.kind}[{f.p},{f.q}]({show(f.left)},{show(f.right)})"
    if isinstance(f, State):
        return f"state[{f.p}]({show(f.term)})"
    if isinstance(f, Arrow):
        return f"{show(f.left)} {'->*' if f.star else '->'} {show(f.right)}"
    if isinstance(f, Not):
        return f"~{_wrap(f.body)}"
    if isinstance(f, (And, Or, Implies)):
        op = {And: "&", Or: "|", Implies: "->"}[type(f)]
        return f"{_wrap(f.left)} {op} {_wrap(f.right)}"
    if isinstance(f, (Exists, Forall)):
        q = "EX" if isinstance(f, Exists) else "ALL"
        return f"{q} {f.var} . {show(f.body)}"
    raise TypeError(f"not a formula: {f!r}")


def _wrap(f):
    s = show(f)
    if isinstance(f, (And, Or, Implies, Exists, Forall, Arrow, Eq)):
        return f"({s})"
    return s


_TOKEN = re.compile(r'\s*(?:(->\*|->|[~&|().,=\[\]])|"([^"]*)"|([A-Za-z_][A-Za-z0-9_\']*))')


def tokenize(text):
    pos = 0
    out = []
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise InputError(f"unexpected character {text[pos]!r} at column {pos + 1}")
        punct, string, ident = m.groups()
        start = m.start(m.lastindex)
        if punct is not None:
            out.append(("op", punct, start))
        elif string is not None:
            out.append(("str", string, start))
        else:
            out.append(("id", ident, start))
        pos = m.end()
    out.append(("end", None, n))
    return out


class _Parser:
    def __init__(self, text, level):
        self.toks = tokenize(text)
        self.i = 0
        self.level = level

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg):
        kind, val, pos = self.peek()
        found = "end of input" if kind == "end" else repr(val)
        raise InputError(f"{msg} at column {pos + 1} (found {found})")

    def accept(self, value):
        kind, val, _ = self.peek()
        if kind in ("op", "id") and val == value:
            self.i += 1
            return True
        return False

    def expect(self, value):
        if not self.accept(value):
            self.error(f"expected {value!r}")

    def ident(self):
        kind, val, _ = self.peek()
        if kind != "id" or val in ("EX", "ALL"):
            self.error("expected a name")
        self.i += 1
        return val

    def string(self):
        kind, val, _ = self.peek()
        if kind != "str":
            self.error("expected a quoted word")
        self.i += 1
        return val

    def formula(self):
        left = self.disjunction()
        if self.accept("->"):
            return Implies(left, self.formula())
        return left

    def disjunction(self):
        left = self.conjunction()
        while self.accept("|"):
            left = Or(left, self.conjunction())
        return left

    def conjunction(self):
        left = self.unary()
        while self.accept("&"):
            left = And(left, self.unary())
        return left

    def unary(self):
        if self.accept("~"):
            return Not(self.unary())
        for word, cls in (("EX", Exists), ("ALL", Forall)):
            if self.accept(word):
                var = self.ident()
                self.expect(".")
                return cls(var, self.formula())
        return self.atom()

    def atom(self):
        kind, val, _ = self.peek()
        if kind == "op" and val == "(":
            self.i += 1
            f = self.formula()
            self.expect(")")
            return f
        if kind == "id" and val in ("true", "false") and not self._is_term_start():
            self.i += 1
            return Bool(val == "true")
        if kind == "id" and val in ("step", "reach") and self.peek(1)[1] == "[":
            if self.level != "s":
                self.error(f"'{val}' atoms belong to s-level formulas")
            self.i += 1
            self.expect("[")
            p = self.ident()
            self.expect(",")
            q = self.ident()
            self.expect("]")
            self.expect("(")
            t1 = self.term()
            self.expect(",")
            t2 = self.term()
            self.expect(")")
            return Rel(val, p, q, t1, t2)
        if kind == "id" and val == "state" and self.peek(1)[1] == "[":
            if self.level != "g":
                self.error("'state' atoms belong to g-level formulas")
            self.i += 1
            self.expect("[")
            p = self.ident()
            self.expect("]")
            self.expect("(")
            t = self.term()
            self.expect(")")
            return State(p, t)
        left = self.term()
        if self.level == "g":
            if self.accept("->*"):
                return Arrow(True, left, self.term())
            if self.accept("->"):
                return Arrow(False, left, self.term())
        self.expect("=")
        return Eq(left, self.term())

    def _is_term_start(self):
        nxt = self.peek(1)
        return nxt[0] == "op" and nxt[1] in ("=", "->", "->*")

    def term(self):
        kind, val, _ = self.peek()
        if kind == "id" and val == "const" and self.peek(1)[1] == "(":
            self.i += 2
            w = self.string()
            self.expect(")")
            if self.level == "g":
                raise InputError("g-level constants are written conf(p, \"WORD\")")
            return Const(w)
        if kind == "id" and val == "conf" and self.peek(1)[1] == "(":
            if self.level != "g":
                self.error("'conf' terms belong to g-level formulas")
            self.i += 2
            p = self.ident()
            self.expect(",")
            w = self.string()
            self.expect(")")
            return Conf(p, w)
        return Var(self.ident())


def parse(text, level="s"):
    """Parse a formula at level ``"s"`` or ``"g"``."""
    if level not in ("s", "g"):
        raise InputError(f"unknown level {level!r}")
    p = _Parser(text, level)
    f = p.formula()
    if p.peek()[0] != "end":
        p.error("unexpected trailing input")
    return f


def free_vars(f):
    if isinstance(f, Var):
        return {f.name}
    if isinstance(f, (Const, Conf, Bool)):
        return set()
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var}
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, State):
        return free_vars(f.term)
    if isinstance(f, Rel):
        return free_vars(f.left) | free_vars(f.right)
    return free_vars(f.left) | free_vars(f.right)


def check_states(f, states):
    """Raise :class:`InputError` on a state name not in ``states``."""
    known = set(states)

    def walk(g):
        names = []
        if isinstance(g, Rel):
            names = [g.p, g.q]
        elif isinstance(g, (State, Conf)):
            names = [g.p if isinstance(g, State) else g.state]
        for s in names:
            if s not in known:
                raise InputError(f"unknown state {s!r}")
        for attr in ("left", "right", "body", "term"):
            sub = getattr(g, attr, None)
            if sub is not None:
                walk(sub)
    walk(f)


# ---------------------------------------------------------------------------
# from the configuration graph to the trace structure

def translate(f, assignment, states):
    """S-level formula equivalent to ``f`` once every free configuration
    variable ``x`` is fixed to state ``assignment[x]``."""
    missing = free_vars(f) - set(assignment)
    if missing:
        raise InputError(f"no state assigned to {sorted(missing)}")
    check_states(f, states)
    for v in assignment.values():
        if v not in states:
            raise InputError(f"unknown state {v!r}")
    return _tr(f, dict(assignment), tuple(states))


def _term(t, env):
    """``(state, s-term)``."""
    if isinstance(t, Var):
        return env[t.name], t
    return t.state, Const(t.word)


def _tr(f, env, states):
    if isinstance(f, Bool):
        return f
    if isinstance(f, State):
        s, _ = _term(f.term, env)
        return Bool(s == f.p)
    if isinstance(f, Eq):
        (s1, t1), (s2, t2) = _term(f.left, env), _term(f.right, env)
        return Eq(t1, t2) if s1 == s2 else Bool(False)
    if isinstance(f, Arrow):
        (s1, t1), (s2, t2) = _term(f.left, env), _term(f.right, env)
        return Rel("reach" if f.star else "step", s1, s2, t1, t2)
    if isinstance(f, Not):
        return Not(_tr(f.body, env, states))
    if isinstance(f, And):
        return And(_tr(f.left, env, states), _tr(f.right, env, states))
    if isinstance(f, Or):
        return Or(_tr(f.left, env, states), _tr(f.right, env, states))
    if isinstance(f, Implies):
        return Implies(_tr(f.left, env, states), _tr(f.right, env, states))
    if isinstance(f, (Exists, Forall)):
        parts = [(Exists if isinstance(f, Exists) else Forall)(
                 f.var, _tr(f.body, {**env, f.var: s}, states)) for s in states]
        join = Or if isinstance(f, Exists) else And
        out = parts[0]
        for p in parts[1:]:
            out = join(out, p)
        return out
    raise InputError(f"not a g-level formula: {f!r}")


# ---------------------------------------------------------------------------
# automatic-structure evaluation

class _Compiler:
    def __init__(self, table, max_trace_len=None):
        self.table = table
        self.alphabet = table.alphabet
        self.identity = rel.identity(self.alphabet)
        self.bound = None if max_trace_len is None else rel.bounded(self.alphabet,
                                                                    max_trace_len)
        self.memo = {}

    def trace(self, word):
        try:
            return Trace.from_word(tuple(word), self.alphabet)
        except InputError as e:
            raise InputError(f"bad constant {word!r}: {e}") from None

    def atom(self, relation, terms):
        """Relation over the sorted variables of ``terms``."""
        names = []
        r = relation
        for t in terms:
            names.append(t.name if isinstance(t, Var) else t)
        # constants: intersect the track with a singleton, then drop it
        for i in range(len(names) - 1, -1, -1):
            t = names[i]
            if isinstance(t, Const):
                single = rel.singleton(self.trace(t.word))
                for j in range(len(names)):
                    if j != i:
                        single = rel.cylindrify(single, j + 1)
                r = rel.project(rel.intersect(r, single), i + 1)
                del names[i]
        # repeated variables: intersect with the identity, then drop a copy
        while len(names) == 2 and names[0] == names[1]:
            r = rel.project(rel.intersect(r, self.identity), 2)
            names = names[:1]
        if len(names) == 2 and names[0] > names[1]:
            r = rel.invert(r)
            names = names[::-1]
        return tuple(names), r

    def extend(self, frame, r, target):
        """Cylindrify ``r`` from ``frame`` up to the sorted ``target``."""
        frame = list(frame)
        for pos, v in enumerate(target):
            if pos >= len(frame) or frame[pos] != v:
                r = rel.cylindrify(r, pos + 1)
                frame.insert(pos, v)
        return r

    def compile(self, f):
        hit = self.memo.get(f)
        if hit is None:
            hit = self.memo[f] = self._compile(f)
        return hit

    def _compile(self, f):
        al = self.alphabet
        if isinstance(f, Bool):
            return (), rel.truth(al, f.value)
        if isinstance(f, Eq):
            return self.atom(self.identity, (f.left, f.right))
        if isinstance(f, Rel):
            table = self.table.step if f.kind == "step" else self.table.reach
            try:
                base = table[(f.p, f.q)]
            except KeyError:
                raise InputError(f"unknown relation {f.kind}[{f.p},{f.q}]") from None
            return self.atom(base, (f.left, f.right))
        if isinstance(f, Not):
            frame, r = self.compile(f.body)
            return frame, rel.complement(r)
        if isinstance(f, (And, Or)):
            f1, r1 = self.compile(f.left)
            f2, r2 = self.compile(f.right)
            frame = tuple(sorted(set(f1) | set(f2)))
            r1 = self.extend(f1, r1, frame)
            r2 = self.extend(f2, r2, frame)
            op = rel.intersect if isinstance(f, And) else rel.union
            return frame, op(r1, r2)
        if isinstance(f, Implies):
            return self.compile(Or(Not(f.left), f.right))
        if isinstance(f, Exists):
            frame, r = self.compile(f.body)
            if f.var not in frame:
                return frame, r
            i = frame.index(f.var)
            if self.bound is not None:
                r = rel.intersect(r, self._bound_on(frame, i))
            return frame[:i] + frame[i + 1:], rel.project(r, i + 1)
        if isinstance(f, Forall):
            return self.compile(Not(Exists(f.var, Not(f.body))))
        raise InputError(f"not an s-level formula: {f!r}")

    def _bound_on(self, frame, i):
        r = self.bound
        for j in range(len(frame)):
            if j != i:
                r = rel.cylindrify(r, j + 1)
        return r


def compile_formula(f, table, max_trace_len=None):
    """``(frame, relation)`` with ``frame`` the sorted free variables."""
    check_states(f, table.system.states)
    return _Compiler(table, max_trace_len).compile(f)


def _leading_exists(f):
    names = []
    while isinstance(f, Exists):
        names.append(f.var)
        f = f.body
    return names, f


def evaluate(f, level, table, max_trace_len=None):
    """Truth of the sentence ``f`` and a witness for its leading ``EX`` block.

    With ``max_trace_len`` every quantifier ranges over traces of at most
    that many letters.  The witness maps each leading variable to a trace
    (s-level) or to a ``(state, trace)`` pair (g-level); it is ``None`` when
    the sentence is false or has no leading existential.
    """
    if isinstance(f, str):
        f = parse(f, level)
    if free_vars(f):
        raise InputError(f"not a sentence: free variables {sorted(free_vars(f))}")
    states = table.system.states
    check_states(f, states)
    comp = _Compiler(table, max_trace_len)
    s_form = f if level == "s" else translate(f, {}, states)
    _, r = comp.compile(s_form)
    value = not r.is_empty()
    names, body = _leading_exists(f)
    if not value or not names:
        return value, None
    if level == "s":
        return value, _witness(comp, body, names, None)
    for combo in product(states, repeat=len(names)):
        env = dict(zip(names, combo))
        w = _witness(comp, translate(body, env, states), names, env)
        if w is not None:
            return value, w
    return value, None  # pragma: no cover


def _witness(comp, body, names, env):
    frame, r = comp.compile(body)
    target = tuple(sorted(set(names)))
    r = comp.extend(frame, r, target)
    if comp.bound is not None:
        for i in range(len(target)):
            r = rel.intersect(r, comp._bound_on(target, i))
    member = r.shortest_member()
    if member is None:
        return None
    values = dict(zip(target, member))
    if env is None:
        return {v: values[v] for v in names}
    return {v: (env[v], values[v]) for v in names}
