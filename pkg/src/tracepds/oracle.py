"""Brute-force semantics of the configuration graph, bounded by trace size,
and the harness comparing it with a built reach table."""

import json
from dataclasses import dataclass, field

from .graphs import sccs
from .reach import build_table
from .traces import Trace, all_traces


def one_step(system, config, bound=None):
    """Successors of ``(state, trace)``; returns ``(set, overflow)``.

    Successors longer than ``bound`` are left out and flag ``overflow``.
    """
    p, s = config
    out = set()
    overflow = False
    al = system.alphabet
    for t in system.transitions:
        if t.src != p:
            continue
        x = s.pop(t.read)
        if x is None:
            continue
        if bound is not None and len(x) + len(t.push) > bound:
            overflow = True
            continue
        out.add((t.dst, x * Trace.from_word(t.push, al)))
    return out, overflow


def bounded_reach(system, p, s, bound):
    """All configurations reachable from ``(p, s)`` through traces of at most
    ``bound`` letters, and whether some step was cut off."""
    start = (p, s)
    seen = {start}
    frontier = [start]
    overflow = False
    while frontier:
        nxt = []
        for c in frontier:
            succ, over = one_step(system, c, bound)
            overflow |= over
            for d in succ:
                if d not in seen:
                    seen.add(d)
                    nxt.append(d)
        frontier = nxt
    return seen, overflow


def image(relation, s, max_letters):
    """Traces ``t`` with ``(s, t)`` in ``relation`` and ``|t| ≤ max_letters``."""
    auto = relation.auto
    if not auto.initial:
        return set()
    al = relation.alphabet
    src = s.blocks
    out = set()
    stack = [(next(iter(auto.initial)), 0, (), 0, False)]
    seen = set()
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        state, i, blocks, count, closed = node
        done = i >= len(src)
        left = src[i] if not done else 0
        if done and state in auto.final:
            out.add(Trace.from_blocks(blocks, al))
        for (x, y), ts in auto.delta[state].items():
            if x != left:
                continue
            if y == 0:
                if done:
                    continue
                stack.append((next(iter(ts)), i + 1, blocks, count, True))
                continue
            if closed:
                continue
            c = count + bin(y).count("1")
            if c > max_letters:
                continue
            stack.append((next(iter(ts)), i + 1, blocks + (y,), c, False))
    return out


@dataclass
class Report:
    bound: int
    intermediate: int
    pairs_checked: int = 0
    hard: list = field(default_factory=list)
    soft: list = field(default_factory=list)
    overflow: bool = False

    @property
    def ok(self):
        return not self.hard and not self.soft

    def to_json(self, limit=20):
        return {"bound": self.bound, "intermediate": self.intermediate,
                "pairs_checked": self.pairs_checked,
                "hard_failures": len(self.hard), "soft_failures": len(self.soft),
                "overflow": self.overflow,
                "hard_witnesses": [_fmt(w) for w in self.hard[:limit]],
                "soft_witnesses": [_fmt(w) for w in self.soft[:limit]]}

    def to_text(self, limit=20):
        lines = [f"endpoint bound {self.bound}, intermediate bound {self.intermediate}",
                 f"pairs checked: {self.pairs_checked}",
                 f"hard failures (reachable but rejected): {len(self.hard)}",
                 f"soft failures (accepted but not found): {len(self.soft)}"]
        for kind, items in (("hard", self.hard), ("soft", self.soft)):
            for w in items[:limit]:
                lines.append(f"  {kind}: {_fmt(w)}")
        return "\n".join(lines) + "\n"


def _fmt(w):
    (p, s), (q, t) = w
    return f"({p},{s.fnf_str()}) -> ({q},{t.fnf_str()})"


def _closure_bits(system, sources, targets, intermediate):
    """Bitset of reachable targets for every source, within ``intermediate``."""
    index = {}
    order = []
    edges = []
    overflow = False

    def nid(c):
        j = index.get(c)
        if j is None:
            j = index[c] = len(order)
            order.append(c)
        return j

    for c in sources:
        nid(c)
    i = 0
    while i < len(order):
        c = order[i]
        i += 1
        succ, over = one_step(system, c, intermediate)
        overflow |= over
        for d in sorted(succ, key=lambda x: (x[0], x[1].blocks)):
            edges.append((index[c], 0, nid(d)))
    n = len(order)
    comp = sccs(n, edges)
    ncomp = max(comp, default=-1) + 1
    tbit = {c: 1 << k for k, c in enumerate(targets)}
    bits = [0] * ncomp
    for j, c in enumerate(order):
        bits[comp[j]] |= tbit.get(c, 0)
    succ = [set() for _ in range(ncomp)]
    for u, _, v in edges:
        if comp[u] != comp[v]:
            succ[comp[u]].add(comp[v])
    # Tarjan numbers components in reverse topological order
    for k in range(ncomp):
        for m in succ[k]:
            bits[k] |= bits[m]
    return {c: bits[comp[index[c]]] for c in sources}, overflow


def cross_validate(table, bound, intermediate, system=None):
    """Compare ``table`` against bounded search on ``system`` (default: the
    table's own system) for all endpoint traces of at most ``bound`` letters.

    Hard failure: a configuration pair found by search but rejected by the
    table.  Soft failure: accepted by the table but not found by search
    within the intermediate bound.
    """
    system = system or table.system
    intermediate = max(intermediate, bound)
    traces = all_traces(system.alphabet, bound)
    configs = [(p, t) for p in system.states for t in traces]
    pos = {c: k for k, c in enumerate(configs)}
    bits, overflow = _closure_bits(system, configs, configs, intermediate)
    report = Report(bound, intermediate, overflow=overflow)
    for src in configs:
        p, s = src
        found = bits[src]
        accepted = 0
        for q in system.states:
            for t in image(table.reach[(p, q)], s, bound):
                accepted |= 1 << pos[(q, t)]
        report.pairs_checked += len(configs)
        for k in _bits(found & ~accepted):
            report.hard.append((src, configs[k]))
        for k in _bits(accepted & ~found):
            report.soft.append((src, configs[k]))
    return report


def _bits(x):
    k = 0
    while x:
        if x & 1:
            yield k
        x >>= 1
        k += 1


def triage(report, system, max_intermediate):
    """Soft witnesses that bounded search still misses with intermediate
    bounds up to ``max_intermediate``; ``[]`` means all were confirmed."""
    open_items = []
    for (src, dst) in report.soft:
        for b in range(report.intermediate + 1, max_intermediate + 1):
            if dst in bounded_reach(system, src[0], src[1], b)[0]:
                break
        else:
            open_items.append((src, dst))
    return open_items


def mutate(system, index=0):
    """The system with its ``index``-th transition removed."""
    trans = list(system.transitions)
    del trans[index]
    return system.with_transitions(trans)


def mutation_report(system, bound, intermediate, index=0):
    """Build the table of a mutated system and check it against the original."""
    table = build_table(mutate(system, index))
    return cross_validate(table, bound, intermediate, system=system)


def report_json(report):
    return json.dumps(report.to_json(), indent=2, sort_keys=True)
