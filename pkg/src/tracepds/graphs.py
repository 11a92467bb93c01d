"""Strongly connected components and the search for cycles whose letter set
is disconnected.

Graphs are given as a node count and a list of edges ``(u, label, v)`` where
``label`` is a letter mask.
"""

from collections import deque

from .traces import submasks


def sccs(n, edges):
    """Component id for every node (iterative Tarjan)."""
    succ = [[] for _ in range(n)]
    for u, _, v in edges:
        succ[u].append(v)
    index = [None] * n
    low = [0] * n
    comp = [None] * n
    on_stack = [False] * n
    stack = []
    counter = 0
    ncomp = 0
    for root in range(n):
        if index[root] is not None:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            if i < len(succ[v]):
                work[-1] = (v, i + 1)
                w = succ[v][i]
                if index[w] is None:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
            else:
                work.pop()
                if work:
                    u = work[-1][0]
                    low[u] = min(low[u], low[v])
                if low[v] == index[v]:
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        comp[w] = ncomp
                        if w == v:
                            break
                    ncomp += 1
    return comp


def _path(n, edges, src, dst):
    """Edge indices of a shortest path from ``src`` to ``dst`` (may be empty)."""
    if src == dst:
        return []
    out = [[] for _ in range(n)]
    for i, (u, _, v) in enumerate(edges):
        out[u].append(i)
    parent = {src: None}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for i in out[u]:
            v = edges[i][2]
            if v not in parent:
                parent[v] = i
                if v == dst:
                    path = []
                    while parent[v] is not None:
                        j = parent[v]
                        path.append(j)
                        v = edges[j][0]
                    return path[::-1]
                queue.append(v)
    return None


def disconnected_cycle(n, edges, alphabet):
    """A closed walk whose label union is disconnected, or ``None``.

    For every pair of disjoint nonempty letter sets X ∥ Y the graph is
    restricted to labels inside X ∪ Y; a strongly connected component that
    holds an edge touching X and an edge touching Y yields the witness.
    The result is a list of indices into ``edges``.
    """
    used = 0
    comp = sccs(n, edges)
    for u, lab, v in edges:
        if comp[u] == comp[v]:
            used |= lab
    for x in submasks(used):
        if x == 0:
            continue
        rest = used & ~x & ~alphabet.dep_mask(x)
        for y in submasks(rest):
            if y == 0 or y < x:
                continue
            allowed = x | y
            sub = [(i, e) for i, e in enumerate(edges) if not (e[1] & ~allowed)]
            if not sub:
                continue
            sub_edges = [e for _, e in sub]
            c = sccs(n, sub_edges)
            touch_x = {}
            touch_y = {}
            for j, (u, lab, v) in enumerate(sub_edges):
                if c[u] != c[v]:
                    continue
                if lab & x:
                    touch_x.setdefault(c[u], j)
                if lab & y:
                    touch_y.setdefault(c[u], j)
            for k in sorted(touch_x):
                if k not in touch_y:
                    continue
                e1, e2 = touch_x[k], touch_y[k]
                if e1 == e2:
                    walk = [e1] + _path(n, sub_edges, sub_edges[e1][2], sub_edges[e1][0])
                else:
                    walk = ([e1] + _path(n, sub_edges, sub_edges[e1][2], sub_edges[e2][0])
                            + [e2] + _path(n, sub_edges, sub_edges[e2][2], sub_edges[e1][0]))
                return [sub[j][0] for j in walk]
    return None
