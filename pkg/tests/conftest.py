"""Shared fixtures and independent brute-force oracles.

The oracles deliberately avoid the library's own enumeration and
operator code paths: connectivity is checked by BFS over explicit
subsets, return probabilities by literal path enumeration, and
percolation expectations by summing over all site-state vectors.
"""

from fractions import Fraction
from itertools import combinations, product

import pytest

from lampwalk import build_graph, explicit_graph, kernel, truncate_kernel


@pytest.fixture
def k2():
    return explicit_graph(["x", "y"], [[0, 1]])


@pytest.fixture
def p3():
    return explicit_graph(["a", "b", "c"], [[0, 1], [1, 2]])


@pytest.fixture
def cycle4():
    return build_graph("cycle:4")


@pytest.fixture
def grid33():
    return build_graph("grid:3x3")


def desk_graphs():
    """The four finite desk graphs with their preferred roots."""
    k2 = explicit_graph(["x", "y"], [[0, 1]])
    p3 = explicit_graph(["a", "b", "c"], [[0, 1], [1, 2]])
    c4 = build_graph("cycle:4")
    g33 = build_graph("grid:3x3")
    return [
        ("K2", k2, k2.id_of("x")),
        ("P3", p3, p3.id_of("b")),
        ("cycle:4", c4, c4.id_of(0)),
        ("grid:3x3", g33, g33.id_of((1, 1))),
    ]


# -- oracles ---------------------------------------------------------------


def is_connected(g, vs):
    vs = set(vs)
    if not vs:
        return False
    start = next(iter(vs))
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for u in g.neighbors(v):
            if u in vs and u not in seen:
                seen.add(u)
                stack.append(u)
    return seen == vs


def brute_animal_sets(g, root, max_size, universe=None):
    """All connected subsets containing root, by explicit combinations."""
    if universe is None:
        universe = list(range(g.n_vertices))
    rest = [v for v in universe if v != root]
    out = []
    for size in range(1, max_size + 1):
        for extra in combinations(rest, size - 1):
            vs = (root,) + extra
            if is_connected(g, vs):
                out.append(tuple(sorted(vs)))
    out.sort(key=lambda vs: (len(vs), vs))
    return out


def brute_path_diag(g, root, n, weight_fn):
    """Sum over closed n-step paths of the product of edge weights."""
    if n == 0:
        return 1.0
    total = 0.0
    stack = [(root, 1.0, n)]
    while stack:
        v, w, left = stack.pop()
        if left == 0:
            if v == root:
                total += w
            continue
        for u in g.neighbors(v):
            stack.append((u, w * weight_fn(v, u), left - 1))
    return total


def exhaustive_expected_return(g, root, p, n):
    """Exact percolation expectation by summing all 2^|V| site states.

    For each open/closed assignment, the root's open cluster (possibly
    empty) contributes its absorbing n-step return probability weighted
    by the assignment's probability.  Exact when p is a Fraction.
    """
    if n == 0:
        return Fraction(1)
    k = kernel(g)
    nv = g.n_vertices
    total = Fraction(0)
    for states in product((False, True), repeat=nv):
        prob = Fraction(1)
        for s in states:
            prob *= p if s else (1 - p)
        if not states[root]:
            continue
        # open cluster of the root
        seen = {root}
        stack = [root]
        while stack:
            v = stack.pop()
            for u in g.neighbors(v):
                if states[u] and u not in seen:
                    seen.add(u)
                    stack.append(u)
        cluster = sorted(seen)
        rows = truncate_kernel(k, cluster).matrix_frac()
        r0 = cluster.index(root)
        vec = [Fraction(0)] * len(cluster)
        vec[r0] = Fraction(1)
        for _ in range(n):
            vec = [
                sum((rows[i][j] * vec[j] for j in range(len(cluster))), Fraction(0))
                for i in range(len(cluster))
            ]
        total += prob * vec[r0]
    return total
