"""Animal enumeration against brute-force subset oracles."""

from fractions import Fraction

import pytest

from conftest import brute_animal_sets
from lampwalk import (
    BudgetError,
    GraphSpecError,
    animal_probability,
    ball,
    boundary,
    build_graph,
    enumerate_animals,
    explicit_graph,
    residual_mass,
    total_animal_mass,
)


def test_k2_animals(k2):
    x, y = k2.id_of("x"), k2.id_of("y")
    found = enumerate_animals(k2, x, 2)
    assert [(a.vertices, a.boundary) for a in found] == [
        ((x,), (y,)),
        ((x, y), ()),
    ]


def test_p3_animals_from_center(p3):
    a, b, c = (p3.id_of(t) for t in "abc")
    found = enumerate_animals(p3, b, 3)
    assert [set(an.vertices) for an in found] == [
        {b}, {a, b}, {b, c}, {a, b, c}]
    assert found[0].boundary == tuple(sorted((a, c)))
    assert found[3].boundary == ()


@pytest.mark.parametrize("name,spec,max_size", [
    ("cycle4", "cycle:4", 4),
    ("grid33", "grid:3x3", 9),
    ("grid34", "grid:3x4", 12),
])
def test_enumeration_matches_brute_force(name, spec, max_size):
    g = build_graph(spec)
    root = 0
    found = enumerate_animals(g, root, max_size)
    expected = brute_animal_sets(g, root, max_size)
    assert [a.vertices for a in found] == expected
    for a in found:
        assert a.boundary == boundary(g, a.vertices)
        assert a.root == root


def test_z2_counts():
    z2 = build_graph("z2")
    o = z2.id_of((0, 0))
    found = enumerate_animals(z2, o, 4)
    counts = {}
    for a in found:
        counts[a.size] = counts.get(a.size, 0) + 1
    assert counts == {1: 1, 2: 4, 3: 18, 4: 76}


def test_monotone_under_subgraph():
    # Animals of a path are animals of a longer path with the same labels.
    short = explicit_graph(list(range(3)), [[0, 1], [1, 2]])
    long = explicit_graph(list(range(5)), [[i, i + 1] for i in range(4)])
    root_s, root_l = short.id_of(1), long.id_of(1)
    vs_short = {tuple(short.label_of(v) for v in a.vertices)
                for a in enumerate_animals(short, root_s, 3)}
    vs_long = {tuple(long.label_of(v) for v in a.vertices)
               for a in enumerate_animals(long, root_l, 3)}
    assert vs_short <= vs_long


def test_budget_and_bad_size(k2):
    x = k2.id_of("x")
    with pytest.raises(GraphSpecError):
        enumerate_animals(k2, x, 0)
    z2 = build_graph("z2")
    with pytest.raises(BudgetError):
        enumerate_animals(z2, z2.id_of((0, 0)), 10, max_animals=100)


def test_animal_probability_exact(k2):
    x = k2.id_of("x")
    single, full = enumerate_animals(k2, x, 2)
    p = Fraction(1, 3)
    assert animal_probability(single, p) == Fraction(2, 9)
    assert animal_probability(full, p) == Fraction(1, 9)
    with pytest.raises(GraphSpecError):
        animal_probability(single, Fraction(0))


@pytest.mark.parametrize("spec,p", [
    ("cycle:4", Fraction(1, 2)),
    ("grid:2x3", Fraction(1, 3)),
])
def test_mass_identity_finite(spec, p):
    # Exhaustive animal masses sum to P[root open] = p on a finite graph.
    g = build_graph(spec)
    assert total_animal_mass(g, 0, p) == p
    assert residual_mass(g, 0, p, g.n_vertices) == 0


def test_line_residual_closed_form():
    line = build_graph("line")
    root = line.id_of(0)
    p = Fraction(1, 2)
    assert total_animal_mass(line, root, p) == p
    # Intervals of length s through the root: s of them, each with mass
    # p^s (1-p)^2, so the enumerated mass is sum_{s<=N} s p^s (1-p)^2.
    for max_size in (3, 6):
        resid = residual_mass(line, root, p, max_size)
        tail = p - sum(s * p**s * (1 - p) ** 2 for s in range(1, max_size + 1))
        assert resid == tail
        assert resid > 0


def test_infinite_mc_mass():
    z2 = build_graph("z2")
    o = z2.id_of((0, 0))
    p = 0.2  # deep subcritical so radius truncation is negligible
    est = total_animal_mass(z2, o, p, mc_samples=20_000, mc_seed=1,
                            mc_radius=32)
    assert abs(est - p) < 0.01
    again = total_animal_mass(z2, o, p, mc_samples=20_000, mc_seed=1,
                              mc_radius=32)
    assert est == again


def test_animals_within_ball_only_need_inner_vertices():
    # Size-k animals through the root live in ball(root, k-1).
    z2 = build_graph("z2")
    o = z2.id_of((0, 0))
    inner = set(ball(z2, o, 3))
    for a in enumerate_animals(z2, o, 4):
        assert set(a.vertices) <= inner
