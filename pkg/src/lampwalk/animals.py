"""Enumeration of rooted connected vertex sets (lattice animals).

Each animal A carries its vertex boundary dA and the cluster probability
p^|A| (1-p)^|dA|.  Enumeration uses children-first growth with a
forbidden-set rule so every connected set containing the root is emitted
exactly once; output order is by size, then lexicographically on the
sorted vertex-id list.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetError, GraphSpecError
from .graphs import ball

__all__ = [
    "Animal",
    "boundary",
    "enumerate_animals",
    "animal_probability",
    "total_animal_mass",
    "residual_mass",
]


@dataclass(frozen=True)
class Animal:
    vertices: tuple
    boundary: tuple
    root: int

    @property
    def size(self):
        return len(self.vertices)

    @property
    def boundary_size(self):
        return len(self.boundary)


def boundary(g, A):
    """Vertices outside A adjacent to A, sorted."""
    inside = set(A)
    out = set()
    for v in A:
        for u in g.neighbors(v):
            if u not in inside:
                out.add(u)
    return tuple(sorted(out))


def enumerate_animals(g, root, max_size, max_animals=2_000_000):
    """All connected vertex sets containing root with size <= max_size.

    Emitted as a list of Animal, ordered by (size, sorted vertex ids).
    Raises BudgetError when more than ``max_animals`` sets would be
    produced.
    """
    if max_size < 1:
        raise GraphSpecError("max_size must be >= 1")
    found = []

    # Children-first growth with a forbidden set: ``banned`` holds every
    # vertex that ever entered a candidate list on the current branch, so
    # each connected superset is reached along exactly one branch.
    def grow(current, ext, banned):
        if len(found) >= max_animals:
            raise BudgetError(
                f"animal budget {max_animals} exceeded at size {len(current)}"
            )
        found.append(tuple(sorted(current)))
        if len(current) == max_size:
            return
        for i, v in enumerate(ext):
            fresh = [u for u in g.neighbors(v) if u not in banned]
            current.append(v)
            grow(current, ext[i + 1 :] + fresh, banned | set(fresh))
            current.pop()

    root_ext = list(g.neighbors(root))
    grow([root], root_ext, {root} | set(root_ext))
    found.sort(key=lambda vs: (len(vs), vs))
    return [Animal(vs, boundary(g, vs), root) for vs in found]


def animal_probability(a, p):
    """Cluster law p^|A| (1-p)^|dA|; exact when p is a Fraction."""
    if not 0 < p < 1:
        raise GraphSpecError("p must lie in (0,1)")
    return p ** a.size * (1 - p) ** a.boundary_size


def total_animal_mass(g, root, p, mc_samples=200_000, mc_seed=0, mc_radius=64):
    """Total probability that the cluster of root is nonempty and finite.

    Finite graphs: exact sum over the exhaustive enumeration.  The line:
    closed form p (animals are intervals; the geometric series telescopes).
    Other infinite graphs: Monte Carlo estimate of P[root open, cluster
    stays inside the exploration radius].
    """
    if g.is_finite:
        return sum(
            animal_probability(a, p)
            for a in enumerate_animals(g, root, g.n_vertices)
        )
    if g.family == "line":
        return p
    from .percolation import sample_cluster, sample_rng

    hits = 0
    for i in range(mc_samples):
        s = sample_cluster(g, root, float(p), mc_radius, sample_rng(mc_seed, i))
        if s.root_open and not s.truncated:
            hits += 1
    return hits / mc_samples


def residual_mass(g, root, p, max_size, animals=None, **mc_kwargs):
    """Mass of animals missed by truncating enumeration at max_size.

    Returns total_animal_mass - (mass of the enumerated animals); the
    difference is >= 0 up to the Monte Carlo error of the total.
    """
    if animals is None:
        animals = enumerate_animals(g, root, max_size)
    enumerated = sum(animal_probability(a, p) for a in animals)
    return total_animal_mass(g, root, p, **mc_kwargs) - enumerated
