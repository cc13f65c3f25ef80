"""Averaging projections over animals and the finitely supported eigenbasis.

For an animal A with boundary dA, the lamp-space projection averages the
lamp at every site of A and takes the complement of the average at every
site of dA.  Tensoring an orthonormal basis of its range with the
eigenvectors of the truncated walk matrix yields finitely supported
eigenfunctions of the lamplighter operator; all identities here are
checked against the independent operator application in ``walk``.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .animals import enumerate_animals
from .errors import BudgetError, GraphSpecError
from .graphs import symmetrize, truncate_kernel
from .walk import IOTA, LampVector, config_set

__all__ = [
    "ConfigVector",
    "ProjectionSpec",
    "theta_site",
    "theta_animal",
    "range_basis",
    "range_dimension",
    "projector_matrix",
    "build_eigenfunctions",
    "verify_eigen",
    "lamp_theta_animal",
    "intertwine_check",
    "CompletenessReport",
    "completeness_probe",
]


class ConfigVector:
    """Finitely supported vector on lamp configurations (no walker part)."""

    __slots__ = ("data",)

    def __init__(self, data=None):
        self.data = dict(data) if data else {}

    @classmethod
    def basis(cls, cfg, exact=False):
        return cls({cfg: Fraction(1) if exact else 1.0})

    def norm_sq(self):
        return sum(a * a for a in self.data.values())

    def norm(self):
        return math.sqrt(float(self.norm_sq()))

    def inner(self, other):
        if len(other.data) < len(self.data):
            return other.inner(self)
        return sum(a * other.data[c] for c, a in self.data.items()
                   if c in other.data)

    def add_scaled(self, other, c):
        out = dict(self.data)
        for k, a in other.data.items():
            out[k] = out.get(k, 0) + c * a
        return ConfigVector({k: a for k, a in out.items() if a != 0})

    def __sub__(self, other):
        return self.add_scaled(other, -1)

    def __len__(self):
        return len(self.data)


@dataclass(frozen=True)
class ProjectionSpec:
    average_sites: tuple
    complement_sites: tuple
    m: int

    def __post_init__(self):
        if set(self.average_sites) & set(self.complement_sites):
            raise GraphSpecError("average and complement sites must be disjoint")
        if self.m < 2:
            raise GraphSpecError("lamp count m must be >= 2")

    @classmethod
    def for_animal(cls, animal, m):
        return cls(tuple(animal.vertices), tuple(animal.boundary), m)


def theta_site(v, site, m):
    """Average the lamp value at one site over its m states."""
    out = {}
    for cfg, a in v.data.items():
        share = a / m
        for lamp in range(m):
            c2 = config_set(cfg, site, lamp)
            out[c2] = out.get(c2, 0) + share
    return ConfigVector({c: a for c, a in out.items() if a != 0})


def theta_animal(v, spec):
    """Averages on the animal's sites, complements on its boundary."""
    out = v
    for x in spec.average_sites:
        out = theta_site(out, x, spec.m)
    for y in spec.complement_sites:
        out = out - theta_site(out, y, spec.m)
    return out


# -- dense window machinery ------------------------------------------------


def _window_codec(window, m):
    window = tuple(sorted(window))
    pos = {s: i for i, s in enumerate(window)}
    dim = m ** len(window)
    if dim > 4_000_000:
        raise BudgetError(f"lamp window of {len(window)} sites (m={m}) too large")
    return window, pos, dim


def _decode(idx, window, m):
    cfg = []
    for s in window:
        idx, lamp = divmod(idx, m)
        if lamp:
            cfg.append((s, lamp))
    return tuple(cfg)


def _encode(cfg, pos, m):
    return sum(lamp * m ** pos[s] for s, lamp in cfg)


def _apply_dense(vec, spec, pos, m):
    dim = vec.shape[0]

    def avg(v, i):
        pre = dim // m ** (i + 1)
        t = v.reshape(pre, m, m**i)
        return np.broadcast_to(t.mean(axis=1, keepdims=True), t.shape).reshape(dim)

    out = vec
    for x in spec.average_sites:
        out = avg(out, pos[x])
    for y in spec.complement_sites:
        out = out - avg(out, pos[y])
    return out


def range_dimension(spec, window):
    """(m-1)^|dA| * m^(|W| - |A| - |dA|)."""
    free = len(window) - len(spec.average_sites) - len(spec.complement_sites)
    if free < 0:
        raise GraphSpecError("window smaller than the animal plus boundary")
    return (spec.m - 1) ** len(spec.complement_sites) * spec.m**free


def projector_matrix(spec, window):
    """Dense matrix of the projection on configurations over the window."""
    window, pos, dim = _window_codec(window, spec.m)
    M = np.eye(dim)
    for j in range(dim):
        M[:, j] = _apply_dense(M[:, j], spec, pos, spec.m)
    return M


def range_basis(spec, outer_window, norm_tol=1e-12):
    """Orthonormal basis of the projection's range over the window.

    Gram-Schmidt over projected basis configurations, pivoting by support
    size then lexicographic order, with one re-orthogonalization pass;
    stops once the range dimension is reached.
    """
    m = spec.m
    sites = set(spec.average_sites) | set(spec.complement_sites)
    if not sites <= set(outer_window):
        raise GraphSpecError("window must contain the animal and its boundary")
    window, pos, dim = _window_codec(outer_window, m)
    want = range_dimension(spec, window)

    order = sorted(range(dim), key=lambda i: (len(_decode(i, window, m)),
                                              _decode(i, window, m)))
    basis = []
    for idx in order:
        if len(basis) == want:
            break
        vec = np.zeros(dim)
        vec[idx] = 1.0
        w = _apply_dense(vec, spec, pos, m)
        for _ in range(2):
            for b in basis:
                w = w - (w @ b) * b
        nrm = np.linalg.norm(w)
        if nrm > norm_tol:
            basis.append(w / nrm)

    out = []
    for b in basis:
        data = {}
        for i in np.nonzero(b)[0]:
            data[_decode(int(i), window, m)] = float(b[i])
        out.append(ConfigVector(data))
    return out


# -- eigenfunctions --------------------------------------------------------


def build_eigenfunctions(animal, k, m, outer_window=None):
    """All (eigenvalue, eigenfunction) pairs an animal contributes.

    Tensor of a range-basis vector with an eigenvector of the symmetrized
    truncated kernel; outputs are unit norm and mutually orthogonal.
    """
    if outer_window is None:
        outer_window = tuple(sorted(set(animal.vertices) | set(animal.boundary)))
    spec = ProjectionSpec.for_animal(animal, m)
    es_vals, es_vecs = _animal_eigensystem(k, animal)
    lamp_basis = range_basis(spec, outer_window)
    out = []
    for j in range(len(es_vals)):
        f = es_vecs[:, j]
        for phi in lamp_basis:
            data = {}
            for cfg, a in phi.data.items():
                for i, vtx in enumerate(animal.vertices):
                    if f[i] != 0:
                        data[(cfg, vtx)] = a * float(f[i])
            out.append((float(es_vals[j]), LampVector(data)))
    return out


def _animal_eigensystem(k, animal):
    from .spectral import eig_symmetric

    es = eig_symmetric(symmetrize(truncate_kernel(k, animal.vertices)))
    return es.eigenvalues, es.eigenvectors


def verify_eigen(pair, op):
    """Residual ||T phi - lambda phi|| via the independent operator
    application (which never sees the animal)."""
    lam, phi = pair
    return op.apply(phi).add_scaled(phi, -lam).norm()


def lamp_theta_animal(lv, spec):
    """The lamp-space projection amplified to configuration x vertex."""
    groups = {}
    for (cfg, x), a in lv.data.items():
        groups.setdefault(x, {})[cfg] = a
    out = {}
    for x, data in groups.items():
        cv = theta_animal(ConfigVector(data), spec)
        for cfg, a in cv.data.items():
            out[(cfg, x)] = a
    return LampVector(out)


def intertwine_check(animal, op, outer_window, trials=None, seed=0):
    """Max residual of the reduction identity on basis vectors.

    Compares applying the full operator after the projection against the
    projection tensored with the truncated walk matrix, on basis vectors
    e_(config, vertex) with the vertex in the animal or its boundary.
    Exhaustive when the basis count fits in ``trials`` (or trials is
    None); otherwise a seeded random sample.
    """
    m = op.m
    spec = ProjectionSpec.for_animal(animal, m)
    window = tuple(sorted(outer_window))
    if not (set(animal.vertices) | set(animal.boundary)) <= set(window):
        raise GraphSpecError("window must contain the animal and its boundary")
    A = animal.vertices
    a_index = {v: i for i, v in enumerate(A)}
    if op.symmetrized:
        TA = symmetrize(truncate_kernel(op.kernel, A))
    else:
        TA = truncate_kernel(op.kernel, A).matrix

    configs = list(product(range(m), repeat=len(window)))
    vertices = list(A) + list(animal.boundary)
    cases = [(c, x) for c in configs for x in vertices]
    if trials is not None and len(cases) > trials:
        rng = random.Random(seed)
        cases = rng.sample(cases, trials)

    worst = 0.0
    for lamps, x in cases:
        cfg = tuple((s, l) for s, l in zip(window, lamps) if l)
        e = LampVector.basis(cfg, x)
        if x in a_index:
            lhs = op.apply(lamp_theta_animal(e, spec))
            col = TA[:, a_index[x]]
            cv = theta_animal(ConfigVector.basis(cfg), spec)
            rhs = LampVector({
                (c, A[z]): a * float(col[z])
                for c, a in cv.data.items()
                for z in range(len(A))
                if col[z] != 0
            })
        else:
            lhs = op.apply(lamp_theta_animal(
                LampVector(), spec))  # P_A kills the vector
            rhs = LampVector()
        worst = max(worst, (lhs - rhs).norm())
    return worst


def pairwise_orthogonality_residual(g, root, m, max_size):
    """Max norm of applying two distinct animals' projections in sequence.

    Distinct connected sets through a common root always overlap, so the
    composition must annihilate every basis configuration over the joint
    lamp window.
    """
    from itertools import combinations

    found = enumerate_animals(g, root, max_size)
    worst = 0.0
    for a, b in combinations(found, 2):
        sa = ProjectionSpec.for_animal(a, m)
        sb = ProjectionSpec.for_animal(b, m)
        window = sorted(set(a.vertices) | set(a.boundary)
                        | set(b.vertices) | set(b.boundary))
        for lamps in product(range(m), repeat=len(window)):
            cfg = tuple((s, l) for s, l in zip(window, lamps) if l)
            v = theta_animal(theta_animal(ConfigVector.basis(cfg), sb), sa)
            worst = max(worst, v.norm())
    return worst


def cross_gram_deviation(blocks):
    """Max deviation from identity of the Gram matrix of all
    eigenfunctions across all animals (``blocks`` is a list of
    ``build_eigenfunctions`` outputs)."""
    from scipy.sparse import csr_matrix

    vecs = [lv for pairs in blocks for (_, lv) in pairs]
    if not vecs:
        return 0.0
    key_index = {}
    rows, cols, vals = [], [], []
    for i, v in enumerate(vecs):
        for key, a in v.data.items():
            j = key_index.setdefault(key, len(key_index))
            rows.append(i)
            cols.append(j)
            vals.append(float(a))
    V = csr_matrix((vals, (rows, cols)), shape=(len(vecs), len(key_index)))
    G = (V @ V.T).toarray()
    return float(np.max(np.abs(G - np.eye(len(vecs)))))


# -- completeness probe ----------------------------------------------------


@dataclass
class CompletenessReport:
    """Measured projection mass at the all-off configuration.

    ``raw_mass`` is the literal sum over enumerated animals;
    ``conditioned_mass`` divides by p = 1/m (root conditioned open).
    The raw sum converges to 1/m, not 1; see the package README.
    """

    raw_mass: float
    conditioned_mass: float
    raw_mass_frac: Fraction
    animal_count: int
    operator_checked: int
    max_size: int
    m: int


def completeness_probe(g, root, m, max_size, operator_cap=12, **enum_kwargs):
    """Sum of squared projection norms of the all-off configuration.

    Computed in closed form (1/m)^|A| ((m-1)/m)^|dA| for every animal,
    and cross-checked by exact operator application for animals whose
    lamp window has at most ``operator_cap`` sites.
    """
    animals = enumerate_animals(g, root, max_size, **enum_kwargs)
    raw = Fraction(0)
    checked = 0
    for a in animals:
        closed = (Fraction(1, m) ** a.size
                  * Fraction(m - 1, m) ** a.boundary_size)
        if a.size + a.boundary_size <= operator_cap:
            spec = ProjectionSpec.for_animal(a, m)
            v = theta_animal(ConfigVector.basis(IOTA, exact=True), spec)
            if v.norm_sq() != closed:
                raise AssertionError(
                    f"projection norm mismatch on animal {a.vertices}: "
                    f"operator {v.norm_sq()} vs closed form {closed}"
                )
            checked += 1
        raw += closed
    return CompletenessReport(
        raw_mass=float(raw),
        conditioned_mass=float(raw * m),
        raw_mass_frac=raw,
        animal_count=len(animals),
        operator_checked=checked,
        max_size=max_size,
        m=m,
    )
