"""Spectral decompositions and atomic spectral measures.

Local measures of truncated kernels come from the symmetrized matrix:
mass |<v_j, delta_root>|^2 at eigenvalue lambda_j.  The percolation
mixture assembles these over rooted animals with the cluster law, plus
the root-closed atom (1-p) at 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .animals import animal_probability, enumerate_animals, residual_mass
from .errors import GraphSpecError
from .graphs import kernel, symmetrize, truncate_kernel

__all__ = [
    "AtomicMeasure",
    "EigenSystem",
    "eig_symmetric",
    "local_spectral_measure",
    "mixture_measure",
    "moments",
    "merge_atoms",
]


@dataclass
class AtomicMeasure:
    """Atoms (location, mass) sorted by location, plus unaccounted mass."""

    atoms: list
    residual: float = 0.0

    def total_mass(self):
        return sum(m for _, m in self.atoms)


@dataclass
class EigenSystem:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # orthonormal columns


def eig_symmetric(S, tol=1e-10):
    """Full eigendecomposition of a (numerically) symmetric matrix.

    Deterministic: eigenvalues ascending, each vector's largest-magnitude
    component made positive (first such index on ties).
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise GraphSpecError("matrix must be square")
    if S.size and np.max(np.abs(S - S.T)) > tol:
        raise GraphSpecError("matrix is not symmetric within tolerance")
    vals, vecs = np.linalg.eigh((S + S.T) / 2)
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        lead = np.argmax(np.abs(col))
        if col[lead] < 0:
            vecs[:, j] = -col
    return EigenSystem(vals, vecs)


def local_spectral_measure(fk, root):
    """Plancherel measure of T_A at root: masses are squared eigenvector
    components in the symmetrized coordinates."""
    if root not in fk.index:
        raise GraphSpecError(f"root {root!r} not in the truncated set")
    r0 = fk.index[root]
    es = eig_symmetric(symmetrize(fk))
    atoms = [
        (float(es.eigenvalues[j]), float(es.eigenvectors[r0, j] ** 2))
        for j in range(len(es.eigenvalues))
    ]
    atoms.sort()
    return AtomicMeasure(atoms)


def merge_atoms(mu, location_tol):
    """Combine atoms within location_tol; total mass preserved exactly."""
    if location_tol < 0:
        raise GraphSpecError("location tolerance must be >= 0")
    merged = []
    for loc, mass in sorted(mu.atoms):
        if merged and loc - merged[-1][0] <= location_tol:
            ploc, pmass = merged[-1]
            tot = pmass + mass
            merged[-1] = ((ploc * pmass + loc * mass) / tot if tot else ploc, tot)
        else:
            merged.append((loc, mass))
    return AtomicMeasure(merged, mu.residual)


def moments(mu, n_max):
    """Power sums of the atoms for n = 0..n_max."""
    out = []
    for n in range(n_max + 1):
        out.append(sum(m * loc**n for loc, m in mu.atoms))
    return out


def mixture_measure(g, root, p, max_size, merge_tol=1e-9, animals=None,
                    **mc_kwargs):
    """Expected local spectral measure over the percolation ensemble.

    (1-p) delta_0 for the closed root, plus the cluster-law mixture of
    per-animal local measures.  The enumeration residual is carried as
    unaccounted mass.
    """
    if not 0 < p < 1:
        raise GraphSpecError("p must lie in (0,1)")
    if animals is None:
        animals = enumerate_animals(g, root, max_size)
    k = kernel(g)
    atoms = [(0.0, 1.0 - float(p))]
    for a in animals:
        w = float(animal_probability(a, float(p)))
        local = local_spectral_measure(truncate_kernel(k, a.vertices), root)
        atoms.extend((loc, w * mass) for loc, mass in local.atoms)
    if g.is_finite and max_size >= g.n_vertices:
        resid = 0.0
    else:
        resid = float(residual_mass(g, root, float(p), max_size,
                                    animals=animals, **mc_kwargs))
    return merge_atoms(AtomicMeasure(sorted(atoms), resid), merge_tol)
