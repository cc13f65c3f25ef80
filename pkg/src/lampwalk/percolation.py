"""Bernoulli site percolation: seeded cluster sampling and Monte Carlo
estimation of expected absorbing-walk return probabilities.

Reproducibility contract: the per-sample substream is a counter-based
Philox stream keyed by (master seed, sample index), so estimates are
bit-identical for a given seed regardless of how samples are chunked.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GraphSpecError
from .graphs import ball, kernel, truncate_kernel

__all__ = ["ClusterSample", "sample_rng", "sample_cluster", "mc_expected_return"]


@dataclass
class ClusterSample:
    root_open: bool
    cluster: tuple
    truncated: bool


def sample_rng(seed, index):
    """Independent substream for one sample of a seeded run."""
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, 0, index]))


def sample_cluster(g, root, p, radius, rng, cap=100_000):
    """Open cluster of root inside ball(root, radius).

    Site states are drawn lazily in BFS exploration order (root first,
    then newly touched neighbours in sorted id order), one uniform per
    touched site.
    """
    if not 0 <= p <= 1:
        raise GraphSpecError("p must lie in [0,1]")
    if radius < 0:
        raise GraphSpecError("radius must be nonnegative")
    if rng.random() >= p:
        return ClusterSample(False, (), False)
    cluster = [root]
    dist = {root: 0}
    state = {root: True}
    truncated = False
    i = 0
    while i < len(cluster):
        v = cluster[i]
        i += 1
        if dist[v] == radius:
            continue
        for u in g.neighbors(v):
            if u in state:
                continue
            open_u = rng.random() < p
            state[u] = open_u
            if open_u:
                dist[u] = dist[v] + 1
                cluster.append(u)
                if len(cluster) > cap:
                    truncated = True
                    break
        if truncated:
            break
    return ClusterSample(True, tuple(sorted(cluster)), truncated)


def mc_expected_return(g, root, p, n, samples, seed, cap=100_000):
    """Monte Carlo estimate of the expected absorbing return probability.

    Returns a dict with the estimate, its standard error, and the count
    of samples that hit the cluster exploration cap (reported, never
    dropped).
    """
    if n < 0:
        raise GraphSpecError("n must be >= 0")
    if samples < 1:
        raise GraphSpecError("samples must be >= 1")
    if n == 0:
        return {"estimate": 1.0, "stderr": 0.0, "samples": samples,
                "capped": 0, "seed": seed, "p": p, "n": n}
    radius = n // 2
    k = kernel(g)
    diag_cache = {}

    def diag(cluster):
        val = diag_cache.get(cluster)
        if val is None:
            M = truncate_kernel(k, cluster).matrix
            r0 = cluster.index(root)
            vec = np.zeros(len(cluster))
            vec[r0] = 1.0
            for _ in range(n):
                vec = M @ vec
            val = float(vec[r0])
            diag_cache[cluster] = val
        return val

    vals = np.empty(samples)
    capped = 0
    for i in range(samples):
        s = sample_cluster(g, root, p, radius, sample_rng(seed, i), cap=cap)
        if s.truncated:
            capped += 1
        vals[i] = diag(s.cluster) if s.root_open else 0.0
    est = float(np.mean(vals))
    if samples > 1:
        stderr = float(np.std(vals, ddof=1) / np.sqrt(samples))
    else:
        stderr = 0.0
    return {"estimate": est, "stderr": stderr, "samples": samples,
            "capped": capped, "seed": seed, "p": p, "n": n}
