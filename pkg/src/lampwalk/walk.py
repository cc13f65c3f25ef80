"""The switch-walk-switch lamplighter chain.

Three independent engines for the n-step return probability:

* ``return_prob_config_space`` -- evolve the exact finite chain on
  (lamp configuration over a ball) x (walker position);
* ``return_prob_path_sum`` -- enumerate closed paths, weighting each by
  the transition products times m^-(#distinct vertices visited);
* ``expected_return_animal_sum`` -- average the absorbing-walk return
  probability over rooted animals with the percolation cluster law.

All three admit an exact rational mode; at p = 1/m they agree literally.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from . import _backend
from .animals import animal_probability, enumerate_animals, residual_mass
from .errors import BudgetError, GraphSpecError
from .graphs import ball, kernel, symmetrize, truncate_kernel

__all__ = [
    "IOTA",
    "config_set",
    "LampVector",
    "LamplighterOperator",
    "return_prob_config_space",
    "return_prob_config_space_sequence",
    "return_prob_path_sum",
    "expected_return_animal_sum",
    "expected_return_animal_sum_sequence",
]

#: The all-lamps-off configuration.  Configurations are tuples of
#: (vertex id, lamp value) pairs sorted by vertex, lamp values in 1..m-1
#: (off lamps are never stored).
IOTA = ()


def config_set(cfg, site, lamp):
    """Configuration with the lamp at ``site`` set to ``lamp``."""
    rest = tuple(kv for kv in cfg if kv[0] != site)
    if lamp == 0:
        return rest
    return tuple(sorted(rest + ((site, lamp),)))


def config_get(cfg, site):
    for s, v in cfg:
        if s == site:
            return v
    return 0


class LampVector:
    """Finitely supported vector on configuration-space x vertices."""

    __slots__ = ("data",)

    def __init__(self, data=None):
        self.data = dict(data) if data else {}

    @classmethod
    def basis(cls, cfg, x):
        return cls({(cfg, x): 1.0})

    def norm(self):
        return math.sqrt(sum(abs(a) ** 2 for a in self.data.values()))

    def inner(self, other):
        if len(other.data) < len(self.data):
            return np.conjugate(other.inner(self))
        return sum(
            a * np.conjugate(other.data[k])
            for k, a in self.data.items()
            if k in other.data
        )

    def add_scaled(self, other, c):
        out = dict(self.data)
        for k, a in other.data.items():
            out[k] = out.get(k, 0.0) + c * a
        return LampVector({k: a for k, a in out.items() if a != 0})

    def scale(self, c):
        return LampVector({k: c * a for k, a in self.data.items()})

    def __sub__(self, other):
        return self.add_scaled(other, -1.0)

    def __len__(self):
        return len(self.data)


class LamplighterOperator:
    """Transition operator of the lamplighter walk with m lamp states.

    With ``symmetrized=True`` the walker weights are the symmetrized
    kernel entries sqrt(p(x,y)p(y,x)); the diagonal matrix elements are
    unchanged and the operator becomes selfadjoint on plain l2, which is
    what the spectral and eigenbasis checks require on irregular graphs.
    """

    def __init__(self, k, m, symmetrized=False):
        if m < 2:
            raise GraphSpecError("lamp count m must be >= 2")
        self.kernel = k
        self.m = m
        self.symmetrized = symmetrized

    def weight(self, x, y):
        if self.symmetrized:
            return math.sqrt(self.kernel.p(x, y) * self.kernel.p(y, x))
        return self.kernel.p(x, y)

    def apply(self, v):
        """Exact one-step application; support moves by one graph step."""
        if not v.data:
            return LampVector()
        m = self.m
        g = self.kernel.graph
        sites = set()
        walkers = set()
        for cfg, x in v.data:
            walkers.add(x)
            sites.add(x)
            sites.update(s for s, _ in cfg)
            sites.update(g.neighbors(x))
        sites = sorted(sites)
        nv = len(sites)
        pos = {s: i for i, s in enumerate(sites)}
        if nv * m**nv >= 2**62:
            raise BudgetError(f"lamp window of {nv} sites is too large to encode")
        stride = np.array([m**i for i in range(nv)], dtype=np.int64)

        indptr = [0]
        nbr = []
        wts = []
        for s in sites:
            if s in walkers:
                for u in g.neighbors(s):
                    nbr.append(pos[u])
                    wts.append(self.weight(s, u) / (m * m))
            indptr.append(len(nbr))
        indptr = np.array(indptr, dtype=np.int64)
        nbr = np.array(nbr, dtype=np.int64)
        wts = np.array(wts, dtype=np.float64)

        def encode(cfg, x):
            code = 0
            for s, lamp in cfg:
                code += lamp * int(stride[pos[s]])
            return code * nv + pos[x]

        entries = sorted(
            (encode(cfg, x), a) for (cfg, x), a in v.data.items()
        )
        keys = np.array([k for k, _ in entries], dtype=np.int64)
        amps = np.array([a for _, a in entries])

        def run(part):
            return _backend.lamp_apply(
                keys, np.ascontiguousarray(part, dtype=np.float64),
                nv, m, indptr, nbr, wts, stride,
            )

        if np.iscomplexobj(amps):
            kr, ar = run(amps.real)
            ki, ai = run(amps.imag)
            merged = {int(k): a for k, a in zip(kr, ar)}
            for k, a in zip(ki, ai):
                merged[int(k)] = merged.get(int(k), 0.0) + 1j * a
            items = sorted(merged.items())
        else:
            kk, aa = run(amps)
            items = [(int(k), float(a)) for k, a in zip(kk, aa)]

        out = {}
        for key, a in items:
            if a == 0:
                continue
            x = sites[key % nv]
            code = key // nv
            cfg = []
            i = 0
            while code:
                code, lamp = divmod(code, m)
                if lamp:
                    cfg.append((sites[i], lamp))
                i += 1
            out[(tuple(cfg), x)] = a
        return LampVector(out)


# -- engine 1: the exact chain on configurations x vertices ----------------


def return_prob_config_space_sequence(g, root, m, n_max, mode="float",
                                      state_budget=5_000_000):
    """Return probabilities for n = 0..n_max from the truncated chain.

    The chain lives on (configurations over the ball of radius n_max//2)
    x (ball vertices); closed paths of length <= n_max cannot leave that
    ball, so truncation is lossless.
    """
    if m < 2:
        raise GraphSpecError("lamp count m must be >= 2")
    if n_max < 0:
        raise GraphSpecError("n_max must be >= 0")
    rational = mode == "rational"
    one = Fraction(1) if rational else 1.0
    if n_max == 0:
        return [one]
    B = ball(g, root, n_max // 2)
    nB = len(B)
    n_states = nB * m**nB
    if n_states > state_budget:
        raise BudgetError(
            f"config-space chain needs {n_states} states "
            f"(m={m}, ball={nB}); budget is {state_budget}"
        )
    k = kernel(g)
    pos = {v: i for i, v in enumerate(B)}
    edges = []  # per local vertex: list of (local nbr, weight)
    denoms = []
    for v in B:
        row = []
        for u in k.neighbors(v):
            j = pos.get(u)
            if j is not None:
                pf = k.p_frac(v, u)
                row.append((j, pf))
                denoms.append(pf.denominator)
        edges.append(row)
    if rational:
        L = math.lcm(*denoms) if denoms else 1
        W = [[(j, int(pf * L)) for j, pf in row] for row in edges]
        step_den = L * m * m
    else:
        W = [[(j, float(pf) / (m * m)) for j, pf in row] for row in edges]

    stride = [m**i for i in range(nB)]
    root_key = 0  # iota configuration, walker at B[0] == root
    cur = {root_key: 1 if rational else 1.0}
    out = [one]
    for step in range(1, n_max + 1):
        nxt = {}
        get = nxt.get
        for key, a in cur.items():
            x = key % nB
            code = key // nB
            sx = stride[x]
            dx = (code // sx) % m
            base_x = code - dx * sx
            for y, w in W[x]:
                aw = a * w
                sy = stride[y]
                dy = (base_x // sy) % m
                base = base_x - dy * sy
                for lx in range(m):
                    bx = base + lx * sx
                    for ly in range(m):
                        k2 = (bx + ly * sy) * nB + y
                        nxt[k2] = get(k2, 0) + aw
        cur = nxt
        amp = cur.get(root_key, 0)
        if rational:
            out.append(Fraction(amp, step_den**step))
        else:
            out.append(float(amp))
    return out


def return_prob_config_space(g, root, m, n, mode="float",
                             state_budget=5_000_000):
    return return_prob_config_space_sequence(
        g, root, m, n, mode, state_budget
    )[n]


# -- engine 2: weighted closed-path sum ------------------------------------


def return_prob_path_sum(g, root, m, n, mode="float", max_steps=24):
    """Closed-path sum with weight prod(p) * m^-(#distinct vertices)."""
    if m < 2:
        raise GraphSpecError("lamp count m must be >= 2")
    if n < 0:
        raise GraphSpecError("n must be >= 0")
    if n > max_steps:
        raise BudgetError(f"path length {n} exceeds step cap {max_steps}")
    rational = mode == "rational"
    if n == 0:
        return Fraction(1) if rational else 1.0
    B = ball(g, root, n // 2)
    nB = len(B)
    k = kernel(g)
    pos = {v: i for i, v in enumerate(B)}
    indptr = [0]
    nbr = []
    pfracs = []
    for v in B:
        for u in k.neighbors(v):
            j = pos.get(u)
            if j is not None:
                nbr.append(j)
                pfracs.append(k.p_frac(v, u))
        indptr.append(len(nbr))

    if not rational:
        inv_m_pow = np.array([float(m) ** -j for j in range(nB + 1)])
        probs = np.array([float(p) for p in pfracs])
        if nB <= 64:
            return float(
                _backend.path_sum_float(
                    0, n,
                    np.array(indptr, dtype=np.int64),
                    np.array(nbr, dtype=np.int64),
                    probs, inv_m_pow,
                )
            )
        return _path_sum_float_large(0, n, indptr, nbr, probs, inv_m_pow)

    L = math.lcm(*(p.denominator for p in pfracs)) if pfracs else 1
    P = [int(p * L) for p in pfracs]
    sums = {}  # distinct-vertex count -> integer numerator sum
    counts = [0] * nB
    distinct = [1]
    counts[0] = 1

    def dfs(v, left, w):
        if left == 0:
            if v == 0:
                d = distinct[0]
                sums[d] = sums.get(d, 0) + w
            return
        for e in range(indptr[v], indptr[v + 1]):
            u = nbr[e]
            counts[u] += 1
            if counts[u] == 1:
                distinct[0] += 1
            dfs(u, left - 1, w * P[e])
            counts[u] -= 1
            if counts[u] == 0:
                distinct[0] -= 1

    dfs(0, n, 1)
    Ln = L**n
    return sum(
        (Fraction(s, Ln * m**d) for d, s in sums.items()), Fraction(0)
    )


def _path_sum_float_large(root, n, indptr, nbr, probs, inv_m_pow):
    # Fallback when the ball exceeds the 64-bit visited mask.
    visited = set([root])

    def dfs(v, left, w):
        if left == 0:
            return w * inv_m_pow[len(visited)] if v == root else 0.0
        acc = 0.0
        for e in range(indptr[v], indptr[v + 1]):
            u = nbr[e]
            fresh = u not in visited
            if fresh:
                visited.add(u)
            acc += dfs(u, left - 1, w * probs[e])
            if fresh:
                visited.remove(u)
        return acc

    return dfs(root, n, 1.0)


# -- engine 3: percolation animal sum --------------------------------------


def expected_return_animal_sum_sequence(g, root, p, n_max, max_size,
                                        mode="float", animals=None,
                                        **mc_kwargs):
    """(values for n = 0..n_max, residual-mass error bound).

    Sums animal_probability(A, p) * (T_A^n)(root, root) over enumerated
    animals.  Each omitted animal contributes at most its probability, so
    the residual enumeration mass bounds the truncation error.
    """
    rational = mode == "rational"
    if rational and not isinstance(p, Fraction):
        p = Fraction(p)
    if not 0 < p < 1:
        raise GraphSpecError("p must lie in (0,1)")
    if animals is None:
        animals = enumerate_animals(g, root, max_size)
    k = kernel(g)
    zero = Fraction(0) if rational else 0.0
    vals = [zero] * (n_max + 1)
    for a in animals:
        prob = animal_probability(a, p)
        r0 = a.vertices.index(root)
        for n, diag in enumerate(_diag_powers(k, a, r0, n_max, rational)):
            vals[n] += prob * diag
    if g.is_finite and max_size >= g.n_vertices:
        # Exhaustive enumeration: root-closed outcomes contribute 0 for
        # n >= 1, so only the n = 0 moment needs the full event mass.
        resid = zero
    else:
        resid = residual_mass(g, root, p, max_size, animals=animals,
                              **mc_kwargs)
    # n = 0: every sample returns 1 whether or not the root is open.
    one = Fraction(1) if rational else 1.0
    vals[0] = one
    return vals, resid


def _diag_powers(k, animal, r0, n_max, rational):
    """(T_A^n)(root, root) for n = 0..n_max."""
    if rational:
        rows = truncate_kernel(k, animal.vertices).matrix_frac()
        nA = len(rows)
        vec = [Fraction(0)] * nA
        vec[r0] = Fraction(1)
        out = [Fraction(1)]
        for _ in range(n_max):
            vec = [
                sum((rows[i][j] * vec[j] for j in range(nA) if rows[i][j]),
                    Fraction(0))
                for i in range(nA)
            ]
            out.append(vec[r0])
        return out
    S = symmetrize(truncate_kernel(k, animal.vertices))
    vec = np.zeros(len(animal.vertices))
    vec[r0] = 1.0
    out = [1.0]
    for _ in range(n_max):
        vec = S @ vec
        out.append(float(vec[r0]))
    return out


def expected_return_animal_sum(g, root, p, n, max_size, mode="float",
                               animals=None, **mc_kwargs):
    vals, resid = expected_return_animal_sum_sequence(
        g, root, p, n, max_size, mode, animals, **mc_kwargs
    )
    return vals[n], resid
