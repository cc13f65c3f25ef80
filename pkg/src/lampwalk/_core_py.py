"""Pure-Python fallback for the compiled kernels in ``_core``.

Same contracts, same summation order, so results are bit-compatible with
the compiled extension.
"""

import numpy as np


def path_sum_float(root, n, indptr, nbr, prob, inv_m_pow):
    """Sum over closed n-paths of prod(p) * m^-(#distinct vertices)."""
    if n == 0:
        return 1.0

    def dfs(v, left, w, mask):
        if left == 0:
            if v == root:
                return w * inv_m_pow[int(mask).bit_count()]
            return 0.0
        acc = 0.0
        for e in range(indptr[v], indptr[v + 1]):
            u = nbr[e]
            acc += dfs(u, left - 1, w * prob[e], mask | (1 << u))
        return acc

    return dfs(root, n, 1.0, 1 << root)


def lamp_apply(keys, amps, nv, m, indptr, nbr, wts, stride):
    """One step of the lamplighter operator on an encoded sparse vector."""
    acc = {}
    for k in range(len(keys)):
        key = int(keys[k])
        x = key % nv
        code = key // nv
        a = amps[k]
        sx = int(stride[x])
        dx = (code // sx) % m
        base_x = code - dx * sx
        for e in range(indptr[x], indptr[x + 1]):
            y = int(nbr[e])
            w = a * wts[e]
            sy = int(stride[y])
            dy = (base_x // sy) % m
            base = base_x - dy * sy
            for lx in range(m):
                for ly in range(m):
                    k2 = (base + lx * sx + ly * sy) * nv + y
                    acc[k2] = acc.get(k2, 0.0) + w
    out_keys = np.fromiter(acc.keys(), dtype=np.int64, count=len(acc))
    out_amps = np.fromiter(acc.values(), dtype=np.float64, count=len(acc))
    order = np.argsort(out_keys, kind="stable")
    return out_keys[order], out_amps[order]
