"""Hot loops with a numba path and a pure-numpy fallback.

Set ``HYPERDECK_DISABLE_NUMBA=1`` to force the numpy versions.  Both paths
return identical results; ``BACKEND`` records which one is active.
"""
from __future__ import annotations

import itertools
import os

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


_DISABLED = os.environ.get("HYPERDECK_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")
USE_NUMBA = _HAVE_NUMBA and not _DISABLED
BACKEND = "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------- refinement
# Nodes are ordered by (color, degree, sorted neighbour colors); the new color
# of a node is its rank among distinct keys.  Repeats until no cell splits.

@njit(cache=True)
def _cmp_nodes(a, b, cur, indptr, nbr):
    if cur[a] != cur[b]:
        return -1 if cur[a] < cur[b] else 1
    da = indptr[a + 1] - indptr[a]
    db = indptr[b + 1] - indptr[b]
    if da != db:
        return -1 if da < db else 1
    sa = indptr[a]
    sb = indptr[b]
    for k in range(da):
        x = nbr[sa + k]
        y = nbr[sb + k]
        if x != y:
            return -1 if x < y else 1
    return 0


@njit(cache=True)
def refine_colors_numba(indptr, indices, colors):
    N = colors.shape[0]
    cur = colors.copy()
    if N == 0:
        return cur
    seen = np.unique(cur)
    ncol = seen.shape[0]
    nbr = np.empty(indices.shape[0], np.int64)
    order = np.empty(N, np.int64)
    while True:
        for u in range(N):
            s = indptr[u]
            e = indptr[u + 1]
            for k in range(s, e):
                nbr[k] = cur[indices[k]]
            nbr[s:e] = np.sort(nbr[s:e])
        for u in range(N):
            order[u] = u
        for t in range(1, N):
            x = order[t]
            p = t - 1
            while p >= 0 and _cmp_nodes(order[p], x, cur, indptr, nbr) > 0:
                order[p + 1] = order[p]
                p -= 1
            order[p + 1] = x
        new = np.empty(N, np.int64)
        r = 0
        new[order[0]] = 0
        for t in range(1, N):
            if _cmp_nodes(order[t - 1], order[t], cur, indptr, nbr) != 0:
                r += 1
            new[order[t]] = r
        cur = new
        if r + 1 == ncol:
            return cur
        ncol = r + 1


def refine_colors_numpy(indptr: np.ndarray, indices: np.ndarray, colors: np.ndarray) -> np.ndarray:
    N = colors.shape[0]
    cur = np.asarray(colors, dtype=np.int64)
    if N == 0:
        return cur.copy()
    deg = np.diff(indptr)
    owner = np.repeat(np.arange(N), deg)
    ncol = np.unique(cur).shape[0]
    while True:
        nb = cur[indices]
        nb = nb[np.lexsort((nb, owner))]
        keys = [(int(cur[u]), int(deg[u]), tuple(nb[indptr[u]:indptr[u + 1]].tolist())) for u in range(N)]
        rank = {k: i for i, k in enumerate(sorted(set(keys)))}
        cur = np.fromiter((rank[k] for k in keys), dtype=np.int64, count=N)
        if len(rank) == ncol:
            return cur
        ncol = len(rank)


# ----------------------------------------------------- brute-force canon code
# Minimum over all vertex permutations of the upper-triangle bitstring of a
# simple graph.  Exponential; intended for n <= 8 cross-checks.

@njit(cache=True)
def _mask_under(adj, p, n):
    code = 0
    bit = 0
    for i in range(n):
        for j in range(i + 1, n):
            if adj[p[i], p[j]]:
                code |= np.int64(1) << bit
            bit += 1
    return code


@njit(cache=True)
def brute_force_min_mask_numba(adj):
    n = adj.shape[0]
    p = np.arange(n)
    best = _mask_under(adj, p, n)
    c = np.zeros(n, np.int64)
    i = 0
    while i < n:  # Heap's algorithm
        if c[i] < i:
            if i % 2 == 0:
                p[0], p[i] = p[i], p[0]
            else:
                p[c[i]], p[i] = p[i], p[c[i]]
            m = _mask_under(adj, p, n)
            if m < best:
                best = m
            c[i] += 1
            i = 0
        else:
            c[i] = 0
            i += 1
    return best


_PERM_CACHE: dict[int, np.ndarray] = {}


def _all_perms(n: int) -> np.ndarray:
    if n not in _PERM_CACHE:
        _PERM_CACHE[n] = np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)
    return _PERM_CACHE[n]


def brute_force_min_mask_numpy(adj: np.ndarray) -> int:
    n = adj.shape[0]
    if n < 2:
        return 0
    perms = _all_perms(n)
    code = np.zeros(perms.shape[0], dtype=np.int64)
    bit = 0
    for i in range(n):
        for j in range(i + 1, n):
            code |= adj[perms[:, i], perms[:, j]].astype(np.int64) << bit
            bit += 1
    return int(code.min())


# --------------------------------------------------------- graph morphisms
# All vertex maps between two simple graphs that send every edge onto an edge
# (hence injective on each edge).  Rows of the result are vertex maps.

@njit(cache=True)
def simple_morphisms_numba(adj1, adj2):
    n1 = adj1.shape[0]
    n2 = adj2.shape[0]
    total = 1
    for _ in range(n1):
        total *= n2
    out = np.empty((total, n1), np.int64)
    if n1 > 0 and n2 == 0:
        return out[:0]
    m = np.zeros(n1, np.int64)
    count = 0
    for _ in range(total):
        ok = True
        for a in range(n1):
            for b in range(a + 1, n1):
                if adj1[a, b]:
                    if m[a] == m[b] or not adj2[m[a], m[b]]:
                        ok = False
                        break
            if not ok:
                break
        if ok:
            out[count, :] = m
            count += 1
        k = 0
        while k < n1:
            m[k] += 1
            if m[k] < n2:
                break
            m[k] = 0
            k += 1
    return out[:count]


def simple_morphisms_numpy(adj1: np.ndarray, adj2: np.ndarray) -> np.ndarray:
    n1, n2 = adj1.shape[0], adj2.shape[0]
    if n1 == 0:
        return np.zeros((1, 0), dtype=np.int64)
    if n2 == 0:
        return np.zeros((0, n1), dtype=np.int64)
    # odometer order: vertex 0 varies fastest
    grid = np.indices((n2,) * n1).reshape(n1, -1)[::-1].T.astype(np.int64)
    ok = np.ones(grid.shape[0], dtype=bool)
    a_idx, b_idx = np.nonzero(np.triu(adj1, 1))
    for a, b in zip(a_idx, b_idx):
        ma, mb = grid[:, a], grid[:, b]
        ok &= (ma != mb) & (adj2[ma, mb] != 0)
    return grid[ok]


if USE_NUMBA:
    refine_colors = refine_colors_numba
    brute_force_min_mask = brute_force_min_mask_numba
    simple_morphisms = simple_morphisms_numba
else:
    refine_colors = refine_colors_numpy
    brute_force_min_mask = brute_force_min_mask_numpy
    simple_morphisms = simple_morphisms_numpy
