import itertools
import os
import subprocess
import sys

import numpy as np
from hypothesis import given, strategies as st

from hyperdeck import _kernels as K


@st.composite
def csr_graphs(draw):
    n = draw(st.integers(1, 12))
    pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    nbrs = [[] for _ in range(n)]
    for a, b in chosen:
        nbrs[a].append(b)
        nbrs[b].append(a)
    indptr = np.zeros(n + 1, dtype=np.int64)
    indptr[1:] = np.cumsum([len(x) for x in nbrs])
    indices = np.array([v for x in nbrs for v in x], dtype=np.int64)
    colors = np.array(draw(st.lists(st.integers(0, 2), min_size=n, max_size=n)), dtype=np.int64)
    return indptr, indices, colors


@given(csr_graphs())
def test_refinement_backends_agree(g):
    a = K.refine_colors_numba(*g)
    b = K.refine_colors_numpy(*g)
    assert a.tolist() == b.tolist()
    # equitable: same color implies same multiset of neighbour colors
    indptr, indices, _ = g
    sig = {}
    for u in range(len(a)):
        key = (a[u], tuple(sorted(a[indices[indptr[u]:indptr[u + 1]]])))
        assert sig.setdefault(a[u], key) == key


def _adj(n, edges):
    m = np.zeros((n, n), dtype=np.int64)
    for u, v in edges:
        m[u, v] = m[v, u] = 1
    return m


def _mask_oracle(n, edges):
    best = None
    for p in itertools.permutations(range(n)):
        code, bit = 0, 0
        for i in range(n):
            for j in range(i + 1, n):
                if (min(p[i], p[j]), max(p[i], p[j])) in edges:
                    code |= 1 << bit
                bit += 1
        best = code if best is None else min(best, code)
    return best


@given(st.integers(1, 6).flatmap(lambda n: st.tuples(
    st.just(n), st.sets(st.sampled_from([(a, b) for a in range(n) for b in range(a + 1, n)] or [(0, 0)])))))
def test_min_mask_backends_match_oracle(case):
    n, edges = case
    edges = {e for e in edges if e[0] != e[1]}
    adj = _adj(n, edges)
    expected = _mask_oracle(n, edges)
    assert K.brute_force_min_mask_numba(adj) == expected
    assert K.brute_force_min_mask_numpy(adj) == expected


def _morphisms_oracle(adj1, adj2):
    n1, n2 = len(adj1), len(adj2)
    out = []
    for m in itertools.product(range(n2), repeat=n1):
        m = m[::-1]  # vertex 0 fastest
        if all(m[a] != m[b] and adj2[m[a], m[b]] for a in range(n1) for b in range(a + 1, n1) if adj1[a, b]):
            out.append(list(m))
    return out


@given(st.integers(0, 4), st.integers(0, 4), st.integers(0, 2**10 - 1), st.integers(0, 2**10 - 1))
def test_morphism_backends_match_oracle(n1, n2, m1, m2):
    def graph(n, mask):
        pairs = [(a, b) for a in range(n) for b in range(a + 1, n)]
        return _adj(n, [p for i, p in enumerate(pairs) if mask >> i & 1])

    a1, a2 = graph(n1, m1), graph(n2, m2)
    expected = _morphisms_oracle(a1, a2)
    assert K.simple_morphisms_numba(a1, a2).tolist() == expected
    assert K.simple_morphisms_numpy(a1, a2).tolist() == expected


def test_env_flag_selects_numpy_backend():
    code = (
        "from hyperdeck import _kernels as K; from hyperdeck.canon import canonical_code;"
        "from hyperdeck.hypercore import Hypergraph;"
        "print(K.BACKEND, canonical_code(Hypergraph(5, {2: [(0,1),(1,2),(2,3),(3,4),(4,0)]})).hex())"
    )
    outs = {}
    for flag in ("1", "0"):
        env = dict(os.environ, HYPERDECK_DISABLE_NUMBA=flag)
        outs[flag] = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                                    check=True).stdout.split()
    assert outs["1"][0] == "numpy" and outs["0"][0] == "numba"
    assert outs["1"][1] == outs["0"][1]
