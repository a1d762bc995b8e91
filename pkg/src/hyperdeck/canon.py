"""Canonical codes for colored hypergraphs, isomorphism tests, enumeration.

The engine works on the bipartite incidence graph (vertex nodes plus one node
per edge).  Colors are refined to an equitable partition, then vertex cells
are individualized depth-first.  Subtrees that are images of explored ones
under automorphisms found so far are skipped.  The code is the smallest leaf
serialization, prefixed with the vertex and edge color multisets.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import CapExceeded, ColorCoverageError
from .hypercore import Hypergraph, HypergraphMorphism, validate_morphism

DEFAULT_CAP = 8
Color = tuple[int, ...]


def _as_color(c) -> Color:
    if isinstance(c, (tuple, list)):
        return tuple(int(x) for x in c)
    return (int(c),)


@dataclass(frozen=True)
class ColorAssignment:
    """Per-vertex and per-edge colors; each color is a tuple of ints."""

    vertex: tuple[Color, ...]
    edges: Mapping[int, tuple[Color, ...]]

    @classmethod
    def make(cls, vertex: Sequence | None = None, edges: Mapping[int, Sequence] | None = None) -> "ColorAssignment":
        return cls(
            tuple(_as_color(c) for c in (vertex or ())),
            {int(j): tuple(_as_color(c) for c in cs) for j, cs in (edges or {}).items()},
        )


def _normalize(G: Hypergraph, colors: ColorAssignment | None) -> tuple[list[Color], dict[int, list[Color]]]:
    if colors is None:
        return [()] * G.n, {j: [()] * G.edge_count(j) for j in G.arities}
    vcols = list(colors.vertex) if colors.vertex else []
    if not vcols and G.n:
        vcols = [()] * G.n
    if len(vcols) != G.n:
        raise ColorCoverageError(f"{len(vcols)} vertex colors for {G.n} vertices")
    ecols: dict[int, list[Color]] = {}
    for j in G.arities:
        cs = colors.edges.get(j)
        if cs is None:
            cs = [()] * G.edge_count(j)
        if len(cs) != G.edge_count(j):
            raise ColorCoverageError(f"{len(cs)} colors for {G.edge_count(j)} edges of arity {j}")
        ecols[j] = list(cs)
    for j, cs in colors.edges.items():
        if j not in ecols and len(cs):
            raise ColorCoverageError(f"colors given for absent arity {j}")
    return vcols, ecols


@dataclass(frozen=True, order=True)
class CanonicalCode:
    data: bytes

    def hex(self) -> str:
        """Short stable digest of the code (sha256 hex)."""
        return hashlib.sha256(self.data).hexdigest()

    def __repr__(self) -> str:
        return f"CanonicalCode({self.hex()[:12]})"


@dataclass(frozen=True)
class CanonicalForm:
    code: CanonicalCode
    labeling: tuple[int, ...]  # vertex -> position in canonical order


# ------------------------------------------------------------------ cache

class CanonCache:
    """Thread-safe memo table, sharded by the first hex digit of the key."""

    SHARDS = 16

    def __init__(self, max_per_shard: int = 200_000):
        self._maps: list[dict[str, CanonicalForm]] = [{} for _ in range(self.SHARDS)]
        self._locks = [threading.Lock() for _ in range(self.SHARDS)]
        self.max_per_shard = max_per_shard
        self.hits = 0
        self.misses = 0

    def _shard(self, key: str) -> int:
        return int(key[0], 16)

    def get(self, key: str) -> CanonicalForm | None:
        s = self._shard(key)
        with self._locks[s]:
            hit = self._maps[s].get(key)
        if hit is None:
            self.misses += 1
        else:
            self.hits += 1
        return hit

    def put(self, key: str, value: CanonicalForm) -> None:
        s = self._shard(key)
        with self._locks[s]:
            table = self._maps[s]
            if len(table) >= self.max_per_shard:
                table.clear()
            table[key] = value

    def clear(self) -> None:
        for s in range(self.SHARDS):
            with self._locks[s]:
                self._maps[s].clear()
        self.hits = self.misses = 0

    def __len__(self) -> int:
        return sum(len(t) for t in self._maps)

    def save(self, directory: str | os.PathLike) -> None:
        path = Path(directory)
        path.mkdir(parents=True, exist_ok=True)
        for s in range(self.SHARDS):
            with self._locks[s]:
                rows = {k: [v.code.data.decode("ascii"), list(v.labeling)] for k, v in self._maps[s].items()}
            tmp = path / f"shard-{s:x}.json.tmp"
            tmp.write_text(json.dumps(rows, sort_keys=True))
            tmp.replace(path / f"shard-{s:x}.json")

    def load(self, directory: str | os.PathLike) -> int:
        path = Path(directory)
        loaded = 0
        for s in range(self.SHARDS):
            f = path / f"shard-{s:x}.json"
            if not f.exists():
                continue
            rows = json.loads(f.read_text())
            with self._locks[s]:
                for k, (data, lab) in rows.items():
                    self._maps[s][k] = CanonicalForm(CanonicalCode(data.encode("ascii")), tuple(lab))
                    loaded += 1
        return loaded


CACHE = CanonCache()
CACHE_ENV = "HYPERDECK_CACHE_DIR"


def load_persistent_cache() -> int:
    d = os.environ.get(CACHE_ENV)
    return CACHE.load(d) if d else 0


def save_persistent_cache() -> bool:
    d = os.environ.get(CACHE_ENV)
    if not d:
        return False
    CACHE.save(d)
    return True


def _input_key(G: Hypergraph, vcols, ecols) -> str:
    blob = repr((G.n, sorted(G.edges.items()), vcols, sorted(ecols.items()))).encode()
    return hashlib.blake2b(blob, digest_size=16).hexdigest()


# ----------------------------------------------------------------- search

class _Search:
    def __init__(self, G: Hypergraph, vcols: list[Color], ecols: dict[int, list[Color]]):
        n = G.n
        self.n = n
        self.edge_keys: list[tuple[int, Color]] = []
        self.edge_inc: list[tuple[int, ...]] = []
        for j, eid, inc in G.iter_edges():
            self.edge_keys.append((j, ecols[j][eid]))
            self.edge_inc.append(inc)
        m = len(self.edge_inc)
        keys = [(0, c) for c in vcols] + [(1, j, c) for j, c in self.edge_keys]
        rank = {k: i for i, k in enumerate(sorted(set(keys)))}
        self.init = np.array([rank[k] for k in keys], dtype=np.int64)
        adj: list[list[int]] = [[] for _ in range(n + m)]
        for k, inc in enumerate(self.edge_inc):
            for v in inc:
                adj[v].append(n + k)
                adj[n + k].append(v)
        self.indptr = np.zeros(n + m + 1, dtype=np.int64)
        self.indptr[1:] = np.cumsum([len(a) for a in adj])
        self.indices = np.array([x for a in adj for x in a], dtype=np.int64)
        self.first: tuple | None = None  # (certificate, labeling, path)
        self.best: tuple | None = None
        self.gens: list[np.ndarray] = []

    def cert(self, lab) -> tuple:
        return tuple(sorted(
            (j, c, tuple(sorted(int(lab[v]) for v in inc)))
            for (j, c), inc in zip(self.edge_keys, self.edge_inc)
        ))

    def run(self) -> tuple[tuple, np.ndarray]:
        if self.n == 0:
            return (), np.zeros(0, dtype=np.int64)
        init = self.init
        if np.unique(init[: self.n]).shape[0] == self.n:
            self.leaf(init, [])  # vertex colors already discrete
        else:
            self.visit(_kernels.refine_colors(self.indptr, self.indices, init), [])
        return self.best[0], self.best[1]

    def leaf(self, colors, path: list[int]) -> int | None:
        """Record a leaf; return the depth to jump back to when it is redundant."""
        lab = np.argsort(np.argsort(colors[: self.n], kind="stable"), kind="stable")
        c = self.cert(lab)
        if self.first is None:
            self.first = self.best = (c, lab, path)
            return None
        for ref in (self.first, self.best):
            if c == ref[0]:
                self.add_gen(ref[1], lab)
                return _common_prefix(ref[2], path)
        if c < self.best[0]:
            self.best = (c, lab, path)
        return None

    def add_gen(self, ref, lab) -> None:
        inv = np.empty(self.n, dtype=np.int64)
        inv[ref] = np.arange(self.n)
        g = inv[lab]
        if not np.array_equal(g, np.arange(self.n)):
            self.gens.append(g)

    def visit(self, colors, prefix: list[int]) -> int | None:
        depth = len(prefix)
        vc = colors[: self.n]
        counts = np.bincount(vc)
        multi = np.flatnonzero(counts >= 2)
        if multi.shape[0] == 0:
            return self.leaf(colors, prefix)
        cell = [int(w) for w in np.flatnonzero(vc == multi[0])]
        # orbits of the subgroup generated by known automorphisms fixing the prefix
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        used = 0
        explored: list[int] = []
        for w in cell:
            if explored:
                while used < len(self.gens):
                    g = self.gens[used]
                    used += 1
                    if all(g[p] == p for p in prefix):
                        for v in range(self.n):
                            a, b = find(v), find(int(g[v]))
                            if a != b:
                                parent[a] = b
                rw = find(w)
                if any(find(x) == rw for x in explored):
                    continue
            child = colors * 2 + 1
            child[w] -= 1
            child = _kernels.refine_colors(self.indptr, self.indices, child)
            back = self.visit(child, prefix + [w])
            explored.append(w)
            if back is not None and back < depth:
                return back
        return None


def _common_prefix(a: list[int], b: list[int]) -> int:
    k = 0
    for x, y in zip(a, b):
        if x != y:
            break
        k += 1
    return k


def _serialize(n: int, vcols: list[Color], ecols_ms: list, cert: tuple) -> bytes:
    body = [
        n,
        [list(c) for c in sorted(vcols)],
        [[j, list(c)] for j, c in ecols_ms],
        [[j, list(c), list(inc)] for j, c, inc in cert],
    ]
    return json.dumps(body, separators=(",", ":")).encode("ascii")


def canonical_form(G: Hypergraph, colors: ColorAssignment | None = None, *, use_cache: bool = True) -> CanonicalForm:
    vcols, ecols = _normalize(G, colors)
    key = _input_key(G, vcols, ecols) if use_cache else ""
    if use_cache:
        hit = CACHE.get(key)
        if hit is not None:
            return hit
    search = _Search(G, vcols, ecols)
    cert, lab = search.run()
    ecol_ms = sorted((j, c) for j, cs in ecols.items() for c in cs)
    form = CanonicalForm(CanonicalCode(_serialize(G.n, vcols, ecol_ms, cert)), tuple(int(x) for x in lab))
    if use_cache:
        CACHE.put(key, form)
    return form


def canonical_code(G: Hypergraph, colors: ColorAssignment | None = None) -> CanonicalCode:
    return canonical_form(G, colors).code


def decode_code(code: CanonicalCode) -> tuple[Hypergraph, ColorAssignment]:
    """Rebuild the canonical representative (with colors) from a code."""
    n, vcols, _, edges = json.loads(code.data)
    grouped: dict[int, list] = {}
    ecolors: dict[int, list] = {}
    for j, c, inc in edges:
        grouped.setdefault(j, []).append(tuple(inc))
        ecolors.setdefault(j, []).append(tuple(c))
    store = {j: tuple(es) for j, es in grouped.items()}
    G = Hypergraph._trusted(n, store)
    return G, ColorAssignment(tuple(tuple(c) for c in vcols), {j: tuple(cs) for j, cs in ecolors.items()})


def are_isomorphic(G: Hypergraph, H: Hypergraph, colors: ColorAssignment | None = None,
                   colors_h: ColorAssignment | None = None) -> bool:
    if G.n != H.n or any(G.edge_count(j) != H.edge_count(j) for j in set(G.arities) | set(H.arities)):
        return False
    return canonical_code(G, colors) == canonical_code(H, colors_h)


def find_isomorphism(G: Hypergraph, H: Hypergraph, colors: ColorAssignment | None = None,
                     colors_h: ColorAssignment | None = None) -> HypergraphMorphism | None:
    if G.n != H.n:
        return None
    fg = canonical_form(G, colors)
    fh = canonical_form(H, colors_h)
    if fg.code != fh.code:
        return None
    pos_to_h = [0] * H.n
    for v, p in enumerate(fh.labeling):
        pos_to_h[p] = v
    vmap = tuple(pos_to_h[fg.labeling[v]] for v in range(G.n))
    _, ecg = _normalize(G, colors)
    _, ech = _normalize(H, colors_h)
    emaps: dict[int, tuple[int, ...]] = {}
    for j in G.arities:
        pool: dict[tuple, list[int]] = {}
        for eid, inc in enumerate(H.edges_of(j)):
            pool.setdefault((inc, ech[j][eid]), []).append(eid)
        for ids in pool.values():
            ids.reverse()
        out = []
        for eid, inc in enumerate(G.edges_of(j)):
            image = tuple(sorted(vmap[v] for v in inc))
            out.append(pool[(image, ecg[j][eid])].pop())
        emaps[j] = tuple(out)
    f = HypergraphMorphism(G, H, vmap, emaps)
    assert validate_morphism(f)
    return f


# ------------------------------------------------------------ enumeration

_LEVELS: dict[tuple, list[list[tuple[CanonicalCode, Hypergraph, tuple[Color, ...]]]]] = {}
_LEVEL_LOCK = threading.Lock()


def _check_params(n: int, max_arity: int, max_multiplicity: int, cap: int) -> None:
    if n > cap:
        raise CapExceeded(f"n={n} exceeds the desk-scale cap {cap}")
    if n < 0 or max_arity < 1 or max_multiplicity < 0:
        raise ValueError("invalid enumeration parameters")


def _classes(n: int, max_arity: int, max_multiplicity: int, palette: int):
    """Vertex augmentation: every class on n vertices is (class on n-1) + a vertex."""
    key = (max_arity, max_multiplicity, palette)
    with _LEVEL_LOCK:
        levels = _LEVELS.setdefault(key, [])
        if not levels:
            levels.append([(canonical_code(Hypergraph(0)), Hypergraph(0), ())])
        while len(levels) <= n:
            k = len(levels)  # building size k from size k-1
            new_slots = [
                tuple(s) + (k - 1,)
                for j in range(2, max_arity + 1)
                for s in itertools.combinations(range(k - 1), j - 1)
            ]
            seen: dict[CanonicalCode, tuple[Hypergraph, tuple[Color, ...]]] = {}
            for _, rep, rep_colors in levels[k - 1]:
                base = {j: list(es) for j, es in rep.edges.items()}
                for color in range(palette):
                    vcols = rep_colors + ((color,),) if palette > 1 else ()
                    colors = ColorAssignment(vcols, {}) if palette > 1 else None
                    for mult in itertools.product(range(max_multiplicity + 1), repeat=len(new_slots)):
                        store = {j: list(es) for j, es in base.items()}
                        for slot, m in zip(new_slots, mult):
                            if m:
                                store.setdefault(len(slot), []).extend([slot] * m)
                        G = Hypergraph._trusted(k, {j: tuple(es) for j, es in store.items() if es})
                        code = canonical_code(G, colors)
                        if code not in seen:
                            seen[code] = (G, vcols)
            level = []
            for code in sorted(seen):
                G, cols = decode_code(code)
                level.append((code, G, cols.vertex if palette > 1 else ()))
            levels.append(level)
        return levels[n]


def enumerate_hypergraphs(n: int, max_arity: int = 2, max_multiplicity: int = 1, simple: bool = True,
                          *, cap: int = DEFAULT_CAP) -> Iterator[Hypergraph]:
    """One canonical representative per isomorphism class, sorted by code."""
    if simple:
        max_multiplicity = 1
    _check_params(n, max_arity, max_multiplicity, cap)
    for _, G, _ in _classes(n, max_arity, max_multiplicity, 1):
        yield G


def enumerate_vertex_colored(n: int, palette: int, max_arity: int = 2, max_multiplicity: int = 1,
                             *, cap: int = DEFAULT_CAP) -> Iterator[tuple[Hypergraph, tuple[int, ...]]]:
    """Classes of hypergraphs whose vertices carry a color in ``range(palette)``."""
    _check_params(n, max_arity, max_multiplicity, cap)
    if palette < 1:
        raise ValueError("palette must be positive")
    for _, G, cols in _classes(n, max_arity, max_multiplicity, palette):
        yield G, tuple(c[0] for c in cols) if palette > 1 else (0,) * n


def brute_force_simple_code(G: Hypergraph) -> int:
    """Exhaustive permutation minimum of the adjacency bitstring (simple graphs only)."""
    adj = np.zeros((G.n, G.n), dtype=np.uint8)
    for a, b in G.edges_of(2):
        adj[a, b] = adj[b, a] = 1
    return int(_kernels.brute_force_min_mask(adj))
