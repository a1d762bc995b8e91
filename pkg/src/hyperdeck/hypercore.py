"""Hypergraph data model: vertices ``[0, n)`` plus per-arity lists of edges.

Edges are abstract records addressed by ``(arity, edge_id)``; the id is the
position in the arity's list.  Two records may share a vertex set (parallel
edges) but a single record never repeats a vertex.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import ArityMismatch, DegenerateEdge, MalformedIncidence, VertexOutOfRange

Edge = tuple[int, ...]


class Hypergraph:
    """Immutable finite hypergraph without self-loops."""

    __slots__ = ("_n", "_edges", "_hash")

    def __init__(self, n: int, edges: Mapping[int, Sequence[Sequence[int]]] | None = None):
        if n < 0:
            raise VertexOutOfRange(f"negative vertex count {n}")
        store: dict[int, tuple[Edge, ...]] = {}
        for j, records in sorted((edges or {}).items()):
            j = int(j)
            if j < 2:
                raise ArityMismatch(f"arity {j} is not an edge arity (must be >= 2)")
            clean = []
            for rec in records:
                inc = tuple(sorted(int(v) for v in rec))
                if len(inc) != j:
                    raise ArityMismatch(f"edge {list(rec)} listed under arity {j}")
                for v in inc:
                    if not 0 <= v < n:
                        raise VertexOutOfRange(f"vertex {v} outside [0, {n})")
                if len(set(inc)) != j:
                    raise DegenerateEdge(f"edge {list(rec)} repeats a vertex")
                clean.append(inc)
            if clean:
                store[j] = tuple(clean)
        self._n = n
        self._edges = store
        self._hash = None

    @classmethod
    def _trusted(cls, n: int, store: dict[int, tuple[Edge, ...]]) -> "Hypergraph":
        # caller guarantees sorted, validated, non-empty tuples
        obj = cls.__new__(cls)
        obj._n = n
        obj._edges = store
        obj._hash = None
        return obj

    @property
    def n(self) -> int:
        return self._n

    vertex_count = n

    @property
    def edges(self) -> Mapping[int, tuple[Edge, ...]]:
        return MappingProxyType(self._edges)

    @property
    def arities(self) -> tuple[int, ...]:
        return tuple(sorted(self._edges))

    def edges_of(self, j: int) -> tuple[Edge, ...]:
        return self._edges.get(j, ())

    def edge_count(self, j: int | None = None) -> int:
        if j is None:
            return sum(len(v) for v in self._edges.values())
        return len(self._edges.get(j, ()))

    def iter_edges(self) -> Iterator[tuple[int, int, Edge]]:
        """Yield ``(arity, edge_id, incident)`` in arity-then-id order."""
        for j in sorted(self._edges):
            for eid, inc in enumerate(self._edges[j]):
                yield j, eid, inc

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return self._n == other._n and self._edges == other._edges

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._n, tuple(sorted(self._edges.items()))))
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join(f"{j}: {[list(e) for e in es]}" for j, es in sorted(self._edges.items()))
        return f"Hypergraph({self._n}, {{{body}}})"

    def to_lists(self) -> dict[int, list[list[int]]]:
        return {j: [list(e) for e in es] for j, es in sorted(self._edges.items())}


def build_hypergraph(n: int, edges_by_arity: Mapping[int, Sequence[Sequence[int]]] | Sequence[Sequence[int]] | None = None) -> Hypergraph:
    """Validate raw edge lists.

    ``edges_by_arity`` is either a mapping ``arity -> edges`` or a flat list of
    edges whose arity is taken from their length.
    """
    if edges_by_arity is None:
        return Hypergraph(n)
    if isinstance(edges_by_arity, Mapping):
        return Hypergraph(n, edges_by_arity)
    grouped: dict[int, list[Sequence[int]]] = {}
    for rec in edges_by_arity:
        grouped.setdefault(len(rec), []).append(rec)
    return Hypergraph(n, grouped)


def empty_hypergraph(n: int = 0) -> Hypergraph:
    return Hypergraph._trusted(n, {})


def _check_vertex(G: Hypergraph, v: int) -> None:
    if not 0 <= v < G.n:
        raise VertexOutOfRange(f"vertex {v} outside [0, {G.n})")


def degree(G: Hypergraph, v: int, j: int) -> int:
    _check_vertex(G, v)
    return sum(1 for e in G.edges_of(j) if v in e)


def total_degree(G: Hypergraph, v: int) -> int:
    """Number of edges of any arity at ``v``."""
    _check_vertex(G, v)
    return sum(1 for _, _, e in G.iter_edges() if v in e)


def degree_vector(G: Hypergraph) -> list[int]:
    out = [0] * G.n
    for _, _, e in G.iter_edges():
        for v in e:
            out[v] += 1
    return out


def check_degree_sum(G: Hypergraph) -> bool:
    lhs = sum(degree(G, v, j) for j in G.arities for v in range(G.n))
    rhs = sum(j * G.edge_count(j) for j in G.arities)
    return lhs == rhs


def bounding_degree(G: Hypergraph) -> int:
    """Smallest b with no edges of arity above b (1 when edgeless)."""
    return max(G.arities, default=1)


def disjoint_union(G: Hypergraph, H: Hypergraph) -> Hypergraph:
    store: dict[int, tuple[Edge, ...]] = {}
    for j in sorted(set(G.arities) | set(H.arities)):
        shifted = tuple(tuple(v + G.n for v in e) for e in H.edges_of(j))
        store[j] = G.edges_of(j) + shifted
    return Hypergraph._trusted(G.n + H.n, store)


def disjoint_union_all(graphs: Iterable[Hypergraph]) -> Hypergraph:
    acc = empty_hypergraph(0)
    for g in graphs:
        acc = disjoint_union(acc, g)
    return acc


def relabel(G: Hypergraph, perm: Sequence[int]) -> Hypergraph:
    """Move vertex ``v`` to ``perm[v]``; edge ids are kept."""
    if sorted(perm) != list(range(G.n)):
        raise VertexOutOfRange("relabeling is not a permutation of the vertices")
    store = {j: tuple(tuple(sorted(perm[v] for v in e)) for e in es) for j, es in G.edges.items()}
    return Hypergraph._trusted(G.n, store)


def induced_subhypergraph(G: Hypergraph, keep: Sequence[int]) -> tuple[Hypergraph, dict[int, list[int]]]:
    """Restrict to the sorted vertex list ``keep``, re-indexed in order.

    Returns the subhypergraph and, per arity, the surviving original edge ids.
    """
    keep = sorted(keep)
    new_index = {v: i for i, v in enumerate(keep)}
    store: dict[int, tuple[Edge, ...]] = {}
    survivors: dict[int, list[int]] = {}
    for j, es in G.edges.items():
        kept = []
        ids = []
        for eid, e in enumerate(es):
            if all(v in new_index for v in e):
                kept.append(tuple(new_index[v] for v in e))
                ids.append(eid)
        if kept:
            store[j] = tuple(kept)
            survivors[j] = ids
    return Hypergraph._trusted(len(keep), store), survivors


@dataclass(frozen=True)
class HypergraphMorphism:
    source: Hypergraph
    target: Hypergraph
    vertex_map: tuple[int, ...]
    edge_maps: Mapping[int, tuple[int, ...]] = field(default_factory=dict)


def validate_morphism(f: HypergraphMorphism) -> bool:
    G, H = f.source, f.target
    if len(f.vertex_map) != G.n or any(not 0 <= w < H.n for w in f.vertex_map):
        return False
    for j in G.arities:
        emap = f.edge_maps.get(j)
        es = G.edges_of(j)
        if emap is None or len(emap) != len(es):
            return False
        targets = H.edges_of(j)
        for eid, e in enumerate(es):
            t = emap[eid]
            if not 0 <= t < len(targets):
                return False
            image = {f.vertex_map[v] for v in e}
            if len(image) != j or tuple(sorted(image)) != targets[t]:
                return False
    return True


def identity_morphism(G: Hypergraph) -> HypergraphMorphism:
    return HypergraphMorphism(G, G, tuple(range(G.n)), {j: tuple(range(G.edge_count(j))) for j in G.arities})


def compose(g: HypergraphMorphism, f: HypergraphMorphism) -> HypergraphMorphism:
    """``g after f``."""
    vmap = tuple(g.vertex_map[w] for w in f.vertex_map)
    emaps = {j: tuple(g.edge_maps[j][t] for t in m) for j, m in f.edge_maps.items() if f.source.edge_count(j)}
    return HypergraphMorphism(f.source, g.target, vmap, emaps)


def is_isomorphism(f: HypergraphMorphism) -> bool:
    """Valid morphism that is bijective on vertices and on every edge set."""
    if not validate_morphism(f):
        return False
    G, H = f.source, f.target
    if G.n != H.n or sorted(f.vertex_map) != list(range(H.n)):
        return False
    if set(G.arities) != set(H.arities):
        return False
    return all(sorted(f.edge_maps[j]) == list(range(H.edge_count(j))) for j in G.arities)


@dataclass(frozen=True)
class BipartiteIncidenceGraph:
    """Left nodes are vertices; each right node is an edge tagged with its arity."""

    left_count: int
    right_arity: tuple[int, ...]
    right_neighbors: tuple[tuple[int, ...], ...]

    @property
    def right_count(self) -> int:
        return len(self.right_arity)


def to_incidence(G: Hypergraph) -> BipartiteIncidenceGraph:
    arity, nbrs = [], []
    for j, _, e in G.iter_edges():
        arity.append(j)
        nbrs.append(e)
    return BipartiteIncidenceGraph(G.n, tuple(arity), tuple(nbrs))


def from_incidence(B: BipartiteIncidenceGraph) -> Hypergraph:
    if len(B.right_arity) != len(B.right_neighbors):
        raise MalformedIncidence("arity tags and neighbor lists differ in length")
    grouped: dict[int, list[Edge]] = {}
    for j, nb in zip(B.right_arity, B.right_neighbors):
        if len(nb) != j or len(set(nb)) != j:
            raise MalformedIncidence(f"right node tagged {j} has neighbors {list(nb)}")
        if any(not 0 <= v < B.left_count for v in nb):
            raise MalformedIncidence(f"neighbor outside [0, {B.left_count})")
        grouped.setdefault(j, []).append(tuple(nb))
    return Hypergraph(B.left_count, grouped)
