"""Structured hypergraphs: per-slot residues on vertices and edges.

A slot ``(k, j)`` attaches a value in ``range(modulus)`` to every element of
arity ``j`` (vertices have arity 1).  Labelings, colorings and Feynman data
are all special cases; a labeling may also ride along separately, which is how
labeled structured hypergraphs are represented.
"""
from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Sequence

from .canon import ColorAssignment
from .errors import (
    FixedPointInInvolution,
    GenusCapExceeded,
    InvalidColoring,
    NotABijection,
    NotFeynman,
    SpecMismatch,
    StructureValueError,
)
from .hypercore import Hypergraph, HypergraphMorphism, disjoint_union, total_degree, validate_morphism

DEFAULT_GENUS_CAP = 16
EXTERNAL, INTERNAL = 0, 1


@dataclass(frozen=True)
class StructureSpec:
    table: tuple[tuple[tuple[int, int], int], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[tuple[int, int], int] | None = None) -> "StructureSpec":
        rows = []
        for (k, j), m in sorted((mapping or {}).items()):
            if k < 1 or j < 1 or m < 1:
                raise StructureValueError(f"bad slot ({k},{j}) with modulus {m}")
            rows.append(((int(k), int(j)), int(m)))
        return cls(tuple(rows))

    def as_dict(self) -> dict[tuple[int, int], int]:
        return dict(self.table)

    def modulus(self, k: int, j: int) -> int | None:
        return self.as_dict().get((k, j))

    def slots(self, j: int, nontrivial: bool = True) -> list[int]:
        return [k for (k, jj), m in self.table if jj == j and (m > 1 or not nontrivial)]

    def arities(self) -> list[int]:
        return sorted({j for (_, j), m in self.table if m > 1})


def labeled_edge_ranks(G: Hypergraph, phi: Sequence[int], tiebreak=None) -> dict[int, tuple[int, ...]]:
    """Derived edge labels: rank of each edge's label image.

    Parallel edges are ordered by ``tiebreak(j, e)`` (their structure values)
    and then by edge id.
    """
    out = {}
    tiebreak = tiebreak or (lambda j, e: ())
    for j, es in G.edges.items():
        keys = sorted(range(len(es)), key=lambda e: (tuple(sorted(phi[v] for v in es[e])), tiebreak(j, e), e))
        ranks = [0] * len(es)
        for r, e in enumerate(keys):
            ranks[e] = r
        out[j] = tuple(ranks)
    return out


def check_bijection(phi: Sequence[int], n: int) -> tuple[int, ...]:
    phi = tuple(int(x) for x in phi)
    if len(phi) != n or sorted(phi) != list(range(n)):
        raise NotABijection(f"{list(phi)} is not a bijection onto [0, {n})")
    return phi


class StructuredHypergraph:
    """A hypergraph with structure values and an optional labeling."""

    __slots__ = ("base", "spec", "_values", "labeling")

    def __init__(self, base: Hypergraph, spec: StructureSpec | None = None,
                 values: Mapping[tuple[int, int, int], int] | None = None,
                 labeling: Sequence[int] | None = None):
        spec = spec or StructureSpec()
        table = spec.as_dict()
        clean: dict[tuple[int, int, int], int] = {}
        for (k, j, e), val in (values or {}).items():
            m = table.get((k, j))
            if m is None:
                raise StructureValueError(f"value for unknown slot ({k},{j})")
            size = base.n if j == 1 else base.edge_count(j)
            if not 0 <= e < size:
                raise StructureValueError(f"element {e} outside arity {j}")
            if not 0 <= val < m:
                raise StructureValueError(f"value {val} outside Z_{m} at slot ({k},{j})")
            if m > 1:
                clean[(int(k), int(j), int(e))] = int(val)
        for (k, j), m in table.items():
            if m > 1:
                size = base.n if j == 1 else base.edge_count(j)
                for e in range(size):
                    if (k, j, e) not in clean:
                        raise StructureValueError(f"slot ({k},{j}) missing a value for element {e}")
        self.base = base
        self.spec = spec
        self._values = clean
        self.labeling = None if labeling is None else check_bijection(labeling, base.n)

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def values(self) -> Mapping[tuple[int, int, int], int]:
        return MappingProxyType(self._values)

    def value(self, k: int, j: int, e: int) -> int:
        return self._values.get((k, j, e), 0)

    def vertex_values(self, v: int) -> tuple[int, ...]:
        return tuple(self._values[(k, 1, v)] for k in self.spec.slots(1))

    def edge_values(self, j: int, e: int) -> tuple[int, ...]:
        return tuple(self._values[(k, j, e)] for k in self.spec.slots(j))

    def edge_labels(self) -> dict[int, tuple[int, ...]]:
        if self.labeling is None:
            return {}
        return labeled_edge_ranks(self.base, self.labeling, self.edge_values)

    def colors(self, include_labels: bool = True) -> ColorAssignment:
        """Structure values (and labels, placed first) as canonicalization colors."""
        lab = self.labeling if include_labels else None
        vertex = tuple(
            ((lab[v],) if lab is not None else ()) + self.vertex_values(v) for v in range(self.n)
        )
        edges = {j: tuple(self.edge_values(j, e) for e in range(self.base.edge_count(j))) for j in self.base.arities}
        return ColorAssignment(vertex, edges)

    def with_labeling(self, labeling: Sequence[int] | None) -> "StructuredHypergraph":
        return StructuredHypergraph(self.base, self.spec, self._values, labeling)

    def key(self) -> tuple:
        return (self.base, self.spec, tuple(sorted(self._values.items())), self.labeling)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StructuredHypergraph):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        extra = f", labeling={list(self.labeling)}" if self.labeling is not None else ""
        return f"StructuredHypergraph({self.base!r}, spec={self.spec.as_dict()}, values={dict(self._values)}{extra})"


def as_structured(G: Hypergraph | StructuredHypergraph) -> StructuredHypergraph:
    return G if isinstance(G, StructuredHypergraph) else StructuredHypergraph(G)


def labeled(G: Hypergraph, phi: Sequence[int]) -> StructuredHypergraph:
    """Plain hypergraph with a labeling and no structure slots."""
    return StructuredHypergraph(G, labeling=phi)


# ------------------------------------------------------------- colorings

def validate_coloring(G: Hypergraph, c: Sequence[int]) -> bool:
    if len(c) != G.n:
        return False
    return all(len({c[v] for v in e}) >= 2 for _, _, e in G.iter_edges())


def coloring_as_structure(G: Hypergraph, c: Sequence[int], n_colors: int) -> StructuredHypergraph:
    if any(not 0 <= x < n_colors for x in c):
        raise StructureValueError(f"colors must lie in [0, {n_colors})")
    if not validate_coloring(G, c):
        raise InvalidColoring("some edge is monochromatic")
    spec = StructureSpec.of({(1, 1): n_colors})
    return StructuredHypergraph(G, spec, {(1, 1, v): c[v] for v in range(G.n)})


# ------------------------------------------------------------- labelings

def labeling_as_structure(G: Hypergraph, phi: Sequence[int]) -> StructuredHypergraph:
    phi = check_bijection(phi, G.n)
    spec = StructureSpec.of({(1, 1): max(G.n, 1)})
    return StructuredHypergraph(G, spec, {(1, 1, v): phi[v] for v in range(G.n)})


def unique_labeled_iso(A: StructuredHypergraph, B: StructuredHypergraph,
                       check_structure: bool = True) -> HypergraphMorphism | None:
    """The only possible label-preserving isomorphism, if it is one."""
    if A.labeling is None or B.labeling is None:
        raise NotABijection("both inputs need a labeling")
    G, H = A.base, B.base
    if G.n != H.n or set(G.arities) != set(H.arities):
        return None
    if any(G.edge_count(j) != H.edge_count(j) for j in G.arities):
        return None
    inv_b = [0] * H.n
    for v, lab in enumerate(B.labeling):
        inv_b[lab] = v
    vmap = tuple(inv_b[A.labeling[v]] for v in range(G.n))
    ra, rb = A.edge_labels(), B.edge_labels()
    emaps = {}
    for j in G.arities:
        inv = [0] * H.edge_count(j)
        for e, r in enumerate(rb[j]):
            inv[r] = e
        emaps[j] = tuple(inv[r] for r in ra[j])
    f = HypergraphMorphism(G, H, vmap, emaps)
    if not validate_morphism(f):
        return None
    if check_structure and A.spec == B.spec and not preserves_structure(f, A, B):
        return None
    return f


def labeled_union(A: StructuredHypergraph, B: StructuredHypergraph) -> StructuredHypergraph:
    """Disjoint union; all of A's labels come before B's."""
    if A.labeling is None or B.labeling is None:
        raise NotABijection("both inputs need a labeling")
    S = structured_union(A.with_labeling(None), B.with_labeling(None))
    return S.with_labeling(tuple(A.labeling) + tuple(A.n + x for x in B.labeling))


# ---------------------------------------------------------- structure maps

def structured_union(A: StructuredHypergraph, B: StructuredHypergraph) -> StructuredHypergraph:
    if A.spec != B.spec:
        raise SpecMismatch(f"{A.spec.as_dict()} != {B.spec.as_dict()}")
    G = disjoint_union(A.base, B.base)
    values = dict(A.values)
    for (k, j, e), val in B.values.items():
        shift = A.n if j == 1 else A.base.edge_count(j)
        values[(k, j, e + shift)] = val
    labeling = None
    if A.labeling is not None and B.labeling is not None:
        labeling = tuple(A.labeling) + tuple(A.n + x for x in B.labeling)
    return StructuredHypergraph(G, A.spec, values, labeling)


def preserves_structure(f: HypergraphMorphism, A: StructuredHypergraph, B: StructuredHypergraph) -> bool:
    if A.spec != B.spec:
        return False
    for (k, j, e), val in A.values.items():
        target = f.vertex_map[e] if j == 1 else f.edge_maps[j][e]
        if B.value(k, j, target) != val:
            return False
    return True


def is_structured_morphism(f: HypergraphMorphism, A: StructuredHypergraph, B: StructuredHypergraph) -> bool:
    return validate_morphism(f) and preserves_structure(f, A, B)


# ------------------------------------------------------- Feynman graphs

@dataclass(frozen=True)
class FeynmanGraphData:
    kind: tuple[int, ...]   # 0 external, 1 internal
    genus: tuple[int, ...]

    @classmethod
    def of(cls, kind: Sequence[int], genus: Sequence[int] | None = None) -> "FeynmanGraphData":
        genus = genus if genus is not None else [0] * len(kind)
        return cls(tuple(int(x) for x in kind), tuple(int(x) for x in genus))

    def external(self) -> list[int]:
        return [v for v, k in enumerate(self.kind) if k == EXTERNAL]

    def internal(self) -> list[int]:
        return [v for v, k in enumerate(self.kind) if k == INTERNAL]


def validate_feynman(G: Hypergraph, data: FeynmanGraphData) -> bool:
    if any(j != 2 for j in G.arities):
        return False
    if len(data.kind) != G.n or len(data.genus) != G.n:
        return False
    if any(k not in (EXTERNAL, INTERNAL) for k in data.kind) or any(g < 0 for g in data.genus):
        return False
    for v in data.external():
        if total_degree(G, v) != 1 or data.genus[v] != 0:
            return False
    return all(not (data.kind[a] == EXTERNAL and data.kind[b] == EXTERNAL) for a, b in G.edges_of(2))


def external_edges(G: Hypergraph, data: FeynmanGraphData) -> list[int]:
    """Ids of the edges touching an external vertex (the tails)."""
    return [e for e, (a, b) in enumerate(G.edges_of(2)) if EXTERNAL in (data.kind[a], data.kind[b])]


def validate_stable(G: Hypergraph, data: FeynmanGraphData) -> bool:
    if not validate_feynman(G, data):
        raise NotFeynman("input is not a Feynman graph")
    for v in data.internal():
        d = total_degree(G, v)
        if data.genus[v] == 0 and d < 3:
            return False
        if data.genus[v] == 1 and d < 1:
            return False
    return True


def feynman_as_structure(G: Hypergraph, data: FeynmanGraphData,
                         genus_cap: int = DEFAULT_GENUS_CAP) -> StructuredHypergraph:
    if not validate_feynman(G, data):
        raise NotFeynman("input is not a Feynman graph")
    if any(g >= genus_cap for g in data.genus):
        raise GenusCapExceeded(f"genus {max(data.genus)} does not fit below cap {genus_cap}")
    spec = StructureSpec.of({(1, 1): 2, (2, 1): genus_cap})
    values = {}
    for v in range(G.n):
        values[(1, 1, v)] = data.kind[v]
        values[(2, 1, v)] = data.genus[v]
    return StructuredHypergraph(G, spec, values)


def feynman_data_of(S: StructuredHypergraph) -> FeynmanGraphData:
    return FeynmanGraphData(tuple(S.value(1, 1, v) for v in range(S.n)), tuple(S.value(2, 1, v) for v in range(S.n)))


# --------------------------------------------------------- ribbon graphs

@dataclass(frozen=True)
class RibbonGraphData:
    """Darts model: each dart sits at a vertex, the involution pairs darts into
    edges and ``sigma`` cycles the darts around each vertex."""

    dart_vertex: tuple[int, ...]
    involution: tuple[int, ...]
    sigma: tuple[int, ...]


def _orbits(perm: Sequence[int]) -> list[frozenset[int]]:
    seen: set[int] = set()
    out = []
    for start in range(len(perm)):
        if start in seen:
            continue
        orbit = []
        x = start
        while x not in seen:
            seen.add(x)
            orbit.append(x)
            x = perm[x]
        out.append(frozenset(orbit))
    return out


def validate_ribbon(R: RibbonGraphData) -> bool:
    m = len(R.dart_vertex)
    if len(R.involution) != m or len(R.sigma) != m:
        raise StructureValueError("dart tables differ in length")
    for table in (R.involution, R.sigma):
        if sorted(table) != list(range(m)):
            raise StructureValueError("involution and sigma must be permutations of the darts")
    for d, e in enumerate(R.involution):
        if e == d:
            raise FixedPointInInvolution(f"dart {d} is fixed")
        if R.involution[e] != d:
            raise StructureValueError("involution does not square to the identity")
    fibers: dict[int, set[int]] = {}
    for d, v in enumerate(R.dart_vertex):
        fibers.setdefault(v, set()).add(d)
    return set(_orbits(R.sigma)) == {frozenset(f) for f in fibers.values()}

