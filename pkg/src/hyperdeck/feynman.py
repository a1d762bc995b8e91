"""Decomposition systems, degree tables, Feynman rules and the functor Z.

Z sends a labeled (structured) hypergraph to a tensor word.  The word lists
vertex factors class by class in label order, then edge factors class by
class and arity by arity in induced edge-label order.  Vertex factors are
dual with the vertex degree as rank; edge factors are primal.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Mapping, Sequence, Union

from .canon import canonical_form
from .errors import IncoherentRule, MissingLabeling, NotFeynman, ValidationError
from .hypercore import Hypergraph, HypergraphMorphism, degree, is_isomorphism, total_degree, validate_morphism
from .structures import (
    EXTERNAL,
    StructuredHypergraph,
    as_structured,
    feynman_data_of,
    labeled_union,
    validate_feynman,
)
from .symcontext import (
    DUAL,
    HBAR,
    PRIMAL,
    AnalyticExpression,
    ParameterGrade,
    TensorFactor,
    slot_parameter,
    symmetric_iso,
    tensor,
)

Graph = Union[Hypergraph, StructuredHypergraph]


# ------------------------------------------------------ decompositions

@dataclass(frozen=True)
class DecompositionSystem:
    """Class 0 is external; classes ``1..order`` are internal types."""

    order: int
    vertex_class: tuple[int, ...]
    edge_class: Mapping[int, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "edge_class", MappingProxyType({j: tuple(c) for j, c in self.edge_class.items() if c}))
        if self.order < 0:
            raise ValidationError("order must be non-negative")
        bad = [c for c in self.vertex_class if not 0 <= c <= self.order]
        bad += [c for cs in self.edge_class.values() for c in cs if not 0 <= c <= self.order]
        if bad:
            raise ValidationError(f"class {bad[0]} outside [0, {self.order}]")

    def fits(self, G: Hypergraph) -> bool:
        if len(self.vertex_class) != G.n:
            return False
        return {j: len(c) for j, c in self.edge_class.items()} == {j: G.edge_count(j) for j in G.arities}

    def vertices_of(self, i: int) -> list[int]:
        return [v for v, c in enumerate(self.vertex_class) if c == i]

    def edges_of(self, i: int, j: int) -> list[int]:
        return [e for e, c in enumerate(self.edge_class.get(j, ())) if c == i]

    def external_vertex_count(self) -> int:
        return len(self.vertices_of(0))

    def external_edge_counts(self) -> dict[int, int]:
        return {j: len(self.edges_of(0, j)) for j in self.edge_class}


def _base(G: Graph) -> Hypergraph:
    return G if isinstance(G, Hypergraph) else G.base


def _uniform(G: Hypergraph, order: int, cls: int) -> DecompositionSystem:
    return DecompositionSystem(order, (cls,) * G.n, {j: (cls,) * G.edge_count(j) for j in G.arities})


def trivial_decomposition(G: Graph, order: int = 1) -> DecompositionSystem:
    return _uniform(_base(G), order, 0)


def internal_decomposition(G: Graph, order: int = 1) -> DecompositionSystem:
    """Everything internal of type 1."""
    return _uniform(_base(G), max(order, 1), 1)


def structured_decomposition(S: Graph) -> DecompositionSystem:
    """External vertices are unstructured leaves hanging off a single 2-edge."""
    S = as_structured(S)
    G = S.base
    candidates = set()
    for v in range(G.n):
        if degree(G, v, 2) != 1 or any(degree(G, v, j) for j in G.arities if j > 2):
            continue
        if any(S.vertex_values(v)):
            continue
        candidates.add(v)
    ext = set()
    tail_of = {}
    for e, (a, b) in enumerate(G.edges_of(2)):
        for v, w in ((a, b), (b, a)):
            if v in candidates:
                tail_of[v] = e
                if w not in candidates:
                    ext.add(v)
    ext_edges = {tail_of[v] for v in ext}
    vcls = tuple(0 if v in ext else 1 for v in range(G.n))
    ecls = {j: tuple(0 if j == 2 and e in ext_edges else 1 for e in range(G.edge_count(j))) for j in G.arities}
    return DecompositionSystem(2, vcls, ecls)


def feynman_decomposition(S: Graph) -> DecompositionSystem:
    """External vertices and their tails form class 0."""
    S = as_structured(S)
    data = feynman_data_of(S)
    if not validate_feynman(S.base, data):
        raise NotFeynman("input is not a Feynman graph")
    G = S.base
    vcls = tuple(0 if k == EXTERNAL else 1 for k in data.kind)
    ecls = {2: tuple(0 if EXTERNAL in (data.kind[a], data.kind[b]) else 1 for a, b in G.edges_of(2))}
    return DecompositionSystem(1, vcls, ecls if G.edge_count(2) else {})


DECOMPOSITIONS: dict[str, Callable[[Graph], DecompositionSystem]] = {
    "trivial": trivial_decomposition,
    "internal": internal_decomposition,
    "structured": structured_decomposition,
    "feynman": feynman_decomposition,
}

Decomposer = Union[str, Callable[[Graph], DecompositionSystem], DecompositionSystem]


def resolve_decomposition(S: Graph, d: Decomposer) -> DecompositionSystem:
    if isinstance(d, DecompositionSystem):
        system = d
    elif isinstance(d, str):
        if d not in DECOMPOSITIONS:
            raise ValidationError(f"unknown decomposition {d!r}; choose from {sorted(DECOMPOSITIONS)}")
        system = DECOMPOSITIONS[d](S)
    else:
        system = d(S)
    if not system.fits(_base(S)):
        raise ValidationError("decomposition does not match the hypergraph")
    return system


def union_decomposition(a: DecompositionSystem, b: DecompositionSystem) -> DecompositionSystem:
    """Componentwise classes on a disjoint union."""
    ecls = {j: a.edge_class.get(j, ()) + b.edge_class.get(j, ()) for j in set(a.edge_class) | set(b.edge_class)}
    return DecompositionSystem(max(a.order, b.order), a.vertex_class + b.vertex_class, ecls)


def is_standard(G: Graph, d: DecompositionSystem) -> bool:
    G = _base(G)
    if d.external_vertex_count() != sum(d.external_edge_counts().values()):
        return False
    ext = set(d.vertices_of(0))
    for j in d.edge_class:
        for e in d.edges_of(0, j):
            if not ext.intersection(G.edges_of(j)[e]):
                return False
    return True


def is_normal(G: Graph, d: DecompositionSystem) -> bool:
    return d.external_vertex_count() <= 1 and all(c <= 1 for c in d.external_edge_counts().values())


def normalize(G: Graph, d: DecompositionSystem):
    """Delete the external class; returns the smaller graph and its classes."""
    base = _base(G)
    keep = [v for v in range(base.n) if d.vertex_class[v] != 0]
    new_id = {v: i for i, v in enumerate(keep)}
    edges: dict[int, list] = {}
    ecls: dict[int, list[int]] = {}
    kept_edges: dict[int, list[int]] = {}
    for j, es in base.edges.items():
        for e, inc in enumerate(es):
            c = d.edge_class[j][e]
            if c == 0 or any(v not in new_id for v in inc):
                continue
            edges.setdefault(j, []).append([new_id[v] for v in inc])
            ecls.setdefault(j, []).append(c)
            kept_edges.setdefault(j, []).append(e)
    H = Hypergraph(len(keep), edges)
    nd = DecompositionSystem(d.order, tuple(d.vertex_class[v] for v in keep), ecls)
    if isinstance(G, Hypergraph):
        return H, nd
    values = {}
    for (k, j, e), val in G.values.items():
        if j == 1:
            if e in new_id:
                values[(k, 1, new_id[e])] = val
    for j, ids in kept_edges.items():
        for new_e, old_e in enumerate(ids):
            for k in G.spec.slots(j):
                values[(k, j, new_e)] = G.value(k, j, old_e)
    labeling = None
    if G.labeling is not None:
        labs = [G.labeling[v] for v in keep]
        ranks = sorted(range(len(labs)), key=labs.__getitem__)
        labeling = [0] * len(labs)
        for r, i in enumerate(ranks):
            labeling[i] = r
    return StructuredHypergraph(H, G.spec, values, labeling), nd


# -------------------------------------------------------------- degrees

@dataclass(frozen=True)
class DegreeTables:
    vertex: tuple[int, ...]
    edges: Mapping[int, tuple[int, ...]]


def classic_degrees(G: Graph, d: DecompositionSystem) -> DegreeTables:
    G = _base(G)
    vertex = tuple(0 if d.vertex_class[v] == 0 else total_degree(G, v) for v in range(G.n))
    edges = {j: tuple(1 if c == 0 else j for c in d.edge_class[j]) for j in G.arities}
    return DegreeTables(vertex, edges)


def standard_degrees(G: Graph, d: DecompositionSystem) -> DegreeTables:
    """External elements weigh 1; internal vertices count edges away from the externals."""
    G = _base(G)
    ext = set(d.vertices_of(0))
    away = [0] * G.n
    for _, _, inc in G.iter_edges():
        if ext.isdisjoint(inc):
            for v in inc:
                away[v] += 1
    vertex = tuple(1 if d.vertex_class[v] == 0 else away[v] for v in range(G.n))
    edges = {j: tuple(1 if c == 0 else j for c in d.edge_class[j]) for j in G.arities}
    return DegreeTables(vertex, edges)


def custom_degrees(G: Graph, vertex: Sequence[int], edges: Mapping[int, Sequence[int]]) -> DegreeTables:
    G = _base(G)
    if len(vertex) != G.n or any(len(edges.get(j, ())) != G.edge_count(j) for j in G.arities):
        raise ValidationError("degree tables must cover every vertex and edge")
    if any(x < 0 for x in vertex) or any(x < 0 for es in edges.values() for x in es):
        raise ValidationError("degrees are natural numbers")
    return DegreeTables(tuple(vertex), {j: tuple(edges[j]) for j in G.arities})


def coherence_sides(G: Graph, d: DecompositionSystem, degrees: DegreeTables) -> tuple[int, int]:
    """(total edge degree over arities >= 2, total vertex degree)."""
    edge_side = sum(sum(r) for j, r in degrees.edges.items() if j >= 2)
    return edge_side, sum(degrees.vertex)


def check_coherence(G: Graph, d: DecompositionSystem, degrees: DegreeTables) -> bool:
    a, b = coherence_sides(G, d, degrees)
    return a == b


# ------------------------------------------------------------------ rules

SYMBOL_MODES = ("data", "residues", "forgetful", "collapsed")
DEGREE_MODES = ("classic", "standard", "custom")


@dataclass(frozen=True)
class FeynmanRule:
    """How degrees, symbols and grades are assigned.

    ``symbols``: ``data`` puts every structure value in the symbol,
    ``residues`` keeps only the genus slot and grades it by hbar,
    ``forgetful`` drops structure values, ``collapsed`` uses one symbol.
    """

    degrees: str = "classic"
    symbols: str = "data"
    custom: DegreeTables | None = None

    def __post_init__(self):
        if self.degrees not in DEGREE_MODES:
            raise ValidationError(f"degree mode must be one of {DEGREE_MODES}")
        if self.symbols not in SYMBOL_MODES:
            raise ValidationError(f"symbol mode must be one of {SYMBOL_MODES}")
        if self.degrees == "custom" and self.custom is None:
            raise ValidationError("custom degree mode needs tables")

    @property
    def complete(self) -> bool:
        """Symbols are injective in the defining data."""
        return self.symbols in ("data", "residues")

    def degree_tables(self, G: Graph, d: DecompositionSystem) -> DegreeTables:
        if self.degrees == "classic":
            return classic_degrees(G, d)
        if self.degrees == "standard":
            return standard_degrees(G, d)
        return custom_degrees(G, self.custom.vertex, self.custom.edges)


RULES = {
    "classic": FeynmanRule("classic", "data"),
    "standard": FeynmanRule("standard", "data"),
    "physics": FeynmanRule("classic", "residues"),
    "forgetful": FeynmanRule("classic", "forgetful"),
    "collapsed": FeynmanRule("classic", "collapsed"),
}


def resolve_rule(rule: FeynmanRule | str) -> FeynmanRule:
    if isinstance(rule, FeynmanRule):
        return rule
    if rule not in RULES:
        raise ValidationError(f"unknown rule preset {rule!r}; choose from {sorted(RULES)}")
    return RULES[rule]


def _vertex_factor(S: StructuredHypergraph, v: int, i: int, r: int, rule: FeynmanRule) -> TensorFactor:
    grade: dict[str, int] = {"o": i, "t": 1}
    if rule.symbols == "collapsed":
        return TensorFactor(("x", 0, 0, 0, ()), DUAL, r, ParameterGrade.of(grade))
    if rule.symbols == "residues":
        genus = S.value(2, 1, v) if S.spec.modulus(2, 1) else 0
        grade[HBAR] = genus
        residues: tuple = (genus,)
    elif rule.symbols == "data":
        residues = S.vertex_values(v)
        for k, val in zip(S.spec.slots(1), residues):
            grade[slot_parameter(k, 1)] = grade.get(slot_parameter(k, 1), 0) + val
    else:
        residues = ()
    return TensorFactor(("v", i, 1, r, residues), DUAL, r, ParameterGrade.of(grade))


def _edge_factor(S: StructuredHypergraph, j: int, e: int, i: int, r: int, rule: FeynmanRule) -> TensorFactor:
    grade: dict[str, int] = {"o": i, "t": j}
    if rule.symbols == "collapsed":
        return TensorFactor(("x", 0, 0, 0, ()), PRIMAL, r, ParameterGrade.of(grade))
    residues: tuple = ()
    if rule.symbols == "data":
        residues = S.edge_values(j, e)
        for k, val in zip(S.spec.slots(j), residues):
            grade[slot_parameter(k, j)] = grade.get(slot_parameter(k, j), 0) + val
    return TensorFactor(("e", i, j, r, residues), PRIMAL, r, ParameterGrade.of(grade))


def auto_labeled(S: Graph) -> StructuredHypergraph:
    """Attach the canonical-form vertex order as labeling."""
    S = as_structured(S)
    form = canonical_form(S.base, S.colors(include_labels=False))
    return S.with_labeling(form.labeling)


@dataclass(frozen=True)
class _Slot:
    kind: str       # "v" or "e"
    arity: int
    element: int


def _blocks(S: StructuredHypergraph, d: DecompositionSystem, rule: FeynmanRule):
    """Ordered ``(slot, factor)`` pairs of Z(S); unit factors are omitted."""
    degrees = rule.degree_tables(S, d)
    if not check_coherence(S, d, degrees):
        a, b = coherence_sides(S, d, degrees)
        raise IncoherentRule(f"edge degrees sum to {a} but vertex degrees sum to {b}")
    labels = S.labeling
    elabels = S.edge_labels()
    out = []
    for i in range(d.order + 1):
        for v in sorted(d.vertices_of(i), key=labels.__getitem__):
            r = degrees.vertex[v]
            if i == 0 and r == 0:
                continue
            out.append((_Slot("v", 1, v), _vertex_factor(S, v, i, r, rule)))
    for i in range(d.order + 1):
        for j in sorted(d.edge_class):
            for e in sorted(d.edges_of(i, j), key=elabels[j].__getitem__):
                out.append((_Slot("e", j, e), _edge_factor(S, j, e, i, degrees.edges[j][e], rule)))
    return out


def _prepare(S: Graph, auto_label: bool) -> StructuredHypergraph:
    S = as_structured(S)
    if S.labeling is None:
        if not auto_label:
            raise MissingLabeling("Z needs a labeled input (or auto_label=True)")
        S = auto_labeled(S)
    return S


def evaluate_Z(S: Graph, d: Decomposer = "internal", rule: FeynmanRule | str = "classic",
               *, auto_label: bool = True) -> AnalyticExpression:
    S = _prepare(S, auto_label)
    system = resolve_decomposition(S, d)
    return AnalyticExpression(tuple(f for _, f in _blocks(S, system, resolve_rule(rule))))


def check_monoidality(A: Graph, B: Graph, d: Decomposer = "internal", rule: FeynmanRule | str = "classic",
                      *, auto_label: bool = True) -> tuple[int, ...] | None:
    """Witness ``sigma`` with ``apply_permutation(sigma, Z(A + B)) == Z(A) (x) Z(B)``."""
    A, B = _prepare(A, auto_label), _prepare(B, auto_label)
    rule = resolve_rule(rule)
    da, db = resolve_decomposition(A, d), resolve_decomposition(B, d)
    U = labeled_union(A, B)
    zu = evaluate_Z(U, union_decomposition(da, db), rule)
    return symmetric_iso(zu, tensor(evaluate_Z(A, da, rule), evaluate_Z(B, db, rule)))


def factor_table(S: StructuredHypergraph, d: DecompositionSystem, rule: FeynmanRule) -> dict[tuple, TensorFactor]:
    """Non-unit factors of Z(S) keyed by ``(kind, arity, element)``."""
    table = {}
    for slot, f in _blocks(S, d, rule):
        table[(slot.kind, slot.arity, slot.element)] = f
    return table


def z_image_invertible(f: HypergraphMorphism, A: StructuredHypergraph, B: StructuredHypergraph,
                       d: Decomposer = "internal", rule: FeynmanRule | str = "classic", *,
                       tables: tuple[dict, dict] | None = None) -> bool:
    """Whether f induces a factor-preserving bijection between the two words.

    Z(f) exists only when f keeps every factor's class and symbol; it is
    invertible when that assignment is a bijection on each block.
    """
    if not validate_morphism(f):
        raise ValidationError("not a hypergraph morphism")
    if tables is None:
        rule = resolve_rule(rule)
        tables = (factor_table(A, resolve_decomposition(A, d), rule),
                  factor_table(B, resolve_decomposition(B, d), rule))
    ta, tb = tables
    if len(ta) != len(tb):
        return False
    image = set()
    for (kind, j, x), fac in ta.items():
        y = f.vertex_map[x] if kind == "v" else f.edge_maps[j][x]
        if tb.get((kind, j, y)) != fac:
            return False
        image.add((kind, j, y))
    return len(image) == len(tb)


def check_iso_reflection(f: HypergraphMorphism, A: Graph, B: Graph, d: Decomposer = "internal",
                         rule: FeynmanRule | str = "classic", *, tables: tuple[dict, dict] | None = None) -> bool:
    """True unless Z(f) is invertible while f is not an isomorphism."""
    A, B = as_structured(A), as_structured(B)
    if A.labeling is None or B.labeling is None:
        raise MissingLabeling("iso-reflection is checked on labeled hypergraphs")
    return not z_image_invertible(f, A, B, d, rule, tables=tables) or is_isomorphism(f)
