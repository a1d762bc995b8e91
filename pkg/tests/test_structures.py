import pytest
from hypothesis import given, strategies as st

from hyperdeck.errors import (
    FixedPointInInvolution,
    GenusCapExceeded,
    InvalidColoring,
    NotABijection,
    NotFeynman,
    SpecMismatch,
    StructureValueError,
)
from hyperdeck.hypercore import Hypergraph, HypergraphMorphism
from hyperdeck.structures import (
    FeynmanGraphData,
    RibbonGraphData,
    StructuredHypergraph,
    StructureSpec,
    coloring_as_structure,
    external_edges,
    feynman_as_structure,
    feynman_data_of,
    is_structured_morphism,
    labeled,
    labeled_edge_ranks,
    labeled_union,
    labeling_as_structure,
    structured_union,
    unique_labeled_iso,
    validate_coloring,
    validate_feynman,
    validate_ribbon,
    validate_stable,
)
from strategies import structured_hypergraphs

P3 = Hypergraph(3, {2: [(0, 1), (1, 2)]})
STAR = Hypergraph(4, {2: [(0, 3), (1, 3), (2, 3)]})


def test_values_are_validated():
    spec = StructureSpec.of({(1, 1): 2})
    with pytest.raises(StructureValueError):
        StructuredHypergraph(P3, spec, {(1, 1, 0): 0, (1, 1, 1): 0})
    with pytest.raises(StructureValueError):
        StructuredHypergraph(P3, spec, {(1, 1, 0): 0, (1, 1, 1): 0, (1, 1, 2): 2})
    with pytest.raises(StructureValueError):
        StructuredHypergraph(P3, spec, {(1, 1, 0): 0, (1, 1, 1): 0, (1, 1, 2): 0, (1, 2, 0): 0})
    with pytest.raises(StructureValueError):
        StructureSpec.of({(0, 1): 2})


def test_modulus_one_slots_carry_nothing():
    S = StructuredHypergraph(P3, StructureSpec.of({(1, 2): 1}))
    assert S.values == {} and S.edge_values(2, 0) == ()


def test_colorings():
    assert validate_coloring(P3, [0, 1, 0])
    assert not validate_coloring(P3, [0, 0, 1])
    S = coloring_as_structure(P3, [0, 1, 0], 2)
    assert S.vertex_values(1) == (1,)
    with pytest.raises(InvalidColoring):
        coloring_as_structure(P3, [0, 0, 1], 2)
    with pytest.raises(StructureValueError):
        coloring_as_structure(P3, [0, 2, 0], 2)


def test_labelings_and_edge_ranks():
    with pytest.raises(NotABijection):
        labeled(P3, [0, 0, 1])
    S = labeled(P3, [2, 0, 1])
    # edge {0,1} has label image {0,2}; edge {1,2} has {0,1}
    assert labeled_edge_ranks(P3, S.labeling) == {2: (1, 0)}
    T = labeling_as_structure(P3, [2, 0, 1])
    assert T.vertex_values(0) == (2,)


def test_unique_labeled_iso():
    A = labeled(P3, [0, 1, 2])
    B = labeled(Hypergraph(3, {2: [(0, 2), (0, 1)]}), [1, 2, 0])
    f = unique_labeled_iso(A, B)
    assert f is not None and f.vertex_map == (2, 0, 1)
    C = labeled(Hypergraph(3, {2: [(0, 1), (0, 2)]}), [0, 1, 2])
    assert unique_labeled_iso(A, C) is None


def test_parallel_edges_ranked_by_structure():
    spec = StructureSpec.of({(1, 2): 2})
    G = Hypergraph(2, {2: [(0, 1), (0, 1)]})
    A = StructuredHypergraph(G, spec, {(1, 2, 0): 1, (1, 2, 1): 0}, (0, 1))
    B = StructuredHypergraph(G, spec, {(1, 2, 0): 0, (1, 2, 1): 1}, (0, 1))
    assert A.edge_labels() == {2: (1, 0)}
    f = unique_labeled_iso(A, B)
    assert f is not None and f.edge_maps[2] == (1, 0)


@given(structured_hypergraphs(labeled=True), structured_hypergraphs(labeled=True))
def test_labeled_union_puts_left_labels_first(A, B):
    if A.spec != B.spec:
        with pytest.raises(SpecMismatch):
            structured_union(A, B)
        return
    U = labeled_union(A, B)
    assert U.n == A.n + B.n
    assert U.labeling[:A.n] == A.labeling
    assert all(lab >= A.n for lab in U.labeling[A.n:])


def test_structured_morphisms():
    spec = StructureSpec.of({(1, 1): 2})
    A = StructuredHypergraph(Hypergraph(2, {2: [(0, 1)]}), spec, {(1, 1, 0): 1, (1, 1, 1): 0})
    B = StructuredHypergraph(P3, spec, {(1, 1, 0): 0, (1, 1, 1): 1, (1, 1, 2): 0})
    good = HypergraphMorphism(A.base, B.base, (1, 0), {2: (0,)})
    bad = HypergraphMorphism(A.base, B.base, (0, 1), {2: (0,)})
    assert is_structured_morphism(good, A, B)
    assert not is_structured_morphism(bad, A, B)


def test_feynman_graphs():
    data = FeynmanGraphData.of([0, 0, 0, 1])
    assert validate_feynman(STAR, data) and validate_stable(STAR, data)
    assert external_edges(STAR, data) == [0, 1, 2]
    assert not validate_feynman(Hypergraph(2, {2: [(0, 1)]}), FeynmanGraphData.of([0, 0]))
    assert not validate_feynman(P3, FeynmanGraphData.of([1, 0, 1]))  # external of degree 2
    loop1 = FeynmanGraphData.of([0, 0, 1], [0, 0, 1])
    assert validate_stable(P3.__class__(3, {2: [(0, 2), (1, 2)]}), loop1)
    assert not validate_stable(P3.__class__(3, {2: [(0, 2), (1, 2)]}), FeynmanGraphData.of([0, 0, 1]))
    with pytest.raises(NotFeynman):
        validate_stable(P3, FeynmanGraphData.of([1, 0, 1]))
    S = feynman_as_structure(STAR, data)
    assert feynman_data_of(S) == data
    with pytest.raises(GenusCapExceeded):
        feynman_as_structure(STAR, FeynmanGraphData.of([0, 0, 0, 1], [0, 0, 0, 5]), genus_cap=4)


def test_ribbon_graphs():
    # one vertex with two darts forming a loop edge
    R = RibbonGraphData((0, 0), (1, 0), (1, 0))
    assert validate_ribbon(R)
    with pytest.raises(FixedPointInInvolution):
        validate_ribbon(RibbonGraphData((0, 0), (0, 1), (1, 0)))
    with pytest.raises(StructureValueError):
        validate_ribbon(RibbonGraphData((0, 0), (1, 1), (1, 0)))
    # sigma orbits must match the vertex fibers
    assert not validate_ribbon(RibbonGraphData((0, 1), (1, 0), (1, 0)))


@given(st.integers(1, 5))
def test_spec_slots(m):
    spec = StructureSpec.of({(1, 1): m, (2, 2): 3})
    assert spec.slots(1) == ([1] if m > 1 else [])
    assert spec.slots(1, nontrivial=False) == [1]
    assert spec.arities() == ([1, 2] if m > 1 else [2])
