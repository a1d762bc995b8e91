import pytest
from hypothesis import given

from hyperdeck.errors import EmptyHypergraph, ValidationError
from hyperdeck.feynman import evaluate_Z
from hyperdeck.hypercore import Hypergraph
from hyperdeck.reconstruction import enumerate_class, labeled_cards
from hyperdeck.structures import labeled, labeled_union
from hyperdeck.superpose import (
    deck_implies_lambda,
    lambda_expression,
    lambda_Z,
    superpose_check,
    verify_lambda_injectivity,
)
from hyperdeck.symcontext import UNIT, AnalyticExpression, apply_permutation, order_of, tensor
from strategies import structured_hypergraphs

K3 = Hypergraph(3, {2: [(0, 1), (0, 2), (1, 2)]})
P3 = Hypergraph(3, {2: [(0, 1), (1, 2)]})


def test_trivial_superposition_of_any_order():
    X = evaluate_Z(labeled(K3, [0, 1, 2]))
    w = superpose_check(X, [X, UNIT, UNIT])
    assert w is not None and w.order == 1 and len(w.factors) == 3
    assert superpose_check(X, [X, UNIT], bound=1) is not None


def test_k3_splits_into_its_blocks():
    X = evaluate_Z(labeled(K3, [0, 1, 2]))
    verts = AnalyticExpression(X.word[:3])
    edges = AnalyticExpression(X.word[3:])
    w = superpose_check(X, [edges, verts, UNIT])
    assert w is not None and apply_permutation(w.permutation, X) == tensor(edges, verts)
    assert superpose_check(X, [edges, verts], bound=1) is None
    assert superpose_check(X, [edges]) is None


@given(structured_hypergraphs(max_n=5, labeled=True), structured_hypergraphs(max_n=5, labeled=True))
def test_unions_superpose(A, B):
    if A.spec != B.spec:
        return
    assert superpose_check(evaluate_Z(labeled_union(A, B)), [evaluate_Z(A), evaluate_Z(B)]) is not None


def test_lambda_of_labeled_p3():
    S = labeled(P3, [0, 1, 2])
    expr = lambda_expression(S)
    # cards: K2, two isolated vertices, K2
    assert expr == tensor(*(evaluate_Z(c) for c in labeled_cards(S)))
    assert [f.rank for f in expr.word] == [1, 1, 2, 0, 0, 1, 1, 2]
    assert order_of(expr) == 4


def test_lambda_of_k1_is_the_unit_digest():
    assert lambda_Z(labeled(Hypergraph(1), [0])) == UNIT.digest()
    with pytest.raises(EmptyHypergraph):
        lambda_Z(Hypergraph(0))
    with pytest.raises(ValidationError):
        lambda_Z(P3, mode="strict")
    with pytest.raises(ValidationError):
        lambda_Z(P3, mode="sideways")


def test_isomorphic_unlabeled_inputs_share_a_digest():
    assert lambda_Z(P3) == lambda_Z(Hypergraph(3, {2: [(0, 2), (2, 1)]}))


def test_unlabeled_pair_collides_like_its_weak_deck():
    r = verify_lambda_injectivity("simple", 2, labeled=False)
    assert r.class_size == 2 and len(r.lambda_groups) == 1 and r.coincide


def test_symmetric_lambda_only_sees_degrees():
    # K_{1,3} and K3 + K1 have different decks, but every card of either
    # contributes only a degree multiset, and the totals agree
    r = verify_lambda_injectivity("simple", 4, labeled=False)
    assert not r.weak_groups and len(r.lambda_groups) == 1
    star = Hypergraph(4, {2: [(0, 3), (1, 3), (2, 3)]})
    tri = Hypergraph(4, {2: [(1, 2), (1, 3), (2, 3)]})
    assert lambda_Z(star) == lambda_Z(tri)


@pytest.mark.parametrize("rule", ["collapsed", "forgetful"])
def test_incomplete_rules_collide(rule):
    r = verify_lambda_injectivity("structured:m=2", 3, rule=rule)
    assert not r.rule_complete and not r.coincide
    assert len(r.lambda_groups) == 8 and not r.weak_groups


@pytest.mark.parametrize("spec, n", [("structured:m=2", 3), ("hyper:a=3", 4)])
def test_labeled_lambda_is_injective(spec, n):
    r = verify_lambda_injectivity(spec, n, rule="standard")
    assert r.rule_complete and r.injective and r.coincide


@pytest.mark.parametrize("labeled_inputs", [True, False])
def test_equal_decks_give_equal_lambda(labeled_inputs):
    for rule in ("classic", "physics", "collapsed"):
        inst = enumerate_class("simple", 4, labeled=labeled_inputs)
        assert deck_implies_lambda(inst, "internal", rule) == []
