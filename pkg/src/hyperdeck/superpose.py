"""Superposition witnesses and the card map lambda_Z.

``lambda_Z`` tensors Z over the cards of a hypergraph.  Labeled inputs keep
the cards in deleted-label order and compare words exactly ("strict");
unlabeled inputs auto-label each card and compare normal forms
("symmetric").
"""
from __future__ import annotations

import hashlib
import time
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Sequence

from .canon import DEFAULT_CAP
from .errors import CapExceeded, EmptyHypergraph, ValidationError
from .feynman import Decomposer, FeynmanRule, Graph, evaluate_Z, resolve_rule
from .reconstruction import (
    ClassSpec,
    CollisionGroup,
    ContextKind,
    _code,
    cards,
    deck,
    enumerate_class,
    labeled_cards,
    weak_deck,
)
from .structures import as_structured
from .symcontext import AnalyticExpression, normal_form, symmetric_iso, tensor

LAMBDA_MODES = ("auto", "strict", "symmetric")


@dataclass(frozen=True)
class SuperpositionWitness:
    target: AnalyticExpression
    factors: tuple[AnalyticExpression, ...]
    permutation: tuple[int, ...]

    @property
    def order(self) -> int:
        """Number of non-unit factors."""
        return sum(1 for f in self.factors if f.word)


def superpose_check(X: AnalyticExpression, factors: Sequence[AnalyticExpression],
                    bound: int | None = None) -> SuperpositionWitness | None:
    """Witness that ``X`` is isomorphic to the tensor of ``factors``.

    With ``bound`` set, at most that many factors may be non-unit.
    """
    factors = tuple(factors)
    if bound is not None and sum(1 for f in factors if f.word) > bound:
        return None
    sigma = symmetric_iso(X, tensor(*factors))
    if sigma is None:
        return None
    return SuperpositionWitness(X, factors, sigma)


def lambda_expression(S: Graph, d: Decomposer = "internal", rule: FeynmanRule | str = "classic",
                      mode: str = "auto") -> AnalyticExpression:
    if mode not in LAMBDA_MODES:
        raise ValidationError(f"lambda mode must be one of {LAMBDA_MODES}")
    S = as_structured(S)
    if S.n < 1:
        raise EmptyHypergraph("lambda_Z needs at least one vertex")
    if mode == "auto":
        mode = "strict" if S.labeling is not None else "symmetric"
    rule = resolve_rule(rule)
    if mode == "strict":
        if S.labeling is None:
            raise ValidationError("strict mode needs a labeled input")
        return tensor(*(evaluate_Z(c, d, rule) for c in labeled_cards(S)))
    unlabeled = S.with_labeling(None)
    return normal_form(tensor(*(evaluate_Z(c, d, rule, auto_label=True) for c in cards(unlabeled))))


def lambda_Z(S: Graph, d: Decomposer = "internal", rule: FeynmanRule | str = "classic",
             mode: str = "auto") -> str:
    """Hex digest of the card expression."""
    return hashlib.sha256(lambda_expression(S, d, rule, mode).serialize()).hexdigest()


@dataclass
class LambdaReport:
    class_spec: str
    n: int
    labeled: bool
    rule_complete: bool
    class_size: int
    lambda_groups: list[CollisionGroup] = field(default_factory=list)
    weak_groups: list[CollisionGroup] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def injective(self) -> bool:
        return not self.lambda_groups

    @property
    def coincide(self) -> bool:
        """Same collision partition under lambda_Z and under weak decks."""
        return _partition(self.lambda_groups) == _partition(self.weak_groups)


def _partition(groups: list[CollisionGroup]) -> set[frozenset[str]]:
    return {frozenset(g.codes) for g in groups}


def _groups(instances: list, keys: list[str]) -> list[CollisionGroup]:
    buckets: dict[str, list[int]] = defaultdict(list)
    for i, k in enumerate(keys):
        buckets[k].append(i)
    out = []
    for k in sorted(buckets):
        idx = buckets[k]
        if len(idx) > 1:
            members = [instances[i] for i in idx]
            out.append(CollisionGroup(k, members, [_code(m).hex() for m in members]))
    return out


def deck_implies_lambda(instances: list, d: Decomposer = "internal", rule: FeynmanRule | str = "classic") -> list[tuple[int, int]]:
    """Pairs with equal decks but different lambda_Z (should be empty for any rule)."""
    by_deck: dict[tuple, list[int]] = defaultdict(list)
    for i, S in enumerate(instances):
        dk = deck(S)
        by_deck[dk.sequence or dk.cards].append(i)
    bad = []
    for idx in by_deck.values():
        lam = {i: lambda_Z(instances[i], d, rule) for i in idx}
        bad.extend((a, b) for a in idx for b in idx if a < b and lam[a] != lam[b])
    return bad


def verify_lambda_injectivity(class_spec: ClassSpec | str, n: int, d: Decomposer = "internal",
                              rule: FeynmanRule | str = "classic", *, labeled: bool = True,
                              cap: int = DEFAULT_CAP) -> LambdaReport:
    spec = ClassSpec.parse(class_spec) if isinstance(class_spec, str) else class_spec
    if n > cap:
        raise CapExceeded(f"n={n} exceeds the desk-scale cap {cap}")
    if n < 1:
        raise EmptyHypergraph("verification needs n >= 1")
    rule = resolve_rule(rule)
    t0 = time.perf_counter()
    instances = enumerate_class(spec, n, labeled=labeled, cap=cap)
    t1 = time.perf_counter()
    lam = [lambda_Z(S, d, rule) for S in instances]
    t2 = time.perf_counter()
    weak = [weak_deck(S).hex() for S in instances]
    t3 = time.perf_counter()
    kind = ContextKind.LABELED if labeled else ContextKind.DRC
    return LambdaReport(f"{kind.value}:{spec}", n, labeled, rule.complete, len(instances),
                        _groups(instances, lam), _groups(instances, weak),
                        {"enumerate": t1 - t0, "lambda": t2 - t1, "weak_decks": t3 - t2})
