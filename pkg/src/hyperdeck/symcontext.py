"""A free strict symmetric monoidal target: graded words of tensor factors.

Nothing is ever contracted or evaluated.  An expression is a word of factors,
each one a primal (``U``) or dual (``U^vee``) tensor of some rank with a
monomial grade in the formal parameters.  Tensor product is concatenation.
Two words are isomorphic in the symmetric setting iff they hold the same
multiset of factors.
"""
from __future__ import annotations

import hashlib
import re
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

PRIMAL, DUAL = "primal", "dual"
HBAR = "h[2,1]"
_SLOT_RE = re.compile(r"^h\[(\d+),(\d+)\]$")


def parameter_name(name: str) -> str:
    """Normalize a parameter name; ``hbar`` is an alias of ``h[2,1]``."""
    name = name.strip().replace(" ", "")
    if name in ("hbar", "ℏ"):
        return HBAR
    if name in ("t", "o") or _SLOT_RE.match(name):
        return name
    raise ValueError(f"unknown formal parameter {name!r}")


def slot_parameter(k: int, j: int) -> str:
    return f"h[{k},{j}]"


@dataclass(frozen=True, order=True)
class ParameterGrade:
    """Exponent vector, stored as sorted ``(name, exponent)`` pairs with no zeros."""

    exponents: tuple[tuple[str, int], ...] = ()

    @classmethod
    def of(cls, mapping: Mapping[str, int] | None = None, **kw: int) -> "ParameterGrade":
        acc: dict[str, int] = defaultdict(int)
        for name, e in list((mapping or {}).items()) + list(kw.items()):
            if e < 0:
                raise ValueError("exponents are natural numbers")
            acc[parameter_name(name)] += int(e)
        return cls(tuple(sorted((k, v) for k, v in acc.items() if v)))

    def __add__(self, other: "ParameterGrade") -> "ParameterGrade":
        acc = dict(self.exponents)
        for k, v in other.exponents:
            acc[k] = acc.get(k, 0) + v
        return ParameterGrade(tuple(sorted(acc.items())))

    def get(self, name: str) -> int:
        return dict(self.exponents).get(parameter_name(name), 0)

    def is_trivial(self) -> bool:
        return not self.exponents

    def render(self) -> str:
        parts = []
        ex = dict(self.exponents)
        for name in ("t", "o"):
            if name in ex:
                parts.append(f"{name}^{ex.pop(name)}")
        if HBAR in ex:
            parts.append(f"ℏ^{ex.pop(HBAR)}")
        parts.extend(f"{k}^{v}" for k, v in sorted(ex.items()))
        return " ".join(parts)


@dataclass(frozen=True)
class TensorFactor:
    """One generalized element.

    ``symbol`` is ``(kind, i, j, degree, residues)`` for factors produced by
    Feynman rules, but any tuple of ints and strings in that shape works.
    """

    symbol: tuple
    variance: str
    rank: int
    grade: ParameterGrade = ParameterGrade()

    def __post_init__(self):
        if self.variance not in (PRIMAL, DUAL):
            raise ValueError(f"variance must be {PRIMAL!r} or {DUAL!r}")
        if self.rank < 0:
            raise ValueError("rank must be non-negative")

    def key(self) -> tuple:
        return (self.symbol, self.variance, self.rank, self.grade.exponents)

    def is_unit(self) -> bool:
        return self.rank == 0 and self.grade.is_trivial() and not self.symbol

    def render(self) -> str:
        sym = self.symbol
        if len(sym) == 5:
            kind, i, j, d, res = sym
            head = f"{kind}[i={i},j={j},d={d},s=({','.join(str(x) for x in res)})]"
        else:
            head = "[" + ",".join(str(x) for x in sym) + "]"
        grade = self.grade.render()
        return f"{head}{{{self.variance},{self.rank}}}" + (f"·{grade}" if grade else "")


@dataclass(frozen=True)
class AnalyticExpression:
    word: tuple[TensorFactor, ...] = ()

    @classmethod
    def of(cls, factors: Iterable[TensorFactor]) -> "AnalyticExpression":
        return cls(tuple(f for f in factors if not f.is_unit()))

    @property
    def primal_rank(self) -> int:
        return sum(f.rank for f in self.word if f.variance == PRIMAL)

    @property
    def dual_rank(self) -> int:
        return sum(f.rank for f in self.word if f.variance == DUAL)

    @property
    def grade(self) -> ParameterGrade:
        total = ParameterGrade()
        for f in self.word:
            total = total + f.grade
        return total

    def __len__(self) -> int:
        return len(self.word)

    def render(self) -> str:
        return " ⊗ ".join(f.render() for f in self.word) if self.word else "id₁"

    def serialize(self) -> bytes:
        return repr(tuple(f.key() for f in self.word)).encode()

    def digest(self) -> str:
        return hashlib.sha256(self.serialize()).hexdigest()


UNIT = AnalyticExpression()


def tensor(*exprs: AnalyticExpression) -> AnalyticExpression:
    return AnalyticExpression(tuple(f for e in exprs for f in e.word))


def normal_form(a: AnalyticExpression) -> AnalyticExpression:
    return AnalyticExpression(tuple(sorted(a.word, key=TensorFactor.key)))


def apply_permutation(sigma: Sequence[int], a: AnalyticExpression) -> AnalyticExpression:
    """Position ``k`` of the result holds factor ``sigma[k]`` of ``a``."""
    return AnalyticExpression(tuple(a.word[s] for s in sigma))


def symmetric_iso(a: AnalyticExpression, b: AnalyticExpression) -> tuple[int, ...] | None:
    """Witness ``sigma`` with ``apply_permutation(sigma, a) == b``.

    Equal factors are matched in order, so blocks keep their internal order.
    """
    if len(a.word) != len(b.word):
        return None
    pools: dict[tuple, list[int]] = defaultdict(list)
    for i, f in enumerate(a.word):
        pools[f.key()].append(i)
    for q in pools.values():
        q.reverse()
    sigma = []
    for f in b.word:
        q = pools.get(f.key())
        if not q:
            return None
        sigma.append(q.pop())
    return tuple(sigma)


def compose_permutations(first: Sequence[int], second: Sequence[int]) -> tuple[int, ...]:
    """Witness for applying ``first`` then ``second``."""
    return tuple(first[s] for s in second)


def truncate(a: AnalyticExpression, cutoffs: Mapping[str, int]) -> AnalyticExpression | None:
    """``None`` when the total grade exceeds any cutoff."""
    g = a.grade
    for name, limit in cutoffs.items():
        if g.get(name) > limit:
            return None
    return a


def parse_cutoffs(text: str) -> dict[str, int]:
    """``"t=2,hbar=0"`` -> ``{"t": 2, "h[2,1]": 0}``."""
    out = {}
    for part in filter(None, re.split(r",(?![^\[]*\])", text)):
        name, eq, val = part.partition("=")
        if not eq:
            raise ValueError(f"malformed cutoff {part!r}")
        out[parameter_name(name)] = int(val)
    return out


def order_of(a: AnalyticExpression) -> int | None:
    p, d = a.primal_rank, a.dual_rank
    return p if p == d else None
