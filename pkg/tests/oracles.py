"""Independent brute-force references used to derive expected values.

Nothing here calls into the canonical-form engine.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from math import factorial


def burnside_graph_count(n: int) -> int:
    """Number of simple graphs on n unlabeled vertices (orbit counting)."""
    if n <= 1:
        return 1
    pairs = list(itertools.combinations(range(n), 2))
    index = {p: i for i, p in enumerate(pairs)}
    total = Fraction(0)
    for perm in itertools.permutations(range(n)):
        seen = [False] * len(pairs)
        cycles = 0
        for i, (a, b) in enumerate(pairs):
            if seen[i]:
                continue
            cycles += 1
            k = i
            while not seen[k]:
                seen[k] = True
                x, y = pairs[k]
                u, v = perm[x], perm[y]
                k = index[(min(u, v), max(u, v))]
        total += 2 ** cycles
    return int(total / factorial(n))


def min_relabeling(n: int, edges) -> tuple:
    """Lexicographically least sorted edge list over all vertex permutations."""
    best = None
    for perm in itertools.permutations(range(n)):
        img = tuple(sorted(tuple(sorted(perm[v] for v in e)) for e in edges))
        if best is None or img < best:
            best = img
    return best


def labeled_simple_graphs(n: int):
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        yield [pairs[i] for i in range(len(pairs)) if mask >> i & 1]


def classes_by_brute_force(n: int) -> set:
    return {min_relabeling(n, es) for es in labeled_simple_graphs(n)}


def deck_by_brute_force(n: int, edges) -> tuple:
    """Sorted multiset of brute-force canonical forms of the cards."""
    out = []
    for x in range(n):
        keep = [v for v in range(n) if v != x]
        pos = {v: i for i, v in enumerate(keep)}
        card = [(pos[a], pos[b]) for a, b in edges if x not in (a, b)]
        out.append(min_relabeling(n - 1, card))
    return tuple(sorted(out))
