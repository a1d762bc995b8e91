"""Vertex deletion, decks, labeled reconstruction and exhaustive verification."""
from __future__ import annotations

import enum
import hashlib
import itertools
import os
import time
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .canon import (
    DEFAULT_CAP,
    CanonicalCode,
    ColorAssignment,
    canonical_code,
    decode_code,
    enumerate_hypergraphs,
    enumerate_vertex_colored,
)
from .errors import (
    ArityTooLargeForDeck,
    CapExceeded,
    EmptyHypergraph,
    InconsistentDeck,
    MissingLabeling,
    SlotUnknown,
    StructureValueError,
    ValidationError,
    VertexOutOfRange,
)
from .hypercore import Hypergraph, disjoint_union_all, induced_subhypergraph
from .structures import (
    FeynmanGraphData,
    StructuredHypergraph,
    StructureSpec,
    feynman_as_structure,
    structured_union,
    validate_feynman,
)


# ------------------------------------------------------------- deletion

def _rerank(labels: Sequence[int]) -> tuple[int, ...]:
    order = sorted(range(len(labels)), key=lambda i: labels[i])
    out = [0] * len(labels)
    for r, i in enumerate(order):
        out[i] = r
    return tuple(out)


def delete_vertex(G, x: int):
    """Card ``G - x``: surviving vertices keep their relative order."""
    if not 0 <= x < G.n:
        raise VertexOutOfRange(f"vertex {x} outside [0, {G.n})")
    keep = [v for v in range(G.n) if v != x]
    if isinstance(G, Hypergraph):
        return induced_subhypergraph(G, keep)[0]
    H, survivors = induced_subhypergraph(G.base, keep)
    values = {}
    for (k, j, e), val in G.values.items():
        if j == 1:
            if e != x:
                values[(k, 1, e - (e > x))] = val
    for j, ids in survivors.items():
        for new_id, old_id in enumerate(ids):
            for k in G.spec.slots(j):
                values[(k, j, new_id)] = G.value(k, j, old_id)
    labeling = None
    if G.labeling is not None:
        labeling = _rerank([G.labeling[v] for v in keep])
    return StructuredHypergraph(H, G.spec, values, labeling)


def add_isolated(G, k: int):
    if k < 0:
        raise ValueError("k must be non-negative")
    base = G if isinstance(G, Hypergraph) else G.base
    H = Hypergraph._trusted(base.n + k, dict(base.edges))
    if isinstance(G, Hypergraph):
        return H
    values = dict(G.values)
    for slot in G.spec.slots(1):
        for v in range(base.n, base.n + k):
            values[(slot, 1, v)] = 0
    labeling = None if G.labeling is None else tuple(G.labeling) + tuple(range(base.n, base.n + k))
    return StructuredHypergraph(H, G.spec, values, labeling)


def _code(S) -> CanonicalCode:
    if isinstance(S, Hypergraph):
        return canonical_code(S)
    return canonical_code(S.base, S.colors())


# ----------------------------------------------------------------- decks

@dataclass(frozen=True)
class Deck:
    """Multiset of card codes; ``sequence`` keeps the per-label order for labeled inputs."""

    cards: tuple[tuple[CanonicalCode, int], ...]
    card_count: int
    sequence: tuple[CanonicalCode, ...] | None = None

    def digest(self) -> str:
        h = hashlib.sha256()
        for code, mult in self.cards:
            h.update(f"{code.hex()}:{mult};".encode())
        return h.hexdigest()

    def sequence_digest(self) -> str:
        if self.sequence is None:
            raise MissingLabeling("deck was built from an unlabeled input")
        h = hashlib.sha256()
        for code in self.sequence:
            h.update(code.hex().encode() + b";")
        return h.hexdigest()

    def multiplicity(self, code: CanonicalCode) -> int:
        return dict(self.cards).get(code, 0)


def cards(G) -> list:
    """Cards in vertex order."""
    return [delete_vertex(G, x) for x in range(G.n)]


def labeled_cards(S: StructuredHypergraph) -> list[StructuredHypergraph]:
    """Cards indexed by the deleted label."""
    if S.labeling is None:
        raise MissingLabeling("labeled deck needs a labeling")
    by_label = [0] * S.n
    for v, lab in enumerate(S.labeling):
        by_label[lab] = v
    return [delete_vertex(S, by_label[lab]) for lab in range(S.n)]


def deck(G) -> Deck:
    if G.n == 0:
        raise EmptyHypergraph("the empty hypergraph has no cards")
    labeled = not isinstance(G, Hypergraph) and G.labeling is not None
    pieces = labeled_cards(G) if labeled else cards(G)
    codes = [_code(c) for c in pieces]
    counted = tuple(sorted(Counter(codes).items()))
    return Deck(counted, G.n, tuple(codes) if labeled else None)


def _union_cards(pieces: list):
    if pieces and isinstance(pieces[0], Hypergraph):
        return disjoint_union_all(pieces)
    acc = pieces[0]
    for p in pieces[1:]:
        acc = structured_union(acc, p)
    return acc


def weak_deck(G) -> CanonicalCode:
    """Code of the disjoint union of all cards (label order for labeled inputs)."""
    if G.n == 0:
        raise EmptyHypergraph("the empty hypergraph has no cards")
    labeled = not isinstance(G, Hypergraph) and G.labeling is not None
    pieces = labeled_cards(G) if labeled else cards(G)
    return _code(_union_cards(pieces))


def weak_deck_from_deck(d: Deck) -> CanonicalCode:
    """Rebuild the union of cards from their codes alone."""
    if d.sequence is not None:
        ordered = list(d.sequence)
    else:
        ordered = [code for code, mult in d.cards for _ in range(mult)]
    graphs, vcols = [], []
    ecols: dict[int, list] = defaultdict(list)
    offset = 0
    for code in ordered:
        H, cols = decode_code(code)
        graphs.append(H)
        shift = offset if d.sequence is not None else 0
        # labels occupy the first color component of labeled cards
        for c in cols.vertex:
            vcols.append(((c[0] + shift,) + c[1:]) if d.sequence is not None else c)
        offset += H.n
        for j in sorted(cols.edges):
            ecols[j].extend(cols.edges[j])
    U = disjoint_union_all(graphs)
    return canonical_code(U, ColorAssignment(tuple(vcols), {j: tuple(cs) for j, cs in ecols.items()}))


def hypomorphic(G, H) -> bool:
    return deck(G).cards == deck(H).cards


def weakly_hypomorphic(G, H) -> bool:
    return weak_deck(G) == weak_deck(H)


# ------------------------------------------------------- counting identity

def structure_count(S: StructuredHypergraph, k: int, j: int, a: int) -> int:
    m = S.spec.modulus(k, j)
    if m is None:
        raise SlotUnknown(f"slot ({k},{j}) not in the structure table")
    if not 0 <= a < m:
        raise StructureValueError(f"residue {a} outside Z_{m}")
    size = S.n if j == 1 else S.base.edge_count(j)
    return sum(1 for e in range(size) if S.value(k, j, e) == a)


def kelly_sides(S: StructuredHypergraph, k: int, j: int, a: int) -> tuple[int, list[int]]:
    """``((n - j) * count, per-card counts)``."""
    if S.n <= j:
        raise ArityTooLargeForDeck(f"n={S.n} leaves no card containing an arity-{j} element")
    lhs = (S.n - j) * structure_count(S, k, j, a)
    return lhs, [structure_count(delete_vertex(S, x), k, j, a) for x in range(S.n)]


def kelly_identity_check(S: StructuredHypergraph, k: int, j: int, a: int) -> bool:
    lhs, per_card = kelly_sides(S, k, j, a)
    return lhs == sum(per_card)


# --------------------------------------------------- labeled reconstruction

def reconstruct_labeled(deck_cards: Sequence[StructuredHypergraph]) -> StructuredHypergraph:
    """Inverse of ``labeled_cards`` when every edge survives in some card."""
    n = len(deck_cards)
    if n < 2:
        raise InconsistentDeck("need at least two cards to see every vertex")
    spec = deck_cards[0].spec
    for c in deck_cards:
        if c.n != n - 1 or c.spec != spec or c.labeling is None:
            raise InconsistentDeck("cards must be labeled, share a structure table and have n-1 vertices")
    vertex_vals: dict[tuple[int, int], int] = {}
    occurrences: dict[tuple, list[int]] = defaultdict(lambda: [0] * n)
    for x, card in enumerate(deck_cards):
        orig = [lab + (lab >= x) for lab in card.labeling]
        for v in range(card.n):
            for k in spec.slots(1):
                key = (k, orig[v])
                val = card.value(k, 1, v)
                if vertex_vals.setdefault(key, val) != val:
                    raise InconsistentDeck(f"cards disagree on slot {k} of vertex {orig[v]}")
        for j, es in card.base.edges.items():
            for e, inc in enumerate(es):
                labels = tuple(sorted(orig[v] for v in inc))
                occurrences[(j, labels, card.edge_values(j, e))][x] += 1
    edges: dict[int, list[tuple[int, ...]]] = defaultdict(list)
    edge_vals: dict[int, list[tuple[int, ...]]] = defaultdict(list)
    for (j, labels, vals), per_card in sorted(occurrences.items()):
        present = [per_card[x] for x in range(n) if x not in labels]
        total = sum(per_card)
        if total % (n - j) or len(set(present)) != 1:
            raise InconsistentDeck(f"edge {list(labels)} seen {total} times across {n - j} cards")
        mult = total // (n - j)
        edges[j].extend([labels] * mult)
        edge_vals[j].extend([vals] * mult)
    values = {}
    for k in spec.slots(1):
        for v in range(n):
            values[(k, 1, v)] = vertex_vals[(k, v)]
    for j, vals in edge_vals.items():
        for e, row in enumerate(vals):
            for k, val in zip(spec.slots(j), row):
                values[(k, j, e)] = val
    return StructuredHypergraph(Hypergraph(n, edges), spec, values, tuple(range(n)))


# ----------------------------------------------------------- class specs

class ContextKind(enum.Enum):
    RC = "rc"
    DRC = "drc"
    LABELED = "labeled"


@dataclass(frozen=True)
class ClassSpec:
    """A class of (structured) hypergraphs.

    ``family`` is ``plain``, ``structured`` (one slot ``(k, j)`` of modulus
    ``modulus``) or ``feynman`` (vertex kind and genus below ``genus_cap``).
    """

    family: str = "plain"
    max_arity: int = 2
    max_multiplicity: int = 1
    slot: tuple[int, int] = (1, 1)
    modulus: int = 1
    genus_cap: int = 1

    @classmethod
    def parse(cls, text: str) -> "ClassSpec":
        head, _, tail = text.partition(":")
        opts = {}
        for part in filter(None, tail.split(",")):
            key, eq, val = part.partition("=")
            if not eq:
                raise ValidationError(f"malformed class option {part!r}")
            try:
                opts[key.strip()] = int(val)
            except ValueError:
                raise ValidationError(f"class option {key} needs an integer") from None
        a = opts.pop("a", 3 if head == "hyper" else 2)
        m = opts.pop("mult", 1)
        if head == "plain":
            spec = cls("plain", a, m)
        elif head == "simple":
            spec = cls("plain", 2, 1)
        elif head == "multi":
            spec = cls("plain", a, opts.pop("m", 2))
        elif head == "hyper":
            spec = cls("plain", a, m)
        elif head == "structured":
            spec = cls("structured", a, m, (opts.pop("k", 1), opts.pop("j", 1)), opts.pop("m", 2))
        elif head == "feynman":
            spec = cls("feynman", 2, m, genus_cap=opts.pop("g", 1))
        else:
            raise ValidationError(f"unknown class {head!r}")
        if opts:
            raise ValidationError(f"unused class options {sorted(opts)}")
        if spec.max_arity < 2 or spec.max_multiplicity < 1 or spec.modulus < 1 or spec.genus_cap < 1:
            raise ValidationError(f"invalid class parameters in {text!r}")
        if spec.family == "structured" and spec.slot[1] > spec.max_arity:
            raise ValidationError("structure slot arity exceeds the class arity bound")
        return spec

    def __str__(self) -> str:
        if self.family == "plain":
            return f"plain:a={self.max_arity},mult={self.max_multiplicity}"
        if self.family == "structured":
            k, j = self.slot
            return f"structured:a={self.max_arity},mult={self.max_multiplicity},k={k},j={j},m={self.modulus}"
        return f"feynman:mult={self.max_multiplicity},g={self.genus_cap}"

    def structure_spec(self) -> StructureSpec:
        if self.family == "structured":
            return StructureSpec.of({self.slot: self.modulus})
        if self.family == "feynman":
            return StructureSpec.of({(1, 1): 2, (2, 1): max(self.genus_cap, 1)})
        return StructureSpec()


def _all_labeled_bases(n: int, max_arity: int, max_mult: int) -> Iterable[Hypergraph]:
    subsets = [s for j in range(2, max_arity + 1) for s in itertools.combinations(range(n), j)]
    for mult in itertools.product(range(max_mult + 1), repeat=len(subsets)):
        store: dict[int, list] = defaultdict(list)
        for s, m in zip(subsets, mult):
            store[len(s)].extend([s] * m)
        yield Hypergraph._trusted(n, {j: tuple(es) for j, es in store.items() if es})


def _decorations(spec: ClassSpec, G: Hypergraph) -> Iterable[StructuredHypergraph]:
    table = spec.structure_spec()
    if spec.family == "plain":
        yield StructuredHypergraph(G, table)
        return
    if spec.family == "structured":
        k, j = spec.slot
        size = G.n if j == 1 else G.edge_count(j)
        for vals in itertools.product(range(spec.modulus), repeat=size):
            yield StructuredHypergraph(G, table, {(k, j, e): val for e, val in enumerate(vals)})
        return
    for kinds in itertools.product((0, 1), repeat=G.n):
        for genus in itertools.product(range(spec.genus_cap), repeat=G.n):
            data = FeynmanGraphData(kinds, genus)
            if validate_feynman(G, data):
                yield feynman_as_structure(G, data, max(spec.genus_cap, 1))


def enumerate_class(spec: ClassSpec | str, n: int, labeled: bool = False, *,
                    cap: int = DEFAULT_CAP) -> list[StructuredHypergraph]:
    """One instance per isomorphism class (labeled classes carry the identity labeling)."""
    if isinstance(spec, str):
        spec = ClassSpec.parse(spec)
    if n > cap:
        raise CapExceeded(f"n={n} exceeds the desk-scale cap {cap}")
    if labeled:
        out = []
        for G in _all_labeled_bases(n, spec.max_arity, spec.max_multiplicity):
            for S in _decorations(spec, G):
                out.append(S.with_labeling(tuple(range(n))))
        return out
    if spec.family == "plain":
        simple = spec.max_multiplicity == 1
        return [StructuredHypergraph(G) for G in
                enumerate_hypergraphs(n, spec.max_arity, spec.max_multiplicity, simple, cap=cap)]
    if spec.family == "structured" and spec.slot[1] == 1:
        k = spec.slot[0]
        table = spec.structure_spec()
        return [StructuredHypergraph(G, table, {(k, 1, v): c for v, c in enumerate(cols)})
                for G, cols in enumerate_vertex_colored(n, spec.modulus, spec.max_arity, spec.max_multiplicity, cap=cap)]
    # remaining families: decorate class representatives, dedupe by code
    seen: dict[CanonicalCode, StructuredHypergraph] = {}
    for G in enumerate_hypergraphs(n, spec.max_arity, spec.max_multiplicity, spec.max_multiplicity == 1, cap=cap):
        for S in _decorations(spec, G):
            seen.setdefault(_code(S), S)
    return [seen[c] for c in sorted(seen)]


# ------------------------------------------------------ verification driver

@dataclass
class CollisionGroup:
    digest: str
    members: list[StructuredHypergraph]
    codes: list[str]


@dataclass
class CollisionReport:
    kind: str
    class_spec: str
    n: int
    class_size: int
    groups: list[CollisionGroup] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    jobs: int = 1

    @property
    def collision_free(self) -> bool:
        return not self.groups

    @property
    def collision_count(self) -> int:
        return len(self.groups)


def deck_signature(kind: ContextKind, S: StructuredHypergraph) -> tuple:
    """Exact comparison key for the chosen reconstruction context."""
    if kind is ContextKind.RC:
        d = deck(S.with_labeling(None))
        return tuple((c.data, m) for c, m in d.cards)
    if kind is ContextKind.DRC:
        return (weak_deck(S.with_labeling(None)).data,)
    if S.labeling is None:
        raise MissingLabeling("labeled context needs labeled instances")
    return tuple(c.data for c in deck(S).sequence)


def _signature_chunk(kind_value: str, chunk: list[StructuredHypergraph]) -> list[tuple]:
    kind = ContextKind(kind_value)
    return [deck_signature(kind, S) for S in chunk]


def _sig_digest(sig: tuple) -> str:
    return hashlib.sha256(repr(sig).encode()).hexdigest()


def default_jobs() -> int:
    return max(1, len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1))


def compute_signatures(kind: ContextKind, instances: list[StructuredHypergraph], jobs: int = 1) -> list[tuple]:
    if jobs <= 1 or len(instances) < 2 * jobs:
        return _signature_chunk(kind.value, instances)
    size = -(-len(instances) // (jobs * 4))
    chunks = [instances[i:i + size] for i in range(0, len(instances), size)]
    out: list[tuple] = []
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for part in pool.map(_signature_chunk, [kind.value] * len(chunks), chunks):
            out.extend(part)
    return out


def group_collisions(instances: list[StructuredHypergraph], signatures: list[tuple],
                     code_of=None, prefix_len: int = 1) -> list[CollisionGroup]:
    """Bucket by digest, then confirm each bucket by exact signature comparison.

    Buckets are processed partition by partition (digest prefix) and merged in
    sorted digest order.
    """
    code_of = code_of or (lambda S: _code(S).hex())
    partitions: dict[str, dict[str, list[int]]] = defaultdict(lambda: defaultdict(list))
    for i, sig in enumerate(signatures):
        dg = _sig_digest(sig)
        partitions[dg[:prefix_len]][dg].append(i)
    groups = []
    for prefix in sorted(partitions):
        for dg in sorted(partitions[prefix]):
            idx = partitions[prefix][dg]
            if len(idx) < 2:
                continue
            exact: dict[tuple, list[int]] = defaultdict(list)
            for i in idx:
                exact[signatures[i]].append(i)
            for members in exact.values():
                if len(members) < 2:
                    continue
                codes = [code_of(instances[i]) for i in members]
                if len(set(codes)) != len(codes):
                    raise AssertionError("class enumeration produced isomorphic duplicates")
                groups.append(CollisionGroup(dg, [instances[i] for i in members], codes))
    return groups


def verify_class(kind: ContextKind | str, class_spec: ClassSpec | str, n: int, jobs: int = 1,
                 *, cap: int = DEFAULT_CAP) -> CollisionReport:
    kind = ContextKind(kind) if not isinstance(kind, ContextKind) else kind
    spec = ClassSpec.parse(class_spec) if isinstance(class_spec, str) else class_spec
    if n > cap:
        raise CapExceeded(f"n={n} exceeds the desk-scale cap {cap}")
    if n < 1:
        raise EmptyHypergraph("verification needs n >= 1")
    t0 = time.perf_counter()
    instances = enumerate_class(spec, n, labeled=kind is ContextKind.LABELED, cap=cap)
    t1 = time.perf_counter()
    sigs = compute_signatures(kind, instances, jobs)
    t2 = time.perf_counter()
    groups = group_collisions(instances, sigs)
    t3 = time.perf_counter()
    return CollisionReport(kind.value, str(spec), n, len(instances), groups,
                           {"enumerate": t1 - t0, "decks": t2 - t1, "group": t3 - t2}, jobs)


def weak_implication_violations(instances: list) -> list[tuple[int, int]]:
    """Pairs with equal decks but different weak decks (should be empty)."""
    by_deck: dict[tuple, list[int]] = defaultdict(list)
    for i, S in enumerate(instances):
        by_deck[deck(S).cards].append(i)
    bad = []
    for idx in by_deck.values():
        weak = {i: weak_deck(instances[i]) for i in idx}
        for a, b in itertools.combinations(idx, 2):
            if weak[a] != weak[b]:
                bad.append((a, b))
    return bad

