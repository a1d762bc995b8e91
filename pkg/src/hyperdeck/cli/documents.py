"""JSON hypergraph documents and graph6 import."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Iterator

import networkx as nx

from ..errors import StructureValueError, ValidationError
from ..feynman import DecompositionSystem
from ..hypercore import Hypergraph
from ..structures import (
    DEFAULT_GENUS_CAP,
    FeynmanGraphData,
    StructuredHypergraph,
    StructureSpec,
    feynman_as_structure,
    feynman_data_of,
)


@dataclass(frozen=True)
class HypergraphDocument:
    """A structured hypergraph plus optional Feynman data and decomposition.

    When ``feynman`` is set the structure table is the Feynman one and is
    not written separately.
    """

    graph: StructuredHypergraph
    feynman: FeynmanGraphData | None = None
    decomposition: DecompositionSystem | None = None

    @property
    def base(self) -> Hypergraph:
        return self.graph.base

    @classmethod
    def from_dict(cls, obj: dict[str, Any]) -> "HypergraphDocument":
        if not isinstance(obj, dict):
            raise ValidationError("document must be a JSON object")
        unknown = set(obj) - {"vertices", "edges", "structure", "labeling", "feynman", "decomposition"}
        if unknown:
            raise ValidationError(f"unknown document keys {sorted(unknown)}")
        try:
            n = int(obj["vertices"])
        except (KeyError, TypeError, ValueError):
            raise ValidationError("document needs an integer 'vertices'") from None
        edges = {int(j): [list(e) for e in es] for j, es in (obj.get("edges") or {}).items()}
        G = Hypergraph(n, edges)
        labeling = obj.get("labeling")
        feynman = None
        if "feynman" in obj:
            if "structure" in obj:
                raise ValidationError("a document carries either 'structure' or 'feynman', not both")
            fd = obj["feynman"]
            feynman = FeynmanGraphData.of(fd["kind"], fd.get("genus"))
            S = feynman_as_structure(G, feynman, DEFAULT_GENUS_CAP).with_labeling(labeling)
        else:
            st = obj.get("structure") or {}
            table = {}
            for row in st.get("spec", []):
                key = (int(row["k"]), int(row["j"]))
                if key in table:
                    raise StructureValueError(f"slot {key} declared twice")
                table[key] = int(row["modulus"])
            values = {}
            for row in st.get("values", []):
                key = (int(row["k"]), int(row["j"]), int(row["element"]))
                if key in values:
                    raise StructureValueError(f"value {key} given twice")
                values[key] = int(row["value"])
            S = StructuredHypergraph(G, StructureSpec.of(table), values, labeling)
        decomposition = None
        if "decomposition" in obj:
            dd = obj["decomposition"]
            decomposition = DecompositionSystem(
                int(dd["order"]), tuple(int(c) for c in dd["vertex_class"]),
                {int(j): tuple(int(c) for c in cs) for j, cs in (dd.get("edge_class") or {}).items()},
            )
            if not decomposition.fits(G):
                raise ValidationError("decomposition does not cover the hypergraph")
        return cls(S, feynman, decomposition)

    def to_dict(self) -> dict[str, Any]:
        S = self.graph
        out: dict[str, Any] = {
            "vertices": S.n,
            "edges": {str(j): [list(e) for e in es] for j, es in S.base.edges.items()},
        }
        if self.feynman is not None:
            out["feynman"] = {"kind": list(self.feynman.kind), "genus": list(self.feynman.genus)}
        elif S.spec.table:
            out["structure"] = {
                "spec": [{"k": k, "j": j, "modulus": m} for (k, j), m in S.spec.table],
                "values": [{"k": k, "j": j, "element": e, "value": v} for (k, j, e), v in sorted(S.values.items())],
            }
        if S.labeling is not None:
            out["labeling"] = list(S.labeling)
        if self.decomposition is not None:
            d = self.decomposition
            out["decomposition"] = {
                "order": d.order,
                "vertex_class": list(d.vertex_class),
                "edge_class": {str(j): list(cs) for j, cs in sorted(d.edge_class.items())},
            }
        return out


def document_of(S: StructuredHypergraph | Hypergraph, decomposition: DecompositionSystem | None = None) -> HypergraphDocument:
    """Wrap a graph; Feynman-shaped structure tables are written as Feynman data."""
    if isinstance(S, Hypergraph):
        S = StructuredHypergraph(S)
    feynman = None
    if S.spec == StructureSpec.of({(1, 1): 2, (2, 1): DEFAULT_GENUS_CAP}):
        feynman = feynman_data_of(S)
    return HypergraphDocument(S, feynman, decomposition)


def dumps(doc: HypergraphDocument, indent: int | None = None) -> str:
    return json.dumps(doc.to_dict(), sort_keys=True, indent=indent, separators=None if indent else (",", ":"))


def loads(text: str) -> HypergraphDocument:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc}") from None
    try:
        return HypergraphDocument.from_dict(obj)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed document: {exc!r}") from None


def load(path: str | Path) -> HypergraphDocument:
    return loads(Path(path).read_text())


def hypergraph_from_networkx(g: nx.Graph) -> Hypergraph:
    index = {v: i for i, v in enumerate(sorted(g.nodes))}
    return Hypergraph(len(index), {2: [(index[a], index[b]) for a, b in g.edges]})


def read_graph6(lines: Iterable[str | bytes]) -> Iterator[Hypergraph]:
    """One simple graph per non-empty graph6 line (``>>graph6<<`` headers allowed)."""
    for raw in lines:
        line = raw.strip() if isinstance(raw, bytes) else raw.strip().encode("ascii")
        if not line:
            continue
        if line.startswith(b">>graph6<<"):
            line = line[len(b">>graph6<<"):]
        try:
            g = nx.from_graph6_bytes(line)
        except (nx.NetworkXError, ValueError) as exc:
            raise ValidationError(f"bad graph6 line {line[:20]!r}: {exc}") from None
        yield hypergraph_from_networkx(g)
