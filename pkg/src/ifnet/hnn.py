"""Homological neural-network architectures derived from an IFN.

Only the wiring is produced: a DAG whose nodes are the simplices (cliques)
of the network plus one final aggregation node. What each node computes is
left to whoever trains the model; nodes carry a free-form ``annotation``
dict for that purpose.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .core import FilteredGraph, enumerate_simplices
from .errors import InvalidInputError

LAYERED = "layered"
FLAT = "flat"
MODES = (LAYERED, FLAT)


@dataclass(frozen=True)
class HnnNode:
    id: str
    members: tuple[str, ...]
    layer: int
    annotation: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"id": self.id, "members": list(self.members), "layer": self.layer}
        if self.annotation:
            out["annotation"] = self.annotation
        return out


@dataclass(frozen=True)
class HnnSpec:
    nodes: tuple[HnnNode, ...]
    edges: tuple[tuple[str, str], ...]
    final: str
    mode: str

    def node(self, node_id: str) -> HnnNode:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    def predecessors(self, node_id: str) -> list[str]:
        return [s for s, t in self.edges if t == node_id]

    def successors(self, node_id: str) -> list[str]:
        return [t for s, t in self.edges if s == node_id]

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "final": self.final,
            "nodes": [n.to_dict() for n in self.nodes],
            "edges": [list(e) for e in self.edges],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, doc: dict) -> "HnnSpec":
        try:
            nodes = tuple(HnnNode(str(n["id"]), tuple(str(m) for m in n["members"]), int(n["layer"]),
                                  dict(n.get("annotation", {}))) for n in doc["nodes"])
            edges = tuple((str(s), str(t)) for s, t in doc["edges"])
            spec = cls(nodes, edges, str(doc["final"]), str(doc["mode"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"malformed HNN document: {exc!r}") from exc
        if spec.mode not in MODES:
            raise InvalidInputError(f"unknown HNN mode {spec.mode!r}")
        return spec

    @classmethod
    def from_json(cls, text: str) -> "HnnSpec":
        return cls.from_dict(json.loads(text))


def export_hnn(g: FilteredGraph, mode: str = LAYERED, d_max: int = 2) -> HnnSpec:
    """Build the HNN computation graph of ``g`` over simplices up to ``d_max``.

    ``layered``: each k-simplex is fed by its (k-1)-faces and every maximal
    simplex (not a face of a larger enumerated one) feeds the final node.
    ``flat``: every simplex of dimension >= 1 is fed directly by its
    vertices and feeds the final node. Isolated vertices feed the final node
    in both modes. Node ids join the sorted member names with ``-``.
    """
    if mode not in MODES:
        raise InvalidInputError(f"unknown HNN mode {mode!r}")
    if d_max < 1:
        raise InvalidInputError(f"d_max must be at least 1, got {d_max}")
    if g.p == 0 or g.n_edges == 0:
        raise InvalidInputError("cannot build an HNN from a graph without edges")
    names = g.names
    levels = enumerate_simplices(g, d_max).by_dim
    ident = {s: "-".join(names[v] for v in s) for dim in levels for s in dim}
    final = "final"
    while final in ident.values():
        final = "_" + final

    covered = set()
    for dim in levels[1:]:
        for s in dim:
            covered.update(s[:k] + s[k + 1:] for k in range(len(s)))
    maximal = [s for dim in levels for s in dim if s not in covered]

    nodes, edges = [], []
    top = len(levels) - 1
    for d, dim in enumerate(levels):
        layer = d if mode == LAYERED else min(d, 1)
        for s in dim:
            nodes.append(HnnNode(ident[s], tuple(names[v] for v in s), layer))
            if d == 0:
                continue
            if mode == LAYERED:
                sources = [s[:k] + s[k + 1:] for k in range(len(s))]
            else:
                sources = [(v,) for v in s]
            edges.extend((ident[f], ident[s]) for f in sorted(sources))
    final_layer = top + 1 if mode == LAYERED else 2
    nodes.append(HnnNode(final, (), final_layer))
    sinks = maximal if mode == LAYERED else [s for s in ident if len(s) > 1 or s in maximal]
    sinks.sort(key=lambda s: (len(s), s))
    edges.extend((ident[s], final) for s in sinks)
    return HnnSpec(tuple(nodes), tuple(edges), final, mode)
