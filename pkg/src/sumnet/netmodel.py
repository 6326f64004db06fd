"""Directed acyclic sum-networks: topology, sources, sink and target coefficients."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field as dc_field, replace
from functools import cached_property
from typing import Iterable, Sequence

from .galois import PrimeField


class NetworkError(ValueError):
    """Raised when a network document is malformed or fails validation."""


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str


@dataclass(frozen=True)
class Network:
    field_q: int
    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    sources: tuple[str, ...]
    coefficients: tuple[int, ...]
    sink: str
    # original coefficients a_i when this network was produced by normalize_to_sum
    scaling: tuple[int, ...] | None = dc_field(default=None, compare=False)

    def __post_init__(self) -> None:
        _validate(self)

    @cached_property
    def field(self) -> PrimeField:
        return PrimeField(self.field_q)

    @property
    def s(self) -> int:
        return len(self.sources)

    @cached_property
    def edge_ids(self) -> tuple[str, ...]:
        return tuple(e.id for e in self.edges)

    @cached_property
    def edge_index(self) -> dict[str, int]:
        return {e.id: i for i, e in enumerate(self.edges)}

    @cached_property
    def edge_by_id(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    @cached_property
    def source_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.sources)}

    @cached_property
    def in_edges(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {v: [] for v in self.nodes}
        for e in self.edges:
            out[e.head].append(e.id)
        return {v: tuple(ids) for v, ids in out.items()}

    @cached_property
    def out_edges(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {v: [] for v in self.nodes}
        for e in self.edges:
            out[e.tail].append(e.id)
        return {v: tuple(ids) for v, ids in out.items()}

    @cached_property
    def topo_order(self) -> tuple[str, ...]:
        order = _topological_order(self.nodes, self.edges)
        assert order is not None
        return tuple(order)

    @cached_property
    def edges_topo(self) -> tuple[str, ...]:
        """Edge ids ordered by the topological position of their tail (ties: file order)."""
        pos = {v: i for i, v in enumerate(self.topo_order)}
        return tuple(sorted(self.edge_ids, key=lambda eid: (pos[self.edge_by_id[eid].tail], self.edge_index[eid])))

    def source_of_edge(self, eid: str) -> int | None:
        """Index of the source that is the tail of ``eid``, or None."""
        return self.source_index.get(self.edge_by_id[eid].tail)

    def sort_edges(self, eids: Iterable[str]) -> tuple[str, ...]:
        return tuple(sorted(eids, key=self.edge_index.__getitem__))

    def with_field(self, q: int) -> Network:
        """Same topology over another prime field (coefficients reduced mod q)."""
        coeffs = tuple(a % q for a in self.coefficients)
        return replace(self, field_q=q, coefficients=coeffs)


@dataclass(frozen=True)
class Realization:
    """Per-source message and key vectors."""

    messages: tuple[tuple[int, ...], ...]
    keys: tuple[tuple[int, ...], ...]

    def flat(self) -> list[int]:
        out: list[int] = []
        for m, k in zip(self.messages, self.keys):
            out.extend(m)
            out.extend(k)
        return out


def _topological_order(nodes: Sequence[str], edges: Sequence[Edge]) -> list[str] | None:
    indeg = {v: 0 for v in nodes}
    succ: dict[str, list[str]] = {v: [] for v in nodes}
    for e in edges:
        indeg[e.head] += 1
        succ[e.tail].append(e.head)
    ready = deque(v for v in nodes if indeg[v] == 0)
    order = []
    while ready:
        v = ready.popleft()
        order.append(v)
        for w in succ[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    return order if len(order) == len(nodes) else None


def _validate(n: Network) -> None:
    try:
        PrimeField(n.field_q)
    except ValueError as exc:
        raise NetworkError(str(exc)) from None
    if len(set(n.nodes)) != len(n.nodes):
        raise NetworkError("duplicate node identifiers")
    known = set(n.nodes)
    seen_ids: set[str] = set()
    for e in n.edges:
        if e.id in seen_ids:
            raise NetworkError(f"duplicate edge id {e.id!r}")
        seen_ids.add(e.id)
        for end in (e.tail, e.head):
            if end not in known:
                raise NetworkError(f"edge {e.id!r} references unknown node {end!r}")
        if e.tail == e.head:
            raise NetworkError(f"edge {e.id!r} is a self-loop")
    if n.sink not in known:
        raise NetworkError(f"unknown sink {n.sink!r}")
    if not n.sources:
        raise NetworkError("network has no sources")
    if len(set(n.sources)) != len(n.sources):
        raise NetworkError("duplicate source")
    if len(n.coefficients) != len(n.sources):
        raise NetworkError("one coefficient per source required")
    indeg = {v: 0 for v in n.nodes}
    outdeg = {v: 0 for v in n.nodes}
    for e in n.edges:
        outdeg[e.tail] += 1
        indeg[e.head] += 1
    for v, a in zip(n.sources, n.coefficients):
        if v not in known:
            raise NetworkError(f"unknown source {v!r}")
        if v == n.sink:
            raise NetworkError(f"source {v!r} is also the sink")
        if indeg[v]:
            raise NetworkError(f"source {v!r} has an in-edge")
        if a % n.field_q == 0:
            raise NetworkError(f"source {v!r} has zero coefficient")
    if outdeg[n.sink]:
        raise NetworkError(f"sink {n.sink!r} has an out-edge")
    if _topological_order(n.nodes, n.edges) is None:
        raise NetworkError("graph contains a cycle")
    src = set(n.sources)
    for v in n.nodes:
        if v in src or v == n.sink:
            continue
        if indeg[v] == 0:
            raise NetworkError(f"node {v!r} is unreachable (in-degree 0 and not a source)")
        if outdeg[v] == 0:
            raise NetworkError(f"node {v!r} is a dead end (out-degree 0 and not the sink)")
    # with the degree rules above every node reaches the sink; sources still
    # need an out-edge
    for v in n.sources:
        if outdeg[v] == 0:
            raise NetworkError(f"source {v!r} has no path to the sink")


def reachability(n: Network, start: Iterable[str], removed: Iterable[str] = ()) -> tuple[frozenset[str], frozenset[str]]:
    """Nodes and edges on directed walks from ``start``; ``removed`` edges are skipped."""
    start = list(start)
    for v in start:
        if v not in n.in_edges:
            raise NetworkError(f"unknown node {v!r}")
    skip = set(removed)
    nodes = set(start)
    edges: set[str] = set()
    todo = deque(start)
    while todo:
        v = todo.popleft()
        for eid in n.out_edges[v]:
            if eid in skip:
                continue
            edges.add(eid)
            h = n.edge_by_id[eid].head
            if h not in nodes:
                nodes.add(h)
                todo.append(h)
    return frozenset(nodes), frozenset(edges)


def normalize_to_sum(n: Network) -> Network:
    """Rewrite f = sum a_i x_i as the plain sum of y_i = a_i x_i."""
    if all(a == 1 for a in n.coefficients):
        return n
    return replace(n, coefficients=(1,) * n.s, scaling=n.coefficients)


def network_to_dict(n: Network) -> dict:
    return {
        "field_q": n.field_q,
        "nodes": list(n.nodes),
        "edges": [{"id": e.id, "tail": e.tail, "head": e.head} for e in n.edges],
        "sources": [{"node": v, "coeff": a} for v, a in zip(n.sources, n.coefficients)],
        "sink": n.sink,
    }


def serialize_network(n: Network) -> str:
    return json.dumps(network_to_dict(n), indent=2) + "\n"


def network_from_dict(doc: dict) -> Network:
    try:
        q = doc["field_q"]
        nodes = tuple(str(v) for v in doc["nodes"])
        edges = tuple(Edge(str(e["id"]), str(e["tail"]), str(e["head"])) for e in doc["edges"])
        sources = tuple(str(s["node"]) for s in doc["sources"])
        coeffs = tuple(int(s.get("coeff", 1)) for s in doc["sources"])
        sink = str(doc["sink"])
    except (KeyError, TypeError) as exc:
        raise NetworkError(f"malformed network document: {exc}") from None
    if not isinstance(q, int):
        raise NetworkError("field_q must be an integer")
    return Network(q, nodes, edges, sources, coeffs, sink)


def parse_network(text: str) -> Network:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkError(f"syntax error: {exc}") from None
    if not isinstance(doc, dict):
        raise NetworkError("network document must be an object")
    return network_from_dict(doc)


def build_network(q: int, edges: Sequence[tuple[str, str, str]], sources: Sequence[str], sink: str,
                  coefficients: Sequence[int] | None = None, nodes: Sequence[str] | None = None) -> Network:
    """Convenience constructor from (id, tail, head) triples; node order follows first appearance."""
    if nodes is None:
        order: list[str] = []
        for v in list(sources) + [x for _, t, h in edges for x in (t, h)] + [sink]:
            if v not in order:
                order.append(v)
        nodes = order
    coeffs = tuple(coefficients) if coefficients is not None else (1,) * len(sources)
    return Network(q, tuple(nodes), tuple(Edge(*e) for e in edges), tuple(sources), coeffs, sink)
