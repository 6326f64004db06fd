"""Cut quantities of a sum-network: C_min, D_min, G_min, the I_C / J_C / B-hat
classification of a cut, and A_min over an enumerated cut family.

Max-flow runs on networkx with parallel edges merged into integer capacities;
cut edge sets are read off the source side of the residual graph.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

import networkx as nx

from .netmodel import Network, reachability

_SRC = ("__virtual__", "source")
_DST = ("__virtual__", "sink")


class NotACutError(ValueError):
    pass


def _flow_graph(net: Network, removed: set[str], infinite: set[str]) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(net.nodes)
    for e in net.edges:
        if e.id in removed:
            continue
        if g.has_edge(e.tail, e.head):
            data = g[e.tail][e.head]
            if "capacity" in data and e.id not in infinite:
                data["capacity"] += 1
            else:
                data.pop("capacity", None)
        elif e.id in infinite:
            g.add_edge(e.tail, e.head)
        else:
            g.add_edge(e.tail, e.head, capacity=1)
    return g


def _residual_source_side(g: nx.DiGraph, flow: dict) -> set:
    # nodes reachable from the virtual source in the residual graph, giving
    # the min cut closest to the sources
    side = {_SRC}
    todo = [_SRC]
    while todo:
        u = todo.pop()
        for v, data in g.succ[u].items():
            cap = data.get("capacity")
            if v not in side and (cap is None or flow[u][v] < cap):
                side.add(v)
                todo.append(v)
        for v in g.pred[u]:
            if v not in side and flow[v][u] > 0:
                side.add(v)
                todo.append(v)
    return side


def _min_cut(net: Network, sources: Iterable[str], targets: Iterable[str],
             removed: Iterable[str] = (), infinite: Iterable[str] = ()) -> tuple[int, frozenset[str]] | None:
    """Minimum edge set separating every source from every target; None if unbounded."""
    removed = set(removed)
    infinite = set(infinite)
    g = _flow_graph(net, removed, infinite)
    for v in sources:
        g.add_edge(_SRC, v)
    for v in targets:
        g.add_edge(v, _DST)
    try:
        value, flow = nx.maximum_flow(g, _SRC, _DST)
    except nx.NetworkXUnbounded:
        return None
    side = _residual_source_side(g, flow)
    cut = frozenset(e.id for e in net.edges
                    if e.id not in removed and e.tail in side and e.head not in side)
    assert len(cut) == value
    return int(value), cut


def min_cut(net: Network, sources: Iterable[str], to: str) -> tuple[int, frozenset[str]]:
    """Minimum number of edges whose removal disconnects all of ``sources`` from ``to``."""
    sources = list(sources)
    if not sources:
        raise ValueError("min_cut needs at least one source")
    reached, _ = reachability(net, sources)
    if to not in reached:
        return 0, frozenset()
    res = _min_cut(net, sources, [to])
    assert res is not None
    return res


def compute_C_min(net: Network) -> int:
    return min(min_cut(net, [v], net.sink)[0] for v in net.sources)


def c_min_witness(net: Network) -> tuple[int, frozenset[str]]:
    return min((min_cut(net, [v], net.sink) for v in net.sources), key=lambda r: (r[0], sorted(map(net.edge_index.get, r[1]))))


def compute_G_min(net: Network) -> int:
    return min_cut(net, net.sources, net.sink)[0]


def g_min_witness(net: Network) -> frozenset[str]:
    return min_cut(net, net.sources, net.sink)[1]


def sigma_cut(net: Network, i: int) -> tuple[int, frozenset[str]] | None:
    """Smallest sigma_i-cut: separates source i using only edges no other source reaches."""
    others = [v for j, v in enumerate(net.sources) if j != i]
    _, tainted = reachability(net, others) if others else (None, frozenset())
    return _min_cut(net, [net.sources[i]], [net.sink], infinite=tainted)


def compute_D_min(net: Network) -> int | None:
    """Minimum sigma_i-cut size over all sources; None when no sigma_i-cut exists."""
    sizes = [r[0] for r in (sigma_cut(net, i) for i in range(net.s)) if r is not None]
    return min(sizes) if sizes else None


@dataclass(frozen=True)
class CutReport:
    cut: tuple[str, ...]
    separated: tuple[str, ...]
    attached: tuple[str, ...]
    # None when some attached source is itself the tail of a cut edge, so no
    # edge set can intercept it
    completion: tuple[str, ...] | None
    union: tuple[str, ...] | None

    @property
    def size(self) -> int:
        return len(self.cut)

    @property
    def a_size(self) -> float:
        return len(self.union) if self.union is not None else float("inf")

    def to_dict(self) -> dict:
        return {
            "cut": list(self.cut),
            "I_C": list(self.separated),
            "J_C": list(self.attached),
            "B_hat": list(self.completion) if self.completion is not None else None,
            "A": list(self.union) if self.union is not None else None,
            "size_C": self.size,
            "size_A": len(self.union) if self.union is not None else None,
        }


def compute_B_hat(net: Network, c: Iterable[str], j: Iterable[str]) -> frozenset[str] | None:
    """Minimum edge set meeting every path from ``j`` to a tail of a cut edge.

    Cut edges are free (they already belong to A = C u B-hat), which is the
    same as deleting them before the min-cut.
    """
    c = set(c)
    j = list(j)
    if not j:
        return frozenset()
    tails = {net.edge_by_id[e].tail for e in c}
    res = _min_cut(net, j, sorted(tails), removed=c)
    return None if res is None else res[1]


def classify_cut(net: Network, c: Iterable[str]) -> CutReport:
    c = frozenset(c)
    unknown = c - set(net.edge_ids)
    if unknown:
        raise ValueError(f"unknown edges {sorted(unknown)}")
    separated = tuple(v for v in net.sources if net.sink not in reachability(net, [v], removed=c)[0])
    if not separated:
        raise NotACutError(f"{sorted(c)} does not separate any source from the sink")
    tails = {net.edge_by_id[e].tail for e in c}
    attached = tuple(v for v in net.sources
                     if v not in separated and tails & reachability(net, [v])[0])
    b = compute_B_hat(net, c, attached)
    cut = net.sort_edges(c)
    if b is None:
        return CutReport(cut, separated, attached, None, None)
    return CutReport(cut, separated, attached, net.sort_edges(b), net.sort_edges(c | b))


def _report_key(net: Network, r: CutReport) -> tuple:
    return (r.a_size, r.size, [net.edge_index[e] for e in r.cut])


@dataclass(frozen=True)
class CutCatalog:
    reports: tuple[CutReport, ...]
    best: CutReport

    @property
    def a_min(self) -> int:
        return int(self.best.a_size)


def partition_cuts(net: Network) -> list[frozenset[str]]:
    """Crossing edge sets of every node subset X with a source in X and the sink outside."""
    others = [v for v in net.nodes if v != net.sink]
    sources = set(net.sources)
    found: set[frozenset[str]] = set()
    for k in range(1, len(others) + 1):
        for xs in itertools.combinations(others, k):
            x = set(xs)
            if not x & sources:
                continue
            found.add(frozenset(e.id for e in net.edges if e.tail in x and e.head not in x))
    return sorted(found, key=lambda c: [net.edge_index[e] for e in net.sort_edges(c)])


def subset_cuts(net: Network, max_edges: int = 20) -> list[frozenset[str]]:
    """Every edge subset that separates at least one source (exhaustive mode)."""
    if len(net.edges) > max_edges:
        raise ValueError(f"exhaustive cut enumeration limited to {max_edges} edges")
    out = []
    for k in range(1, len(net.edges) + 1):
        for c in itertools.combinations(net.edge_ids, k):
            if any(net.sink not in reachability(net, [v], removed=c)[0] for v in net.sources):
                out.append(frozenset(c))
    return out


def cut_catalog(net: Network, mode: str = "partition") -> CutCatalog:
    if mode == "partition":
        cuts = partition_cuts(net)
    elif mode == "subsets":
        cuts = subset_cuts(net)
    else:
        raise ValueError(f"unknown cut enumeration mode {mode!r}")
    reports = tuple(classify_cut(net, c) for c in cuts)
    best = min(reports, key=lambda r: _report_key(net, r))
    return CutCatalog(reports, best)


def compute_A_min(net: Network, mode: str = "partition") -> tuple[int, CutReport]:
    cat = cut_catalog(net, mode)
    return cat.a_min, cat.best


def is_multi_edge_tree(net: Network) -> bool:
    for v in net.nodes:
        if v == net.sink:
            continue
        heads = {net.edge_by_id[e].head for e in net.out_edges[v]}
        if len(heads) != 1:
            return False
    return True
