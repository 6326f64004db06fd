"""Linear (l, n) network codes in global-encoding form.

Each edge carries ``n`` symbols.  Its global encoding matrix has one row per
source symbol, in block order (M_1, K_1, ..., M_s, K_s) with block size
``l + kappa``, so edge e sends ``x_flat @ g_e``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .galois import FieldMatrix, PrimeField, hstack, rowspace_contained, solve_right
from .netmodel import Network, Realization


class CodeError(ValueError):
    """Shape or structure mismatch between a code and a network."""


@dataclass(frozen=True, eq=False)
class LinearCode:
    q: int
    l: int
    kappa: int
    n: int
    s: int
    encodings: Mapping[str, FieldMatrix]

    def __post_init__(self) -> None:
        if min(self.l, self.kappa, self.s) < 0 or self.n < 1 or self.l < 1:
            raise CodeError(f"bad code dimensions l={self.l} kappa={self.kappa} n={self.n} s={self.s}")
        rows = self.s * (self.l + self.kappa)
        for eid, g in self.encodings.items():
            if g.shape != (rows, self.n):
                raise CodeError(f"encoding of {eid!r} has shape {g.shape}, expected {(rows, self.n)}")
            if g.q != self.q:
                raise CodeError(f"encoding of {eid!r} is over F_{g.q}, code is over F_{self.q}")
        object.__setattr__(self, "encodings", MappingProxyType(dict(self.encodings)))

    @property
    def field(self) -> PrimeField:
        return PrimeField(self.q)

    @property
    def block(self) -> int:
        return self.l + self.kappa

    @property
    def dim(self) -> int:
        return self.s * self.block

    @property
    def rate(self) -> float:
        return self.l / self.n

    def message_rows(self) -> list[int]:
        return [i * self.block + j for i in range(self.s) for j in range(self.l)]

    def key_rows(self) -> list[int]:
        return [i * self.block + self.l + j for i in range(self.s) for j in range(self.kappa)]

    def block_rows(self, i: int) -> range:
        return range(i * self.block, (i + 1) * self.block)

    def stacked(self, eids: Iterable[str]) -> FieldMatrix:
        """G(W): the encodings of ``eids`` side by side."""
        return hstack([self.encodings[e] for e in eids], rows=self.dim, field=self.field)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinearCode):
            return NotImplemented
        return (self.q, self.l, self.kappa, self.n, self.s) == (other.q, other.l, other.kappa, other.n, other.s) \
            and dict(self.encodings) == dict(other.encodings)

    def __hash__(self) -> int:
        return hash((self.q, self.l, self.kappa, self.n, self.s, tuple(sorted(self.encodings.items()))))


def target_matrix(code: LinearCode, coefficients: Iterable[int], sources: Iterable[int] | None = None) -> FieldMatrix:
    """P with x_flat @ P = sum_i a_i m_i; zero rows on keys and on sources outside ``sources``."""
    coeffs = list(coefficients)
    keep = set(range(code.s)) if sources is None else set(sources)
    p = np.zeros((code.dim, code.l), dtype=np.int64)
    for i in keep:
        for j in range(code.l):
            p[i * code.block + j, j] = coeffs[i]
    return FieldMatrix(p, code.q)


def check_shapes(code: LinearCode, net: Network) -> None:
    """Raise CodeError unless the code fits the network and source edges only see their own block."""
    if code.q != net.field_q:
        raise CodeError(f"code is over F_{code.q} but network is over F_{net.field_q}")
    if code.s != net.s:
        raise CodeError(f"code has {code.s} sources, network has {net.s}")
    missing = set(net.edge_ids) - set(code.encodings)
    extra = set(code.encodings) - set(net.edge_ids)
    if missing or extra:
        raise CodeError(f"edge mismatch: missing {sorted(missing)}, unknown {sorted(extra)}")
    for eid in net.edge_ids:
        i = net.source_of_edge(eid)
        if i is None:
            continue
        g = code.encodings[eid].array
        own = code.block_rows(i)
        outside = np.delete(g, list(own), axis=0)
        if outside.any():
            raise CodeError(f"source edge {eid!r} depends on symbols of another source")


def evaluate(code: LinearCode, net: Network, x: Realization) -> dict[str, tuple[int, ...]]:
    if len(x.messages) != code.s or len(x.keys) != code.s:
        raise CodeError("realization does not match the number of sources")
    for m, k in zip(x.messages, x.keys):
        if len(m) != code.l or len(k) != code.kappa:
            raise CodeError(f"realization block lengths must be (l={code.l}, kappa={code.kappa})")
    row = FieldMatrix([x.flat()], code.q)
    return {eid: tuple((row @ code.encodings[eid]).array[0].tolist()) for eid in net.edge_ids}


@dataclass(frozen=True)
class LocalCheck:
    ok: bool
    edge: str | None = None
    column: int | None = None

    def __bool__(self) -> bool:
        return self.ok


def check_local(code: LinearCode, net: Network) -> LocalCheck:
    """Every non-source edge must be a linear function of its tail's in-edges."""
    for eid in net.edges_topo:
        tail = net.edge_by_id[eid].tail
        if tail in net.source_index:
            continue
        incoming = code.stacked(net.in_edges[tail])
        g = code.encodings[eid]
        if rowspace_contained(g.T, incoming.T):
            continue
        for c in range(g.cols):
            if not rowspace_contained(g.select_cols([c]).T, incoming.T):
                return LocalCheck(False, eid, c)
    return LocalCheck(True)


def sink_matrix(code: LinearCode, net: Network) -> FieldMatrix:
    return code.stacked(net.in_edges[net.sink])


def check_decodable(code: LinearCode, net: Network) -> FieldMatrix | None:
    """Decoder D with (in-edge symbols of the sink) @ D = sum_i a_i m_i, or None."""
    coeffs = [a % code.q for a in net.coefficients]
    return solve_right(sink_matrix(code, net), target_matrix(code, coeffs))


def decode(code: LinearCode, net: Network, decoder: FieldMatrix, messages: Mapping[str, Iterable[int]]) -> tuple[int, ...]:
    received = [v for eid in net.in_edges[net.sink] for v in messages[eid]]
    return tuple((FieldMatrix([received], code.q) @ decoder).array[0].tolist())


def truncate(code: LinearCode, keep: Iterable[int]) -> LinearCode:
    """Zero every row block of every encoding outside the source indices in ``keep``."""
    keep = set(keep)
    if not keep:
        raise ValueError("truncate needs at least one source")
    drop = [r for i in range(code.s) if i not in keep for r in code.block_rows(i)]
    enc = {}
    for eid, g in code.encodings.items():
        a = g.array.copy()
        a[drop, :] = 0
        enc[eid] = FieldMatrix._wrap(a, g.field)
    return LinearCode(code.q, code.l, code.kappa, code.n, code.s, enc)


def code_from_local(net: Network, q: int, l: int, kappa: int, n: int,
                    local: Mapping[str, FieldMatrix]) -> LinearCode:
    """Assemble global encodings from local encoders.

    A source edge's local matrix maps the source's (l + kappa) symbols to n
    symbols; any other edge's maps the concatenated in-edge symbols of its
    tail (|In(tail)| * n of them) to n symbols.
    """
    f = PrimeField(q)
    blk = l + kappa
    dim = net.s * blk
    glob: dict[str, FieldMatrix] = {}
    for eid in net.edges_topo:
        tail = net.edge_by_id[eid].tail
        theta = local[eid]
        i = net.source_index.get(tail)
        if i is not None:
            a = np.zeros((dim, n), dtype=np.int64)
            a[i * blk:(i + 1) * blk, :] = theta.array
            glob[eid] = FieldMatrix._wrap(a, f)
        else:
            glob[eid] = hstack([glob[d] for d in net.in_edges[tail]]) @ theta
    return LinearCode(q, l, kappa, n, net.s, {eid: glob[eid] for eid in net.edge_ids})


def code_to_dict(code: LinearCode, edge_order: Iterable[str] | None = None) -> dict:
    order = list(edge_order) if edge_order is not None else list(code.encodings)
    return {
        "q": code.q,
        "l": code.l,
        "kappa": code.kappa,
        "n": code.n,
        "s": code.s,
        "encodings": {eid: code.encodings[eid].tolist() for eid in order},
    }


def serialize_code(code: LinearCode, edge_order: Iterable[str] | None = None) -> str:
    return json.dumps(code_to_dict(code, edge_order), indent=2) + "\n"


def code_from_dict(doc: dict) -> LinearCode:
    try:
        q, l, kappa, n = int(doc["q"]), int(doc["l"]), int(doc["kappa"]), int(doc["n"])
        raw = doc["encodings"]
        enc = {str(eid): FieldMatrix(np.array(m, dtype=np.int64).reshape(-1, n), q) for eid, m in raw.items()}
        s = int(doc["s"]) if "s" in doc else next(iter(enc.values())).rows // (l + kappa)
    except (KeyError, TypeError, ValueError, StopIteration) as exc:
        raise CodeError(f"malformed code document: {exc}") from None
    return LinearCode(q, l, kappa, n, s, enc)


def parse_code(text: str) -> LinearCode:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CodeError(f"syntax error: {exc}") from None
    return code_from_dict(doc)


def code_from_columns(q: int, l: int, kappa: int, s: int, columns: Mapping[str, Iterable[int]]) -> LinearCode:
    """Scalar (n = 1) code from one global coding vector per edge."""
    enc = {eid: FieldMatrix.column(list(v), q) for eid, v in columns.items()}
    return LinearCode(q, l, kappa, 1, s, enc)

