"""Code construction and search.

- ``build_routing_user_secure``: rate-1 partial-sum routing, user secure below
  r = min(C_min, s).
- ``build_base_sum_code``: keyless rate-l sum code from random coefficients.
- ``secure_transform`` / ``check_transform``: block-diagonal source transform
  turning a keyless rate-n code into a secure rate n - r code.
- ``exhaustive_search``: enumerate (or sample) linear local encoders.
"""

from __future__ import annotations

import itertools
import logging
import math
import os
import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from . import cutlab, sentinel
from .galois import (FieldMatrix, PrimeField, block_diag, hstack, invert, next_prime,
                     random_invertible, solve_right, span_intersection_trivial)
from .lincode import LinearCode, check_decodable, check_local, code_from_columns, code_from_local
from .netmodel import Network

log = logging.getLogger(__name__)


class ConstructionError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# routing construction


def _dist_to_sink(net: Network) -> dict[str, int]:
    dist = {net.sink: 0}
    todo = deque([net.sink])
    while todo:
        v = todo.popleft()
        for eid in net.in_edges[v]:
            t = net.edge_by_id[eid].tail
            if t not in dist:
                dist[t] = dist[v] + 1
                todo.append(t)
    return dist


def shortest_paths(net: Network) -> list[tuple[str, ...]]:
    """One shortest source-to-sink path per source.

    Every node forwards on a single next edge (the lowest-indexed edge on a
    shortest route), so paths that meet stay merged.
    """
    dist = _dist_to_sink(net)
    nxt = {}
    for v in net.nodes:
        if v == net.sink:
            continue
        nxt[v] = min((e for e in net.out_edges[v] if dist[net.edge_by_id[e].head] == dist[v] - 1),
                     key=net.edge_index.__getitem__)
    paths = []
    for src in net.sources:
        v, path = src, []
        while v != net.sink:
            path.append(nxt[v])
            v = net.edge_by_id[nxt[v]].head
        paths.append(tuple(path))
    return paths


def simple_paths(net: Network, src: str) -> list[tuple[str, ...]]:
    out = []

    def walk(v: str, path: list[str]) -> None:
        if v == net.sink:
            out.append(tuple(path))
            return
        for e in net.out_edges[v]:
            path.append(e)
            walk(net.edge_by_id[e].head, path)
            path.pop()

    walk(src, [])
    return sorted(out, key=lambda p: (len(p), [net.edge_index[e] for e in p]))


def partial_sum_code(net: Network, paths: Sequence[Sequence[str]], q: int | None = None) -> LinearCode:
    """(1, 1) keyless code: each edge carries the sum of the messages whose path uses it."""
    q = net.field_q if q is None else q
    cols = {eid: [0] * net.s for eid in net.edge_ids}
    for i, p in enumerate(paths):
        for eid in p:
            cols[eid][i] = 1
    return code_from_columns(q, 1, 0, net.s, cols)


def _routing_ok(code: LinearCode, net: Network, r: int) -> bool:
    if not check_local(code, net) or check_decodable(code, net) is None:
        return False
    return sentinel.sweep(code, net, r, sentinel.USER_SECURE, stop_at_first=True).passed


def build_routing_user_secure(net: Network, r: int | None = None, budget: int = 100_000) -> LinearCode:
    """Rate-1 routing code that is user secure at level ``r``.

    ``r`` defaults to min(C_min, s) - 1, the largest level at which a user
    secure code exists.  The merged shortest-path routing is tried first; if
    it leaks, other path systems are tried in order of total length.
    """
    if r is None:
        r = min(cutlab.compute_C_min(net), net.s) - 1
    code = partial_sum_code(net, shortest_paths(net))
    if _routing_ok(code, net, r):
        return code
    choices = [simple_paths(net, v) for v in net.sources]
    systems = sorted(itertools.islice(itertools.product(*choices), budget),
                     key=lambda ps: (sum(map(len, ps)), [[net.edge_index[e] for e in p] for p in ps]))
    for ps in systems:
        code = partial_sum_code(net, ps)
        if _routing_ok(code, net, r):
            return code
    raise ConstructionError(f"no rate-1 routing code is user secure at r={r}")


# ---------------------------------------------------------------------------
# random codes


def random_local(net: Network, l: int, kappa: int, n: int, q: int, rng: np.random.Generator) -> dict[str, FieldMatrix]:
    f = PrimeField(q)
    out = {}
    for eid in net.edges_topo:
        tail = net.edge_by_id[eid].tail
        rows = l + kappa if tail in net.source_index else len(net.in_edges[tail]) * n
        out[eid] = FieldMatrix.random(rows, n, f, rng)
    return out


def random_code(net: Network, l: int, kappa: int, n: int, q: int, rng: np.random.Generator) -> LinearCode:
    return code_from_local(net, q, l, kappa, n, random_local(net, l, kappa, n, q, rng))


def _dual_sum_attempt(net: Network, l: int, q: int, rng: np.random.Generator) -> LinearCode | None:
    f = PrimeField(q)
    local = {}
    for eid in net.edge_ids:
        tail = net.edge_by_id[eid].tail
        if tail not in net.source_index:
            local[eid] = FieldMatrix.random(len(net.in_edges[tail]), 1, f, rng)
    into_sink = net.in_edges[net.sink]
    delta = FieldMatrix.random(len(into_sink), l, f, rng)
    # contribution of each edge's symbol to the sink output, in reverse topological order
    weight: dict[str, np.ndarray] = {}
    for eid in reversed(net.edges_topo):
        head = net.edge_by_id[eid].head
        if head == net.sink:
            weight[eid] = delta.array[into_sink.index(eid)].copy()
            continue
        pos = net.in_edges[head].index(eid)
        acc = np.zeros(l, dtype=np.int64)
        for out in net.out_edges[head]:
            acc = (acc + local[out].array[pos, 0] * weight[out]) % q
        weight[eid] = acc
    for i, src in enumerate(net.sources):
        outs = net.out_edges[src]
        w_i = FieldMatrix(np.array([weight[e] for e in outs]), f)
        target = FieldMatrix.identity(l, f).scale(net.coefficients[i])
        alpha_t = solve_right(w_i.T, target)
        if alpha_t is None:
            return None
        for k, eid in enumerate(outs):
            local[eid] = alpha_t.select_rows([k]).T
    code = code_from_local(net, q, l, 0, 1, local)
    return code if check_decodable(code, net) is not None else None


def build_base_sum_code(net: Network, l: int, attempts: int = 64, seed: int = 0,
                        q: int | None = None) -> LinearCode | None:
    """Keyless (l, 1) code delivering sum_i a_i m_i to the sink.

    Intermediate and sink coefficients are random; each source's encoder is
    then solved so that its end-to-end transfer to the sink is a_i * I.  The
    field escalates to a prime above 2|E| after the first failure.
    """
    c_min = cutlab.compute_C_min(net)
    if l > c_min:
        raise ValueError(f"rate {l} exceeds C_min = {c_min}")
    rng = np.random.default_rng(seed)
    q = net.field_q if q is None else q
    for attempt in range(attempts):
        code = _dual_sum_attempt(net, l, q, rng)
        if code is not None:
            return code
        if q <= 2 * len(net.edges):
            q = next_prime(2 * len(net.edges))
    return None


# ---------------------------------------------------------------------------
# secure transform


@dataclass(frozen=True)
class TransformPlan:
    blocks: tuple[FieldMatrix, ...]
    r: int

    @property
    def n(self) -> int:
        return self.blocks[0].rows

    @property
    def matrix(self) -> FieldMatrix:
        return block_diag(self.blocks)

    @property
    def message_columns(self) -> list[int]:
        """T: the first n - r coordinates of every source block."""
        return [i * self.n + j for i in range(len(self.blocks)) for j in range(self.n - self.r)]

    def inverse_T(self) -> FieldMatrix:
        """Columns T of A^{-1}."""
        return block_diag([invert(b) for b in self.blocks]).select_cols(self.message_columns)

    def to_dict(self) -> dict:
        return {
            "blocks": [b.tolist() for b in self.blocks],
            "r": self.r,
            "T": self.message_columns,
            "T_reading": "first n-r coordinates of each source block",
            "F(W)_reading": "G(W), the stacked global encodings of the wiretapped edges",
        }


def _check_plan_shape(base: LinearCode, plan: TransformPlan) -> None:
    if base.kappa != 0 or base.n != 1:
        raise ValueError("transform needs a keyless base code with one symbol per edge")
    if len(plan.blocks) != base.s or any(b.shape != (base.l, base.l) for b in plan.blocks):
        raise ValueError(f"plan needs {base.s} blocks of shape {(base.l, base.l)}")
    if not 0 <= plan.r < base.l:
        raise ValueError(f"need 0 <= r < {base.l}, got r={plan.r}")


def apply_transform(base: LinearCode, plan: TransformPlan) -> LinearCode:
    """Secure-form code: rows are re-read as (n - r) messages then r keys per source."""
    _check_plan_shape(base, plan)
    a = plan.matrix
    enc = {eid: a @ g for eid, g in base.encodings.items()}
    return LinearCode(base.q, base.l - plan.r, plan.r, 1, base.s, enc)


def check_transform(base: LinearCode, plan: TransformPlan, net: Network, r: int | None = None,
                    first_only: bool = True) -> tuple[bool, list[tuple[str, ...]]]:
    """span(A^{-1}_T) meets span(G(W)) only in 0 for every |W| = r."""
    r = plan.r if r is None else r
    if r != plan.r:
        raise ValueError("plan was built for a different security level")
    _check_plan_shape(base, plan)
    if r == 0:
        return True, []
    inv_t = plan.inverse_T()
    bad = []
    for w in sentinel.wiretap_sets(net, r):
        if not span_intersection_trivial(inv_t, base.stacked(w)):
            bad.append(w)
            if first_only:
                break
    return not bad, bad


def secure_transform(base: LinearCode, net: Network, r: int, attempts: int = 200,
                     seed: int = 0) -> tuple[LinearCode, TransformPlan] | None:
    """Search for a transform making ``base`` secure at level ``r``.

    All sources share one random invertible block, which keeps the sum
    decodable after the transform.  The identity is tried first.
    """
    if base.kappa != 0 or base.n != 1:
        raise ValueError("transform needs a keyless base code with one symbol per edge")
    if check_decodable(base, net) is None:
        raise ValueError("base code does not decode the sum")
    if not 0 <= r < base.l:
        raise ValueError(f"need 0 <= r < {base.l}, got r={r}")
    rng = np.random.default_rng(seed)
    f = base.field
    best = None
    for attempt in range(attempts):
        blk = FieldMatrix.identity(base.l, f) if attempt == 0 else random_invertible(base.l, f, rng)
        plan = TransformPlan((blk,) * base.s, r)
        ok, bad = check_transform(base, plan, net, first_only=False)
        if ok:
            code = apply_transform(base, plan)
            verdict = sentinel.sweep(code, net, r, sentinel.SECURE)
            assert verdict.passed, "transform condition and secure sweep disagree"
            assert check_decodable(code, net) is not None
            return code, plan
        best = len(bad) if best is None else min(best, len(bad))
    log.info("secure_transform: no plan after %d attempts; best plan failed on %s wiretap sets", attempts, best)
    return None


# ---------------------------------------------------------------------------
# exhaustive / randomized search

FOUND = "found"
EXHAUSTED = "exhausted"
BUDGET_EXCEEDED = "budget_exceeded"


@dataclass(frozen=True)
class SearchOutcome:
    mode: str
    params: dict
    result: str
    code: LinearCode | None = None
    stats: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_dict(self) -> dict:
        from .lincode import code_to_dict
        return {
            "mode": self.mode,
            "params": self.params,
            "result": self.result,
            "scope": "linear codes with the given (l, n, kappa, q) only",
            "code": code_to_dict(self.code) if self.code is not None else None,
            "stats": self.stats,
        }


@dataclass(frozen=True)
class _Space:
    edges: tuple[str, ...]
    shapes: tuple[tuple[int, int], ...]
    # W whose last edge (in enumeration order) is edges[k]
    checks: tuple[tuple[tuple[str, ...], ...], ...]

    def choices(self, q: int) -> list[int]:
        return [q ** (r * c) for r, c in self.shapes]


def _space(net: Network, l: int, kappa: int, n: int, r: int) -> _Space:
    edges = net.edges_topo
    shapes = []
    for eid in edges:
        tail = net.edge_by_id[eid].tail
        shapes.append((l + kappa if tail in net.source_index else len(net.in_edges[tail]) * n, n))
    pos = {e: k for k, e in enumerate(edges)}
    checks: list[list[tuple[str, ...]]] = [[] for _ in edges]
    if r > 0:
        for w in sentinel.wiretap_sets(net, r):
            checks[max(pos[e] for e in w)].append(w)
    return _Space(edges, tuple(shapes), tuple(tuple(c) for c in checks))


def _matrix_from_index(idx: int, shape: tuple[int, int], f: PrimeField) -> FieldMatrix:
    size = shape[0] * shape[1]
    digits = np.zeros(size, dtype=np.int64)
    for k in range(size - 1, -1, -1):
        idx, digits[k] = divmod(idx, f.q)
    return FieldMatrix._wrap(digits.reshape(shape), f)


class _Searcher:
    def __init__(self, net: Network, l: int, n: int, kappa: int, q: int, r: int, mode: str):
        self.net, self.l, self.n, self.kappa, self.r, self.mode = net, l, n, kappa, r, mode
        self.f = PrimeField(q)
        self.space = _space(net, l, kappa, n, r)
        self.blk = l + kappa
        self.dim = net.s * self.blk
        self.nodes = 0
        self.pruned = 0
        self.leaves = 0
        self._cache: dict[int, list[FieldMatrix]] = {}
        self.msg_rows = [i * self.blk + j for i in range(net.s) for j in range(l)]
        self.key_rows = [i * self.blk + l + j for i in range(net.s) for j in range(kappa)]
        p = np.zeros((self.dim, l), dtype=np.int64)
        for i, a in enumerate(net.coefficients):
            for j in range(l):
                p[i * self.blk + j, j] = a % q
        self.p = FieldMatrix(p, self.f)

    def options(self, k: int) -> Sequence[FieldMatrix]:
        if k not in self._cache:
            shape = self.space.shapes[k]
            count = self.f.q ** (shape[0] * shape[1])
            self._cache[k] = [_matrix_from_index(i, shape, self.f) for i in range(count)]
        return self._cache[k]

    def glob(self, k: int, theta: FieldMatrix, g: dict[str, FieldMatrix]) -> FieldMatrix:
        eid = self.space.edges[k]
        tail = self.net.edge_by_id[eid].tail
        i = self.net.source_index.get(tail)
        if i is not None:
            a = np.zeros((self.dim, self.n), dtype=np.int64)
            a[i * self.blk:(i + 1) * self.blk] = theta.array
            return FieldMatrix._wrap(a, self.f)
        return hstack([g[d] for d in self.net.in_edges[tail]]) @ theta

    def code(self, g: dict[str, FieldMatrix]) -> LinearCode:
        return LinearCode(self.f.q, self.l, self.kappa, self.n, self.net.s, {e: g[e] for e in self.net.edge_ids})

    def secure_so_far(self, k: int, g: dict[str, FieldMatrix]) -> bool:
        for w in self.space.checks[k]:
            gw = hstack([g[e] for e in w])
            if self.mode == sentinel.SECURE:
                if sentinel.leaks_secure(gw, self.msg_rows, self.key_rows):
                    return False
            elif sentinel.leaks_user(self.p, gw):
                return False
        return True

    def dfs(self, k: int, g: dict[str, FieldMatrix]) -> LinearCode | None:
        if k == len(self.space.edges):
            self.leaves += 1
            code = self.code(g)
            return code if check_decodable(code, self.net) is not None else None
        eid = self.space.edges[k]
        for theta in self.options(k):
            self.nodes += 1
            g[eid] = self.glob(k, theta, g)
            if self.space.checks[k] and not self.secure_so_far(k, g):
                self.pruned += 1
                continue
            hit = self.dfs(k + 1, g)
            if hit is not None:
                return hit
        g.pop(eid, None)
        return None

    def run_prefix(self, prefix: Sequence[int]) -> LinearCode | None:
        g: dict[str, FieldMatrix] = {}
        for k, idx in enumerate(prefix):
            theta = self.options(k)[idx]
            self.nodes += 1
            g[self.space.edges[k]] = self.glob(k, theta, g)
            if self.space.checks[k] and not self.secure_so_far(k, g):
                self.pruned += 1
                return None
        return self.dfs(len(prefix), g)


def _chunk_worker(args) -> tuple[int, dict | None, int, int, int]:
    net, l, n, kappa, q, r, mode, chunk_id, prefixes = args
    s = _Searcher(net, l, n, kappa, q, r, mode)
    for prefix in prefixes:
        hit = s.run_prefix(prefix)
        if hit is not None:
            from .lincode import code_to_dict
            return chunk_id, code_to_dict(hit), s.nodes, s.pruned, s.leaves
    return chunk_id, None, s.nodes, s.pruned, s.leaves


def search_space_size(net: Network, l: int, n: int, kappa: int, q: int) -> int:
    return math.prod(_space(net, l, kappa, n, 0).choices(q))


def exhaustive_search(net: Network, l: int, n: int, kappa: int, q: int, r: int, mode: str,
                      budget: int = 1 << 22, seed: int = 0, strategy: str = "exhaustive",
                      workers: int | None = None) -> SearchOutcome:
    """Look for a linear (l, n) code with key length ``kappa`` over F_q that
    decodes the sum and satisfies ``mode`` at level ``r``.

    The exhaustive strategy walks local encoders in topological edge order and
    prunes a branch as soon as a fully assigned wiretap set leaks; pruning
    never discards a valid code, so ``exhausted`` is exact.  The randomized
    strategy samples ``budget`` codes and never reports ``exhausted``.
    """
    if mode not in sentinel.MODES:
        raise ValueError(f"unknown mode {mode!r}")
    net = net.with_field(q) if q != net.field_q else net
    params = {"l": l, "n": n, "kappa": kappa, "q": q, "r": r, "strategy": strategy,
              "budget": budget, "seed": seed}
    total = search_space_size(net, l, n, kappa, q)
    t0 = time.perf_counter()
    if strategy == "randomized":
        return _randomized(net, l, n, kappa, q, r, mode, budget, seed, params, total, t0)
    if strategy != "exhaustive":
        raise ValueError(f"unknown strategy {strategy!r}")
    if total > budget:
        return SearchOutcome(mode, params, BUDGET_EXCEEDED, None, {"space": total}, time.perf_counter() - t0)

    workers = workers or os.cpu_count() or 1
    probe = _Searcher(net, l, n, kappa, q, r, mode)
    choices = probe.space.choices(q)
    depth, width = 0, 1
    while depth < len(choices) and width < 8 * workers:
        width *= choices[depth]
        depth += 1
    prefixes = list(itertools.product(*(range(c) for c in choices[:depth])))
    n_chunks = min(len(prefixes), 4 * workers) or 1
    size = math.ceil(len(prefixes) / n_chunks)
    chunks = [prefixes[i:i + size] for i in range(0, len(prefixes), size)] or [[()]]
    jobs = [(net, l, n, kappa, q, r, mode, cid, ch) for cid, ch in enumerate(chunks)]

    nodes = pruned = leaves = 0
    found = None
    if workers == 1:
        for job in jobs:
            _, hit, a, b, c = _chunk_worker(job)
            nodes, pruned, leaves = nodes + a, pruned + b, leaves + c
            if hit is not None:
                found = hit
                break
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            # map preserves chunk order, so the first hit is the first in enumeration order
            for _, hit, a, b, c in pool.map(_chunk_worker, jobs):
                nodes, pruned, leaves = nodes + a, pruned + b, leaves + c
                if hit is not None:
                    found = hit
                    pool.shutdown(wait=False, cancel_futures=True)
                    break
    stats = {"space": total, "nodes_visited": nodes, "pruned": pruned, "complete_codes": leaves}
    elapsed = time.perf_counter() - t0
    if found is not None:
        from .lincode import code_from_dict
        return SearchOutcome(mode, params, FOUND, code_from_dict(found), stats, elapsed)
    return SearchOutcome(mode, params, EXHAUSTED, None, stats, elapsed)


def _randomized(net, l, n, kappa, q, r, mode, budget, seed, params, total, t0) -> SearchOutcome:
    rng = np.random.default_rng(seed)
    for k in range(budget):
        code = random_code(net, l, kappa, n, q, rng)
        if check_decodable(code, net) is None:
            continue
        if sentinel.sweep(code, net, r, mode, stop_at_first=True).passed:
            return SearchOutcome(mode, params, FOUND, code, {"space": total, "samples": k + 1},
                                 time.perf_counter() - t0)
    return SearchOutcome(mode, params, BUDGET_EXCEEDED, None, {"space": total, "samples": budget},
                         time.perf_counter() - t0)


def iter_random_plans(base: LinearCode, r: int, rng: np.random.Generator, shared: bool = True) -> Iterator[TransformPlan]:
    f = base.field
    while True:
        if shared:
            blk = random_invertible(base.l, f, rng)
            yield TransformPlan((blk,) * base.s, r)
        else:
            yield TransformPlan(tuple(random_invertible(base.l, f, rng) for _ in range(base.s)), r)
