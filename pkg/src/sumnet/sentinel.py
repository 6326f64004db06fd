"""Security verification of linear codes against a wiretapper of level r.

For a uniform input row vector U the wiretapper sees U @ G(W).  The secure
condition holds iff the message rows of G(W) lie in the row space of its key
rows (the observation is then a uniform coset independent of the messages).
The user-secure condition holds iff the column spaces of the target map P and
G(W) meet only in zero.  ``entropy_oracle`` checks both by enumeration.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .cutlab import CutCatalog
from .galois import FieldMatrix, hstack, nullspace, rank, rowspace_contained, solve_right, span_intersection_trivial
from .lincode import LinearCode, target_matrix, truncate
from .netmodel import Network

SECURE = "secure"
USER_SECURE = "user_secure"
MODES = (SECURE, USER_SECURE)

DEFAULT_ORACLE_BUDGET = 1 << 24
DEFAULT_SWEEP_BUDGET = 1 << 20


class BudgetExceeded(RuntimeError):
    """Raised instead of silently sampling when an enumeration is too large."""


@dataclass(frozen=True)
class WiretapModel:
    r: int

    def __post_init__(self) -> None:
        if self.r < 0:
            raise ValueError("security level must be nonnegative")


@dataclass(frozen=True)
class Leak:
    """Y_W @ observe equals x_flat @ reveals for every input, and reveals is a
    nonzero functional of the protected quantity."""

    observe: tuple[int, ...]
    reveals: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"observe": list(self.observe), "reveals": list(self.reveals)}


@dataclass(frozen=True)
class Check:
    passed: bool
    leak: Leak | None = None

    def __bool__(self) -> bool:
        return self.passed


@dataclass(frozen=True)
class Violation:
    wiretap: tuple[str, ...]
    leak: Leak

    def to_dict(self) -> dict:
        return {"W": list(self.wiretap), **self.leak.to_dict()}


@dataclass(frozen=True)
class SecurityVerdict:
    mode: str
    r: int
    checked: int
    violations: tuple[Violation, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "r": self.r,
            "passed": self.passed,
            "wiretap_sets_checked": self.checked,
            "violations": [v.to_dict() for v in self.violations],
        }


def _message_part(code: LinearCode, m: FieldMatrix) -> FieldMatrix:
    return m.select_rows(code.message_rows())


def _key_part(code: LinearCode, m: FieldMatrix) -> FieldMatrix:
    return m.select_rows(code.key_rows())


def secure_check(code: LinearCode, w: Iterable[str]) -> Check:
    """I(M_S; Y_W) = 0 for a linear code, decided algebraically."""
    g = code.stacked(list(w))
    if g.cols == 0:
        return Check(True)
    msg = _message_part(code, g)
    if msg.is_zero():
        return Check(True)
    key = _key_part(code, g)
    # rowspace(msg) in rowspace(key)  <=>  null(key) in null(msg)
    basis = nullspace(key) if key.rows else FieldMatrix.identity(g.cols, code.field)
    for j in range(basis.cols):
        b = basis.select_cols([j])
        a = msg @ b
        if not a.is_zero():
            reveals = np.zeros(code.dim, dtype=np.int64)
            reveals[code.message_rows()] = a.array[:, 0]
            return Check(False, Leak(tuple(b.entries), tuple(int(v) for v in reveals)))
    return Check(True)


def user_secure_check(code: LinearCode, net: Network, w: Iterable[str]) -> Check:
    """I(f(M_S); Y_W) = 0 for a linear code, decided algebraically."""
    g = code.stacked(list(w))
    if g.cols == 0:
        return Check(True)
    p = target_matrix(code, [a % code.q for a in net.coefficients])
    if span_intersection_trivial(p, g):
        return Check(True)
    # a null vector (a, b) of [P | -G] with P a != 0 names the leak
    basis = nullspace(hstack([p, -g]))
    for j in range(basis.cols):
        col = basis.select_cols([j])
        a = col.select_rows(range(p.cols))
        b = col.select_rows(range(p.cols, p.cols + g.cols))
        pa = p @ a
        if not pa.is_zero():
            return Check(False, Leak(tuple(b.entries), tuple(pa.entries)))
    raise AssertionError("rank test and null space disagree")


def leaks_secure(g: FieldMatrix, message_rows: Sequence[int], key_rows: Sequence[int]) -> bool:
    """Rank form of the secure test on a stacked wiretap matrix."""
    msg = g.select_rows(message_rows)
    if g.cols == 0 or msg.is_zero():
        return False
    if not key_rows:
        return True
    return not rowspace_contained(msg.T, g.select_rows(key_rows).T)


def leaks_user(p: FieldMatrix, g: FieldMatrix) -> bool:
    """Rank form of the user-secure test."""
    return g.cols > 0 and not g.is_zero() and not span_intersection_trivial(p, g)


def check(code: LinearCode, net: Network, w: Iterable[str], mode: str) -> Check:
    if mode == SECURE:
        return secure_check(code, w)
    if mode == USER_SECURE:
        return user_secure_check(code, net, w)
    raise ValueError(f"unknown mode {mode!r}")


def wiretap_sets(net: Network, r: int) -> Iterable[tuple[str, ...]]:
    """All edge subsets of size exactly min(r, |E|), in lexicographic edge order."""
    k = min(r, len(net.edges))
    return itertools.combinations(net.edge_ids, k)


def sweep(code: LinearCode, net: Network, model: WiretapModel | int, mode: str,
          budget: int = DEFAULT_SWEEP_BUDGET, stop_at_first: bool = False) -> SecurityVerdict:
    """Check every wiretap set of size r; subsets are covered by monotonicity."""
    r = model.r if isinstance(model, WiretapModel) else int(model)
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if r == 0:
        return SecurityVerdict(mode, r, 0)
    total = math.comb(len(net.edges), min(r, len(net.edges)))
    if total > budget:
        raise BudgetExceeded(f"{total} wiretap sets exceed the sweep budget {budget}")
    violations = []
    for w in wiretap_sets(net, r):
        res = check(code, net, w, mode)
        if not res.passed:
            violations.append(Violation(w, res.leak))
            if stop_at_first:
                break
    return SecurityVerdict(mode, r, total, tuple(violations))


def _encode(rows: np.ndarray, q: int) -> np.ndarray:
    # base-q integer per row; exact while q**cols < 2**63
    out = np.zeros(rows.shape[0], dtype=np.int64)
    for c in range(rows.shape[1]):
        out = out * q + rows[:, c]
    return out


def _exact_log(x: Fraction, q: int) -> int | None:
    """k with q**k == x, or None."""
    k = 0
    num, den = x.numerator, x.denominator
    while num % q == 0 and num > 1:
        num //= q
        k += 1
    while den % q == 0 and den > 1:
        den //= q
        k -= 1
    return k if num == 1 and den == 1 else None


def entropy_oracle(code: LinearCode, net: Network, w: Sequence[str], target: str = "sum",
                   budget: int = DEFAULT_ORACLE_BUDGET, chunk: int = 1 << 16) -> Fraction | float:
    """I(target; Y_W) in units of log q by enumerating every input.

    ``target`` is "all_messages" or "sum".  Returns an exact Fraction whenever
    every likelihood ratio is a power of q, which always holds for linear
    codes; otherwise a float.
    """
    if target not in ("all_messages", "sum"):
        raise ValueError(f"unknown target {target!r}")
    q, dim = code.q, code.dim
    states = q ** dim
    if states > budget:
        raise BudgetExceeded(f"{states} realizations exceed the oracle budget {budget}")
    g = code.stacked(list(w)).array
    msg_cols = [[i * code.block + j for j in range(code.l)] for i in range(code.s)]
    coeffs = [a % q for a in net.coefficients]
    joint: Counter = Counter()
    for start in range(0, states, chunk):
        idx = np.arange(start, min(start + chunk, states), dtype=np.int64)
        u = np.empty((idx.size, dim), dtype=np.int64)
        rest = idx.copy()
        for c in range(dim - 1, -1, -1):
            u[:, c] = rest % q
            rest //= q
        if target == "sum":
            t = _encode(sum(a * u[:, cols] for a, cols in zip(coeffs, msg_cols)) % q, q)
        else:
            t = _encode(u[:, [c for cols in msg_cols for c in cols]], q)
        y = _encode((u @ g) % q, q) if g.shape[1] else np.zeros(idx.size, dtype=np.int64)
        pairs, counts = np.unique(np.stack([t, y], axis=1), axis=0, return_counts=True)
        for (ti, yi), c in zip(pairs.tolist(), counts.tolist()):
            joint[(ti, yi)] += c
    pt: Counter = Counter()
    py: Counter = Counter()
    for (ti, yi), c in joint.items():
        pt[ti] += c
        py[yi] += c
    total = Fraction(0)
    exact = True
    approx = 0.0
    for (ti, yi), c in joint.items():
        ratio = Fraction(c * states, pt[ti] * py[yi])
        k = _exact_log(ratio, q)
        if k is None:
            exact = False
        else:
            total += Fraction(c, states) * k
        approx += c / states * math.log(float(ratio), q)
    return total if exact else approx


def truncated_sum_check(code: LinearCode, net: Network, cut: Iterable[str], separated: Iterable[str]) -> bool:
    """Is the sum of the separated sources' messages decodable from the cut,
    with the code truncated to those sources?"""
    keep = [net.source_index[v] for v in separated]
    cut = list(cut)
    t = truncate(code, keep)
    g = t.stacked(cut)
    target = target_matrix(code, [a % code.q for a in net.coefficients], keep)
    return solve_right(g, target) is not None


def truncated_sum_condition(code: LinearCode, net: Network, catalog: CutCatalog) -> tuple[bool, tuple[str, ...] | None]:
    """Necessary condition for linear secure codes, over every cut in ``catalog``.

    Returns (True, None) or (False, first offending cut).
    """
    for rep in catalog.reports:
        if not truncated_sum_check(code, net, rep.cut, rep.separated):
            return False, rep.cut
    return True, None


def leak_rank(code: LinearCode, net: Network, w: Sequence[str], target: str = "sum") -> int:
    """Algebraic I(target; Y_W) in log-q units: rank(T) + rank(G) - rank([T | G])."""
    g = code.stacked(list(w))
    if target == "sum":
        t = target_matrix(code, [a % code.q for a in net.coefficients])
    else:
        cols = np.zeros((code.dim, code.s * code.l), dtype=np.int64)
        for c, row in enumerate(code.message_rows()):
            cols[row, c] = 1
        t = FieldMatrix(cols, code.q)
    return rank(t) + rank(g) - rank(hstack([t, g]))
