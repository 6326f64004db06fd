from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import netgen
from sumnet import bounds, cutlab, forge, sentinel
from sumnet.builtins import fig1_reconstruction, fig2, reverse_butterfly
from sumnet.netmodel import build_network


def test_fig1_secure_bounds():
    r1 = bounds.secure_bounds(fig1_reconstruction(), 1)
    r2 = bounds.secure_bounds(fig1_reconstruction(), 2)
    assert (r1.C_min, r1.D_min, r1.A_min) == (1, 3, 2)
    assert r1.improved_upper == 1 and r1.guang_upper == 1
    assert r2.improved_upper == 0 and r2.guang_upper == 1
    assert r2.exact_secure_capacity == 0 and not r2.is_multi_edge_tree


@pytest.mark.parametrize("factory, r, exists, upper", [
    (fig2, 1, True, 2),
    (fig2, 2, False, 0),
    (reverse_butterfly, 1, True, 1),
])
def test_user_secure_bounds(factory, r, exists, upper):
    rep = bounds.user_secure_bounds(factory(), r)
    assert rep.user_secure_exists is exists and rep.user_secure_upper == upper


def test_tree_capacity():
    two = build_network(7, [(f"e{i}", "s1" if i <= 3 else "s2", "rho") for i in range(1, 7)], ["s1", "s2"], "rho")
    assert bounds.tree_capacity(two, 1) == 2
    assert bounds.tree_capacity(fig2(), 1) is None
    chain = build_network(2, [("e1", "s1", "a"), ("e2", "a", "rho")], ["s1"], "rho")
    assert bounds.tree_capacity(chain, 1) == 0


def test_report_serializes():
    rep = bounds.analyze(fig1_reconstruction(), 2)
    doc = json.loads(json.dumps(rep.to_dict()))
    assert doc["witnesses"]["A_min"] == {"cut": ["e7"], "I_C": ["s1"], "J_C": ["s2"], "B_hat": ["e4"],
                                         "A": ["e4", "e7"], "size_C": 1, "size_A": 2}
    assert doc["secure_gap"] is False
    assert "user secure:" not in rep.to_text("secure")
    with pytest.raises(ValueError):
        bounds.analyze(fig2(), -1)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 4))
def test_bound_ordering(seed, r):
    n = netgen.random_dag(np.random.default_rng(seed), 2, max_edges=8)
    rep = bounds.analyze(n, r)
    assert rep.improved_upper <= rep.guang_upper
    assert rep.lower <= rep.improved_upper
    assert rep.user_secure_upper <= rep.C_min


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 4))
def test_trees_are_closed(seed, r):
    n = netgen.random_tree(np.random.default_rng(seed), 2, mult=(1, 3))
    rep = bounds.analyze(n, r)
    assert rep.A_min == rep.C_min
    assert rep.exact_secure_capacity == max(0, rep.C_min - r) == bounds.tree_capacity(n, r)


@pytest.mark.parametrize("factory", [fig2, reverse_butterfly])
def test_no_user_secure_code_when_bound_says_none(factory):
    net = factory()
    r = min(cutlab.compute_C_min(net), net.s)
    assert not bounds.analyze(net, r).user_secure_exists
    out = forge.exhaustive_search(net, 1, 1, 0, 2, r, sentinel.USER_SECURE, workers=1)
    assert out.result == forge.EXHAUSTED


def test_user_secure_code_beyond_c_min_when_min_cut_is_not_shared():
    # Two sources with one direct edge each: C_min = 1 < s = 2.  Routing x and y
    # separately decodes x + y, and a single edge is independent of the sum, so a
    # user-secure code exists at r = C_min even though the existence bound says none.
    net = build_network(2, [("e1", "s1", "rho"), ("e2", "s2", "rho")], ["s1", "s2"], "rho")
    assert not bounds.analyze(net, 1).user_secure_exists
    code = forge.partial_sum_code(net, [("e1",), ("e2",)])
    assert sentinel.sweep(code, net, 1, sentinel.USER_SECURE).passed
    assert all(sentinel.entropy_oracle(code, net, [e], "sum") == 0 for e in net.edge_ids)
    out = forge.exhaustive_search(fig1_reconstruction(), 1, 1, 0, 2, 1, sentinel.USER_SECURE, workers=1)
    assert out.result == forge.FOUND
