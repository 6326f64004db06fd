from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import netgen
from sumnet import cutlab, forge, sentinel
from sumnet.builtins import fig2, reverse_butterfly
from sumnet.galois import FieldMatrix
from sumnet.lincode import check_decodable, check_local, code_from_columns
from sumnet.netmodel import build_network


def carried(code, net):
    """Edges with a nonzero encoding."""
    return {e for e in net.edge_ids if not code.encodings[e].is_zero()}


def assert_valid(code, net):
    assert check_local(code, net)
    assert check_decodable(code, net) is not None


def tree3():
    edges = [(f"e{i}", "s1", "rho") for i in (1, 2, 3)] + [(f"e{i}", "s2", "v") for i in (4, 5, 6)]
    edges += [(f"e{i}", "v", "rho") for i in (7, 8, 9)]
    return build_network(257, edges, ["s1", "s2"], "rho")


def test_routing_examples():
    net = fig2()
    code = forge.build_routing_user_secure(net)
    assert carried(code, net) == {"e1", "e4"}
    assert_valid(code, net)
    assert sentinel.sweep(code, net, 1, sentinel.USER_SECURE).passed
    rb = reverse_butterfly()
    code = forge.build_routing_user_secure(rb)
    assert carried(code, rb) == {"e1", "e8", "e4", "e9"}
    assert sentinel.sweep(code, rb, 1, sentinel.USER_SECURE).passed
    single = build_network(2, [("e1", "s1", "a"), ("e2", "a", "rho")], ["s1"], "rho")
    code = forge.build_routing_user_secure(single)
    assert_valid(code, single)
    assert not sentinel.sweep(code, single, 1, sentinel.USER_SECURE).passed


@pytest.mark.parametrize("factory", [fig2, reverse_butterfly])
def test_routing_boundary(factory):
    net = factory()
    b = min(cutlab.compute_C_min(net), net.s)
    code = forge.build_routing_user_secure(net)
    for r in range(b):
        assert sentinel.sweep(code, net, r, sentinel.USER_SECURE).passed
    assert not sentinel.sweep(code, net, b, sentinel.USER_SECURE).passed


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_routing_exists_below_boundary(seed):
    net = netgen.random_dag(np.random.default_rng(seed), 2, max_edges=7)
    b = min(cutlab.compute_C_min(net), net.s)
    for r in range(b):
        code = forge.build_routing_user_secure(net, r)
        assert_valid(code, net)
        assert sentinel.sweep(code, net, r, sentinel.USER_SECURE).passed


def test_base_sum_code():
    net = fig2()
    code = forge.build_base_sum_code(net, 2)
    assert code.l == 2 and code.kappa == 0
    assert_valid(code, net.with_field(code.q))
    assert forge.build_base_sum_code(net, 1) is not None
    with pytest.raises(ValueError):
        forge.build_base_sum_code(net, 3)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_base_sum_code_on_random_networks(seed):
    net = netgen.random_dag(np.random.default_rng(seed), 5, max_edges=8, coefficients=True)
    l = cutlab.compute_C_min(net)
    code = forge.build_base_sum_code(net, l, seed=seed % 1000)
    assert code is not None
    assert_valid(code, net.with_field(code.q))


def test_secure_transform_on_tree():
    net = tree3()
    base = forge.build_base_sum_code(net, 3)
    code, plan = forge.secure_transform(base, net, 1)
    assert (code.l, code.kappa, code.rate) == (2, 1, 2)
    assert sentinel.sweep(code, net, 1, sentinel.SECURE).passed
    assert_valid(code, net)
    assert forge.check_transform(base, plan, net)[0]
    assert sentinel.truncated_sum_condition(code, net, cutlab.cut_catalog(net))[0]
    meta = plan.to_dict()
    assert meta["T"] == [0, 1, 3, 4] and "G(W)" in meta["F(W)_reading"]


def test_secure_transform_edge_cases():
    net = tree3()
    base = forge.build_base_sum_code(net, 3)
    code, plan = forge.secure_transform(base, net, 0)
    assert code == base and plan.blocks[0] == FieldMatrix.identity(3, base.q)
    fbase = forge.build_base_sum_code(fig2(), 2)
    with pytest.raises(ValueError):
        forge.secure_transform(fbase, fig2().with_field(fbase.q), 2)


def test_check_transform_identity_plans():
    net = build_network(3, [("e1", "s1", "rho"), ("e2", "s1", "rho")], ["s1"], "rho")
    base = code_from_columns(3, 2, 0, 1, {"e1": [1, 0], "e2": [0, 1]})
    ident = FieldMatrix.identity(2, 3)
    assert forge.check_transform(base, forge.TransformPlan((ident,), 0), net)[0]
    ok, bad = forge.check_transform(base, forge.TransformPlan((ident,), 1), net)
    assert not ok and bad == [("e1",)]
    assert not sentinel.sweep(forge.apply_transform(base, forge.TransformPlan((ident,), 1)), net, 1,
                              sentinel.SECURE).passed


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_transform_outputs_satisfy_necessary_condition(seed):
    rng = np.random.default_rng(seed)
    net = netgen.random_tree(rng, 257, min_sources=2)
    c = cutlab.compute_C_min(net)
    base = forge.build_base_sum_code(net, c, seed=seed % 1000)
    r = int(rng.integers(0, c))
    code, _ = forge.secure_transform(base, net, r, seed=seed % 1000)
    assert code.l == c - r
    assert_valid(code, net)
    assert sentinel.truncated_sum_condition(code, net, cutlab.cut_catalog(net))[0]


def test_search_examples():
    net = fig2()
    out = forge.exhaustive_search(net, 1, 1, 0, 2, 2, sentinel.USER_SECURE, workers=1)
    assert out.result == forge.EXHAUSTED and out.code is None
    hit = forge.exhaustive_search(net, 1, 1, 0, 2, 1, sentinel.USER_SECURE, workers=1)
    assert hit.result == forge.FOUND
    assert_valid(hit.code, net)
    assert sentinel.sweep(hit.code, net, 1, sentinel.USER_SECURE).passed
    assert forge.exhaustive_search(net, 3, 1, 0, 2, 1, sentinel.SECURE, budget=10).result == forge.BUDGET_EXCEEDED


def test_search_is_deterministic_and_worker_independent():
    net = fig2()
    a = forge.exhaustive_search(net, 1, 1, 1, 2, 1, sentinel.SECURE, workers=1)
    b = forge.exhaustive_search(net, 1, 1, 1, 2, 1, sentinel.SECURE, workers=2)
    assert a.result == b.result and a.code == b.code
    assert a.to_dict() == forge.exhaustive_search(net, 1, 1, 1, 2, 1, sentinel.SECURE, workers=1).to_dict()


def test_randomized_search_never_exhausts():
    net = fig2()
    out = forge.exhaustive_search(net, 1, 1, 0, 2, 2, sentinel.USER_SECURE, budget=30, strategy="randomized")
    assert out.result == forge.BUDGET_EXCEEDED
    found = forge.exhaustive_search(net, 1, 1, 0, 2, 1, sentinel.USER_SECURE, budget=200, seed=3,
                                    strategy="randomized")
    assert found.result == forge.FOUND
    again = forge.exhaustive_search(net, 1, 1, 0, 2, 1, sentinel.USER_SECURE, budget=200, seed=3,
                                    strategy="randomized")
    assert found.to_dict() == again.to_dict()
