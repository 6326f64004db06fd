from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import netgen
from sumnet.builtins import fig2, get_network, NETWORKS
from sumnet.netmodel import (NetworkError, build_network, normalize_to_sum, parse_network, reachability,
                             serialize_network)


def test_fig2_shape():
    n = fig2()
    assert n.s == 2 and len(n.edges) == 5 and n.field_q == 2 and n.coefficients == (1, 1)
    assert n.in_edges["rho"] == ("e1", "e4", "e5")


def test_single_edge_network():
    n = build_network(2, [("e1", "s1", "rho")], ["s1"], "rho")
    assert n.s == 1 and n.edges_topo == ("e1",)


def doc(**overrides):
    d = {"field_q": 2, "nodes": ["s1", "rho"], "edges": [{"id": "e1", "tail": "s1", "head": "rho"}],
         "sources": [{"node": "s1", "coeff": 1}], "sink": "rho"}
    d.update(overrides)
    return json.dumps(d)


@pytest.mark.parametrize("text, fragment", [
    (doc(edges=[{"id": "e1", "tail": "rho", "head": "s1"}]), "in-edge"),
    (doc(field_q=4), "prime"),
    (doc(sources=[{"node": "s1", "coeff": 2}]), "coefficient"),
    ("{not json", "syntax"),
    (doc(edges=[{"id": "e1", "tail": "s1"}]), "malformed"),
])
def test_parse_rejects(text, fragment):
    with pytest.raises(NetworkError, match=fragment):
        parse_network(text)


@pytest.mark.parametrize("edges, fragment", [
    ([("e1", "s1", "a"), ("e2", "a", "b"), ("e3", "b", "a"), ("e4", "a", "rho")], "cycl"),
    ([("e1", "s1", "rho"), ("e2", "a", "rho")], "unreachable"),
    ([("e1", "s1", "rho"), ("e2", "s1", "a")], "dead end"),
    ([("e1", "s1", "rho"), ("e1", "s1", "rho")], "duplicate"),
    ([("e1", "s1", "s1"), ("e2", "s1", "rho")], "self-loop"),
])
def test_validation_rejects(edges, fragment):
    with pytest.raises(NetworkError, match=fragment):
        build_network(3, edges, ["s1"], "rho")


def test_parallel_edges_allowed():
    n = build_network(2, [("a", "s1", "rho"), ("b", "s1", "rho")], ["s1"], "rho")
    assert n.out_edges["s1"] == ("a", "b")


def test_normalize_to_sum():
    n = fig2()
    assert normalize_to_sum(n) is n
    m = build_network(3, [("e1", "s1", "rho"), ("e2", "s2", "rho")], ["s1", "s2"], "rho", [2, 1])
    m2 = normalize_to_sum(m)
    assert m2.coefficients == (1, 1) and m2.scaling == (2, 1)
    assert normalize_to_sum(m2) == m2
    k = build_network(7, [(f"e{i}", f"s{i}", "rho") for i in (1, 2, 3)], ["s1", "s2", "s3"], "rho", [3, 4, 5])
    assert normalize_to_sum(k).coefficients == (1, 1, 1)


def test_reachability_examples():
    n = fig2()
    assert reachability(n, ["s2"]) == (frozenset({"s2", "v", "rho"}), frozenset({"e3", "e4", "e5"}))
    assert reachability(n, ["rho"]) == (frozenset({"rho"}), frozenset())
    for name in NETWORKS:
        net = get_network(name)
        nodes, edges = reachability(net, net.sources)
        assert nodes == frozenset(net.nodes) and edges == frozenset(net.edge_ids)


def test_serialization_is_stable():
    text = serialize_network(fig2())
    assert list(json.loads(text)) == ["field_q", "nodes", "edges", "sources", "sink"]
    assert serialize_network(parse_network(text)) == text


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3, 5]))
def test_round_trip(seed, q):
    n = netgen.random_dag(np.random.default_rng(seed), q, max_edges=8, coefficients=True)
    assert parse_network(serialize_network(n)) == n


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.data())
def test_reachability_monotone(seed, data):
    n = netgen.random_dag(np.random.default_rng(seed), 2, max_edges=8)
    small = data.draw(st.sets(st.sampled_from(n.nodes), max_size=2))
    big = small | data.draw(st.sets(st.sampled_from(n.nodes), max_size=2))
    a_nodes, a_edges = reachability(n, small)
    b_nodes, b_edges = reachability(n, big)
    assert a_nodes <= b_nodes and a_edges <= b_edges
