from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import netgen
from sumnet.builtins import example2_code, fig2
from sumnet.forge import random_code
from sumnet.galois import FieldMatrix
from sumnet.lincode import (CodeError, LinearCode, check_decodable, check_local, check_shapes, code_from_columns,
                            decode, evaluate, parse_code, serialize_code, truncate)
from sumnet.netmodel import Realization, build_network


def real(msgs, keys=None):
    keys = keys if keys is not None else [()] * len(msgs)
    return Realization(tuple(map(tuple, msgs)), tuple(map(tuple, keys)))


def random_realization(code: LinearCode, rng) -> Realization:
    m = rng.integers(0, code.q, size=(code.s, code.l))
    k = rng.integers(0, code.q, size=(code.s, code.kappa))
    return real(m.tolist(), k.tolist())


def sample_code(seed: int, q: int = 3):
    rng = np.random.default_rng(seed)
    net = netgen.random_dag(rng, q, max_edges=6, coefficients=True)
    l = int(rng.integers(1, 3))
    kappa = int(rng.integers(0, 2))
    return net, random_code(net, l, kappa, int(rng.integers(1, 3)), q, rng), rng


def test_evaluate_example():
    code, net = example2_code(), fig2()
    assert evaluate(code, net, real([(1, 0), (0, 1)])) == {"e1": (1,), "e2": (0,), "e3": (0,), "e4": (1,), "e5": (0,)}
    assert all(v == (0,) for v in evaluate(code, net, real([(0, 0), (0, 0)])).values())


def test_check_local_examples():
    code, net = example2_code(), fig2()
    assert check_local(code, net)
    enc = dict(code.encodings)
    enc["e5"] = FieldMatrix.column([1, 0, 0, 0], 2)
    bad = check_local(LinearCode(2, 2, 0, 1, 2, enc), net)
    assert not bad and bad.edge == "e5"
    direct = build_network(2, [("e1", "s1", "rho"), ("e2", "s2", "rho")], ["s1", "s2"], "rho")
    assert check_local(code_from_columns(2, 1, 0, 2, {"e1": [1, 0], "e2": [0, 0]}), direct)


def test_check_decodable_examples():
    code, net = example2_code(), fig2()
    d = check_decodable(code, net)
    assert d.tolist() == [[1, 0], [0, 1], [1, 1]]
    # no edge into rho carries anything of source 1
    enc = dict(code.encodings)
    enc["e1"] = FieldMatrix.column([0, 0, 0, 0], 2)
    enc["e5"] = FieldMatrix.column([0, 0, 1, 0], 2)
    assert check_decodable(LinearCode(2, 2, 0, 1, 2, enc), net) is None
    single = build_network(2, [("e1", "s1", "rho")], ["s1"], "rho")
    assert check_decodable(code_from_columns(2, 1, 0, 1, {"e1": [1]}), single).tolist() == [[1]]


def test_truncate_examples():
    code = example2_code()
    t = truncate(code, [0])
    assert t.encodings["e5"].entries == (0, 1, 0, 0)
    assert truncate(code, [0, 1]) == code
    assert truncate(truncate(code, [0, 1]), [1]) == truncate(code, [1])


def test_shape_errors():
    code = example2_code()
    with pytest.raises(CodeError, match="F_2"):
        check_shapes(code, fig2().with_field(3))
    with pytest.raises(CodeError, match="shape"):
        LinearCode(2, 2, 0, 1, 2, {"e1": FieldMatrix.column([1, 0, 0], 2)})
    enc = dict(code.encodings)
    enc["e1"] = FieldMatrix.column([1, 0, 1, 0], 2)
    with pytest.raises(CodeError, match="another source"):
        check_shapes(LinearCode(2, 2, 0, 1, 2, enc), fig2())
    with pytest.raises(CodeError):
        parse_code('{"q": 2}')


def test_serialization_round_trip():
    code = example2_code()
    text = serialize_code(code)
    assert parse_code(text) == code and serialize_code(parse_code(text)) == text


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_evaluate_is_linear(seed):
    net, code, rng = sample_code(seed)
    a, b = random_realization(code, rng), random_realization(code, rng)
    c = int(rng.integers(0, code.q))
    ea, eb = evaluate(code, net, a), evaluate(code, net, b)
    both = real((np.add(a.messages, b.messages) % code.q).tolist(), (np.add(a.keys, b.keys) % code.q).tolist())
    scaled = real((np.multiply(a.messages, c) % code.q).tolist(), (np.multiply(a.keys, c) % code.q).tolist())
    e_both, e_scaled = evaluate(code, net, both), evaluate(code, net, scaled)
    for eid in net.edge_ids:
        assert e_both[eid] == tuple((np.add(ea[eid], eb[eid]) % code.q).tolist())
        assert e_scaled[eid] == tuple((np.multiply(ea[eid], c) % code.q).tolist())


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_decoder_reproduces_the_sum(seed):
    rng = np.random.default_rng(seed)
    net = netgen.random_dag(rng, 5, max_edges=6, coefficients=True)
    for _ in range(50):
        code = random_code(net, 1, int(rng.integers(0, 2)), 1, 5, rng)
        d = check_decodable(code, net)
        if d is not None:
            break
    else:
        return
    assert check_local(code, net)
    for _ in range(200):
        x = random_realization(code, rng)
        got = decode(code, net, d, evaluate(code, net, x))
        want = sum(a * np.array(m) for a, m in zip(net.coefficients, x.messages)) % code.q
        assert got == tuple(want.tolist())


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_truncate_matches_zeroed_realization(seed):
    net, code, rng = sample_code(seed)
    keep = [i for i in range(code.s) if rng.integers(2)] or [0]
    x = random_realization(code, rng)
    zeroed = real([m if i in keep else (0,) * code.l for i, m in enumerate(x.messages)],
                  [k if i in keep else (0,) * code.kappa for i, k in enumerate(x.keys)])
    assert evaluate(truncate(code, keep), net, x) == evaluate(code, net, zeroed)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_codes_round_trip_and_are_local(seed):
    net, code, _ = sample_code(seed)
    check_shapes(code, net)
    assert check_local(code, net)
    assert parse_code(serialize_code(code)) == code
