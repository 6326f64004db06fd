"""Command-line workbench: ``sumnet <subcommand> ...``.

Exit codes: 0 pass, 1 verification failure, 2 usage / parse / shape error,
3 budget exceeded.  ``--format machine`` emits JSON that is byte-identical
for identical inputs and seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import bounds, builtins, forge, sentinel
from .lincode import (CodeError, LinearCode, check_decodable, check_local, check_shapes,
                      code_to_dict, parse_code)
from .netmodel import Network, NetworkError, parse_network

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits 2 already; keep the message format
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def _mode(text: str) -> str:
    m = text.replace("-", "_")
    if m not in sentinel.MODES:
        raise argparse.ArgumentTypeError(f"mode must be one of {', '.join(sentinel.MODES)}")
    return m


def load_network(ref: str) -> Network:
    """Built-in name first, then a JSON file path."""
    if ref in builtins.NETWORKS:
        return builtins.get_network(ref)
    path = Path(ref)
    if not path.is_file():
        raise UsageError(f"no built-in network or file named {ref!r}")
    return parse_network(path.read_text())


def load_code(ref: str) -> LinearCode:
    if ref in builtins.CODES:
        return builtins.get_code(ref)
    path = Path(ref)
    if not path.is_file():
        raise UsageError(f"no built-in code or file named {ref!r}")
    return parse_code(path.read_text())


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _fraction(x: Fraction | float) -> str:
    return str(x) if isinstance(x, Fraction) else repr(x)


# ---------------------------------------------------------------------------
# subcommands; each returns (exit code, machine document, text)


def run_analyze(args) -> tuple[int, dict, str]:
    net = load_network(args.network)
    rep = bounds.analyze(net, args.r)
    doc = {"command": "analyze", "network": args.network, "mode": args.mode, **rep.to_dict()}
    text = rep.to_text(args.mode)
    return EXIT_OK, doc, text


def _network_for(args) -> Network:
    net = load_network(args.network)
    return net.with_field(args.q) if args.q is not None else net


def run_verify(args) -> tuple[int, dict, str]:
    net = _network_for(args)
    code = load_code(args.code)
    check_shapes(code, net)
    local = check_local(code, net)
    decoder = check_decodable(code, net)
    verdict = sentinel.sweep(code, net, args.r, args.mode, budget=args.budget or sentinel.DEFAULT_SWEEP_BUDGET)
    ok = bool(local) and decoder is not None and verdict.passed
    doc = {
        "command": "verify",
        "network": args.network,
        "code": args.code,
        "local": {"ok": local.ok, "edge": local.edge, "column": local.column},
        "decodable": decoder is not None,
        "decoder": decoder.tolist() if decoder is not None else None,
        "sweep": verdict.to_dict(),
        "passed": ok,
    }
    lines = [
        f"local encoders    {'ok' if local else f'fails at {local.edge} column {local.column}'}",
        f"decodable         {'yes' if decoder is not None else 'no'}",
        f"{args.mode} sweep at r={args.r}: {verdict.checked} wiretap sets, "
        f"{len(verdict.violations)} violations",
    ]
    for v in verdict.violations:
        lines.append(f"  W = {{{', '.join(v.wiretap)}}}  observe {list(v.leak.observe)}  reveals {list(v.leak.reveals)}")
    lines.append("PASS" if ok else "FAIL")
    return (EXIT_OK if ok else EXIT_FAIL), doc, "\n".join(lines) + "\n"


def run_construct(args) -> tuple[int, dict, str]:
    net = load_network(args.network)
    meta: dict = {"mode": args.mode, "seed": args.seed}
    if args.mode == "user-route":
        code = forge.build_routing_user_secure(net, args.r)
        r = args.r if args.r is not None else min(forge.cutlab.compute_C_min(net), net.s) - 1
        meta["r"] = r
        verdict = sentinel.sweep(code, net, r, sentinel.USER_SECURE)
    else:
        c_min = forge.cutlab.compute_C_min(net)
        l = args.l if args.l is not None else c_min
        base = forge.build_base_sum_code(net, l, seed=args.seed)
        if base is None:
            raise forge.ConstructionError(f"no decodable rate-{l} sum code found")
        meta["l"] = l
        if args.mode == "base":
            code, verdict = base, None
        else:
            r = args.r if args.r is not None else 1
            res = forge.secure_transform(base, net, r, seed=args.seed)
            if res is None:
                raise forge.ConstructionError(f"no secure transform found at r={r}")
            code, plan = res
            meta["r"] = r
            meta["plan"] = plan.to_dict()
            verdict = sentinel.sweep(code, net, r, sentinel.SECURE)
    decodable = check_decodable(code, net) is not None
    ok = decodable and (verdict is None or verdict.passed)
    meta["verified"] = {"decodable": decodable, "sweep": verdict.to_dict() if verdict else None}
    doc = {**code_to_dict(code, net.edge_ids), "construction": meta}
    text = (f"constructed ({code.l}, {code.n}) code, kappa={code.kappa}, q={code.q}, rate {code.rate:g}\n"
            f"decodable {'yes' if decodable else 'no'}"
            + (f", {verdict.mode} sweep at r={verdict.r} {'passes' if verdict.passed else 'fails'}" if verdict else "")
            + "\n")
    return (EXIT_OK if ok else EXIT_FAIL), doc, text


def run_search(args) -> tuple[int, dict, str]:
    net = load_network(args.network)
    strategy = "randomized" if args.randomized else "exhaustive"
    kwargs = {"seed": args.seed, "strategy": strategy, "workers": args.workers}
    if args.budget is not None:
        kwargs["budget"] = args.budget
    q = args.q if args.q is not None else net.field_q
    out = forge.exhaustive_search(net, args.l, args.n, args.kappa, q, args.r, args.mode, **kwargs)
    doc = {"command": "search", "network": args.network, **out.to_dict()}
    text = f"{strategy} search, {args.mode}, r={args.r}: {out.result}"
    if out.result == forge.EXHAUSTED:
        text += " (no linear code at these parameters)"
    text += f"\nstats {json.dumps(out.stats)}  [{out.seconds:.2f} s]\n"
    if out.code is not None:
        text += json.dumps(code_to_dict(out.code, net.edge_ids)) + "\n"
    return (EXIT_BUDGET if out.result == forge.BUDGET_EXCEEDED else EXIT_OK), doc, text


def run_oracle(args) -> tuple[int, dict, str]:
    net = _network_for(args)
    code = load_code(args.code)
    check_shapes(code, net)
    w = [e for part in args.W for e in part.split(",") if e]
    unknown = [e for e in w if e not in net.edge_index]
    if unknown:
        raise UsageError(f"unknown edges {unknown}")
    budget = args.budget or sentinel.DEFAULT_ORACLE_BUDGET
    value = sentinel.entropy_oracle(code, net, w, args.target, budget=budget)
    doc = {"command": "oracle", "W": w, "target": args.target, "mutual_information": _fraction(value),
           "unit": "log q"}
    return EXIT_OK, doc, f"I({args.target}; Y_W) = {_fraction(value)}  (units of log q, W = {{{', '.join(w)}}})\n"


def run_examples(args) -> tuple[int, dict, str]:
    nets = {name: tag for name, (_, tag) in builtins.NETWORKS.items()}
    codes = {name: {"network": net, "provenance": tag} for name, (_, net, tag) in builtins.CODES.items()}
    doc = {"networks": nets, "codes": codes}
    lines = ["networks:"] + [f"  {k:22s}{v}" for k, v in nets.items()]
    lines += ["codes:"] + [f"  {k:22s}on {v['network']}; {v['provenance']}" for k, v in codes.items()]
    return EXIT_OK, doc, "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--format", choices=("text", "machine"), default="text")
    common.add_argument("--workers", type=_positive, default=None, help="default: available CPUs")
    common.add_argument("--budget", type=_positive, default=None)
    common.add_argument("--seed", type=int, default=0)

    p = _Parser(prog="sumnet", description="Secure sum computation over networks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", parents=[common], help="cut quantities and capacity bounds")
    a.add_argument("network")
    a.add_argument("--r", type=_nonneg, required=True)
    a.add_argument("--mode", type=_mode, default=None)
    a.set_defaults(run=run_analyze)

    v = sub.add_parser("verify", parents=[common], help="check locality, decodability and security of a code")
    v.add_argument("network")
    v.add_argument("code")
    v.add_argument("--r", type=_nonneg, required=True)
    v.add_argument("--mode", type=_mode, required=True)
    v.add_argument("--q", type=_positive, default=None, help="read the network over F_q instead")
    v.set_defaults(run=run_verify)

    c = sub.add_parser("construct", parents=[common], help="build a code")
    c.add_argument("network")
    c.add_argument("--mode", choices=("user-route", "base", "secure"), required=True)
    c.add_argument("--l", type=_positive, default=None)
    c.add_argument("--r", type=_nonneg, default=None)
    c.set_defaults(run=run_construct)

    s = sub.add_parser("search", parents=[common], help="exhaustive or randomized code search")
    s.add_argument("network")
    s.add_argument("--l", type=_positive, required=True)
    s.add_argument("--n", type=_positive, default=1)
    s.add_argument("--kappa", type=_nonneg, default=0)
    s.add_argument("--q", type=_positive, default=None)
    s.add_argument("--r", type=_nonneg, required=True)
    s.add_argument("--mode", type=_mode, required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--exhaustive", action="store_true", default=True)
    g.add_argument("--randomized", action="store_true")
    s.set_defaults(run=run_search)

    o = sub.add_parser("oracle", parents=[common], help="exact mutual information by enumeration")
    o.add_argument("network")
    o.add_argument("code")
    o.add_argument("--W", action="append", required=True, help="edge ids, comma separated or repeated")
    o.add_argument("--target", choices=("sum", "all_messages"), default="sum")
    o.add_argument("--q", type=_positive, default=None, help="read the network over F_q instead")
    o.set_defaults(run=run_oracle)

    e = sub.add_parser("examples", parents=[common], help="list built-in networks and codes")
    e.set_defaults(run=run_examples)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"sumnet: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if getattr(args, "workers", None) is None:
        args.workers = os.cpu_count() or 1
    try:
        code, doc, text = args.run(args)
    except sentinel.BudgetExceeded as exc:
        print(f"sumnet: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, NetworkError, CodeError, ValueError) as exc:
        print(f"sumnet: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except forge.ConstructionError as exc:
        print(f"sumnet: construction failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    out = _dump(doc) if args.format == "machine" else text
    if args.out and args.command == "construct":
        # a constructed code is always written in the code file format
        Path(args.out).write_text(_dump(doc))
        sys.stdout.write(text if args.format == "text" else out)
    elif args.out:
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
