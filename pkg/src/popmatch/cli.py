"""Command line front end.

Exit codes: 0 popular (or success), 1 not popular / none exists,
2 the methods disagree (never expected), 3 bad input.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from typing import List, Optional, Sequence

from .characterize import check, find_popular, improve_matching_smi, optimization_check, structural_check, weight_gain
from .crosscheck import FuzzConfig, check_instance, digest, minimize, repro_text, run_fuzz
from .errors import BadParameters, PopmatchError
from .graph import Matching
from .instance import Instance, Variant, ensure_last_resorts, parse_instance, parse_matching, random_instance
from .lp import build_dual_house, build_dual_smi, certificate_json
from .oracle import DEFAULT_GUARD, MatchingTable, is_popular_bruteforce
from .verdict import Method, StructuralWitness
from .weights import weights_for

EXIT_POPULAR, EXIT_NOT_POPULAR, EXIT_DISAGREE, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def load_instance(path: str) -> Instance:
    return ensure_last_resorts(parse_instance(_read(path)))


def load_matching(inst: Instance, value: str) -> Matching:
    """``value`` is a file path if such a file exists, else inline text."""
    text = _read(value) if os.path.isfile(value) else value
    return parse_matching(inst, text)


def parse_sizes(text: str):
    """``4x4`` (exact) or ``1-4x2-3`` (inclusive ranges)."""
    m = re.fullmatch(r"(\d+)(?:-(\d+))?x(\d+)(?:-(\d+))?", text.strip())
    if not m:
        raise BadParameters(f"bad --sizes {text!r}; expected e.g. 4x4 or 1-4x1-4")
    lo_l, hi_l, lo_r, hi_r = m.groups()
    left = (int(lo_l), int(hi_l or lo_l))
    right = (int(lo_r), int(hi_r or lo_r))
    return left, right


def _methods(requested: Optional[Sequence[str]]) -> List[Method]:
    if not requested or "all" in requested:
        return list(Method)
    out = []
    for r in requested:
        if Method(r) not in out:
            out.append(Method(r))
    return out


def _emit_rows(rows):
    for row in rows:
        print("\t".join(str(x) for x in row))


def _emit_json(obj):
    print(json.dumps(obj, indent=2, sort_keys=False))


def _base_report(args, inst: Instance) -> dict:
    return {"command": args.command, "argv": list(args.argv), "digest": digest(inst), "variant": inst.variant.value}


def _verdict_exit(verdicts) -> int:
    answers = {v.popular for v in verdicts}
    if len(answers) > 1:
        return EXIT_DISAGREE
    return EXIT_POPULAR if answers == {True} else EXIT_NOT_POPULAR


def _run_methods(inst: Instance, m: Matching, methods, guard: int):
    verdicts, timing = [], {}
    for meth in methods:
        t0 = time.perf_counter()
        verdicts.append(check(inst, m, meth, guard))
        timing[meth.value] = round((time.perf_counter() - t0) * 1000, 3)
    return verdicts, timing


def _certificate_cell(v) -> str:
    cert = v.to_json()["certificate"]
    return json.dumps(cert, separators=(",", ":")) if cert is not None else "-"


# -- commands -----------------------------------------------------------------


def cmd_verify(args) -> int:
    inst = load_instance(args.instance)
    m = load_matching(inst, args.matching)
    verdicts, timing = _run_methods(inst, m, _methods(args.method), args.guard_edges)
    code = _verdict_exit(verdicts)
    if args.figure:
        witness = next((v.certificate for v in verdicts if isinstance(v.certificate, StructuralWitness)), None)
        dual = next((v.certificate for v in verdicts if v.popular and v.certificate is not None), None)
        draw_instance_figure(inst, m, args.figure, dual, witness)
    if args.json:
        rep = _base_report(args, inst)
        rep.update(matching=m.to_text(), verdicts=[v.to_json() for v in verdicts], timing_ms=timing, exit_code=code)
        _emit_json(rep)
    else:
        _emit_rows([("method", "popular", "ms", "certificate")])
        _emit_rows((v.method.value, v.popular, timing[v.method.value], _certificate_cell(v)) for v in verdicts)
    return code


def cmd_certify(args) -> int:
    inst = load_instance(args.instance)
    m = load_matching(inst, args.matching)
    s = structural_check(inst, m)
    o = optimization_check(inst, m)
    rep = _base_report(args, inst)
    rep["matching"] = m.to_text()
    if s.popular != o.popular:
        code = EXIT_DISAGREE
        rep["error"] = "structural and optimization tests disagree"
        cert = None
    elif s.popular:
        code = EXIT_POPULAR
        w = weights_for(inst, m)
        y = build_dual_house(inst, m) if inst.variant.one_sided else build_dual_smi(inst, m)[1]
        cert = dict(certificate_json(m, y, w), type="dual")
        if args.figure:
            draw_instance_figure(inst, m, args.figure, y, None)
    else:
        code = EXIT_NOT_POPULAR
        witness = s.certificate
        if inst.variant == Variant.SMI:
            better = improve_matching_smi(inst, m, witness)
            cert = {
                "type": "improvement",
                "witness": witness.to_json(),
                "matching": [[a.name, h.name] for a, h in better.sorted_edges()],
                "gain": weight_gain(inst, m, better),
            }
        elif len(inst.edges) <= args.guard_edges:
            cert = dict(is_popular_bruteforce(inst, m, args.guard_edges).certificate.to_json(), witness=witness.to_json())
        else:
            cert = dict(o.certificate.to_json(), witness=witness.to_json())
        if args.figure:
            draw_instance_figure(inst, m, args.figure, None, witness)
    rep["popular"] = s.popular
    rep["certificate"] = cert
    rep["exit_code"] = code
    if args.json:
        _emit_json(rep)
    else:
        _emit_rows([("popular", s.popular), ("kind", cert["type"] if cert else "-")])
        if cert and cert["type"] == "dual":
            _emit_rows([("regime", cert["regime"]), ("objective", cert["objective"]),
                        ("primal_value", cert["primal_value"]), ("cs_ok", cert["cs_ok"]),
                        ("feasible", cert["feasible"])])
            _emit_rows([("vertex", "y")])
            _emit_rows(cert["y"].items())
        elif cert:
            _emit_rows((k, json.dumps(v, separators=(",", ":"))) for k, v in cert.items() if k != "type")
    return code


def cmd_find(args) -> int:
    inst = load_instance(args.instance)
    found = find_popular(inst)
    rep = _base_report(args, inst)
    if found is None:
        rep.update(matching=None, verdicts=[], exit_code=EXIT_NOT_POPULAR)
        if args.json:
            _emit_json(rep)
        else:
            print("no popular matching")
        return EXIT_NOT_POPULAR
    methods = [Method.STRUCTURAL, Method.OPTIMIZATION]
    if len(inst.edges) <= args.guard_edges:
        methods.append(Method.BRUTEFORCE)
    verdicts, timing = _run_methods(inst, found, methods, args.guard_edges)
    code = _verdict_exit(verdicts)
    if code == EXIT_NOT_POPULAR:
        code = EXIT_DISAGREE
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(found.to_text() + "\n")
    if args.json:
        rep.update(matching=found.to_text(), verdicts=[v.to_json() for v in verdicts], timing_ms=timing, exit_code=code)
        _emit_json(rep)
    else:
        print(found.to_text())
        _emit_rows((v.method.value, v.popular, timing[v.method.value]) for v in verdicts)
    return code


def cmd_gen(args) -> int:
    (l_lo, l_hi), (r_lo, r_hi) = parse_sizes(args.sizes)
    if l_lo != l_hi or r_lo != r_hi:
        raise BadParameters("gen takes exact sizes such as 3x4")
    inst = random_instance(args.seed, args.variant, l_lo, r_lo, args.density, args.tie_prob)
    text = inst.serialize()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_fuzz(args) -> int:
    left, right = parse_sizes(args.sizes)
    cfg = FuzzConfig(args.seed, args.count, Variant(args.variant), left, right, args.tie_prob, args.guard_edges)
    summary = run_fuzz(cfg, jobs=args.jobs)
    data = summary.to_json()
    repros = []
    if summary.failing and args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        index, rep = summary.failing[0]
        small = minimize(rep.inst, lambda i: not check_instance(i, cfg.guard).ok)
        path = os.path.join(args.out_dir, f"repro_{cfg.variant.value}_{cfg.seed}_{index}.txt")
        with open(path, "w") as fh:
            fh.write(repro_text(index, rep, small))
        repros.append(path)
    data["repro_files"] = repros
    if args.figures:
        os.makedirs(args.figures, exist_ok=True)
        from .report import draw_fuzz_summary

        draw_fuzz_summary(data, os.path.join(args.figures, f"fuzz_{cfg.variant.value}_{cfg.seed}.png"))
    code = EXIT_POPULAR if summary.ok else EXIT_DISAGREE
    if args.json:
        _emit_json(data)
    else:
        _emit_rows([("criterion", "checked", "failed")])
        _emit_rows((c, t["checked"], t["failed"]) for c, t in data["criteria"].items())
        _emit_rows([("instances", data["instances"]), ("candidates", data["candidates"]),
                    ("disagreements", data["disagreements"])])
    return code


def cmd_cross_check(args) -> int:
    inst = load_instance(args.instance)
    table = MatchingTable(inst, guard=args.guard_edges)
    rows, disagree, any_popular = [], False, False
    for i, m in enumerate(table.matchings):
        verdicts = [structural_check(inst, m), optimization_check(inst, m), table.verdict(i)]
        answers = {v.popular for v in verdicts}
        disagree |= len(answers) > 1
        any_popular |= verdicts[0].popular
        rows.append((m, verdicts))
    code = EXIT_DISAGREE if disagree else (EXIT_POPULAR if any_popular else EXIT_NOT_POPULAR)
    if args.json:
        rep = _base_report(args, inst)
        rep.update(
            candidates=len(rows),
            popular=sum(v[0].popular for _, v in rows),
            results=[{"matching": m.to_text(), "verdicts": [v.to_json() for v in vs]} for m, vs in rows],
            exit_code=code,
        )
        _emit_json(rep)
    else:
        _emit_rows([("matching", "structural", "optimization", "bruteforce")])
        _emit_rows((m.to_text(), *(v.popular for v in vs)) for m, vs in rows)
    return code


def draw_instance_figure(inst, m, path, dual, witness):
    from .report import draw_instance

    draw_instance(inst, m, path, dual=dual, witness=witness)


# -- argument parsing ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="popmatch", description="Popular matchings: verify, certify, find, fuzz.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, json_flag=True):
        if json_flag:
            sp.add_argument("--json", action="store_true", help="emit a JSON report")
        sp.add_argument("--guard-edges", type=int, default=DEFAULT_GUARD, help="oracle edge limit (default 24)")

    sp = sub.add_parser("verify", help="decide popularity of a matching")
    sp.add_argument("instance")
    sp.add_argument("--matching", required=True, help="matching file or inline text 'a1 h1; a2 h2'")
    sp.add_argument("--method", action="append", choices=[m.value for m in Method] + ["all"])
    sp.add_argument("--figure", help="write a drawing of the instance and matching to this file")
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("certify", help="emit the dual certificate (or the counter-certificate)")
    sp.add_argument("instance")
    sp.add_argument("--matching", required=True)
    sp.add_argument("--figure")
    common(sp)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("find", help="produce a popular matching")
    sp.add_argument("instance")
    sp.add_argument("--out", help="also write the matching to this file")
    common(sp)
    sp.set_defaults(func=cmd_find)

    sp = sub.add_parser("gen", help="generate a random instance")
    sp.add_argument("--variant", required=True, choices=[v.value for v in Variant])
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--sizes", default="4x4")
    sp.add_argument("--density", type=float, default=1.0)
    sp.add_argument("--tie-prob", type=float, default=0.0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("fuzz", help="three-way agreement and certificate checks on random instances")
    sp.add_argument("--variant", required=True, choices=[v.value for v in Variant])
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--count", type=int, default=200)
    sp.add_argument("--sizes", default="1-4x1-4", help="NxM or lo-hixlo-hi (default 1-4x1-4)")
    sp.add_argument("--tie-prob", type=float, default=None)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--out-dir", help="write a minimised repro of the first failure here")
    sp.add_argument("--figures", help="write a summary figure into this directory")
    common(sp)
    sp.set_defaults(func=cmd_fuzz)

    sp = sub.add_parser("cross-check", help="all methods over every candidate matching")
    sp.add_argument("instance")
    common(sp)
    sp.set_defaults(func=cmd_cross_check)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else 0
    args.argv = argv
    try:
        return args.func(args)
    except (PopmatchError, InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
