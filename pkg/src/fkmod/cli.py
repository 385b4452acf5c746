"""Command line surface.

Six subcommands: ``space`` classifies a finite space file, ``check``
validates a module file, ``extend`` reconstructs a full invariant from
its reduction, ``lift`` lifts a reduced morphism, ``classify`` renders
realizability verdicts and ``selftest`` runs the acceptance suite.

Machine-readable reports go to stdout as JSON lines, a human summary to
stderr (suppressed by ``--json``).  Exit codes: 0 = pass/true, 1 =
checked and failed, 2 = input or usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .space import (FiniteSpace, classify_space, DuplicatePoint,
                    UnknownPoint, CycleDetected)
from .invariants import (PointedModule, validate_module, is_exact, is_rrz,
                         verify_morphism, ShapeIncomplete,
                         SpaceNotUniquePath, SpaceNotEbp)
from .functors import (restrict, restrict_map, tb_to_r, tb_to_r_map,
                       reconstruct_st,
                       modules_equal, lift_r_morphism, lift_to_st,
                       FreenessHypothesisFailed, NotLiftable,
                       ReconstructionFailed)
from .classify import range_check_ck, range_check_unital, phantom_verdict
from .serialize import (SerializationError, space_from_dict, module_to_dict,
                        module_from_dict, morphism_to_dict,
                        morphism_components_from_dict, load_json, dump_json)
from .zmodule import maps_equal
from .selftest import run_all


PARSE_ERRORS = (SerializationError, ShapeIncomplete, DuplicatePoint,
                UnknownPoint, CycleDetected)


class _Out:
    """JSON lines to stdout, prose to stderr unless --json."""

    def __init__(self, json_only: bool):
        self.json_only = json_only

    def emit(self, obj) -> None:
        sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")

    def note(self, msg: str) -> None:
        if not self.json_only:
            sys.stderr.write(msg + "\n")


def _load_space(path: str) -> FiniteSpace:
    d = load_json(path)
    if not isinstance(d, dict) or "points" not in d:
        raise SerializationError(f"{path} is not a space file")
    return space_from_dict(d)


def _load_module(path: str):
    d = load_json(path)
    if not isinstance(d, dict) or "kind" not in d:
        raise SerializationError(f"{path} is not a module file")
    return module_from_dict(d, base_dir=os.path.dirname(path) or ".")


def cmd_space(args, out: _Out) -> int:
    sp = _load_space(args.file)
    cls = classify_space(sp)
    report = {"command": "space",
              "points": sp.n,
              "locally_closed_sets": len(sp.lc_masks()),
              **cls.as_dict()}
    out.emit(report)
    out.note(f"{args.file}: {sp.n} points, "
             f"{report['locally_closed_sets']} locally closed sets")
    for flag in ("unique_path", "ebp", "accordion", "forest"):
        out.note(f"  {flag}: {str(report[flag]).lower()}")
    for key, wit in cls.witnesses.items():
        out.note(f"  witness {key}: {wit}")
    return 0


def cmd_check(args, out: _Out) -> int:
    m = _load_module(args.file)
    mod = m.module if isinstance(m, PointedModule) else m
    if args.kind and args.kind != mod.kind:
        raise SerializationError(
            f"file has kind {mod.kind!r}, --kind asked for {args.kind!r}")
    rep = validate_module(mod)
    exact = is_exact(mod) if rep.ok else None
    rrz = is_rrz(mod) if rep.ok and mod.kind == "st" else None
    report = {"command": "check", "kind": mod.kind,
              "valid": rep.ok, "failures": rep.failures[:10]}
    if exact is not None:
        report["exact"] = exact.ok
        report["exactness_failures"] = exact.failures[:10]
    if rrz is not None:
        report["real_rank_zero_like"] = rrz.ok
    out.emit(report)
    if rep.ok:
        out.note(f"{args.file}: valid {mod.kind} module"
                 + (f", exact: {str(exact.ok).lower()}" if exact else ""))
        return 0
    out.note(f"{args.file}: INVALID {mod.kind} module")
    for f in rep.failures[:10]:
        out.note(f"  {f}")
    return 1


def cmd_extend(args, out: _Out) -> int:
    m = _load_module(args.file)
    mod = m.module if isinstance(m, PointedModule) else m
    if mod.kind != "b":
        raise SerializationError("extend expects a b module file")
    rep = validate_module(mod)
    if not rep.ok:
        out.emit({"command": "extend", "valid": False,
                  "failures": rep.failures[:10]})
        out.note(f"{args.file}: invalid b module, nothing to extend")
        return 1
    exact = is_exact(mod)
    if not exact.ok:
        out.emit({"command": "extend", "valid": True, "exact": False,
                  "failures": exact.failures[:10]})
        out.note(f"{args.file}: b module is not exact, cannot extend")
        return 1
    try:
        rec = reconstruct_st(mod)
    except SpaceNotEbp as e:
        out.emit({"command": "extend", "error": "space_not_ebp",
                  "witness": str(e)})
        out.note(f"{args.file}: space is not EBP: {e}")
        return 1
    st = rec.module
    checks = {"valid": validate_module(st).ok,
              "exact": is_exact(st).ok,
              "real_rank_zero_like": is_rrz(st).ok,
              "restricts_to_input": modules_equal(restrict(st, "b"), mod)}
    if not all(checks.values()):
        out.emit({"command": "extend", "verified": False, **checks})
        out.note(f"{args.file}: reconstruction failed verification, "
                 "no output written")
        return 1
    dump_json(module_to_dict(st), args.output)
    out.emit({"command": "extend", "verified": True, "output": args.output,
              **checks})
    out.note(f"wrote {args.output} (validated, exact, "
             "real-rank-zero-like, restricts back to the input)")
    return 0


def cmd_lift(args, out: _Out) -> int:
    m = _load_module(args.source)
    n = _load_module(args.target)
    mod_m = m.module if isinstance(m, PointedModule) else m
    mod_n = n.module if isinstance(n, PointedModule) else n
    if mod_m.kind != mod_n.kind or mod_m.kind not in ("tb", "st"):
        raise SerializationError(
            "lift expects two tb module files or two st module files")
    if mod_m.kind == "tb":
        mr, mlay = tb_to_r(mod_m)
        nr, nlay = tb_to_r(mod_n)
    else:
        mtb, ntb = restrict(mod_m, "tb"), restrict(mod_n, "tb")
        mr, mlay = tb_to_r(mtb)
        nr, nlay = tb_to_r(ntb)
    mapd = load_json(args.map)
    if not isinstance(mapd, dict):
        raise SerializationError(f"{args.map} is not a morphism file")
    phi = morphism_components_from_dict(mapd, mr, nr)
    try:
        if mod_m.kind == "tb":
            big = lift_r_morphism(mod_m, mod_n, phi)
            back = tb_to_r_map(big, mr, mlay, nr, nlay)
        else:
            big = lift_to_st(mod_m, mod_n, phi)
            back = tb_to_r_map(restrict_map(big, "tb"), mr, mlay, nr, nlay)
    except (FreenessHypothesisFailed, NotLiftable, SpaceNotUniquePath,
            SpaceNotEbp, ReconstructionFailed) as e:
        out.emit({"command": "lift", "lifted": False,
                  "error": type(e).__name__, "detail": str(e)})
        out.note(f"cannot lift: {e}")
        return 1
    commutes = verify_morphism(big).ok
    restricts = all(maps_equal(back.components[k], phi.components[k])
                    for k in phi.components)
    if not (commutes and restricts):
        out.emit({"command": "lift", "lifted": False,
                  "commutes": commutes, "restricts_to_input": restricts})
        out.note("lift failed verification, no output written")
        return 1
    dump_json(morphism_to_dict(big, source_ref=args.source,
                               target_ref=args.target), args.output)
    out.emit({"command": "lift", "lifted": True, "output": args.output,
              "kind": big.src.kind, "commutes": True,
              "restricts_to_input": True})
    out.note(f"wrote {args.output} ({big.src.kind} morphism, commutes, "
             "restricts back to the input map)")
    return 0


def cmd_classify(args, out: _Out) -> int:
    m = _load_module(args.file)
    pointed = isinstance(m, PointedModule)
    mod = m.module if pointed else m
    rep = validate_module(mod)
    if not rep.ok:
        out.emit({"command": "classify", "valid": False,
                  "failures": rep.failures[:10]})
        out.note(f"{args.file}: invalid module, cannot classify")
        return 1
    verdicts = {}
    if mod.kind == "r":
        if args.unital:
            if not pointed:
                raise SerializationError(
                    "--unital needs a pointed module (a \"unit\" entry)")
            verdicts["unital"] = range_check_unital(m)
        else:
            verdicts["range"] = range_check_ck(mod)
    elif mod.kind in ("st", "b"):
        verdicts["phantom"] = phantom_verdict(mod.space, m)
    else:
        raise SerializationError(
            f"no verdicts defined for kind {mod.kind!r}")
    report = {"command": "classify", "kind": mod.kind,
              "unital": bool(args.unital)}
    satisfied = []
    for name, v in verdicts.items():
        report[name] = v.as_dict()
        for flag in ("graph_realizable", "ck_realizable",
                     "unital_graph_realizable", "unital_ck_realizable",
                     "phantom"):
            val = getattr(v, flag)
            if val is not None:
                satisfied.append(val)
                out.note(f"  {flag}: {str(val).lower()}")
        if not v.applicable:
            out.note("  verdict not applicable "
                     "(see the failing checks in the report)")
    out.emit(report)
    ok = any(satisfied)
    out.note("verdict: " + ("criteria satisfied" if ok
                            else "criteria not satisfied"))
    return 0 if ok else 1


def cmd_selftest(args, out: _Out) -> int:
    results = run_all(args.seed)
    ok = True
    for r in results:
        ok &= r.ok
        # timings stay out of the machine report so that a fixed seed
        # gives byte-identical output
        out.emit({"command": "selftest", "criterion": r.criterion,
                  "ok": r.ok, "detail": r.detail})
        out.note(f"  {r.criterion}: {'ok' if r.ok else 'FAIL'} "
                 f"({r.seconds:.1f}s) {r.detail}")
    out.note("selftest: " + ("all criteria pass" if ok else "FAILURES"))
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="fkmod",
        description="Filtered K-theory invariants over finite T0-spaces.")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("space", help="classify a finite space file")
    sp.add_argument("file")

    ck = sub.add_parser("check", help="validate a module file")
    ck.add_argument("file")
    ck.add_argument("--kind", choices=("st", "b", "tb", "r"),
                    help="require this module kind")

    ex = sub.add_parser("extend",
                        help="reconstruct an st module from a b module")
    ex.add_argument("file")
    ex.add_argument("-o", "--output", required=True)

    lf = sub.add_parser("lift",
                        help="lift a reduced (r) morphism to tb or st")
    lf.add_argument("--source", required=True, help="source module file")
    lf.add_argument("--target", required=True, help="target module file")
    lf.add_argument("--map", required=True,
                    help="morphism components between the reduced modules")
    lf.add_argument("-o", "--output", required=True)

    cl = sub.add_parser("classify", help="realizability verdicts")
    cl.add_argument("file")
    cl.add_argument("--unital", action="store_true",
                    help="unital range checks (needs a pointed module)")

    st = sub.add_parser("selftest", help="run the acceptance suite")
    st.add_argument("--seed", type=int, default=0)

    for s in (sp, ck, ex, lf, cl, st):
        s.add_argument("--json", action="store_true",
                       help="suppress the human summary on stderr")
    return p


COMMANDS = {"space": cmd_space, "check": cmd_check, "extend": cmd_extend,
            "lift": cmd_lift, "classify": cmd_classify,
            "selftest": cmd_selftest}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    out = _Out(bool(getattr(args, "json", False)))
    try:
        return COMMANDS[args.command](args, out)
    except PARSE_ERRORS as e:
        out.emit({"command": args.command, "error": type(e).__name__,
                  "detail": str(e)})
        out.note(f"input error: {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
