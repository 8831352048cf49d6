"""Command-line front end.

Every subcommand reads JSON inputs, writes JSON outputs (to ``-o`` or
stdout) and exits 0 on success, 1 on a domain or input error, 2 when a
capacity cap is hit and 3 on a usage error.  Failures print a single JSON
line ``{"exit": .., "error": .., "reason": .., "detail": ..}`` on stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import abaut, analysis, combinat, constructions, io
from .errors import CapacityError, FormGroupError
from .formgroup import classify

DEFAULT_SEED = 20240601
EXIT_OK, EXIT_DOMAIN, EXIT_CAPACITY, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="formgroups", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def output(sp):
        sp.add_argument("-o", "--output", help="write here instead of stdout")

    def reporting(sp):
        output(sp)
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("--timing", action="store_true", help="add wall time (breaks byte-identity)")

    sp = sub.add_parser("build", help="write a GroupFile for a named construction")
    sp.add_argument("construction", choices=["extraspecial", "free-nil2", "tree", "chain", "abelian"])
    sp.add_argument("--p", type=int, default=3)
    sp.add_argument("--k", type=int, default=1, help="extraspecial rank")
    sp.add_argument("--n", type=int, default=3, help="generators (free-nil2, chain, abelian)")
    sp.add_argument("--m", type=int, default=0, help="central dimension (abelian)")
    sp.add_argument("--sizes", type=_int_list, default=[2, 2], help="tree block sizes, e.g. 2,3")
    sp.add_argument("--with-d", action="store_true", help="tree: add the extra central coordinate")
    sp.add_argument("--kind", choices=["plain", "paired"], default="plain")
    output(sp)

    for name, helptext in [("invariants", "order, classification, g, chi, pmax"),
                           ("profile", "Neumann profile of extremal indices"),
                           ("maximal-abelians", "list every maximal abelian subgroup"),
                           ("decompose", "abelian subgroups generating the group")]:
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("group")
        reporting(sp)
        if name == "profile":
            sp.add_argument("--cap", type=int, default=analysis.SUBGROUP_CAP)
            sp.add_argument("--exact", action="store_true", help="fail instead of sampling above the cap")
            sp.add_argument("--samples", type=int, default=2000)

    sp = sub.add_parser("sunflower", help="extract a sunflower from a family file")
    sp.add_argument("family")
    sp.add_argument("--petals", type=int, default=3)
    reporting(sp)

    sp = sub.add_parser("ad-convert", help="prefix-code a family into an almost disjoint one")
    sp.add_argument("family")
    sp.add_argument("--levels", type=int, default=None)
    output(sp)

    sp = sub.add_parser("tree2group", help="family_group from a family file")
    sp.add_argument("family")
    sp.add_argument("--p", type=int, default=3)
    sp.add_argument("--k", type=int, required=True)
    output(sp)

    sp = sub.add_parser("group2tree", help="recover the family of a family group")
    sp.add_argument("group")
    output(sp)

    for name in ("diagonalize", "filter"):
        sp = sub.add_parser(name, help="seeded block-sweep scenario on a tree group with D")
        sp.add_argument("group")
        sp.add_argument("--scenario", help="JSON with 'avoid'/'fix' (diagonalize) or 'requirements' (filter)")
        sp.add_argument("--count", type=int, default=2, help="random items per list when no scenario")
        reporting(sp)

    sp = sub.add_parser("orbit-search", help="largest subgroup orbit in an abelian p-group")
    sp.add_argument("--p", type=int, default=3)
    sp.add_argument("--orders", type=_int_list, default=[1, 1], help="cyclic exponents, e.g. 2,1")
    sp.add_argument("--auts", help="JSON list of matrices; default: every automorphism")
    sp.add_argument("--random", type=int, default=0, help="use this many seeded random automorphisms")
    reporting(sp)

    sp = sub.add_parser("selftest", help="run the acceptance criteria")
    sp.add_argument("--only", type=_int_list, default=None)
    output(sp)
    return parser


def _emit(args, text: str) -> None:
    if getattr(args, "output", None):
        io.write_text(args.output, text)
    else:
        sys.stdout.write(text)


def _command(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("output", "timing")}


def _finish(args, input_text, results, exact=None, started=None) -> None:
    timing = time.perf_counter() - started if args.timing and started is not None else None
    rep = io.report(_command(args), input_text, results, exact, args.seed, timing)
    _emit(args, io.dumps(rep))


# subcommands


def cmd_build(args) -> None:
    c = args.construction
    if c == "extraspecial":
        G = constructions.extraspecial(args.p, args.k)
    elif c == "free-nil2":
        G = constructions.free_nil2(args.p, args.n)
    elif c == "tree":
        G = constructions.tree_group(args.p, args.sizes, with_d=args.with_d)
    elif c == "chain":
        G = constructions.chain_group(args.p, args.n, args.kind)
    else:
        from .formgroup import abelian_group
        G = abelian_group(args.p, args.n, args.m)
    _emit(args, io.dumps_group(G))


def _load(path):
    text = io.read_text(path)
    G, subs = io.group_from_json(io.read_json(path))
    return G, subs, text


def cmd_invariants(args) -> None:
    started = time.perf_counter()
    G, _, text = _load(args.group)
    cls = classify(G)
    g, gw = analysis.gnum(G, witness=True)
    chi, cw = analysis.chinum(G, witness=True)
    pmax, pw = analysis.pnum(G)
    results = {
        "order": G.order,
        "classification": {"kind": cls.kind, "center_order": cls.center_order,
                           "derived_order": cls.derived_order, "frattini_order": cls.frattini_order},
        "g": g, "chi": chi, "pmax": pmax, "P": pmax + 1,
        "witnesses": {"g": gw, "chi": cw, "pmax": [io.element_to_json(x) for x in pw]},
    }
    _finish(args, text, results, {"g": True, "chi": True, "pmax": True}, started)


def cmd_profile(args) -> None:
    started = time.perf_counter()
    G, _, text = _load(args.group)
    prof = analysis.neumann_profile(G, cap=args.cap, exact=True if args.exact else None,
                                    samples=args.samples, seed=args.seed)
    d = prof.as_dict()
    exact = d.pop("exact")
    _finish(args, text, d, {"profile": exact}, started)


def cmd_maximal_abelians(args) -> None:
    started = time.perf_counter()
    G, _, text = _load(args.group)
    mas = analysis.maximal_abelians(G)
    results = {"count": len(mas), "indices": sorted({M.index for M in mas}), "subgroups": mas}
    _finish(args, text, results, {"count": True}, started)


def cmd_decompose(args) -> None:
    started = time.perf_counter()
    G, _, text = _load(args.group)
    dec = analysis.decompose_22(G)
    results = {"parts": len(dec.parts), "depth": dec.depth, "gnum": analysis.gnum(G),
               "all_abelian": all(P.is_abelian for P in dec.parts), "subgroups": dec.parts}
    _finish(args, text, results, {"parts": True}, started)


def cmd_sunflower(args) -> None:
    started = time.perf_counter()
    text = io.read_text(args.family)
    F = io.load_family(args.family)
    s = combinat.sunflower(F, args.petals)
    if s is None:
        results = {"found": False}
    else:
        results = {"found": True, "root": s.root, "members": s.members,
                   "premise_met": s.premise_met, "method": s.method}
    _finish(args, text, results, {"found": True}, started)


def cmd_ad_convert(args) -> None:
    F = io.load_family(args.family)
    _emit(args, io.dumps_family(combinat.ad_convert(F, args.levels)))


def cmd_tree2group(args) -> None:
    F = io.load_family(args.family)
    _emit(args, io.dumps_group(constructions.family_group(args.p, args.k, F)))


def cmd_group2tree(args) -> None:
    G, _, _ = _load(args.group)
    if not G.adjoined:
        raise FormGroupError("group has no adjoined automorphisms", args.group)
    n = G.adjoined["base_gen_dim"]
    funcs = combinat.extract_tree(G, [G.gen(i) for i in range(n)],
                                  constructions.adjoined_generators(G), G.adjoined["target"])
    _emit(args, io.dumps_family(funcs.supports(n).canonical()))


def _scenario(args) -> dict | None:
    return io.read_json(args.scenario) if args.scenario else None


def cmd_diagonalize(args) -> None:
    started = time.perf_counter()
    G, _, text = _load(args.group)
    sc = _scenario(args)
    if sc is None:
        rng = np.random.default_rng(args.seed)
        sc = constructions.random_diagonal_scenario(G, rng, args.count)
    avoid = [tuple(a) for a in sc["avoid"]]
    fix = [constructions.branch_subgroup(G, b) for b in sc["fix"]]
    res = constructions.diagonal_automorphism(G, avoid, fix)
    failures = constructions.check_diagonal(G, res, avoid, fix)
    results = {"scenario": sc, "lam": res.aut.lam, "target": res.aut.target,
               "windows": res.windows, "log": res.log, "check_failures": failures}
    _finish(args, text, results, {"lam": True}, started)


def cmd_filter(args) -> None:
    started = time.perf_counter()
    G, _, text = _load(args.group)
    sc = _scenario(args)
    if sc is None:
        rng = np.random.default_rng(args.seed)
        sc = constructions.random_filter_scenario(G, rng, args.count)
    reqs = [(constructions.branch_subgroup(G, r["branch"]), tuple(r["psi"])) for r in sc["requirements"]]
    res = constructions.qc_filter(G, reqs)
    failures = constructions.check_filter(G, res, reqs)
    results = {"scenario": sc, "lam": res.aut.lam, "target": res.aut.target,
               "chain_domains": [c.domain for c in res.chain], "log": res.log,
               "check_failures": failures}
    _finish(args, text, results, {"lam": True}, started)


def cmd_orbit_search(args) -> None:
    started = time.perf_counter()
    A = abaut.AbelianPGroup(args.p, tuple(args.orders))
    text = None
    if args.auts:
        text = io.read_text(args.auts)
        Phi = [abaut.AbAut.from_matrix(A, M) for M in io.read_json(args.auts)]
    elif args.random:
        rng = np.random.default_rng(args.seed)
        Phi = [abaut.random_automorphism(A, rng) for _ in range(args.random)]
    else:
        Phi = abaut.general_linear(A)
    res = abaut.orbit_search(A, Phi)
    results = {"group": A.to_json(), "automorphisms": len(Phi), "orbit_size": res.orbit_size,
               "best": {"order": res.best.order, "generators": res.best.generators()}}
    _finish(args, text, results, {"orbit_size": True}, started)


def cmd_selftest(args) -> int:
    from . import acceptance
    outcomes = acceptance.run_all(args.only)
    lines = [o.line() for o in outcomes]
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK if all(o.passed for o in outcomes) else EXIT_DOMAIN


COMMANDS = {
    "build": cmd_build, "invariants": cmd_invariants, "profile": cmd_profile,
    "maximal-abelians": cmd_maximal_abelians, "decompose": cmd_decompose,
    "sunflower": cmd_sunflower, "ad-convert": cmd_ad_convert, "tree2group": cmd_tree2group,
    "group2tree": cmd_group2tree, "diagonalize": cmd_diagonalize, "filter": cmd_filter,
    "orbit-search": cmd_orbit_search, "selftest": cmd_selftest,
}


def _fail(code: int, kind: str, exc: BaseException) -> int:
    args = exc.args or (type(exc).__name__,)
    line = {"exit": code, "error": kind, "reason": str(args[0])}
    if len(args) > 1:
        line["detail"] = str(args[1])
    sys.stderr.write(json.dumps(line, sort_keys=True) + "\n")
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", exc)
    try:
        code = COMMANDS[args.command](args)
    except CapacityError as exc:
        return _fail(EXIT_CAPACITY, "capacity", exc)
    except (FormGroupError, OSError) as exc:
        return _fail(EXIT_DOMAIN, "domain", exc)
    return EXIT_OK if code is None else code


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
