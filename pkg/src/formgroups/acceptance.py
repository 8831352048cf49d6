"""The fourteen acceptance checks, each with its wall-time budget.

Each check returns ``(ok, detail)``; :func:`run` times it and fails it
when the budget is exceeded.  Used by ``formgroups selftest`` and the test
suite.
"""
from __future__ import annotations

import contextlib
import io as _io
import itertools
import math
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import abaut, analysis, combinat, constructions, fpspace as fp, oracles
from .formgroup import Subgroup, classify


@dataclass
class Outcome:
    number: int
    title: str
    passed: bool
    seconds: float
    budget: float
    detail: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number:2d} {status} ({self.seconds:.2f}s / {self.budget:g}s) {self.title}: {self.detail}"


def _mask(T: oracles.CayleyTable, S: Subgroup) -> bytes:
    m = np.zeros(T.size, dtype=bool)
    for x in S.elements():
        m[T.index(x)] = True
    return oracles._key(m)


def check_1():
    G = constructions.extraspecial(3, 1)
    T = oracles.CayleyTable(G)
    mas = analysis.maximal_abelians(G)
    prof = analysis.neumann_profile(G)
    brute = oracles.neumann_profile(T)
    inv = analysis.invariants(G)
    got = dict(order=G.order, center=classify(G).center_order, count=len(mas),
               indices=sorted(M.index for M in mas), g=inv.g, chi=inv.chi, pmax=inv.pmax,
               profile=(prof.gz, prof.maxN, prof.maxC, prof.maxCore))
    want = dict(order=27, center=3, count=4, indices=[3, 3, 3, 3], g=2, chi=4, pmax=4,
                profile=(9, 3, 9, 3))
    oracle = dict(order=T.size, center=int(oracles.center(T).sum()),
                  count=len(oracles.maximal_abelians(T)), g=oracles.gnum(T), chi=oracles.chinum(T),
                  pmax=oracles.pnum(T), profile=(brute.gz, brute.maxN, brute.maxC, brute.maxCore))
    ok = got == want and all(got[k] == v for k, v in oracle.items())
    return ok, f"got {got}"


def check_2():
    G = constructions.free_nil2(3, 3)
    cls = classify(G)
    mas = analysis.maximal_abelians(G)
    # every maximal abelian is the centre plus one line of V
    shapes = all(M.K == G.W and M.U.dim == 1 for M in mas)
    g = analysis.gnum(G)
    ok = (G.order == 729 and cls.kind == "special" and cls.center_order == cls.derived_order
          == cls.frattini_order == 27 and len(mas) == 13 and shapes and g == 3)
    return ok, f"order {G.order}, {cls.kind}, |Z|=|G'|=|Phi|={cls.center_order}, {len(mas)} maximal abelians, g={g}"


def check_3():
    G = constructions.tree_group(3, [2, 3])
    mas = analysis.maximal_abelians(G)
    images = [constructions.branch_of(G, M) for M in mas]
    inverse = all(constructions.branch_subgroup(G, b) == M for b, M in zip(images, mas))
    bijective = sorted(images) == sorted(constructions.all_branches(G)) and len(set(images)) == len(images)
    return len(mas) == 52 and inverse and bijective, f"{len(mas)} maximal abelians, bijection {bijective and inverse}"


def check_4():
    P = constructions.chain_group(3, 4, "paired")
    A0, A1 = constructions.chain_witnesses(P)
    joined = Subgroup.generated(P, A0.generators() + A1.generators())
    g = analysis.gnum(P)
    paired_ok = A0.is_abelian and A1.is_abelian and joined.order == P.order and g == 2
    G = constructions.chain_group(3, 4, "plain")
    T = oracles.CayleyTable(G)
    # group-law commutators from the table against the closed formula
    comm = T.mul[T.inv[T.mul.T], T.mul]
    n = G.gen_dim
    C = T.digits[:, :n]
    form = sum(C[:, None, a] * C[None, :, b] - C[:, None, b] * C[None, :, a]
               for a, b in itertools.combinations(range(n), 2)) % 3
    expected = T.encode(np.concatenate([np.zeros(form.shape + (n,), dtype=np.int64), form[..., None]], axis=2))
    formula_ok = bool(np.array_equal(comm, expected))
    gens = [G.gen(i) for i in range(n)]
    pairwise = all(G.commutator(x, y) != G.identity for x, y in itertools.combinations(gens, 2))
    pmax, _ = analysis.pnum(G)
    ok = paired_ok and formula_ok and pairwise and pmax >= 4
    return ok, f"paired g={g} witnessed {paired_ok}; plain formula on {T.size**2} pairs {formula_ok}, pmax={pmax}"


def c5_families(count: int = 20, seed: int = 5):
    """Seeded families of three distinct 2-subsets of {0,1,2,3} (almost disjoint)."""
    rng = np.random.default_rng(seed)
    return [combinat.random_family(rng, 4, 3, size=2) for _ in range(count)]


def check_5():
    worst_index, gzs, round_trips = 0, set(), 0
    for F in c5_families():
        H = constructions.family_group(3, 2, F)
        funcs = combinat.extract_tree(H, [H.gen(i) for i in range(4)],
                                      constructions.adjoined_generators(H), H.adjoined["target"])
        round_trips += funcs.supports(4).canonical() == F.canonical()
        worst_index = max(worst_index, max(M.index for M in analysis.maximal_abelians(H)))
        gzs.add(3 ** (H.gen_dim - fp.radical(H.beta).dim))
    ok = round_trips == 20 and worst_index <= 3 ** 4 and gzs == {3 ** 6}
    return ok, f"round trips {round_trips}/20, max [G:A] = {worst_index}, |G/Z| values {sorted(gzs)}"


def check_6():
    rows = []
    ok = True
    for p, k in [(3, 1), (3, 2), (5, 1)]:
        G = constructions.extraspecial(p, k)
        prof = analysis.neumann_profile(G)
        row = (p, k, prof.maxN, prof.gz)
        if (p, k) != (3, 2):
            T = oracles.CayleyTable(G)
            brute = oracles.neumann_profile(T)
            ok &= brute.maxN == prof.maxN and brute.gz == prof.gz
        ok &= prof.exact and prof.maxN == p ** k and prof.gz == p ** (2 * k)
        rows.append(row)
    return ok, "(p, k, maxN, |G/Z|) = " + ", ".join(map(str, rows))


def _ad_ok(F: combinat.SetFamily, h: int) -> bool:
    out = combinat.ad_convert(F, h)
    if len(set(out.sets)) != len(F.sets) or any(len(s) != h for s in out.sets):
        return False
    for (a, x), (b, y) in itertools.combinations(zip(F.sets, out.sets), 2):
        inter = len(set(x) & set(y))
        if inter >= h or inter != combinat.common_prefix_length(a, b, h):
            return False
    return True


def check_7():
    F = combinat.branch_family(combinat.complete_tree(2, 4))
    out = combinat.ad_convert(F, 4)
    base = len(out.sets) == 16 and all(len(s) == 4 for s in out.sets) and _ad_ok(F, 4)
    rng = np.random.default_rng(7)
    good = 0
    for _ in range(50):
        h = int(rng.integers(2, 7))
        count = int(rng.integers(1, min(2 ** h, 12) + 1))
        good += _ad_ok(combinat.random_family(rng, h, count), h)
    return base and good == 50, f"binary tree: 16 sets of size 4 {base}; random {good}/50"


def check_8():
    rng = np.random.default_rng(8)
    r, good = 3, 0
    for _ in range(100):
        k = int(rng.integers(1, 4))
        need = math.factorial(k) * (r - 1) ** k + 1
        universe = 2 * k + 2
        while math.comb(universe, k) < need:
            universe += 1
        count = int(rng.integers(need, min(math.comb(universe, k), need + 10) + 1))
        F = combinat.random_family(rng, universe, count, size=k)
        s = combinat.sunflower(F, r)
        good += (s is not None and len(s.members) == r and s.premise_met
                 and combinat.is_sunflower(s.members, s.root))
    return good == 100, f"{good}/100 valid {r}-sunflowers"


def check_9():
    exhaustive = failures = 0
    for A in abaut.abelian_groups(3, 4):
        for mats in abaut.automorphism_matrices(A):
            ok = abaut.height_fix_batch(A, mats)
            exhaustive += len(mats)
            failures += int((~ok).sum())
    rng = np.random.default_rng(9)
    sampled = 0
    groups = abaut.abelian_groups(3, 6)
    for A in groups:
        for _ in range(200):
            phi = abaut.random_automorphism(A, rng)
            failures += not abaut.verify_height_fix(A, phi).ok
            sampled += 1
    return failures == 0, (f"{exhaustive} automorphisms exhaustively over {len(abaut.abelian_groups(3, 4))} groups, "
                           f"{sampled} sampled over {len(groups)} groups, {failures} failures")


C10_GROUPS = [(3, (1,)), (3, (2,)), (3, (1, 1)), (3, (2, 1)), (3, (3,)), (2, (1, 1)),
              (2, (2, 1)), (2, (1, 1, 1)), (5, (1, 1)), (3, (1, 1, 1))]


def check_10():
    A = abaut.AbelianPGroup(3, (1, 1))
    Phi = abaut.general_linear(A)
    got = abaut.orbit_search(A, Phi).orbit_size
    base = got == 4 == oracles.abelian_orbit_max(A, Phi) and len(Phi) == 48
    rng = np.random.default_rng(10)
    agree = 0
    for _ in range(20):
        p, orders = C10_GROUPS[int(rng.integers(len(C10_GROUPS)))]
        B = abaut.AbelianPGroup(p, orders)
        Phi = [abaut.random_automorphism(B, rng) for _ in range(int(rng.integers(1, 6)))]
        agree += abaut.orbit_search(B, Phi).orbit_size == oracles.abelian_orbit_max(B, Phi)
    return base and agree == 20, f"(Z_3)^2 under 48 automorphisms: {got}; oracle agreement {agree}/20"


def check_11():
    bad = []
    for name, G in constructions.corpus(3, 6).items():
        dec = analysis.decompose_22(G)
        gens = [x for P in dec.parts for x in P.generators()]
        if not (all(P.is_abelian for P in dec.parts)
                and Subgroup.generated(G, gens).order == G.order
                and len(dec.parts) >= analysis.gnum(G)):
            bad.append(name)
    return not bad, f"{len(constructions.corpus(3, 6))} groups, failures {bad}"


def check_12():
    bad, n = [], 0
    for name, G in constructions.corpus(3, 5).items():
        T = oracles.CayleyTable(G)
        fast = {_mask(T, M) for M in analysis.maximal_abelians(G)}
        brute = {oracles._key(m) for m in oracles.maximal_abelians(T)}
        n += 1
        if fast != brute:
            bad.append(name)
    return not bad, f"{n} groups of order <= 3^5, mismatches {bad}"


def check_13():
    G = constructions.tree_group(3, [2, 2, 2, 2], with_d=True)
    rng = np.random.default_rng(13)
    diag_ok = filt_ok = 0
    for _ in range(20):
        sc = constructions.random_diagonal_scenario(G, rng, int(rng.integers(1, 4)))
        avoid = [tuple(a) for a in sc["avoid"]]
        fix = [constructions.branch_subgroup(G, b) for b in sc["fix"]]
        res = constructions.diagonal_automorphism(G, avoid, fix)
        diag_ok += not constructions.check_diagonal(G, res, avoid, fix)
        sc = constructions.random_filter_scenario(G, rng, int(rng.integers(1, 4)))
        reqs = [(constructions.branch_subgroup(G, q["branch"]), tuple(q["psi"])) for q in sc["requirements"]]
        res = constructions.qc_filter(G, reqs)
        filt_ok += not constructions.check_filter(G, res, reqs)
    return diag_ok == filt_ok == 20, f"diagonal {diag_ok}/20, filter {filt_ok}/20"


def _cli(argv):
    from . import cli
    out, err = _io.StringIO(), _io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = cli.main(argv)
    return code, out.getvalue(), err.getvalue()


def check_14():
    from . import io
    notes = []
    with tempfile.TemporaryDirectory() as tmp:
        d = Path(tmp)
        g = d / "g.json"
        code, _, _ = _cli(["build", "extraspecial", "--p", "3", "--k", "1", "-o", str(g)])
        G, subs = io.load_group(g)
        stable = code == 0 and io.dumps_group(G, subs) == g.read_text()
        notes.append(f"round trip {stable}")
        c1, r1, _ = _cli(["invariants", str(g)])
        c2, r2, _ = _cli(["invariants", str(g)])
        import json
        res = json.loads(r1)["results"]
        values = (res["order"], res["classification"]["kind"], res["g"], res["chi"], res["pmax"])
        same = c1 == c2 == 0 and r1 == r2 and values == (27, "extraspecial", 2, 4, 4)
        notes.append(f"invariants {values} byte-identical {r1 == r2}")
        fam = d / "fam.json"
        fam.write_text(io.dumps_family(combinat.SetFamily(4, ((0, 1), (1, 2), (2, 3)))))
        h = d / "h.json"
        back = d / "back.json"
        _cli(["tree2group", str(fam), "--p", "3", "--k", "2", "-o", str(h)])
        _cli(["group2tree", str(h), "-o", str(back)])
        family_ok = back.read_text() == fam.read_text()
        notes.append(f"family round trip {family_ok}")
        s1 = _cli(["profile", str(h), "--seed", "4", "--samples", "300"])[1]
        s2 = _cli(["profile", str(h), "--seed", "4", "--samples", "300"])[1]
        seeded = s1 == s2 and s1 != ""
        code_missing, _, err_missing = _cli(["invariants", str(d / "missing.json")])
        code_cap, _, _ = _cli(["profile", str(g), "--exact", "--cap", "9"])
        code_usage, _, _ = _cli(["invariants", "--bogus", str(g)])
        bad = d / "bad.json"
        bad.write_text("{not json")
        code_bad, _, _ = _cli(["invariants", str(bad)])
        errors = (code_missing, json.loads(err_missing)["reason"], code_cap, code_usage, code_bad)
        errors_ok = errors == (1, "no such input", 2, 3, 1)
        notes.append(f"seeded reports identical {seeded}; error exits {errors}")
    return stable and same and family_ok and seeded and errors_ok, "; ".join(notes)


CRITERIA = [
    (1, "extraspecial(3,1) invariants and profile", check_1, 1.0),
    (2, "free_nil2(3,3) structure", check_2, 5.0),
    (3, "tree_group(3,[2,3]) branch bijection", check_3, 10.0),
    (4, "chain groups", check_4, 10.0),
    (5, "family groups: index gap", check_5, 30.0),
    (6, "extraspecial normaliser law", check_6, 60.0),
    (7, "prefix coding is almost disjoint", check_7, 1.0),
    (8, "sunflower guarantee", check_8, 5.0),
    (9, "height-fix lemma", check_9, 60.0),
    (10, "orbit search vs oracle", check_10, 5.0),
    (11, "decomposition over the corpus", check_11, 60.0),
    (12, "maximal abelians vs brute force", check_12, 60.0),
    (13, "block-sweep checkers", check_13, 10.0),
    (14, "CLI determinism and exit codes", check_14, 5.0),
]


def run(number: int) -> Outcome:
    _, title, fn, budget = CRITERIA[number - 1]
    start = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failed criterion, reported as such
        ok, detail = False, f"raised {type(exc).__name__}: {exc}"
    seconds = time.perf_counter() - start
    if ok and seconds > budget:
        ok, detail = False, detail + f"; over budget by {seconds - budget:.2f}s"
    return Outcome(number, title, bool(ok), seconds, budget, detail)


def run_all(only=None) -> list[Outcome]:
    return [run(n) for n, *_ in CRITERIA if not only or n in only]
