import contextlib
import io as _io
import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from formgroups import cli, io
from formgroups.combinat import SetFamily

DOCS = Path(__file__).resolve().parent.parent / "docs"
REPORT_SCHEMA = json.loads((DOCS / "reportfile.schema.json").read_text())
GROUP_SCHEMA = json.loads((DOCS / "groupfile.schema.json").read_text())


def run(*argv):
    out, err = _io.StringIO(), _io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = cli.main([str(a) for a in argv])
    return code, out.getvalue(), err.getvalue()


def report(*argv):
    code, out, err = run(*argv)
    assert code == 0, err
    rep = json.loads(out)
    jsonschema.validate(rep, REPORT_SCHEMA)
    return rep


@pytest.fixture
def heisenberg(tmp_path):
    path = tmp_path / "g.json"
    assert run("build", "extraspecial", "--p", 3, "--k", 1, "-o", path)[0] == 0
    return path


def test_build_then_invariants(heisenberg):
    jsonschema.validate(json.loads(heisenberg.read_text()), GROUP_SCHEMA)
    res = report("invariants", heisenberg)["results"]
    assert (res["order"], res["classification"]["kind"], res["g"], res["chi"], res["pmax"], res["P"]) == \
        (27, "extraspecial", 2, 4, 4, 5)


@pytest.mark.parametrize("argv", [
    ["extraspecial", "--k", "2"], ["free-nil2", "--n", "3"], ["tree", "--sizes", "2,3", "--with-d"],
    ["chain", "--n", "4", "--kind", "paired"], ["abelian", "--n", "2", "--m", "1"],
])
def test_build_variants_round_trip(argv, tmp_path):
    code, out, _ = run("build", *argv)
    assert code == 0
    jsonschema.validate(json.loads(out), GROUP_SCHEMA)
    path = tmp_path / "g.json"
    path.write_text(out)
    G, subs = io.load_group(path)
    assert io.dumps_group(G, subs) == out


def test_reports_are_deterministic(heisenberg):
    for cmd in (["invariants"], ["profile"], ["maximal-abelians"], ["decompose"]):
        a = run(*cmd, heisenberg)[1]
        b = run(*cmd, heisenberg)[1]
        assert a == b and a


def test_timing_only_on_request(heisenberg):
    assert "timing_seconds" not in report("invariants", heisenberg)
    assert report("invariants", heisenberg, "--timing")["timing_seconds"] >= 0


def test_profile_and_sampling(heisenberg, tmp_path):
    rep = report("profile", heisenberg)
    assert rep["exact"] == {"profile": True}
    assert {k: rep["results"][k] for k in ("gz", "maxN", "maxC", "maxCore", "maxAbelianN")} == \
        dict(gz=9, maxN=3, maxC=9, maxCore=3, maxAbelianN=3)
    big = tmp_path / "big.json"
    run("build", "tree", "--sizes", "2,3", "-o", big)
    a = report("profile", big, "--samples", 100, "--seed", 5)
    b = report("profile", big, "--samples", 100, "--seed", 5)
    assert a == b and a["exact"] == {"profile": False} and a["seed"] == 5


def test_maximal_abelians_and_decompose(heisenberg):
    res = report("maximal-abelians", heisenberg)["results"]
    assert res["count"] == 4 and res["indices"] == [3] and len(res["subgroups"]) == 4
    res = report("decompose", heisenberg)["results"]
    assert res["all_abelian"] and res["parts"] >= res["gnum"] == 2


def test_family_round_trip(tmp_path):
    fam = tmp_path / "fam.json"
    fam.write_text(io.dumps_family(SetFamily(4, ((2, 3), (0, 1), (1, 2)))))
    g = tmp_path / "g.json"
    back = tmp_path / "back.json"
    assert run("tree2group", fam, "--p", 3, "--k", 2, "-o", g)[0] == 0
    assert run("group2tree", g, "-o", back)[0] == 0
    assert io.load_family(back) == io.load_family(fam).canonical()


def test_sunflower_and_ad_convert(tmp_path):
    fam = tmp_path / "fam.json"
    fam.write_text(io.dumps_family(SetFamily(4, ((0, 1), (0, 2), (0, 3)))))
    res = report("sunflower", fam)["results"]
    assert res["found"] and res["root"] == [0]
    code, out, _ = run("ad-convert", fam, "--levels", 4)
    assert code == 0 and all(len(s) == 4 for s in json.loads(out)["sets"])


def test_diagonalize_and_filter(tmp_path):
    g = tmp_path / "g.json"
    run("build", "tree", "--sizes", "2,2,2", "--with-d", "-o", g)
    res = report("diagonalize", g, "--count", 2)["results"]
    assert res["check_failures"] == []
    res = report("filter", g, "--count", 2)["results"]
    assert res["check_failures"] == []
    sc = tmp_path / "sc.json"
    sc.write_text(json.dumps({"avoid": [[0] * 6], "fix": []}))
    res = report("diagonalize", g, "--scenario", sc)["results"]
    assert any(res["lam"]) and res["check_failures"] == []


def test_orbit_search():
    res = report("orbit-search", "--p", 3, "--orders", "1,1")["results"]
    assert res["automorphisms"] == 48 and res["orbit_size"] == 4
    a = report("orbit-search", "--orders", "2,1", "--random", 3, "--seed", 1)
    assert a == report("orbit-search", "--orders", "2,1", "--random", 3, "--seed", 1)


def test_orbit_search_from_file(tmp_path):
    auts = tmp_path / "auts.json"
    auts.write_text(json.dumps([[[1, 0], [0, 1]], [[1, 1], [0, 1]]]))
    rep = report("orbit-search", "--orders", "2,1", "--auts", auts)
    assert rep["results"]["orbit_size"] == 2 and rep["input_digest"].startswith("sha256:")


def error(argv):
    code, out, err = run(*argv)
    lines = err.strip().splitlines()
    assert len(lines) == 1 and out == ""
    line = json.loads(lines[0])
    assert line["exit"] == code
    return code, line


def test_missing_input(tmp_path):
    code, line = error(["invariants", tmp_path / "missing.json"])
    assert code == 1 and line["reason"] == "no such input" and line["error"] == "domain"


def test_malformed_input(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2")
    assert error(["invariants", bad])[0] == 1
    bad.write_text('{"format_version": 1}')
    code, line = error(["invariants", bad])
    assert code == 1 and line["reason"] == "malformed group file"


def test_domain_errors(heisenberg, tmp_path):
    assert error(["build", "extraspecial", "--p", 2])[0] == 1
    assert error(["group2tree", heisenberg])[0] == 1
    assert error(["orbit-search", "--orders", "1,1", "--p", 4])[0] == 1


def test_capacity(heisenberg):
    code, line = error(["profile", heisenberg, "--exact", "--cap", 9])
    assert code == 2 and line["error"] == "capacity"
    assert error(["orbit-search", "--orders", "4,3"])[0] == 2


def test_usage():
    assert error(["invariants"])[0] == 3
    assert error(["frobnicate"])[0] == 3
    assert error(["build", "tree", "--sizes", "2,x"])[0] == 3


def test_selftest_subset():
    code, out, _ = run("selftest", "--only", "1,7")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 2 and all(" PASS " in l for l in lines)


def test_console_entry_point(heisenberg):
    proc = subprocess.run([sys.executable, "-m", "formgroups", "invariants", str(heisenberg)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["results"]["order"] == 27
    proc = subprocess.run([sys.executable, "-m", "formgroups", "invariants", "nowhere.json"],
                          capture_output=True, text=True)
    assert proc.returncode == 1 and json.loads(proc.stderr)["reason"] == "no such input"
