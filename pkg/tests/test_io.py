import json
from pathlib import Path

import jsonschema
import pytest

from formgroups import analysis as an, constructions as C, io
from formgroups.combinat import SetFamily, complete_tree
from formgroups.formgroup import structural_subgroups

DOCS = Path(__file__).resolve().parent.parent / "docs"
GROUP_SCHEMA = json.loads((DOCS / "groupfile.schema.json").read_text())
FAMILY_SCHEMA = json.loads((DOCS / "familyfile.schema.json").read_text())
CORPUS = C.corpus(3, 6)
EXTRA = {
    "tree[2,3]+d": C.tree_group(3, [2, 3], with_d=True),
    "family(2)": C.family_group(3, 2, SetFamily(4, ((0, 1), (2, 3)))),
    "dual+d": C.dual_extension(C.extraspecial(5, 1), [(1, 2)], fresh_d=True),
}


@pytest.mark.parametrize("name", sorted(CORPUS) + sorted(EXTRA))
def test_group_round_trip_is_byte_stable(name, tmp_path):
    G = {**CORPUS, **EXTRA}[name]
    text = io.dumps_group(G)
    jsonschema.validate(json.loads(text), GROUP_SCHEMA)
    path = tmp_path / "g.json"
    path.write_text(text)
    H, subs = io.load_group(path)
    assert H == G and subs == {}
    assert io.dumps_group(H) == text


def test_subgroups_round_trip(tmp_path):
    G = C.extraspecial(3, 2)
    named = {"center": structural_subgroups(G).center, "M0": an.maximal_abelians(G)[0],
             "line": an.closure(G, [G.element((1, 0, 0, 0), (2,))])}
    text = io.dumps_group(G, named)
    jsonschema.validate(json.loads(text), GROUP_SCHEMA)
    path = tmp_path / "g.json"
    path.write_text(text)
    H, subs = io.load_group(path)
    assert subs == named and io.dumps_group(H, subs) == text


def test_canonical_layout():
    text = io.dumps_group(C.extraspecial(3, 1))
    assert text.endswith("\n") and text == json.dumps(json.loads(text), sort_keys=True, indent=2) + "\n"
    assert json.loads(text)["tau"] == [[0, 1, [1]]]


@pytest.mark.parametrize("mutation,reason", [
    (lambda d: d.update(format_version=2), "unsupported format_version"),
    (lambda d: d.update(tau=[[1, 0, [1]]]), "malformed tau entry"),
    (lambda d: d.update(tau=[[0, 1, [1, 1]]]), "malformed tau entry"),
    (lambda d: d.pop("p"), "malformed group file"),
    (lambda d: d.update(p="three"), "malformed group file"),
])
def test_malformed_groups(mutation, reason):
    d = json.loads(io.dumps_group(C.extraspecial(3, 1)))
    mutation(d)
    with pytest.raises(io.InputError) as err:
        io.group_from_json(d)
    assert err.value.args[0] == reason


def test_p_two_in_file_is_domain_error():
    d = json.loads(io.dumps_group(C.extraspecial(3, 1)))
    d["p"] = 2
    with pytest.raises(Exception) as err:
        io.group_from_json(d)
    assert "exponent" in str(err.value)


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(io.InputError, match="no such input"):
        io.read_json(tmp_path / "nope.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(io.InputError, match="malformed json"):
        io.read_json(bad)


def test_family_and_tree_files(tmp_path):
    F = SetFamily(5, ((0, 1), (3,), ()))
    path = tmp_path / "f.json"
    path.write_text(io.dumps_family(F))
    jsonschema.validate(json.loads(path.read_text()), FAMILY_SCHEMA)
    assert io.load_family(path) == F
    t = complete_tree(2, 2)
    tp = tmp_path / "t.json"
    tp.write_text(io.dumps(t.to_json()))
    assert io.load_tree(tp) == t
    assert io.to_dot(t).count("->") == 6
    bad = tmp_path / "badfam.json"
    bad.write_text('{"sets": []}')
    with pytest.raises(io.InputError, match="malformed family file"):
        io.load_family(bad)


def test_report_plain_conversion():
    import numpy as np
    G = C.extraspecial(3, 1)
    rep = io.report({"command": "x"}, "abc", {"n": np.int64(3), "t": (1, 2), "S": an.maximal_abelians(G)[0],
                                              "flag": np.bool_(True)}, {"n": True}, 7)
    text = io.dumps(rep)
    back = json.loads(text)
    assert back["results"]["n"] == 3 and back["results"]["t"] == [1, 2] and back["results"]["flag"] is True
    assert back["input_digest"] == io.digest("abc") and "timing_seconds" not in back
    assert set(back["results"]["S"]) == {"U", "K", "lifts"}
