"""JSON persistence for groups, families, trees and reports, plus DOT export.

Files are written canonically (sorted keys, two-space indent, trailing
newline), so re-serialising a parsed file reproduces it byte for byte.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from . import fpspace as fp
from .combinat import LevelTree, SetFamily
from .errors import FormGroupError
from .formgroup import Element, FormGroup, Subgroup
from .fpspace import BilinearMap, Subspace

FORMAT_VERSION = 1


class InputError(FormGroupError, ValueError):
    """A file that is missing, unreadable or does not match its schema."""


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def digest(text: str | bytes) -> str:
    data = text.encode() if isinstance(text, str) else text
    return "sha256:" + hashlib.sha256(data).hexdigest()


def read_text(path) -> str:
    path = Path(path)
    if not path.is_file():
        raise InputError("no such input", str(path))
    return path.read_text()


def read_json(path):
    text = read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError("malformed json", f"{path}: {exc.msg} at line {exc.lineno}") from None


def write_text(path, text: str) -> None:
    Path(path).write_text(text)


# groups


def subgroup_to_json(S: Subgroup) -> dict:
    return {"U": [list(u) for u in S.U.basis], "K": [list(k) for k in S.K.basis],
            "lifts": [list(a) for a in S.lifts]}


def subgroup_from_json(G: FormGroup, d: dict) -> Subgroup:
    U = Subspace(G.p, G.gen_dim, tuple(tuple(u) for u in d["U"]))
    K = Subspace(G.p, G.cen_dim, tuple(tuple(k) for k in d["K"]))
    S = Subgroup(G, U, K, tuple(tuple(a) for a in d["lifts"]) if d.get("lifts") else ())
    return S


def element_to_json(x: Element) -> list:
    return [list(x.v), list(x.w)]


def group_to_json(G: FormGroup, subgroups: dict | None = None) -> dict:
    out = {
        "format_version": FORMAT_VERSION,
        "p": G.p,
        "gen_dim": G.gen_dim,
        "cen_dim": G.cen_dim,
        "tau": [[i, j, list(w)] for (i, j), w in sorted(G.tau.entries().items()) if i < j],
    }
    if G.label:
        out["label"] = G.label
    if G.blocks is not None:
        out["blocks"] = [list(b) for b in G.blocks]
    if G.family is not None:
        out["family"] = [list(s) for s in G.family]
    if G.adjoined is not None:
        out["adjoined"] = G.adjoined
    if subgroups:
        out["subgroups"] = {name: subgroup_to_json(S) for name, S in subgroups.items()}
    return out


def group_from_json(d: dict) -> tuple[FormGroup, dict]:
    try:
        if d.get("format_version") != FORMAT_VERSION:
            raise InputError("unsupported format_version", str(d.get("format_version")))
        p, n, m = int(d["p"]), int(d["gen_dim"]), int(d["cen_dim"])
        entries = {}
        for i, j, w in d["tau"]:
            if not 0 <= i < j < n or len(w) != m:
                raise InputError("malformed tau entry", f"({i}, {j}, {w})")
            entries[(int(i), int(j))] = tuple(int(x) for x in w)
        blocks = tuple(tuple(int(x) for x in b) for b in d["blocks"]) if "blocks" in d else None
        family = tuple(tuple(int(x) for x in s) for s in d["family"]) if "family" in d else None
        G = FormGroup(BilinearMap.from_entries(p, n, m, entries), blocks=blocks, family=family,
                      adjoined=d.get("adjoined"), label=d.get("label", ""))
        subs = {name: subgroup_from_json(G, s) for name, s in d.get("subgroups", {}).items()}
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FormGroupError):
            raise
        raise InputError("malformed group file", repr(exc)) from None
    return G, subs


def dumps_group(G: FormGroup, subgroups: dict | None = None) -> str:
    return dumps(group_to_json(G, subgroups))


def load_group(path) -> tuple[FormGroup, dict]:
    return group_from_json(read_json(path))


# families and trees


def load_family(path) -> SetFamily:
    d = read_json(path)
    try:
        return SetFamily.from_json(d)
    except (KeyError, TypeError) as exc:
        raise InputError("malformed family file", repr(exc)) from None


def dumps_family(F: SetFamily) -> str:
    return dumps(F.to_json())


def load_tree(path) -> LevelTree:
    d = read_json(path)
    try:
        return LevelTree.from_json(d)
    except (KeyError, TypeError) as exc:
        raise InputError("malformed tree file", repr(exc)) from None


def to_dot(t: LevelTree) -> str:
    return t.to_dot()


# reports


def report(command: dict, input_text: str | None, results: dict, exact: dict | None = None,
           seed: int | None = None, timing: float | None = None) -> dict:
    out = {
        "format_version": FORMAT_VERSION,
        "command": command,
        "input_digest": digest(input_text) if input_text is not None else None,
        "results": _plain(results),
        "exact": exact or {},
        "seed": seed,
    }
    if timing is not None:
        out["timing_seconds"] = round(timing, 6)
    return out


def _plain(x):
    """Convert tuples, numpy scalars and dataclass-like values to JSON types."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, Subgroup):
        return subgroup_to_json(x)
    if isinstance(x, Subspace):
        return [list(b) for b in x.basis]
    return x
