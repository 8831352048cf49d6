"""Finite set combinatorics: sunflowers, level trees, prefix codings, branch functions."""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, PreconditionError, StructuralError
from .formgroup import Element, FormGroup, Subgroup

EXHAUSTIVE_SUNFLOWER_SETS = 20


@dataclass(frozen=True)
class SetFamily:
    """Subsets of ``range(universe_size)``, each a sorted tuple."""

    universe_size: int
    sets: tuple = ()

    def __post_init__(self):
        sets = tuple(tuple(sorted(set(int(x) for x in s))) for s in self.sets)
        for s in sets:
            if s and (s[0] < 0 or s[-1] >= self.universe_size):
                raise DimensionMismatch(f"set {s} not inside range({self.universe_size})")
        object.__setattr__(self, "sets", sets)

    def __len__(self):
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)

    def canonical(self) -> "SetFamily":
        return SetFamily(self.universe_size, tuple(sorted(set(self.sets))))

    def is_uniform(self) -> bool:
        return len({len(s) for s in self.sets}) <= 1

    def to_json(self) -> dict:
        return {"universe_size": self.universe_size, "sets": [list(s) for s in self.sets]}

    @classmethod
    def from_json(cls, data: dict) -> "SetFamily":
        return cls(int(data["universe_size"]), tuple(tuple(s) for s in data["sets"]))


def random_family(rng, universe_size: int, count: int, size: int | None = None) -> SetFamily:
    """``count`` distinct subsets, all of ``size`` elements when given."""
    if size is not None and count > math.comb(universe_size, size):
        raise PreconditionError("not enough distinct subsets of that size")
    seen: set = set()
    while len(seen) < count:
        if size is None:
            mask = rng.integers(0, 2, universe_size)
            s = tuple(int(i) for i in np.flatnonzero(mask))
        else:
            s = tuple(sorted(int(i) for i in rng.choice(universe_size, size, replace=False)))
        seen.add(s)
    return SetFamily(universe_size, tuple(sorted(seen)))


# sunflowers


@dataclass
class Sunflower:
    root: tuple
    members: list
    premise_met: bool
    method: str


def erdos_rado_bound(k: int, r: int) -> int:
    return math.factorial(k) * (r - 1) ** k


def is_sunflower(sets: Sequence[Sequence[int]], root: Sequence[int]) -> bool:
    root = set(root)
    return all(set(a) & set(b) == root for a, b in itertools.combinations(sets, 2))


def _greedy(sets: list[frozenset], r: int):
    # maximal pairwise-disjoint subfamily, then pigeonhole on its union
    chosen, used = [], set()
    for s in sets:
        if not (s & used):
            chosen.append(s)
            used |= s
            if len(chosen) == r:
                return frozenset(), chosen
    if not used:
        return None
    counts = Counter(x for s in sets for x in s if x in used)
    for x, _ in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])):
        sub = [s - {x} for s in sets if x in s]
        if len(sub) < r:
            break
        found = _greedy(sub, r)
        if found is not None:
            root, members = found
            return root | {x}, [m | {x} for m in members]
    return None


def _exhaustive(sets: list[frozenset], r: int):
    for combo in itertools.combinations(sets, r):
        root = frozenset.intersection(*combo)
        if all(a & b == root for a, b in itertools.combinations(combo, 2)):
            return root, list(combo)
    return None


def sunflower(family: SetFamily, petals: int,
              exhaustive_below: int = EXHAUSTIVE_SUNFLOWER_SETS) -> Sunflower | None:
    """Find ``petals`` members pairwise meeting in one common root.

    Runs the disjoint-matching / pigeonhole recursion from the classical
    proof; small families that defeat it are searched exhaustively.  Returns
    None when nothing is found.  ``premise_met`` reports whether the family
    is uniform and larger than ``k! (r-1)^k``, in which case a sunflower is
    guaranteed.
    """
    sets = [frozenset(s) for s in dict.fromkeys(family.sets)]
    k = max((len(s) for s in sets), default=0)
    premise = family.is_uniform() and len(sets) > erdos_rado_bound(k, petals)
    if petals <= 1:
        return Sunflower(tuple(sorted(sets[0])), [tuple(sorted(sets[0]))], premise, "trivial") if sets else None
    found = _greedy(sets, petals)
    method = "greedy"
    if found is None and len(sets) <= exhaustive_below:
        found = _exhaustive(sets, petals)
        method = "exhaustive"
    if found is None:
        return None
    root, members = found
    members = [tuple(sorted(m)) for m in members]
    assert is_sunflower(members, root)
    return Sunflower(tuple(sorted(root)), members, premise, method)


# prefix coding


def ad_convert(family: SetFamily, level_count: int | None = None) -> SetFamily:
    """Recode each set by the codes of its proper-level prefixes.

    Every input set ``A`` over the ordered levels ``0 .. h-1`` becomes
    ``{code(b, A & range(b)) : 1 <= b <= h}``.  Codes are handed out in
    order of first appearance while scanning the sets left to right.  Two
    outputs share exactly the prefixes on which their inputs agree, so
    distinct inputs meet in fewer than ``h`` points.
    """
    h = family.universe_size if level_count is None else level_count
    if len(set(family.sets)) != len(family.sets):
        raise PreconditionError("duplicate sets in family")
    for s in family.sets:
        if s and s[-1] >= h:
            raise DimensionMismatch(f"set {s} exceeds {h} levels")
    codes: dict = {}
    out = []
    for s in family.sets:
        row = []
        for b in range(1, h + 1):
            node = (b, tuple(x for x in s if x < b))
            row.append(codes.setdefault(node, len(codes)))
        out.append(tuple(row))
    return SetFamily(max(len(codes), 1), tuple(out))


def common_prefix_length(a: Sequence[int], b: Sequence[int], h: int) -> int:
    sa, sb = set(a), set(b)
    n = 0
    for level in range(h):
        if (level in sa) != (level in sb):
            break
        n += 1
    return n


# level trees


@dataclass(frozen=True)
class LevelTree:
    """``parents[i][j]`` is the index in level ``i`` of node ``j`` of level ``i + 1``.

    Level 0 holds only the root, so ``parents`` has one entry per level below it.
    """

    parents: tuple = ()

    def __post_init__(self):
        parents = tuple(tuple(int(x) for x in lvl) for lvl in self.parents)
        width = 1
        for i, lvl in enumerate(parents):
            if any(x < 0 or x >= width for x in lvl):
                raise StructuralError(f"level {i + 1} has a parent link outside level {i}")
            width = len(lvl)
        object.__setattr__(self, "parents", parents)

    @property
    def height(self) -> int:
        return len(self.parents)

    def level_size(self, i: int) -> int:
        return 1 if i == 0 else len(self.parents[i - 1])

    def children(self, i: int, j: int) -> list[int]:
        if i >= self.height:
            return []
        return [c for c, par in enumerate(self.parents[i]) if par == j]

    def canonical_form(self, i: int = 0, j: int = 0):
        """Unordered-tree canonical form; equal iff isomorphic as rooted trees."""
        return tuple(sorted(self.canonical_form(i + 1, c) for c in self.children(i, j)))

    def node_ids(self) -> dict:
        """Global ids for non-root nodes, numbered level by level."""
        ids, nxt = {}, 0
        for i in range(1, self.height + 1):
            for j in range(self.level_size(i)):
                ids[(i, j)] = nxt
                nxt += 1
        return ids

    def to_json(self) -> dict:
        return {"height": self.height, "parents": [list(l) for l in self.parents]}

    @classmethod
    def from_json(cls, data: dict) -> "LevelTree":
        return cls(tuple(tuple(l) for l in data["parents"]))

    def to_dot(self) -> str:
        lines = ["digraph tree {", '  "0:0" [label="root"];']
        for i, lvl in enumerate(self.parents):
            for j, par in enumerate(lvl):
                lines.append(f'  "{i}:{par}" -> "{i + 1}:{j}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


Branch = tuple  # ((level, index), ...) from level 1 down to a leaf


def branches(t: LevelTree) -> list[Branch]:
    """All maximal root-to-leaf paths, depth first, children in index order."""
    out = []

    def walk(i, j, path):
        kids = t.children(i, j)
        if not kids:
            if path:
                out.append(tuple(path))
            return
        for c in kids:
            walk(i + 1, c, path + [(i + 1, c)])

    walk(0, 0, [])
    return out


def branches_as_family(t: LevelTree) -> SetFamily:
    ids = t.node_ids()
    return SetFamily(max(len(ids), 1), tuple(tuple(ids[n] for n in b) for b in branches(t)))


def tree_from_family(family: SetFamily) -> LevelTree:
    """Prefix tree of the sets' sorted element chains."""
    nodes: list[dict] = [{(): 0}]
    parents: list[list[int]] = []
    for s in family.sets:
        for i in range(1, len(s) + 1):
            if len(nodes) <= i:
                nodes.append({})
                parents.append([])
            pre = s[:i]
            if pre not in nodes[i]:
                nodes[i][pre] = len(parents[i - 1])
                parents[i - 1].append(nodes[i - 1][s[:i - 1]])
    return LevelTree(tuple(tuple(l) for l in parents))


def complete_tree(arity: int, height: int) -> LevelTree:
    levels, width = [], 1
    for _ in range(height):
        levels.append(tuple(j // arity for j in range(width * arity)))
        width *= arity
    return LevelTree(tuple(levels))


def random_tree(rng, height: int, max_children: int = 3) -> LevelTree:
    """Seeded random level tree; every node below the root has a parent,
    leaves may stop early."""
    levels, width = [], 1
    for _ in range(height):
        lvl = []
        for par in range(width):
            lvl.extend([par] * int(rng.integers(0, max_children + 1)))
        if not lvl:
            break
        levels.append(tuple(lvl))
        width = len(lvl)
    return LevelTree(tuple(levels))


def branch_family(t: LevelTree) -> SetFamily:
    """Branches of a level tree as subsets of the level set.

    Only for binary trees: a branch becomes the set of levels at which it
    takes the second child, the form :func:`ad_convert` consumes.
    """
    out = []
    for b in branches(t):
        s, prev = [], 0
        for level, j in b:
            kids = t.children(level - 1, prev)
            if len(kids) > 2:
                raise StructuralError("branch_family needs at most two children per node")
            if kids.index(j) == 1:
                s.append(level - 1)
            prev = j
        out.append(tuple(s))
    return SetFamily(t.height, tuple(out))


# branch functions read off commutators


@dataclass
class BranchFunctions:
    p: int
    vectors: list          # vectors[b][a] = k with [probe_a, rep_b] = k * a_central

    def supports(self, universe_size: int | None = None) -> SetFamily:
        n = universe_size if universe_size is not None else (len(self.vectors[0]) if self.vectors else 0)
        return SetFamily(n, tuple(tuple(i for i, k in enumerate(v) if k) for v in self.vectors))

    def distinct(self) -> int:
        return len({tuple(v) for v in self.vectors})


def extract_tree(G: FormGroup, probes: Sequence[Element], reps: Sequence[Element],
                 central_gen: int) -> BranchFunctions:
    """``g_b(a) = k`` iff ``[probe_a, rep_b] = k * e_central``.

    Raises StructuralError when a commutator leaves the central line.  Two
    reps get the same function exactly when they differ by an element
    centralising every probe; that equivalence is asserted.
    """
    p, m = G.p, G.cen_dim
    if not 0 <= central_gen < m:
        raise DimensionMismatch(f"central index {central_gen} out of range")
    vectors = []
    for b, f in enumerate(reps):
        row = []
        for a, u in enumerate(probes):
            c = G.commutator(u, f)
            if any(c.v) or any(x for i, x in enumerate(c.w) if i != central_gen):
                raise StructuralError(f"commutator of probe {a} and rep {b} leaves the central line")
            row.append(c.w[central_gen])
        vectors.append(row)
    for (i, fi), (j, fj) in itertools.combinations(enumerate(reps), 2):
        quotient = G.multiply(G.inverse(fi), fj)
        centralises = all(G.commutator(u, quotient) == G.identity for u in probes)
        assert centralises == (vectors[i] == vectors[j])
    return BranchFunctions(p, vectors)
