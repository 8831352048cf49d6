"""Named groups, central automorphisms, and the two greedy automorphism builders."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import fpspace as fp
from .combinat import SetFamily
from .errors import DimensionMismatch, InfeasibleError, PreconditionError, StructuralError
from .formgroup import Element, FormGroup, Subgroup, direct_sum
from .fpspace import BilinearMap, Subspace


def pair_rank(i: int, j: int) -> int:
    """Colexicographic rank of the 2-subset ``{i, j}``, ``i < j``."""
    return j * (j - 1) // 2 + i


def extraspecial(p: int, k: int) -> FormGroup:
    """Order ``p^(1+2k)``: ``tau(e_2i, e_2i+1) = 1``, every other entry 0."""
    if k < 1:
        raise PreconditionError("k must be at least 1")
    entries = {(2 * i, 2 * i + 1): (1,) for i in range(k)}
    return FormGroup.from_entries(p, 2 * k, 1, entries, label=f"extraspecial({p},{k})")


def free_nil2(p: int, n: int) -> FormGroup:
    """Free class-2 exponent-p group on ``n`` generators; W has one coordinate per pair."""
    if n < 1:
        raise PreconditionError("n must be at least 1")
    m = n * (n - 1) // 2
    entries = {(i, j): fp.unit_vec(m, pair_rank(i, j)) for i, j in itertools.combinations(range(n), 2)}
    return FormGroup.from_entries(p, n, m, entries, label=f"free_nil2({p},{n})")


@dataclass(frozen=True)
class Block:
    v_start: int
    v_end: int
    w_start: int
    w_end: int

    @property
    def size(self) -> int:
        return self.v_end - self.v_start


def blocks_of(G: FormGroup) -> list[Block]:
    if not G.blocks:
        raise StructuralError("group carries no block structure")
    return [Block(*b) for b in G.blocks]


def tree_group(p: int, sizes: Sequence[int], with_d: bool = False) -> FormGroup:
    """Direct sum of ``free_nil2(p, n)`` over ``sizes``.

    With ``with_d`` an extra central coordinate ``d`` is appended last; it is
    not part of any block.
    """
    if not sizes or any(n < 1 for n in sizes):
        raise PreconditionError("block sizes must be positive")
    G = free_nil2(p, sizes[0])
    for n in sizes[1:]:
        G = direct_sum(G, free_nil2(p, n))
    if with_d:
        G = direct_sum(G, FormGroup(BilinearMap.zero(p, 0, 1)))
    blocks, v, w = [], 0, 0
    for n in sizes:
        m = n * (n - 1) // 2
        blocks.append((v, v + n, w, w + m))
        v, w = v + n, w + m
    label = f"tree_group({p},{list(sizes)}{',d' if with_d else ''})"
    return FormGroup(G.tau, blocks=tuple(blocks), label=label)


def chain_group(p: int, n: int, kind: str = "plain") -> FormGroup:
    """``[a_i, a_j] = a`` for ``i < j``; ``paired`` adds ``b_j`` with ``[a_i, b_j] = a^-1``
    for ``i < j``.  In the paired group coordinates are ``a_0..a_n-1, b_0..b_n-1``."""
    if n < 2:
        raise PreconditionError("n must be at least 2")
    entries = {(i, j): (1,) for i, j in itertools.combinations(range(n), 2)}
    if kind == "plain":
        return FormGroup.from_entries(p, n, 1, entries, label=f"chain_group({p},{n},plain)")
    if kind != "paired":
        raise PreconditionError(f"unknown chain kind {kind!r}")
    entries.update({(i, n + j): (-1,) for i, j in itertools.combinations(range(n), 2)})
    return FormGroup.from_entries(p, 2 * n, 1, entries, label=f"chain_group({p},{n},paired)")


def chain_witnesses(G: FormGroup) -> tuple[Subgroup, Subgroup]:
    """The abelian pair ``<a_i + b_i>`` and ``<b_i>`` of a paired chain group."""
    n = G.gen_dim // 2
    a0 = [G.element(fp.add(G.p, fp.unit_vec(2 * n, i), fp.unit_vec(2 * n, n + i))) for i in range(n)]
    a1 = [G.gen(n + i) for i in range(n)]
    return Subgroup.generated(G, a0), Subgroup.generated(G, a1)


@dataclass(frozen=True)
class CentralAut:
    """``(v, w) -> (v, w + lam(v) e_target)``.

    Always an automorphism: the added term is linear in ``v`` and leaves the
    skew form alone.  The homomorphism law is still checked on basis pairs.
    """

    parent: FormGroup
    lam: tuple
    target: int

    def __post_init__(self):
        G = self.parent
        if len(self.lam) != G.gen_dim:
            raise DimensionMismatch(f"functional of length {len(self.lam)} on V of dim {G.gen_dim}")
        if not 0 <= self.target < G.cen_dim:
            raise DimensionMismatch(f"target coordinate {self.target} out of range")
        object.__setattr__(self, "lam", fp.vec(G.p, self.lam))
        for i, j in itertools.product(range(G.gen_dim), repeat=2):
            x, y = G.gen(i), G.gen(j)
            assert self(G.multiply(x, y)) == G.multiply(self(x), self(y))

    def __call__(self, x: Element) -> Element:
        G = self.parent
        k = fp.dot(G.p, self.lam, x.v)
        w = list(x.w)
        w[self.target] = (w[self.target] + k) % G.p
        return Element(x.v, tuple(w))

    def compose(self, other: "CentralAut") -> "CentralAut":
        if other.target != self.target:
            raise PreconditionError("central automorphisms with different targets")
        return CentralAut(self.parent, fp.add(self.parent.p, self.lam, other.lam), self.target)

    @classmethod
    def identity(cls, G: FormGroup, target: int | None = None) -> "CentralAut":
        return cls(G, fp.zero_vec(G.gen_dim), G.cen_dim - 1 if target is None else target)


def dual_extension(G: FormGroup, functionals: Sequence[Sequence[int]], fresh_d: bool = False,
                   target: int = 0) -> FormGroup:
    """Adjoin one generator ``phi_i`` per functional, acting by ``a -> a + lam_i(a) e_target``.

    The semidirect product is again a FormGroup: V gains one coordinate per
    functional and ``[a, phi_i] = lam_i(a) e_target``.  With ``fresh_d`` a new
    central coordinate is appended and used as the target.
    """
    p, n, m = G.p, G.gen_dim, G.cen_dim
    lams = [fp.vec(p, f) for f in functionals]
    for f in lams:
        if len(f) != n:
            raise DimensionMismatch(f"functional of length {len(f)} on V of dim {n}")
    m2 = m + 1 if fresh_d else m
    t_index = m if fresh_d else target
    if not 0 <= t_index < m2:
        raise DimensionMismatch(f"target coordinate {t_index} out of range")
    r = len(lams)
    t = np.zeros((n + r, n + r, m2), dtype=np.int64)
    t[:n, :n, :m] = G.tau.table
    for i, f in enumerate(lams):
        t[:n, n + i, t_index] = f
    H = FormGroup(BilinearMap(p, n + r, m2, t), blocks=G.blocks,
                  adjoined={"base_gen_dim": n, "target": t_index, "fresh_d": fresh_d,
                            "functionals": [list(f) for f in lams]},
                  label=f"dual_extension({G.label or 'G'},{r})")
    # central automorphisms of order p commute with each other and fix W, so the
    # rewriting as a form group is faithful only if these commutators come out right
    for i, f in enumerate(lams):
        for b in range(n):
            c = H.commutator(H.gen(b), H.gen(n + i))
            assert c.w[t_index] == f[b] and not any(c.v)
    return H


def adjoined_generators(H: FormGroup) -> list[Element]:
    if not H.adjoined:
        raise StructuralError("group has no adjoined automorphisms")
    n = H.adjoined["base_gen_dim"]
    return [H.gen(i) for i in range(n, H.gen_dim)]


def family_group(p: int, k: int, family: SetFamily) -> FormGroup:
    """``extraspecial(p, k)`` extended by one automorphism per set of ``family``.

    Set elements index the 2k generators (0-based); the automorphism for
    ``A`` multiplies ``a_b`` by the central generator exactly when ``b`` is in ``A``.
    """
    if family.universe_size != 2 * k:
        raise DimensionMismatch(f"family universe {family.universe_size} != 2k = {2 * k}")
    lams = [[1 if b in set(s) else 0 for b in range(2 * k)] for s in family.sets]
    H = dual_extension(extraspecial(p, k), lams, target=0)
    return FormGroup(H.tau, family=tuple(family.sets), adjoined=H.adjoined,
                     label=f"family_group({p},{k},{len(family)})")


def family_of(H: FormGroup) -> SetFamily:
    if H.family is None:
        raise StructuralError("group carries no family annotation")
    return SetFamily(H.adjoined["base_gen_dim"], H.family)


# tree-group automorphisms


def _block_coords(G: FormGroup, blocks: Sequence[Block], indices) -> Subspace:
    n = G.gen_dim
    return Subspace(G.p, n, tuple(fp.unit_vec(n, c) for i in indices
                                  for c in range(blocks[i].v_start, blocks[i].v_end)))


def branch_subgroup(G: FormGroup, branch: Sequence[Sequence[int]]) -> Subgroup:
    """Maximal abelian ``<W, g(0), g(1), ...>`` for one nonzero vector per block."""
    blocks = blocks_of(G)
    if len(branch) != len(blocks):
        raise DimensionMismatch("one vector per block required")
    vecs = []
    for b, g in zip(blocks, branch):
        if len(g) != b.size or not any(x % G.p for x in g):
            raise DimensionMismatch(f"block vector {g} must be nonzero of length {b.size}")
        v = [0] * G.gen_dim
        v[b.v_start:b.v_end] = g
        vecs.append(tuple(v))
    return Subgroup.from_pair(G, Subspace(G.p, G.gen_dim, tuple(vecs)))


def branch_of(G: FormGroup, M: Subgroup) -> tuple:
    """Inverse of :func:`branch_subgroup`: the normalised block vectors of ``M``."""
    blocks = blocks_of(G)
    out = []
    for b in blocks:
        proj = Subspace(G.p, b.size, tuple(u[b.v_start:b.v_end] for u in M.U.basis))
        if proj.dim != 1:
            raise StructuralError("subgroup is not a branch subgroup of the tree group")
        out.append(proj.basis[0])
    return tuple(out)


def all_branches(G: FormGroup) -> list[tuple]:
    """Every branch tuple: one projective point per block."""
    blocks = blocks_of(G)
    per_block = [list(fp.full_space(G.p, b.size).points()) for b in blocks]
    return [tuple(t) for t in itertools.product(*per_block)]


def _block_line(M: Subgroup, b: Block) -> Subspace:
    p = M.parent.p
    return Subspace(p, b.size, tuple(u[b.v_start:b.v_end] for u in M.U.basis))


def _allowed_values(G: FormGroup, b: Block, sides: Sequence[Subgroup]):
    """Functionals on one block vanishing on every side subgroup's line there,
    in lexicographic order."""
    constraints = [line_vec for M in sides for line_vec in _block_line(M, b).basis]
    basis = fp.kernel(G.p, constraints, b.size)
    vals = {fp.combine(G.p, c, basis, b.size) for c in itertools.product(range(G.p), repeat=len(basis))}
    return sorted(vals)


def _restrict(lam, blocks, upto):
    return tuple(tuple(lam[blocks[i].v_start:blocks[i].v_end]) for i in range(upto))


def _as_lam(G, a) -> tuple:
    return fp.vec(G.p, a.lam if isinstance(a, CentralAut) else a)


@dataclass
class DiagonalResult:
    aut: CentralAut
    windows: list      # f(0), f(1), ... as block indices
    log: list = field(default_factory=list)


def diagonal_automorphism(G: FormGroup, avoid: Sequence, fix: Sequence[Subgroup]) -> DiagonalResult:
    """Sweep the blocks building a central automorphism step by step.

    Step ``n`` claims the blocks ``f(n) <= i < f(n+1)`` and picks values there so
    that the automorphism so far differs from each ``avoid[k]``, ``k < n``, on
    blocks below ``f(n+1)`` while vanishing on the lines of each ``fix[k]``,
    ``k < n``, inside the claimed blocks.  Windows are as short as possible and
    values are the lexicographically first that distinguish the most pending
    automorphisms, so the output is canonical.  Blocks never claimed stay 0.
    """
    blocks = blocks_of(G)
    d = G.cen_dim - 1
    if any(b.w_start <= d < b.w_end for b in blocks):
        raise StructuralError("group needs an extra central coordinate d outside the blocks")
    avoid = [_as_lam(G, a) for a in avoid]
    lam = list(fp.zero_vec(G.gen_dim))
    f = [0]
    log = []
    steps = max(len(avoid), len(fix))
    for n in range(steps + 1):
        cur = f[n]
        sides = list(fix[:n])
        pending = [k for k in range(min(n, len(avoid)))
                   if _restrict(lam, blocks, cur) == _restrict(avoid[k], blocks, cur)]
        while pending:
            if cur == len(blocks):
                raise InfeasibleError(
                    f"condition (iii) at step {n}: no block left to differ from avoid[{pending[0]}]")
            b = blocks[cur]
            options = _allowed_values(G, b, sides)
            targets = [avoid[k][b.v_start:b.v_end] for k in pending]
            best = max(options, key=lambda o: (sum(o != t for t in targets), tuple(-x for x in o)))
            lam[b.v_start:b.v_end] = best
            log.append((n, cur, best))
            pending = [k for k, t in zip(pending, targets) if best == t]
            cur += 1
        f.append(cur)
    return DiagonalResult(CentralAut(G, tuple(lam), d), f, log)


def check_diagonal(G: FormGroup, result: DiagonalResult, avoid: Sequence, fix: Sequence[Subgroup]) -> list[str]:
    """Re-verify the four block conditions from scratch; returns the failures."""
    failures = []
    blocks = blocks_of(G)
    phi, f = result.aut, result.windows
    d = G.cen_dim - 1
    dline = Subspace(G.p, G.cen_dim, (fp.unit_vec(G.cen_dim, d),))
    for i in range(G.gen_dim):
        x = G.gen(i)
        y = phi(x)
        if y.v != x.v or fp.sub(G.p, y.w, x.w) not in dline:
            failures.append(f"(i) generator {i}")
    for k in range(G.cen_dim):
        if phi(G.central(k)) != G.central(k):
            failures.append(f"(ii) central coordinate {k}")
    lam = phi.lam
    avoid = [_as_lam(G, a) for a in avoid]
    for n in range(len(f) - 1):
        win = _block_coords(G, blocks, range(f[n + 1]))
        for k in range(min(n, len(avoid))):
            if all(fp.dot(G.p, lam, e) == fp.dot(G.p, avoid[k], e) for e in win.basis):
                failures.append(f"(iii) step {n} avoid {k}")
        window = _block_coords(G, blocks, range(f[n], f[n + 1]))
        for k in range(min(n, len(fix))):
            for v in fix[k].U.intersect(window).basis:
                if fp.dot(G.p, lam, v):
                    failures.append(f"(iv) step {n} fix {k}")
    if any(lam[blocks[i].v_start:blocks[i].v_end] != fp.zero_vec(blocks[i].size)
           for i in range(f[-1], len(blocks))):
        failures.append("unclaimed blocks are not the identity")
    return failures


@dataclass
class Condition:
    """A finite partial central automorphism on blocks ``< domain`` plus a side set."""

    domain: int
    values: tuple            # one tuple per block in the domain
    side: tuple              # maximal abelian subgroups


@dataclass
class FilterResult:
    aut: CentralAut
    chain: list
    log: list


def qc_filter(G: FormGroup, requirements: Sequence[tuple[Subgroup, Sequence[int]]]) -> FilterResult:
    """Meet each requirement ``(M, psi)`` in turn by extending a finite condition.

    A requirement asks for ``M`` in the side set and for a domain element on
    which the automorphism differs from ``psi``.  New blocks must vanish on
    the lines of every subgroup already in the side set.  The union of the
    final condition, extended by the identity, is returned with the chain of
    conditions and a log of ``(block or None, requirement index)``.
    """
    blocks = blocks_of(G)
    d = G.cen_dim - 1
    cond = Condition(0, (), ())
    chain = [cond]
    log = []
    for r, (M, psi) in enumerate(requirements):
        psi = _as_lam(G, psi)
        values = list(cond.values)
        cur = cond.domain
        differs = any(values[i] != psi[blocks[i].v_start:blocks[i].v_end] for i in range(cur))
        resolved = None
        while not differs:
            if cur == len(blocks):
                raise InfeasibleError(f"requirement {r}: no free block can differ from its automorphism")
            b = blocks[cur]
            options = _allowed_values(G, b, cond.side)
            target = psi[b.v_start:b.v_end]
            choice = next((o for o in options if o != target), options[0])
            values.append(choice)
            differs = choice != target
            resolved = cur
            cur += 1
        cond = Condition(cur, tuple(values), cond.side + (M,))
        chain.append(cond)
        log.append((resolved, r))
    lam = list(fp.zero_vec(G.gen_dim))
    for i, val in enumerate(cond.values):
        lam[blocks[i].v_start:blocks[i].v_end] = val
    return FilterResult(CentralAut(G, tuple(lam), d), chain, log)


def check_filter(G: FormGroup, result: FilterResult, requirements) -> list[str]:
    """Verify the chain is descending in the condition order and meets each requirement."""
    failures = []
    blocks = blocks_of(G)
    chain = result.chain
    for idx, (old, new) in enumerate(zip(chain, chain[1:])):
        if new.domain < old.domain or tuple(new.values[:old.domain]) != tuple(old.values):
            failures.append(f"step {idx}: not an extension")
        if not set(map(id, old.side)) <= set(map(id, new.side)):
            failures.append(f"step {idx}: side set shrank")
        fresh = _block_coords(G, blocks, range(old.domain, new.domain))
        lam_new = [0] * G.gen_dim
        for i, val in enumerate(new.values):
            lam_new[blocks[i].v_start:blocks[i].v_end] = val
        for M in old.side:
            for v in M.U.intersect(fresh).basis:
                if fp.dot(G.p, lam_new, v):
                    failures.append(f"step {idx}: moves an element of an old side subgroup")
        M, psi = requirements[idx]
        psi = _as_lam(G, psi)
        if not any(M is S for S in new.side):
            failures.append(f"requirement {idx}: subgroup missing from side set")
        dom = _block_coords(G, blocks, range(new.domain))
        if all(fp.dot(G.p, lam_new, e) == fp.dot(G.p, psi, e) for e in dom.basis):
            failures.append(f"requirement {idx}: agrees with its automorphism on the domain")
    final = list(fp.zero_vec(G.gen_dim))
    for i, val in enumerate(chain[-1].values):
        final[blocks[i].v_start:blocks[i].v_end] = val
    if tuple(final) != result.aut.lam:
        failures.append("returned automorphism is not the union of the chain")
    return failures


def random_diagonal_scenario(G: FormGroup, rng, count: int) -> dict:
    """Seeded inputs for :func:`diagonal_automorphism` in JSON form.

    ``avoid`` holds ``count`` functionals on V (the first is the identity),
    ``fix`` holds ``count`` branch tuples.
    """
    avoid = [[0] * G.gen_dim] + [[int(x) for x in rng.integers(0, G.p, G.gen_dim)]
                                 for _ in range(count - 1)]
    branches = all_branches(G)
    fix = [[list(v) for v in branches[int(rng.integers(len(branches)))]] for _ in range(count)]
    return {"avoid": avoid[:count], "fix": fix}


def random_filter_scenario(G: FormGroup, rng, count: int) -> dict:
    """Seeded ``count`` requirements ``{branch, psi}`` for :func:`qc_filter`."""
    branches = all_branches(G)
    return {"requirements": [
        {"branch": [list(v) for v in branches[int(rng.integers(len(branches)))]],
         "psi": [int(x) for x in rng.integers(0, G.p, G.gen_dim)]}
        for _ in range(count)]}


def corpus(p: int = 3, max_exponent: int = 6) -> dict[str, FormGroup]:
    """Named constructions of order at most ``p^max_exponent``, for sweeps."""
    from .formgroup import abelian_group, central_product, direct_sum

    E1 = extraspecial(p, 1)
    candidates = {
        "abelian(2,1)": lambda: abelian_group(p, 2, 1),
        "extraspecial(1)": lambda: E1,
        "extraspecial(2)": lambda: extraspecial(p, 2),
        "free_nil2(2)": lambda: free_nil2(p, 2),
        "free_nil2(3)": lambda: free_nil2(p, 3),
        "tree[2]": lambda: tree_group(p, [2]),
        "tree[2,2]": lambda: tree_group(p, [2, 2]),
        "tree[2]+d": lambda: tree_group(p, [2], with_d=True),
        "E1+E1": lambda: direct_sum(E1, E1),
        "E1*E1": lambda: central_product(E1, E1),
        "E1+Z": lambda: direct_sum(E1, abelian_group(p, 1)),
        "family(1,{0},{1})": lambda: family_group(p, 1, SetFamily(2, ((0,), (1,)))),
        "family(1,{0,1})": lambda: family_group(p, 1, SetFamily(2, ((0, 1),))),
    }
    for n in range(2, max_exponent):
        candidates[f"chain_plain({n})"] = lambda n=n: chain_group(p, n, "plain")
    for n in range(2, max_exponent // 2 + 1):
        candidates[f"chain_paired({n})"] = lambda n=n: chain_group(p, n, "paired")
    out = {}
    for name, make in candidates.items():
        G = make()
        if G.order <= p ** max_exponent:
            out[name] = G
    return out
