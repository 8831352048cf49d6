"""Subgroup-level computations on FormGroups.

Almost everything reduces to the skew form on V: two elements commute
exactly when their V-parts are orthogonal, every maximal abelian subgroup
contains W, and normalisers, centralisers and cores of a subgroup
``(U, K, lifts)`` depend only on ``U`` and ``K``.
"""
from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field
from typing import Iterator, Sequence

import networkx as nx
import numpy as np

from . import fpspace as fp
from .errors import CapacityError, InfeasibleError, PreconditionError
from .formgroup import (ELEMENT_CAP, Element, FormGroup, Subgroup, structural_subgroups,
                        trivial_subgroup, whole_group)
from .fpspace import Subspace

SUBGROUP_CAP = 3 ** 6
COVER_POINT_CAP = 4096


def closure(G: FormGroup, gens: Sequence[Element], cap: int = ELEMENT_CAP) -> Subgroup:
    S = Subgroup.generated(G, list(gens))
    if S.order > cap:
        raise CapacityError(f"closure of order {S.order} exceeds cap {cap}")
    return S


@dataclass(frozen=True)
class Relatives:
    centralizer: Subgroup
    normalizer: Subgroup
    core: Subgroup


def centralizer(G: FormGroup, S: Subgroup) -> Subgroup:
    return Subgroup.from_pair(G, fp.perp(G.beta, S.U))


def normalizer(G: FormGroup, S: Subgroup) -> Subgroup:
    # g normalises S iff [g, s] = (0, beta(v, u)) lies in S, i.e. in K
    return Subgroup.from_pair(G, _into_K(G, S.U, G.V, S.K))


def _into_K(G: FormGroup, U: Subspace, inside: Subspace, K: Subspace) -> Subspace:
    """``{x in inside : beta(x, u) in K for every u in U}``."""
    p, n, m = G.p, G.gen_dim, G.cen_dim
    # functionals on W vanishing on K, composed with beta(., u)
    annihilator = fp.kernel(p, list(K.basis), m)
    T = G.beta.table
    constraints = []
    for u in U.basis:
        left = np.einsum("j,ijk->ik", np.asarray(u, dtype=np.int64), T) % p
        for a in annihilator:
            constraints.append(tuple(int(x) for x in (left @ np.asarray(a, dtype=np.int64)) % p))
    local = [tuple(fp.dot(p, c, s) for s in inside.basis) for c in constraints]
    sols = fp.kernel(p, local, inside.dim)
    return Subspace(p, n, tuple(fp.combine(p, y, inside.basis, n) for y in sols))


def core(G: FormGroup, S: Subgroup) -> Subgroup:
    """Intersection of all conjugates: the members ``(u, a)`` of ``S`` with ``beta(u, V)`` in ``K``."""
    Uc = _into_K(G, G.V, S.U, S.K)
    return Subgroup(G, Uc, S.K, tuple(S.lift(u).w for u in Uc.basis))


def relative_subgroups(G: FormGroup, S: Subgroup) -> Relatives:
    C, N, Co = centralizer(G, S), normalizer(G, S), core(G, S)
    assert C <= N and Co <= S
    assert all(G.commutator(g, x) in Co for g in G_gens(G) for x in Co.generators())
    return Relatives(C, N, Co)


def G_gens(G: FormGroup) -> list[Element]:
    return [G.gen(i) for i in range(G.gen_dim)] + [G.central(k) for k in range(G.cen_dim)]


def is_normal(G: FormGroup, S: Subgroup) -> bool:
    return normalizer(G, S).order == G.order


def maximal_abelians(G: FormGroup, cap: int = fp.MAX_ISOTROPIC_DIM) -> list[Subgroup]:
    """Every maximal abelian subgroup, as ``W`` plus a maximal isotropic subspace."""
    return [Subgroup.from_pair(G, U) for U in fp.maximal_isotropics(G.beta, cap)]


def _spans(p, n, subspaces) -> bool:
    return Subspace(p, n, tuple(v for U in subspaces for v in U.basis)).dim == n


def gnum(G: FormGroup, cap: int = fp.MAX_ISOTROPIC_DIM, witness: bool = False):
    """Least number of abelian subgroups generating ``G``.

    Abelian subgroups may be enlarged to maximal ones without losing the
    generating property, and those all contain W, so this is the least
    number of maximal isotropic subspaces spanning V.
    """
    if G.gen_dim == 0 or not G.beta.table.any():
        return (1, [whole_group(G)]) if witness else 1
    isos = fp.maximal_isotropics(G.beta, cap)
    top = max(U.dim for U in isos)
    r = max(2, -(-G.gen_dim // top))
    while True:
        for combo in itertools.combinations(isos, r):
            if _spans(G.p, G.gen_dim, combo):
                if witness:
                    return r, [Subgroup.from_pair(G, U) for U in combo]
                return r
        r += 1


def _points(p: int, n: int) -> list:
    return list(fp.full_space(p, n).points())


def chinum(G: FormGroup, cap: int = fp.MAX_ISOTROPIC_DIM, witness: bool = False):
    """Least number of maximal abelian subgroups whose union is ``G``.

    Every maximal abelian contains W, so this is an exact cover of the
    projective points of V by maximal isotropic subspaces, searched by
    iterative deepening with a counting bound.
    """
    if G.gen_dim == 0 or not G.beta.table.any():
        return (1, [whole_group(G)]) if witness else 1
    p, n = G.p, G.gen_dim
    pts = _points(p, n)
    if len(pts) > COVER_POINT_CAP:
        raise CapacityError(f"{len(pts)} points exceeds cover cap {COVER_POINT_CAP}")
    index = {v: i for i, v in enumerate(pts)}
    isos = fp.maximal_isotropics(G.beta, cap)
    masks = []
    for U in isos:
        m = 0
        for v in U.points():
            m |= 1 << index[v]
        masks.append(m)
    full = (1 << len(pts)) - 1
    biggest = max(bin(m).count("1") for m in masks)
    covering = [[j for j, m in enumerate(masks) if m >> i & 1] for i in range(len(pts))]

    def search(covered, chosen, budget):
        if covered == full:
            return chosen
        missing = full & ~covered
        if bin(missing).count("1") > budget * biggest:
            return None
        # branch on the uncovered point with fewest options
        best_i, best_opts = None, None
        rest = missing
        while rest:
            low = rest & -rest
            i = low.bit_length() - 1
            rest ^= low
            opts = covering[i]
            if best_opts is None or len(opts) < len(best_opts):
                best_i, best_opts = i, opts
        for j in best_opts:
            found = search(covered | masks[j], chosen + [j], budget - 1)
            if found is not None:
                return found
        return None

    r = -(-len(pts) // biggest)
    while True:
        found = search(0, [], r)
        if found is not None:
            if witness:
                return r, [Subgroup.from_pair(G, isos[j]) for j in found]
            return r
        r += 1


def pnum(G: FormGroup) -> tuple[int, list[Element]]:
    """Largest set of pairwise non-commuting elements, with one witness set.

    Elements commute when their V-parts are orthogonal, and orthogonality is
    a property of the lines they span, so this is a maximum clique in the
    non-commuting graph on projective points of V.  The least cardinal above
    every such set size is this value plus one.
    """
    beta = G.beta
    pts = [v for v in _points(G.p, G.gen_dim) if v not in fp.radical(beta)] if G.gen_dim else []
    if not pts:
        return 1, [G.identity]
    graph = nx.Graph()
    graph.add_nodes_from(range(len(pts)))
    for i, j in itertools.combinations(range(len(pts)), 2):
        if any(beta(pts[i], pts[j])):
            graph.add_edge(i, j)
    clique, size = nx.max_weight_clique(graph, weight=None)
    return size, [G.element(pts[i]) for i in sorted(clique)]


@dataclass
class InvariantReport:
    g: int
    chi: int
    pmax: int
    pmax_witness: list = field(default_factory=list)

    @property
    def P(self) -> int:
        return self.pmax + 1


def invariants(G: FormGroup) -> InvariantReport:
    size, wit = pnum(G)
    return InvariantReport(gnum(G), chinum(G), size, wit)


# decomposition into abelian subgroups


@dataclass
class Decomposition:
    parts: list
    depth: int


def decompose_22(G: FormGroup, cap: int = ELEMENT_CAP) -> Decomposition:
    """Abelian subgroups generating ``G``, by the sweep-and-correct recursion.

    With ``H = C_G(G') = G`` and a hyperplane ``A`` of ``H'``, the elements of
    ``H`` are swept in lexicographic order and split into two subgroups whose
    derived subgroups lie in ``A``; each is then decomposed again.  Elements
    are corrected by powers of the current pivot pair ``(c, c')`` so that they
    commute with both modulo ``A``; the exponents solve a 2x2 system whose
    determinant is the pairing of ``c`` with ``c'`` modulo ``A``.
    """
    parts, depth = _decompose(whole_group(G), cap, 0)
    return Decomposition(parts, depth)


def _decompose(H: Subgroup, cap: int, level: int):
    G = H.parent
    p = G.p
    derived = H.derived_part()
    if derived.dim == 0:
        return [H], level
    # class 2: H' is central, so C_H(H') = H and the sweep runs over all of H
    A = Subspace(p, G.cen_dim, derived.basis[:-1])
    last = derived.pivots[-1]
    # pairing modulo A: kappa(x, y) = x P y^T is the coordinate of [x, y] along H'/A
    n = G.gen_dim
    P = np.array([[A.reduce(G.beta(fp.unit_vec(n, i), fp.unit_vec(n, j)))[last]
                   for j in range(n)] for i in range(n)], dtype=np.int64)

    def kappa(x: Element, y: Element) -> int:
        return int(np.asarray(x.v) @ P @ np.asarray(y.v)) % p

    elems = H.elements(cap)
    d = list(elems)
    alive = list(range(len(elems)))
    H0, H1 = [], []
    while True:
        X = np.array([d[i].v for i in alive], dtype=np.int64).reshape(len(alive), n)
        pairing = (X @ P @ X.T) % p
        rows = np.flatnonzero(pairing.any(axis=1))
        if not len(rows):
            H0.extend(d[i] for i in alive)
            break
        pos0 = int(rows[0])
        m0 = alive[pos0]
        H0.extend(d[i] for i in alive if i <= m0)
        pos1 = int(np.flatnonzero(pairing[pos0])[0])
        m1 = alive[pos1]
        alive = [i for i in alive if i > m0 and i != m1]
        c0, c1 = d[m0], d[m1]
        H1.append(c1)
        pair = kappa(c0, c1)
        assert pair, "pivot pair must pair nontrivially modulo A"
        inv = pow(pair, -1, p)
        for j in alive:
            # [d + x c0 + y c1, c0] = [d, c0] - y pair,  [.., c1] = [d, c1] + x pair
            y = kappa(d[j], c0) * inv % p
            x = -kappa(d[j], c1) * inv % p
            if x or y:
                d[j] = G.multiply(G.multiply(d[j], G.power(c0, x)), G.power(c1, y))
    out, depth = [], level + 1
    for gens in (H0, H1):
        K = Subgroup.generated(G, gens)
        assert K.derived_part() <= A
        sub, dd = _decompose(K, cap, level + 1)
        out.extend(sub)
        depth = max(depth, dd)
    return out, depth


# incompatible overgroups


def incompatible_extensions(G: FormGroup, A: Subgroup, count: int) -> list[Subgroup]:
    """``count`` abelian overgroups ``<A, g_i>`` with ``<B_i, B_j>`` non-abelian for ``i != j``."""
    if not A.is_abelian:
        raise PreconditionError("A is not abelian")
    if not A.contains_W or not fp.radical(G.beta) <= A.U:
        raise PreconditionError("A must contain the centre")
    C = fp.perp(G.beta, A.U)
    if fp.is_commuting_isotropic(G.beta, C):
        raise PreconditionError("C_G(A) is abelian")
    reps = [fp.combine(G.p, c, A.U.complement_in(C), G.gen_dim)
            for c in fp._projective_coeffs(G.p, C.dim - A.U.dim)]
    graph = nx.Graph()
    graph.add_nodes_from(range(len(reps)))
    for i, j in itertools.combinations(range(len(reps)), 2):
        if any(G.beta(reps[i], reps[j])):
            graph.add_edge(i, j)
    chosen: list[int] = []
    for i in range(len(reps)):
        if len(chosen) == count:
            break
        if all(graph.has_edge(i, j) for j in chosen):
            chosen.append(i)
    if len(chosen) < count:
        clique, size = nx.max_weight_clique(graph, weight=None)
        if size < count:
            raise InfeasibleError(f"only {size} pairwise incompatible extensions exist, {count} requested")
        chosen = sorted(clique)[:count]
    return [Subgroup.from_pair(G, A.U.with_vectors([reps[i]])) for i in chosen]


# subgroup sweeps


def subgroup_shapes(G: FormGroup) -> Iterator[tuple[Subspace, Subspace]]:
    """Every pair ``(U, K)`` with ``beta(U, U)`` inside ``K``.

    Each pair stands for ``|W/K|^dim U`` subgroups (one per choice of lifts),
    all with the same centraliser, normaliser and core order.
    """
    for U in fp.all_subspaces(G.p, G.gen_dim):
        D = fp.image_span(G.beta, U)
        for K in fp.all_subspaces(G.p, G.cen_dim):
            if D <= K:
                yield U, K


def all_subgroups(G: FormGroup, cap: int = SUBGROUP_CAP) -> Iterator[Subgroup]:
    """Every subgroup, ordered by ``(dim U, U, K, lifts)``."""
    if G.order > cap:
        raise CapacityError(f"subgroup enumeration on order {G.order} exceeds cap {cap}")
    for U, K in subgroup_shapes(G):
        Q = fp.full_space(G.p, G.cen_dim)
        comp = K.complement_in(Q)
        choices = [fp.combine(G.p, c, comp, G.cen_dim)
                   for c in itertools.product(range(G.p), repeat=len(comp))]
        for lifts in itertools.product(choices, repeat=U.dim):
            yield Subgroup(G, U, K, lifts)


@dataclass
class NeumannProfile:
    gz: int
    maxN: int
    maxC: int
    maxCore: int
    maxAbelianN: int
    exact: bool = True
    subgroups_examined: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


def _shape_indices(G: FormGroup, U: Subspace, K: Subspace):
    n = G.gen_dim
    p = G.p
    N = _into_K(G, U, G.V, K)
    C = fp.perp(G.beta, U)
    Uc = _into_K(G, G.V, U, K)
    return p ** (n - N.dim), p ** (n - C.dim), p ** (U.dim - Uc.dim)


def neumann_profile(G: FormGroup, cap: int = SUBGROUP_CAP, exact: bool | None = None,
                    samples: int = 2000, seed: int = 0) -> NeumannProfile:
    """Extremal indices over all subgroups.

    Exact when ``|G| <= cap`` (sweeping every ``(U, K)`` shape, which covers
    every subgroup).  Otherwise, unless ``exact=True`` was demanded, random
    shapes are sampled with a seeded generator and the result is flagged
    ``exact=False``: its fields are then lower bounds.
    """
    gz = G.p ** (G.gen_dim - fp.radical(G.beta).dim)
    small = G.order <= cap
    if exact and not small:
        raise CapacityError(f"exact profile on order {G.order} exceeds cap {cap}")
    prof = NeumannProfile(gz, 1, 1, 1, 1, exact=small)
    if small:
        shapes = subgroup_shapes(G)
    else:
        shapes = _sample_shapes(G, samples, seed)
    for U, K in shapes:
        prof.subgroups_examined += 1
        iN, iC, iCore = _shape_indices(G, U, K)
        prof.maxN = max(prof.maxN, iN)
        prof.maxC = max(prof.maxC, iC)
        prof.maxCore = max(prof.maxCore, iCore)
        if fp.is_commuting_isotropic(G.beta, U):
            prof.maxAbelianN = max(prof.maxAbelianN, iN)
    assert prof.maxAbelianN <= prof.maxN <= prof.maxC
    return prof


def _sample_shapes(G: FormGroup, samples: int, seed: int):
    rng = np.random.default_rng(seed)
    p, n, m = G.p, G.gen_dim, G.cen_dim
    for _ in range(samples):
        k = int(rng.integers(0, n + 1))
        U = Subspace(p, n, tuple(tuple(int(x) for x in rng.integers(0, p, n)) for _ in range(k)))
        D = fp.image_span(G.beta, U)
        extra = int(rng.integers(0, m - D.dim + 1))
        K = D.with_vectors(tuple(int(x) for x in rng.integers(0, p, m)) for _ in range(extra))
        yield U, K


def central_orbit_search(G: FormGroup, auts: Sequence, cap: int = SUBGROUP_CAP) -> tuple[Subgroup, int]:
    """Subgroup with the most distinct images under the given central automorphisms.

    Exploratory only: no bound on the maximum is claimed.
    """
    best, best_size = None, 0
    for S in all_subgroups(G, cap):
        images = set()
        for phi in auts:
            lifts = tuple(fp.add(G.p, a, fp.scale(G.p, fp.dot(G.p, phi.lam, u), fp.unit_vec(G.cen_dim, phi.target)))
                          for u, a in zip(S.U.basis, S.lifts))
            images.add(Subgroup(G, S.U, S.K, lifts).key())
        if len(images) > best_size:
            best, best_size = S, len(images)
    return best, best_size
