"""Element-level brute force, independent of the linear-algebra methods.

Everything here works from a multiplication table of indexed elements and
never looks at the skew form, subspaces or the (U, K, lifts) description of
subgroups.  Subsets are numpy boolean masks; subgroups are found by closure.
Only meant for small groups.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import networkx as nx
import numpy as np

from .errors import CapacityError
from .formgroup import Element, FormGroup

TABLE_CAP = 3 ** 6


@dataclass(eq=False)
class CayleyTable:
    """Multiplication table of ``G`` with elements indexed in lexicographic order."""

    G: FormGroup

    def __post_init__(self):
        if self.G.order > TABLE_CAP:
            raise CapacityError(f"table for order {self.G.order} exceeds cap {TABLE_CAP}")

    @cached_property
    def digits(self) -> np.ndarray:
        G = self.G
        k = G.gen_dim + G.cen_dim
        return np.array(list(itertools.product(range(G.p), repeat=k)), dtype=np.int64).reshape(-1, k)

    @property
    def size(self) -> int:
        return len(self.digits)

    def encode(self, rows: np.ndarray) -> np.ndarray:
        k = rows.shape[-1]
        return (rows % self.G.p) @ (self.G.p ** np.arange(k - 1, -1, -1))

    def index(self, x: Element) -> int:
        return int(self.encode(np.array(tuple(x.v) + tuple(x.w), dtype=np.int64)))

    def element(self, i: int) -> Element:
        d = self.digits[i]
        n = self.G.gen_dim
        return Element(tuple(int(a) for a in d[:n]), tuple(int(a) for a in d[n:]))

    @cached_property
    def mul(self) -> np.ndarray:
        """``mul[i, j]`` is the index of ``x_i x_j`` (written out from the group law)."""
        G = self.G
        n = G.gen_dim
        V, W = self.digits[:, :n], self.digits[:, n:]
        N = self.size
        vv = (V[:, None, :] + V[None, :, :]) % G.p
        tau = np.einsum("ai,ijk,bj->abk", V, G.tau.table, V) if n else np.zeros((N, N, G.cen_dim), dtype=np.int64)
        ww = (W[:, None, :] + W[None, :, :] + tau) % G.p
        return self.encode(np.concatenate([vv, ww], axis=2))

    @cached_property
    def inv(self) -> np.ndarray:
        return np.argmax(self.mul == 0, axis=1)

    @cached_property
    def commute(self) -> np.ndarray:
        return self.mul == self.mul.T


def is_associative(T: CayleyTable, samples: int | None = None, seed: int = 0) -> bool:
    """Exhaustive over all triples, or over ``samples`` random triples."""
    mul = T.mul
    if samples is None:
        # one x at a time keeps memory at |G|^2
        return all(np.array_equal(mul[mul[x]], mul[x][mul]) for x in range(T.size))
    rng = np.random.default_rng(seed)
    x, y, z = rng.integers(0, T.size, (3, samples))
    return bool(np.array_equal(mul[mul[x, y], z], mul[x, mul[y, z]]))


def closure(T: CayleyTable, mask: np.ndarray) -> np.ndarray:
    """Smallest subgroup containing the elements of ``mask``."""
    out = mask.copy()
    out[0] = True
    gens = np.flatnonzero(mask)
    while True:
        cur = np.flatnonzero(out)
        new = np.zeros_like(out)
        new[T.mul[cur][:, gens].ravel()] = True
        new |= out
        if np.array_equal(new, out):
            return out
        out = new
        gens = np.flatnonzero(out)


def _key(mask: np.ndarray) -> bytes:
    return np.packbits(mask).tobytes()


def all_subgroups(T: CayleyTable, abelian_only: bool = False) -> list[np.ndarray]:
    """Every subgroup (or every abelian subgroup), grown one element at a time."""
    start = np.zeros(T.size, dtype=bool)
    start[0] = True
    seen = {_key(start): start}
    frontier = [start]
    while frontier:
        nxt = []
        for S in frontier:
            if abelian_only:
                cand = np.flatnonzero(~S & T.commute[S].all(axis=0))
            else:
                cand = np.flatnonzero(~S)
            for x in cand:
                one = S.copy()
                one[x] = True
                H = closure(T, one)
                k = _key(H)
                if k not in seen:
                    seen[k] = H
                    nxt.append(H)
        frontier = nxt
    return list(seen.values())


def maximal_abelians(T: CayleyTable) -> list[np.ndarray]:
    """Abelian subgroups contained in no larger abelian subgroup."""
    ab = all_subgroups(T, abelian_only=True)
    out = []
    for A in ab:
        if not any(B.sum() > A.sum() and (B | ~A).all() for B in ab):
            out.append(A)
    return out


def center(T: CayleyTable) -> np.ndarray:
    return T.commute.all(axis=1)


def normalizer(T: CayleyTable, S: np.ndarray) -> np.ndarray:
    idx = np.flatnonzero(S)
    out = np.zeros(T.size, dtype=bool)
    for g in range(T.size):
        conj = T.mul[T.mul[T.inv[g], idx], g]
        out[g] = S[conj].all()
    return out


def centralizer(T: CayleyTable, S: np.ndarray) -> np.ndarray:
    return T.commute[:, S].all(axis=1)


def core(T: CayleyTable, S: np.ndarray) -> np.ndarray:
    out = S.copy()
    for g in range(T.size):
        # g^-1 S g
        conj = np.zeros(T.size, dtype=bool)
        conj[T.mul[T.mul[T.inv[g], np.flatnonzero(S)], g]] = True
        out &= conj
    return out


@dataclass
class BruteProfile:
    gz: int
    maxN: int
    maxC: int
    maxCore: int
    maxAbelianN: int


def neumann_profile(T: CayleyTable) -> BruteProfile:
    N = T.size
    gz = N // int(center(T).sum())
    prof = BruteProfile(gz, 1, 1, 1, 1)
    for S in all_subgroups(T):
        iN = N // int(normalizer(T, S).sum())
        prof.maxN = max(prof.maxN, iN)
        prof.maxC = max(prof.maxC, N // int(centralizer(T, S).sum()))
        prof.maxCore = max(prof.maxCore, int(S.sum()) // int(core(T, S).sum()))
        if T.commute[np.ix_(S, S)].all():
            prof.maxAbelianN = max(prof.maxAbelianN, iN)
    return prof


def gnum(T: CayleyTable) -> int:
    mas = maximal_abelians(T)
    for r in range(1, len(mas) + 1):
        for combo in itertools.combinations(mas, r):
            if closure(T, np.logical_or.reduce(combo)).all():
                return r
    return len(mas)


def chinum(T: CayleyTable) -> int:
    mas = maximal_abelians(T)
    for r in range(1, len(mas) + 1):
        for combo in itertools.combinations(mas, r):
            if np.logical_or.reduce(combo).all():
                return r
    return len(mas)


def pnum(T: CayleyTable) -> int:
    """Largest set of pairwise non-commuting elements."""
    graph = nx.from_numpy_array((~T.commute).astype(np.int8))
    _, size = nx.max_weight_clique(graph, weight=None)
    return max(size, 1)


def abelian_orbit_max(A, Phi) -> int:
    """Largest orbit of a subgroup of an abelian p-group, subgroups taken as closures of rank-tuples."""
    from . import abaut
    elems = list(A.elements())
    subs = set()
    for combo in itertools.combinations_with_replacement(elems, max(A.rank, 1)):
        subs.add(frozenset(abaut.span(A, combo).elements))
    best = 0
    for S in subs:
        best = max(best, len({frozenset(phi(x) for x in S) for phi in Phi}))
    return best
