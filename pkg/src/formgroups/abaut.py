"""Finite abelian p-groups, their automorphisms, and displacement subgroups.

A group is ``Z/p^e1 + ... + Z/p^er`` with elements stored as residue tuples.
An automorphism is an integer matrix whose row ``i`` is the image of the
``i``-th cyclic generator.  The row entries must respect orders: the image
of ``e_i`` has order dividing ``p^ei``, so ``p^max(0, ej - ei)`` divides
entry ``(i, j)``.  Such a matrix is bijective exactly when it is
invertible modulo ``p``, since an endomorphism is onto iff it is onto
modulo ``pA``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
import sympy

from .errors import CapacityError, PreconditionError

IMAGE_CHECK_CAP = 3 ** 6
ORBIT_CAP = 3 ** 6


@dataclass(frozen=True)
class AbelianPGroup:
    p: int
    orders: tuple

    def __post_init__(self):
        if not sympy.isprime(self.p):
            raise PreconditionError(f"{self.p} is not prime")
        orders = tuple(int(e) for e in self.orders)
        if any(e < 1 for e in orders):
            raise PreconditionError("cyclic exponents must be at least 1")
        object.__setattr__(self, "orders", orders)

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def moduli(self) -> tuple:
        return tuple(self.p ** e for e in self.orders)

    @property
    def order(self) -> int:
        return math.prod(self.moduli)

    def reduce(self, x) -> tuple:
        return tuple(int(a) % q for a, q in zip(x, self.moduli))

    def add(self, x, y) -> tuple:
        return tuple((a + b) % q for a, b, q in zip(x, y, self.moduli))

    def sub(self, x, y) -> tuple:
        return tuple((a - b) % q for a, b, q in zip(x, y, self.moduli))

    def mul(self, k: int, x) -> tuple:
        return tuple((k * a) % q for a, q in zip(x, self.moduli))

    def zero(self) -> tuple:
        return (0,) * self.rank

    def gen(self, i: int) -> tuple:
        return tuple(int(j == i) for j in range(self.rank))

    def elements(self) -> Iterator[tuple]:
        return itertools.product(*(range(q) for q in self.moduli))

    def element_order(self, x) -> int:
        """Order of ``x``: the largest ``p^(ej - v_p(xj))`` over its coordinates."""
        best = 1
        for a, e in zip(x, self.orders):
            a %= self.p ** e
            if a:
                v = 0
                while a % self.p == 0:
                    a //= self.p
                    v += 1
                best = max(best, self.p ** (e - v))
        return best

    def to_json(self) -> dict:
        return {"p": self.p, "orders": list(self.orders)}

    @classmethod
    def from_json(cls, d: dict) -> "AbelianPGroup":
        return cls(int(d["p"]), tuple(d["orders"]))


def abelian_groups(p: int, max_exponent: int) -> list[AbelianPGroup]:
    """One group per partition: every abelian group of order ``p^k``, ``1 <= k <= max_exponent``."""
    out = []
    for k in range(1, max_exponent + 1):
        for part in sorted(sympy.utilities.iterables.partitions(k), key=lambda d: sorted(d.items())):
            orders = sorted((e for e, mult in part.items() for _ in range(mult)), reverse=True)
            out.append(AbelianPGroup(p, tuple(orders)))
    return sorted(out, key=lambda A: (sum(A.orders), A.orders))


def entry_step(A: AbelianPGroup, i: int, j: int) -> int:
    """Entry ``(i, j)`` of an endomorphism is a multiple of this."""
    return A.p ** max(0, A.orders[j] - A.orders[i])


def is_endomorphism_matrix(A: AbelianPGroup, M) -> bool:
    M = np.asarray(M, dtype=np.int64)
    if M.shape != (A.rank, A.rank):
        return False
    return all(M[i, j] % entry_step(A, i, j) == 0 for i in range(A.rank) for j in range(A.rank))


def det_mod_p(M: np.ndarray, p: int):
    """Determinant modulo ``p`` of one matrix or a stack of small integer matrices.

    Entries are reduced modulo ``p`` first; while ``r! (p-1)^r`` stays far
    below 2^52 a floating determinant rounds to the exact integer.
    """
    M = np.asarray(M, dtype=np.int64) % p
    single = M.ndim == 2
    stack = M[None] if single else M
    r = stack.shape[-1]
    if r == 0:
        det = np.ones(len(stack), dtype=np.int64)
    elif math.factorial(r) * (p - 1) ** r < 2 ** 40:
        det = np.rint(np.linalg.det(stack.astype(np.float64))).astype(np.int64) % p
    else:
        det = np.array([int(sympy.Matrix(m.tolist()).det()) % p for m in stack], dtype=np.int64)
    return int(det[0]) if single else det


@dataclass(frozen=True, eq=False)
class AbAut:
    """An automorphism given by its matrix; ``certificate`` is the determinant mod p."""

    parent: AbelianPGroup
    matrix: tuple
    certificate: int = 0

    @classmethod
    def from_matrix(cls, A: AbelianPGroup, M, check_images: bool | None = None) -> "AbAut":
        M = np.asarray(M, dtype=np.int64).reshape(A.rank, A.rank)
        if not is_endomorphism_matrix(A, M):
            raise PreconditionError("matrix does not define an endomorphism (order condition fails)")
        M = M % np.array(A.moduli, dtype=np.int64)[None, :] if A.rank else M
        d = det_mod_p(M, A.p) if A.rank else 1
        if d == 0:
            raise PreconditionError("endomorphism is not invertible modulo p")
        phi = cls(A, tuple(tuple(int(x) for x in row) for row in M), d)
        if check_images is None:
            check_images = A.order <= IMAGE_CHECK_CAP
        if check_images and len({phi(x) for x in A.elements()}) != A.order:
            raise PreconditionError("matrix is not bijective on elements")
        return phi

    @classmethod
    def identity(cls, A: AbelianPGroup) -> "AbAut":
        return cls.from_matrix(A, np.eye(A.rank, dtype=np.int64), check_images=False)

    def __call__(self, x) -> tuple:
        A = self.parent
        out = [0] * A.rank
        for a, row in zip(x, self.matrix):
            if a:
                for j, m in enumerate(row):
                    out[j] += a * m
        return A.reduce(out)

    def compose(self, other: "AbAut") -> "AbAut":
        """``x -> other(self(x))``, matching row-vector action ``x M N``."""
        M = np.array(self.matrix, dtype=np.int64).reshape(self.parent.rank, -1)
        N = np.array(other.matrix, dtype=np.int64).reshape(self.parent.rank, -1)
        return AbAut.from_matrix(self.parent, M @ N, check_images=False)

    def __eq__(self, other):
        return isinstance(other, AbAut) and self.parent == other.parent and self.matrix == other.matrix

    def __hash__(self):
        return hash((self.parent, self.matrix))

    def to_json(self) -> dict:
        return {"group": self.parent.to_json(), "matrix": [list(r) for r in self.matrix]}

    @classmethod
    def from_json(cls, d: dict) -> "AbAut":
        return cls.from_matrix(AbelianPGroup.from_json(d["group"]), d["matrix"])


# subgroups


@dataclass(frozen=True)
class AbSubgroup:
    """A subgroup stored as its sorted element tuple."""

    parent: AbelianPGroup
    elements: tuple

    @property
    def order(self) -> int:
        return len(self.elements)

    def generators(self) -> list[tuple]:
        gens, span = [], {self.parent.zero()}
        for x in self.elements:
            if x not in span:
                gens.append(x)
                span = _close(self.parent, span, x)
        return gens

    def key(self) -> tuple:
        return (self.order, self.elements)

    def __contains__(self, x) -> bool:
        return tuple(x) in set(self.elements)


def _close(A: AbelianPGroup, S: set, x) -> set:
    """``S + <x>`` for a subgroup ``S``."""
    out = set(S)
    step = x
    while step not in S:
        out |= {A.add(s, step) for s in S}
        step = A.add(step, x)
    return out


def span(A: AbelianPGroup, gens: Sequence) -> AbSubgroup:
    S = {A.zero()}
    for g in gens:
        S = _close(A, S, A.reduce(g))
    return AbSubgroup(A, tuple(sorted(S)))


def image(phi: AbAut, B: AbSubgroup) -> AbSubgroup:
    return AbSubgroup(B.parent, tuple(sorted(phi(x) for x in B.elements)))


def all_subgroups(A: AbelianPGroup, cap: int = ORBIT_CAP) -> list[AbSubgroup]:
    """Every subgroup, in canonical order (by order, then element tuple).

    Built by adjoining one generator at a time; an element is only adjoined
    when its cyclic group is not already inside, and duplicates are merged.
    """
    if A.order > cap:
        raise CapacityError(f"subgroup enumeration on order {A.order} exceeds cap {cap}")
    elems = list(A.elements())
    zero = frozenset([A.zero()])
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for S in frontier:
            for x in elems:
                if x in S:
                    continue
                T = frozenset(_close(A, set(S), x))
                if T not in seen:
                    seen.add(T)
                    nxt.append(T)
        frontier = nxt
    return sorted((AbSubgroup(A, tuple(sorted(S))) for S in seen), key=AbSubgroup.key)


# the height-fix lemma


@dataclass
class Displacement:
    A_phi: AbSubgroup | None
    generators: list
    m: int


def displacement(A: AbelianPGroup, phi: AbAut, materialize: bool = True) -> Displacement:
    """``A_phi = <a - phi(a)>`` from generator displacements, and its exponent ``p^m``."""
    gens = [A.sub(A.gen(i), phi(A.gen(i))) for i in range(A.rank)]
    # A_phi is abelian, so its exponent is the largest order of a generator
    exponent = max((A.element_order(g) for g in gens), default=1)
    m = round(math.log(exponent, A.p))
    while A.p ** m < exponent:
        m += 1
    sub = span(A, gens) if materialize else None
    return Displacement(sub, [g for g in gens if any(g)], m)


@dataclass
class HeightFix:
    ok: bool
    m: int
    witness: tuple | None = None


def verify_height_fix(A: AbelianPGroup, phi: AbAut) -> HeightFix:
    """Check that ``phi`` fixes every element of ``p^m A`` where ``p^m`` kills ``A_phi``."""
    m = displacement(A, phi, materialize=False).m
    for a in A.elements():
        x = A.mul(A.p ** m, a)
        if phi(x) != x:
            return HeightFix(False, m, x)
    return HeightFix(True, m)


def valid_entry_ranges(A: AbelianPGroup) -> list[list[np.ndarray]]:
    """Admissible values for each matrix entry, reduced modulo the column modulus."""
    return [[np.arange(0, A.moduli[j], entry_step(A, i, j), dtype=np.int64) for j in range(A.rank)]
            for i in range(A.rank)]


def _vector_codes(p: int, r: int) -> np.ndarray:
    """All of F_p^r as rows, in base-p order (row ``x`` has code ``x``)."""
    return np.array(list(itertools.product(range(p), repeat=r)), dtype=np.int64).reshape(-1, r)


def invertible_residues(A: AbelianPGroup) -> Iterator[np.ndarray]:
    """Matrices mod ``p`` of automorphisms, grouped by first row.

    Entry ``(i, j)`` is forced to zero when ``e_j > e_i``.  Rows are chosen
    one at a time outside the span of the earlier rows, with spans tracked
    as boolean masks over the ``p^r`` vectors.
    """
    p, r = A.p, A.rank
    vecs = _vector_codes(p, r)
    small = vecs.astype(np.int8 if p < 128 else np.int64)
    weights = p ** np.arange(r - 1, -1, -1)
    code = lambda rows: (rows % p) @ weights
    allowed = [np.flatnonzero(np.all(vecs[:, [j for j in range(r) if A.orders[j] > A.orders[i]]] == 0, axis=1))
               for i in range(r)]
    # translates[c][x, y] = code of x + c * y
    translates = [code(vecs[:, None, :] + c * vecs[None, :, :]) for c in range(p)]
    for first in allowed[0]:
        if first == 0:
            continue
        rows = np.array([[first]], dtype=np.int64)
        span = np.zeros((1, p ** r), dtype=bool)
        for c in range(p):
            span[0, translates[c][0, first]] = True
        for i in range(1, r):
            free = ~span[:, allowed[i]]
            n_idx, c_idx = np.nonzero(free)
            new = allowed[i][c_idx]
            rows = np.concatenate([rows[n_idx], new[:, None]], axis=1)
            if i < r - 1:
                old = span[n_idx]
                span = old.copy()
                at = np.arange(len(old))[:, None]
                for c in range(1, p):
                    # x lies in the new span iff x - c v lies in the old one for some c
                    span |= old[at, translates[p - c][:, new].T]
        yield small[rows]


def automorphism_matrices(A: AbelianPGroup) -> Iterator[np.ndarray]:
    """Every automorphism matrix, in stacks of shape ``(k, r, r)``.

    Each residue pattern mod ``p`` is lifted in all admissible ways: entries
    with ``e_j <= e_i`` may add any multiple of ``p`` below ``p^ej``, and
    entries with ``e_j > e_i`` range over multiples of ``p^(ej - ei)``.
    """
    p, r = A.p, A.rank
    if r == 0:
        yield np.zeros((1, 0, 0), dtype=np.int64)
        return
    lifts = []
    for i in range(r):
        for j in range(r):
            step = entry_step(A, i, j)
            if step == 1:
                lifts.append(np.arange(0, A.moduli[j], p, dtype=np.int64))
            else:
                lifts.append(np.arange(0, A.moduli[j], step, dtype=np.int64))
    grid = np.stack([g.ravel() for g in np.meshgrid(*lifts, indexing="ij")], axis=1).reshape(-1, r, r)
    trivial = len(grid) == 1 and not grid.any()
    for base in invertible_residues(A):
        if trivial:
            yield base
        else:
            yield (base[:, None] + grid[None]).reshape(-1, r, r) % np.array(A.moduli, dtype=np.int64)


def count_automorphisms(A: AbelianPGroup) -> int:
    return sum(len(M) for M in automorphism_matrices(A))


def random_automorphism(A: AbelianPGroup, rng) -> AbAut:
    ranges = valid_entry_ranges(A)
    while True:
        M = np.array([[int(rng.choice(ranges[i][j])) for j in range(A.rank)] for i in range(A.rank)],
                     dtype=np.int64).reshape(A.rank, A.rank)
        if A.rank == 0 or det_mod_p(M, A.p):
            return AbAut.from_matrix(A, M, check_images=False)


def height_fix_batch(A: AbelianPGroup, mats: np.ndarray) -> np.ndarray:
    """Vectorised height-fix check on a stack of automorphism matrices.

    Works on generators: ``m`` is the largest order exponent among the rows
    of ``I - M``, and ``phi`` fixes ``p^m A`` iff it fixes each ``p^m e_i``.
    """
    r = A.rank
    if r == 0:
        return np.ones(len(mats), dtype=bool)
    mod = np.array(A.moduli, dtype=np.int32)
    D = (np.eye(r, dtype=np.int32)[None] - mats.astype(np.int32)) % mod
    # order exponent of a nonzero entry (i, j) is e_j - v_p(D_ij)
    orders = np.array(A.orders, dtype=np.int32)
    nonzero = D != 0
    val = np.zeros(D.shape, dtype=np.int32)
    for t in range(1, max(A.orders)):
        val += D % A.p ** t == 0
    m = np.where(nonzero, orders - val, 0).reshape(len(D), r * r).max(axis=1)
    # phi(p^m e_i) - p^m e_i = -p^m D_i
    moved = (A.p ** m).astype(np.int32)[:, None, None] * D % mod
    return ~moved.reshape(len(D), r * r).any(axis=1)


# orbit maximisation


@dataclass
class OrbitResult:
    best: AbSubgroup
    orbit_size: int


def orbit_search(A: AbelianPGroup, Phi: Sequence[AbAut], cap: int = ORBIT_CAP) -> OrbitResult:
    """A subgroup with the most distinct images under ``Phi``; ties go to the first in canonical order."""
    if not Phi:
        raise PreconditionError("need at least one automorphism")
    best, best_size = None, 0
    for B in all_subgroups(A, cap):
        size = len({image(phi, B).elements for phi in Phi})
        if size > best_size:
            best, best_size = B, size
    return OrbitResult(best, best_size)


def general_linear(A: AbelianPGroup) -> list[AbAut]:
    return [AbAut.from_matrix(A, M, check_images=False) for stack in automorphism_matrices(A) for M in stack]
