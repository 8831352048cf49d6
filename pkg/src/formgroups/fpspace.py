"""Exact linear algebra over a prime field F_p.

Vectors are plain tuples of residues.  A :class:`Subspace` always stores its
basis in reduced row-echelon form, so two subspaces are equal exactly when
their bases are equal, and sorting by basis gives a canonical order.
"""
from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import CapacityError, DimensionMismatch

Vec = tuple  # tuple[int, ...], entries in [0, p)

MAX_ISOTROPIC_DIM = 10


def vec(p: int, coords: Iterable[int]) -> Vec:
    return tuple(int(c) % p for c in coords)


def zero_vec(n: int) -> Vec:
    return (0,) * n


def unit_vec(n: int, i: int) -> Vec:
    return tuple(1 if j == i else 0 for j in range(n))


def add(p: int, u: Vec, v: Vec) -> Vec:
    return tuple((a + b) % p for a, b in zip(u, v))


def sub(p: int, u: Vec, v: Vec) -> Vec:
    return tuple((a - b) % p for a, b in zip(u, v))


def scale(p: int, c: int, u: Vec) -> Vec:
    return tuple((c * a) % p for a in u)


def dot(p: int, u: Vec, v: Vec) -> int:
    return sum(a * b for a, b in zip(u, v)) % p


def combine(p: int, coeffs: Sequence[int], vectors: Sequence[Vec], n: int) -> Vec:
    """Linear combination ``sum(c * v)``; ``n`` is the length of the result."""
    out = [0] * n
    for c, v in zip(coeffs, vectors):
        if c:
            for i, a in enumerate(v):
                out[i] += c * a
    return tuple(x % p for x in out)


def rref(p: int, rows: Iterable[Vec], n: int) -> tuple[tuple[Vec, ...], tuple[int, ...]]:
    """Reduced row-echelon basis of the span of ``rows`` and its pivot columns."""
    mat = [list(r) for r in rows if any(r)]
    pivots = []
    r = 0
    for col in range(n):
        if r == len(mat):
            break
        piv = next((i for i in range(r, len(mat)) if mat[i][col] % p), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = pow(mat[r][col], -1, p)
        mat[r] = [(x * inv) % p for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col] % p:
                f = mat[i][col]
                mat[i] = [(a - f * b) % p for a, b in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
    return tuple(tuple(row) for row in mat[:r]), tuple(pivots)


def kernel(p: int, constraints: Sequence[Vec], n: int) -> tuple[Vec, ...]:
    """Basis (in RREF) of ``{x in F_p^n : c . x = 0 for every c}``."""
    basis, pivots = rref(p, constraints, n)
    free = [j for j in range(n) if j not in set(pivots)]
    out = []
    for f in free:
        x = [0] * n
        x[f] = 1
        for row, pc in zip(basis, pivots):
            x[pc] = (-row[f]) % p
        out.append(tuple(x))
    return rref(p, out, n)[0]


@dataclass(frozen=True)
class Subspace:
    """A subspace of F_p^n given by its reduced row-echelon basis."""

    p: int
    ambient_dim: int
    basis: tuple = ()
    pivots: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        b, piv = rref(self.p, self.basis, self.ambient_dim)
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "pivots", piv)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def order(self) -> int:
        return self.p ** self.dim

    def reduce(self, v: Vec) -> Vec:
        """Residue of ``v`` after eliminating the pivot columns."""
        out = list(v)
        for row, pc in zip(self.basis, self.pivots):
            c = out[pc] % self.p
            if c:
                out = [(a - c * b) % self.p for a, b in zip(out, row)]
        return tuple(x % self.p for x in out)

    def __contains__(self, v: Vec) -> bool:
        if len(v) != self.ambient_dim:
            raise DimensionMismatch(f"vector of length {len(v)} in F_p^{self.ambient_dim}")
        return not any(self.reduce(v))

    def coordinates(self, v: Vec) -> tuple[int, ...]:
        """Coefficients of ``v`` in the echelon basis; ``v`` must lie in the subspace."""
        if v not in self:
            raise ValueError("vector not in subspace")
        return tuple(v[pc] % self.p for pc in self.pivots)

    def vectors(self) -> Iterator[Vec]:
        for coeffs in itertools.product(range(self.p), repeat=self.dim):
            yield combine(self.p, coeffs, self.basis, self.ambient_dim)

    def points(self) -> Iterator[Vec]:
        """One vector per 1-dimensional subspace (first nonzero coefficient 1)."""
        for coeffs in _projective_coeffs(self.p, self.dim):
            yield combine(self.p, coeffs, self.basis, self.ambient_dim)

    def __add__(self, other: "Subspace") -> "Subspace":
        _check_same(self, other)
        return Subspace(self.p, self.ambient_dim, self.basis + other.basis)

    def with_vectors(self, vectors: Iterable[Vec]) -> "Subspace":
        return Subspace(self.p, self.ambient_dim, self.basis + tuple(vectors))

    def extend(self, v: Vec) -> "Subspace":
        """``self + <v>`` by one elimination step on the existing echelon basis."""
        p = self.p
        r = self.reduce(v)
        lead = next((i for i, c in enumerate(r) if c), None)
        if lead is None:
            return self
        inv = pow(r[lead], -1, p)
        r = tuple((c * inv) % p for c in r)
        rows = [tuple((a - row[lead] * b) % p for a, b in zip(row, r)) if row[lead] else row
                for row in self.basis]
        at = bisect.bisect(self.pivots, lead)
        rows.insert(at, r)
        out = object.__new__(Subspace)
        for name, val in (("p", p), ("ambient_dim", self.ambient_dim), ("basis", tuple(rows)),
                          ("pivots", self.pivots[:at] + (lead,) + self.pivots[at:])):
            object.__setattr__(out, name, val)
        return out

    def __le__(self, other: "Subspace") -> bool:  # type: ignore[override]
        _check_same(self, other)
        return all(v in other for v in self.basis)

    def intersect(self, other: "Subspace") -> "Subspace":
        _check_same(self, other)
        # solve sum x_i a_i = sum y_j b_j
        p, n = self.p, self.ambient_dim
        k = self.dim
        cols = list(self.basis) + [scale(p, -1, b) for b in other.basis]
        constraints = [tuple(c[i] for c in cols) for i in range(n)]
        sols = kernel(p, constraints, len(cols))
        return Subspace(p, n, tuple(combine(p, s[:k], self.basis, n) for s in sols))

    def complement_in(self, big: "Subspace") -> tuple[Vec, ...]:
        """Vectors of ``big`` whose images form a basis of ``big / self``."""
        residues = [self.reduce(v) for v in big.basis]
        return rref(self.p, residues, self.ambient_dim)[0]

    def key(self) -> tuple:
        return self.basis


def _check_same(a: Subspace, b: Subspace) -> None:
    if a.p != b.p or a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch(
            f"F_{a.p}^{a.ambient_dim} vs F_{b.p}^{b.ambient_dim}")


def _projective_coeffs(p: int, d: int) -> Iterator[tuple[int, ...]]:
    for lead in range(d):
        for tail in itertools.product(range(p), repeat=d - lead - 1):
            yield (0,) * lead + (1,) + tail


def zero_space(p: int, n: int) -> Subspace:
    return Subspace(p, n, ())


def full_space(p: int, n: int) -> Subspace:
    return Subspace(p, n, tuple(unit_vec(n, i) for i in range(n)))


def span_reduce(vectors: Sequence[Vec], p: int | None = None, n: int | None = None) -> Subspace:
    """Row-echelon basis of the span of ``vectors``.

    ``p`` and ``n`` are only needed when ``vectors`` is empty.  Inputs are
    reduced modulo ``p``; negative entries are fine.
    """
    vectors = list(vectors)
    if p is None:
        raise DimensionMismatch("modulus required")
    if n is None:
        if not vectors:
            raise DimensionMismatch("ambient dimension required for an empty span")
        n = len(vectors[0])
    for v in vectors:
        if len(v) != n:
            raise DimensionMismatch(f"vector of length {len(v)}, expected {n}")
    return Subspace(p, n, tuple(vec(p, v) for v in vectors))


def all_subspaces(p: int, n: int, dim: int | None = None) -> Iterator[Subspace]:
    """Every subspace of F_p^n (optionally of one dimension), in canonical order.

    Enumerates echelon forms directly: a pivot set plus free entries in the
    non-pivot columns to the right of each pivot.
    """
    dims = range(n + 1) if dim is None else [dim]
    for d in dims:
        for piv in itertools.combinations(range(n), d):
            slots = [(r, c) for r, pc in enumerate(piv) for c in range(pc + 1, n) if c not in piv]
            for vals in itertools.product(range(p), repeat=len(slots)):
                rows = [[0] * n for _ in range(d)]
                for r, pc in enumerate(piv):
                    rows[r][pc] = 1
                for (r, c), x in zip(slots, vals):
                    rows[r][c] = x
                yield Subspace(p, n, tuple(tuple(r) for r in rows))


def subspaces_of(S: Subspace) -> Iterator[Subspace]:
    """Every subspace of ``S``, pushed forward from coordinates."""
    for T in all_subspaces(S.p, S.dim):
        yield Subspace(S.p, S.ambient_dim,
                       tuple(combine(S.p, b, S.basis, S.ambient_dim) for b in T.basis))


def count_subspaces(p: int, n: int, d: int) -> int:
    """Gaussian binomial coefficient [n choose d]_p."""
    num = den = 1
    for i in range(d):
        num *= p ** (n - i) - 1
        den *= p ** (i + 1) - 1
    return num // den


@dataclass(frozen=True)
class BilinearMap:
    """Bilinear map F_p^n x F_p^n -> F_p^m stored as ``table[i, j] = beta(e_i, e_j)``."""

    p: int
    dom_dim: int
    cod_dim: int
    table: np.ndarray = field(compare=False)

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.int64) % self.p
        if t.shape != (self.dom_dim, self.dom_dim, self.cod_dim):
            raise DimensionMismatch(
                f"table shape {t.shape}, expected {(self.dom_dim, self.dom_dim, self.cod_dim)}")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @classmethod
    def zero(cls, p: int, n: int, m: int) -> "BilinearMap":
        return cls(p, n, m, np.zeros((n, n, m), dtype=np.int64))

    @classmethod
    def from_entries(cls, p: int, n: int, m: int, entries) -> "BilinearMap":
        """Build from ``{(i, j): coefficient vector}``."""
        t = np.zeros((n, n, m), dtype=np.int64)
        for (i, j), w in dict(entries).items():
            t[i, j] = w
        return cls(p, n, m, t)

    def __call__(self, u: Vec, v: Vec) -> Vec:
        if len(u) != self.dom_dim or len(v) != self.dom_dim:
            raise DimensionMismatch("argument length differs from domain dimension")
        if not self.cod_dim:
            return ()
        w = np.einsum("i,j,ijk->k", np.asarray(u, dtype=np.int64),
                      np.asarray(v, dtype=np.int64), self.table)
        return tuple(int(x) % self.p for x in w)

    def skew(self) -> "BilinearMap":
        """``(u, v) -> beta(u, v) - beta(v, u)``."""
        return BilinearMap(self.p, self.dom_dim, self.cod_dim,
                           self.table - self.table.transpose(1, 0, 2))

    def transpose(self) -> "BilinearMap":
        return BilinearMap(self.p, self.dom_dim, self.cod_dim, self.table.transpose(1, 0, 2))

    def is_alternating(self) -> bool:
        sym = (self.table + self.table.transpose(1, 0, 2)) % self.p
        return not sym.any() and not any(self.table[i, i].any() for i in range(self.dom_dim))

    def entries(self) -> dict:
        out = {}
        for i in range(self.dom_dim):
            for j in range(self.dom_dim):
                if self.table[i, j].any():
                    out[(i, j)] = tuple(int(x) for x in self.table[i, j])
        return out

    def __eq__(self, other):
        if not isinstance(other, BilinearMap):
            return NotImplemented
        return (self.p, self.dom_dim, self.cod_dim) == (other.p, other.dom_dim, other.cod_dim) \
            and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.p, self.dom_dim, self.cod_dim, self.table.tobytes()))


def _restrict(p: int, constraints: list[Vec], inside: Subspace) -> Subspace:
    """``{x in inside : c . x = 0 for all c}``."""
    n = inside.ambient_dim
    local = [tuple(dot(p, c, s) for s in inside.basis) for c in constraints]
    sols = kernel(p, local, inside.dim)
    return Subspace(p, n, tuple(combine(p, y, inside.basis, n) for y in sols))


def perp(beta: BilinearMap, U: Subspace, inside: Subspace | None = None) -> Subspace:
    """Two-sided orthogonal of ``U``: vectors ``x`` with ``beta(x,u) = beta(u,x) = 0``."""
    p, n, m = beta.p, beta.dom_dim, beta.cod_dim
    if U.ambient_dim != n or U.p != p:
        raise DimensionMismatch("subspace does not live in the form's domain")
    inside = full_space(p, n) if inside is None else inside
    if inside.ambient_dim != n:
        raise DimensionMismatch("'inside' does not live in the form's domain")
    T = beta.table
    constraints = []
    for u in U.basis:
        ua = np.asarray(u, dtype=np.int64)
        left = np.einsum("j,ijk->ik", ua, T) % p   # beta(e_i, u)
        right = np.einsum("i,ijk->jk", ua, T) % p  # beta(u, e_j)
        for k in range(m):
            constraints.append(tuple(int(x) for x in left[:, k]))
            constraints.append(tuple(int(x) for x in right[:, k]))
    return _restrict(p, constraints, inside)


def radical(beta: BilinearMap, inside: Subspace | None = None) -> Subspace:
    """``{u in inside : beta(u, v) = beta(v, u) = 0 for all v in inside}``."""
    inside = full_space(beta.p, beta.dom_dim) if inside is None else inside
    return perp(beta, inside, inside)


def image_span(beta: BilinearMap, U: Subspace, V: Subspace | None = None) -> Subspace:
    """Span of ``beta(u, v)`` over basis vectors of ``U`` and ``V`` (default ``V = U``)."""
    V = U if V is None else V
    vals = [beta(u, v) for u in U.basis for v in V.basis]
    return Subspace(beta.p, beta.cod_dim, tuple(vals))


def is_commuting_isotropic(beta: BilinearMap, U: Subspace) -> bool:
    return all(beta(u, v) == beta(v, u) for u in U.basis for v in U.basis)


def maximal_isotropics(beta: BilinearMap, cap: int = MAX_ISOTROPIC_DIM) -> list[Subspace]:
    """Every inclusion-maximal commuting-isotropic subspace, each once, sorted.

    Isotropy is measured by the skew part ``beta(u,v) - beta(v,u)``.  The
    search starts from the radical of the skew part (which every maximal
    isotropic contains) and extends one line at a time inside the current
    orthogonal; visited subspaces are remembered so each is expanded once.
    """
    if beta.dom_dim > cap:
        raise CapacityError(f"isotropic search on dimension {beta.dom_dim} exceeds cap {cap}")
    p, n = beta.p, beta.dom_dim
    S = beta.skew()
    R = radical(S)
    Q = R.complement_in(full_space(p, n))
    d = len(Q)
    # the form on Q ~ V/R is nondegenerate; search there and add R back
    gram = np.einsum("ai,ijk,bj->abk", np.array(Q, dtype=np.int64).reshape(d, n), S.table,
                     np.array(Q, dtype=np.int64).reshape(d, n)) % p if d else None
    found = []
    # every isotropic subspace of F_p^d is reached once: its parent drops the
    # echelon row with the largest pivot, and a child's new pivot column must
    # be zero in every existing row
    stack = [((), ())]
    while stack:
        rows, pivots = stack.pop()
        perp_rows = [tuple(int(x) for x in row)
                     for r in rows
                     for row in (np.einsum("a,abk->bk", np.asarray(r, dtype=np.int64), gram) % p).T]
        P, Ppiv = rref(p, kernel(p, perp_rows, d), d)
        if len(P) == len(rows):
            found.append(rows)
            continue
        start = pivots[-1] + 1 if pivots else 0
        for i, c in enumerate(Ppiv):
            # rows of P with pivot >= c span the vectors of P vanishing before c
            if c < start or any(r[c] for r in rows):
                continue
            head, tail = P[i], P[i + 1:]
            for coeffs in itertools.product(range(p), repeat=len(tail)):
                v = add(p, head, combine(p, coeffs, tail, d))
                stack.append((rows + (v,), pivots + (c,)))
    found = [R.with_vectors(combine(p, x, Q, n) for x in rows) for rows in found]
    return sorted(found, key=Subspace.key)
