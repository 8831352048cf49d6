"""Groups E(tau) of exponent p and class at most 2 presented by bilinear factor systems.

An element is a pair ``(v, w)`` with ``v`` in the generator space V = F_p^n
and ``w`` in the central space W = F_p^m; multiplication is

    (u, a) * (v, b) = (u + v, a + b + tau(u, v)).

The generator part comes first.  Everything about commutation is carried by
the skew form ``beta(u, v) = tau(u, v) - tau(v, u)``: ``[x, y] = (0, beta(u, v))``
with ``[x, y] = x^-1 y^-1 x y``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np
import sympy

from . import fpspace as fp
from .errors import CapacityError, DimensionMismatch, PreconditionError
from .fpspace import BilinearMap, Subspace

ELEMENT_CAP = 3 ** 8


class Element(NamedTuple):
    v: tuple
    w: tuple


@dataclass(frozen=True)
class FactorSystem:
    """A map tau: V x V -> W, bilinear unless ``overrides`` edits some values.

    ``overrides`` maps pairs of V-vectors to W-vectors and exists to describe
    hand-edited (possibly invalid) tables for :func:`validate_factor_system`.
    """

    p: int
    gen_dim: int
    cen_dim: int
    tau: BilinearMap
    overrides: tuple = ()

    def __call__(self, u, v):
        for (a, b), w in self.overrides:
            if a == tuple(u) and b == tuple(v):
                return tuple(x % self.p for x in w)
        return self.tau(u, v)


@dataclass
class FactorSystemReport:
    ok: bool
    violations: list = field(default_factory=list)


def validate_factor_system(fs: FactorSystem) -> FactorSystemReport:
    """Check normalisation and the cocycle identity on a spanning set.

    The spanning set is ``{0} + basis`` together with every vector named in
    ``overrides``.  Each violation is reported as ``(kind, args)``.
    """
    p, n, m = fs.p, fs.gen_dim, fs.cen_dim
    zero_v, zero_w = fp.zero_vec(n), fp.zero_vec(m)
    points = [zero_v] + [fp.unit_vec(n, i) for i in range(n)]
    for (a, b), _ in fs.overrides:
        for x in (tuple(a), tuple(b)):
            if x not in points:
                points.append(x)
    report = FactorSystemReport(True)
    for u in points:
        for args in ((u, zero_v), (zero_v, u)):
            if fs(*args) != zero_w:
                report.violations.append(("normalization", args))
    for f, g, h in itertools.product(points, repeat=3):
        lhs = fp.add(p, fs(fp.add(p, f, g), h), fs(f, g))
        rhs = fp.add(p, fs(f, fp.add(p, g, h)), fs(g, h))
        if lhs != rhs:
            report.violations.append(("cocycle", (f, g, h)))
    report.ok = not report.violations
    return report


def _canonical_tau(tau: BilinearMap) -> BilinearMap:
    # keep beta(e_i, e_j) above the diagonal, drop the symmetric part
    skew = tau.table - tau.table.transpose(1, 0, 2)
    return BilinearMap(tau.p, tau.dom_dim, tau.cod_dim, np.triu(skew.transpose(2, 0, 1), 1).transpose(1, 2, 0))


@dataclass(frozen=True, eq=False)
class FormGroup:
    """The group E(tau) for a bilinear tau over an odd prime field.

    ``tau`` is stored strictly upper triangular; any other bilinear table is
    replaced by the upper-triangular table with the same skew form.
    ``blocks``, ``family`` and ``adjoined`` are optional annotations written
    by the constructions (block windows of a tree group, the set family of a
    family group, the functionals of a dual extension).
    """

    tau: BilinearMap
    blocks: tuple | None = None
    family: tuple | None = None
    adjoined: dict | None = None
    label: str = ""

    def __post_init__(self):
        p = self.tau.p
        if p == 2:
            raise PreconditionError(
                "p = 2 rejected: x^2 = (0, tau(u,u)) so E(tau) need not have exponent p")
        if not sympy.isprime(p):
            raise PreconditionError(f"modulus {p} is not prime")
        object.__setattr__(self, "tau", _canonical_tau(self.tau))

    @classmethod
    def from_factor_system(cls, fs: FactorSystem, **kw) -> "FormGroup":
        report = validate_factor_system(fs)
        if not report.ok:
            raise PreconditionError(f"invalid factor system: {report.violations[0]}")
        return cls(fs.tau, **kw)

    @classmethod
    def from_entries(cls, p: int, n: int, m: int, entries, **kw) -> "FormGroup":
        return cls(BilinearMap.from_entries(p, n, m, entries), **kw)

    @property
    def p(self) -> int:
        return self.tau.p

    @property
    def gen_dim(self) -> int:
        return self.tau.dom_dim

    @property
    def cen_dim(self) -> int:
        return self.tau.cod_dim

    @property
    def order(self) -> int:
        return self.p ** (self.gen_dim + self.cen_dim)

    @cached_property
    def beta(self) -> BilinearMap:
        return self.tau.skew()

    def same_structure(self, other: "FormGroup") -> bool:
        return self.tau == other.tau

    def __eq__(self, other):
        if not isinstance(other, FormGroup):
            return NotImplemented
        return self.tau == other.tau and self.blocks == other.blocks \
            and self.family == other.family and self.adjoined == other.adjoined

    def __hash__(self):
        return hash(self.tau)

    # elements

    def element(self, v: Sequence[int] = (), w: Sequence[int] = ()) -> Element:
        v = tuple(v) if v else fp.zero_vec(self.gen_dim)
        w = tuple(w) if w else fp.zero_vec(self.cen_dim)
        if len(v) != self.gen_dim or len(w) != self.cen_dim:
            raise DimensionMismatch(f"element shape ({len(v)}, {len(w)}) in a group with "
                                    f"({self.gen_dim}, {self.cen_dim})")
        return Element(fp.vec(self.p, v), fp.vec(self.p, w))

    def gen(self, i: int) -> Element:
        return Element(fp.unit_vec(self.gen_dim, i), fp.zero_vec(self.cen_dim))

    def central(self, k: int) -> Element:
        return Element(fp.zero_vec(self.gen_dim), fp.unit_vec(self.cen_dim, k))

    @property
    def identity(self) -> Element:
        return Element(fp.zero_vec(self.gen_dim), fp.zero_vec(self.cen_dim))

    def _check(self, *xs: Element) -> None:
        for x in xs:
            if len(x.v) != self.gen_dim or len(x.w) != self.cen_dim:
                raise DimensionMismatch("element belongs to a group of different shape")

    def multiply(self, x: Element, y: Element) -> Element:
        self._check(x, y)
        p = self.p
        t = self.tau(x.v, y.v)
        return Element(fp.add(p, x.v, y.v), tuple((a + b + c) % p for a, b, c in zip(x.w, y.w, t)))

    def inverse(self, x: Element) -> Element:
        self._check(x)
        p = self.p
        t = self.tau(x.v, x.v)
        return Element(fp.scale(p, -1, x.v), tuple((c - a) % p for a, c in zip(x.w, t)))

    def power(self, x: Element, k: int) -> Element:
        if k < 0:
            x, k = self.inverse(x), -k
        out = self.identity
        while k:
            if k & 1:
                out = self.multiply(out, x)
            x = self.multiply(x, x)
            k >>= 1
        return out

    def commutator(self, x: Element, y: Element) -> Element:
        """``x^-1 y^-1 x y`` by the group law (not via the skew form)."""
        xy = self.multiply(x, y)
        yx = self.multiply(y, x)
        return self.multiply(self.inverse(yx), xy)

    def product(self, xs: Iterable[Element]) -> Element:
        out = self.identity
        for x in xs:
            out = self.multiply(out, x)
        return out

    def elements(self, cap: int = ELEMENT_CAP) -> Iterator[Element]:
        """All elements in lexicographic ``(v, w)`` order."""
        if self.order > cap:
            raise CapacityError(f"enumerating {self.order} elements exceeds cap {cap}")
        p, n, m = self.p, self.gen_dim, self.cen_dim
        for v in itertools.product(range(p), repeat=n):
            for w in itertools.product(range(p), repeat=m):
                yield Element(v, w)

    def random_element(self, rng) -> Element:
        p = self.p
        return Element(tuple(int(x) for x in rng.integers(0, p, self.gen_dim)),
                       tuple(int(x) for x in rng.integers(0, p, self.cen_dim)))

    @property
    def V(self) -> Subspace:
        return fp.full_space(self.p, self.gen_dim)

    @property
    def W(self) -> Subspace:
        return fp.full_space(self.p, self.cen_dim)


@dataclass(frozen=True, eq=False)
class Subgroup:
    """A subgroup stored as ``(U, K, lifts)``.

    ``U`` is the image in V, ``K`` the intersection with W, and ``lifts[i]``
    is a W-part (reduced modulo ``K``) making ``(U.basis[i], lifts[i])`` a
    member.  Every subgroup of a FormGroup has exactly one such form, because
    all commutators of members lie in ``K`` and every element has order p.
    When ``K = W`` the lifts are zero and this is the plain subspace pair.
    """

    parent: FormGroup
    U: Subspace
    K: Subspace
    lifts: tuple = ()

    def __post_init__(self):
        G = self.parent
        if self.U.ambient_dim != G.gen_dim or self.K.ambient_dim != G.cen_dim:
            raise DimensionMismatch("subspaces do not match the parent group")
        lifts = tuple(self.lifts) if self.lifts else (fp.zero_vec(G.cen_dim),) * self.U.dim
        if len(lifts) != self.U.dim:
            raise DimensionMismatch("one lift per basis vector of U required")
        object.__setattr__(self, "lifts", tuple(self.K.reduce(a) for a in lifts))
        if not fp.image_span(G.beta, self.U) <= self.K:
            raise PreconditionError("beta(U, U) is not contained in K; not a subgroup")

    @classmethod
    def from_pair(cls, G: FormGroup, U: Subspace, K: Subspace | None = None) -> "Subgroup":
        return cls(G, U, G.W if K is None else K)

    @classmethod
    def generated(cls, G: FormGroup, gens: Sequence[Element]) -> "Subgroup":
        """The subgroup generated by ``gens``, by elimination with group products."""
        p, n = G.p, G.gen_dim
        G._check(*gens)
        echelon: dict[int, Element] = {}
        central = []
        for g in gens:
            x = g
            while True:
                lead = next((i for i, c in enumerate(x.v) if c), None)
                if lead is None or lead not in echelon:
                    break
                x = G.multiply(x, G.power(echelon[lead], -x.v[lead]))
            if lead is None:
                central.append(x.w)
            else:
                echelon[lead] = G.power(x, pow(x.v[lead], -1, p))
        U = Subspace(p, n, tuple(e.v for e in echelon.values()))
        # commutators of generators span beta(U, U) because beta is bilinear
        central.extend(G.beta(a, b) for a, b in itertools.combinations(U.basis, 2))
        K = Subspace(p, G.cen_dim, tuple(central))
        order = sorted(echelon)
        ech_v = [echelon[i].v for i in order]
        lifts = []
        for u in U.basis:
            coeffs = _solve_combination(p, ech_v, u, order)
            lifts.append(G.product(G.power(echelon[i], c) for i, c in zip(order, coeffs)).w)
        return cls(G, U, K, tuple(lifts))

    @property
    def order(self) -> int:
        return self.U.order * self.K.order

    @property
    def index(self) -> int:
        return self.parent.order // self.order

    def lift(self, v) -> Element:
        """The member with V-part ``v`` whose W-part is reduced modulo ``K``."""
        G = self.parent
        coeffs = self.U.coordinates(tuple(v))
        x = G.product(G.power(Element(u, a), c) for u, a, c in zip(self.U.basis, self.lifts, coeffs))
        return Element(x.v, self.K.reduce(x.w))

    def __contains__(self, x: Element) -> bool:
        self.parent._check(x)
        if tuple(x.v) not in self.U:
            return False
        return fp.sub(self.parent.p, tuple(x.w), self.lift(x.v).w) in self.K

    def elements(self, cap: int = ELEMENT_CAP) -> list[Element]:
        if self.order > cap:
            raise CapacityError(f"enumerating {self.order} elements exceeds cap {cap}")
        p = self.parent.p
        out = []
        ks = list(self.K.vectors())
        for v in self.U.vectors():
            base = self.lift(v).w
            out.extend(Element(v, fp.add(p, base, k)) for k in ks)
        return sorted(out)

    def generators(self) -> list[Element]:
        G = self.parent
        return [Element(u, a) for u, a in zip(self.U.basis, self.lifts)] + \
            [Element(fp.zero_vec(G.gen_dim), k) for k in self.K.basis]

    @property
    def is_abelian(self) -> bool:
        return fp.is_commuting_isotropic(self.parent.beta, self.U)

    @property
    def contains_W(self) -> bool:
        return self.K.dim == self.parent.cen_dim

    def derived_part(self) -> Subspace:
        return fp.image_span(self.parent.beta, self.U)

    def key(self) -> tuple:
        return (self.U.dim, self.U.key(), self.K.key(), self.lifts)

    def __eq__(self, other):
        if not isinstance(other, Subgroup):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __le__(self, other: "Subgroup") -> bool:
        return all(g in other for g in self.generators())

    def __repr__(self):
        return f"Subgroup(order={self.order}, U={self.U.basis}, K={self.K.basis}, lifts={self.lifts})"


def _solve_combination(p, rows, target, leads):
    # rows[i] has leading coordinate leads[i]; echelon but not reduced
    coeffs = []
    rest = list(target)
    for row, lead in zip(rows, leads):
        c = rest[lead] % p
        coeffs.append(c)
        if c:
            rest = [(a - c * b) % p for a, b in zip(rest, row)]
    if any(rest):
        raise ValueError("target not in span")
    return coeffs


def trivial_subgroup(G: FormGroup) -> Subgroup:
    return Subgroup(G, fp.zero_space(G.p, G.gen_dim), fp.zero_space(G.p, G.cen_dim))


def whole_group(G: FormGroup) -> Subgroup:
    return Subgroup(G, G.V, G.W)


@dataclass(frozen=True)
class Structure:
    center: Subgroup
    derived: Subgroup
    frattini: Subgroup


@dataclass(frozen=True)
class Classification:
    kind: str
    center_order: int
    derived_order: int
    frattini_order: int


def structural_subgroups(G: FormGroup) -> Structure:
    """Center, derived subgroup and Frattini subgroup.

    For odd p every element has order p, so the Frattini subgroup
    ``G' G^p`` is just ``G'``.
    """
    # (u, a)^p = (0, p a + C(p,2) tau(u,u)) vanishes exactly because p is odd
    assert G.p % 2 == 1
    center = Subgroup.from_pair(G, fp.radical(G.beta), G.W)
    D = fp.image_span(G.beta, G.V)
    derived = Subgroup(G, fp.zero_space(G.p, G.gen_dim), D)
    return Structure(center, derived, derived)


def classify(G: FormGroup) -> Classification:
    s = structural_subgroups(G)
    zo, do = s.center.order, s.derived.order
    if do == 1:
        kind = "abelian"
    elif s.center == s.derived:
        kind = "extraspecial" if zo == G.p else "special"
    else:
        kind = "class2-other"
    return Classification(kind, zo, do, s.frattini.order)


def direct_sum(G1: FormGroup, G2: FormGroup) -> FormGroup:
    """V and W coordinates concatenated, tau block diagonal."""
    if G1.p != G2.p:
        raise DimensionMismatch(f"moduli {G1.p} and {G2.p} differ")
    n1, m1, n2, m2 = G1.gen_dim, G1.cen_dim, G2.gen_dim, G2.cen_dim
    t = np.zeros((n1 + n2, n1 + n2, m1 + m2), dtype=np.int64)
    t[:n1, :n1, :m1] = G1.tau.table
    t[n1:, n1:, m1:] = G2.tau.table
    return FormGroup(BilinearMap(G1.p, n1 + n2, m1 + m2, t))


def central_product(G1: FormGroup, G2: FormGroup) -> FormGroup:
    """V coordinates concatenated, the two one-dimensional centres identified."""
    if G1.p != G2.p:
        raise DimensionMismatch(f"moduli {G1.p} and {G2.p} differ")
    if G1.cen_dim != 1 or G2.cen_dim != 1:
        raise PreconditionError("central product needs both central dimensions equal to 1")
    n1, n2 = G1.gen_dim, G2.gen_dim
    t = np.zeros((n1 + n2, n1 + n2, 1), dtype=np.int64)
    t[:n1, :n1] = G1.tau.table
    t[n1:, n1:] = G2.tau.table
    return FormGroup(BilinearMap(G1.p, n1 + n2, 1, t))


def trivial_group(p: int) -> FormGroup:
    return FormGroup(BilinearMap.zero(p, 0, 0))


def abelian_group(p: int, n: int, m: int = 0) -> FormGroup:
    return FormGroup(BilinearMap.zero(p, n, m))
