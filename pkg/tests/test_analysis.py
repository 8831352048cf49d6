import numpy as np
import pytest

from formgroups import analysis as an, constructions as C, fpspace as fp, oracles
from formgroups.errors import CapacityError, InfeasibleError, PreconditionError
from formgroups.formgroup import Subgroup, abelian_group, central_product, structural_subgroups, whole_group

CORPUS = C.corpus(3, 6)
TINY = {k: G for k, G in CORPUS.items() if G.order <= 3 ** 4}
SMALL = {k: G for k, G in CORPUS.items() if G.order <= 3 ** 5}


def mask(T, S):
    m = np.zeros(T.size, dtype=bool)
    for x in S.elements():
        m[T.index(x)] = True
    return m


class TestClosure:
    def test_heisenberg_generators(self):
        G = C.extraspecial(3, 1)
        assert an.closure(G, [G.gen(0), G.gen(1)]).order == 27

    def test_empty(self):
        G = C.extraspecial(3, 1)
        assert an.closure(G, []).order == 1

    def test_single_line(self):
        G = C.free_nil2(3, 2)
        assert an.closure(G, [G.gen(0)]).order == 3

    def test_cap(self):
        G = C.free_nil2(3, 3)
        with pytest.raises(CapacityError):
            an.closure(G, [G.gen(0), G.gen(1), G.gen(2)], cap=100)


class TestSubgroupEnumeration:
    @pytest.mark.parametrize("name", sorted(TINY))
    def test_all_subgroups_matches_brute_force(self, name):
        G = TINY[name]
        T = oracles.CayleyTable(G)
        fast = {oracles._key(mask(T, S)) for S in an.all_subgroups(G)}
        brute = {oracles._key(m) for m in oracles.all_subgroups(T)}
        assert fast == brute
        assert sum(1 for _ in an.all_subgroups(G)) == len(brute)


class TestRelatives:
    def test_noncentral_line(self):
        G = C.extraspecial(3, 1)
        S = an.closure(G, [G.gen(0)])
        r = an.relative_subgroups(G, S)
        assert r.centralizer.order == 9 and r.normalizer == r.centralizer and r.normalizer.index == 3
        assert r.core.order == 1

    def test_above_derived_is_normal(self):
        G = C.free_nil2(3, 3)
        D = structural_subgroups(G).derived
        for U in fp.all_subspaces(3, 3):
            S = Subgroup(G, U, D.K)
            assert an.normalizer(G, S).order == G.order

    def test_center(self):
        G = C.chain_group(3, 3, "plain")
        Z = structural_subgroups(G).center
        r = an.relative_subgroups(G, Z)
        assert r.centralizer.order == r.normalizer.order == G.order and r.core == Z

    @pytest.mark.parametrize("name", sorted(TINY))
    def test_against_conjugation_oracle(self, name):
        G = TINY[name]
        T = oracles.CayleyTable(G)
        normals = [S for S in an.all_subgroups(G) if an.is_normal(G, S)]
        normal_masks = [mask(T, N) for N in normals]
        brute_normals = [m for m in oracles.all_subgroups(T) if oracles.normalizer(T, m).all()]
        assert {oracles._key(m) for m in normal_masks} == {oracles._key(m) for m in brute_normals}
        for S in an.all_subgroups(G):
            m = mask(T, S)
            r = an.relative_subgroups(G, S)
            assert np.array_equal(mask(T, r.centralizer), oracles.centralizer(T, m))
            assert np.array_equal(mask(T, r.normalizer), oracles.normalizer(T, m))
            core = mask(T, r.core)
            assert np.array_equal(core, oracles.core(T, m))
            # the core is the largest normal subgroup inside S
            assert all((nm <= core).all() for nm in normal_masks if (nm <= m).all())


class TestMaximalAbelians:
    def test_heisenberg(self):
        mas = an.maximal_abelians(C.extraspecial(3, 1))
        assert len(mas) == 4 and all(M.order == 9 and M.index == 3 for M in mas)

    def test_free_nil2(self):
        G = C.free_nil2(3, 3)
        mas = an.maximal_abelians(G)
        assert len(mas) == 13 == (3 ** 3 - 1) // 2
        assert all(M.K == G.W and M.U.dim == 1 for M in mas)

    def test_abelian(self):
        G = abelian_group(3, 3, 1)
        assert an.maximal_abelians(G) == [whole_group(G)]

    @pytest.mark.parametrize("name", sorted(SMALL))
    def test_against_brute_force(self, name):
        G = SMALL[name]
        T = oracles.CayleyTable(G)
        fast = [mask(T, M) for M in an.maximal_abelians(G)]
        brute = oracles.maximal_abelians(T)
        assert {oracles._key(m) for m in fast} == {oracles._key(m) for m in brute}
        Z = oracles.center(T)
        assert all((Z <= m).all() for m in fast)


class TestNumbers:
    @pytest.mark.parametrize("k", [1, 2])
    def test_gnum_extraspecial(self, k):
        n, wit = an.gnum(C.extraspecial(3, k), witness=True)
        assert n == 2 and len(wit) == 2
        G = wit[0].parent
        assert Subgroup.generated(G, wit[0].generators() + wit[1].generators()).order == G.order

    @pytest.mark.parametrize("n", [2, 3])
    def test_gnum_free(self, n):
        assert an.gnum(C.free_nil2(3, n)) == n

    def test_chinum_heisenberg(self):
        assert an.chinum(C.extraspecial(3, 1)) == 4

    def test_pnum(self):
        assert an.pnum(C.extraspecial(3, 1))[0] == 4
        assert an.pnum(abelian_group(3, 2))[0] == 1
        size, wit = an.pnum(C.chain_group(3, 4, "plain"))
        G = C.chain_group(3, 4, "plain")
        assert size >= 4
        assert all(G.commutator(x, y) != G.identity for i, x in enumerate(wit) for y in wit[i + 1:])

    @pytest.mark.parametrize("name", sorted(TINY))
    def test_against_oracles(self, name):
        G = TINY[name]
        T = oracles.CayleyTable(G)
        inv = an.invariants(G)
        assert (inv.g, inv.chi, inv.pmax) == (oracles.gnum(T), oracles.chinum(T), oracles.pnum(T))
        assert inv.g <= inv.chi and inv.P == inv.pmax + 1

    @pytest.mark.parametrize("name", sorted(CORPUS))
    def test_order_relations(self, name):
        G = CORPUS[name]
        g = an.gnum(G)
        assert g <= an.chinum(G)
        assert (g == 1) == (structural_subgroups(G).derived.order == 1)


class TestDecompose:
    def check(self, G):
        dec = an.decompose_22(G)
        gens = [x for P in dec.parts for x in P.generators()]
        assert all(P.is_abelian for P in dec.parts)
        assert Subgroup.generated(G, gens).order == G.order
        derived_dim = structural_subgroups(G).derived.K.dim
        assert dec.depth <= derived_dim
        return dec

    def test_abelian(self):
        G = abelian_group(3, 2, 1)
        assert self.check(G).parts == [whole_group(G)]

    def test_heisenberg(self):
        assert len(self.check(C.extraspecial(3, 1)).parts) <= 2

    def test_central_product(self):
        E = C.extraspecial(3, 1)
        assert len(self.check(central_product(E, E)).parts) <= 4

    @pytest.mark.parametrize("name", sorted(CORPUS))
    def test_corpus(self, name):
        G = CORPUS[name]
        assert len(self.check(G).parts) >= an.gnum(G)


class TestIncompatible:
    def pairwise(self, G, Bs):
        return all(not Subgroup.generated(G, a.generators() + b.generators()).is_abelian
                   for i, a in enumerate(Bs) for b in Bs[i + 1:])

    def test_heisenberg_over_center(self):
        G = C.extraspecial(3, 1)
        Z = structural_subgroups(G).center
        Bs = an.incompatible_extensions(G, Z, 2)
        mas = an.maximal_abelians(G)
        assert len(Bs) == 2 and all(B in mas for B in Bs) and self.pairwise(G, Bs)

    def test_extraspecial_two(self):
        G = C.extraspecial(3, 2)
        Z = structural_subgroups(G).center
        Bs = an.incompatible_extensions(G, Z, 3)
        assert len(Bs) == 3 and all(B.is_abelian and Z <= B for B in Bs) and self.pairwise(G, Bs)

    def test_maximal_abelian_rejected(self):
        G = C.extraspecial(3, 1)
        with pytest.raises(PreconditionError):
            an.incompatible_extensions(G, an.maximal_abelians(G)[0], 2)

    def test_exhaustion(self):
        G = C.extraspecial(3, 1)
        with pytest.raises(InfeasibleError):
            an.incompatible_extensions(G, structural_subgroups(G).center, 5)


class TestProfile:
    def test_heisenberg(self):
        prof = an.neumann_profile(C.extraspecial(3, 1))
        assert (prof.gz, prof.maxN, prof.maxC, prof.maxCore, prof.maxAbelianN) == (9, 3, 9, 3, 3)

    def test_extraspecial_two(self):
        prof = an.neumann_profile(C.extraspecial(3, 2))
        assert (prof.gz, prof.maxN, prof.maxC, prof.maxAbelianN) == (81, 9, 81, 9) and prof.exact

    def test_abelian(self):
        prof = an.neumann_profile(abelian_group(3, 2, 1))
        assert (prof.gz, prof.maxN, prof.maxC, prof.maxCore, prof.maxAbelianN) == (1, 1, 1, 1, 1)

    @pytest.mark.parametrize("name", sorted(TINY))
    def test_against_brute_force(self, name):
        G = TINY[name]
        prof = an.neumann_profile(G)
        brute = oracles.neumann_profile(oracles.CayleyTable(G))
        assert (prof.gz, prof.maxN, prof.maxC, prof.maxCore, prof.maxAbelianN) == \
            (brute.gz, brute.maxN, brute.maxC, brute.maxCore, brute.maxAbelianN)
        for v in (prof.gz, prof.maxN, prof.maxC, prof.maxCore, prof.maxAbelianN):
            assert G.order % v == 0

    def test_sampling_flagged_and_seeded(self):
        G = C.tree_group(3, [2, 3])
        a = an.neumann_profile(G, samples=200, seed=3)
        b = an.neumann_profile(G, samples=200, seed=3)
        assert not a.exact and a == b
        exact = an.neumann_profile(C.extraspecial(3, 1))
        assert exact.exact

    def test_sampled_values_are_lower_bounds(self):
        G = C.free_nil2(3, 3)
        full = an.neumann_profile(G)
        sampled = an.neumann_profile(G, cap=3 ** 5, samples=300, seed=1)
        assert not sampled.exact
        assert sampled.maxN <= full.maxN and sampled.maxC <= full.maxC and sampled.maxCore <= full.maxCore

    def test_exact_over_cap(self):
        with pytest.raises(CapacityError):
            an.neumann_profile(C.free_nil2(3, 3), cap=3 ** 5, exact=True)


def test_central_orbit_search():
    G = C.tree_group(3, [2], with_d=True)
    d = G.cen_dim - 1
    auts = [C.CentralAut(G, (0, 0), d), C.CentralAut(G, (1, 0), d), C.CentralAut(G, (2, 0), d)]
    S, size = an.central_orbit_search(G, auts)
    # a line through e_0 with d missing from K is moved to three different lifts
    assert size == 3 and S.U.dim >= 1 and not S.contains_W
    images = {frozenset(phi(x) for x in S.elements()) for phi in auts}
    assert len(images) == 3
