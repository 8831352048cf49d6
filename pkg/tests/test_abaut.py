import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from formgroups import abaut, oracles
from formgroups.abaut import AbAut, AbelianPGroup
from formgroups.errors import CapacityError, PreconditionError


def brute_aut_count(A):
    """Count endomorphism matrices that are bijective on elements."""
    ranges = abaut.valid_entry_ranges(A)
    flat = [ranges[i][j] for i in range(A.rank) for j in range(A.rank)]
    n = 0
    for entries in itertools.product(*flat):
        M = np.array(entries, dtype=np.int64).reshape(A.rank, A.rank)
        images = {tuple(int(x) for x in (np.array(a) @ M) % np.array(A.moduli)) for a in A.elements()}
        n += len(images) == A.order
    return n


def brute_subgroups(A):
    """Every subgroup as the span of at most rank elements."""
    out = set()
    for combo in itertools.combinations_with_replacement(list(A.elements()), A.rank):
        out.add(abaut.span(A, combo).elements)
    return out


class TestGroups:
    def test_partitions(self):
        assert [A.orders for A in abaut.abelian_groups(3, 3)] == [(1,), (1, 1), (2,), (1, 1, 1), (2, 1), (3,)]
        assert len(abaut.abelian_groups(3, 6)) == 1 + 2 + 3 + 5 + 7 + 11

    def test_element_order(self):
        A = AbelianPGroup(3, (2, 1))
        assert A.element_order((3, 0)) == 3 and A.element_order((1, 0)) == 9 and A.element_order((0, 0)) == 1

    def test_bad_inputs(self):
        with pytest.raises(PreconditionError):
            AbelianPGroup(4, (1,))
        with pytest.raises(PreconditionError):
            AbelianPGroup(3, (0,))


class TestAutomorphisms:
    @pytest.mark.parametrize("p,orders", [(3, (1,)), (3, (2,)), (3, (1, 1)), (3, (2, 1)), (2, (2, 1)),
                                          (2, (1, 1, 1)), (5, (1, 1)), (2, (3, 1)), (3, (1, 1, 1))])
    def test_counts_against_image_count(self, p, orders):
        A = AbelianPGroup(p, orders)
        assert abaut.count_automorphisms(A) == brute_aut_count(A)

    @pytest.mark.parametrize("orders,count", [((1, 1, 1, 1), 24261120), ((2, 1), 108), ((1, 1), 48),
                                              ((2,), 6), ((1, 1, 1), 11232), ((2, 2), 3888)])
    def test_known_counts(self, orders, count):
        assert abaut.count_automorphisms(AbelianPGroup(3, orders)) == count

    def test_matrices_unique_and_valid(self):
        A = AbelianPGroup(3, (2, 1))
        mats = [tuple(M.ravel()) for stack in abaut.automorphism_matrices(A) for M in stack]
        assert len(mats) == len(set(mats)) == 108
        assert all(abaut.is_endomorphism_matrix(A, np.array(M).reshape(2, 2)) for M in mats)

    def test_order_condition(self):
        A = AbelianPGroup(3, (2, 1))
        with pytest.raises(PreconditionError, match="order"):
            AbAut.from_matrix(A, [[1, 0], [1, 1]])  # e_1 of order 3 cannot map onto an order-9 element

    def test_singular(self):
        with pytest.raises(PreconditionError):
            AbAut.from_matrix(AbelianPGroup(3, (1, 1)), [[1, 1], [2, 2]])

    def test_compose_and_json(self):
        rng = np.random.default_rng(0)
        A = AbelianPGroup(3, (2, 1, 1))
        f, g = abaut.random_automorphism(A, rng), abaut.random_automorphism(A, rng)
        h = f.compose(g)
        assert all(h(x) == g(f(x)) for x in A.elements())
        assert AbAut.from_json(f.to_json()) == f

    def test_det_mod_p_against_sympy(self):
        import sympy
        rng = np.random.default_rng(1)
        stack = rng.integers(0, 5, (40, 4, 4))
        got = abaut.det_mod_p(stack, 5)
        want = [int(sympy.Matrix(m.tolist()).det()) % 5 for m in stack]
        assert list(got) == want


class TestDisplacement:
    def test_multiplication_by_four(self):
        A = AbelianPGroup(3, (2,))
        d = abaut.displacement(A, AbAut.from_matrix(A, [[4]]))
        assert d.A_phi.elements == ((0,), (3,), (6,)) and d.m == 1

    def test_identity(self):
        A = AbelianPGroup(3, (1, 1))
        d = abaut.displacement(A, AbAut.identity(A))
        assert d.A_phi.order == 1 and d.m == 0

    def test_swap(self):
        A = AbelianPGroup(3, (1, 1))
        d = abaut.displacement(A, AbAut.from_matrix(A, [[0, 1], [1, 0]]))
        assert set(d.A_phi.elements) == {(t, -t % 3) for t in range(3)} and d.m == 1

    def test_matches_elementwise_definition(self):
        rng = np.random.default_rng(2)
        A = AbelianPGroup(3, (2, 1))
        for _ in range(10):
            phi = abaut.random_automorphism(A, rng)
            direct = abaut.span(A, [A.sub(a, phi(a)) for a in A.elements()])
            assert abaut.displacement(A, phi).A_phi == direct

    def test_subadditive(self):
        rng = np.random.default_rng(3)
        for orders in [(2, 1), (1, 1, 1), (3, 1), (2, 2)]:
            A = AbelianPGroup(3, orders)
            for _ in range(10):
                f, g = abaut.random_automorphism(A, rng), abaut.random_automorphism(A, rng)
                comp = set(abaut.displacement(A, f.compose(g)).A_phi.elements)
                both = abaut.span(A, abaut.displacement(A, f).generators + abaut.displacement(A, g).generators)
                assert comp <= set(both.elements)


class TestHeightFix:
    def test_examples(self):
        A = AbelianPGroup(3, (2,))
        assert abaut.verify_height_fix(A, AbAut.from_matrix(A, [[4]])).ok
        B = AbelianPGroup(3, (1, 1))
        r = abaut.verify_height_fix(B, AbAut.identity(B))
        assert r.ok and r.m == 0
        C = AbelianPGroup(3, (3,))
        r = abaut.verify_height_fix(C, AbAut.from_matrix(C, [[10]]))
        assert r.ok and r.m == 1

    def test_generator_displacement_gives_vacuous_fix(self):
        # x -> 2x moves the generator by -1, so m = 2 and p^m A = 0
        A = AbelianPGroup(3, (2,))
        phi = AbAut.from_matrix(A, [[2]])
        assert abaut.displacement(A, phi).m == 2
        assert abaut.verify_height_fix(A, phi).ok

    @pytest.mark.parametrize("A", abaut.abelian_groups(3, 3), ids=lambda A: str(A.orders))
    def test_batch_agrees_with_scalar(self, A):
        for stack in abaut.automorphism_matrices(A):
            batch = abaut.height_fix_batch(A, stack)
            scalar = [abaut.verify_height_fix(A, AbAut.from_matrix(A, M, check_images=False)).ok for M in stack]
            assert list(batch) == scalar and all(scalar)

    @settings(max_examples=40, deadline=None)
    @given(st.sampled_from([(2, (2, 1)), (2, (3,)), (5, (2,)), (3, (3, 2)), (2, (2, 2, 1))]),
           st.integers(0, 2 ** 32 - 1))
    def test_lemma_on_random_automorphisms(self, group, seed):
        p, orders = group
        A = AbelianPGroup(p, orders)
        phi = abaut.random_automorphism(A, np.random.default_rng(seed))
        assert abaut.verify_height_fix(A, phi).ok


class TestOrbitSearch:
    def test_plane_under_gl2(self):
        A = AbelianPGroup(3, (1, 1))
        Phi = abaut.general_linear(A)
        r = abaut.orbit_search(A, Phi)
        assert len(Phi) == 48 and r.orbit_size == 4 and r.best.order == 3
        assert len(abaut.all_subgroups(A)) == 6

    def test_identity_only(self):
        A = AbelianPGroup(3, (2, 1))
        r = abaut.orbit_search(A, [AbAut.identity(A)])
        assert r.orbit_size == 1 and r.best.order == 1

    def test_moved_line(self):
        A = AbelianPGroup(3, (2, 1))
        phi = AbAut.from_matrix(A, [[1, 1], [0, 1]])  # e_0 -> e_0 + e_1, e_1 fixed
        r = abaut.orbit_search(A, [AbAut.identity(A), phi])
        assert r.orbit_size == 2 and abaut.image(phi, r.best) != r.best

    @pytest.mark.parametrize("p,orders", [(3, (2, 1)), (2, (2, 1, 1)), (3, (1, 1, 1)), (2, (3, 2))])
    def test_subgroups_against_spans(self, p, orders):
        A = AbelianPGroup(p, orders)
        subs = abaut.all_subgroups(A)
        assert {S.elements for S in subs} == brute_subgroups(A)
        assert [S.key() for S in subs] == sorted(S.key() for S in subs)

    def test_against_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            p, orders = [(3, (2, 1)), (2, (2, 1)), (3, (1, 1, 1)), (5, (1, 1))][int(rng.integers(4))]
            A = AbelianPGroup(p, orders)
            Phi = [abaut.random_automorphism(A, rng) for _ in range(4)]
            assert abaut.orbit_search(A, Phi).orbit_size == oracles.abelian_orbit_max(A, Phi)

    def test_cap(self):
        with pytest.raises(CapacityError):
            abaut.orbit_search(AbelianPGroup(3, (4, 3)), [AbAut.identity(AbelianPGroup(3, (4, 3)))])
