"""Automorphisms of finite abelian p-groups.

For an automorphism phi of A, the displacement subgroup A_phi is generated
by the a - phi(a).  If p^m kills A_phi then phi fixes p^m A pointwise; the
check below runs it over every automorphism of a few small groups.  The
orbit search finds a subgroup with the most distinct images.
"""
import numpy as np

from formgroups import abaut
from formgroups.abaut import AbAut, AbelianPGroup

A = AbelianPGroup(3, (2,))
phi = AbAut.from_matrix(A, [[4]])
d = abaut.displacement(A, phi)
print("Z_9, x -> 4x: A_phi =", d.A_phi.elements, " m =", d.m)

for orders in [(1, 1), (2, 1), (2, 2), (1, 1, 1)]:
    A = AbelianPGroup(3, orders)
    total = ok = 0
    for stack in abaut.automorphism_matrices(A):
        total += len(stack)
        ok += int(abaut.height_fix_batch(A, stack).sum())
    print(f"Z_3-exponents {orders}: {ok}/{total} automorphisms fix p^m A")

A = AbelianPGroup(3, (1, 1))
print("(Z_3)^2 under GL(2,3): largest orbit", abaut.orbit_search(A, abaut.general_linear(A)).orbit_size)
rng = np.random.default_rng(7)
B = AbelianPGroup(3, (2, 1))
Phi = [abaut.random_automorphism(B, rng) for _ in range(5)]
res = abaut.orbit_search(B, Phi)
print(f"Z_9 + Z_3 under 5 random automorphisms: orbit {res.orbit_size} of subgroup {res.best.generators()}")
