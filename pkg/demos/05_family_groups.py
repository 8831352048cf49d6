"""Encoding a set family in a group and reading it back.

family_group(p, k, F) extends the extraspecial group on 2k generators by one
automorphism phi_A per set A, where phi_A moves a_b by the central generator
exactly when b is in A.  The commutators [a_b, phi_A] recover F.  With an
almost disjoint family, maximal abelian subgroups stay small in index while
|G/Z| grows with the family.
"""
import numpy as np

from formgroups import analysis, combinat, constructions as C, fpspace as fp

rng = np.random.default_rng(5)
for _ in range(3):
    F = combinat.random_family(rng, 4, 3, size=2)
    H = C.family_group(3, 2, F)
    funcs = combinat.extract_tree(H, [H.gen(i) for i in range(4)], C.adjoined_generators(H),
                                  H.adjoined["target"])
    worst = max(M.index for M in analysis.maximal_abelians(H))
    gz = 3 ** (H.gen_dim - fp.radical(H.beta).dim)
    print(f"F = {F.sets}: recovered {funcs.supports(4).sets}, max [G:A] = {worst}, |G/Z| = {gz}")
