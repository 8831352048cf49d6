"""Maximal abelian subgroups are maximal isotropic subspaces.

Every maximal abelian subgroup contains the centre, hence all of W, so it is
W plus a subspace U of V on which the skew form vanishes.  Enumerating those
is a finite search; a brute-force pass over the multiplication table agrees.
"""
import numpy as np

from formgroups import analysis, constructions as C, oracles

for G in [C.extraspecial(3, 1), C.extraspecial(3, 2), C.free_nil2(3, 3), C.tree_group(3, [2, 3])]:
    mas = analysis.maximal_abelians(G)
    print(f"{G.label:26s} {len(mas):3d} maximal abelians, indices {sorted({M.index for M in mas})}")

# cross-check one group element by element
G = C.chain_group(3, 3, "plain")
T = oracles.CayleyTable(G)
fast = set()
for M in analysis.maximal_abelians(G):
    mask = np.zeros(T.size, dtype=bool)
    for x in M.elements():
        mask[T.index(x)] = True
    fast.add(oracles._key(mask))
brute = {oracles._key(m) for m in oracles.maximal_abelians(T)}
print("chain_group(3,3): isotropic method agrees with brute force:", fast == brute)

# in a tree group each maximal abelian is a choice of one line per block
G = C.tree_group(3, [2, 3])
M = analysis.maximal_abelians(G)[17]
print("branch of the 18th maximal abelian:", C.branch_of(G, M))
