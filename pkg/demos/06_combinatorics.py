"""Sunflowers, level trees, and prefix codings."""
import numpy as np

from formgroups import combinat

rng = np.random.default_rng(6)

# above k! (r-1)^k sets a k-uniform family must contain an r-sunflower
k, r = 3, 3
F = combinat.random_family(rng, 12, combinat.erdos_rado_bound(k, r) + 1, size=k)
s = combinat.sunflower(F, r)
print(f"{len(F)} random {k}-sets: sunflower root {s.root}, petals {s.members} ({s.method})")

# branches of the complete binary tree of height 4, recoded by their prefixes
t = combinat.complete_tree(2, 4)
B = combinat.branch_family(t)
A = combinat.ad_convert(B, 4)
worst = max(len(set(a) & set(b)) for i, a in enumerate(A.sets) for b in A.sets[i + 1:])
print(f"{len(A)} coded branches of size 4, largest pairwise intersection {worst}")

# trees survive the trip through their branch family
t = combinat.random_tree(rng, 4)
back = combinat.tree_from_family(combinat.branches_as_family(t))
print("random tree rebuilt from its branches:", back.canonical_form() == t.canonical_form())
print(combinat.complete_tree(2, 2).to_dot())
