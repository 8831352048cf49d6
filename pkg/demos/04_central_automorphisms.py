"""Central automorphisms of a tree group, built block by block.

On a tree group with an extra central coordinate d, each linear functional
lam on V gives an automorphism (v, w) -> (v, w + lam(v) d).  The diagonal
sweep chooses lam one window of blocks at a time so that it differs from a
list of automorphisms while fixing a list of maximal abelian subgroups; the
filter meets requirements one by one along a descending chain of finite
conditions.  Both results are re-checked by independent verifiers.
"""
import numpy as np

from formgroups import constructions as C

G = C.tree_group(3, [2, 2, 2, 2], with_d=True)
rng = np.random.default_rng(4)

M = C.branch_subgroup(G, ((1, 0), (0, 1), (1, 1), (1, 2)))
avoid = [C.CentralAut.identity(G), (1, 0, 0, 0, 0, 0, 0, 0)]
res = C.diagonal_automorphism(G, avoid, [M, M])
print("diagonal lam     :", res.aut.lam)
print("windows f(n)     :", res.windows)
print("checker failures :", C.check_diagonal(G, res, avoid, [M, M]))

sc = C.random_filter_scenario(G, rng, 3)
reqs = [(C.branch_subgroup(G, r["branch"]), r["psi"]) for r in sc["requirements"]]
out = C.qc_filter(G, reqs)
print("filter lam       :", out.aut.lam)
print("condition domains:", [c.domain for c in out.chain])
print("checker failures :", C.check_filter(G, out, reqs))
