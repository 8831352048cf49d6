"""Generating number, covering number, non-commuting sets, and decomposition.

g(G) is the least number of abelian subgroups generating G, chi(G) the least
number covering it, and pmax the largest set of pairwise non-commuting
elements.  decompose_22 builds an explicit abelian generating family by a
sweep over the elements that corrects each one by powers of a pivot pair.
"""
from formgroups import analysis, constructions as C
from formgroups.formgroup import Subgroup, central_product

E = C.extraspecial(3, 1)
groups = [E, central_product(E, E), C.free_nil2(3, 3), C.chain_group(3, 4, "plain")]
print(f"{'group':28s} {'g':>3s} {'chi':>4s} {'pmax':>5s} {'parts':>6s}")
for G in groups:
    inv = analysis.invariants(G)
    dec = analysis.decompose_22(G)
    gens = [x for P in dec.parts for x in P.generators()]
    assert Subgroup.generated(G, gens).order == G.order
    print(f"{G.label or 'E*E':28s} {inv.g:3d} {inv.chi:4d} {inv.pmax:5d} {len(dec.parts):6d}")

# two abelian subgroups suffice for the paired chain group
P = C.chain_group(3, 4, "paired")
A0, A1 = C.chain_witnesses(P)
print("paired chain: <A0, A1> is everything:",
      Subgroup.generated(P, A0.generators() + A1.generators()).order == P.order)

# normaliser indices stay at p^k while |G/Z| is p^(2k)
for k in (1, 2):
    prof = analysis.neumann_profile(C.extraspecial(3, k))
    print(f"extraspecial(3,{k}): max [G:N(U)] = {prof.maxN}, |G/Z| = {prof.gz}")
