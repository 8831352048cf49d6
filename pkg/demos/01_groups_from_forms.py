"""Groups from bilinear maps.

A bilinear map tau: V x V -> W over F_p defines a group on pairs (v, w):

    (u, a) * (v, b) = (u + v, a + b + tau(u, v)).

For odd p this group has exponent p and class at most 2, and everything
about commutation is carried by the skew form beta = tau - tau^T.
"""
from formgroups import classify, constructions as C
from formgroups.formgroup import central_product, direct_sum, structural_subgroups

G = C.extraspecial(3, 1)
x, y = G.gen(0), G.gen(1)
print("Heisenberg group of order", G.order)
print("  x*y =", G.multiply(x, y), "  y*x =", G.multiply(y, x))
print("  [x, y] =", G.commutator(x, y), "(lands in the central coordinate)")
print("  x^3 =", G.power(x, 3))

# the four kinds the classifier distinguishes
for name, H in [("extraspecial(3,1)", G),
                ("free_nil2(3,3)", C.free_nil2(3, 3)),
                ("E + Z_3", direct_sum(G, C.free_nil2(3, 1))),
                ("E * E", central_product(G, G))]:
    c = classify(H)
    print(f"{name:18s} order {H.order:5d}  {c.kind:13s} |Z| = {c.center_order}, |G'| = {c.derived_order}")

# the centre is radical(beta) + W; here it is exactly W
s = structural_subgroups(C.free_nil2(3, 3))
print("free_nil2(3,3): centre == derived subgroup:", s.center == s.derived)
