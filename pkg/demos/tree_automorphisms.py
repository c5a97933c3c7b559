"""
Automorphisms of the Bruhat-Tits tree
=====================================

Matrices in GL2(Q_p) act on the (p+1)-regular tree of lattice classes.
Elliptic elements fix a vertex and have scale 1; hyperbolic elements
translate along an axis and have scale q^length.
"""
from tdlc import scale as sc, tree
from tdlc.fields import PAdicField
from tdlc.lattice import LinearAuto

Q2 = PAdicField(2)
T = tree.TreeModel(Q2)

for rows in ([[2, 0], [0, 1]], [[4, 0], [0, 1]], [[0, -1], [1, 0]], [[0, 1], [2, 0]]):
    g = LinearAuto(Q2, rows)
    c = tree.classify(g)
    print(rows, c.kind, "length", c.translation_length, "scale", sc.scale(T, g).value)

# Stabilizer indices come from counting orbits in the full automorphism group.
v = tree.Vertex.standard(Q2)
w = tree.Vertex.from_matrix(Q2, [[4, 0], [0, 1]])
print("[Stab(v) : Stab(v, w)] =", tree.stab_index(T.stab([v]), T.stab([w])).value)

# Two elliptic elements whose product is hyperbolic: the scale is not submultiplicative.
rep = tree.elliptic_product_demo(3)
print("s(x), s(y), s(xy) =", rep.scale_x, rep.scale_y, rep.scale_xy, rep.kinds)

# Unipotent elements over F_2((t)) have scale 1 yet move the base vertex ever further.
tab = tree.solvable_nonflat_probe(5)
for row in tab.rows:
    print("  k =", row["k"], " displacement", row["product"])
