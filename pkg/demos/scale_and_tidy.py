"""
Scale and tidy subgroups on p-adic vector groups
================================================

A linear automorphism of Q_p^n moves compact open subgroups (lattices).  The
scale is the smallest index [A(V) : A(V) ∩ V] over all lattices V; a lattice
reaching it is called tidy.
"""
from fractions import Fraction

from tdlc import scale as sc
from tdlc.fields import PAdicField
from tdlc.lattice import Lattice, LatticeModel, LinearAuto

Q3 = PAdicField(3)
model = LatticeModel(Q3, 2)
alpha = LinearAuto.diag(Q3, [3, Fraction(1, 3)])

# A skew lattice is not tidy: its moved index is 9.
skew = Lattice.from_matrix(Q3, [[1, 0], [1, 3]])
print("tidy above?", sc.is_tidy_above(model, alpha, skew))
print("moved index:", sc.moved_index(model, alpha, skew).value)

# Tidying intersects forward images until the index identity holds.
cert = sc.tidy(model, alpha, skew)
print("tidy lattice:", cert.output)
print("minimizing index:", cert.minimizing_index.value, "after", cert.step1_exponent, "step(s)")

# The scale agrees with the eigenvalue formula from the Newton polygon.
print("scale:", sc.scale(model, alpha).value, "oracle:", model.scale_oracle(alpha).value)

# Powers, inverses and conjugates behave as expected.
rep = sc.scale_report(model, LinearAuto.diag(Q3, [9, Fraction(1, 3)]), n_max=4)
print("s =", rep.scale.value, " s(inverse) =", rep.inverse_scale.value, " modular =", rep.modular)
for name, ok in rep.checks.items():
    print(f"  {name:24s} {ok}")
