"""
Flat groups of commuting automorphisms
======================================

Two diagonal automorphisms of Q_2^3 share a tidy lattice.  The lattice splits
into eigen-directions on which every word acts by a single power of 2, and
the scale of a word is read off from those powers.
"""
from fractions import Fraction

from tdlc import scale as sc
from tdlc.fields import PAdicField
from tdlc.lattice import LatticeModel, LinearAuto

Q2 = PAdicField(2)
model = LatticeModel(Q2, 3)
gens = [LinearAuto.diag(Q2, [2, 2, 2]), LinearAuto.diag(Q2, [2, 4, 8])]

ff = sc.flat_factor(model, gens)
print("factors:", ff.q, " flat rank:", ff.rank)
for f in ff.factors:
    print("  base", f.base, " exponent row", f.rho)

# Predicted and measured scales for a few words (generator index, ±1).
for word in [((0, -1),), ((1, -1),), ((0, 1), (1, -1)), ((0, -1), (0, -1), (1, 1))]:
    w = sc.compose_word(model, gens, word)
    print(word, "predicted", ff.predicted_scale(word), "measured", sc.scale(model, w).value)

# A non-commuting pair is rejected.
try:
    sc.flat_factor(model, [gens[1], LinearAuto(Q2, [[1, 1, 0], [0, 1, 0], [0, 0, 1]])])
except sc.NotFlat as exc:
    print("rejected:", exc)

print("diag(1, 1/2, 4) scale:", sc.scale(model, LinearAuto.diag(Q2, [1, Fraction(1, 2), 4])).value)
