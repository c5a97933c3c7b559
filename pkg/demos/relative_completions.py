"""
Relative profinite completions from coset tables
================================================

A commensurated subgroup L of G gives a permutation action of G on G/L.
Finite pieces of that action (orbits of L, generated permutation groups on
saturated orbit sets) describe the completion level by level.
"""
from fractions import Fraction

from tdlc import relprof

# Lamplighter group with L = {lamp 0 off}: levels match the wreath truncations.
rep = relprof.completion_fingerprint("lamplighter", 3)
print("lamplighter levels:", {m: v["order"] for m, v in rep.levels.items()}, "match:", rep.matched)

# SL2(Z[1/3]) with L = SL2(Z): coset orbits equal sphere sizes in the 4-regular tree.
M = relprof.SL2Rational(3)
gamma = M.mat(3, 0, 0, Fraction(1, 3))
print("coset orbit index:", relprof.commensuration_index(M, gamma).value,
      " lattice side:", relprof.lattice_side_index(3, gamma).value,
      " cyclic sublattices mod 9:", relprof.count_cyclic_sublattices(3, 2))

# Nested subgroups give a map between completions.
r = relprof.rho_nested(relprof.Lamplighter((0, 1)), relprof.Lamplighter((0,)), 2)
print("kernel order", r.kernel_order, " fiber group order", r.fiber_group_order)

# Transfer of a homomorphism from a finite-index subgroup into a wreath product.
for case in (relprof.z_mod_two_case(), relprof.s3_a3_case()):
    print("homomorphism", case.homomorphism, " projection", case.projection_ok, " conjugation", case.ad_ok)
