"""
Closed subgroups of the product of F_2 under the shift
======================================================

Subgroups are cut out by annihilators under the pairing <h, k> = sum h(-l) k(l).
On a finite window, the one-sided tail code is moved by every shift but with
finite index, while no shift-stable code is commensurable with it.
"""
from tdlc import shift

K = shift.AnnihilatorCode.upsilon(4)
for k in range(-3, 4):
    print(f"[K : K ∩ tau^{k} K] =", shift.commensuration_index(K, shift.tau_power(k)).value)

# The reflection sigma moves the tail code by an amount that grows with the window.
for N in (4, 6, 8):
    rep = shift.counterexample_suite(N)
    print(f"N={N}: sigma index {rep.sigma_index}, verdicts {rep.verdicts}, "
          f"commensurable stable codes {rep.commensurable_with_upsilon}")

# A forward-closed code contains a one-sided tail; a stable one is finite.
print(shift.tail_detect(shift.AnnihilatorCode(6, ((-1, 1),), "forward")).to_json())
print(shift.tail_detect(shift.AnnihilatorCode(6, ((0, 1),), "stable")).to_json())
