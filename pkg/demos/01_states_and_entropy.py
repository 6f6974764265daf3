#!/usr/bin/env python3
# States, marginals and entropies: the raw material for everything else.
import numpy as np

from ghzcost import partial_trace, pure_fidelity, von_neumann_entropy
from ghzcost.presets import ghz, gghz, plus011, w

psi = ghz(3)
print("GHZ(3) amplitudes:", np.round(psi.amps, 4))

# every single-party marginal of GHZ is maximally mixed
for j in range(3):
    rho_j = partial_trace(psi.to_density(), (j,))
    print(f"  party {j}: S = {von_neumann_entropy(rho_j):.6f} bits")

print()
print("W(3) amplitudes:", np.round(w(3).amps, 4))
for j in range(3):
    rho_j = partial_trace(w(3).to_density(), (j,))
    print(f"  party {j}: S = {von_neumann_entropy(rho_j):.6f} bits  (= H2(1/3))")

# the weighted GHZ family interpolates between product and GHZ
print()
print("gghz(p): marginal entropy vs p")
for p in (0.1, 0.3, 0.5):
    s = von_neumann_entropy(partial_trace(gghz(p).to_density(), (0,)))
    print(f"  p={p}: S = {s:.6f}")

print()
print("|<GHZ|W>|          =", f"{pure_fidelity(ghz(3), w(3)):.6f}")
print("|<GHZ|plus011>|    =", f"{pure_fidelity(ghz(3), plus011()):.6f}")
