#!/usr/bin/env python3
# Rate table, the GHZ-family identity, and the mixed-state counterexample
# where formation cost exceeds the asymptotic discord rate.
import math

from ghzcost import OptimizerConfig, bounds_table, ghz_rate_relation, mixed_counterexample
from ghzcost.presets import gghz, plus011, w

states = [("w3", w(3)), ("gghz(p=0.3)", gghz(0.3)), ("plus011", plus011())]
rows = bounds_table(states, OptimizerConfig(restarts=8, seed=3), t_levels=(1,))

print(f"{'label':<14} {'D_t1':>9} {'R_T':>9} {'E_lower':>9} {'E_c':>7}")
for r in rows:
    lower = "-" if r.entanglement_lower_bound is None else f"{r.entanglement_lower_bound:.4f}"
    cost = "-" if r.e_cost_known is None else f"{r.e_cost_known:.4f}"
    print(f"{r.label:<14} {r.discord_t1:>9.4f} {r.rate_RT:>9.4f} {lower:>9} {cost:>7}")

# for the weighted GHZ family the discord rate is exactly R_T/(k-1)
print()
for k in (3, 4, 5):
    d, ratio = ghz_rate_relation(0.3, k)
    print(f"k={k}: H2(0.3) = {d:.9f}   R_T/(k-1) = {ratio:.9f}")

print()
print("two-qubit mixture sweep: E_c vs asymptotic discord rate")
print(f"{'p':>5} {'E_c':>9} {'D_inf':>9}  violates")
for i in range(1, 10):
    row = mixed_counterexample(round(0.05 * i, 2))
    print(f"{row.p:>5} {row.e_cost:>9.5f} {row.discord_rate:>9.5f}  {row.violates}")

b = mixed_counterexample(0.0)
print(f"boundary p=0.0: E_c = D = {b.e_cost}, gap = {abs(b.e_cost - b.discord_rate):.1e}")
