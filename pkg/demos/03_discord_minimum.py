#!/usr/bin/env python3
# Minimal outcome entropy over product measurement bases.  Restarts matter:
# the landscape has real local minima, visible in the per-restart values.
import math

from ghzcost import OptimizerConfig, minimize_discord
from ghzcost.presets import gghz, w

cfg = OptimizerConfig(restarts=12, seed=3)

res = minimize_discord(w(3), cfg)
print(f"W(3): D = {res.value_bits:.9f} bits  (log2 3 = {math.log2(3):.9f})")
print("  restart values:", [round(v, 4) for v in res.per_restart_values])
print("  converged:", res.converged)

print()
for p in (0.2, 0.5, 0.8):
    res = minimize_discord(gghz(p), cfg)
    h2 = -p * math.log2(p) - (1 - p) * math.log2(1 - p)
    print(f"gghz(p={p}): D = {res.value_bits:.9f}, H2(p) = {h2:.9f}, "
          f"diff = {abs(res.value_bits - h2):.2e}")

# the winning basis is itself an answer: re-measuring in it reproduces D
from ghzcost import discord_objective

res = minimize_discord(w(3), cfg)
print()
print("objective at the returned argmin basis:",
      f"{discord_objective(w(3), res.argmin_basis):.9f}")
