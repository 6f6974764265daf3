#!/usr/bin/env python3
# Convert GHZ copies into the typical-set approximation of W(3)^(x)2 and
# check that every measurement branch lands on the same output state.
from ghzcost import (
    SeparableBasis,
    prepare_conversion,
    resource_rate,
    run_protocol,
    trace_path,
)
from ghzcost.presets import w

psi = w(3)
pin = prepare_conversion(psi, SeparableBasis.identity(psi.dims), t=1, l=2, epsilon=0.01)
print(f"typical set size A = {pin.A}, GHZ copies m = ceil(log2 A) = {pin.m}")
print(f"packed ancilla dimension D_K = {pin.kmap.D_K}")
print(f"resource rate m/n = {resource_rate(pin):.3f} GHZ per source copy")
print()

report = run_protocol(pin, mode="enumerate")
print(f"complete outcome paths: {report.paths_total}")
print(f"stage branches checked: {report.branches_enumerated}")
print(f"worst branch fidelity:  {report.min_fidelity:.15f}")
print(f"largest branch deviation: {report.max_deviation:.2e}")
print(f"probability covered:    {report.probability_covered:.12f}")
print()

# one concrete path, walked with dense operators instead of branch algebra
trace = trace_path(pin, path=(3, (2, 5), 17))
print("single path (truncate j=3, erase (2,5), pack 17):")
for step in trace.steps:
    print(f"  {step.step:<8} outcome {step.outcome!s:<8} "
          f"p = {step.probability:.6f}  fidelity so far = {step.fidelity:.12f}")
print(f"final fidelity to Psi: {trace.final_fidelity:.15f}")
