"""Named example states used by the CLI, tests, and demos."""
from __future__ import annotations

import math
import re

import numpy as np

from .hilbert import DensityMatrix, PartyDims, PureState, basis_state


def ghz(k: int = 3) -> PureState:
    """(|0...0> + |1...1>)/sqrt(2) on k qubits."""
    return gghz(0.5, k)


def gghz(p: float, k: int = 3) -> PureState:
    """sqrt(p)|0...0> + sqrt(1-p)|1...1> on k qubits."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie strictly between 0 and 1")
    if k < 2:
        raise ValueError("need at least 2 parties")
    amps = np.zeros(2**k, dtype=complex)
    amps[0] = math.sqrt(p)
    amps[-1] = math.sqrt(1.0 - p)
    return PureState(PartyDims((2,) * k), amps)


def w(k: int = 3) -> PureState:
    """Equal superposition of the k single-excitation basis states."""
    if k < 2:
        raise ValueError("need at least 2 parties")
    amps = np.zeros(2**k, dtype=complex)
    for j in range(k):
        amps[1 << (k - 1 - j)] = 1.0 / math.sqrt(k)
    return PureState(PartyDims((2,) * k), amps)


def plus011() -> PureState:
    """(|000> + |+11>)/sqrt(2) on 3 qubits."""
    amps = np.zeros(8, dtype=complex)
    amps[0b000] = 1.0 / math.sqrt(2.0)
    amps[0b011] = 0.5
    amps[0b111] = 0.5
    return PureState(PartyDims((2, 2, 2)), amps)


def werner_phi(p: float) -> DensityMatrix:
    """(1-2p)|Phi+><Phi+| + p(|00><00| + |11><11|), 0 <= p <= 1/2."""
    if not 0.0 <= p <= 0.5:
        raise ValueError("p must lie in [0, 1/2]")
    phi = np.zeros(4, dtype=complex)
    phi[0] = phi[3] = 1.0 / math.sqrt(2.0)
    m = (1.0 - 2.0 * p) * np.outer(phi, phi.conj())
    m[0, 0] += p
    m[3, 3] += p
    return DensityMatrix(PartyDims((2, 2)), m)


def resolve(name: str, p: float | None = None) -> PureState:
    """Map a preset name (ghz3, w4, gghz, plus011, product-010, ...) to a state."""
    m = re.fullmatch(r"(ghz|w)(\d+)", name)
    if m:
        k = int(m.group(2))
        return ghz(k) if m.group(1) == "ghz" else w(k)
    if name == "gghz":
        if p is None:
            raise ValueError("preset 'gghz' needs p")
        return gghz(p)
    if name == "plus011":
        return plus011()
    m = re.fullmatch(r"product-([01]+)", name)
    if m:
        bits = [int(b) for b in m.group(1)]
        return basis_state(PartyDims((2,) * len(bits)), bits)
    raise ValueError(f"unknown preset '{name}'")
