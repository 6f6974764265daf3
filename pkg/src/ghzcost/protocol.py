"""Local conversion of shared uniform-correlation resources into Psi.

Start from m qubits per party in the maximally correlated state
2^(-m/2) sum_y |y..y>, with A = |typical set| <= 2^m.  Four rounds of local
measurements and outcome-conditioned corrections then land every branch on
the same compressed state Psi:

  truncate  project party 0 onto y < A (the only probabilistic abort)
  reshape   party 0 measures {diag c(y+j)}, everyone shifts y -> y+j
  copy      each party writes its target label f_i(y) into a fresh register
  erase     parties 1..k-1 measure the shared index in the phase basis;
            party 0 undoes the leftover phase
  pack      party 0 maps y -> K(y), measures the phase basis of that
            register, and everyone undoes a known local phase

Every operator acts diagonally in y on the correlated support, so branch
amplitudes are products of the input coefficients with known phases.  The
enumerate mode exploits that: it enumerates each round's outcomes once
around the exact intermediate state (branches within a round coincide after
correction, which is checked, not assumed) instead of walking the full
outcome product.  The sample mode walks complete outcome paths end to end.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .hilbert import (
    GuardExceeded,
    MeasurementSet,
    PartyDims,
    PureState,
    apply_local_unitary,
    apply_measurement,
    pure_fidelity,
    restrict_party,
)
from .typical import (
    IndexedTypicalSet,
    build_approximate_state,
    build_typical_set,
    coefficient_distribution,
    index_typical_set,
)

BRANCH_GUARD = 1_000_000
DENSE_PACK_LIMIT = 512  # largest D_K for which the bra set is materialized
TRACE_GUARD = 2_000_000  # entry cap for any dense intermediate in trace_path


@dataclass(frozen=True)
class KMap:
    """Injective packing of per-party labels into one register index.

    K(y) = sum_i w_i f_i(y) with w_i = prod of the alphabet sizes after i;
    distinct members have distinct label tuples, so K is injective and the
    packed register needs dimension D_K = max K + 1.
    """

    alphas: tuple[int, ...]
    weights: tuple[int, ...]
    values: np.ndarray
    D_K: int

    @classmethod
    def from_indexed(cls, its: IndexedTypicalSet) -> "KMap":
        alphas = its.alphabet_sizes
        k = len(alphas)
        weights = tuple(int(np.prod(alphas[i + 1 :], dtype=np.int64)) for i in range(k))
        values = its.party_indices @ np.array(weights, dtype=np.int64)
        if len(np.unique(values)) != len(values):
            raise ValueError("packed indices collide; label table is inconsistent")
        return cls(alphas, weights, values, int(values.max()) + 1)


@dataclass(frozen=True)
class ProtocolInput:
    """Everything the conversion needs: coefficients, labels, packing, target."""

    its: IndexedTypicalSet
    kmap: KMap
    A: int
    m: int
    n: int
    alphas: tuple[int, ...]
    coeffs: np.ndarray  # unit-norm C(y)/sqrt(N) over y
    target: PureState

    @property
    def k(self) -> int:
        return len(self.alphas)

    def paths_total(self) -> int:
        return self.A * self.A ** (self.k - 1) * self.kmap.D_K


def prepare(its: IndexedTypicalSet, t: int = 1) -> ProtocolInput:
    A = len(its)
    kmap = KMap.from_indexed(its)
    coeffs = its.coeffs / math.sqrt(its.N_epsilon)
    return ProtocolInput(
        its=its,
        kmap=kmap,
        A=A,
        m=0 if A == 1 else int(math.ceil(math.log2(A))),
        n=t * its.l,
        alphas=its.alphabet_sizes,
        coeffs=coeffs,
        target=build_approximate_state(its),
    )


def prepare_conversion(psi, basis, t: int, l: int, epsilon: float) -> ProtocolInput:
    """Typical set, labels and packing for converting psi^(x)(t*l) at window epsilon."""
    dist, coeffs = coefficient_distribution(psi, basis, t)
    ts = build_typical_set(dist, l, epsilon)
    its = index_typical_set(ts, coeffs)
    return prepare(its, t)


def resource_rate(pin: ProtocolInput) -> float:
    """Maximally correlated qubits consumed per source copy, m/n."""
    return pin.m / pin.n


@dataclass(frozen=True)
class StepBranch:
    step: str
    outcome: tuple[int, ...]
    probability: float
    fidelity: float


@dataclass(frozen=True)
class ProtocolTrace:
    path: tuple
    steps: tuple[StepBranch, ...]
    final_fidelity: float
    resource_qubits: int
    copies: int
    rate: float


@dataclass(frozen=True)
class BranchReport:
    mode: str
    paths_total: int
    branches_enumerated: int
    probability_covered: float
    stage_probabilities: tuple[float, ...]
    max_deviation: float
    min_fidelity: float
    truncation_success: float
    pack_dense_checked: bool


# ---------------------------------------------------------------------------
# operator constructors (completeness is validated by MeasurementSet)

def ghz_resource(k: int, m: int) -> PureState:
    """k parties sharing 2^(-m/2) sum_y |y>^k; m = 0 is the trivial state."""
    if k < 2:
        raise ValueError("need at least two parties")
    if m < 0:
        raise ValueError("m must be >= 0")
    d = 1 << m
    amps = np.zeros(d**k, dtype=complex)
    step = (d**k - 1) // (d - 1) if d > 1 else 1
    amps[:: step] = 1.0 / math.sqrt(d)
    return PureState(PartyDims((d,) * k), amps)


def truncate_resource(state: PureState, A: int) -> tuple[float, PureState]:
    """Keep the y < A block of every register; succeeds with probability A/2^m.

    Party 0 measures {P, 1-P} with P the projector onto y < A; correlation
    puts the other parties' amplitude in the same block, so their registers
    are then relabelled without further measurement.
    """
    d = state.dims[0]
    if not 1 <= A <= d:
        raise ValueError(f"cannot truncate dim {d} to {A}")
    if A == d:
        out = state
        prob = 1.0
    else:
        keep = np.zeros((d, d))
        keep[np.arange(A), np.arange(A)] = 1.0
        ms = MeasurementSet([keep, np.eye(d) - keep], label="truncate")
        branches = {j: (p, s) for j, p, s in apply_measurement(state, ms, 0)}
        prob, out = branches[0]
    for i in range(out.dims.k):
        if out.dims[i] != A:
            out = restrict_party(out, i, A)
    return prob, out


def reshape_measurement(coeffs: np.ndarray) -> MeasurementSet:
    """A diagonal operators M_j|y> = c(y+j mod A)|y> over unit-norm c."""
    A = len(coeffs)
    ops = [np.diag(np.roll(coeffs, -j)) for j in range(A)]
    return MeasurementSet(ops, label="reshape")


def shift_unitary(A: int, j: int) -> np.ndarray:
    u = np.zeros((A, A))
    u[(np.arange(A) + j) % A, np.arange(A)] = 1.0
    return u


def copy_unitary(A: int, alpha: int, targets) -> np.ndarray:
    """Permutation on |y,q> swapping q = 0 with q = targets[y], per y."""
    targets = list(targets)
    if len(targets) != A or any(not 0 <= t < alpha for t in targets):
        raise ValueError("need one target label < alpha per y")
    u = np.zeros((A * alpha, A * alpha))
    for y, t in enumerate(targets):
        perm = np.arange(alpha)
        perm[0], perm[t] = t, 0
        u[y * alpha + perm, y * alpha + np.arange(alpha)] = 1.0
    return u


def erase_measurement(A: int) -> MeasurementSet:
    """Rank-one bras <phi_j| with phi_j(y) = exp(2 pi i yj / A)/sqrt(A)."""
    y = np.arange(A)
    ops = [np.exp(-2j * np.pi * y * j / A).reshape(1, A) / math.sqrt(A) for j in range(A)]
    return MeasurementSet(ops, label="erase")


def pack_measurement(D: int) -> MeasurementSet:
    y = np.arange(D)
    ops = [np.exp(-2j * np.pi * y * j / D).reshape(1, D) / math.sqrt(D) for j in range(D)]
    return MeasurementSet(ops, label="pack")


def _phase_probe(D: int, rng: np.random.Generator) -> None:
    # completeness of the D phase bras via the FFT Parseval identity
    x = rng.normal(size=D) + 1j * rng.normal(size=D)
    x /= np.linalg.norm(x)
    mass = float(np.sum(np.abs(np.fft.fft(x)) ** 2) / D)
    if abs(mass - 1.0) > 1e-9:
        raise ValueError(f"phase bras are not complete: probe mass {mass}")


# ---------------------------------------------------------------------------
# sparse branch arithmetic over the support index y

def _stage1_branch(c: np.ndarray, j: int) -> tuple[float, np.ndarray]:
    A = len(c)
    raw = np.roll(c, -j) / math.sqrt(A)
    p = float(np.sum(np.abs(raw) ** 2))
    return p, np.roll(raw / math.sqrt(p), j)


def _stage3_branch(c: np.ndarray, js: tuple[int, ...]) -> tuple[float, np.ndarray]:
    A = len(c)
    y = np.arange(A)
    scale = A ** (-(len(js)) / 2.0)
    raw = c * np.exp(-2j * np.pi * y * sum(js) / A) * scale
    p = float(np.sum(np.abs(raw) ** 2))
    return p, raw / math.sqrt(p) * np.exp(2j * np.pi * y * sum(js) / A)


def _stage4_branch(c: np.ndarray, kmap: KMap, j: int) -> tuple[float, np.ndarray]:
    phase = np.exp(-2j * np.pi * kmap.values * j / kmap.D_K)
    raw = c * phase / math.sqrt(kmap.D_K)
    p = float(np.sum(np.abs(raw) ** 2))
    return p, raw / math.sqrt(p) * np.conj(phase)


def run_protocol(
    pin: ProtocolInput,
    mode: str = "enumerate",
    branch_guard: int = BRANCH_GUARD,
    dense_limit: int = DENSE_PACK_LIMIT,
    samples: int = 64,
    rng: np.random.Generator | None = None,
) -> BranchReport:
    """Check that all measurement branches land on Psi.

    enumerate: visit every outcome of every round once (branch_guard caps
    the implied number of complete outcome paths).  sample: walk `samples`
    random end-to-end paths.  Reports the worst branch fidelity against Psi
    and the largest L2 deviation of any corrected branch.
    """
    if mode not in ("enumerate", "sample"):
        raise ValueError(f"unknown mode {mode!r}")
    rng = rng or np.random.default_rng(7)
    A, k, kmap, c = pin.A, pin.k, pin.kmap, pin.coeffs
    total = pin.paths_total()
    trunc = A / (1 << pin.m)

    # operator families exist and are complete at any scale; above dense_limit
    # the phase-bra sets are probed through the FFT instead of materialized,
    # and roll-diagonal completeness reduces to the unit norm of c
    if A <= dense_limit:
        reshape_measurement(pin.coeffs)
        erase_measurement(A)
    else:
        if abs(float(np.sum(np.abs(c) ** 2)) - 1.0) > 1e-10:
            raise ValueError("coefficients are not unit norm")
        _phase_probe(A, rng)
    pack_dense = kmap.D_K <= dense_limit
    if pack_dense:
        pack_measurement(kmap.D_K)
    else:
        _phase_probe(kmap.D_K, rng)

    min_fid = math.inf
    max_dev = 0.0

    def record(corrected: np.ndarray) -> None:
        nonlocal min_fid, max_dev
        min_fid = min(min_fid, float(abs(np.vdot(c, corrected))))
        max_dev = max(max_dev, float(np.linalg.norm(corrected - c)))

    if mode == "enumerate":
        if total > branch_guard:
            raise GuardExceeded(
                f"{total} outcome paths exceed the guard {branch_guard}"
            )
        sums = []
        p_sum = 0.0
        for j in range(A):
            p, corr = _stage1_branch(c, j)
            p_sum += p
            record(corr)
        sums.append(p_sum)
        p_sum = 0.0
        for js in itertools.product(range(A), repeat=k - 1):
            p, corr = _stage3_branch(c, js)
            p_sum += p
            record(corr)
        sums.append(p_sum)
        p_sum = 0.0
        for j in range(kmap.D_K):
            p, corr = _stage4_branch(c, kmap, j)
            p_sum += p
            record(corr)
        sums.append(p_sum)
        enumerated = A + A ** (k - 1) + kmap.D_K
        covered = float(np.prod(sums))
        stage_probs = tuple(float(s) for s in sums)
    else:
        seen = set()
        for _ in range(samples):
            j1 = int(rng.integers(A))
            js = tuple(int(x) for x in rng.integers(0, A, size=k - 1))
            j4 = int(rng.integers(kmap.D_K))
            seen.add((j1, js, j4))
            _, c1 = _stage1_branch(c, j1)
            _, c3 = _stage3_branch(c1, js)
            _, c4 = _stage4_branch(c3, kmap, j4)
            record(c4)
        enumerated = samples
        covered = len(seen) / total
        stage_probs = ()

    return BranchReport(
        mode=mode,
        paths_total=total,
        branches_enumerated=enumerated,
        probability_covered=covered,
        stage_probabilities=stage_probs,
        max_deviation=max_dev,
        min_fidelity=min_fid,
        truncation_success=trunc,
        pack_dense_checked=pack_dense,
    )


# ---------------------------------------------------------------------------
# dense single-path walk through the measurement primitives

def _support_checkpoint(pin: ProtocolInput, stage: str) -> PureState:
    F = pin.its.party_indices
    alphas = pin.alphas
    A, k = pin.A, pin.k
    if stage == "reshape":
        dims = PartyDims((A,) * k)
        rows = tuple(np.arange(A) for _ in range(k))
    elif stage == "copy":
        dims = PartyDims(tuple(A * a for a in alphas))
        rows = tuple(np.arange(A) * alphas[i] + F[:, i] for i in range(k))
    elif stage == "erase":
        dims = PartyDims((A * alphas[0],) + alphas[1:])
        rows = (np.arange(A) * alphas[0] + F[:, 0],) + tuple(
            F[:, i] for i in range(1, k)
        )
    else:
        raise ValueError(stage)
    amps = np.zeros(dims.total, dtype=complex)
    amps[np.ravel_multi_index(rows, dims.dims)] = pin.coeffs
    return PureState(dims, amps)


def trace_path(
    pin: ProtocolInput,
    path: tuple[int, tuple[int, ...], int] | None = None,
    rng: np.random.Generator | None = None,
    size_guard: int = TRACE_GUARD,
) -> ProtocolTrace:
    """Walk one outcome path with explicit states, operators and corrections.

    Slower than run_protocol but independent of its branch arithmetic: every
    measurement goes through apply_measurement and every correction through
    apply_local_unitary, so probabilities and completeness are re-derived
    from the operators themselves.
    """
    A, k, kmap, alphas = pin.A, pin.k, pin.kmap, pin.alphas
    rng = rng or np.random.default_rng(7)
    if path is None:
        path = (
            int(rng.integers(A)),
            tuple(int(x) for x in rng.integers(0, A, size=k - 1)),
            int(rng.integers(kmap.D_K)),
        )
    j1, js, j4 = path
    if len(js) != k - 1:
        raise ValueError(f"need {k - 1} erase outcomes, got {len(js)}")

    # largest dense object: any intermediate state or measurement family
    peak = max(
        (1 << pin.m) ** k,
        int(np.prod([A * a for a in alphas], dtype=np.int64)),
        kmap.D_K * int(np.prod(alphas, dtype=np.int64)),
        kmap.D_K**2 * alphas[0] ** 2,
        max(A**2 * a**2 for a in alphas),
    )
    if peak > size_guard:
        raise GuardExceeded(f"dense intermediate needs {peak} entries > {size_guard}")

    steps: list[StepBranch] = []
    state = ghz_resource(k, pin.m)
    p_trunc, state = truncate_resource(state, A)
    flat = np.zeros(A**k, dtype=complex)
    step = (A**k - 1) // (A - 1) if A > 1 else 1
    flat[::step] = 1.0 / math.sqrt(A)
    uniform = PureState(PartyDims((A,) * k), flat)
    steps.append(StepBranch("truncate", (0,), p_trunc, pure_fidelity(state, uniform)))

    branches = {j: (p, s) for j, p, s in apply_measurement(state, reshape_measurement(pin.coeffs), 0)}
    p, state = branches[j1]
    for i in range(k):
        state = apply_local_unitary(state, shift_unitary(A, j1), i)
    steps.append(StepBranch("reshape", (j1,), p, pure_fidelity(state, _support_checkpoint(pin, "reshape"))))

    for i in range(k):
        u = copy_unitary(A, alphas[i], pin.its.party_indices[:, i])
        iso = u[:, :: alphas[i]] if alphas[i] > 1 else u
        ((_, p_copy, state),) = apply_measurement(state, MeasurementSet([iso], label="copy"), i)
        assert abs(p_copy - 1.0) < 1e-12
    steps.append(StepBranch("copy", (), 1.0, pure_fidelity(state, _support_checkpoint(pin, "copy"))))

    erase = erase_measurement(A)
    p_joint = 1.0
    for i in range(1, k):
        ops = [np.kron(op, np.eye(alphas[i])) for op in erase.operators]
        branches = {j: (p, s) for j, p, s in apply_measurement(state, MeasurementSet(ops, label="erase"), i)}
        p, state = branches[js[i - 1]]
        p_joint *= p
    phase = np.exp(2j * np.pi * np.arange(A) * sum(js) / A)
    state = apply_local_unitary(state, np.diag(np.repeat(phase, alphas[0])), 0)
    steps.append(StepBranch("erase", js, p_joint, pure_fidelity(state, _support_checkpoint(pin, "erase"))))

    iso = np.zeros((kmap.D_K * alphas[0], A * alphas[0]))
    for y in range(A):
        for q in range(alphas[0]):
            iso[kmap.values[y] * alphas[0] + q, y * alphas[0] + q] = 1.0
    ((_, p_iso, state),) = apply_measurement(state, MeasurementSet([iso], label="pack-embed"), 0)
    assert abs(p_iso - 1.0) < 1e-12
    ops = [np.kron(op, np.eye(alphas[0])) for op in pack_measurement(kmap.D_K).operators]
    branches = {j: (p, s) for j, p, s in apply_measurement(state, MeasurementSet(ops, label="pack"), 0)}
    p, state = branches[j4]
    for i in range(k):
        corr = np.exp(2j * np.pi * j4 * kmap.weights[i] * np.arange(alphas[i]) / kmap.D_K)
        state = apply_local_unitary(state, np.diag(corr), i)
    fid = pure_fidelity(state, pin.target)
    steps.append(StepBranch("pack", (j4,), p, fid))

    return ProtocolTrace(
        path=path,
        steps=tuple(steps),
        final_fidelity=fid,
        resource_qubits=pin.m,
        copies=pin.n,
        rate=resource_rate(pin),
    )
