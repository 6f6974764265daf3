"""Dense multipartite states and the linear-algebra primitives built on them.

Conventions used throughout the package:

* parties are indexed 0..k-1,
* a flat state index is row-major over parties, party 0 most significant,
* all entropies are base 2 and 0*log(0) = 0,
* eigenvalues in [-1e-10, 0) are clamped to 0 before logs and square roots.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

NORM_TOL = 1e-12
HERM_TOL = 1e-12
EIG_FLOOR = -1e-10
COMPLETE_TOL = 1e-10
UNITARY_TOL = 1e-10
BRANCH_PRUNE = 1e-14
SUPPORT_TOL = 1e-12

_LOG2 = math.log(2.0)


class GuardExceeded(RuntimeError):
    """An enumeration, branch-count, or dimension guard would be exceeded."""


@dataclass(frozen=True)
class PartyDims:
    """Local dimensions of an ordered list of parties."""

    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        if len(dims) < 1 or any(d < 1 for d in dims):
            raise ValueError(f"party dimensions must be positive, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def k(self) -> int:
        return len(self.dims)

    @property
    def total(self) -> int:
        return math.prod(self.dims)

    def __len__(self) -> int:
        return len(self.dims)

    def __iter__(self):
        return iter(self.dims)

    def __getitem__(self, i):
        return self.dims[i]


def _as_dims(dims) -> PartyDims:
    return dims if isinstance(dims, PartyDims) else PartyDims(tuple(dims))


class PureState:
    """Normalized state vector over explicit party dimensions."""

    __slots__ = ("dims", "amps")

    def __init__(self, dims, amps) -> None:
        self.dims = _as_dims(dims)
        a = np.ascontiguousarray(amps, dtype=complex).reshape(-1)
        if a.size != self.dims.total:
            raise ValueError(
                f"amplitude count {a.size} does not match dims {self.dims.dims}"
            )
        nrm = float(np.linalg.norm(a))
        if abs(nrm - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: |norm - 1| = {abs(nrm - 1.0):.3e}")
        self.amps = a

    def reshaped(self) -> np.ndarray:
        return self.amps.reshape(self.dims.dims)

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(self.dims, np.outer(self.amps, self.amps.conj()))

    def __repr__(self) -> str:
        return f"PureState(dims={self.dims.dims}, total={self.dims.total})"


class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite operator (within tolerances)."""

    __slots__ = ("dims", "mat")

    def __init__(self, dims, mat) -> None:
        self.dims = _as_dims(dims)
        m = np.ascontiguousarray(mat, dtype=complex)
        d = self.dims.total
        if m.shape != (d, d):
            raise ValueError(f"matrix shape {m.shape} does not match dims {self.dims.dims}")
        if np.max(np.abs(m - m.conj().T)) > HERM_TOL:
            raise ValueError("matrix is not Hermitian within 1e-12")
        tr = complex(np.trace(m)).real
        if abs(tr - 1.0) > NORM_TOL:
            raise ValueError(f"trace is {tr}, not 1 within 1e-12")
        if float(np.min(np.linalg.eigvalsh(m))) < EIG_FLOOR:
            raise ValueError("matrix has an eigenvalue below -1e-10")
        self.mat = m

    def __repr__(self) -> str:
        return f"DensityMatrix(dims={self.dims.dims})"


class MeasurementSet:
    """Operators {M_j} with sum_j M_j^dag M_j = identity on the input space.

    Operators may be rectangular (out_dim x in_dim); all must share one shape.
    """

    __slots__ = ("operators", "label")

    def __init__(self, operators: Sequence[np.ndarray], label: str = "") -> None:
        ops = [np.ascontiguousarray(op, dtype=complex) for op in operators]
        if not ops:
            raise ValueError("measurement needs at least one operator")
        shape = ops[0].shape
        if len(shape) != 2 or any(op.shape != shape for op in ops):
            raise ValueError("operators must all share one 2-d shape")
        din = shape[1]
        acc = np.zeros((din, din), dtype=complex)
        for op in ops:
            acc += op.conj().T @ op
        if np.max(np.abs(acc - np.eye(din))) > COMPLETE_TOL:
            raise ValueError(f"completeness violated for measurement '{label}'")
        self.operators = ops
        self.label = label

    @property
    def in_dim(self) -> int:
        return self.operators[0].shape[1]

    @property
    def out_dim(self) -> int:
        return self.operators[0].shape[0]

    def __len__(self) -> int:
        return len(self.operators)


# ---------------------------------------------------------------------------
# construction helpers

def basis_state(dims, indices: Sequence[int]) -> PureState:
    dims = _as_dims(dims)
    amps = np.zeros(dims.total, dtype=complex)
    amps[np.ravel_multi_index(tuple(int(i) for i in indices), dims.dims)] = 1.0
    return PureState(dims, amps)


def tensor(a: PureState, b: PureState) -> PureState:
    """Tensor product; party list of `b` is appended after `a`'s."""
    return PureState(PartyDims(a.dims.dims + b.dims.dims), np.kron(a.amps, b.amps))


def block_copies(psi: PureState, t: int) -> PureState:
    """psi^{(x)t} with the t copies of each party grouped into one register.

    Party j of the result has dimension dim(P_j)^t; within a register the
    first copy is the most significant digit.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    if t == 1:
        return psi
    k = psi.dims.k
    full = psi.amps
    for _ in range(t - 1):
        full = np.kron(full, psi.amps)
    arr = full.reshape(psi.dims.dims * t)
    order = [c * k + j for j in range(k) for c in range(t)]
    arr = np.transpose(arr, order)
    dims = PartyDims(tuple(d**t for d in psi.dims.dims))
    return PureState(dims, arr.reshape(-1))


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(g)
    return q * np.exp(-1j * np.angle(np.diag(r)))


def random_pure_state(dims, rng: np.random.Generator) -> PureState:
    dims = _as_dims(dims)
    a = rng.normal(size=dims.total) + 1j * rng.normal(size=dims.total)
    return PureState(dims, a / np.linalg.norm(a))


def random_density_matrix(dims, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    dims = _as_dims(dims)
    d = dims.total
    r = d if rank is None else rank
    g = rng.normal(size=(d, r)) + 1j * rng.normal(size=(d, r))
    m = g @ g.conj().T
    return DensityMatrix(dims, m / np.trace(m))


# ---------------------------------------------------------------------------
# entropies and distances

def shannon_entropy(probs: Iterable[float]) -> float:
    """Base-2 entropy of a probability vector; zero entries contribute 0."""
    h = 0.0
    for p in probs:
        if p > 0.0:
            h -= p * math.log2(p)
    return h


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return shannon_entropy((p, 1.0 - p))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    ev = np.linalg.eigvalsh(rho.mat)
    ev = np.clip(ev, 0.0, None)
    return shannon_entropy(ev.tolist())


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Trace out every party not listed in `keep` (0-based indices).

    The kept parties retain their original relative order.
    """
    k = rho.dims.k
    keep = sorted({int(i) for i in (keep if isinstance(keep, Iterable) else [keep])})
    if not keep:
        raise ValueError("keep must be a nonempty set of party indices")
    if keep[0] < 0 or keep[-1] >= k:
        raise ValueError(f"party index out of range for k={k}: {keep}")
    arr = rho.mat.reshape(rho.dims.dims + rho.dims.dims)
    row_lab = list(range(k))
    col_lab = [k + i if i in keep else i for i in range(k)]
    out_lab = keep + [k + i for i in keep]
    red = np.einsum(arr, row_lab + col_lab, out_lab)
    kept = PartyDims(tuple(rho.dims[i] for i in keep))
    return DensityMatrix(kept, red.reshape(kept.total, kept.total))


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    w = np.clip(w, 0.0, None)
    w[w < 1e-14] = 0.0  # keep sqrt from amplifying eigenvalue noise on rank-deficient input
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Uhlmann fidelity tr sqrt(sqrt(rho) sigma sqrt(rho)); 1 iff equal states.

    Evaluated as the nuclear norm of sqrt(rho) sqrt(sigma), which is the same
    quantity but stays symmetric to ~1e-12 for low-rank arguments.
    """
    if rho.dims.dims != sigma.dims.dims:
        raise ValueError("dimension mismatch")
    sv = np.linalg.svd(_psd_sqrt(rho.mat) @ _psd_sqrt(sigma.mat), compute_uv=False)
    return float(np.sum(sv))


def pure_fidelity(a: PureState, b: PureState) -> float:
    """|<a|b>|, equal to fidelity of the corresponding rank-1 density matrices."""
    if a.dims.dims != b.dims.dims:
        raise ValueError("dimension mismatch")
    return float(abs(np.vdot(a.amps, b.amps)))


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """S(rho || sigma) in bits; +inf when supp(rho) leaves supp(sigma).

    Support violation is detected by projecting rho onto sigma's kernel
    (eigenvalues <= 1e-12) and testing the captured mass against 1e-12.
    """
    if rho.dims.dims != sigma.dims.dims:
        raise ValueError("dimension mismatch")
    sw, sv = np.linalg.eigh(sigma.mat)
    sw = np.clip(sw, 0.0, None)
    rho_in_sigma = sv.conj().T @ rho.mat @ sv
    diag = np.real(np.diag(rho_in_sigma))
    kernel = sw <= SUPPORT_TOL
    if float(np.sum(diag[kernel])) > SUPPORT_TOL:
        return math.inf
    cross = 0.0
    for p, s in zip(diag, sw):
        if not s <= SUPPORT_TOL and p > 0.0:
            cross -= p * math.log2(s)
    return cross - von_neumann_entropy(rho)


# ---------------------------------------------------------------------------
# applying operators to chosen parties

def _norm_parties(parties, k: int) -> tuple[int, ...]:
    if isinstance(parties, (int, np.integer)):
        parties = [int(parties)]
    out = sorted({int(p) for p in parties})
    if not out:
        raise ValueError("need at least one party index")
    if out[0] < 0 or out[-1] >= k:
        raise ValueError(f"party index out of range for k={k}: {out}")
    return tuple(out)


def _to_front(state: PureState, parties: tuple[int, ...]) -> tuple[np.ndarray, list[int]]:
    # Returns the amplitude tensor with `parties` moved to the leading axes
    # (ascending order) and the axis permutation that was applied.
    k = state.dims.k
    rest = [i for i in range(k) if i not in parties]
    order = list(parties) + rest
    arr = np.transpose(state.reshaped(), order)
    return arr, order


def _from_front(arr: np.ndarray, order: list[int], dims: PartyDims) -> np.ndarray:
    inv = np.argsort(order)
    return np.transpose(arr.reshape([dims[i] for i in order]), inv).reshape(-1)


def apply_local_unitary(state: PureState, u: np.ndarray, parties) -> PureState:
    """Apply a unitary to the joint factor of `parties` (ascending order).

    Raises ValueError unless u^dag u = identity entrywise within 1e-10.
    """
    parties = _norm_parties(parties, state.dims.k)
    u = np.asarray(u, dtype=complex)
    d = math.prod(state.dims[p] for p in parties)
    if u.shape != (d, d):
        raise ValueError(f"operator shape {u.shape} does not match factor dim {d}")
    if np.max(np.abs(u.conj().T @ u - np.eye(d))) > UNITARY_TOL:
        raise ValueError("operator is not unitary within 1e-10")
    arr, order = _to_front(state, parties)
    sh = arr.shape
    arr = (u @ arr.reshape(d, -1)).reshape(sh)
    return PureState(state.dims, _from_front(arr, order, state.dims))


def apply_measurement(
    state: PureState, mset: MeasurementSet, parties
) -> list[tuple[int, float, PureState]]:
    """Apply a measurement to `parties`; return (outcome, probability, post-state).

    Post-states are renormalized; branches with probability < 1e-14 are pruned
    (outcome indices keep their original values).  Rectangular operators are
    allowed only on a single party, whose dimension becomes the output one.
    """
    parties = _norm_parties(parties, state.dims.k)
    d = math.prod(state.dims[p] for p in parties)
    if mset.in_dim != d:
        raise ValueError(f"operator input dim {mset.in_dim} does not match factor dim {d}")
    if mset.out_dim != mset.in_dim and len(parties) != 1:
        raise ValueError("rectangular operators require a single target party")
    new_dims = list(state.dims.dims)
    if mset.out_dim != mset.in_dim:
        new_dims[parties[0]] = mset.out_dim
    new_dims = PartyDims(tuple(new_dims))

    arr, order = _to_front(state, parties)
    flat = arr.reshape(d, -1)
    branches: list[tuple[int, float, PureState]] = []
    total = 0.0
    for j, op in enumerate(mset.operators):
        y = op @ flat
        p = float(np.real(np.vdot(y, y)))
        total += p
        if p < BRANCH_PRUNE:
            continue
        post = _from_front(y / math.sqrt(p), order, new_dims)
        branches.append((j, p, PureState(new_dims, post)))
    if abs(total - 1.0) > COMPLETE_TOL:
        raise ValueError(f"branch probabilities sum to {total}, not 1 within 1e-10")
    return branches


def restrict_party(state: PureState, party: int, new_dim: int) -> PureState:
    """Relabel a party down to its first `new_dim` levels.

    Valid only when all discarded amplitudes vanish (mass <= 1e-12).
    """
    (party,) = _norm_parties(party, state.dims.k)
    if not 1 <= new_dim <= state.dims[party]:
        raise ValueError(f"new_dim {new_dim} invalid for dim {state.dims[party]}")
    arr, order = _to_front(state, (party,))
    cut = arr[new_dim:]
    if float(np.real(np.vdot(cut, cut))) > SUPPORT_TOL:
        raise ValueError("discarded levels carry nonzero amplitude")
    dims = list(state.dims.dims)
    dims[party] = new_dim
    dims = PartyDims(tuple(dims))
    amps = _from_front(arr[:new_dim], order, dims)
    return PureState(dims, amps / np.linalg.norm(amps))


def remove_known_factor(state: PureState, party: int, factor: np.ndarray) -> PureState:
    """Strip a party known to be disentangled in the state `factor`.

    Contracts <factor| on that party; the result must carry norm 1 within
    1e-10, i.e. the factorization must actually hold.
    """
    (party,) = _norm_parties(party, state.dims.k)
    f = np.asarray(factor, dtype=complex).reshape(-1)
    if f.size != state.dims[party]:
        raise ValueError("factor dimension mismatch")
    if state.dims.k == 1:
        raise ValueError("cannot remove the only party")
    arr, order = _to_front(state, (party,))
    rest = np.tensordot(f.conj(), arr, axes=(0, 0))
    nrm = float(np.linalg.norm(rest))
    if abs(nrm - 1.0) > 1e-10:
        raise ValueError(f"party {party} is not in the stated product factor (norm {nrm})")
    # order[1:] is the remaining parties in ascending original order already
    dims = PartyDims(tuple(state.dims[i] for i in order[1:]))
    return PureState(dims, rest.reshape(-1) / nrm)
