"""Typical-set compression of i.i.d. blocks of a rotated product distribution.

A state psi on k parties, a product basis, and a block size t induce a joint
distribution p(x_1..x_k) = |C(x)|^2 over basis labels.  Length-l sequences
whose per-symbol surprisal sits within eps of the entropy H form the typical
set; re-indexing its members densely per party compresses psi^(x)(t*l) to a
state Psi on alphabet-sized registers with fidelity sqrt(N_eps).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .hilbert import (
    GuardExceeded,
    PartyDims,
    PureState,
    apply_local_unitary,
    block_copies,
    shannon_entropy,
)

ENUM_GUARD = 10_000_000
PROB_FLOOR = 1e-15  # |C|^2 below this is treated as an exact zero
EDGE_SLACK = 1e-12  # typicality boundary slack for float noise

Symbol = tuple[int, ...]
Sequence_ = tuple[Symbol, ...]


@dataclass(frozen=True)
class JointDistribution:
    """Joint pmf over k-tuples of basis indices, zero entries removed."""

    party_alphabets: tuple[tuple[int, ...], ...]
    probs: dict[Symbol, float]

    def __post_init__(self) -> None:
        if not self.probs:
            raise ValueError("distribution has empty support")
        k = len(self.party_alphabets)
        total = 0.0
        for sym, p in self.probs.items():
            if len(sym) != k:
                raise ValueError(f"symbol {sym} does not have {k} entries")
            if p <= 0.0:
                raise ValueError("zero/negative probabilities must be removed")
            total += p
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"probabilities sum to {total}, not 1 within 1e-10")

    @classmethod
    def from_probs(cls, probs: dict[Symbol, float]) -> "JointDistribution":
        kept = {sym: float(p) for sym, p in sorted(probs.items()) if p >= PROB_FLOOR}
        if not kept:
            raise ValueError("distribution has empty support")
        k = len(next(iter(kept)))
        alphabets = tuple(
            tuple(sorted({sym[j] for sym in kept})) for j in range(k)
        )
        return cls(alphabets, kept)

    @property
    def entropy(self) -> float:
        return shannon_entropy(self.probs.values())

    @property
    def support(self) -> list[Symbol]:
        return sorted(self.probs)


@dataclass(frozen=True)
class AEPReport:
    """Finite-l status of the three asymptotic bounds (reported, not asserted)."""

    member_count: int
    N_epsilon: float
    size_lower: float
    size_upper: float
    mass_ok: bool
    size_lower_ok: bool
    size_upper_ok: bool


def _aep_report(count: int, n_eps: float, l: int, eps: float, entropy: float) -> AEPReport:
    lower = (1.0 - eps) * 2.0 ** (l * (entropy - eps))
    upper = 2.0 ** (l * (entropy + eps))
    if count > 0:
        log_count = math.log2(count)
        lower_ok = log_count > math.log2(1.0 - eps) + l * (entropy - eps) if eps < 1 else count > lower
        upper_ok = log_count <= l * (entropy + eps) + 1e-9
    else:
        lower_ok = False
        upper_ok = True
    return AEPReport(count, n_eps, lower, upper, n_eps > 1.0 - eps, lower_ok, upper_ok)


@dataclass(frozen=True)
class TypicalSet:
    """Explicitly enumerated typical set, members in lexicographic order."""

    l: int
    epsilon: float
    entropy_H: float
    members: tuple[Sequence_, ...]
    member_probs: tuple[float, ...]
    N_epsilon: float
    alphabet_sizes: tuple[int, ...]
    aep: AEPReport

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class TypicalSetStats:
    """Exact typical-set count and mass via type classes; members not stored.

    Covers every one of |support|^l sequences by grouping them into
    occupancy classes, so it reaches block lengths where the explicit list
    cannot exist in memory.
    """

    l: int
    epsilon: float
    entropy_H: float
    member_count: int
    N_epsilon: float
    aep: AEPReport


@dataclass(frozen=True)
class IndexedTypicalSet:
    """Typical set with a dense index y and per-party compressed labels.

    party_indices[y] = (f_1(y), .., f_k(y)) where f_j densely re-enumerates
    the distinct party-j marginal sequences in lexicographic order; coeffs[y]
    is the product of per-symbol amplitudes along member y.
    """

    l: int
    epsilon: float
    entropy_H: float
    members: tuple[Sequence_, ...]
    party_seq_maps: tuple[tuple[tuple[int, ...], ...], ...]
    party_indices: np.ndarray = field(repr=False)
    coeffs: np.ndarray = field(repr=False)
    N_epsilon: float
    alphabet_sizes: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.members)

    def y_to_tuple(self, y: int) -> tuple[int, ...]:
        return tuple(int(i) for i in self.party_indices[y])


def coefficient_distribution(
    psi: PureState, basis, t: int
) -> tuple[JointDistribution, dict[Symbol, complex]]:
    """Amplitudes and outcome pmf of psi^(x)t in a product basis.

    `basis` is a SeparableBasis or a plain list of per-party unitaries whose
    j-th entry acts on the dim(P_j)^t register of the blocked t-copy state.
    Returns (distribution, coefficient table); table keys are k-tuples of
    basis labels, entries with |C|^2 < 1e-15 are dropped.
    """
    unitaries = list(getattr(basis, "unitaries", basis))
    phi = block_copies(psi, t)
    if len(unitaries) != phi.dims.k:
        raise ValueError(f"need {phi.dims.k} unitaries, got {len(unitaries)}")
    for j, u in enumerate(unitaries):
        if u.shape != (phi.dims[j], phi.dims[j]):
            raise ValueError(
                f"basis unitary {j} has shape {u.shape}, expected dim {phi.dims[j]}"
            )
        phi = apply_local_unitary(phi, np.asarray(u).conj().T, j)
    arr = phi.reshaped()
    coeffs: dict[Symbol, complex] = {}
    probs: dict[Symbol, float] = {}
    for idx in np.ndindex(arr.shape):
        c = complex(arr[idx])
        p = abs(c) ** 2
        if p >= PROB_FLOOR:
            coeffs[idx] = c
            probs[idx] = p
    dist = JointDistribution.from_probs(probs)
    return dist, coeffs


def build_typical_set(dist: JointDistribution, l: int, epsilon: float) -> TypicalSet:
    """Enumerate all |support|^l sequences and keep the eps-typical ones.

    Guard: refuses more than 10^7 sequences; use typical_set_stats beyond.
    """
    if l < 1:
        raise ValueError("l must be >= 1")
    if epsilon < 0:
        raise ValueError("epsilon must be >= 0")
    support = dist.support
    s = len(support)
    total = s**l
    if total > ENUM_GUARD:
        raise GuardExceeded(
            f"{s}^{l} = {total} sequences exceeds the 10^7 enumeration guard"
        )
    entropy = dist.entropy
    logp = np.array([math.log2(dist.probs[sym]) for sym in support])

    members: list[Sequence_] = []
    probs: list[float] = []
    chunk = 1 << 18
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        digits = np.stack(np.unravel_index(idx, (s,) * l), axis=1)
        seq_logp = logp[digits].sum(axis=1)
        keep = np.abs(-seq_logp / l - entropy) <= epsilon + EDGE_SLACK
        for row, lp in zip(digits[keep], seq_logp[keep]):
            members.append(tuple(support[i] for i in row))
            probs.append(float(2.0**lp))
    n_eps = float(sum(probs))
    k = len(dist.party_alphabets)
    sizes = tuple(
        len({tuple(sym[j] for sym in mem) for mem in members}) for j in range(k)
    )
    return TypicalSet(
        l=l,
        epsilon=epsilon,
        entropy_H=entropy,
        members=tuple(members),
        member_probs=tuple(probs),
        N_epsilon=n_eps,
        alphabet_sizes=sizes,
        aep=_aep_report(len(members), n_eps, l, epsilon, entropy),
    )


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for c in range(total + 1):
        for rest in _compositions(total - c, parts - 1):
            yield (c,) + rest


def typical_set_stats(dist: JointDistribution, l: int, epsilon: float) -> TypicalSetStats:
    """Exact |A_eps| and N_eps at any l via occupancy-class counting.

    Typicality depends on a sequence only through its symbol counts, so
    summing multinomial weights over the C(l+s-1, s-1) count vectors is an
    exhaustive enumeration of all |support|^l sequences.
    """
    if l < 1:
        raise ValueError("l must be >= 1")
    support = dist.support
    probs = [dist.probs[sym] for sym in support]
    logp = [math.log2(p) for p in probs]
    entropy = dist.entropy
    count = 0
    n_eps = 0.0
    for counts in _compositions(l, len(support)):
        lp = sum(c * x for c, x in zip(counts, logp))
        if abs(-lp / l - entropy) > epsilon + EDGE_SLACK:
            continue
        mult = math.factorial(l)
        for c in counts:
            mult //= math.factorial(c)
        count += mult
        n_eps += 2.0 ** (math.log2(mult) + lp)
    return TypicalSetStats(
        l=l,
        epsilon=epsilon,
        entropy_H=entropy,
        member_count=count,
        N_epsilon=n_eps,
        aep=_aep_report(count, n_eps, l, epsilon, entropy),
    )


def index_typical_set(ts: TypicalSet, coeffs: dict[Symbol, complex]) -> IndexedTypicalSet:
    """Assign the dense index y and per-party compressed labels f_j(y).

    Marginal sequences are re-enumerated in lexicographic order per party, so
    y -> (f_1..f_k) is strictly increasing in the mixed-radix packing used by
    the conversion protocol.
    """
    if not ts.members:
        raise ValueError("cannot index an empty typical set")
    k = len(ts.alphabet_sizes)
    marginals: list[list[tuple[int, ...]]] = []
    for j in range(k):
        distinct = sorted({tuple(sym[j] for sym in mem) for mem in ts.members})
        marginals.append(distinct)
    maps = [{seq: i for i, seq in enumerate(dm)} for dm in marginals]
    indices = np.empty((len(ts.members), k), dtype=np.int64)
    cvals = np.empty(len(ts.members), dtype=complex)
    for y, mem in enumerate(ts.members):
        for j in range(k):
            indices[y, j] = maps[j][tuple(sym[j] for sym in mem)]
        c = 1.0 + 0.0j
        for sym in mem:
            c *= coeffs[sym]
        cvals[y] = c
    mass = float(np.sum(np.abs(cvals) ** 2))
    if abs(mass - ts.N_epsilon) > 1e-9:
        raise ValueError(
            f"coefficient table mass {mass} disagrees with N_epsilon {ts.N_epsilon}"
        )
    return IndexedTypicalSet(
        l=ts.l,
        epsilon=ts.epsilon,
        entropy_H=ts.entropy_H,
        members=ts.members,
        party_seq_maps=tuple(tuple(dm) for dm in marginals),
        party_indices=indices,
        coeffs=cvals,
        N_epsilon=ts.N_epsilon,
        alphabet_sizes=ts.alphabet_sizes,
    )


def build_approximate_state(its: IndexedTypicalSet, dims: PartyDims | None = None) -> PureState:
    """Psi = N_eps^(-1/2) sum_y C(y) |f_1(y), .., f_k(y)> on compressed registers."""
    if dims is None:
        dims = PartyDims(its.alphabet_sizes)
    if dims.k != len(its.alphabet_sizes) or any(
        d < a for d, a in zip(dims.dims, its.alphabet_sizes)
    ):
        raise ValueError(f"dims {dims.dims} cannot hold alphabets {its.alphabet_sizes}")
    amps = np.zeros(dims.total, dtype=complex)
    flat = np.ravel_multi_index(
        tuple(its.party_indices[:, j] for j in range(dims.k)), dims.dims
    )
    amps[flat] = its.coeffs / math.sqrt(its.N_epsilon)
    return PureState(dims, amps)


def embed_approximate_state(its: IndexedTypicalSet, phi_dims: PartyDims) -> PureState:
    """Psi written back in the uncompressed registers of the l-fold blocked state.

    Party j of the result has dimension phi_dims[j]^l; the amplitude of
    member y sits at the original marginal sequences, so <embed|psi^(x)n>
    equals sqrt(N_eps) when psi^(x)n is blocked the same way.
    """
    k = phi_dims.k
    dims = PartyDims(tuple(d**its.l for d in phi_dims.dims))
    amps = np.zeros(dims.total, dtype=complex)
    scale = 1.0 / math.sqrt(its.N_epsilon)
    for y, mem in enumerate(its.members):
        flat_parts = []
        for j in range(k):
            seq = tuple(sym[j] for sym in mem)
            flat = 0
            for x in seq:
                flat = flat * phi_dims[j] + x
            flat_parts.append(flat)
        amps[np.ravel_multi_index(tuple(flat_parts), dims.dims)] = its.coeffs[y] * scale
    return PureState(dims, amps)


def fidelity_to_original(its: IndexedTypicalSet) -> float:
    """F(Psi, psi^(x)n) = sqrt(N_eps), exact for the typical-set construction."""
    return math.sqrt(its.N_epsilon)
