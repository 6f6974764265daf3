"""Minimum outcome entropy of a pure state over local product measurements.

The quantity minimized is the Shannon entropy (bits) of |<b_1..b_k|psi>|^2
over all choices of orthonormal product bases.  Each party's basis is
parametrized as U_j = expm(i H_j) with H_j Hermitian, giving a smooth
unconstrained problem solved by L-BFGS-B with analytic gradients.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm, expm_frechet
from scipy.optimize import minimize

from .hilbert import (
    UNITARY_TOL,
    DensityMatrix,
    GuardExceeded,
    PureState,
    block_copies,
    partial_trace,
)

PROB_FLOOR = 1e-18
LN2 = math.log(2.0)


@dataclass(frozen=True)
class SeparableBasis:
    """One orthonormal basis per party, stored as unitary column matrices."""

    unitaries: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        for j, u in enumerate(self.unitaries):
            u = np.asarray(u)
            if u.ndim != 2 or u.shape[0] != u.shape[1]:
                raise ValueError(f"basis matrix {j} is not square: {u.shape}")
            if not np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=UNITARY_TOL):
                raise ValueError(f"basis matrix {j} is not unitary within {UNITARY_TOL}")

    @property
    def k(self) -> int:
        return len(self.unitaries)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(u.shape[0] for u in self.unitaries)

    @classmethod
    def identity(cls, dims) -> "SeparableBasis":
        return cls(tuple(np.eye(d, dtype=complex) for d in dims))

    @classmethod
    def fourier(cls, dims) -> "SeparableBasis":
        mats = []
        for d in dims:
            x = np.arange(d)
            mats.append(np.exp(2j * np.pi * np.outer(x, x) / d) / math.sqrt(d))
        return cls(tuple(mats))


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 32
    max_iters: int = 2000
    tol: float = 1e-9
    seed: int = 20
    guard_dim: int = 4096
    cluster_tol: float = 1e-5
    recenter_rounds: int = 3

    def __post_init__(self) -> None:
        if self.restarts < 1:
            raise ValueError("need at least one restart")


@dataclass(frozen=True)
class DiscordResult:
    value_bits: float
    argmin_basis: SeparableBasis
    per_restart_values: tuple[float, ...]
    restarts_used: int
    converged: bool


def _apply_party(arr: np.ndarray, m: np.ndarray, j: int) -> np.ndarray:
    moved = np.moveaxis(arr, j, 0)
    return np.moveaxis(np.tensordot(m, moved, axes=(1, 0)), 0, j)


def _rotate(arr: np.ndarray, unitaries) -> np.ndarray:
    for j, u in enumerate(unitaries):
        arr = _apply_party(arr, np.asarray(u).conj().T, j)
    return arr


def _entropy_bits(arr: np.ndarray) -> float:
    p = np.abs(arr.ravel()) ** 2
    p = p[p > PROB_FLOOR]
    return float(-(p * np.log2(p)).sum())


def _herm_generators(d: int) -> list[np.ndarray]:
    gens = []
    for i in range(d):
        g = np.zeros((d, d), dtype=complex)
        g[i, i] = 1.0
        gens.append(g)
    for i in range(d):
        for j in range(i + 1, d):
            g = np.zeros((d, d), dtype=complex)
            g[i, j] = g[j, i] = 1.0
            gens.append(g)
            g = np.zeros((d, d), dtype=complex)
            g[i, j] = -1.0j
            g[j, i] = 1.0j
            gens.append(g)
    return gens


def _split(theta: np.ndarray, dims) -> list[np.ndarray]:
    out, pos = [], 0
    for d in dims:
        out.append(theta[pos : pos + d * d])
        pos += d * d
    return out


def _objective_and_grad(theta: np.ndarray, amps: np.ndarray, gens, dims):
    blocks = _split(theta, dims)
    mats_a = []
    mats_u = []
    for j, d in enumerate(dims):
        h = np.zeros((d, d), dtype=complex)
        for t, g in zip(blocks[j], gens[j]):
            if t != 0.0:
                h += t * g
        a = 1.0j * h
        mats_a.append(a)
        mats_u.append(expm(a))
    c = _rotate(amps, mats_u)
    p = np.abs(c) ** 2
    mask = p > PROB_FLOOR
    f = float(-(p[mask] * np.log2(p[mask])).sum())
    dfdp = np.zeros_like(p)
    dfdp[mask] = -(np.log2(p[mask]) + 1.0 / LN2)
    grad = np.empty_like(theta)
    pos = 0
    for j, d in enumerate(dims):
        for a_idx, g in enumerate(gens[j]):
            du = expm_frechet(mats_a[j], 1.0j * g, compute_expm=False)
            dc = _apply_party(c, du.conj().T @ mats_u[j], j)
            dp = 2.0 * np.real(np.conj(c) * dc)
            grad[pos + a_idx] = float((dfdp * dp).sum())
        pos += d * d
    return f, grad


def discord_objective(psi: PureState, basis) -> float:
    """Outcome entropy (bits) of psi measured in the given product basis."""
    unitaries = list(getattr(basis, "unitaries", basis))
    if len(unitaries) != psi.dims.k:
        raise ValueError(f"need {psi.dims.k} basis matrices, got {len(unitaries)}")
    return _entropy_bits(_rotate(psi.reshaped(), unitaries))


def _marginal_eigenbasis(psi: PureState) -> list[np.ndarray]:
    rho = DensityMatrix(psi.dims, np.outer(psi.amps, psi.amps.conj()))
    mats = []
    for j in range(psi.dims.k):
        red = partial_trace(rho, [j]).mat
        w, v = np.linalg.eigh(red)
        mats.append(v[:, ::-1])
    return mats


def minimize_discord(psi: PureState, config: OptimizerConfig | None = None) -> DiscordResult:
    """Minimize the product-basis outcome entropy of a pure state.

    Multi-start local optimization: identity, Fourier, marginal-eigenbasis,
    then random starts.  Each start runs a few L-BFGS-B rounds, absorbing the
    current minimizer into the state between rounds so the next round expands
    around theta = 0 again.  `converged` reports whether at least two starts
    landed within cluster_tol of the best value.
    """
    cfg = config or OptimizerConfig()
    if psi.dims.total > cfg.guard_dim:
        raise GuardExceeded(
            f"dimension {psi.dims.total} exceeds the optimizer guard {cfg.guard_dim}"
        )
    dims = psi.dims.dims
    gens = [_herm_generators(d) for d in dims]
    n_params = sum(d * d for d in dims)
    rng = np.random.default_rng(cfg.seed)
    amps0 = psi.reshaped()

    starts: list[list[np.ndarray]] = [
        list(SeparableBasis.identity(dims).unitaries),
        list(SeparableBasis.fourier(dims).unitaries),
        _marginal_eigenbasis(psi),
    ]
    while len(starts) < cfg.restarts:
        theta = rng.normal(0.0, 1.2, size=n_params)
        blocks = _split(theta, dims)
        mats = []
        for j, d in enumerate(dims):
            h = sum(t * g for t, g in zip(blocks[j], gens[j]))
            mats.append(expm(1.0j * h))
        starts.append(mats)
    starts = starts[: cfg.restarts]

    per_restart: list[float] = []
    best_val = math.inf
    best_basis: list[np.ndarray] | None = None
    for basis in starts:
        acc = [np.asarray(u, dtype=complex) for u in basis]
        c = _rotate(amps0, acc)
        prev = _entropy_bits(c)
        for _ in range(cfg.recenter_rounds):
            res = minimize(
                _objective_and_grad,
                np.zeros(n_params),
                args=(c, gens, dims),
                jac=True,
                method="L-BFGS-B",
                options={"maxiter": cfg.max_iters, "ftol": 1e-16, "gtol": 1e-12},
            )
            blocks = _split(res.x, dims)
            for j, d in enumerate(dims):
                h = sum(t * g for t, g in zip(blocks[j], gens[j]))
                u = expm(1.0j * h)
                acc[j] = acc[j] @ u
                c = _apply_party(c, u.conj().T, j)
            improvement = prev - res.fun
            prev = float(res.fun)
            if improvement < cfg.tol:
                break
        per_restart.append(prev)
        if prev < best_val:
            best_val = prev
            best_basis = acc
    assert best_basis is not None
    near = sum(v <= best_val + cfg.cluster_tol for v in per_restart)
    converged = near >= 2 if len(per_restart) >= 2 else True
    return DiscordResult(
        value_bits=best_val,
        argmin_basis=SeparableBasis(tuple(best_basis)),
        per_restart_values=tuple(per_restart),
        restarts_used=len(per_restart),
        converged=converged,
    )


def finite_t_discord_rate(
    psi: PureState, t: int, config: OptimizerConfig | None = None
) -> tuple[float, DiscordResult]:
    """Per-copy minimum outcome entropy over product bases on t-copy blocks.

    Blocks t copies into one d^t register per party, minimizes there, and
    divides by t.  Non-increasing in t: blockwise product bases include all
    products of single-copy bases.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    phi = block_copies(psi, t)
    res = minimize_discord(phi, config)
    return res.value_bits / t, res
