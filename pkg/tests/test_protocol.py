from __future__ import annotations

import math

import numpy as np
import pytest

from ghzcost import presets
from ghzcost.hilbert import GuardExceeded, PartyDims, PureState, random_unitary
from ghzcost.protocol import (
    BranchReport,
    KMap,
    ghz_resource,
    copy_unitary,
    erase_measurement,
    pack_measurement,
    prepare_conversion,
    reshape_measurement,
    resource_rate,
    run_protocol,
    trace_path,
    truncate_resource,
)


def identity_basis(k, d=2):
    return [np.eye(d) for _ in range(k)]


def test_kmap_two_member_example():
    pin = prepare_conversion(presets.ghz(3), identity_basis(3), t=1, l=1, epsilon=0.1)
    assert pin.A == 2
    assert pin.alphas == (2, 2, 2)
    assert pin.kmap.weights == (4, 2, 1)
    assert list(pin.kmap.values) == [0, 7]
    assert pin.kmap.D_K == 8
    assert pin.m == 1 and pin.n == 1
    assert resource_rate(pin) == 1.0
    assert pin.paths_total() == 2 * 4 * 8


def test_w_l2_enumerate_all_branches():
    pin = prepare_conversion(presets.w(3), identity_basis(3), t=1, l=2, epsilon=0.01)
    assert pin.A == 9
    assert pin.alphas == (4, 4, 4)
    assert pin.kmap.D_K == 49
    assert pin.m == 4
    rep = run_protocol(pin, mode="enumerate")
    assert rep.paths_total == 9 * 81 * 49
    assert rep.branches_enumerated == 9 + 81 + 49
    assert rep.min_fidelity >= 1.0 - 1e-12
    assert rep.max_deviation <= 1e-12
    assert rep.probability_covered == pytest.approx(1.0, abs=1e-10)
    assert all(s == pytest.approx(1.0, abs=1e-11) for s in rep.stage_probabilities)
    assert rep.truncation_success == pytest.approx(9 / 16)
    assert rep.pack_dense_checked


def test_w_l2_trace_fixed_path():
    pin = prepare_conversion(presets.w(3), identity_basis(3), t=1, l=2, epsilon=0.01)
    tr = trace_path(pin, path=(3, (2, 5), 17))
    assert tr.final_fidelity >= 1.0 - 1e-12
    by_name = {s.step: s for s in tr.steps}
    assert by_name["truncate"].probability == pytest.approx(9 / 16, abs=1e-12)
    assert by_name["reshape"].probability == pytest.approx(1 / 9, abs=1e-12)
    assert by_name["erase"].probability == pytest.approx(1 / 81, abs=1e-12)
    assert by_name["pack"].probability == pytest.approx(1 / 49, abs=1e-12)
    assert all(s.fidelity >= 1.0 - 1e-12 for s in tr.steps)
    assert tr.rate == pytest.approx(4 / 2)


def test_rotated_basis_complex_amplitudes():
    rng = np.random.default_rng(42)
    basis = [random_unitary(2, rng) for _ in range(3)]
    from ghzcost.typical import coefficient_distribution

    dist, _ = coefficient_distribution(presets.w(3), basis, t=1)
    eps = max(abs(-math.log2(p) - dist.entropy) for p in dist.probs.values()) + 0.01
    pin = prepare_conversion(presets.w(3), basis, t=1, l=2, epsilon=eps)
    assert pin.A == 64
    assert np.abs(pin.coeffs.imag).max() > 1e-3
    # 2^30 outcome paths, but only 64 + 64^2 + 4096 distinct stage branches
    rep = run_protocol(pin, mode="enumerate", branch_guard=2 * 10**9)
    assert rep.min_fidelity >= 1.0 - 1e-9
    small = prepare_conversion(presets.w(3), basis, t=1, l=1, epsilon=eps)
    tr = trace_path(small, rng=np.random.default_rng(5))
    assert tr.final_fidelity >= 1.0 - 1e-9


def test_fractional_mass_still_exact_branches():
    # N_eps < 1 rescales the coefficients; every branch still lands on Psi
    pin = prepare_conversion(presets.gghz(0.3), identity_basis(3), t=1, l=4, epsilon=0.3)
    assert pin.A == 10
    assert pin.alphas == (10, 10, 10)
    assert pin.kmap.D_K == 1000
    assert pin.its.N_epsilon == pytest.approx(0.6762, abs=1e-10)
    rep = run_protocol(pin, mode="enumerate")  # exactly 10^6 paths, at the guard
    assert rep.paths_total == 1_000_000
    assert not rep.pack_dense_checked  # D_K over the dense limit: FFT probe route
    assert rep.min_fidelity >= 1.0 - 1e-11
    assert rep.max_deviation <= 1e-11
    samp = run_protocol(pin, mode="sample", samples=25, rng=np.random.default_rng(8))
    assert samp.min_fidelity >= 1.0 - 1e-11


def test_branch_guard_and_mode_validation():
    pin = prepare_conversion(presets.gghz(0.3), identity_basis(3), t=1, l=4, epsilon=0.3)
    with pytest.raises(GuardExceeded):
        run_protocol(pin, mode="enumerate", branch_guard=10**5)
    with pytest.raises(ValueError):
        run_protocol(pin, mode="bogus")
    big = prepare_conversion(presets.gghz(0.5), identity_basis(3), t=1, l=4, epsilon=1.0)
    with pytest.raises(GuardExceeded):
        trace_path(big, path=(0, (0, 0), 0))
    with pytest.raises(GuardExceeded):
        # D_K = 1000 makes the pack operator family itself too large to build
        trace_path(pin, path=(9, (3, 7), 512))


def test_sample_mode():
    pin = prepare_conversion(presets.w(3), identity_basis(3), t=1, l=2, epsilon=0.01)
    rep = run_protocol(pin, mode="sample", samples=50, rng=np.random.default_rng(1))
    assert rep.mode == "sample"
    assert rep.branches_enumerated == 50
    assert 0 < rep.probability_covered <= 50 / rep.paths_total
    assert rep.min_fidelity >= 1.0 - 1e-11
    assert rep.stage_probabilities == ()


def test_resource_construction():
    res = ghz_resource(3, 2)
    assert res.dims.dims == (4, 4, 4)
    arr = res.reshaped()
    for y in range(4):
        assert arr[y, y, y] == pytest.approx(0.5)
    assert np.abs(res.amps).sum() == pytest.approx(2.0)  # only the 4 diagonal terms

    prob, cut = truncate_resource(res, 3)
    assert prob == pytest.approx(3 / 4, abs=1e-12)
    assert cut.dims.dims == (3, 3, 3)
    assert cut.reshaped()[2, 2, 2] == pytest.approx(1 / math.sqrt(3))

    same_prob, same = truncate_resource(res, 4)
    assert same_prob == 1.0 and same.dims.dims == (4, 4, 4)

    assert ghz_resource(2, 0).dims.dims == (1, 1)
    with pytest.raises(ValueError):
        ghz_resource(1, 2)
    with pytest.raises(ValueError):
        ghz_resource(3, -1)
    with pytest.raises(ValueError):
        truncate_resource(res, 5)


def test_copy_unitary_properties():
    u = copy_unitary(3, 4, (0, 2, 3))
    assert np.allclose(u @ u, np.eye(12))  # pairwise swaps square to identity
    assert np.allclose(u.T @ u, np.eye(12))
    for y, t in enumerate((0, 2, 3)):
        col = np.zeros(12)
        col[y * 4] = 1.0
        assert np.argmax(u @ col) == y * 4 + t
    with pytest.raises(ValueError):
        copy_unitary(3, 4, (0, 2))
    with pytest.raises(ValueError):
        copy_unitary(3, 4, (0, 2, 4))


def test_measurement_constructors():
    c = np.sqrt(np.array([0.5, 0.3, 0.2], dtype=complex))
    ms = reshape_measurement(c)
    assert len(ms) == 3 and ms.operators[1][0, 0] == pytest.approx(c[1])
    er = erase_measurement(4)
    assert er.operators[2].shape == (1, 4)
    assert er.operators[1][0, 1] == pytest.approx(np.exp(-2j * np.pi / 4) / 2)
    pm = pack_measurement(8)
    assert len(pm) == 8 and pm.in_dim == 8 and pm.out_dim == 1


def test_single_member_degenerate_case():
    psi = presets.resolve("product-000")
    pin = prepare_conversion(psi, identity_basis(3), t=1, l=1, epsilon=0.0)
    assert pin.A == 1 and pin.m == 0 and pin.kmap.D_K == 1
    assert resource_rate(pin) == 0.0
    rep = run_protocol(pin, mode="enumerate")
    assert rep.paths_total == 1
    assert rep.min_fidelity == pytest.approx(1.0)
    tr = trace_path(pin, path=(0, (0, 0), 0))
    assert tr.final_fidelity == pytest.approx(1.0)
    assert all(s.probability == pytest.approx(1.0) for s in tr.steps)


def test_blocked_two_copy_input():
    pin = prepare_conversion(presets.ghz(3), identity_basis(3, d=4), t=2, l=1, epsilon=0.1)
    assert pin.n == 2
    assert pin.A == 4  # two correlated values per copy make four blocked labels
    assert pin.kmap.D_K == 64
    rep = run_protocol(pin)
    assert rep.min_fidelity >= 1.0 - 1e-12