"""Symplectic backend: states, gates, moments, overlaps.

Expected values come from closed-form hyperbolic identities evaluated inline,
so every comparison here is against an expression independent of the module
under test.
"""

import math

import numpy as np
import pytest

from cvclone import gaussian
from cvclone.errors import InvalidArgumentError

T0 = math.atanh(1.0 / 3.0)


def test_vacuum_state():
    st = gaussian.vacuum_state(3)
    assert st.n_modes == 3
    np.testing.assert_array_equal(st.mean, np.zeros(6))
    np.testing.assert_array_equal(st.cov, np.eye(6) / 4.0)


def test_two_mode_squeezer_twin_beam_covariance():
    # cosh(2 atanh t) = (1 + t^2)/(1 - t^2) and sinh(2 atanh t) = 2t/(1 - t^2);
    # at t = 1/3 the single-mode variance cosh(2r)/4 is exactly 5/16 and the
    # cross term sinh(2r)/4 is 3/16, negative in X and positive in Y
    st = gaussian.apply_two_mode_squeezer(gaussian.vacuum_state(2), 0, 1, T0)
    assert st.cov[0, 0] == pytest.approx(5.0 / 16.0, abs=1e-15)
    assert st.cov[1, 1] == pytest.approx(5.0 / 16.0, abs=1e-15)
    assert st.cov[2, 2] == pytest.approx(5.0 / 16.0, abs=1e-15)
    assert st.cov[0, 2] == pytest.approx(-3.0 / 16.0, abs=1e-15)
    assert st.cov[1, 3] == pytest.approx(3.0 / 16.0, abs=1e-15)
    assert st.cov[0, 1] == pytest.approx(0.0, abs=1e-15)
    assert st.cov[0, 3] == pytest.approx(0.0, abs=1e-15)


def test_two_mode_squeezer_is_pure():
    st = gaussian.apply_two_mode_squeezer(gaussian.vacuum_state(2), 0, 1, 1.3)
    assert np.linalg.det(4.0 * st.cov) == pytest.approx(1.0, abs=1e-12)


def test_beam_splitter_quarter_turn_swaps_modes():
    st = gaussian.displace(gaussian.vacuum_state(2), 0, 0.8 - 0.2j)
    out = gaussian.apply_beam_splitter(st, 0, 1, math.pi / 2.0)
    assert out.mode_mean(0) == pytest.approx(0.0, abs=1e-15)
    assert out.mode_mean(1) == pytest.approx(-(0.8 - 0.2j), abs=1e-15)


def test_beam_splitter_balanced_split():
    st = gaussian.displace(gaussian.vacuum_state(2), 0, 1.0 + 0j)
    out = gaussian.apply_beam_splitter(st, 0, 1, math.pi / 4.0)
    r = 1.0 / math.sqrt(2.0)
    assert out.mode_mean(0) == pytest.approx(r, abs=1e-15)
    assert out.mode_mean(1) == pytest.approx(-r, abs=1e-15)
    # passive gate: vacuum covariance is invariant
    np.testing.assert_allclose(out.cov, np.eye(4) / 4.0, atol=1e-15)


def test_beam_splitter_matrix_is_rotation():
    bs = gaussian.beam_splitter(2, 0, 1, 0.37)
    s = bs.matrix
    np.testing.assert_allclose(s @ s.T, np.eye(4), atol=1e-14)


def test_displace_only_shifts_mean():
    st = gaussian.displace(gaussian.vacuum_state(1), 0, 0.3 + 0.9j)
    np.testing.assert_allclose(st.mean, [0.3, 0.9], atol=1e-15)
    np.testing.assert_array_equal(st.cov, np.eye(2) / 4.0)


def test_quadrature_moments_rotation():
    st = gaussian.displace(gaussian.vacuum_state(1), 0, 1.0 + 2.0j)
    for phase in (0.0, math.pi / 2.0, 0.7):
        mean, var = gaussian.quadrature_moments(st, 0, phase)
        assert mean == pytest.approx(math.cos(phase) + 2.0 * math.sin(phase),
                                     abs=1e-14)
        assert var == pytest.approx(0.25, abs=1e-14)


def test_reduce_preserves_requested_order():
    st = gaussian.displace(gaussian.vacuum_state(3), 1, 2.0 + 0j)
    sub = gaussian.reduce(st, [2, 1])
    assert sub.n_modes == 2
    assert sub.mode_mean(0) == 0.0
    assert sub.mode_mean(1) == pytest.approx(2.0, abs=1e-15)


def test_reduce_rejects_bad_mode_sets():
    st = gaussian.vacuum_state(2)
    with pytest.raises(InvalidArgumentError):
        gaussian.reduce(st, [])
    with pytest.raises(InvalidArgumentError):
        gaussian.reduce(st, [0, 0])
    with pytest.raises(InvalidArgumentError):
        gaussian.reduce(st, [2])


def test_fidelity_thermal_half_photon():
    # <0| rho_th |0> = 1/(1 + nbar); cov (2 nbar + 1) I / 4 with nbar = 1/2
    thermal = gaussian.GaussianState(1, np.zeros(2), np.eye(2) / 2.0)
    fid = gaussian.fidelity_with_coherent(thermal, 0j)
    assert fid == pytest.approx(2.0 / 3.0, abs=1e-14)


def test_fidelity_coherent_with_itself():
    st = gaussian.displace(gaussian.vacuum_state(1), 0, 1.1 - 0.4j)
    assert gaussian.fidelity_with_coherent(st, 1.1 - 0.4j) == pytest.approx(
        1.0, abs=1e-14)
    assert gaussian.fidelity_with_coherent(st, 0j) == pytest.approx(
        math.exp(-abs(1.1 - 0.4j) ** 2), abs=1e-14)


def test_fidelity_requires_single_mode():
    with pytest.raises(InvalidArgumentError):
        gaussian.fidelity_with_coherent(gaussian.vacuum_state(2), 0j)


def test_husimi_of_vacuum():
    vac = gaussian.vacuum_state(1)
    for z in (0j, 0.5 + 0.5j, -1.2j):
        assert gaussian.husimi_q(vac, z) == pytest.approx(
            math.exp(-abs(z) ** 2) / math.pi, abs=1e-14)


def test_symplectic_validation_rejects_scaling():
    with pytest.raises(InvalidArgumentError):
        gaussian.SymplecticTransform(2.0 * np.eye(2))


def test_symplectic_validation_is_relative_at_large_squeeze():
    # cosh(8) ~ 1.5e3; an absolute defect bound at 1e-12 would reject this
    big = gaussian.two_mode_squeezer(2, 0, 1, 8.0)
    assert abs(big.matrix[0, 0]) > 1e3


def test_compose_against_matrix_product():
    a = gaussian.two_mode_squeezer(2, 0, 1, 0.4)
    b = gaussian.beam_splitter(2, 0, 1, 0.9)
    ba = b.compose(a)
    np.testing.assert_allclose(ba.matrix, b.matrix @ a.matrix, atol=1e-14)
    st = gaussian.displace(gaussian.vacuum_state(2), 0, 0.5 + 0j)
    one = b.apply(a.apply(st))
    two = ba.apply(st)
    np.testing.assert_allclose(one.mean, two.mean, atol=1e-14)
    np.testing.assert_allclose(one.cov, two.cov, atol=1e-14)


def test_inverse_roundtrip_large_squeeze():
    t = gaussian.two_mode_squeezer(2, 0, 1, 8.0)
    ident = t.compose(t.inverse()).matrix
    # cancellation of cosh(8)^2 terms leaves roundoff of that magnitude
    np.testing.assert_allclose(ident, np.eye(4), atol=1e-9)


def test_state_construction_validation():
    with pytest.raises(InvalidArgumentError):
        gaussian.GaussianState(2, np.zeros(4), np.eye(3))
    with pytest.raises(InvalidArgumentError):
        gaussian.GaussianState(1, np.zeros(3), np.eye(2) / 4.0)
    skew = np.eye(2) / 4.0
    skew[0, 1] = 1e-3
    with pytest.raises(InvalidArgumentError):
        gaussian.GaussianState(1, np.zeros(2), skew)
