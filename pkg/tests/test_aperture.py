import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from mlamatch.aperture import (
    ApertureModel,
    QuadratureSpec,
    admittance_from_reflection,
    admittance_matrix,
    aperture_admittance,
    aperture_reflection,
    build_aperture_model,
    c0,
    cm,
    guide_admittance,
    mode_coupling_dm,
    mode_set,
    mutual_admittance,
    spectral_kz,
)
from mlamatch.exceptions import (
    ApertureDomainError,
    DegenerateResonanceError,
    PoleError,
    QuadratureError,
)
from mlamatch.waveguide import FrequencyPoint, GuideSection, modal_params
from oracles import brute_force_admittance

A = 0.017
B = 0.011


def test_c0_examples():
    assert c0(0.0, B) == B
    assert abs(c0(2 * math.pi / B, B)) < 1e-18
    for ky in (13.0, 250.0, 4e3):
        assert c0(-ky, B) == c0(ky, B)


def test_cm_examples():
    assert cm(0.0, A, 1) == pytest.approx(2 * A / math.pi, rel=1e-15)
    assert cm(0.0, A, 3) == pytest.approx(-2 * A / (3 * math.pi), rel=1e-15)
    assert cm(math.pi / A, A, 1) == A / 2


def test_cm_limit_agrees_with_neighbours():
    for m in (1, 3, 5):
        for side in (1 - 1e-8, 1 + 1e-8):
            x = m * math.pi * side / A
            assert cm(x, A, m) == pytest.approx(A / 2, rel=1e-6)
            assert cm(-x, A, m) == pytest.approx(A / 2, rel=1e-6)


@given(st.floats(-3000, 3000), st.sampled_from([1, 3, 5, 7]))
def test_cm_is_fourier_transform_of_mode(kx, m):
    re, _ = quad(lambda x: math.cos(m * math.pi * x / A) * math.cos(kx * x),
                 -A / 2, A / 2, epsabs=1e-14)
    assert cm(kx, A, m) == pytest.approx(re, rel=1e-7, abs=1e-12)


def test_c0_is_fourier_transform_of_pulse():
    for ky in (0.0, 100.0, 777.0, -1500.0):
        re, _ = quad(lambda y: math.cos(ky * y), -B / 2, B / 2, epsabs=1e-15)
        assert c0(ky, B) == pytest.approx(re, rel=1e-10, abs=1e-15)


def test_kz_branch():
    k = 200.0
    assert spectral_kz(0.0, 0.0, k) == pytest.approx(k)
    inside = spectral_kz(100.0, 50.0, k)
    assert inside.imag == 0 and inside.real > 0
    outside = spectral_kz(300.0, 10.0, k)
    assert outside.real == 0 and outside.imag < 0


def test_mode_set_validation():
    assert mode_set([1, 3, 5]) == (1, 3, 5)
    for bad in ([], [3, 5], [1, 2], [1, 5, 3], [1, 1]):
        with pytest.raises(ValueError):
            mode_set(bad)


def test_quadrature_spec_validation():
    QuadratureSpec(8, 8, 8, 5.0, 0.1)
    for kw in ({"nodes_visible": 4}, {"k_rho_max": 2.0}, {"rel_tol": 0.0},
               {"rel_tol": 0.2}):
        with pytest.raises(ValueError):
            QuadratureSpec(**kw)


def test_mutual_admittance_symmetry_and_self_term(antenna, f0):
    y13 = mutual_admittance(1, 3, antenna, f0)
    y31 = mutual_admittance(3, 1, antenna, f0)
    assert y13 == y31
    y = admittance_matrix((1, 3, 5), antenna, f0)
    np.testing.assert_array_equal(y, y.T)
    assert mutual_admittance(1, 1, antenna, f0).real > 0
    assert np.all(np.diag(y).real > 0)


def test_mutual_admittance_matches_brute_force(antenna, f0):
    y = admittance_matrix((1, 3, 5), antenna, f0)
    ref = brute_force_admittance((1, 3, 5), antenna, f0)
    assert np.max(np.abs(y - ref)) / np.max(np.abs(ref)) < 5e-3
    assert abs(y[0, 0] - ref[0, 0]) / abs(ref[0, 0]) < 5e-3


def test_quadrant_folding_matches_full_plane(antenna, f0):
    full = brute_force_admittance((1, 3), antenna, f0, n_grid=2000, full_plane=True)
    y = admittance_matrix((1, 3), antenna, f0)
    q = QuadratureSpec()
    assert np.max(np.abs(y - full)) / np.max(np.abs(full)) < q.rel_tol


def test_quadrature_failure_carries_estimates(antenna, f0):
    q = QuadratureSpec(8, 8, 8, rel_tol=1e-15, max_doublings=1)
    with pytest.raises(QuadratureError) as info:
        admittance_matrix((1, 3), antenna, f0, q)
    assert len(info.value.estimates) == 2


def test_mode_coupling_examples():
    assert mode_coupling_dm(0, 1, 1) == 0
    assert mode_coupling_dm(1, 1, 1) == -0.5
    s = 0.3 - 2.1j
    args = (0.2 + 0.1j, 1.5 - 0.4j, -0.3j)
    assert mode_coupling_dm(*(s * x for x in args)) == pytest.approx(
        mode_coupling_dm(*args), rel=1e-14)
    with pytest.raises(DegenerateResonanceError):
        mode_coupling_dm(1.0, 1j, -1j)


def test_single_mode_reduction_is_exact(antenna, f0):
    y1 = aperture_admittance(antenna, f0, [1])
    assert y1 == mutual_admittance(1, 1, antenna, f0) / guide_admittance(antenna, f0, 1)


def test_guide_admittance_is_wave_admittance(antenna, f0):
    beta = modal_params(antenna, f0, 3).beta
    assert guide_admittance(antenna, f0, 3) == pytest.approx(
        beta / (f0.omega * 4e-7 * math.pi), rel=1e-9)
    assert guide_admittance(antenna, f0, 3).imag < 0


def test_node_doubling_is_converged(antenna, f0):
    q = QuadratureSpec()
    y = aperture_admittance(antenna, f0, q=q)
    y2 = aperture_admittance(antenna, f0, q=q.doubled())
    assert abs(y2 - y) / abs(y) < 1e-3


def test_higher_modes_converge(antenna, f0):
    y13 = aperture_admittance(antenna, f0, [1, 3])
    y135 = aperture_admittance(antenna, f0, [1, 3, 5])
    y1357 = aperture_admittance(antenna, f0, [1, 3, 5, 7])
    assert abs(y1357 - y135) < abs(y135 - y13)


def test_below_cutoff_is_domain_error(antenna):
    with pytest.raises(ApertureDomainError):
        aperture_admittance(antenna, FrequencyPoint(0.9 * antenna.cutoff_frequency()))


def test_large_aperture_approaches_free_space_match():
    fp = FrequencyPoint(1e10)
    small = aperture_admittance(GuideSection(0.05, 0.03), fp, [1])
    large = aperture_admittance(GuideSection(0.2, 0.12), fp, [1])
    assert abs(large - 1) < abs(small - 1)
    assert abs(large - 1) < 0.03


def test_aperture_reflection_examples():
    assert aperture_reflection(1) == 0
    assert aperture_reflection(0) == 1
    assert aperture_reflection(1 + 1j) == pytest.approx(-0.2 - 0.4j, abs=1e-15)
    with pytest.raises(PoleError):
        aperture_reflection(-1)


@given(st.floats(0.001, 10), st.floats(-10, 10))
def test_reflection_involution_and_passivity(g, b):
    y = complex(g, b)
    gam = aperture_reflection(y)
    assert abs(gam) < 1
    assert admittance_from_reflection(gam) == pytest.approx(y, abs=1e-12 * max(1, abs(y)))


def test_model_one_point(antenna, f0):
    m = build_aperture_model(antenna, [f0])
    assert len(m) == 1
    assert m.y_ap[0] == aperture_admittance(antenna, f0)
    assert m.gamma_ap[0] == aperture_reflection(m.y_ap[0])


def test_model_preserves_order_and_workers(antenna):
    grid = [10.1e9, 9.3e9, 9.8e9]
    m1 = build_aperture_model(antenna, grid)
    m2 = build_aperture_model(antenna, grid, workers=2)
    np.testing.assert_array_equal(m1.freqs, grid)
    np.testing.assert_array_equal(m1.y_ap, m2.y_ap)
    for f, y in zip(grid, m1.y_ap):
        assert y == aperture_admittance(antenna, FrequencyPoint(f))


def test_model_failure_names_frequency(antenna):
    q = QuadratureSpec(8, 8, 8, rel_tol=1e-15, max_doublings=1)
    with pytest.raises(QuadratureError, match="9.5e\\+09|9500000000"):
        build_aperture_model(antenna, [9.5e9], q=q)
    with pytest.raises(ApertureDomainError):
        build_aperture_model(antenna, [9.5e9, 1e9])


def test_band_is_passive(band_model):
    assert np.all(band_model.y_ap.real > 0)
    assert np.all(np.abs(band_model.gamma_ap) < 1)
    np.testing.assert_allclose(band_model.gamma_ap,
                               (1 - band_model.y_ap) / (1 + band_model.y_ap), rtol=1e-15)


def test_constant_model(antenna):
    m = ApertureModel.constant(antenna, [9e9, 1e10], 0.0)
    np.testing.assert_array_equal(m.gamma_ap, [0, 0])
    np.testing.assert_array_equal(m.y_ap, [1, 1])
