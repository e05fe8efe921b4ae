import numpy as np
import pytest

from gevreymhd.norms import (
    GevreyParams,
    NormRecord,
    RadiusFitError,
    fit_radius,
    gevrey_norm,
    shell_maxima,
    sobolev_norm,
    state_norms,
    sup_gradient,
)
from gevreymhd.spectral import Grid, SpectralField, mode_field, random_band

from oracles import field_to_modes, naive_sobolev_sq

TWO_PI_CUBED = (2.0 * np.pi) ** 3


class TestParams:
    def test_validation(self):
        with pytest.raises(ValueError):
            GevreyParams(r=0.0)
        with pytest.raises(ValueError):
            GevreyParams(r=1.0, s=0.9)
        with pytest.raises(ValueError):
            GevreyParams(r=1.0, tau=-0.1)

    def test_subcritical_warning(self):
        with pytest.warns(UserWarning, match="threshold"):
            GevreyParams(r=3.0, s=1.0).warn_if_subcritical()
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("error")
            GevreyParams(r=4.1, s=1.0).warn_if_subcritical()


class TestNorms:
    def test_sobolev_single_mode(self):
        g = Grid(8)
        f = mode_field(g, [((1, 2, 0), (0.5, 0.0, 0.0))])
        # two conjugate modes, each |c|^2 = 0.25, weight (1+5)^2 = 36
        expected = np.sqrt(TWO_PI_CUBED * 2 * 0.25 * 36.0)
        assert sobolev_norm(f, 2.0) == pytest.approx(expected, rel=1e-13)

    def test_sobolev_matches_naive_oracle(self):
        g = Grid(8)
        f = random_band(g, seed=21, kmax=2).u
        oracle = np.sqrt(naive_sobolev_sq(field_to_modes(f), 2.5))
        assert sobolev_norm(f, 2.5) == pytest.approx(oracle, rel=1e-12)

    def test_gevrey_single_mode_x_norm(self):
        g = Grid(8)
        f = mode_field(g, [((1, 2, 0), (0.0, 0.0, 0.5))])
        params = GevreyParams(r=1.0, s=1.0, tau=0.3)
        # per conjugate pair: m=1 -> 1^2 e^{0.6}, m=2 -> 2^2 e^{1.2}, m=3 -> 0
        expected = np.sqrt(
            TWO_PI_CUBED * 2 * 0.25 * (np.exp(0.6) + 4.0 * np.exp(1.2))
        )
        assert gevrey_norm(f, params, "X") == pytest.approx(expected, rel=1e-13)

    def test_y_dominates_x(self):
        g = Grid(16)
        f = random_band(g, seed=22, kmax=4).u
        params = GevreyParams(r=1.5, s=2.0, tau=0.2)
        assert gevrey_norm(f, params, "Y") >= gevrey_norm(f, params, "X")

    def test_invalid_space_rejected(self):
        f = random_band(Grid(8), seed=0, kmax=2).u
        with pytest.raises(ValueError):
            gevrey_norm(f, GevreyParams(r=1.0), "Z")

    def test_sup_gradient_single_mode(self):
        g = Grid(16)
        f = mode_field(g, [((3, 0, 0), (0.0, 0.5, 0.0))])  # cos(3x) e_2
        # d_x cos(3x) = -3 sin(3x): sup = 3, attained near collocation points
        assert sup_gradient(f, refine=4) == pytest.approx(3.0, rel=1e-3)

    def test_state_norms_quadrature_combination(self):
        g = Grid(16)
        st = random_band(g, seed=23, kmax=3)
        params = GevreyParams(r=2.0, s=1.0, tau=0.1)
        rec = state_norms(st.u, st.h, params, 1.0, 2.0)
        assert rec.hr == pytest.approx(np.hypot(rec.hr_omega, rec.hr_current))
        assert rec.x_norm == pytest.approx(np.hypot(rec.x_omega, rec.x_current))

    def test_norm_record_rejects_nan(self):
        with pytest.raises(ValueError):
            NormRecord(np.nan, 1, 1, 1, 1, 1, 1, 1, 1)


class TestRadiusFit:
    def test_shell_maxima_layout(self):
        g = Grid(8)
        f = mode_field(g, [((1, 1, 0), (0.0, 0.0, 0.3)),
                           ((2, 0, 0), (0.0, 0.1, 0.0))])
        shells = shell_maxima(f)
        assert shells[2] == pytest.approx(0.3)
        assert shells[1] == 0.0

    def test_fit_recovers_synthetic_decay(self):
        g = Grid(16)
        tau_true = 0.35
        k1, k2, k3 = g.wavevectors()
        l1 = np.abs(k1) + np.abs(k2) + np.abs(k3)
        coeffs = np.exp(-tau_true * l1) * np.ones((3, 16, 16, 16))
        coeffs[:, 0, 0, 0] = 0.0
        f = SpectralField(g, coeffs.astype(np.complex128))
        assert fit_radius(f, s=1.0) == pytest.approx(tau_true, rel=1e-10)

    def test_fit_with_gevrey_exponent(self):
        g = Grid(16)
        tau_true = 0.8
        k1, k2, k3 = g.wavevectors()
        l1 = (np.abs(k1) + np.abs(k2) + np.abs(k3)).astype(float)
        coeffs = np.exp(-tau_true * np.sqrt(l1)) * np.ones((3, 16, 16, 16))
        coeffs[:, 0, 0, 0] = 0.0
        f = SpectralField(g, coeffs.astype(np.complex128))
        assert fit_radius(f, s=2.0) == pytest.approx(tau_true, rel=1e-10)

    def test_fit_needs_four_shells(self):
        g = Grid(16)
        f = mode_field(g, [((1, 0, 0), (0.0, 1.0, 0.0)),
                           ((2, 0, 0), (0.0, 0.5, 0.0))])
        with pytest.raises(RadiusFitError, match="shells"):
            fit_radius(f, s=1.0)

    def test_noise_floor_excludes_tiny_shells(self):
        g = Grid(16)
        k1, k2, k3 = g.wavevectors()
        l1 = np.abs(k1) + np.abs(k2) + np.abs(k3)
        coeffs = np.exp(-0.5 * l1) * np.ones((3, 16, 16, 16))
        coeffs[:, 0, 0, 0] = 0.0
        f = SpectralField(g, coeffs.astype(np.complex128))
        # raise the floor so high shells drop out but the fit still works
        assert fit_radius(f, s=1.0, noise_floor=1e-3) == pytest.approx(
            0.5, rel=1e-8
        )
