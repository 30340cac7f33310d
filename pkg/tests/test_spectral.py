import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from swirlmodel import spectral
from swirlmodel.errors import Blowup, NonZeroMeanError

from conftest import trig_poly

coef = st.floats(-5, 5, allow_nan=False)
coeff_lists = st.lists(st.tuples(coef, coef), min_size=1, max_size=6)


class TestGrid:
    @pytest.mark.parametrize("n", [0, 7, 12, 100, 8.0])
    def test_rejects_bad_sizes(self, n):
        with pytest.raises(ValueError):
            spectral.PeriodicGrid(n)

    def test_metadata(self):
        g = spectral.grid_for(16)
        assert g.nodes[1] == 1 / 16
        assert g.k[3] == pytest.approx(6 * np.pi)
        assert g.ik[-1] == 0
        assert g.dealias_mask.sum() == 16 // 3 + 1
        assert spectral.grid_for(16) is g

    def test_arrays_are_read_only(self):
        g = spectral.grid_for(32)
        with pytest.raises(ValueError):
            g.k[0] = 1.0


class TestDerivatives:
    @given(coeff_lists)
    def test_derivative_of_trig_polynomial(self, coeffs):
        f, df = trig_poly(64, coeffs)
        scale = max(1.0, np.max(np.abs(df)))
        assert np.max(np.abs(spectral.derivative(f) - df)) <= 1e-11 * scale

    @given(coeff_lists)
    def test_second_derivative_matches_twice_first(self, coeffs):
        f, _ = trig_poly(64, coeffs)
        d2 = spectral.second_derivative(f)
        dd = spectral.derivative(spectral.derivative(f))
        assert np.max(np.abs(d2 - dd)) <= 1e-9 * max(1.0, np.max(np.abs(d2)))

    def test_nyquist_mode_has_zero_derivative(self):
        n = 16
        f = np.cos(np.pi * n * np.arange(n) / n)
        assert np.max(np.abs(spectral.derivative(f))) < 1e-12


class TestStream:
    @given(coeff_lists)
    def test_inverse_of_derivative(self, coeffs):
        psi, dpsi = trig_poly(128, coeffs)
        got = spectral.invert_stream(-dpsi)
        assert np.max(np.abs(got - psi)) <= 1e-12 * max(1.0, np.max(np.abs(psi)))
        assert abs(np.mean(got)) < 1e-13

    def test_rejects_nonzero_mean(self):
        with pytest.raises(NonZeroMeanError):
            spectral.invert_stream(np.ones(32) + np.sin(2 * np.pi * np.arange(32) / 32))


class TestFilters:
    @given(coeff_lists)
    def test_round_trip(self, coeffs):
        f, _ = trig_poly(64, coeffs)
        g = spectral.grid_for(64)
        assert np.max(np.abs(g.ifft(g.fft(f)) - f)) < 1e-12 * max(1.0, np.max(np.abs(f)))

    def test_dealias_keeps_low_and_removes_high_modes(self):
        n = 64
        z = np.arange(n) / n
        low = np.cos(2 * np.pi * (n // 3) * z)
        high = np.sin(2 * np.pi * (n // 3 + 1) * z)
        assert np.allclose(spectral.dealias(low + high), low, atol=1e-12)

    @given(coeff_lists)
    def test_dealias_idempotent(self, coeffs):
        f, _ = trig_poly(32, coeffs + [(1.0, 2.0)] * 10)
        once = spectral.dealias(f)
        assert np.allclose(spectral.dealias(once), once, atol=1e-12)

    @pytest.mark.parametrize("k,nu_dt", [(1, 0.01), (3, 1e-3), (5, 0.5)])
    def test_implicit_diffusion_single_mode(self, k, nu_dt):
        z = np.arange(64) / 64
        f = np.sin(2 * np.pi * k * z)
        expect = f / (1 + nu_dt * (2 * np.pi * k) ** 2)
        assert np.allclose(spectral.diffuse_implicit(f, nu_dt), expect, atol=1e-14)

    def test_implicit_diffusion_rejects_negative(self):
        with pytest.raises(ValueError):
            spectral.diffuse_implicit(np.zeros(8), -1.0)


class TestNorms:
    @given(coeff_lists, coef)
    def test_parseval(self, coeffs, mean):
        f, _ = trig_poly(64, coeffs)
        f = f + mean
        assert spectral.spectral_l2(f) == pytest.approx(spectral.l2(f), rel=1e-12, abs=1e-14)

    def test_l2_of_sine(self):
        z = np.arange(32) / 32
        assert spectral.l2(np.sin(2 * np.pi * z)) == pytest.approx(np.sqrt(0.5), rel=1e-14)

    def test_project_mean_zero(self, rng):
        f = rng.normal(size=(3, 16)) + 4.0
        assert np.allclose(spectral.project_mean_zero(f).mean(axis=-1), 0.0, atol=1e-15)


class TestInterpolate:
    @given(coeff_lists, st.lists(st.floats(0, 1, exclude_max=True), min_size=1, max_size=8))
    def test_exact_for_band_limited(self, coeffs, pts):
        f, _ = trig_poly(64, coeffs)
        pts = np.array(pts)
        exact, _ = trig_poly(64, coeffs, pts)
        assert np.max(np.abs(spectral.interpolate(f, pts) - exact)) < 1e-11


def test_check_finite():
    with pytest.raises(Blowup) as exc:
        spectral.check_finite(np.array([1.0, np.nan]), t=0.5)
    assert exc.value.cause == "NonFinite"
    assert exc.value.t_star == 0.5
