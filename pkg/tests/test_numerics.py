import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levyq.errors import InputError, NoSolutionError
from levyq.models import TailIntegralOracle, tail_integral
from levyq.numerics import FrequencyGrid, SampledFunction, bracketed_root, inverse_fourier


class TestFrequencyGrid:
    def test_symmetric_about_zero(self):
        for offset in (False, True):
            g = FrequencyGrid(cutoff=3.0, points=256, offset=offset)
            u = g.u
            assert np.allclose(u + u[::-1], 0.0, atol=1e-14)
            assert not np.any(u == 0.0)

    def test_span_relation(self):
        g = FrequencyGrid(cutoff=7.0, points=1024)
        assert g.spacing * (g.points - 1) == pytest.approx(2 * g.cutoff)
        assert g.u[0] == -7.0 and g.u[-1] == 7.0

    def test_offset_is_midpoint_layout(self):
        g = FrequencyGrid(cutoff=1.0, points=8, offset=True)
        assert g.spacing == pytest.approx(0.25)
        assert np.allclose(g.u, [-0.875, -0.625, -0.375, -0.125, 0.125, 0.375, 0.625, 0.875])
        assert np.min(np.abs(g.u)) == pytest.approx(g.spacing / 2)

    def test_rejects_bad_parameters(self):
        with pytest.raises(InputError):
            FrequencyGrid(cutoff=-1.0, points=64)
        with pytest.raises(InputError):
            FrequencyGrid(cutoff=1.0, points=100)  # not a power of two

    def test_weights_sum_to_window(self):
        for offset in (False, True):
            g = FrequencyGrid(cutoff=2.0, points=512, offset=offset)
            assert np.sum(g.weights) == pytest.approx(4.0, rel=1e-12)

    @given(k=st.integers(min_value=3, max_value=12), cutoff=st.floats(0.1, 100))
    @settings(max_examples=30, deadline=None)
    def test_grid_invariants_property(self, k, cutoff):
        g = FrequencyGrid(cutoff=cutoff, points=2 ** k)
        u = g.u
        assert u.size == 2 ** k
        assert np.all(np.diff(u) > 0)
        assert np.allclose(u + u[::-1], 0.0, atol=1e-9 * cutoff)


class TestInverseFourier:
    def test_gaussian_pair_at_zero(self):
        # spectrum e^{-u^2/2} inverts to the standard normal density
        g = FrequencyGrid(cutoff=12.0, points=2 ** 12)
        out = inverse_fourier(lambda u: np.exp(-0.5 * u ** 2), g, [0.0])
        assert out.ordinates[0].real == pytest.approx(1 / math.sqrt(2 * math.pi), abs=1e-6)
        assert abs(out.ordinates[0].imag) < 1e-12

    def test_zero_spectrum(self):
        g = FrequencyGrid(cutoff=1.0, points=64)
        out = inverse_fourier(lambda u: np.zeros_like(u), g, np.linspace(-2, 2, 9))
        assert np.all(out.ordinates == 0)

    def test_linearity(self):
        g = FrequencyGrid(cutoff=5.0, points=512)
        f = lambda u: np.exp(-u ** 2)
        h = lambda u: 1.0 / (1.0 + u ** 2)
        x = np.linspace(-1, 1, 11)
        combo = inverse_fourier(lambda u: 2.0 * f(u) - 3.0 * h(u), g, x).ordinates
        parts = 2.0 * inverse_fourier(f, g, x).ordinates - 3.0 * inverse_fourier(h, g, x).ordinates
        assert np.allclose(combo, parts, rtol=0, atol=1e-14)

    def test_hermitian_spectrum_gives_real_output(self):
        g = FrequencyGrid(cutoff=8.0, points=1024)
        spectrum = lambda u: np.exp(-u ** 2) * (np.cos(u) + 1j * np.sin(u))  # = e^{-u^2+iu}
        out = inverse_fourier(spectrum, g, np.linspace(-3, 3, 21)).ordinates
        assert np.max(np.abs(out.imag)) < 1e-10 * np.max(np.abs(out.real))

    def test_grid_refinement_converges(self):
        x = np.linspace(-2, 2, 17)
        vals = []
        for k in (10, 11, 12):
            g = FrequencyGrid(cutoff=10.0, points=2 ** k)
            vals.append(inverse_fourier(lambda u: np.exp(-0.5 * u ** 2), g, x).ordinates)
        assert np.max(np.abs(vals[2] - vals[1])) < np.max(np.abs(vals[1] - vals[0])) + 1e-12
        assert np.max(np.abs(vals[2] - vals[1])) < 1e-8

    def test_accepts_precomputed_array(self):
        g = FrequencyGrid(cutoff=3.0, points=128)
        arr = np.exp(-g.u ** 2)
        a = inverse_fourier(arr, g, [0.5]).ordinates
        b = inverse_fourier(lambda u: np.exp(-u ** 2), g, [0.5]).ordinates
        assert np.allclose(a, b)


class TestSampledFunction:
    def test_requires_increasing_abscissae(self):
        with pytest.raises(InputError):
            SampledFunction(np.array([0.0, 0.0, 1.0]), np.zeros(3))

    def test_requires_matching_lengths(self):
        with pytest.raises(InputError):
            SampledFunction(np.array([0.0, 1.0]), np.zeros(3))


class TestBracketedRoot:
    def test_linear(self):
        assert bracketed_root(lambda t: t - 1.0, 0.0, 2.0, tol=1e-10) == pytest.approx(1.0, abs=1e-9)

    def test_exponential_half_level(self):
        root = bracketed_root(lambda t: math.exp(-t) - 0.5, 0.0, 2.0, tol=1e-10)
        assert root == pytest.approx(math.log(2.0), abs=1e-9)

    def test_benchmark_tail_level(self, bench_oracle):
        # right-tail intensity hits 1.5 at the frozen magnitude 0.067233
        f = lambda t: tail_integral(bench_oracle, t) - 1.5
        root = bracketed_root(f, 0.01, 1.0, tol=1e-9)
        assert root == pytest.approx(0.067233, abs=1e-4)

    def test_no_bracket_raises(self):
        with pytest.raises(NoSolutionError):
            bracketed_root(lambda t: t + 10.0, 0.0, 1.0)

    @given(root=st.floats(-5, 5))
    @settings(max_examples=25, deadline=None)
    def test_recovers_cubic_root(self, root):
        f = lambda t: (t - root) ** 3
        found = bracketed_root(f, root - 1.5, root + 2.5, tol=1e-9)
        assert found == pytest.approx(root, abs=1e-8)
