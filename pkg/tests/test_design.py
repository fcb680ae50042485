"""Design densities, sampling determinism, and the observation model."""

import numpy as np
import pytest

from blockshrink import (
    density_from_spec,
    generate_sample,
    linear_tilt_design,
    piecewise_design,
    read_sample_csv,
    sample_design,
    uniform_design,
    write_sample_csv,
)


class TestPdf:
    def test_uniform(self):
        assert uniform_design().pdf(0.3) == 1.0

    def test_linear_tilt(self):
        g = linear_tilt_design(0.5)
        assert g.pdf(0.0) == pytest.approx(0.75)
        assert g.pdf(1.0) == pytest.approx(1.25)

    def test_piecewise(self):
        g = piecewise_design([0.5], [0.5, 1.5])
        assert g.pdf(0.7) == 1.5
        assert g.pdf(0.2) == 0.5

    def test_outside_domain(self):
        with pytest.raises(ValueError, match="outside"):
            uniform_design().pdf(1.5)

    def test_bounds_certified(self):
        for g in (uniform_design(), linear_tilt_design(0.5), piecewise_design([0.3], [0.5, 17 / 14])):
            x = np.linspace(0, 1, 4097)
            vals = g.pdf(x)
            assert g.g_min > 0
            assert np.all(vals >= g.g_min - 1e-12)
            assert np.all(vals <= g.g_max + 1e-12)

    def test_unit_mass_by_quadrature(self):
        for g in (
            uniform_design(),
            linear_tilt_design(0.5),
            linear_tilt_design(-1.2),
            piecewise_design([0.25, 0.5], [0.4, 1.2, 1.2]),
        ):
            assert abs(g.integral_check() - 1.0) < 1e-9

    def test_invalid_piecewise(self):
        with pytest.raises(ValueError, match="integrates"):
            piecewise_design([0.5], [1.0, 1.5])
        with pytest.raises(ValueError, match="positive"):
            piecewise_design([0.5], [-0.5, 2.5])

    def test_invalid_tilt(self):
        with pytest.raises(ValueError, match="nonpositive"):
            linear_tilt_design(2.0)

    def test_from_spec_strings(self):
        assert density_from_spec("uniform").kind == "uniform"
        assert density_from_spec("linear-tilt:0.5").slope == 0.5
        g = density_from_spec("piecewise:0.5:0.5,1.5")
        assert g.pdf(0.7) == 1.5
        with pytest.raises(ValueError, match="unknown density"):
            density_from_spec("cauchy")


class TestSampling:
    def test_kolmogorov_distance_uniform(self):
        n = 100_000
        x = np.sort(sample_design(uniform_design(), n, seed=77))
        i = np.arange(1, n + 1)
        ks = max(np.max(i / n - x), np.max(x - (i - 1) / n))
        assert ks <= 1.63 / np.sqrt(n)

    def test_kolmogorov_distance_tilt(self):
        n = 100_000
        g = linear_tilt_design(0.5)
        x = np.sort(sample_design(g, n, seed=78))
        cdf = (1 - 0.25) * x + 0.25 * x**2
        i = np.arange(1, n + 1)
        ks = max(np.max(i / n - cdf), np.max(cdf - (i - 1) / n))
        assert ks <= 1.63 / np.sqrt(n)

    def test_single_draw_in_range(self):
        for g in (uniform_design(), linear_tilt_design(-0.7), piecewise_design([0.5], [0.5, 1.5])):
            x = sample_design(g, 1, seed=3)
            assert 0.0 <= x[0] < 1.0

    def test_determinism(self):
        g = piecewise_design([0.5], [0.5, 1.5])
        a = sample_design(g, 1000, seed=5)
        b = sample_design(g, 1000, seed=5)
        assert np.array_equal(a, b)

    def test_needs_positive_n(self):
        with pytest.raises(ValueError):
            sample_design(uniform_design(), 0, seed=1)


class TestGenerateSample:
    def test_zero_signal_moments(self):
        n = 100_000
        s = generate_sample(lambda x: np.zeros_like(x), uniform_design(), n, seed=9)
        assert abs(s.y.mean()) <= 3.0 / np.sqrt(n)
        assert abs(s.y.var() - 1.0) < 0.05

    def test_noiseless_hook(self):
        f = lambda x: np.sin(2 * np.pi * x)  # noqa: E731
        s = generate_sample(f, uniform_design(), 500, seed=4, noiseless=True)
        assert np.array_equal(s.y, f(s.x))

    def test_repeat_same_seed(self):
        f = lambda x: x  # noqa: E731
        a = generate_sample(f, uniform_design(), 256, seed=12)
        b = generate_sample(f, uniform_design(), 256, seed=12)
        assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)

    def test_noise_independent_of_design(self):
        # same seed, different density: the noise stream must not shift
        f = lambda x: np.zeros_like(x)  # noqa: E731
        a = generate_sample(f, uniform_design(), 4096, seed=21)
        b = generate_sample(f, linear_tilt_design(0.5), 4096, seed=21)
        assert np.array_equal(a.y, b.y)
        assert not np.array_equal(a.x, b.x)

    def test_grid_values_input(self):
        vals = np.linspace(0.0, 1.0, 1 << 12)
        s = generate_sample(vals, uniform_design(), 100, seed=6, noiseless=True)
        assert np.all(np.isfinite(s.y))

    def test_csv_round_trip(self, tmp_path):
        s = generate_sample(lambda x: x, uniform_design(), 64, seed=2)
        path = tmp_path / "sample.csv"
        write_sample_csv(path, s)
        back = read_sample_csv(path)
        assert np.array_equal(back.x, s.x)
        assert np.array_equal(back.y, s.y)
