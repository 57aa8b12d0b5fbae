import numpy as np
import pytest

import paritywalk as pw
from paritywalk.errors import InvalidArgumentError
from paritywalk.heuristic import chi_curve, default_gamma_grid, exhaustive_gaps


class TestDynamicCoefficient:
    def test_peak_value(self):
        assert pw.dynamic_coefficient(1.0, 1.0) == pytest.approx(0.25)

    def test_zero_gap(self):
        assert pw.dynamic_coefficient(0.0, 2.0) == 0.0

    def test_ratio_three(self):
        assert pw.dynamic_coefficient(3.0, 1.0) == pytest.approx(3.0 / 16.0)

    def test_invalid_gamma(self):
        with pytest.raises(InvalidArgumentError):
            pw.dynamic_coefficient(1.0, 0.0)
        with pytest.raises(InvalidArgumentError):
            pw.dynamic_coefficient(1.0, -1.0)

    def test_bounded_and_peaked_at_matching_gap(self):
        zetas = np.linspace(0.0, 10.0, 2001)
        chi = pw.dynamic_coefficient(zetas, 1.7)
        assert np.all(chi <= 0.25 + 1e-15)
        assert zetas[np.argmax(chi)] == pytest.approx(1.7, abs=0.005)

    def test_inverse_ratio_symmetry(self):
        for x in (0.1, 0.5, 2.0, 7.3):
            assert pw.dynamic_coefficient(x, 1.0) == pytest.approx(
                pw.dynamic_coefficient(1.0 / x, 1.0), rel=1e-12
            )


class TestSampleGaps:
    def test_flat_landscape(self, rng):
        z = pw.sample_gaps(np.full(16, 3.3), 100, rng)
        assert np.all(z == 0.0)

    def test_enumerable_gaps(self, rng):
        z = pw.sample_gaps(np.array([0.0, 2.0, 4.0, 6.0]), 500, rng)
        assert set(np.unique(z)) <= {1.0, 2.0}

    def test_deterministic_under_seed(self):
        diag = np.random.default_rng(0).normal(size=64)
        a = pw.sample_gaps(diag, 50, np.random.default_rng(9))
        b = pw.sample_gaps(diag, 50, np.random.default_rng(9))
        assert np.array_equal(a, b)

    def test_mean_matches_exhaustive_edges(self, inst4):
        diag = pw.all_energies(inst4)
        exact = exhaustive_gaps(diag)
        n = 100_000
        sampled = pw.sample_gaps(diag, n, np.random.default_rng(4))
        assert abs(sampled.mean() - exact.mean()) < 3 * exact.std() / np.sqrt(n)

    def test_requires_samples(self, rng):
        with pytest.raises(InvalidArgumentError):
            pw.sample_gaps(np.zeros(8), 0, rng)


class TestChiBar:
    def test_all_at_peak(self):
        est = pw.chi_bar(np.full(100, 0.8), 0.8)
        assert est.chi_bar == pytest.approx(0.25)

    def test_error_formula(self):
        est = pw.chi_bar(np.ones(1000), 1.0)
        assert est.err == pytest.approx(0.25 / np.sqrt(1000), abs=1e-9)
        assert est.err == pytest.approx(7.906e-3, abs=1e-5)

    def test_half_sample_linearity(self, rng):
        samples = rng.uniform(0, 4, size=200)
        full = pw.chi_bar(samples, 1.3).chi_bar
        half = 0.5 * (pw.chi_bar(samples[:100], 1.3).chi_bar
                      + pw.chi_bar(samples[100:], 1.3).chi_bar)
        assert full == pytest.approx(half, rel=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(InvalidArgumentError):
            pw.chi_bar(np.array([]), 1.0)


class TestGammaHeur:
    def test_single_sample_peaks_at_gap(self):
        grid = default_gamma_grid()
        for z in (0.35, 1.0, 2.4):
            samples = np.array([z])
            values = [pw.chi_bar(samples, g).chi_bar for g in grid]
            best = grid[int(np.argmax(values))]
            assert best == pytest.approx(grid[np.abs(grid - z).argmin()], abs=1e-12)

    def test_reproducible_bitwise(self, inst5):
        diag = pw.all_energies(inst5)
        grid = default_gamma_grid()
        a = pw.gamma_heur(diag, grid, 1000, np.random.default_rng(7))
        b = pw.gamma_heur(diag, grid, 1000, np.random.default_rng(7))
        assert a == b

    def test_scaling_covariance(self, inst5):
        diag = pw.all_energies(inst5)
        grid = default_gamma_grid()
        factor = 2.5
        a = pw.gamma_heur(diag, grid, 500, np.random.default_rng(3))
        b = pw.gamma_heur(factor * diag, factor * grid, 500, np.random.default_rng(3))
        assert b == pytest.approx(factor * a, rel=1e-12)

    def test_lhz_heuristic_exceeds_direct(self, inst5, layout5):
        direct = pw.all_energies(inst5)
        lhz = pw.physical_diagonal(inst5, layout5, 2.0)
        grid = default_gamma_grid()
        g_direct = pw.gamma_heur(direct, grid, 1000, np.random.default_rng(0))
        g_lhz = pw.gamma_heur(lhz, grid, 1000, np.random.default_rng(0))
        assert g_lhz > g_direct

    def test_needs_two_grid_points(self, inst4):
        with pytest.raises(InvalidArgumentError):
            pw.gamma_heur(pw.all_energies(inst4), np.array([1.0]), 10,
                          np.random.default_rng(0))


def test_error_scaling_slope():
    # std of chi_bar across 100 independent sample sets shrinks ~ N^(-1/2)
    diag = pw.all_energies(pw.generate_sk(4, 2))
    rng = np.random.default_rng(11)
    ns = np.array([100, 1000, 10000])
    stds = []
    for n in ns:
        vals = [pw.chi_bar(pw.sample_gaps(diag, int(n), rng), 1.0).chi_bar
                for _ in range(100)]
        stds.append(np.std(vals))
    slope = np.polyfit(np.log(ns), np.log(stds), 1)[0]
    assert -0.6 <= slope <= -0.4


def test_default_grid_matches_plotted_range():
    grid = default_gamma_grid()
    assert grid[0] == pytest.approx(0.05)
    assert grid[-1] == pytest.approx(3.2)
    assert np.allclose(np.diff(grid), 0.05)


def test_chi_curve_reuses_one_sample_set(inst4):
    diag = pw.all_energies(inst4)
    values, samples = chi_curve(diag, np.array([0.5, 1.0]), 200, np.random.default_rng(2))
    assert values[0] == pytest.approx(pw.chi_bar(samples, 0.5).chi_bar)
    assert values[1] == pytest.approx(pw.chi_bar(samples, 1.0).chi_bar)
