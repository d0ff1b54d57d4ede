import numpy as np
import pytest
from scipy.stats import norm

from sphcoint import (FieldSlice, MultipoleSpec, boundary_length, build_grid,
                      chaos_projection, chaos_series, excursion_area,
                      expected_area, expected_length, hermite, second_chaos_area,
                      second_chaos_area_series, second_chaos_length,
                      second_chaos_length_series, sigma1_true, simulate_panel,
                      synthesize, legendre_p_all)
from sphcoint.fgn import CoefficientPanel, fgn_autocov

from conftest import mc_sem


class TestHermite:
    def test_small_orders(self):
        assert hermite(2, 2.0) == 3.0
        assert hermite(3, 2.0) == 2.0
        assert hermite(0, 5.0) == 1.0
        assert hermite(1, -1.5) == -1.5

    def test_coefficient_table_oracle(self):
        # explicit coefficients of H_6: x^6 - 15 x^4 + 45 x^2 - 15
        x = 1.5
        explicit = x**6 - 15 * x**4 + 45 * x**2 - 15
        assert hermite(6, x) == pytest.approx(explicit, abs=1e-12)

    def test_negative_order(self):
        with pytest.raises(ValueError):
            hermite(-1, 0.0)


class TestMeans:
    def test_expected_area_values(self):
        assert expected_area(0.0) == pytest.approx(2 * np.pi, rel=1e-14)
        assert expected_area(40.0) == pytest.approx(0.0, abs=1e-12)
        # oracle: scipy normal tail
        assert expected_area(1.0) == pytest.approx(4 * np.pi * norm.sf(1.0), rel=1e-12)

    def test_expected_length_values(self):
        assert expected_length(0.0, 1.0) == pytest.approx(2 * np.pi, rel=1e-14)
        assert expected_length(0.0, np.sqrt(30)) == pytest.approx(2 * np.pi * np.sqrt(30),
                                                                  rel=1e-14)
        assert expected_length(40.0, 5.0) == pytest.approx(0.0, abs=1e-12)

    def test_sigma1_paper_config(self, paper_spec):
        # direct summation oracle: sum (2l+1) l(l+1)/2 = 3630 over l <= 10
        oracle = sum((2 * l + 1) * l * (l + 1) / 2 for l in range(11))
        assert oracle == 3630
        assert sigma1_true(paper_spec) == pytest.approx(np.sqrt(30), rel=1e-13)

    def test_sigma1_single_multipole(self):
        spec = MultipoleSpec.unit_variance(1, [0.3, 0.3], [0.0, 1.0])
        assert spec.c0[1] == pytest.approx(4 * np.pi / 3, rel=1e-14)
        assert sigma1_true(spec) == pytest.approx(1.0, rel=1e-13)

    def test_sigma1_monopole_only(self):
        spec = MultipoleSpec.unit_variance(0, [0.3])
        assert sigma1_true(spec) == 0.0


class TestArea:
    def test_full_sphere(self, paper_spec, grid16):
        panel = simulate_panel(paper_spec, 2, 3)
        field = synthesize(panel, grid16, 1)
        assert excursion_area(field, -10.0) == pytest.approx(4 * np.pi, abs=1e-9)
        assert excursion_area(field, 10.0) == 0.0

    def test_monotone_in_level(self, paper_spec, grid16):
        panel = simulate_panel(paper_spec, 2, 4)
        field = synthesize(panel, grid16, 1)
        areas = [excursion_area(field, u) for u in (-1.0, -0.2, 0.0, 0.4, 1.3)]
        assert all(a >= b - 1e-15 for a, b in zip(areas, areas[1:]))

    def test_conservation(self, paper_spec, grid16):
        panel = simulate_panel(paper_spec, 2, 5)
        field = synthesize(panel, grid16, 1)
        neg = FieldSlice(grid=grid16, t=1, values=-field.values)
        total = excursion_area(field, 0.37) + excursion_area(neg, -0.37)
        assert total == pytest.approx(4 * np.pi, abs=1e-11)

    def test_mean_mc(self, paper_spec, grid64):
        B = 300
        vals = {0.0: np.empty(B), 1.0: np.empty(B)}
        for b in range(B):
            panel = simulate_panel(paper_spec, 2, 210_000 + b)
            field = synthesize(panel, grid64, 1)
            for u in vals:
                vals[u][b] = excursion_area(field, u)
        for u, samples in vals.items():
            assert abs(samples.mean() - expected_area(u)) <= 4 * mc_sem(samples)


class TestBoundaryLength:
    def test_constant_slice(self, grid64):
        field = FieldSlice(grid=grid64, t=1, values=np.full(grid64.n_nodes, 0.5))
        assert boundary_length(field, 1.0) == 0.0

    def test_equator(self):
        grid = build_grid(128)
        field = FieldSlice(grid=grid, t=1, values=np.cos(grid.node_theta))
        length = boundary_length(field, 0.0)
        assert length == pytest.approx(2 * np.pi, rel=0.005)

    def test_negation_invariance(self, paper_spec, grid64):
        panel = simulate_panel(paper_spec, 2, 8)
        field = synthesize(panel, grid64, 1)
        neg = FieldSlice(grid=grid64, t=1, values=-field.values)
        a = boundary_length(field, 0.3)
        b = boundary_length(neg, -0.3)
        assert a == pytest.approx(b, abs=1e-6)

    def test_refinement_contraction(self, paper_spec):
        # successive halvings of the grid spacing contract the change by >= 1.7
        panel = simulate_panel(paper_spec, 2, 9)
        lengths = {}
        for n in (32, 64, 128, 256):
            grid = build_grid(n)
            lengths[n] = boundary_length(synthesize(panel, grid, 1), 0.2)
        d1 = abs(lengths[32] - lengths[64])
        d2 = abs(lengths[64] - lengths[128])
        d3 = abs(lengths[128] - lengths[256])
        assert d1 / d2 >= 1.7
        assert d2 / d3 >= 1.7

    def test_small_grid_warns(self, paper_spec):
        grid = build_grid(8)
        panel = simulate_panel(paper_spec, 2, 10)
        field = synthesize(panel, grid, 1)
        with pytest.warns(UserWarning, match="n_theta"):
            boundary_length(field, 0.0)


class TestChaosProjection:
    def test_first_chaos_identity(self, paper_spec, grid16):
        panel = simulate_panel(paper_spec, 4, 11)
        field = synthesize(panel, grid16, 3)
        expected = np.sqrt(4 * np.pi) * panel.coeff(0, 0)[2]
        assert chaos_projection(field, 1) == pytest.approx(expected, abs=1e-8)

    def test_series_shortcuts_match_quadrature(self, small_spec, grid16):
        panel = simulate_panel(small_spec, 5, 12)
        for q in (1, 2):
            series = chaos_series(panel, q).values
            quad = np.array([chaos_projection(synthesize(panel, grid16, t), q)
                             for t in range(1, 6)])
            np.testing.assert_allclose(series, quad, atol=1e-10)

    def test_q3_grid_path(self, small_spec):
        panel = simulate_panel(small_spec, 3, 13)
        series = chaos_series(panel, 3).values
        assert np.all(np.isfinite(series))

    def test_second_chaos_mean_zero_mc(self, small_spec):
        B = 800
        samples = np.empty(B)
        for b in range(B):
            panel = simulate_panel(small_spec, 2, 260_000 + b)
            samples[b] = chaos_series(panel, 2).values[0]
        assert abs(samples.mean()) <= 3 * mc_sem(samples)

    def test_second_chaos_autocov_diagram_formula_mc(self, small_spec):
        # oracle: rho_2(1) = 2! * 8 pi^2 int Gamma(c, 1)^2 dc with
        # Gamma(c, tau) = sum_l (2l+1) C_l(tau) P_l(c) / (4 pi)
        L = small_spec.band_limit
        nodes, wts = np.polynomial.legendre.leggauss(2 * L + 2)
        p_all = legendre_p_all(L, nodes)
        c_tau = np.array([fgn_autocov(small_spec.d[l], 1, small_spec.c0[l])
                          for l in range(L + 1)])
        kernel = sum((2 * l + 1) * c_tau[l] * p_all[l] for l in range(L + 1)) / (4 * np.pi)
        oracle = 2.0 * 8.0 * np.pi ** 2 * float(wts @ kernel ** 2)
        # closed form via Legendre orthogonality for cross-checking the oracle
        closed = 2.0 * np.sum((2 * np.arange(L + 1) + 1) * c_tau ** 2)
        assert oracle == pytest.approx(closed, rel=1e-12)
        B = 1500
        prods = np.empty(B)
        for b in range(B):
            panel = simulate_panel(small_spec, 2, 300_000 + b)
            x = chaos_series(panel, 2).values
            prods[b] = x[0] * x[1]
        assert abs(prods.mean() - oracle) <= 3 * mc_sem(prods)


class TestSecondChaos:
    def test_vanishes_at_zero_level(self, small_spec):
        panel = simulate_panel(small_spec, 4, 14)
        assert second_chaos_area(panel, 0.0, 2) == 0.0

    def test_vanishes_at_mean_power(self, small_spec):
        panel = simulate_panel(small_spec, 4, 15)
        for ell in range(small_spec.band_limit + 1):
            for m in range(-ell, ell + 1):
                panel.values[CoefficientPanel.index(ell, m)] = np.sqrt(small_spec.c0[ell])
        assert abs(second_chaos_area(panel, 0.7, 1)) < 1e-12
        assert abs(second_chaos_length(panel, 0.7, 1)) < 1e-12

    def test_length_bracket_equals_one_at_u_star(self):
        # at u* the leading-multipole bracket {(u^2-1) + (lam/2)/sigma1^2} is 1
        spec = MultipoleSpec.unit_variance(3, [0.1, 0.1, 0.45, 0.1])
        s1 = sigma1_true(spec)
        lam = 2 * 3
        u_star = np.sqrt(2 - lam / (2 * s1 ** 2))
        bracket = (u_star ** 2 - 1) + lam / (2 * s1 ** 2)
        assert bracket == pytest.approx(1.0, rel=1e-12)

    def test_series_consistent_with_scalar(self, small_spec):
        panel = simulate_panel(small_spec, 5, 16)
        series_a = second_chaos_area_series(panel, 0.4)
        series_l = second_chaos_length_series(panel, 0.4)
        for t in (1, 3, 5):
            assert series_a[t - 1] == second_chaos_area(panel, 0.4, t)
            assert series_l[t - 1] == second_chaos_length(panel, 0.4, t)


class TestKacRiceLink:
    def test_length_mean_mc_small(self, paper_spec):
        # modest-scale check of the Kac-Rice mean (the acceptance suite runs
        # the pinned n_theta=256 version)
        grid = build_grid(96)
        B = 60
        samples = np.empty(B)
        for b in range(B):
            panel = simulate_panel(paper_spec, 2, 410_000 + b)
            samples[b] = boundary_length(synthesize(panel, grid, 1), 0.0)
        target = expected_length(0.0, np.sqrt(30))
        assert abs(samples.mean() - target) / target < 0.03
