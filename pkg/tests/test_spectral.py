import math

import numpy as np
import pytest

from sphcoint import (LongMemoryModel, MultipoleSpec, averaged_periodogram,
                      conjecture_probe, d_q, dft, dft_all, estimate_sigma1_case_a,
                      estimate_sigma1_case_b, f_q_model, F_q_model,
                      gamma_function, l_q_constant, nbls, periodogram,
                      tauberian_constant, u_star)

from conftest import mc_sem


class TestDft:
    def test_constant_series_vanishes(self):
        x = np.full(64, 3.7)
        for j in (1, 5, 31):
            assert abs(dft(x, j)) < 1e-10

    def test_matches_direct_sum(self):
        rng = np.random.default_rng(4)
        x = rng.standard_normal(64)
        T = x.size
        w = dft_all(x)
        for j in (1, 7, 33, 63):
            lam = 2 * np.pi * j / T
            direct = sum(x[t - 1] * np.exp(-1j * lam * t)
                         for t in range(1, T + 1)) / np.sqrt(2 * np.pi * T)
            assert w[j] == pytest.approx(direct, abs=1e-10)
            assert dft(x, j) == pytest.approx(direct, abs=1e-10)

    def test_cosine_peaks_at_k(self):
        T, k = 64, 9
        t = np.arange(1, T + 1)
        x = np.cos(2 * np.pi * k * t / T)
        I = periodogram(x)
        assert np.argmax(I[1:T // 2 + 1]) + 1 == k

    def test_parseval(self):
        for T in (64, 1000):
            x = np.random.default_rng(T).standard_normal(T)
            lhs = 2 * np.pi / T * periodogram(x).sum()
            rhs = (x @ x) / T
            assert lhs == pytest.approx(rhs, abs=1e-10)

    def test_j_range(self):
        with pytest.raises(ValueError):
            dft(np.ones(8), 0)
        with pytest.raises(ValueError):
            dft(np.ones(8), 8)


class TestAveragedPeriodogram:
    def test_zero_series(self):
        assert averaged_periodogram(np.zeros(32), 5) == 0.0

    def test_monotone_in_m(self):
        x = np.random.default_rng(5).standard_normal(128)
        values = [averaged_periodogram(x, m) for m in range(1, 65)]
        assert all(b >= a - 1e-15 for a, b in zip(values, values[1:]))

    def test_m_range(self):
        with pytest.raises(ValueError):
            averaged_periodogram(np.ones(32), 0)
        with pytest.raises(ValueError):
            averaged_periodogram(np.ones(32), 17)

    def test_flat_spectrum_mc(self):
        # for iid N(0,1): E[Fhat(pi)] -> integral of f = 1/2
        B, T = 400, 256
        samples = np.empty(B)
        for b in range(B):
            x = np.random.default_rng(900_000 + b).standard_normal(T)
            samples[b] = averaged_periodogram(x, T // 2)
        assert abs(samples.mean() - 0.5) <= 3 * mc_sem(samples)

    def test_half_parseval_identity(self):
        # even T: Fhat(T/2) = ((1/T) sum x^2 - (2pi/T)(I(0) - I(nyquist)))/2
        x = np.random.default_rng(6).standard_normal(64)
        T = x.size
        I = periodogram(x)
        lhs = averaged_periodogram(x, T // 2)
        rhs = ((x @ x) / T - 2 * np.pi / T * (I[0] - I[T // 2])) / 2
        assert lhs == pytest.approx(rhs, abs=1e-12)
        # odd T: no Nyquist ordinate
        x = np.random.default_rng(7).standard_normal(63)
        T = x.size
        I = periodogram(x)
        lhs = averaged_periodogram(x, T // 2)
        rhs = ((x @ x) / T - 2 * np.pi / T * I[0]) / 2
        assert lhs == pytest.approx(rhs, abs=1e-12)


class TestNbls:
    def test_exact_scaling(self):
        x = np.random.default_rng(7).standard_normal(128)
        assert nbls(x, 2.0 * x, 11) == pytest.approx(2.0, abs=1e-12)

    def test_shift_invariance(self):
        x = np.random.default_rng(8).standard_normal(128)
        y = 2.0 * x + 5.0
        assert nbls(x, y, 11) == pytest.approx(2.0, abs=1e-12)
        assert nbls(x + 3.0, y, 11) == pytest.approx(2.0, abs=1e-12)

    def test_scale_equivariance(self):
        rng = np.random.default_rng(9)
        x = rng.standard_normal(128)
        y = rng.standard_normal(128)
        base = nbls(x, y, 9)
        assert nbls(x, 4.0 * y, 9) == pytest.approx(4.0 * base, rel=1e-12)

    def test_constant_regressor_rejected(self):
        with pytest.raises(ValueError, match="power"):
            nbls(np.full(64, 2.0), np.ones(64), 5)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            nbls(np.ones(16), np.ones(17), 3)


class TestSigma1Estimators:
    def test_case_a_exact_inversion(self):
        sigma1, u = np.sqrt(30.0), 0.1
        x = np.random.default_rng(10).standard_normal(512)
        beta = sigma1 * u * np.sqrt(np.pi / 2.0)
        for m in (4, 16, 64):
            est = estimate_sigma1_case_a(x, beta * x, u, m)
            assert est.sigma1_hat == pytest.approx(sigma1, abs=1e-10)
            assert est.case_label == "a"
            assert est.f_hat >= 0.0

    def test_case_a_zero_level_rejected(self):
        x = np.random.default_rng(11).standard_normal(64)
        with pytest.raises(ValueError):
            estimate_sigma1_case_a(x, x, 0.0, 5)

    def test_u_star_values(self):
        ell = 3
        lam = ell * (ell + 1)
        assert u_star(np.sqrt(lam / 2.0), ell) == pytest.approx(1.0, rel=1e-12)
        with pytest.raises(ValueError):
            u_star(np.sqrt(lam / 4.0), ell)

    def test_case_b_exact_inversion(self):
        sigma1 = np.sqrt(30.0)
        us = u_star(sigma1, 2)
        alpha = sigma1 * np.sqrt(np.pi / 2.0) / us
        x = np.random.default_rng(12).standard_normal(512)
        est = estimate_sigma1_case_b(x, alpha * x, us, 16)
        assert est.sigma1_hat == pytest.approx(sigma1, abs=1e-10)
        assert est.case_label == "b"


class TestModel:
    def test_d_q_values(self):
        assert d_q(1, 0.37) == pytest.approx(0.37)
        assert d_q(2, 0.3) == pytest.approx(0.1)
        assert d_q(3, 0.3) == pytest.approx(-0.1)
        model = LongMemoryModel(q=3, d_q=d_q(3, 0.3), l_q=1.0)
        assert not model.is_long_memory

    def test_l_q_paper_values(self, paper_spec):
        assert l_q_constant(paper_spec, 1) == pytest.approx(64 * np.pi ** 3 / 121,
                                                            rel=1e-8)
        assert l_q_constant(paper_spec, 2) == pytest.approx(512 * np.pi ** 4 / 121,
                                                            rel=1e-8)

    def test_l_q_no_monopole_in_leading_set(self):
        spec = MultipoleSpec.unit_variance(2, [0.1, 0.3, 0.2])
        assert spec.leading_set == (1,)
        assert l_q_constant(spec, 1) == pytest.approx(0.0, abs=1e-12)

    def test_l_q_singleton_leading_set_q2(self):
        # symbolic value 32 pi^2 (2 l0 + 1) C^2 for a single leading multipole
        spec = MultipoleSpec.unit_variance(3, [0.1, 0.1, 0.4, 0.1])
        (l0,) = spec.leading_set
        c = spec.c0[l0]
        expected = 32 * np.pi ** 2 * (2 * l0 + 1) * c ** 2
        assert l_q_constant(spec, 2) == pytest.approx(expected, rel=1e-12)

    def test_tauberian_constant_closed_form(self, paper_spec):
        # q=1: the chaos series is sqrt(4pi) a00, whose lag asymptote is
        # 4 pi gamma0 d (2d+1) tau^{2d-1}
        d = 0.3
        expected = 4 * np.pi * paper_spec.c0[0] * d * (2 * d + 1)
        assert tauberian_constant(paper_spec, 1) == pytest.approx(expected, rel=1e-10)

    def test_gamma_function_accuracy(self):
        xs = np.linspace(0.02, 2.0, 200)
        worst = max(abs(gamma_function(x) - math.gamma(x)) / math.gamma(x) for x in xs)
        assert worst <= 1e-10

    def test_f_F_ratio_identity(self):
        model = LongMemoryModel(q=2, d_q=0.1, l_q=412.177)
        lam = 0.17
        ratio = F_q_model(lam, model) / (lam * f_q_model(lam, model))
        assert ratio == pytest.approx(1.0 / (1.0 - 2 * model.d_q), rel=1e-12)

    def test_f_q_reference_value(self):
        # independent Gamma implementation: math.gamma
        model = LongMemoryModel(q=2, d_q=0.1, l_q=412.177)
        lam = 0.1
        expected = (math.gamma(0.2) * 412.177 * math.sin(0.4 * math.pi)
                    * lam ** -0.2 / math.pi)
        assert f_q_model(lam, model) == pytest.approx(expected, rel=1e-10)

    def test_F_vanishes_at_origin(self):
        model = LongMemoryModel(q=1, d_q=0.3, l_q=1.0)
        assert F_q_model(1e-12, model) < 1e-4
        with pytest.raises(ValueError):
            F_q_model(0.0, model)

    def test_invalid_memory_rejected(self):
        model = LongMemoryModel(q=3, d_q=-0.1, l_q=1.0)
        with pytest.raises(ValueError):
            f_q_model(0.1, model)


class TestProbe:
    def test_invalid_order_rejected(self, paper_spec):
        with pytest.raises(ValueError, match="long memory"):
            conjecture_probe(paper_spec, 3, 64, 4, 2)

    def test_small_run_reports(self, small_spec):
        out = conjecture_probe(small_spec, 1, 64, 8, 4, master_seed=5)
        assert out.ratios.shape == (4,)
        assert np.all(out.ratios > 0)
        assert out.q25 <= out.median <= out.q75
