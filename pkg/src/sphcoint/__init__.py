"""Long-memory Gaussian fields on the sphere cross time: simulation of
harmonic-coefficient panels, excursion-set geometric functionals, fractional
cointegration of level vectors, and narrow-band estimation of the gradient
scale, with a Monte Carlo harness reproducing the decay-rate tables."""

__version__ = "0.1.0"

from .fgn import (MultipoleSpec, CoefficientPanel, fgn_autocov, simulate_fgn,
                  simulate_fgn_cholesky, splitmix64, coefficient_rng,
                  simulate_panel)
from .sphere import (SphereGrid, FieldSlice, build_grid, legendre_p,
                     legendre_p_all, norm_assoc_legendre, eval_sph_harm,
                     synthesize, synthesize_block, field_at_north_pole,
                     hat_c_ell, hat_c_all)
from .functionals import (FunctionalSeries, hermite, norm_pdf, norm_cdf,
                          expected_area, expected_length, sigma1_true,
                          excursion_area, boundary_length, chaos_projection,
                          area_series, length_series, chaos_series,
                          second_chaos_area, second_chaos_length,
                          second_chaos_area_series, second_chaos_length_series)
from .coint import (CointBasis, gamma1, gamma1_tilde, qstar, xa_matrix,
                    coint_basis, gamma2_three, length_coint_space,
                    joint_coint_space, residual_series)
from .spectral import (SpectralEstimate, LongMemoryModel, ProbeSummary, dft,
                       dft_all, periodogram, averaged_periodogram, nbls,
                       estimate_sigma1_case_a, u_star, estimate_sigma1_case_b,
                       d_q, l_q_constant, tauberian_constant, f_q_model,
                       F_q_model, gamma_function, conjecture_probe)
from .memest import DecayFit, autocov, autocov_upto, lag_cutoff, logreg_decay
from .harness import (ConfigError, ExperimentConfig, McSummary, load_config,
                      parse_config_text, run_mc, write_outputs, naive_sigma1,
                      tables_text)

__all__ = [name for name in dir() if not name.startswith("_")]
