"""DFT/periodogram machinery, narrow-band least squares, gradient-scale
estimators, and the long-memory spectral model for chaos projections."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fgn import simulate_panel
from .functionals import FunctionalSeries, chaos_series
from .sphere import legendre_p_all

__all__ = [
    "SpectralEstimate",
    "LongMemoryModel",
    "ProbeSummary",
    "dft",
    "dft_all",
    "periodogram",
    "averaged_periodogram",
    "nbls",
    "estimate_sigma1_case_a",
    "u_star",
    "estimate_sigma1_case_b",
    "d_q",
    "l_q_constant",
    "tauberian_constant",
    "f_q_model",
    "F_q_model",
    "gamma_function",
    "conjecture_probe",
]

_FOUR_PI = 4.0 * np.pi
_SQRT_2_OVER_PI = np.sqrt(2.0 / np.pi)


def _values(series):
    return series.values if isinstance(series, FunctionalSeries) else np.asarray(series, dtype=float)


def dft_all(series):
    """w(lambda_j) = (1/sqrt(2 pi T)) sum_{t=1..T} x_t exp(-i lambda_j t), j = 0..T-1.

    Computed with one FFT; the series is indexed t = 1..T, hence the
    unit-lag phase factor relative to the raw FFT.
    """
    x = _values(series)
    T = x.size
    lam = 2.0 * np.pi * np.arange(T) / T
    return np.exp(-1j * lam) * np.fft.fft(x) / np.sqrt(2.0 * np.pi * T)


def dft(series, j):
    """Single discrete Fourier ordinate at lambda_j = 2 pi j / T, 1 <= j <= T-1."""
    x = _values(series)
    T = x.size
    if not 1 <= j <= T - 1:
        raise ValueError(f"frequency index j must lie in 1..{T - 1}, got {j}")
    lam = 2.0 * np.pi * j / T
    t = np.arange(1, T + 1)
    return complex(np.exp(-1j * lam * t) @ x / np.sqrt(2.0 * np.pi * T))


def periodogram(series):
    """I(lambda_j) = |w(lambda_j)|^2 for j = 0..T-1."""
    w = dft_all(series)
    return (w * w.conj()).real


def averaged_periodogram(series, m):
    """Fhat(lambda_m) = (2 pi / T) sum_{j=1..m} I(lambda_j)."""
    x = _values(series)
    T = x.size
    if not 1 <= m <= T // 2:
        raise ValueError(f"bandwidth m must lie in 1..{T // 2}, got {m}")
    return float(2.0 * np.pi / T * periodogram(x)[1:m + 1].sum())


def nbls(x_series, y_series, m):
    """Narrow-band least-squares slope over the first m Fourier frequencies.

    Re sum_j w_x conj(w_y) / sum_j |w_x|^2; the zero frequency is excluded, so
    the slope is invariant to constant shifts of either series.
    """
    x = _values(x_series)
    y = _values(y_series)
    if x.size != y.size:
        raise ValueError("series lengths differ")
    T = x.size
    if not 1 <= m <= T // 2:
        raise ValueError(f"bandwidth m must lie in 1..{T // 2}, got {m}")
    wx = dft_all(x)[1:m + 1]
    wy = dft_all(y)[1:m + 1]
    denom = float((wx * wx.conj()).real.sum())
    if denom <= 0.0:
        raise ValueError("regressor has no power at the first m frequencies "
                         "(constant series?)")
    return float((wx * wy.conj()).real.sum()) / denom


@dataclass
class SpectralEstimate:
    """Narrow-band regression record for one gradient-scale estimate."""

    m: int
    lambda_m: float
    f_hat: float           # averaged periodogram of the regressor
    slope: float           # NBLS slope (beta-hat in case a, alpha-hat in case b)
    sigma1_hat: float
    case_label: str
    level: float

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("bandwidth m must be >= 1")
        if self.f_hat < 0:
            raise ValueError("averaged periodogram must be nonnegative")


def estimate_sigma1_case_a(area_series, length_series, u, m):
    """Gradient scale from the first-chaos regression of length on area.

    At level u != 0 the leading chaos gives length = sigma1 * u * sqrt(pi/2)
    times area (both centered with analytic means), so
    sigma1_hat = sqrt(2/pi) * beta_hat / u.
    """
    u = float(u)
    if u == 0.0:
        raise ValueError("case a requires u != 0 (the regression slope vanishes)")
    x = _values(area_series)
    slope = nbls(x, length_series, m)
    T = x.size
    return SpectralEstimate(
        m=int(m), lambda_m=2.0 * np.pi * m / T,
        f_hat=averaged_periodogram(x, m),
        slope=slope,
        sigma1_hat=_SQRT_2_OVER_PI * slope / u,
        case_label="a", level=u)


def u_star(sigma1, ell_star):
    """Level at which the leading-multipole second-chaos bracket equals one."""
    lam = float(ell_star) * (float(ell_star) + 1.0)
    radicand = 2.0 - lam / (2.0 * float(sigma1) ** 2)
    if radicand <= 0.0:
        raise ValueError(f"nonpositive radicand 2 - lam/(2 sigma1^2) = {radicand:.6g}")
    return float(np.sqrt(radicand))


def estimate_sigma1_case_b(area_series, length_series, u_star_value, m):
    """Gradient scale from the leading-multipole second-chaos regression.

    At u = u* the second-chaos loadings give length = sigma1 sqrt(pi/2)/u*
    times area, so sigma1_hat = u* sqrt(2/pi) * alpha_hat.
    """
    us = float(u_star_value)
    x = _values(area_series)
    slope = nbls(x, length_series, m)
    T = x.size
    return SpectralEstimate(
        m=int(m), lambda_m=2.0 * np.pi * m / T,
        f_hat=averaged_periodogram(x, m),
        slope=slope,
        sigma1_hat=us * _SQRT_2_OVER_PI * slope,
        case_label="b", level=us)


# ---------------------------------------------------------------------------
# long-memory spectral model for chaos projections

def d_q(q, d_tilde_star):
    """Memory of the order-q chaos projection: q d - (q-1)/2."""
    if q < 1:
        raise ValueError("chaos order q must be >= 1")
    return float(q * d_tilde_star - (q - 1) / 2.0)


@dataclass
class LongMemoryModel:
    """Power-law spectral model f(lambda) ~ const * lambda^{-2 d_q}."""

    q: int
    d_q: float
    l_q: float             # multiplicative lag-domain constant

    @property
    def is_long_memory(self):
        return 0.0 < self.d_q < 0.5

    @classmethod
    def for_chaos(cls, spec, q):
        """Model of the order-q chaos projection of an fGN coefficient panel."""
        return cls(q=int(q), d_q=d_q(q, spec.d_leading),
                   l_q=tauberian_constant(spec, q))


def l_q_constant(spec, q):
    """Angular constant q! * 8 pi^2 * int (sum_{leading l} (2l+1) C_l P_l(c))^q dc.

    Gauss-Legendre quadrature with q*L+1 nodes (exact, polynomial integrand).
    """
    if q < 1:
        raise ValueError("chaos order q must be >= 1")
    L = spec.band_limit
    nodes, weights = np.polynomial.legendre.leggauss(q * L + 1)
    p_all = legendre_p_all(L, nodes)
    lead = spec.leading_set
    kernel = np.zeros_like(nodes)
    for l in lead:
        kernel += (2 * l + 1) * spec.c0[l] * p_all[l]
    integral = float(weights @ kernel ** q)
    return float(math.factorial(q)) * 8.0 * np.pi ** 2 * integral


def tauberian_constant(spec, q):
    """Lag-domain constant of the order-q chaos autocovariance.

    rho_q(tau) ~ K_q tau^{2 d_q - 1} for the fGN panel: the angular constant
    divided by (4 pi)^q (covariance normalization) times [d(2d+1)]^q (the fGN
    lag asymptote per leading multipole).
    """
    d = spec.d_leading
    factor = (d * (2.0 * d + 1.0) / _FOUR_PI) ** q
    return l_q_constant(spec, q) * factor


_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma_function(x):
    """Gamma function by the Lanczos approximation (g = 7, 9 coefficients)."""
    x = float(x)
    if x < 0.5:
        return np.pi / (np.sin(np.pi * x) * gamma_function(1.0 - x))
    x -= 1.0
    acc = _LANCZOS_COEF[0]
    for i, c in enumerate(_LANCZOS_COEF[1:], start=1):
        acc += c / (x + i)
    t = x + _LANCZOS_G + 0.5
    return float(np.sqrt(2.0 * np.pi) * t ** (x + 0.5) * np.exp(-t) * acc)


def _model_prefactor(model):
    if not model.is_long_memory:
        raise ValueError(f"model is not long memory: d_q = {model.d_q:.4g} "
                         "must lie in (0, 1/2)")
    dq = model.d_q
    return (gamma_function(2.0 * dq) * model.l_q
            * np.sin(np.pi * (1.0 - 2.0 * dq) / 2.0) / np.pi)


def f_q_model(lam, model):
    """Model spectral density: pi^{-1} Gamma(2d) L sin(pi(1-2d)/2) lambda^{-2d}."""
    lam = float(lam)
    if not 0.0 < lam <= np.pi:
        raise ValueError(f"lambda must lie in (0, pi], got {lam}")
    return _model_prefactor(model) * lam ** (-2.0 * model.d_q)


def F_q_model(lam, model):
    """Integral of the model spectral density on (0, lambda]."""
    lam = float(lam)
    if not 0.0 < lam <= np.pi:
        raise ValueError(f"lambda must lie in (0, pi], got {lam}")
    dq = model.d_q
    return _model_prefactor(model) * lam ** (1.0 - 2.0 * dq) / (1.0 - 2.0 * dq)


@dataclass
class ProbeSummary:
    """Distribution summary of the averaged-periodogram ratio (no pass/fail)."""

    q: int
    T: int
    m: int
    B: int
    ratios: np.ndarray
    median: float
    q25: float
    q75: float

    @property
    def iqr(self):
        return self.q75 - self.q25


def conjecture_probe(spec, q, T, m, B, master_seed=0, grid=None):
    """Empirical distribution of Fhat_q(lambda_m) / F_q(lambda_m).

    Simulates B coefficient panels, forms the order-q chaos projection series,
    and compares its averaged periodogram with the model integral. Reports
    median and quartiles; interpretation is left to the caller.
    """
    model = LongMemoryModel.for_chaos(spec, q)
    if not model.is_long_memory:
        raise ValueError(f"d_q = {model.d_q:.4g} outside (0, 1/2): the order-{q} "
                         "projection is not long memory for this spec")
    if model.l_q <= 0:
        raise ValueError("model constant vanishes for this spec (no leading "
                         "contribution survives integration)")
    lam_m = 2.0 * np.pi * m / T
    denom = F_q_model(lam_m, model)
    ratios = np.empty(B)
    for b in range(B):
        panel = simulate_panel(spec, T, master_seed, replication=b)
        x = chaos_series(panel, q, grid=grid).values
        ratios[b] = averaged_periodogram(x, m) / denom
    return ProbeSummary(q=int(q), T=int(T), m=int(m), B=int(B), ratios=ratios,
                        median=float(np.median(ratios)),
                        q25=float(np.percentile(ratios, 25)),
                        q75=float(np.percentile(ratios, 75)))
