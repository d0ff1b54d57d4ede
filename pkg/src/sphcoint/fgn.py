"""Exact simulation of fractional Gaussian noise and harmonic-coefficient panels.

Each spherical-harmonic coefficient a_lm(t) is a stationary zero-mean Gaussian
sequence with the fGN covariance

    C(tau) = c0/2 * (|tau+1|^{2H} + |tau-1|^{2H} - 2|tau|^{2H}),   H = d + 1/2,

long memory for d in (0, 1/2). Simulation is by circulant embedding (exact in
distribution, O(T log T)); a dense Cholesky generator is kept as an oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "MultipoleSpec",
    "CoefficientPanel",
    "fgn_autocov",
    "simulate_fgn",
    "simulate_fgn_cholesky",
    "splitmix64",
    "coefficient_rng",
    "simulate_panel",
]

_FOUR_PI = 4.0 * np.pi


def fgn_autocov(d, tau, c0=1.0):
    """Autocovariance of fractional Gaussian noise at integer lag(s) tau >= 0.

    Returns exactly c0 at tau = 0. Vectorized over tau.
    """
    if not 0.0 <= d < 0.5:
        raise ValueError(f"memory parameter d must lie in [0, 1/2), got {d}")
    if c0 < 0:
        raise ValueError(f"variance c0 must be nonnegative, got {c0}")
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(tau_arr < 0):
        raise ValueError("lag tau must be nonnegative")
    two_h = 2.0 * d + 1.0
    out = 0.5 * c0 * (np.abs(tau_arr + 1.0) ** two_h
                      + np.abs(tau_arr - 1.0) ** two_h
                      - 2.0 * np.abs(tau_arr) ** two_h)
    # lag 0 reduces to c0 algebraically; pin it to avoid roundoff
    out = np.where(tau_arr == 0, c0, out)
    return out if out.ndim else float(out)


def _embedding_eigenvalues(T, d, c0):
    """Eigenvalues of the circulant embedding (even extension padded to 2^k)."""
    n = 1 << max(int(np.ceil(np.log2(max(2 * (T - 1), 2)))), 1)
    lags = np.arange(n // 2 + 1)
    c = fgn_autocov(d, lags, c0)
    row = np.concatenate([c, c[-2:0:-1]])
    lam = np.fft.fft(row).real
    return n, lam


def simulate_fgn(T, d, c0, rng):
    """Simulate a length-T fGN path with memory d and variance c0.

    Circulant embedding: two independent standard normals per frequency, one
    FFT, real part taken. Exact in distribution provided the embedding
    eigenvalues are nonnegative, which holds for the fGN covariance; roundoff
    negatives are clipped and anything beyond tolerance is an internal error.
    """
    if T < 2:
        raise ValueError(f"series length T must be >= 2, got {T}")
    if c0 == 0.0:
        return np.zeros(T)
    n, lam = _embedding_eigenvalues(T, d, c0)
    tol = -1e-9 * lam.max()
    if lam.min() < tol:
        raise AssertionError(
            f"circulant embedding produced negative eigenvalue {lam.min():.3e} "
            f"(T={T}, d={d}); this must not happen for fGN")
    lam = np.clip(lam, 0.0, None)
    z = rng.standard_normal(2 * n).view(np.complex128)
    x = np.fft.fft(np.sqrt(lam / n) * z)
    return np.ascontiguousarray(x.real[:T])


def simulate_fgn_cholesky(T, d, c0, rng):
    """Dense-Cholesky fGN generator (test oracle; O(T^3) factor, use T <= 256)."""
    if T < 2:
        raise ValueError(f"series length T must be >= 2, got {T}")
    lags = np.arange(T)
    cov = fgn_autocov(d, np.abs(lags[:, None] - lags[None, :]), c0)
    chol = np.linalg.cholesky(cov)
    return chol @ rng.standard_normal(T)


def splitmix64(*parts):
    """Mix integers into one 64-bit seed via the SplitMix64 finalizer."""
    mask = (1 << 64) - 1
    acc = 0x9E3779B97F4A7C15
    for p in parts:
        acc = (acc + (int(p) & mask)) & mask
        z = acc
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
        acc = z ^ (z >> 31)
    return acc


def coefficient_rng(master_seed, replication, ell, m):
    """Deterministic, isolated random stream for one coefficient series."""
    return np.random.default_rng(splitmix64(master_seed, replication, ell, m + ell))


@dataclass(frozen=True)
class MultipoleSpec:
    """Band limit plus per-multipole memory parameters and variances.

    Requires the unit-variance normalization sum_l (2l+1) c0_l = 4 pi. Use
    :meth:`unit_variance` to build a spec with the normalization applied.
    """

    band_limit: int
    d: np.ndarray
    c0: np.ndarray

    def __post_init__(self):
        L = int(self.band_limit)
        if L < 0:
            raise ValueError("band limit must be >= 0")
        d = np.array(self.d, dtype=float)   # own copies: frozen below
        c0 = np.array(self.c0, dtype=float)
        if d.shape != (L + 1,) or c0.shape != (L + 1,):
            raise ValueError(f"d and c0 must have length L+1 = {L + 1}")
        if np.any(c0 < 0):
            raise ValueError("variances c0 must be nonnegative")
        active = c0 > 0
        if np.any((d[active] <= 0) | (d[active] >= 0.5)):
            raise ValueError("every d_l with c0_l > 0 must lie strictly in (0, 1/2)")
        total = float(np.sum((2 * np.arange(L + 1) + 1) * c0))
        if abs(total / _FOUR_PI - 1.0) > 1e-12:
            raise ValueError(
                f"unit-variance normalization violated: sum (2l+1) c0_l = {total:.15g}, "
                f"expected 4*pi; use MultipoleSpec.unit_variance")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "c0", c0)
        d.setflags(write=False)
        c0.setflags(write=False)

    @classmethod
    def unit_variance(cls, band_limit, d, c0_profile=None):
        """Build a spec, rescaling variances so the synthesized field has unit variance.

        ``d`` may be a scalar (same memory at every multipole) or a sequence of
        length L+1. ``c0_profile`` gives relative variances per multipole
        (default flat: c0_l = 4 pi / (L+1)^2).
        """
        L = int(band_limit)
        d_arr = np.full(L + 1, float(d)) if np.isscalar(d) else np.asarray(d, dtype=float)
        if c0_profile is None:
            profile = np.ones(L + 1)
        else:
            profile = np.asarray(c0_profile, dtype=float)
        weights = (2 * np.arange(L + 1) + 1) * profile
        total = weights.sum()
        if total <= 0:
            raise ValueError("variance profile must have positive total weight")
        return cls(L, d_arr, profile * (_FOUR_PI / total))

    @property
    def n_coeffs(self):
        return (self.band_limit + 1) ** 2

    @property
    def active(self):
        """Multipoles with nonzero variance."""
        return np.flatnonzero(self.c0 > 0)

    @property
    def d_monopole(self):
        """Memory of the l=0 coefficient (None when inactive)."""
        return float(self.d[0]) if self.c0[0] > 0 else None

    @property
    def d_multipole_max(self):
        """Largest memory among active multipoles l >= 1."""
        tail = [l for l in self.active if l >= 1]
        if not tail:
            raise ValueError("no active multipole with l >= 1")
        return float(max(self.d[l] for l in tail))

    @property
    def d_leading(self):
        """Largest memory overall: max(d_multipole_max, d_monopole)."""
        d0 = self.d_monopole
        dm = self.d_multipole_max
        return dm if d0 is None else max(dm, d0)

    @property
    def leading_set(self):
        """Active multipoles attaining the leading memory."""
        lead = self.d_leading
        return tuple(int(l) for l in self.active if abs(self.d[l] - lead) <= 1e-12)

    @property
    def d_subleading_max(self):
        """Largest memory among active multipoles outside the leading set (None if exhausted)."""
        lead = set(self.leading_set)
        rest = [float(self.d[l]) for l in self.active if int(l) not in lead]
        return max(rest) if rest else None


@dataclass
class CoefficientPanel:
    """Simulated real harmonic coefficients a_lm(t), shape ((L+1)^2, T).

    Rows are ordered by (l, m) with flat index l^2 + l + m; columns are the
    time index t = 1..T (stored 0-based).
    """

    spec: MultipoleSpec
    T: int
    values: np.ndarray
    master_seed: int = 0
    replication: int = 0
    extra: dict = field(default_factory=dict)

    @staticmethod
    def index(ell, m):
        if abs(m) > ell:
            raise ValueError(f"|m| must be <= l, got l={ell}, m={m}")
        return ell * ell + ell + m

    def coeff(self, ell, m):
        """Series a_lm(t) as a length-T view."""
        return self.values[self.index(ell, m)]


def simulate_panel(spec, T, master_seed, replication=0):
    """Simulate all (L+1)^2 coefficient series from isolated per-(l,m) streams."""
    values = np.empty((spec.n_coeffs, T))
    for ell in range(spec.band_limit + 1):
        d_l = float(spec.d[ell])
        c_l = float(spec.c0[ell])
        for m in range(-ell, ell + 1):
            rng = coefficient_rng(master_seed, replication, ell, m)
            values[CoefficientPanel.index(ell, m)] = simulate_fgn(T, d_l, c_l, rng)
    return CoefficientPanel(spec=spec, T=T, values=values,
                            master_seed=master_seed, replication=replication)
