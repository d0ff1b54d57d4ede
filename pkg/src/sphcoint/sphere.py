"""Quadrature grid on the sphere, real spherical harmonics, field synthesis.

The grid is Gauss-Legendre in cos(theta) with 2*n_theta equispaced longitudes
per ring, so band-limited integrands of degree <= 2*n_theta - 1 are integrated
exactly and the weights sum to 4 pi.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fgn import CoefficientPanel

__all__ = [
    "SphereGrid",
    "FieldSlice",
    "build_grid",
    "legendre_p",
    "legendre_p_all",
    "norm_assoc_legendre",
    "eval_sph_harm",
    "synthesize",
    "synthesize_block",
    "field_at_north_pole",
    "hat_c_ell",
    "hat_c_all",
]

_FOUR_PI = 4.0 * np.pi


def legendre_p(ell, x):
    """Legendre polynomial P_ell(x) by the three-term recurrence. Vectorized in x."""
    if ell < 0:
        raise ValueError("degree must be >= 0")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1 + 1e-12):
        raise ValueError("argument must lie in [-1, 1]")
    out = legendre_p_all(ell, x)[ell]
    return out if out.ndim else float(out)


def legendre_p_all(L, x):
    """All Legendre polynomials P_0..P_L at x, shape (L+1,) + x.shape."""
    x = np.asarray(x, dtype=float)
    out = np.empty((L + 1,) + x.shape)
    out[0] = 1.0
    if L >= 1:
        out[1] = x
    for l in range(1, L):
        out[l + 1] = ((2 * l + 1) * x * out[l] - l * out[l - 1]) / (l + 1)
    return out


def norm_assoc_legendre(L, x):
    """Orthonormalized associated Legendre values, m-then-l recurrence.

    Returns a list ``tabs`` with ``tabs[m][..., j]`` holding
    Pbar_{m+j, m}(x) for j = 0..L-m, where Pbar_{lm} includes the full
    orthonormalization constant sqrt((2l+1)/(4 pi) (l-m)!/(l+m)!) and the
    Condon-Shortley phase. Stable to moderate degree (normalization applied
    inside the recurrence, no factorial overflow).
    """
    x = np.asarray(x, dtype=float)
    s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    tabs = []
    pmm = np.full(x.shape, 1.0 / np.sqrt(_FOUR_PI))
    for m in range(L + 1):
        cols = np.empty(x.shape + (L - m + 1,))
        cols[..., 0] = pmm
        if m + 1 <= L:
            cols[..., 1] = np.sqrt(2 * m + 3.0) * x * pmm
        for l in range(m + 2, L + 1):
            a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            cols[..., l - m] = a * (x * cols[..., l - m - 1] - b * cols[..., l - m - 2])
        tabs.append(cols)
        if m < L:
            pmm = -np.sqrt((2 * m + 3.0) / (2 * m + 2.0)) * s * pmm
    return tabs


def eval_sph_harm(ell, m, theta, phi):
    """Real orthonormal spherical harmonic Y_lm at (theta, phi).

    m = 0: Pbar_l0(cos theta); m > 0: sqrt(2) Pbar_lm cos(m phi);
    m < 0: sqrt(2) Pbar_l|m| sin(|m| phi).
    """
    if abs(m) > ell:
        raise ValueError(f"|m| must be <= l, got l={ell}, m={m}")
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    am = abs(m)
    pbar = norm_assoc_legendre(ell, np.cos(theta))[am][..., ell - am]
    if m == 0:
        out = pbar
    elif m > 0:
        out = np.sqrt(2.0) * pbar * np.cos(m * phi)
    else:
        out = np.sqrt(2.0) * pbar * np.sin(am * phi)
    return out if out.ndim else float(out)


@dataclass
class SphereGrid:
    """Iso-latitude Gauss-Legendre grid; nodes are ring-major (theta, then phi)."""

    n_theta: int
    theta: np.ndarray          # ring colatitudes, ascending
    cos_theta: np.ndarray
    ring_weight: np.ndarray    # GL weight * (2 pi / n_phi), per node of the ring
    phi: np.ndarray
    _plans: dict = field(default_factory=dict, repr=False)

    @property
    def n_phi(self):
        return 2 * self.n_theta

    @property
    def n_nodes(self):
        return self.n_theta * self.n_phi

    @property
    def weights(self):
        """Quadrature weight per node (steradians), ring-major."""
        return np.repeat(self.ring_weight, self.n_phi)

    @property
    def node_theta(self):
        return np.repeat(self.theta, self.n_phi)

    @property
    def node_phi(self):
        return np.tile(self.phi, self.n_theta)

    def unit_vectors(self):
        th = self.node_theta
        ph = self.node_phi
        st = np.sin(th)
        return np.column_stack([st * np.cos(ph), st * np.sin(ph), np.cos(th)])

    def synthesis_plan(self, band_limit):
        """Cached per-ring Legendre tables and trig matrix for a band limit."""
        plan = self._plans.get(band_limit)
        if plan is None:
            L = band_limit
            tabs = norm_assoc_legendre(L, self.cos_theta)
            trig = np.empty((self.n_phi, 2 * L + 1))
            trig[:, 0] = 1.0
            for m in range(1, L + 1):
                trig[:, 2 * m - 1] = np.cos(m * self.phi)
                trig[:, 2 * m] = np.sin(m * self.phi)
            rows_c = [np.array([CoefficientPanel.index(l, m) for l in range(m, L + 1)])
                      for m in range(L + 1)]
            rows_s = [np.array([CoefficientPanel.index(l, -m) for l in range(m, L + 1)])
                      for m in range(L + 1)]
            plan = (tabs, trig, rows_c, rows_s)
            self._plans[band_limit] = plan
        return plan


@dataclass
class FieldSlice:
    """Field values on a grid at one time index (1-based t)."""

    grid: SphereGrid
    t: int
    values: np.ndarray


def build_grid(n_theta):
    """Gauss-Legendre grid with n_theta rings and 2*n_theta longitudes."""
    if n_theta < 2:
        raise ValueError(f"n_theta must be >= 2, got {n_theta}")
    x, w = np.polynomial.legendre.leggauss(int(n_theta))
    order = np.argsort(-x)  # theta ascending (north to south)
    x = x[order]
    w = w[order]
    n_phi = 2 * int(n_theta)
    return SphereGrid(
        n_theta=int(n_theta),
        theta=np.arccos(np.clip(x, -1.0, 1.0)),
        cos_theta=x,
        ring_weight=w * (2.0 * np.pi / n_phi),
        phi=2.0 * np.pi * np.arange(n_phi) / n_phi,
    )


def synthesize_block(panel, grid, t_index):
    """Synthesize field values for several time columns at once.

    ``t_index`` holds 0-based column indices into the panel. Returns an array
    of shape (n_nodes, len(t_index)), ring-major. Ring-wise evaluation: the
    associated-Legendre values are computed once per ring and reused across
    longitudes, so the cost is O(n_nodes * L) per slice.
    """
    L = panel.spec.band_limit
    tabs, trig, rows_c, rows_s = grid.synthesis_plan(L)
    t_index = np.atleast_1d(np.asarray(t_index, dtype=int))
    nt = t_index.size
    n_theta, n_phi = grid.n_theta, grid.n_phi
    sqrt2 = np.sqrt(2.0)
    G = np.empty((n_theta, 2 * L + 1, nt))
    A = panel.values
    G[:, 0, :] = tabs[0] @ A[rows_c[0]][:, t_index]
    for m in range(1, L + 1):
        G[:, 2 * m - 1, :] = sqrt2 * (tabs[m] @ A[rows_c[m]][:, t_index])
        G[:, 2 * m, :] = sqrt2 * (tabs[m] @ A[rows_s[m]][:, t_index])
    flat = G.transpose(0, 2, 1).reshape(n_theta * nt, 2 * L + 1) @ trig.T
    return flat.reshape(n_theta, nt, n_phi).transpose(0, 2, 1).reshape(grid.n_nodes, nt)


def synthesize(panel, grid, t):
    """Field slice Z(x, t) = sum_lm a_lm(t) Y_lm(x) at 1-based time t."""
    if not 1 <= t <= panel.T:
        raise ValueError(f"t must lie in 1..{panel.T}, got {t}")
    values = synthesize_block(panel, grid, [t - 1])[:, 0]
    return FieldSlice(grid=grid, t=int(t), values=values)


def field_at_north_pole(panel):
    """Series Z(N, t) at the north pole; only m = 0 harmonics contribute there."""
    L = panel.spec.band_limit
    rows = [CoefficientPanel.index(l, 0) for l in range(L + 1)]
    coeffs = np.sqrt((2 * np.arange(L + 1) + 1) / _FOUR_PI)
    return coeffs @ panel.values[rows]


def hat_c_ell(panel, ell, t):
    """Sample angular power Chat_l(t) = sum_m a_lm(t)^2 / (2l+1), 1-based t."""
    if ell > panel.spec.band_limit:
        raise ValueError(f"l must be <= band limit {panel.spec.band_limit}")
    if not 1 <= t <= panel.T:
        raise ValueError(f"t must lie in 1..{panel.T}, got {t}")
    rows = [CoefficientPanel.index(ell, m) for m in range(-ell, ell + 1)]
    a = panel.values[rows, t - 1]
    return float(a @ a) / (2 * ell + 1)


def hat_c_all(panel):
    """Sample angular power for every multipole, shape (L+1, T)."""
    L = panel.spec.band_limit
    out = np.empty((L + 1, panel.T))
    for ell in range(L + 1):
        rows = [CoefficientPanel.index(ell, m) for m in range(-ell, ell + 1)]
        a = panel.values[rows]
        out[ell] = (a * a).sum(axis=0) / (2 * ell + 1)
    return out
