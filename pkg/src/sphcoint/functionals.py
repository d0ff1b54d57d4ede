"""Geometric functionals of excursion sets and their chaos components.

Area is the quadrature sum of the excursion indicator; boundary length traces
the level curve cell-by-cell (marching over lat-lon quadrilaterals, linear
interpolation of crossings, great-circle chords). Chaos projections and the
closed-form means/second-chaos components are used for validation and for the
cointegration and estimation layers.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .sphere import synthesize_block, hat_c_all

__all__ = [
    "FunctionalSeries",
    "hermite",
    "norm_pdf",
    "norm_cdf",
    "expected_area",
    "expected_length",
    "sigma1_true",
    "excursion_area",
    "boundary_length",
    "area_from_block",
    "length_from_block",
    "chaos_projection",
    "chaos_from_block",
    "area_series",
    "length_series",
    "chaos_series",
    "second_chaos_area",
    "second_chaos_length",
    "second_chaos_area_series",
    "second_chaos_length_series",
]

_FOUR_PI = 4.0 * np.pi


def hermite(q, x):
    """Probabilists' Hermite polynomial H_q(x) via H_{q+1} = x H_q - q H_{q-1}."""
    if q < 0:
        raise ValueError("order q must be >= 0")
    x = np.asarray(x, dtype=float)
    h_prev = np.ones_like(x)
    if q == 0:
        return h_prev if h_prev.ndim else 1.0
    h = x.copy()
    for k in range(1, q):
        h, h_prev = x * h - k * h_prev, h
    return h if h.ndim else float(h)


def norm_pdf(u):
    u = np.asarray(u, dtype=float)
    out = np.exp(-0.5 * u * u) / np.sqrt(2.0 * np.pi)
    return out if out.ndim else float(out)


def norm_cdf(u):
    return 0.5 * math.erfc(-float(u) / math.sqrt(2.0))


def expected_area(u):
    """Mean excursion area 4 pi (1 - Phi(u)) of a unit-variance Gaussian field."""
    return 2.0 * np.pi * math.erfc(float(u) / math.sqrt(2.0))


def expected_length(u, sigma1):
    """Mean boundary length sigma1 * 2 pi * exp(-u^2/2)."""
    return float(sigma1) * 2.0 * np.pi * math.exp(-0.5 * float(u) ** 2)


def sigma1_true(spec):
    """Gradient scale: sigma1^2 = sum_l (2l+1)/(4 pi) c0_l l(l+1)/2."""
    ells = np.arange(spec.band_limit + 1)
    s2 = np.sum((2 * ells + 1) * spec.c0 * ells * (ells + 1) / 2.0) / _FOUR_PI
    return float(np.sqrt(s2))


# ---------------------------------------------------------------------------
# block evaluators (values: (n_nodes, nt) ring-major)

def area_from_block(values, weights, u):
    """Excursion areas sum_i w_i 1{v_i > u} for each column."""
    return weights @ (values > u)


def _arc(th1, ph1, th2, ph2):
    """Great-circle distance between points given in (colatitude, longitude)."""
    st1, ct1 = np.sin(th1), np.cos(th1)
    st2, ct2 = np.sin(th2), np.cos(th2)
    x1, y1 = st1 * np.cos(ph1), st1 * np.sin(ph1)
    x2, y2 = st2 * np.cos(ph2), st2 * np.sin(ph2)
    dot = x1 * x2 + y1 * y2 + ct1 * ct2
    cx = y1 * ct2 - ct1 * y2
    cy = ct1 * x2 - x1 * ct2
    cz = x1 * y2 - y1 * x2
    return np.arctan2(np.sqrt(cx * cx + cy * cy + cz * cz), dot)


def length_from_block(values, grid, u, chunk=None):
    """Level-curve length per column of a synthesized block.

    Marches over the (n_theta-1) x n_phi quadrilateral cells (longitude wraps):
    edge crossings of value - u are located by linear interpolation in
    (theta, phi), joined within each cell, and measured as great-circle arcs;
    saddle cells are resolved by the sign of the cell-center average.
    """
    n_theta, n_phi = grid.n_theta, grid.n_phi
    if n_theta < 32:
        warnings.warn(f"boundary length on a grid with n_theta={n_theta} < 32 "
                      "is not accuracy-supported", stacklevel=2)
    nt = values.shape[1]
    V = values.reshape(n_theta, n_phi, nt)
    theta = grid.theta
    phi0 = grid.phi
    dphi = 2.0 * np.pi / n_phi
    jp = np.concatenate([np.arange(1, n_phi), [0]])
    if chunk is None:
        chunk = max(1, 4_000_000 // (n_theta * n_phi))
    out = np.zeros(nt)
    for lo in range(0, nt, chunk):
        hi = min(lo + chunk, nt)
        f = V[:, :, lo:hi] - u
        fa = f[:-1]
        fb = fa[:, jp]
        fc = f[1:]
        fd = fc[:, jp]
        code = ((fa > 0).astype(np.uint8)
                + 2 * (fb > 0).astype(np.uint8)
                + 4 * (fc > 0).astype(np.uint8)
                + 8 * (fd > 0).astype(np.uint8))
        mask = (code != 0) & (code != 15)
        if not mask.any():
            continue
        ci, cj, ct = np.nonzero(mask)
        a = fa[mask]; b = fb[mask]; c = fc[mask]; d = fd[mask]
        cd = code[mask]
        th_a = theta[ci]
        th_c = theta[ci + 1]
        ph_a = phi0[cj]

        def frac(f0, f1):
            den = f0 - f1
            den = np.where(den == 0.0, 1.0, den)
            return np.clip(f0 / den, 0.0, 1.0)

        t_top, p_top = th_a, ph_a + frac(a, b) * dphi
        t_bot, p_bot = th_c, ph_a + frac(c, d) * dphi
        t_lef, p_lef = th_a + frac(a, c) * (th_c - th_a), ph_a
        t_rig, p_rig = th_a + frac(b, d) * (th_c - th_a), ph_a + dphi

        center_pos = (a + b + c + d) > 0
        sad9 = cd == 9
        sad6 = cd == 6
        m_tl = (cd == 1) | (cd == 14) | (sad9 & ~center_pos) | (sad6 & center_pos)
        m_tr = (cd == 2) | (cd == 13) | (sad9 & center_pos) | (sad6 & ~center_pos)
        m_bl = (cd == 4) | (cd == 11) | (sad9 & center_pos) | (sad6 & ~center_pos)
        m_br = (cd == 8) | (cd == 7) | (sad9 & ~center_pos) | (sad6 & center_pos)
        m_lr = (cd == 3) | (cd == 12)
        m_tb = (cd == 5) | (cd == 10)

        for m_seg, (t1, p1, t2, p2) in (
            (m_tl, (t_top, p_top, t_lef, p_lef)),
            (m_tr, (t_top, p_top, t_rig, p_rig)),
            (m_bl, (t_bot, p_bot, t_lef, p_lef)),
            (m_br, (t_bot, p_bot, t_rig, p_rig)),
            (m_lr, (t_lef, p_lef, t_rig, p_rig)),
            (m_tb, (t_top, p_top, t_bot, p_bot)),
        ):
            if m_seg.any():
                arc = _arc(t1[m_seg], p1[m_seg], t2[m_seg], p2[m_seg])
                out[lo:hi] += np.bincount(ct[m_seg], weights=arc, minlength=hi - lo)
    return out


def chaos_from_block(values, weights, q):
    """Quadrature chaos projection sum_i w_i H_q(v_i) per column."""
    if q < 1:
        raise ValueError("chaos order q must be >= 1")
    return weights @ hermite(q, values)


# ---------------------------------------------------------------------------
# slice-level API

def excursion_area(field_slice, u):
    """Area of {Z > u} on the slice, in steradians."""
    return float(area_from_block(field_slice.values[:, None],
                                 field_slice.grid.weights, u)[0])


def boundary_length(field_slice, u):
    """Length of the level curve {Z = u} on the slice, in radians."""
    return float(length_from_block(field_slice.values[:, None],
                                   field_slice.grid, u)[0])


def chaos_projection(field_slice, q):
    """Integral of H_q(Z) over the sphere by quadrature."""
    return float(chaos_from_block(field_slice.values[:, None],
                                  field_slice.grid.weights, q)[0])


# ---------------------------------------------------------------------------
# series over a panel

@dataclass
class FunctionalSeries:
    """Time series of one functional with its centering metadata."""

    kind: str               # area | length | chaos | coint_residual
    T: int
    values: np.ndarray
    level: float | tuple | None = None
    q: int | None = None
    centered: bool = False
    centering_constant: float = 0.0


def _synth_chunks(panel, grid, chunk=None):
    if chunk is None:
        chunk = max(1, 6_000_000 // grid.n_nodes)
    for lo in range(0, panel.T, chunk):
        hi = min(lo + chunk, panel.T)
        yield lo, hi, synthesize_block(panel, grid, np.arange(lo, hi))


def area_series(panel, grid, u, centered=True):
    """Excursion-area series A(u; t); centering uses the analytic mean."""
    vals = np.empty(panel.T)
    w = grid.weights
    for lo, hi, block in _synth_chunks(panel, grid):
        vals[lo:hi] = area_from_block(block, w, u)
    const = expected_area(u) if centered else 0.0
    return FunctionalSeries(kind="area", T=panel.T, values=vals - const,
                            level=float(u), centered=centered,
                            centering_constant=const)


def length_series(panel, grid, u, centered=True, sigma1=None):
    """Boundary-length series L(u; t); centering uses the Kac-Rice mean."""
    vals = np.empty(panel.T)
    for lo, hi, block in _synth_chunks(panel, grid):
        vals[lo:hi] = length_from_block(block, grid, u)
    if sigma1 is None:
        sigma1 = sigma1_true(panel.spec)
    const = expected_length(u, sigma1) if centered else 0.0
    return FunctionalSeries(kind="length", T=panel.T, values=vals - const,
                            level=float(u), centered=centered,
                            centering_constant=const)


def chaos_series(panel, q, grid=None):
    """Series of the chaos projection integral H_q(Z) over the sphere.

    For q <= 2 the integral reduces exactly to panel quantities
    (integral of Z is sqrt(4 pi) a00; integral of Z^2 - 1 is
    sum_l (2l+1) Chat_l - 4 pi), which equal the grid quadrature to machine
    precision for band-limited fields. Higher orders integrate H_q(Z) on a
    grid resolving polynomial degree q*L.
    """
    if q < 1:
        raise ValueError("chaos order q must be >= 1")
    if q == 1:
        vals = np.sqrt(_FOUR_PI) * panel.coeff(0, 0)
    elif q == 2:
        ells = np.arange(panel.spec.band_limit + 1)
        vals = (2 * ells + 1) @ hat_c_all(panel) - _FOUR_PI
    else:
        if grid is None:
            from .sphere import build_grid
            need = max((q * panel.spec.band_limit + 2) // 2, 16)
            grid = build_grid(need)
        vals = np.empty(panel.T)
        w = grid.weights
        for lo, hi, block in _synth_chunks(panel, grid):
            vals[lo:hi] = chaos_from_block(block, w, q)
    return FunctionalSeries(kind="chaos", T=panel.T, values=vals, q=int(q),
                            centered=True, centering_constant=0.0)


# ---------------------------------------------------------------------------
# second-order chaos components (validation of cointegration cancellations)

def _power_excess(panel):
    """sum_l (2l+1) (Chat_l(t) - c0_l), shape (T,)."""
    ells = np.arange(panel.spec.band_limit + 1)
    wl = 2 * ells + 1
    return wl @ hat_c_all(panel) - wl @ panel.spec.c0


def second_chaos_area_series(panel, u):
    """Second chaos of the area: (u phi(u)/2) sum_l (2l+1){Chat_l - C_l}."""
    return 0.5 * u * norm_pdf(u) * _power_excess(panel)


def second_chaos_area(panel, u, t):
    return float(second_chaos_area_series(panel, u)[t - 1])


def second_chaos_length_series(panel, u, sigma1=None):
    """Second chaos of the length:

    (sigma1/2) sqrt(pi/2) phi(u) sum_l (2l+1){(u^2-1) + (lam_l/2)/sigma1^2}{Chat_l - C_l}
    with lam_l = l(l+1).
    """
    if sigma1 is None:
        sigma1 = sigma1_true(panel.spec)
    ells = np.arange(panel.spec.band_limit + 1)
    lam = ells * (ells + 1.0)
    bracket = (u * u - 1.0) + lam / (2.0 * sigma1 ** 2)
    wl = (2 * ells + 1) * bracket
    excess = hat_c_all(panel) - panel.spec.c0[:, None]
    return 0.5 * sigma1 * np.sqrt(np.pi / 2.0) * norm_pdf(u) * (wl @ excess)


def second_chaos_length(panel, u, t, sigma1=None):
    return float(second_chaos_length_series(panel, u, sigma1)[t - 1])
