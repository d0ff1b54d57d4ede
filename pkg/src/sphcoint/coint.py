"""Cointegrating constraint matrices and spaces for the excursion functionals.

A vector of functionals evaluated at several levels shares chaos components
up to level-dependent scalar loadings; the matrices built here collect those
loading vectors, and the cointegrating space is the orthonormal left-nullspace
(vectors annihilating every loading row).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .functionals import FunctionalSeries, hermite, norm_pdf

__all__ = [
    "CointBasis",
    "gamma1",
    "gamma1_tilde",
    "qstar",
    "xa_matrix",
    "coint_basis",
    "gamma2_three",
    "length_coint_space",
    "joint_coint_space",
    "residual_series",
]

_NULLSPACE_RTOL = 1e-10
_ANNIHILATION_TOL = 1e-10


@dataclass
class CointBasis:
    """Constraint rows plus an orthonormal basis of their annihilator space."""

    constraint_matrix: np.ndarray
    basis: np.ndarray          # rows orthonormal, basis @ constraint.T ~ 0
    case_label: str = ""
    levels: tuple = ()

    @property
    def dimension(self):
        return self.basis.shape[0]

    @property
    def rank(self):
        return self.constraint_matrix.shape[1] - self.basis.shape[0]

    def annihilation_error(self):
        if self.basis.size == 0:
            return 0.0
        return float(np.abs(self.basis @ self.constraint_matrix.T).max())


def _check_levels(levels, min_p, nonzero=False, distinct=True):
    u = np.asarray(levels, dtype=float)
    if u.size < min_p:
        raise ValueError(f"need at least {min_p} levels, got {u.size}")
    if distinct and np.unique(u).size != u.size:
        raise ValueError("levels must be pairwise distinct")
    if nonzero and np.any(u == 0.0):
        raise ValueError("levels must be nonzero")
    return u


def gamma1(levels):
    """First-chaos cancelling matrix: row i = e_1 - (phi(u_1)/phi(u_{i+1})) e_{i+1}."""
    u = _check_levels(levels, 2)
    p = u.size
    phi = norm_pdf(u)
    out = np.zeros((p - 1, p))
    out[:, 0] = 1.0
    for i in range(1, p):
        out[i - 1, i] = -phi[0] / phi[i]
    return out


def gamma1_tilde(levels):
    """Second-chaos cancelling matrix: weights u phi(u) in place of phi(u).

    Levels must be nonzero (the ratio divides by u_i phi(u_i)).
    """
    u = _check_levels(levels, 2, nonzero=True)
    p = u.size
    w = u * norm_pdf(u)
    out = np.zeros((p - 1, p))
    out[:, 0] = 1.0
    for i in range(1, p):
        out[i - 1, i] = -w[0] / w[i]
    return out


def qstar(d_star):
    """Smallest chaos order whose covariance power decays summably: floor(1/(1-2d)) + 1."""
    if not 0.0 < d_star < 0.5:
        raise ValueError(f"d_star must lie in (0, 1/2), got {d_star}")
    return int(np.floor(1.0 / (1.0 - 2.0 * d_star))) + 1


def xa_matrix(levels, q):
    """Hermite loading matrix, row k = (phi(u_j) H_k(u_j))_j for k = 0..q."""
    u = _check_levels(levels, 1)
    if u.size < q + 2:
        warnings.warn(f"only {u.size} levels for q={q}: the annihilator space is "
                      "generically empty (need p >= q+2)", stacklevel=2)
    phi = norm_pdf(u)
    return np.vstack([phi * hermite(k, u) for k in range(q + 1)])


def coint_basis(constraint_matrix, case_label="", levels=()):
    """Orthonormal basis of {gamma : constraint @ gamma = 0} via SVD.

    Singular values below 1e-10 times the largest are treated as zero; a
    near-singular constraint (smallest kept singular value within 1e-6 of the
    cut) triggers a warning with the condition estimate.
    """
    mat = np.atleast_2d(np.asarray(constraint_matrix, dtype=float))
    if mat.size == 0:
        raise ValueError("constraint matrix must be nonempty")
    _, s, vt = np.linalg.svd(mat)
    smax = s[0] if s.size else 0.0
    cut = _NULLSPACE_RTOL * smax
    rank = int((s > cut).sum())
    kept = s[s > cut]
    if kept.size and smax > 0 and kept[-1] / smax < 1e-6:
        warnings.warn(f"constraint matrix is near-singular "
                      f"(condition estimate {smax / kept[-1]:.2e})", stacklevel=2)
    basis = vt[rank:]
    out = CointBasis(constraint_matrix=mat, basis=basis,
                     case_label=case_label, levels=tuple(np.ravel(levels)))
    err = out.annihilation_error()
    if err > _ANNIHILATION_TOL:
        raise AssertionError(f"nullspace annihilation residual {err:.2e} exceeds tolerance")
    return out


def gamma2_three(u1, u2, u3):
    """Three-level vector cancelling the first two chaoses of the area vector."""
    if u2 == u3:
        raise ValueError("u2 and u3 must differ (H_1 values coincide)")
    phi1, phi2, phi3 = norm_pdf(u1), norm_pdf(u2), norm_pdf(u3)
    h1, h2, h3 = u1, u2, u3  # H_1(u) = u
    ratio = (h1 - h3) / (h3 - h2)
    ratio2 = (h1 - h2) / (h3 - h2)
    return np.array([1.0, (phi1 / phi2) * ratio, -(phi1 / phi3) * ratio2])


_LENGTH_CASES = {"a": 1, "b": 2, "boundary": 3}


def _length_rows(v, case):
    phi = norm_pdf(v)
    if case == "a":
        return np.vstack([v * phi])
    if case == "b":
        return np.vstack([phi, (v * v - 1.0) * phi])
    return np.vstack([phi, v * phi, (v * v - 1.0) * phi])


def length_coint_space(levels, case):
    """Cointegrating space of the boundary-length vector at several levels.

    case a: annihilate (v phi(v)); case b: (phi(v)) and ((v^2-1) phi(v));
    boundary: all three. Expected ranks p-1 / p-2 / p-3 are asserted.
    """
    if case not in _LENGTH_CASES:
        raise ValueError(f"case must be one of {sorted(_LENGTH_CASES)}, got {case!r}")
    n_rows = _LENGTH_CASES[case]
    # p = n_rows gives a valid (empty) space; fewer levels cannot carry the claim
    v = _check_levels(levels, n_rows, nonzero=True)
    out = coint_basis(_length_rows(v, case), case_label=f"length_case_{case}", levels=v)
    expected = v.size - n_rows
    if out.dimension != expected:
        raise ValueError(f"degenerate levels: basis dimension {out.dimension} != "
                         f"claimed {expected} for case {case!r}")
    return out


def joint_coint_space(u_levels, v_levels, case):
    """Cointegrating space of the stacked (area levels, length levels) vector.

    case a: one row (phi(u_j) | v_k phi(v_k)); case b: rows
    ((u_j^2-1) phi(u_j) | phi(v_k)) and ((u_j^2-1) phi(u_j) | (v_k^2-1) phi(v_k));
    boundary adds the case-a row on top. Expected ranks p-1 / p-2 / p-3.
    """
    if case not in _LENGTH_CASES:
        raise ValueError(f"case must be one of {sorted(_LENGTH_CASES)}, got {case!r}")
    n_rows = _LENGTH_CASES[case]
    u = np.asarray(u_levels, dtype=float)
    v = np.asarray(v_levels, dtype=float)
    if u.size + v.size < n_rows:
        raise ValueError(f"need p1 + p2 >= {n_rows} levels for case {case!r}")
    phi_u, phi_v = norm_pdf(u), norm_pdf(v)
    row_a = np.concatenate([phi_u, v * phi_v])
    row_b1 = np.concatenate([(u * u - 1.0) * phi_u, phi_v])
    row_b2 = np.concatenate([(u * u - 1.0) * phi_u, (v * v - 1.0) * phi_v])
    if case == "a":
        mat = np.vstack([row_a])
    elif case == "b":
        mat = np.vstack([row_b1, row_b2])
    else:
        mat = np.vstack([row_a, row_b1, row_b2])
    out = coint_basis(mat, case_label=f"joint_{case}",
                      levels=tuple(u) + tuple(v))
    expected = u.size + v.size - n_rows
    if out.dimension != expected:
        raise ValueError(f"degenerate levels: basis dimension {out.dimension} != "
                         f"claimed {expected} for case {case!r}")
    return out


def residual_series(series_panel, gamma):
    """t-wise combination gamma' X(t) of functional series.

    ``series_panel`` is either a (T, p) array or a sequence of p
    FunctionalSeries sharing T.
    """
    gamma = np.asarray(gamma, dtype=float)
    if isinstance(series_panel, np.ndarray):
        mat = series_panel
        levels = ()
        center = 0.0
    else:
        series = list(series_panel)
        mat = np.column_stack([s.values for s in series])
        levels = tuple(s.level for s in series)
        center = float(gamma @ np.array([s.centering_constant for s in series]))
    if mat.shape[1] != gamma.size:
        raise ValueError(f"gamma length {gamma.size} != panel width {mat.shape[1]}")
    return FunctionalSeries(kind="coint_residual", T=mat.shape[0],
                            values=mat @ gamma, level=levels or None,
                            centered=True, centering_constant=center)
