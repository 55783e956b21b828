"""The adjoint action of SL(2, C) on sl(2, C) in the ordered basis (E, H, F).

    E = [[0, 1], [0, 0]],  H = [[1, 0], [0, -1]],  F = [[0, 0], [1, 0]]

Column j of ``ad(M)`` holds the coordinates of ``M X_j M^-1``. Besides the
direct matrix this module evaluates the Chebyshev closed forms for powers and
geometric sums of ``ad(M)`` and the constant factors that appear when the Fox
derivative of the J(2m, 2n) relator is pushed through the adjoint
representation.
"""
from typing import Optional

import numpy as np

from atap.algebra.scalar_poly import LaurentPoly, Mat3Laurent, cheb_eval
from atap.errors import DegenerateTrace, NotOnRileyVariety, NotUnimodular
from atap.representations.sl2_reps import (
    KnotParams,
    Mat2,
    NonabelianRep,
    rho_w_closed,
    riley_identity_values,
)
from atap.settings import _ToleranceSettings, resolve_tolerances

Mat3 = np.ndarray

__all__ = [
    "Mat3",
    "Mat3Laurent",
    "ad",
    "ad_power_closed",
    "ad_geom_sum_closed",
    "phi_factor_s1",
    "phi_factor_s2",
    "phi_factor_s3",
    "phi_one_minus_a",
    "phi_b_inverse_minus_one",
]


def _ad_entries(M: Mat2) -> Mat3:
    (p, q), (r, u) = M
    return np.array([
        [p * p, -2 * p * q, -q * q],
        [-p * r, p * u + q * r, q * u],
        [-r * r, 2 * r * u, u * u],
    ], dtype=complex)


def _check_unimodular(M: Mat2, tolerances: _ToleranceSettings):
    M = np.asarray(M, dtype=complex)
    if M.shape != (2, 2):
        raise NotUnimodular(f"expected a 2x2 matrix, got shape {M.shape}")
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    scale = max(1.0, float(np.max(np.abs(M))) ** 2)
    if abs(det - 1) > tolerances.equality * scale:
        raise NotUnimodular(f"det = {det:.6g} is not 1")
    return M


def ad(M: Mat2, tolerances: Optional[_ToleranceSettings] = None) -> Mat3:
    """Matrix of X -> M X M^-1 on sl(2, C)."""
    tolerances = resolve_tolerances(tolerances)
    return _ad_entries(_check_unimodular(M, tolerances))


def _power_table(e, f, g, h, p: int) -> Mat3:
    """ad(M)^p for M = [[e, f], [g, h]], with the Chebyshev index at p."""
    mu = e + h
    s_p, s_p1 = cheb_eval(p, mu), cheb_eval(p - 1, mu)
    top = s_p - h * s_p1
    bottom = s_p - e * s_p1
    return np.array([
        [top ** 2, -2 * f * s_p1 * top, -f * f * s_p1 ** 2],
        [-g * s_p1 * top, top * bottom + f * g * s_p1 ** 2, f * s_p1 * bottom],
        [-g * g * s_p1 ** 2, 2 * g * s_p1 * bottom, bottom ** 2],
    ], dtype=complex)


def _geom_sum_table(e, f, g, h, n: int, X, Y) -> Mat3:
    """(mu^2 - 4) * sum_{i<n} ad(M)^i, given X = S_{n-1}(mu)^2 and Y = S_{n-1}(mu) S_{n-2}(mu)."""
    mu = e + h
    mu2 = mu * mu
    u = 2 * X - mu * Y
    return np.array([
        [
            2 * n * f * g + h * h * u - 2 * h * (mu * X - 2 * Y) + (mu2 - 2) * X - mu * Y,
            2 * f * (n * (e - h) + h * u - mu * X + 2 * Y),
            f * f * (2 * n - u),
        ],
        [
            -g * (n * (h - e) - h * u + mu * X - 2 * Y),
            n * (e - h) ** 2 + 2 * f * g * u,
            f * (n * (e - h) + h * u - mu * X + (mu2 - 2) * Y),
        ],
        [
            g * g * (2 * n - u),
            -2 * g * (n * (h - e) - h * u + mu * X - (mu2 - 2) * Y),
            2 * n * f * g + h * h * u - 2 * h * (mu * X - (mu2 - 2) * Y) + (mu2 - 2) * X - (mu2 * mu - 3 * mu) * Y,
        ],
    ], dtype=complex)


def ad_power_closed(M: Mat2, n: int, tolerances: Optional[_ToleranceSettings] = None) -> Mat3:
    """ad(M)^n for any integer n from the Chebyshev closed form."""
    tolerances = resolve_tolerances(tolerances)
    (e, f), (g, h) = _check_unimodular(M, tolerances)
    return _power_table(e, f, g, h, n)


def ad_geom_sum_closed(M: Mat2, n: int, tolerances: Optional[_ToleranceSettings] = None) -> Mat3:
    """I + ad(M) + ... + ad(M)^(n-1); for n < 0 this is -(ad(M)^n + ... + ad(M)^-1).

    Raises DegenerateTrace when tr M is within tolerance of +-2.
    """
    tolerances = resolve_tolerances(tolerances)
    (e, f), (g, h) = _check_unimodular(M, tolerances)
    mu = e + h
    if abs(mu * mu - 4) <= tolerances.singular:
        raise DegenerateTrace(f"geometric sum closed form needs tr M != +-2, got {mu:.6g}")
    s_n1, s_n2 = cheb_eval(n - 1, mu), cheb_eval(n - 2, mu)
    return _geom_sum_table(e, f, g, h, n, s_n1 * s_n1, s_n1 * s_n2) / (mu * mu - 4)


def phi_factor_s1(
    params: KnotParams,
    rep: NonabelianRep,
    tolerances: Optional[_ToleranceSettings] = None
) -> Mat3:
    """Phi(1 + w^-1 + ... + w^-(n-1)), with the Chebyshev values in z taken from the Riley variety."""
    tolerances = resolve_tolerances(tolerances)
    if rep.riley_residual > tolerances.root_residual:
        raise NotOnRileyVariety(f"{params}: Riley residual {rep.riley_residual:.3e} at y={rep.y:.6g}")
    z = rep.z
    if abs(z * z - 4) <= tolerances.singular:
        raise DegenerateTrace(f"{params}: tr rho(w) = {z:.6g} is +-2")

    w = rho_w_closed(params.m, rep.s, rep.y)
    w11, w12, w22 = w[0, 0], w[0, 1], w[1, 1]
    X, Y = riley_identity_values(params, rep, tolerances)
    # rho(w^-1) = [[w22, -w12], [(y-2) w12, w11]]
    table = _geom_sum_table(w22, -w12, (rep.y - 2) * w12, w11, params.n, X, Y)
    return table / (z * z - 4)


def phi_factor_s2(params: KnotParams, rep: NonabelianRep) -> Mat3:
    """Phi((a^-1 b)^m); rho(a^-1 b) = [[y-1, -1/s], [-s(y-2), 1]] has trace y."""
    s, y = rep.s, rep.y
    return _power_table(y - 1, -1 / s, -s * (y - 2), 1, params.m)


def phi_factor_s3(
    params: KnotParams,
    rep: NonabelianRep,
    tolerances: Optional[_ToleranceSettings] = None
) -> Mat3:
    """Phi(1 + a b^-1 + ... + (a b^-1)^(m-1)); rho(a b^-1) has trace y."""
    tolerances = resolve_tolerances(tolerances)
    m, s, y = params.m, rep.s, rep.y
    if abs(y * y - 4) <= tolerances.singular:
        raise DegenerateTrace(f"{params}: y = {y:.6g} is +-2")

    s_m, s_m1 = cheb_eval(m, y), cheb_eval(m - 1, y)
    mix, sq = s_m * s_m1, s_m1 * s_m1
    y2 = y - 2
    table = np.array([
        [
            y2 * (2 * m + 2 * mix - y * sq),
            2 * s * y2 * (m + mix - (y + 1) * sq),
            s * s * (2 * m - y * mix + (y * y - 2) * sq),
        ],
        [
            y2 * y2 / s * (m + mix - (y + 1) * sq),
            y2 * (y2 * m + 2 * y * mix - (2 * y * y - 4) * sq),
            s * y2 * (m - (y + 1) * mix + (y * y + y - 1) * sq),
        ],
        [
            y2 * y2 / (s * s) * (2 * m - y * mix + (y * y - 2) * sq),
            2 * y2 * y2 / s * (m - (y + 1) * mix + (y * y + y - 1) * sq),
            y2 * (2 * m + (y * y - 2) * mix - (y ** 3 - 3 * y) * sq),
        ],
    ], dtype=complex)
    return table / (y * y - 4)


def phi_one_minus_a(rep: NonabelianRep) -> Mat3Laurent:
    s = rep.s
    linear = np.array([
        [-s * s, 2 * s, 1],
        [0, -1, -1 / s],
        [0, 0, -1 / (s * s)],
    ], dtype=complex)
    return Mat3Laurent.from_graded({0: np.eye(3), 1: linear})


def phi_b_inverse_minus_one(rep: NonabelianRep) -> Mat3Laurent:
    s, y = rep.s, rep.y
    inverse_t = np.array([
        [1 / (s * s), 0, 0],
        [(2 - y) / s, 1, 0],
        [-(y - 2) ** 2, 2 * s * (y - 2), s * s],
    ], dtype=complex)
    return Mat3Laurent.from_graded({-1: inverse_t, 0: -np.eye(3)})


def det_phi_b_minus_one(rep: NonabelianRep) -> LaurentPoly:
    """(t - 1)(t - s^2)(t - s^-2)."""
    s = rep.s
    return LaurentPoly.from_roots([1, s * s, 1 / (s * s)])
