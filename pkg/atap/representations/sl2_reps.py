"""Nonabelian SL(2, C) representations of the knot groups of J(2m, 2n).

In the normal form used throughout

    rho(a) = [[s, 1], [0, 1/s]],    rho(b) = [[s, 0], [2 - y, 1/s]],

with s != 0 and y != 2 a root of the Riley polynomial phi(s, y).
"""
import logging
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import FrozenSet, List, Optional, Tuple

import numpy as np

from atap.algebra.freegroup_fox import Word, build_w, power
from atap.algebra.scalar_poly import (
    DensePoly,
    cheb_coeffs,
    cheb_eval,
    poly_compose,
    poly_roots,
)
from atap.errors import DegenerateInput, InvalidParam, NoNonabelianRoots
from atap.settings import _ToleranceSettings, resolve_tolerances

Mat2 = np.ndarray

FLAG_CLOSED_FORM_SINGULAR = "closed-form-singular"
FLAG_MULTIPLICITY = "multiplicity"
FLAG_UNVERIFIED = "unverified"


@dataclass(frozen=True)
class KnotParams:
    """Selects the genus one two-bridge knot J(2m, 2n)."""
    m: int
    n: int

    def __post_init__(self):
        if self.m == 0 or self.n == 0:
            raise InvalidParam(f"J(2m,2n) needs mn != 0, got m={self.m}, n={self.n}")

    @property
    def mn(self) -> int:
        return self.m * self.n

    def __str__(self) -> str:
        return f"J({2 * self.m},{2 * self.n})"


@dataclass(frozen=True, eq=False)
class NonabelianRep:
    s: complex
    x: complex
    y: complex
    z: complex
    rho_a: Mat2
    rho_b: Mat2
    riley_residual: float
    multiplicity: int = 1
    flags: FrozenSet[str] = field(default_factory=frozenset)

    def with_flags(self, *flags: str) -> "NonabelianRep":
        return replace(self, flags=self.flags | frozenset(flags))


def s_from_x(x: complex) -> Tuple[complex, complex]:
    """Both roots of s^2 - x s + 1 = 0, larger modulus first."""
    x = complex(x)
    disc = complex(np.sqrt(complex(x * x - 4)))
    roots = [(x + disc) / 2, (x - disc) / 2]
    roots.sort(key=lambda r: (-round(abs(r), 12), round(float(np.angle(r)), 12)))
    return roots[0], roots[1]


def _read_only(M: Mat2) -> Mat2:
    M.setflags(write=False)
    return M


def rho_a(s: complex) -> Mat2:
    return np.array([[s, 1], [0, 1 / s]], dtype=complex)


def rho_b(s: complex, y: complex) -> Mat2:
    return np.array([[s, 0], [2 - y, 1 / s]], dtype=complex)


def sl2_inverse(M: Mat2) -> Mat2:
    """Inverse of a determinant one matrix (its adjugate)."""
    return np.array([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]], dtype=complex)


def evaluate_word(word: Word, image_a: Mat2, image_b: Mat2) -> Mat2:
    """rho(word) by multiplying out the syllables."""
    images = {"a": image_a, "b": image_b}
    result = np.eye(2, dtype=complex)
    for gen, exp in word.syllables:
        base = images[gen] if exp > 0 else sl2_inverse(images[gen])
        result = result @ np.linalg.matrix_power(base, abs(exp))
    return result


def rho_w_closed(m: int, s: complex, y: complex) -> Mat2:
    """rho(w) from the Chebyshev closed form of its entries."""
    s, y = complex(s), complex(y)
    s_m, s_m1 = cheb_eval(m, y), cheb_eval(m - 1, y)
    w11 = s_m ** 2 + (2 - 2 * y) * s_m * s_m1 + (1 + 2 * s ** 2 - 2 * y - s ** 2 * y + y ** 2) * s_m1 ** 2
    w12 = (1 / s - s) * s_m * s_m1 + (1 / s + s - y / s) * s_m1 ** 2
    w22 = s_m ** 2 - 2 * s_m * s_m1 + (1 + 2 / s ** 2 - y / s ** 2) * s_m1 ** 2
    return np.array([[w11, w12], [(2 - y) * w12, w22]], dtype=complex)


def trace_z(m: int, y: complex, x: complex) -> complex:
    """z = tr rho(w), which depends on s only through x = s + 1/s."""
    if m == 0:
        raise InvalidParam("w is defined for m != 0 only")
    y, x = complex(y), complex(x)
    s_m, s_m1 = cheb_eval(m, y), cheb_eval(m - 1, y)
    x2 = x * x
    return 2 * s_m ** 2 - 2 * y * s_m * s_m1 + (y * y - x2 * y + 2 * x2 - 2) * s_m1 ** 2


def _sym_square(s: complex) -> complex:
    """s^2 + s^-2."""
    return s * s + 1 / (s * s)


@lru_cache(maxsize=256)
def riley_poly(params: KnotParams, s: complex) -> DensePoly:
    """The Riley polynomial phi(s, y) as a polynomial in y."""
    s = complex(s)
    if s == 0:
        raise InvalidParam("s must be nonzero")
    m, n = params.m, params.n
    x2 = (s + 1 / s) ** 2
    y = DensePoly.linear(0, 1)
    s_m, s_m1, s_m2 = cheb_coeffs(m), cheb_coeffs(m - 1), cheb_coeffs(m - 2)

    z = 2 * s_m * s_m - 2 * y * s_m * s_m1 + (y * y - x2 * y + (2 * x2 - 2)) * s_m1 * s_m1
    bracket = 1 - (y - _sym_square(s)) * s_m1 * (s_m1 - s_m2)
    return poly_compose(cheb_coeffs(n - 2), z) - bracket * poly_compose(cheb_coeffs(n - 1), z)


def riley_value(params: KnotParams, s: complex, y: complex) -> complex:
    """phi(s, y) evaluated pointwise from the Chebyshev recurrence."""
    s, y = complex(s), complex(y)
    m, n = params.m, params.n
    z = trace_z(m, y, s + 1 / s)
    s_m1, s_m2 = cheb_eval(m - 1, y), cheb_eval(m - 2, y)
    bracket = 1 - (y - _sym_square(s)) * s_m1 * (s_m1 - s_m2)
    return cheb_eval(n - 2, z) - bracket * cheb_eval(n - 1, z)


def _relative_riley_residual(params: KnotParams, s: complex, y: complex) -> float:
    phi = riley_poly(params, s)
    return abs(phi(y)) / max(phi.norm(), 1e-300)


def make_rep(
    params: KnotParams,
    s: complex,
    y: complex,
    tolerances: Optional[_ToleranceSettings] = None
) -> NonabelianRep:
    tolerances = resolve_tolerances(tolerances)
    s, y = complex(s), complex(y)
    if s == 0:
        raise InvalidParam("s must be nonzero")
    if abs(y - 2) <= tolerances.equality:
        raise InvalidParam("y = 2 lies on the abelian locus")

    x = s + 1 / s
    flags = set()
    if abs(x * x - (y + 2)) <= tolerances.singular * max(1.0, abs(y)):
        flags.add(FLAG_CLOSED_FORM_SINGULAR)

    return NonabelianRep(
        s=s,
        x=x,
        y=y,
        z=trace_z(params.m, y, x),
        rho_a=_read_only(rho_a(s)),
        rho_b=_read_only(rho_b(s, y)),
        riley_residual=_relative_riley_residual(params, s, y),
        flags=frozenset(flags),
    )


def balance_rep(rep: NonabelianRep) -> NonabelianRep:
    """rep conjugated by diag(d, 1/d) so that rho(a)[0, 1] and rho(b)[1, 0] have equal modulus.

    Traces and every conjugation invariant are unchanged; the off-diagonal
    entries of long words stay smaller.
    """
    d2 = complex(np.sqrt(abs(rep.y - 2)))
    conj = np.array([[1, d2], [1 / d2, 1]], dtype=complex)
    return replace(rep, rho_a=_read_only(rep.rho_a * conj), rho_b=_read_only(rep.rho_b * conj))


def verify_rep(rep: NonabelianRep, params: KnotParams) -> float:
    """Sup-norm residual of rho(w^n a) - rho(b w^n), relative to max(1, |rho(w^n a)|)."""
    w_n = evaluate_word(power(build_w(params.m), params.n), rep.rho_a, rep.rho_b)
    lhs = w_n @ rep.rho_a
    rhs = rep.rho_b @ w_n
    return float(np.max(np.abs(lhs - rhs)) / max(1.0, float(np.max(np.abs(lhs)))))


def _merge_close_roots(roots: List[complex], tol: float) -> List[Tuple[complex, int]]:
    clusters: List[List[complex]] = []
    for root in roots:
        for cluster in clusters:
            if abs(cluster[0] - root) < tol * max(1.0, abs(root)):
                cluster.append(root)
                break
        else:
            clusters.append([root])
    return [(complex(np.mean(cluster)), len(cluster)) for cluster in clusters]


def riley_roots(
    params: KnotParams,
    s: complex,
    tolerances: Optional[_ToleranceSettings] = None
) -> List[NonabelianRep]:
    """One verified representation per nonabelian root y of the Riley polynomial."""
    tolerances = resolve_tolerances(tolerances)
    phi = riley_poly(params, complex(s))
    if phi.degree < 1:
        raise NoNonabelianRoots(f"Riley polynomial of {params} is constant for s={s}")

    reps = []
    for y, multiplicity in _merge_close_roots(poly_roots(phi, tolerances), tolerances.dedup):
        if abs(y - 2) <= tolerances.dedup:
            logging.debug(f"{params}: discarding root y={y:.6g} on the abelian locus")
            continue
        rep = make_rep(params, s, y, tolerances)
        if multiplicity > 1:
            logging.debug(f"{params}: merged {multiplicity} roots near y={y:.6g}")
            rep = replace(rep, multiplicity=multiplicity).with_flags(FLAG_MULTIPLICITY)
        residual = verify_rep(rep, params)
        if residual > tolerances.rep_residual:
            logging.warning(f"{params}: root y={y:.6g} fails the group relation (residual {residual:.3e})")
            rep = rep.with_flags(FLAG_UNVERIFIED)
        reps.append(rep)

    if not reps:
        raise NoNonabelianRoots(f"every Riley root of {params} at s={s} lies on the abelian locus")
    return reps


def _close(lhs: complex, rhs: complex, tol: float) -> bool:
    return abs(lhs - rhs) <= tol * max(1.0, abs(lhs), abs(rhs))


def riley_identity_values(params: KnotParams, rep: NonabelianRep, tolerances: Optional[_ToleranceSettings] = None) -> Tuple[complex, complex]:
    """(S_{n-1}(z)^2, S_{n-1}(z) S_{n-2}(z)) as predicted on the Riley variety."""
    tolerances = resolve_tolerances(tolerances)
    m = params.m
    s, y = rep.s, rep.y
    sym = _sym_square(s)
    s_m, s_m1 = cheb_eval(m, y), cheb_eval(m - 1, y)
    denom = (y - sym) * s_m1 ** 2 * (2 - sym + (y - sym) * (y - 2) * s_m1 ** 2)
    if abs(denom) < tolerances.equality:
        raise DegenerateInput(f"{params}: Riley identity denominator vanishes at y={y:.6g}")
    square = 1 / denom
    product = (1 - (y - sym) * s_m1 * (s_m - (y - 1) * s_m1)) * square
    return square, product


def riley_identity_check(
    params: KnotParams,
    rep: NonabelianRep,
    tolerances: Optional[_ToleranceSettings] = None
) -> Tuple[bool, bool]:
    """Whether S_{n-1}(z)^2 and S_{n-1}(z) S_{n-2}(z) match their Riley-variety values."""
    tolerances = resolve_tolerances(tolerances)
    square, product = riley_identity_values(params, rep, tolerances)
    s_n1, s_n2 = cheb_eval(params.n - 1, rep.z), cheb_eval(params.n - 2, rep.z)
    return (
        _close(s_n1 * s_n1, square, tolerances.root_residual),
        _close(s_n1 * s_n2, product, tolerances.root_residual),
    )
