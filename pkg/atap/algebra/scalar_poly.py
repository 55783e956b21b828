"""Complex scalar arithmetic, dense and Laurent polynomials, Chebyshev polynomials.

Coefficient vectors are numpy complex arrays in ascending order and every ring
operation goes through ``numpy.polynomial.polynomial``. Values are immutable:
the arrays are marked read-only after construction.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from typing import Callable, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as P

from atap.errors import DegenerateInput, EvalAtZero, InexactDivision
from atap.settings import _ToleranceSettings, resolve_tolerances

Scalar = Union[complex, float, int]
_EMPTY = np.zeros(0, dtype=complex)
_ROUNDING = 64 * np.finfo(float).eps


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=complex).reshape(-1)
    arr.setflags(write=False)
    return arr


def _sup_norm(coeffs: np.ndarray) -> float:
    return float(np.max(np.abs(coeffs))) if coeffs.size else 0.0


def _significant(coeffs: np.ndarray, tol: float) -> np.ndarray:
    """Indices of coefficients above ``tol`` relative to the sup-norm."""
    scale = _sup_norm(coeffs)
    if scale == 0.0 or not np.isfinite(scale):
        return np.zeros(0, dtype=int)
    return np.nonzero(np.abs(coeffs) > tol * scale)[0]


def _check_finite(coeffs: np.ndarray, what: str):
    if not np.all(np.isfinite(coeffs)):
        raise DegenerateInput(f"non-finite coefficient in {what}")


def _default_trim() -> float:
    return resolve_tolerances(None).degree_trim


# Chebyshev polynomials of the second kind

def cheb_eval(k: int, v: Scalar) -> complex:
    """S_k(v), for any integer k, by running the three-term recurrence."""
    v = complex(v)
    if k >= 0:
        lower, upper = 0j, 1 + 0j  # S_{-1}, S_0
        for _ in range(k):
            lower, upper = upper, v * upper - lower
        return upper

    lower, upper = 1 + 0j, v  # S_0, S_1
    for _ in range(-k):
        lower, upper = v * lower - upper, lower
    return lower


@lru_cache(maxsize=None)
def cheb_coeffs(k: int) -> "DensePoly":
    if k == -1:
        return DensePoly.zero()
    if k <= -2:
        return -cheb_coeffs(-k - 2)

    lower, upper = np.zeros(1), np.ones(1)  # S_{-1} (as 0), S_0
    for _ in range(k):
        lower, upper = upper, P.polysub(P.polymulx(upper), lower)
    return DensePoly(upper)


def cheb_identity_residual(m: int, y: Scalar) -> complex:
    """S_m^2 - y S_m S_{m-1} + S_{m-1}^2 - 1, identically zero."""
    s_m, s_m1 = cheb_eval(m, y), cheb_eval(m - 1, y)
    return s_m * s_m - y * s_m * s_m1 + s_m1 * s_m1 - 1


# Dense polynomials

@dataclass(frozen=True, eq=False)
class DensePoly:
    """Polynomial sum(coeffs[i] * v**i); the zero polynomial has no coefficients."""
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        _check_finite(coeffs, "DensePoly")
        keep = _significant(coeffs, _default_trim())
        trimmed = coeffs[: keep[-1] + 1] if keep.size else _EMPTY
        object.__setattr__(self, "coeffs", _frozen(trimmed))

    @classmethod
    def zero(cls) -> "DensePoly":
        return cls(_EMPTY)

    @classmethod
    def constant(cls, c: Scalar) -> "DensePoly":
        return cls([c])

    @classmethod
    def linear(cls, c0: Scalar, c1: Scalar) -> "DensePoly":
        return cls([c0, c1])

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def is_zero(self) -> bool:
        return self.coeffs.size == 0

    def norm(self) -> float:
        return _sup_norm(self.coeffs)

    def __call__(self, v: Scalar) -> complex:
        if self.is_zero:
            return 0j
        return complex(P.polyval(complex(v), self.coeffs))

    def __neg__(self) -> "DensePoly":
        return DensePoly(-self.coeffs)

    def __add__(self, other) -> "DensePoly":
        other = _as_dense(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        return DensePoly(P.polyadd(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __sub__(self, other) -> "DensePoly":
        return self + (-_as_dense(other))

    def __rsub__(self, other) -> "DensePoly":
        return _as_dense(other) - self

    def __mul__(self, other) -> "DensePoly":
        other = _as_dense(other)
        if self.is_zero or other.is_zero:
            return DensePoly.zero()
        return DensePoly(P.polymul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def derivative(self) -> "DensePoly":
        if self.degree < 1:
            return DensePoly.zero()
        return DensePoly(P.polyder(self.coeffs))

    def allclose(self, other: "DensePoly", tol: float) -> bool:
        diff = (self - other).norm()
        return diff <= tol * max(1.0, self.norm(), other.norm())

    def __repr__(self) -> str:
        return f"DensePoly({np.round(self.coeffs, 12).tolist()})"


def _as_dense(value) -> DensePoly:
    if isinstance(value, DensePoly):
        return value
    return DensePoly.constant(value)


def poly_compose(outer: DensePoly, inner: DensePoly) -> DensePoly:
    """outer(inner(v)) by Horner's scheme."""
    result = DensePoly.zero()
    for c in outer.coeffs[::-1]:
        result = result * inner + complex(c)
    return result


def _newton_polish(p: DensePoly, roots: np.ndarray, steps: int = 4) -> np.ndarray:
    dp = p.derivative()
    polished = []
    for r in roots:
        best, best_val = complex(r), abs(p(r))
        current = best
        for _ in range(steps):
            slope = dp(current)
            if slope == 0:
                break
            current = current - p(current) / slope
            value = abs(p(current))
            if value < best_val:
                best, best_val = current, value
        polished.append(best)
    return np.array(polished, dtype=complex)


def poly_roots(p: DensePoly, tolerances: Optional[_ToleranceSettings] = None) -> list:
    """All complex roots with multiplicity, from the companion matrix eigenvalues.

    Roots are Newton-polished and sorted by (real, imaginary) part.
    """
    tolerances = resolve_tolerances(tolerances)
    if p.degree < 1:
        raise DegenerateInput(f"cannot find roots of a polynomial of degree {p.degree}")

    companion = P.polycompanion(p.coeffs)
    roots = _newton_polish(p, np.linalg.eigvals(companion))

    scale = p.norm()
    worst = max(abs(p(r)) for r in roots) / scale
    if worst > tolerances.root_residual:
        logging.warning(f"poly_roots: worst relative residual {worst:.3e} exceeds {tolerances.root_residual:.1e} (degree {p.degree})")

    return sorted((complex(r) for r in roots), key=lambda r: (r.real, r.imag))


# Laurent polynomials

@dataclass(frozen=True, eq=False)
class LaurentPoly:
    """sum(coeffs[i] * t**(min_exp + i)); the zero polynomial has no coefficients."""
    min_exp: int
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        _check_finite(coeffs, "LaurentPoly")
        # only exact zeros; intermediate products keep every digit, callers trim explicitly
        keep = np.flatnonzero(coeffs)
        if keep.size == 0:
            object.__setattr__(self, "min_exp", 0)
            object.__setattr__(self, "coeffs", _frozen(_EMPTY))
            return
        object.__setattr__(self, "min_exp", int(self.min_exp) + int(keep[0]))
        object.__setattr__(self, "coeffs", _frozen(coeffs[keep[0]: keep[-1] + 1]))

    @classmethod
    def zero(cls) -> "LaurentPoly":
        return cls(0, _EMPTY)

    @classmethod
    def constant(cls, c: Scalar) -> "LaurentPoly":
        return cls(0, [c])

    @classmethod
    def from_roots(cls, roots: Sequence[Scalar], leading: Scalar = 1) -> "LaurentPoly":
        return cls(0, complex(leading) * P.polyfromroots(np.asarray(roots, dtype=complex)))

    @property
    def is_zero(self) -> bool:
        return self.coeffs.size == 0

    @property
    def max_exp(self) -> int:
        return self.min_exp + self.coeffs.size - 1

    def norm(self) -> float:
        return _sup_norm(self.coeffs)

    def coefficient(self, exponent: int) -> complex:
        i = exponent - self.min_exp
        if 0 <= i < self.coeffs.size:
            return complex(self.coeffs[i])
        return 0j

    def shift(self, k: int) -> "LaurentPoly":
        return LaurentPoly(self.min_exp + k, self.coeffs)

    def normalized(self) -> "LaurentPoly":
        """Shifted so that the minimal exponent is 0."""
        return self.shift(-self.min_exp)

    def trimmed(self, tol: float) -> "LaurentPoly":
        """Drop end coefficients below ``tol`` relative to the sup-norm."""
        keep = _significant(self.coeffs, tol)
        if keep.size == 0:
            return LaurentPoly.zero()
        return LaurentPoly(self.min_exp + int(keep[0]), self.coeffs[keep[0]: keep[-1] + 1])

    def absolute(self) -> "LaurentPoly":
        """Coefficientwise absolute values."""
        return LaurentPoly(self.min_exp, np.abs(self.coeffs))

    def __call__(self, t0: Scalar) -> complex:
        return laurent_eval(self, t0)

    def _aligned(self, other: "LaurentPoly") -> Tuple[int, np.ndarray, np.ndarray]:
        lo = min(self.min_exp, other.min_exp)
        hi = max(self.max_exp, other.max_exp)
        a = np.zeros(hi - lo + 1, dtype=complex)
        b = np.zeros(hi - lo + 1, dtype=complex)
        a[self.min_exp - lo: self.min_exp - lo + self.coeffs.size] = self.coeffs
        b[other.min_exp - lo: other.min_exp - lo + other.coeffs.size] = other.coeffs
        return lo, a, b

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.min_exp, -self.coeffs)

    def __add__(self, other) -> "LaurentPoly":
        return laurent_arith(self, _as_laurent(other), "add")

    __radd__ = __add__

    def __sub__(self, other) -> "LaurentPoly":
        return laurent_arith(self, _as_laurent(other), "sub")

    def __rsub__(self, other) -> "LaurentPoly":
        return laurent_arith(_as_laurent(other), self, "sub")

    def __mul__(self, other) -> "LaurentPoly":
        return laurent_arith(self, _as_laurent(other), "mul")

    __rmul__ = __mul__

    def __truediv__(self, c: Scalar) -> "LaurentPoly":
        return LaurentPoly(self.min_exp, self.coeffs / complex(c))

    def distance(self, other: "LaurentPoly") -> float:
        return (self - other).norm()

    def __repr__(self) -> str:
        return f"LaurentPoly(min_exp={self.min_exp}, coeffs={np.round(self.coeffs, 12).tolist()})"


def _as_laurent(value) -> LaurentPoly:
    if isinstance(value, LaurentPoly):
        return value
    return LaurentPoly.constant(value)


def laurent_arith(a: LaurentPoly, b: LaurentPoly, op: Literal["add", "sub", "mul"]) -> LaurentPoly:
    if op == "mul":
        if a.is_zero or b.is_zero:
            return LaurentPoly.zero()
        return LaurentPoly(a.min_exp + b.min_exp, P.polymul(a.coeffs, b.coeffs))
    if a.is_zero and b.is_zero:
        return LaurentPoly.zero()
    if op == "add":
        lo, x, y = a._aligned(b)
        return LaurentPoly(lo, x + y)
    if op == "sub":
        lo, x, y = a._aligned(b)
        return LaurentPoly(lo, x - y)
    raise ValueError(f"unknown Laurent operation '{op}'")


def laurent_eval(a: LaurentPoly, t0: Scalar) -> complex:
    t0 = complex(t0)
    if t0 == 0:
        raise EvalAtZero("Laurent polynomials cannot be evaluated at t = 0")
    if a.is_zero:
        return 0j
    return complex(P.polyval(t0, a.coeffs) * t0 ** a.min_exp)


def _convolution_matrix(den: np.ndarray, width: int) -> np.ndarray:
    """T with T @ q == polymul(den, q) for every q of length ``width``."""
    T = np.zeros((den.size + width - 1, width), dtype=complex)
    for j in range(width):
        T[j: j + den.size, j] = den
    return T


def laurent_div_exact(
    num: LaurentPoly,
    den: LaurentPoly,
    tolerances: Optional[_ToleranceSettings] = None,
    scale: float = 0.0
) -> LaurentPoly:
    """The quotient num/den, which must leave no remainder beyond tolerance.

    The quotient is the least-squares solution of the convolution system
    den * q = num. Long division from either end would multiply the rounding
    error in ``num`` by powers of the roots of ``den``. The remainder is
    measured against the larger of ``num`` and ``scale``, the size of the
    terms ``num`` was summed from when those cancel.
    """
    tolerances = resolve_tolerances(tolerances)
    if den.is_zero:
        raise InexactDivision("division by the zero Laurent polynomial")
    if num.is_zero:
        return LaurentPoly.zero()
    if scale > num.norm():
        # end coefficients under the rounding floor of the summed terms are zero
        num = num.trimmed(_ROUNDING * scale / num.norm())
        if num.is_zero:
            return LaurentPoly.zero()

    width = num.coeffs.size - den.coeffs.size + 1
    if width < 1:
        quotient, remainder_norm = _EMPTY, num.norm()
    else:
        T = _convolution_matrix(den.coeffs, width)
        quotient = np.linalg.lstsq(T, num.coeffs, rcond=None)[0]
        remainder_norm = _sup_norm(T @ quotient - num.coeffs)

    reference = max(num.norm(), scale)
    if remainder_norm > tolerances.division * reference:
        logging.debug(f"laurent_div_exact: remainder {remainder_norm:.3e} against {reference:.3e}")
        raise InexactDivision(
            f"remainder {remainder_norm:.3e} exceeds {tolerances.division:.1e} relative to {reference:.3e}",
            remainder_norm=remainder_norm
        )
    return LaurentPoly(num.min_exp - den.min_exp, quotient)


# 3x3 matrices over C[t, t^-1]

@dataclass(frozen=True, eq=False)
class Mat3Laurent:
    entries: Tuple[Tuple[LaurentPoly, ...], ...]

    @classmethod
    def from_function(cls, entry: Callable[[int, int], LaurentPoly]) -> "Mat3Laurent":
        return cls(tuple(tuple(entry(i, j) for j in range(3)) for i in range(3)))

    @classmethod
    def from_graded(cls, graded: dict) -> "Mat3Laurent":
        """Build sum(t**k * graded[k]) from constant 3x3 complex matrices."""
        if not graded:
            return cls.zero()
        lo, hi = min(graded), max(graded)
        stack = np.zeros((hi - lo + 1, 3, 3), dtype=complex)
        for k, matrix in graded.items():
            stack[k - lo] += np.asarray(matrix, dtype=complex)
        return cls.from_function(lambda i, j: LaurentPoly(lo, stack[:, i, j]))

    @classmethod
    def from_constant(cls, matrix) -> "Mat3Laurent":
        return cls.from_graded({0: matrix})

    @classmethod
    def identity(cls) -> "Mat3Laurent":
        return cls.from_constant(np.eye(3))

    @classmethod
    def zero(cls) -> "Mat3Laurent":
        return cls.from_function(lambda i, j: LaurentPoly.zero())

    def __getitem__(self, index: Tuple[int, int]) -> LaurentPoly:
        i, j = index
        return self.entries[i][j]

    def __add__(self, other: "Mat3Laurent") -> "Mat3Laurent":
        return Mat3Laurent.from_function(lambda i, j: self[i, j] + other[i, j])

    def __sub__(self, other: "Mat3Laurent") -> "Mat3Laurent":
        return Mat3Laurent.from_function(lambda i, j: self[i, j] - other[i, j])

    def __matmul__(self, other: "Mat3Laurent") -> "Mat3Laurent":
        def entry(i, j):
            total = LaurentPoly.zero()
            for k in range(3):
                total = total + self[i, k] * other[k, j]
            return total
        return Mat3Laurent.from_function(entry)

    def evaluate(self, t0: Scalar) -> np.ndarray:
        return np.array([[laurent_eval(self[i, j], t0) for j in range(3)] for i in range(3)])

    def det(self) -> LaurentPoly:
        return mat3_laurent_det(self)

    def det_scale(self) -> float:
        return mat3_laurent_det_scale(self)


def mat3_laurent_det(M: Mat3Laurent) -> LaurentPoly:
    """Cofactor expansion along the first row."""
    minor_0 = M[1, 1] * M[2, 2] - M[1, 2] * M[2, 1]
    minor_1 = M[1, 0] * M[2, 2] - M[1, 2] * M[2, 0]
    minor_2 = M[1, 0] * M[2, 1] - M[1, 1] * M[2, 0]
    return M[0, 0] * minor_0 - M[0, 1] * minor_1 + M[0, 2] * minor_2


def mat3_laurent_det_scale(M: Mat3Laurent) -> float:
    """Sup-norm of the permanent of the coefficientwise absolute values.

    Bounds every coefficient of every term in the determinant expansion, so
    rounding error in ``det`` is a small multiple of eps times this.
    """
    total = LaurentPoly.zero()
    for p in permutations(range(3)):
        total = total + M[0, p[0]].absolute() * M[1, p[1]].absolute() * M[2, p[2]].absolute()
    return total.norm()
