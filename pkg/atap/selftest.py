"""Invariant suites run by the ``selftest`` command.

Each suite draws its samples from ``numpy.random.default_rng(seed)`` and
counts checks and failures; a suite never raises for a failed check.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from atap.algebra.freegroup_fox import (
    A,
    B,
    GroupRingElt,
    build_relator,
    build_w,
    fox_derivative,
    relator_derivative_closed,
)
from atap.algebra.scalar_poly import cheb_coeffs, cheb_eval, cheb_identity_residual
from atap.atap_core import analyze_point, torsion_sign
from atap.errors import AtapError
from atap.representations.adjoint_rep import ad, ad_geom_sum_closed, ad_power_closed
from atap.representations.sl2_reps import (
    KnotParams,
    evaluate_word,
    rho_a,
    rho_b,
    riley_identity_check,
    riley_poly,
    riley_roots,
    riley_value,
    trace_z,
    verify_rep,
)
from atap.settings import _ToleranceSettings, resolve_tolerances


@dataclass
class SuiteResult:
    name: str
    checks: int = 0
    failures: int = 0
    messages: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def check(self, condition: bool, message: str):
        self.checks += 1
        if not condition:
            self.failures += 1
            self.messages.append(message)


def relative_error(actual, expected) -> float:
    actual, expected = np.asarray(actual), np.asarray(expected)
    return float(np.max(np.abs(actual - expected)) / max(1.0, float(np.max(np.abs(expected)))))


def random_complex(rng: np.random.Generator, size=None):
    return rng.normal(size=size) + 1j * rng.normal(size=size)


def random_sl2(rng: np.random.Generator) -> np.ndarray:
    a, b, c = random_complex(rng, 3)
    return np.array([[a, b], [c, (1 + b * c) / a]], dtype=complex)


def brute_ad_power(M: np.ndarray, n: int) -> np.ndarray:
    base = ad(M) if n >= 0 else np.linalg.inv(ad(M))
    return np.linalg.matrix_power(base, abs(n))


def brute_ad_geom_sum(M: np.ndarray, n: int) -> np.ndarray:
    if n >= 0:
        return sum((brute_ad_power(M, i) for i in range(n)), np.zeros((3, 3), dtype=complex))
    return -sum((brute_ad_power(M, i) for i in range(n, 0)), np.zeros((3, 3), dtype=complex))


def chebyshev_suite(rng: np.random.Generator, tolerances: _ToleranceSettings) -> SuiteResult:
    suite = SuiteResult("chebyshev")
    for m in range(-12, 13):
        for y in random_complex(rng, 3):
            scale = max(1.0, abs(cheb_eval(m, y)) ** 2, abs(cheb_eval(m - 1, y)) ** 2)
            residual = abs(cheb_identity_residual(m, y)) / scale
            suite.check(residual <= tolerances.equality, f"S_m identity off by {residual:.3e} at m={m}")
            coeff_err = relative_error(cheb_coeffs(m)(y), cheb_eval(m, y))
            suite.check(coeff_err <= tolerances.equality, f"cheb_coeffs({m}) disagrees with recurrence ({coeff_err:.3e})")
    return suite


def fox_suite(rng: np.random.Generator, tolerances: _ToleranceSettings) -> SuiteResult:
    suite = SuiteResult("fox")
    for m in (-2, -1, 1, 2):
        for n in (-2, -1, 1, 2):
            params = KnotParams(m, n)
            relator = build_relator(params)
            suite.check(
                fox_derivative(relator, "a") == relator_derivative_closed(params),
                f"d r / d a differs from the factored form at {params}"
            )
            d_a, d_b = fox_derivative(relator, "a"), fox_derivative(relator, "b")
            suite.check(
                d_a * (GroupRingElt.of(A) - 1) + d_b * (GroupRingElt.of(B) - 1) == GroupRingElt.of(relator) - 1,
                f"fundamental formula fails for {params}"
            )
    return suite


def adjoint_suite(rng: np.random.Generator, tolerances: _ToleranceSettings) -> SuiteResult:
    suite = SuiteResult("adjoint")
    for _ in range(20):
        M, N = random_sl2(rng), random_sl2(rng)
        suite.check(relative_error(ad(M @ N), ad(M) @ ad(N)) <= tolerances.equality, "ad is not multiplicative")
        scale = max(1.0, float(np.max(np.abs(ad(M)))) ** 3)
        suite.check(abs(np.linalg.det(ad(M)) - 1) <= tolerances.equality * scale, "det ad(M) != 1")
        for n in range(-6, 9):
            err = relative_error(ad_power_closed(M, n), brute_ad_power(M, n))
            suite.check(err <= tolerances.crosscheck, f"ad power closed form off by {err:.3e} at n={n}")
            err = relative_error(ad_geom_sum_closed(M, n), brute_ad_geom_sum(M, n))
            suite.check(err <= tolerances.crosscheck, f"ad geometric sum closed form off by {err:.3e} at n={n}")
    return suite


def riley_suite(rng: np.random.Generator, tolerances: _ToleranceSettings) -> SuiteResult:
    suite = SuiteResult("riley")
    for _ in range(20):
        m = int(rng.integers(1, 6)) * int(rng.choice([-1, 1]))
        s, y = random_complex(rng, 2)
        brute = np.trace(evaluate_word(build_w(m), rho_a(s), rho_b(s, y)))
        err = relative_error(trace_z(m, y, s + 1 / s), brute)
        suite.check(err <= tolerances.equality, f"trace_z off by {err:.3e} at m={m}")

    samples = [np.exp(1j * rng.uniform(0.1, np.pi)) for _ in range(2)] + list(random_complex(rng, 2))
    for m in (-2, -1, 1, 2):
        for n in (-2, -1, 1, 2):
            params = KnotParams(m, n)
            for s in samples:
                phi = riley_poly(params, s)
                y0 = complex(random_complex(rng))
                suite.check(
                    relative_error(phi(y0), riley_value(params, s, y0)) <= tolerances.root_residual,
                    f"Riley polynomial disagrees with pointwise value at {params}"
                )
                try:
                    reps = riley_roots(params, s, tolerances)
                except AtapError as e:
                    suite.check(False, f"no representations at {params}, s={s:.4g}: {e}")
                    continue
                for rep in reps:
                    residual = verify_rep(rep, params)
                    suite.check(residual <= tolerances.rep_residual, f"{params}: group relation residual {residual:.3e}")
                    try:
                        square_ok, product_ok = riley_identity_check(params, rep, tolerances)
                    except AtapError:
                        continue
                    suite.check(square_ok and product_ok, f"{params}: Riley identities fail at y={rep.y:.6g}")
    return suite


def pipeline_suite(rng: np.random.Generator, tolerances: _ToleranceSettings) -> SuiteResult:
    suite = SuiteResult("pipeline")
    x_samples = [2, 1.7, complex(rng.uniform(0.2, 1.5), rng.uniform(0.2, 1.5))]
    signs = set()
    for m in (-1, 1, 2):
        for n in (-1, 1, 2):
            for x in x_samples:
                params = KnotParams(m, n)
                try:
                    _, records = analyze_point(params, x=x, tolerances=tolerances)
                except AtapError as e:
                    suite.check(False, f"{params}, x={x}: {e}")
                    continue
                for record in records:
                    suite.check(not record.failed, f"{params}, x={x}, y={record.y:.6g}: pipelines disagree ({record.flags})")
                    sign = torsion_sign(record, tolerances)
                    if sign is not None and not record.failed:
                        signs.add(sign)
    suite.check(len(signs) == 1 and 0 not in signs, f"torsion_limit = -sigma * torsion_closed with sigma in {sorted(signs)}")
    return suite


SUITES: List[Callable[[np.random.Generator, _ToleranceSettings], SuiteResult]] = [
    chebyshev_suite,
    fox_suite,
    adjoint_suite,
    riley_suite,
    pipeline_suite,
]


def run_selftest(seed: int, tolerances: Optional[_ToleranceSettings] = None) -> List[SuiteResult]:
    tolerances = resolve_tolerances(tolerances)
    results = []
    for suite in SUITES:
        rng = np.random.default_rng(seed)
        try:
            result = suite(rng, tolerances)
        except AtapError as e:
            logging.exception(f"selftest {suite.__name__} aborted")
            result = SuiteResult(suite.__name__.replace("_suite", ""), checks=1, failures=1, messages=[str(e)])
        logging.debug(f"selftest {result.name}: {result.checks} checks, {result.failures} failures")
        results.append(result)
    return results
