"""Adjoint twisted Alexander polynomials of J(2m, 2n).

Three ways to the same invariant:

* ``delta_fox``: Wada's definition, Fox derivative of the concrete relator
  pushed letter by letter through ``Phi = (t^exp) * ad(rho)``.
* ``delta_lemma``: the factored form of d r / d a, with the constant factors
  from their Chebyshev closed forms.
* ``delta_closed``: the closed formula in (x, y) with coefficients A, B, C.

``cross_check`` compares the first and last up to a unit +-t^k, and
``run_grid`` runs the comparison over parameter grids.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from functools import partial
from typing import Dict, FrozenSet, Iterable, List, Literal, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from atap.algebra.freegroup_fox import (
    A,
    B,
    GroupRingElt,
    build_relator,
    fox_derivative,
)
from atap.algebra.scalar_poly import LaurentPoly, Mat3Laurent, cheb_eval, laurent_div_exact
from atap.errors import (
    ClosedFormSingular,
    DegenerateInput,
    DegenerateTrace,
    InexactDivision,
    NoNonabelianRoots,
    NotOnRileyVariety,
)
from atap.representations.adjoint_rep import (
    _ad_entries,
    det_phi_b_minus_one,
    phi_b_inverse_minus_one,
    phi_factor_s1,
    phi_factor_s2,
    phi_factor_s3,
    phi_one_minus_a,
)
from atap.representations.sl2_reps import (
    FLAG_CLOSED_FORM_SINGULAR,
    FLAG_UNVERIFIED,
    KnotParams,
    NonabelianRep,
    balance_rep,
    evaluate_word,
    make_rep,
    riley_roots,
    s_from_x,
    verify_rep,
)
from atap.settings import _ToleranceSettings, resolve_tolerances

FLAG_DEGENERATE_TRACE = "degenerate-trace"
FLAG_SIGN_FLIPPED = "sign-flipped"
FLAG_FOX_INEXACT = "fox-inexact"
FLAG_LEMMA_SKIPPED = "lemma-skipped"
FLAG_REGULARITY_ASSUMED = "regularity-assumed"
FLAG_PERTURBED = "perturbed"

_T_MINUS_ONE = LaurentPoly(0, [-1, 1])


@dataclass(frozen=True, eq=False)
class DeltaResult:
    prefactor_denom_D1: complex
    quad_denom_D2: complex
    coeff_A: complex
    coeff_B: complex
    coeff_C: complex
    quad_mid: complex
    laurent_form: LaurentPoly
    torsion: complex
    flags: FrozenSet[str] = field(default_factory=frozenset)


@dataclass
class CrossCheckReport:
    passed: bool
    discrepancy: float
    unit_shift: int
    sign: int

    def to_dict(self) -> dict:
        return {"pass": self.passed, "discrepancy": self.discrepancy, "unit_shift": self.unit_shift, "sign": self.sign}


@dataclass
class OutputRecord:
    """Everything computed for one representation; absent fields are explained by ``flags``."""
    m: int
    n: int
    s: complex
    x: complex
    y: complex
    z: complex
    riley_residual: float
    rep_residual: float
    multiplicity: int = 1
    delta: Optional[List[complex]] = None
    A: Optional[complex] = None
    B: Optional[complex] = None
    C: Optional[complex] = None
    quad_mid: Optional[complex] = None
    D1: Optional[complex] = None
    D2: Optional[complex] = None
    torsion_closed: Optional[complex] = None
    torsion_limit: Optional[complex] = None
    crosscheck: Optional[CrossCheckReport] = None
    lemma_discrepancy: Optional[float] = None
    singular_culprit: Optional[str] = None
    flags: List[str] = field(default_factory=list)

    @property
    def flagged(self) -> bool:
        return bool(set(self.flags) - {FLAG_REGULARITY_ASSUMED})

    @property
    def failed(self) -> bool:
        if FLAG_UNVERIFIED in self.flags or FLAG_FOX_INEXACT in self.flags:
            return True
        return self.crosscheck is not None and not self.crosscheck.passed

    def to_dict(self) -> dict:
        """Output schema: m and n nested under ``params``, the cross-check verdict under ``pass``."""
        document = {"params": {"m": self.m, "n": self.n}}
        document.update({f.name: getattr(self, f.name) for f in fields(self) if f.name not in ("m", "n")})
        document["crosscheck"] = None if self.crosscheck is None else self.crosscheck.to_dict()
        return document


def phi_map(elt: GroupRingElt, rep: NonabelianRep) -> Mat3Laurent:
    """Sum of coeff * t^(exponent sum) * ad(rho(word)) over the terms of ``elt``."""
    graded: Dict[int, np.ndarray] = {}
    for word, coeff in elt:
        k = word.exponent_sum()
        image = _ad_entries(evaluate_word(word, rep.rho_a, rep.rho_b))
        graded[k] = graded.get(k, np.zeros((3, 3), dtype=complex)) + coeff * image
    return Mat3Laurent.from_graded(graded)


def _fox_quotient(
    params: KnotParams,
    rep: NonabelianRep,
    column: Literal["a", "b"],
    tolerances: _ToleranceSettings
) -> LaurentPoly:
    if column not in ("a", "b"):
        raise ValueError(f"column must be 'a' or 'b', got '{column}'")
    relator = build_relator(params)
    other = B if column == "a" else A
    # determinants are conjugation invariant
    rep = balance_rep(rep)
    fox_matrix = phi_map(fox_derivative(relator, column), rep)
    denominator = phi_map(GroupRingElt.of(other) - 1, rep).det()
    quotient = laurent_div_exact(fox_matrix.det(), denominator, tolerances, scale=fox_matrix.det_scale())
    return quotient.trimmed(tolerances.division)


def delta_fox(
    params: KnotParams,
    rep: NonabelianRep,
    column: Literal["a", "b"] = "a",
    tolerances: Optional[_ToleranceSettings] = None
) -> LaurentPoly:
    """det Phi(dr/da) / det Phi(b - 1), or with column="b", det Phi(dr/db) / det Phi(a - 1).

    The result is shifted to minimal exponent 0.
    """
    tolerances = resolve_tolerances(tolerances)
    return _fox_quotient(params, rep, column, tolerances).normalized()


def delta_lemma(
    params: KnotParams,
    rep: NonabelianRep,
    tolerances: Optional[_ToleranceSettings] = None
) -> LaurentPoly:
    """det Phi(1 + (1-a) delta_{n-1}(w^-1) (a^-1 b)^m (b^-1 - 1) delta_{m-1}(a b^-1)) / det Phi(b - 1)."""
    tolerances = resolve_tolerances(tolerances)
    middle = phi_factor_s1(params, rep, tolerances) @ phi_factor_s2(params, rep)
    inner = (
        phi_one_minus_a(rep)
        @ Mat3Laurent.from_constant(middle)
        @ phi_b_inverse_minus_one(rep)
        @ Mat3Laurent.from_constant(phi_factor_s3(params, rep, tolerances))
    )
    lemma_matrix = Mat3Laurent.identity() + inner
    quotient = laurent_div_exact(lemma_matrix.det(), det_phi_b_minus_one(rep), tolerances, scale=lemma_matrix.det_scale())
    return quotient.trimmed(tolerances.division).normalized()


def _nonzero(value: complex, culprit: str, tol: float, scale: float = 1.0):
    if abs(value) <= tol * max(1.0, scale):
        raise ClosedFormSingular(culprit, value)


def theorem_coeffs(
    params: KnotParams,
    rep: NonabelianRep,
    tolerances: Optional[_ToleranceSettings] = None
) -> Tuple[complex, complex, complex]:
    tolerances = resolve_tolerances(tolerances)
    m, n, y = params.m, params.n, rep.y
    s_m, s_m1 = cheb_eval(m, y), cheb_eval(m - 1, y)
    _nonzero(y + 2, "y+2", tolerances.singular)
    _nonzero(s_m1, "S_{m-1}(y)", tolerances.singular)

    coeff_a = 2 * n * (2 * m + 2 * s_m * s_m1 - y * s_m1 ** 2) / (y + 2)
    coeff_b = (
        -4 * (s_m + s_m1) ** 2 * (m * s_m + (m + 1) * s_m1) / ((y + 2) * s_m1)
        + 6 * m * s_m ** 2
        + (4 + 4 * m - 4 * n - 2 * m * y) * s_m * s_m1
        + (2 + 2 * m - 4 * m * n - y + 2 * n * y + 2 * m * n * y) * s_m1 ** 2
    )
    coeff_c = -(2 * m * n - 1) * (2 * s_m - y * s_m1) ** 2
    return coeff_a, coeff_b, coeff_c


def closed_laurent_form(mn: int, quad_mid: complex, d1: complex) -> LaurentPoly:
    """(t - 1)(mn t^2 - quad_mid t + mn) / D1."""
    return LaurentPoly(0, [-mn, mn + quad_mid, -(mn + quad_mid), mn]) / d1


def delta_closed(
    params: KnotParams,
    rep: NonabelianRep,
    tolerances: Optional[_ToleranceSettings] = None
) -> DeltaResult:
    tolerances = resolve_tolerances(tolerances)
    m, y, x2 = params.m, rep.y, rep.x * rep.x
    s_m1 = cheb_eval(m - 1, y)

    shifted = y + 2 - x2
    _nonzero(shifted, "y+2-x^2", tolerances.singular, abs(y))
    d2 = 4 + (y - 2) * shifted * s_m1 ** 2
    d1 = shifted * (d2 - x2)
    _nonzero(d2, "D2", tolerances.singular)
    _nonzero(d1, "D1", tolerances.singular)

    coeff_a, coeff_b, coeff_c = theorem_coeffs(params, rep, tolerances)
    quad_mid = (coeff_a * x2 * x2 + coeff_b * x2 + coeff_c) / d2
    return DeltaResult(
        prefactor_denom_D1=d1,
        quad_denom_D2=d2,
        coeff_A=coeff_a,
        coeff_B=coeff_b,
        coeff_C=coeff_c,
        quad_mid=quad_mid,
        laurent_form=closed_laurent_form(params.mn, quad_mid, d1),
        torsion=(2 * params.mn - quad_mid) / d1,
        flags=rep.flags,
    )


def torsion_closed(
    params: KnotParams,
    rep: NonabelianRep,
    tolerances: Optional[_ToleranceSettings] = None
) -> complex:
    return delta_closed(params, rep, tolerances).torsion


def torsion_from_delta(delta: LaurentPoly, tolerances: Optional[_ToleranceSettings] = None) -> complex:
    """-(delta / (t - 1)) at t = 1."""
    tolerances = resolve_tolerances(tolerances)
    return -laurent_div_exact(delta.normalized(), _T_MINUS_ONE, tolerances)(1)


def torsion_limit(
    params: KnotParams,
    rep: NonabelianRep,
    delta: Optional[LaurentPoly] = None,
    tolerances: Optional[_ToleranceSettings] = None
) -> complex:
    """Torsion from the limit at t = 1, using ``delta`` or else the Fox pipeline."""
    tolerances = resolve_tolerances(tolerances)
    if delta is None:
        delta = delta_fox(params, rep, tolerances=tolerances)
    return torsion_from_delta(delta, tolerances)


def compare_deltas(
    fox: LaurentPoly,
    closed: LaurentPoly,
    tolerances: Optional[_ToleranceSettings] = None
) -> CrossCheckReport:
    """Compare two Wada representatives up to a unit +-t^k."""
    tolerances = resolve_tolerances(tolerances)
    unit_shift = fox.min_exp - closed.min_exp
    fox, closed = fox.normalized(), closed.normalized()
    if fox.is_zero or closed.is_zero:
        passed = fox.is_zero and closed.is_zero
        return CrossCheckReport(passed=passed, discrepancy=0.0 if passed else float("inf"), unit_shift=unit_shift, sign=1)

    ratio = fox.coefficient(fox.max_exp) / closed.coefficient(closed.max_exp)
    sign = 1 if abs(ratio - 1) <= abs(ratio + 1) else -1
    discrepancy = (fox * sign).distance(closed) / closed.norm()
    return CrossCheckReport(
        passed=discrepancy <= tolerances.crosscheck,
        discrepancy=float(discrepancy),
        unit_shift=unit_shift,
        sign=sign,
    )


def cross_check(
    params: KnotParams,
    rep: NonabelianRep,
    tolerances: Optional[_ToleranceSettings] = None
) -> CrossCheckReport:
    """Fox pipeline against the closed form. A failed Fox division counts as a failure."""
    tolerances = resolve_tolerances(tolerances)
    closed = delta_closed(params, rep, tolerances).laurent_form
    try:
        fox = _fox_quotient(params, rep, "a", tolerances)
    except InexactDivision as e:
        logging.debug(f"{params}: Fox quotient is inexact at y={rep.y:.6g}: {e}")
        return CrossCheckReport(passed=False, discrepancy=float("inf"), unit_shift=0, sign=1)
    return compare_deltas(fox, closed, tolerances)


def analyze(
    params: KnotParams,
    rep: NonabelianRep,
    tolerances: Optional[_ToleranceSettings] = None
) -> OutputRecord:
    """Run every pipeline on one representation; recoverable errors become flags."""
    tolerances = resolve_tolerances(tolerances)
    flags = set(rep.flags)
    rep_residual = verify_rep(rep, params)
    if rep_residual > tolerances.rep_residual:
        flags.add(FLAG_UNVERIFIED)

    record = OutputRecord(
        m=params.m, n=params.n, s=rep.s, x=rep.x, y=rep.y, z=rep.z,
        riley_residual=rep.riley_residual, rep_residual=rep_residual,
        multiplicity=rep.multiplicity,
    )

    fox = None
    try:
        fox = _fox_quotient(params, rep, "a", tolerances)
    except InexactDivision as e:
        logging.warning(f"{params}: Fox pipeline failed at y={rep.y:.6g}: {e}")
        flags.add(FLAG_FOX_INEXACT)

    closed = None
    try:
        closed = delta_closed(params, rep, tolerances)
    except ClosedFormSingular as e:
        logging.debug(f"{params}: closed form skipped at y={rep.y:.6g}, {e.culprit} vanishes")
        flags.add(FLAG_CLOSED_FORM_SINGULAR)
        record.singular_culprit = e.culprit

    if closed is not None:
        record.A, record.B, record.C = closed.coeff_A, closed.coeff_B, closed.coeff_C
        record.quad_mid = closed.quad_mid
        record.D1, record.D2 = closed.prefactor_denom_D1, closed.quad_denom_D2
        record.torsion_closed = closed.torsion
        flags.add(FLAG_REGULARITY_ASSUMED)

    delta = fox if fox is not None else (closed.laurent_form if closed is not None else None)
    if delta is not None:
        record.delta = [complex(c) for c in delta.normalized().coeffs]
        try:
            record.torsion_limit = torsion_from_delta(delta, tolerances)
        except InexactDivision:
            logging.debug(f"{params}: t - 1 does not divide delta at y={rep.y:.6g}")

    if fox is not None and closed is not None:
        record.crosscheck = compare_deltas(fox, closed.laurent_form, tolerances)
        if record.crosscheck.sign < 0:
            flags.add(FLAG_SIGN_FLIPPED)
        if not record.crosscheck.passed:
            logging.warning(f"{params}: cross-check failed at y={rep.y:.6g}, discrepancy {record.crosscheck.discrepancy:.3e}")

    if fox is not None:
        try:
            lemma = delta_lemma(params, rep, tolerances)
            record.lemma_discrepancy = compare_deltas(fox, lemma, tolerances).discrepancy
        except DegenerateTrace:
            flags.add(FLAG_DEGENERATE_TRACE)
        except (NotOnRileyVariety, DegenerateInput, InexactDivision) as e:
            logging.debug(f"{params}: factored pipeline skipped at y={rep.y:.6g}: {e}")
            flags.add(FLAG_LEMMA_SKIPPED)

    record.flags = sorted(flags)
    return record


@dataclass
class CellResult:
    m: int
    n: int
    x: complex
    s: Optional[complex] = None
    records: List[OutputRecord] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def key(self) -> Tuple[int, int, float, float]:
        return (self.m, self.n, self.x.real, self.x.imag)


@dataclass
class GridSummary:
    cells: List[CellResult]
    passed: int = 0
    failed: int = 0
    flagged: int = 0
    empty_cells: int = 0
    worst_discrepancy: float = 0.0
    torsion_sign: Optional[int] = None
    torsion_sign_consistent: bool = True

    @property
    def records(self) -> List[OutputRecord]:
        return [record for cell in self.cells for record in cell.records]

    @property
    def ok(self) -> bool:
        """No failed record and one global torsion sign."""
        return self.failed == 0 and self.torsion_sign_consistent


def analyze_point(
    params: KnotParams,
    x: Optional[complex] = None,
    s: Optional[complex] = None,
    tolerances: Optional[_ToleranceSettings] = None,
    perturb: float = 0.0
) -> Tuple[complex, List[OutputRecord]]:
    """Records for every Riley root at one meridian trace. Raises NoNonabelianRoots."""
    tolerances = resolve_tolerances(tolerances)
    if s is None:
        s = s_from_x(x)[0]
    reps = riley_roots(params, s, tolerances)
    if perturb:
        reps = [make_rep(params, s, rep.y + perturb, tolerances).with_flags(FLAG_PERTURBED) for rep in reps]
    return s, [analyze(params, rep, tolerances) for rep in reps]


def _run_cell(cell: Tuple[int, int, complex], tolerances: _ToleranceSettings, perturb: float) -> CellResult:
    m, n, x = cell
    result = CellResult(m=m, n=n, x=complex(x))
    try:
        result.s, result.records = analyze_point(KnotParams(m, n), x=x, tolerances=tolerances, perturb=perturb)
    except NoNonabelianRoots as e:
        result.error = str(e)
    return result


def torsion_sign(record: OutputRecord, tolerances: _ToleranceSettings) -> Optional[int]:
    """+1 when torsion_limit = -torsion_closed, -1 when they are equal, 0 when neither holds.

    Only the sign is decided here, so the bound is the square root of the
    cross-check tolerance.
    """
    if record.torsion_limit is None or record.torsion_closed is None:
        return None
    limit, closed = record.torsion_limit, record.torsion_closed
    bound = np.sqrt(tolerances.crosscheck) * (1 + abs(closed))
    if abs(limit + closed) <= bound:
        return 1
    if abs(limit - closed) <= bound:
        return -1
    return 0


def summarize(cells: Iterable[CellResult], tolerances: Optional[_ToleranceSettings] = None) -> GridSummary:
    tolerances = resolve_tolerances(tolerances)
    summary = GridSummary(cells=sorted(cells, key=lambda cell: cell.key))
    signs = set()
    for cell in summary.cells:
        if cell.error is not None:
            summary.empty_cells += 1
        for record in cell.records:
            if record.failed:
                summary.failed += 1
            else:
                summary.passed += 1
            if record.flagged:
                summary.flagged += 1
            if record.crosscheck is not None and np.isfinite(record.crosscheck.discrepancy):
                summary.worst_discrepancy = max(summary.worst_discrepancy, record.crosscheck.discrepancy)
            sign = torsion_sign(record, tolerances)
            if sign is not None and not record.failed:
                signs.add(sign)
    if signs:
        summary.torsion_sign_consistent = len(signs) == 1 and 0 not in signs
        summary.torsion_sign = next(iter(signs)) if len(signs) == 1 else None
    return summary


def run_grid(
    m_values: Sequence[int],
    n_values: Sequence[int],
    x_samples: Sequence[complex],
    tolerances: Optional[_ToleranceSettings] = None,
    njobs: int = 1,
    perturb: float = 0.0,
    progress: bool = False
) -> GridSummary:
    """Analyze every (m, n, x) cell; results are merged in sorted cell order."""
    tolerances = resolve_tolerances(tolerances)
    cells = [(m, n, complex(x)) for m in m_values for n in n_values for x in x_samples if m != 0 and n != 0]
    logging.debug(f"run_grid: {len(cells)} cells, njobs={njobs}")

    run_cell = partial(_run_cell, tolerances=tolerances, perturb=perturb)
    if njobs == 1:
        results = [run_cell(cell) for cell in tqdm(cells, disable=not progress)]
    else:
        with ProcessPoolExecutor(max_workers=njobs) as executor:
            results = list(tqdm(executor.map(run_cell, cells), total=len(cells), disable=not progress))
    return summarize(results, tolerances)
