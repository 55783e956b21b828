import numpy as np
import pytest

from atap.algebra.freegroup_fox import A, B, GroupRingElt
from atap.algebra.scalar_poly import LaurentPoly
from atap.atap_core import (
    FLAG_FOX_INEXACT,
    FLAG_PERTURBED,
    FLAG_REGULARITY_ASSUMED,
    FLAG_SIGN_FLIPPED,
    CellResult,
    OutputRecord,
    analyze,
    analyze_point,
    closed_laurent_form,
    compare_deltas,
    cross_check,
    delta_closed,
    delta_fox,
    delta_lemma,
    phi_map,
    run_grid,
    summarize,
    theorem_coeffs,
    torsion_closed,
    torsion_from_delta,
    torsion_limit,
    torsion_sign,
)
from atap.errors import ClosedFormSingular, NoNonabelianRoots
from atap.representations.adjoint_rep import ad, det_phi_b_minus_one
from atap.representations.sl2_reps import (
    FLAG_UNVERIFIED,
    KnotParams,
    make_rep,
    riley_roots,
    s_from_x,
)
from atap.settings import resolve_tolerances

T3_MINUS_ONE = LaurentPoly(0, [-1, 0, 0, 1])
SIGNED = [-2, -1, 1, 2]


def test_phi_map(trefoil):
    _, rep = trefoil
    np.testing.assert_allclose(phi_map(GroupRingElt.one(), rep).evaluate(1.3), np.eye(3))
    t0 = 0.4 + 0.9j
    np.testing.assert_allclose(phi_map(GroupRingElt.of(A), rep).evaluate(t0), t0 * ad(rep.rho_a), atol=1e-12)
    np.testing.assert_allclose(phi_map(GroupRingElt.of("A"), rep).evaluate(t0), ad(np.linalg.inv(rep.rho_a)) / t0, atol=1e-12)


def test_phi_map_det_of_b_minus_one():
    rep = make_rep(KnotParams(1, 1), 0.9 + 0.3j, -0.7)
    det = phi_map(GroupRingElt.of(B) - 1, rep).det()
    assert det.distance(det_phi_b_minus_one(rep)) <= 1e-10


def test_trefoil_closed_form(trefoil):
    params, rep = trefoil
    result = delta_closed(params, rep)
    assert result.coeff_A == pytest.approx(2)
    assert result.coeff_B == pytest.approx(-7)
    assert result.coeff_C == pytest.approx(-9)
    assert result.prefactor_denom_D1 == pytest.approx(1)
    assert result.quad_denom_D2 == pytest.approx(5)
    assert result.quad_mid == pytest.approx(-1)
    assert result.laurent_form.distance(T3_MINUS_ONE) <= 1e-10
    assert result.torsion == pytest.approx(3)
    assert torsion_closed(params, rep) == pytest.approx(3)


def test_trefoil_fox_pipeline(trefoil):
    params, rep = trefoil
    fox = delta_fox(params, rep)
    assert fox.min_exp == 0
    assert fox.max_exp == 3
    assert compare_deltas(fox, T3_MINUS_ONE).passed
    assert torsion_limit(params, rep) == pytest.approx(-3)
    report = cross_check(params, rep)
    assert report.passed
    assert report.discrepancy <= 1e-8


def test_fox_columns_agree(trefoil):
    params, rep = trefoil
    assert compare_deltas(delta_fox(params, rep, column="b"), delta_fox(params, rep)).passed
    with pytest.raises(ValueError):
        delta_fox(params, rep, column="c")


@pytest.mark.parametrize("x", [1.7, 0.6 + 1.1j, 3.2])
def test_trefoil_generic_meridian(x):
    params = KnotParams(1, 1)
    s, _ = s_from_x(x)
    (rep,) = riley_roots(params, s)
    y = rep.y
    assert y == pytest.approx(x * x - 1)
    coeff_a, coeff_b, coeff_c = theorem_coeffs(params, rep)
    assert coeff_a == pytest.approx(2)
    assert coeff_b == pytest.approx(-y - 4)
    assert coeff_c == pytest.approx(-y * y)
    result = delta_closed(params, rep)
    assert result.quad_mid == pytest.approx(-1)
    assert result.torsion == pytest.approx(3)
    assert cross_check(params, rep).passed


def test_closed_laurent_form():
    p = closed_laurent_form(2, 3, 0.5)
    np.testing.assert_allclose(p.coeffs, [-4, 10, -10, 4])
    assert p(1) == pytest.approx(0)


def test_closed_form_singular():
    params = KnotParams(1, 1)
    s, _ = s_from_x(np.sqrt(5 + 0j))
    with pytest.raises(ClosedFormSingular) as info:
        delta_closed(params, make_rep(params, s, 3))
    assert info.value.culprit == "y+2-x^2"


def test_torsion_from_delta():
    assert torsion_from_delta(T3_MINUS_ONE) == pytest.approx(-3)
    assert torsion_from_delta(T3_MINUS_ONE.shift(-4) * 2) == pytest.approx(-6)


def test_compare_deltas_unit_and_sign():
    report = compare_deltas(-T3_MINUS_ONE.shift(2), T3_MINUS_ONE)
    assert report.passed
    assert report.unit_shift == 2
    assert report.sign == -1
    assert not compare_deltas(T3_MINUS_ONE, LaurentPoly(0, [-1, 1, 0, 1])).passed
    assert not compare_deltas(LaurentPoly(0, [0]), T3_MINUS_ONE).passed


@pytest.mark.parametrize("m", SIGNED)
@pytest.mark.parametrize("n", SIGNED)
def test_pipelines_agree(m, n):
    params = KnotParams(m, n)
    s, _ = s_from_x(1.7)
    for rep in riley_roots(params, s):
        fox = delta_fox(params, rep)
        assert cross_check(params, rep).passed
        assert compare_deltas(fox, delta_lemma(params, rep)).discrepancy <= 1e-6
        closed = delta_closed(params, rep)
        assert torsion_limit(params, rep, delta=fox) == pytest.approx(-closed.torsion, rel=1e-6)


def test_figure_eight_parabolic():
    s, records = analyze_point(KnotParams(1, -1), x=2)
    assert s == pytest.approx(1)
    assert len(records) == 2
    for record in records:
        assert not record.failed
        delta = np.array(record.delta)
        assert len(delta) == 4
        np.testing.assert_allclose(delta, -delta[::-1], atol=1e-8 * np.max(np.abs(delta)))
        assert record.torsion_limit == pytest.approx(-record.torsion_closed, rel=1e-6)


def test_analyze_trefoil(trefoil):
    params, rep = trefoil
    record = analyze(params, rep)
    assert (record.m, record.n) == (1, 1)
    assert record.A == pytest.approx(2)
    assert record.B == pytest.approx(-7)
    assert record.C == pytest.approx(-9)
    assert record.torsion_closed == pytest.approx(3)
    assert record.torsion_limit == pytest.approx(-3)
    assert record.lemma_discrepancy <= 1e-8
    assert record.crosscheck.passed
    assert FLAG_REGULARITY_ASSUMED in record.flags
    assert not record.failed
    assert record.flagged == (FLAG_SIGN_FLIPPED in record.flags)


def test_analyze_perturbed_root_fails():
    _, records = analyze_point(KnotParams(1, 2), x=1.7, perturb=1e-3)
    assert records
    for record in records:
        assert FLAG_PERTURBED in record.flags
        assert FLAG_UNVERIFIED in record.flags
        assert record.failed
        assert record.flagged


def test_analyze_point_with_s():
    s, records = analyze_point(KnotParams(1, 1), s=2)
    assert s == 2
    assert records[0].x == pytest.approx(2.5)


def test_analyze_point_no_roots():
    with pytest.raises(NoNonabelianRoots):
        analyze_point(KnotParams(1, 1), s=np.exp(1j * np.pi / 6))


def test_run_grid_matches_across_jobs():
    args = ([1, -1], [1, 2], [2, 1.7])
    serial = run_grid(*args, njobs=1)
    parallel = run_grid(*args, njobs=2)
    assert [cell.key for cell in serial.cells] == [cell.key for cell in parallel.cells]
    assert len(serial.cells) == 8
    assert (serial.passed, serial.failed, serial.flagged) == (parallel.passed, parallel.failed, parallel.flagged)
    assert serial.ok
    assert serial.torsion_sign == 1
    assert serial.torsion_sign_consistent


def test_run_grid_skips_zero():
    summary = run_grid([0, 1], [0, 1], [2])
    assert len(summary.cells) == 1


def test_swapping_s_for_its_inverse():
    params = KnotParams(2, -1)
    s, s_inv = s_from_x(0.6 + 1.1j)
    _, first = analyze_point(params, s=s)
    _, second = analyze_point(params, s=s_inv)
    assert len(first) == len(second)
    for record in first:
        twin = min(second, key=lambda other: abs(other.y - record.y))
        assert twin.y == pytest.approx(record.y, rel=1e-7)
        assert twin.torsion_closed == pytest.approx(record.torsion_closed, rel=1e-6)
        assert twin.torsion_limit == pytest.approx(record.torsion_limit, rel=1e-6)


@pytest.mark.parametrize("m, n, x", [
    (1, 1, 3.2),
    (2, 1, 0.6 + 1.1j),
    (2, -1, 0.6 + 1.1j),
    (2, 2, 0.6 + 1.1j),
])
def test_fox_division_stays_exact(m, n, x):
    params = KnotParams(m, n)
    _, records = analyze_point(params, x=x)
    assert records
    for record in records:
        assert FLAG_FOX_INEXACT not in record.flags
        assert not record.failed, (record.y, record.flags, record.crosscheck)
        assert record.crosscheck.discrepancy <= 1e-8


def test_fox_quotient_at_large_meridian_trace():
    params = KnotParams(1, 1)
    s, _ = s_from_x(3.2)
    (rep,) = riley_roots(params, s)
    assert rep.y == pytest.approx(9.24)
    fox = delta_fox(params, rep)
    assert compare_deltas(fox, delta_closed(params, rep).laurent_form).passed
    assert torsion_limit(params, rep, delta=fox) == pytest.approx(-3, rel=1e-7)


def make_record(torsion_closed, torsion_limit):
    return OutputRecord(
        m=1, n=1, s=1 + 0j, x=2 + 0j, y=3 + 0j, z=3 + 0j,
        riley_residual=0.0, rep_residual=0.0,
        torsion_closed=torsion_closed, torsion_limit=torsion_limit,
    )


def test_torsion_sign():
    assert torsion_sign(make_record(3, -3), resolve_tolerances(None)) == 1
    assert torsion_sign(make_record(3, 3), resolve_tolerances(None)) == -1
    assert torsion_sign(make_record(3, 1), resolve_tolerances(None)) == 0
    assert torsion_sign(make_record(None, -3), resolve_tolerances(None)) is None


@pytest.mark.parametrize("limits, consistent", [
    ([-3, -5], True),
    ([-3, 5], False),
    ([-3, 1], False),
])
def test_summary_requires_one_torsion_sign(limits, consistent):
    closed = [3, 5]
    cell = CellResult(m=1, n=1, x=2 + 0j, records=[make_record(c, t) for c, t in zip(closed, limits)])
    summary = summarize([cell])
    assert summary.failed == 0
    assert summary.torsion_sign_consistent is consistent
    assert summary.ok is consistent
    assert summary.torsion_sign == (1 if consistent else None)
