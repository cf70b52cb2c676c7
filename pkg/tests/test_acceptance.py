"""Acceptance gate: every shipping criterion at its pinned tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS/FAIL
line per criterion.  Criterion 12b is a documented expected failure; the
analysis lives in the decisions ledger and in its docstring.
"""
import collections
import math

import numpy as np
import pytest
from scipy import stats
from scipy.integrate import quad

from limitshape import duality as D
from limitshape import geometry as G
from limitshape import maxshape as M
from limitshape import partitions as P
from limitshape import weights as W
from limitshape import wulff

SQRT6_OVER_PI = math.sqrt(6.0) / math.pi
V_MAX = math.pi * math.sqrt(2.0 / 3.0)


def announce(cid: str, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {cid}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {cid}: {detail}"


@pytest.fixture(scope="module")
def corollary_report(entropy_maximizer_4096):
    lam1, result = entropy_maximizer_4096
    reference = M.limit_curve_polyline(0.02, 10.0)
    dist = G.sup_distance(result.curve, reference, (0.05, 5.0))
    return M.CorollaryReport(dist, lam1, result.volume,
                             result.functional_value, 4096, (0.05, 5.0))


@pytest.fixture(scope="module")
def experiment_1e4():
    return P.limit_shape_experiment(10 ** 4, 200, 7)


@pytest.fixture(scope="module")
def experiment_1e3():
    return P.limit_shape_experiment(1000, 200, 7)


def test_criterion_01_corollary_reproduction(corollary_report):
    """Constructed entropy maximizer matches the limit curve to 1e-3."""
    rep = corollary_report
    announce("1", rep.sup_distance <= 1e-3,
             f"sup distance {rep.sup_distance:.3e} <= 1e-3 on [0.05, 5] "
             f"at m = 4096")


def test_criterion_02_reference_curve_unit_area():
    """Quadrature oracle: the limit curve encloses exactly unit area."""
    oracle = quad(lambda u: -math.log1p(-math.exp(-u)), 0.0, np.inf)[0]
    area = quad(lambda x: float(M.limit_curve(x)), 0.0, np.inf)[0]
    ok = abs(oracle - math.pi ** 2 / 6.0) <= 1e-6 and abs(area - 1.0) <= 1e-6
    announce("2", ok,
             f"quadrature {oracle:.9f} vs pi^2/6, curve area {area:.9f}")


def test_criterion_03_normalization_constants(corollary_report):
    """lambda1 and the maximal functional value hit the closed forms."""
    rep = corollary_report
    ok = (abs(rep.lambda1 - SQRT6_OVER_PI) <= 1e-4
          and abs(rep.v_eta - V_MAX) <= 1e-3)
    announce("3", ok,
             f"lambda1 {rep.lambda1:.6f} (target {SQRT6_OVER_PI:.6f}), "
             f"v_eta {rep.v_eta:.6f} (target {V_MAX:.6f})")


def test_criterion_04_hardy_ramanujan_cross_check():
    """Exact counts track the asymptotic whose coefficient is v_eta."""
    gaps = [P.hardy_ramanujan_check(n)[2] for n in (5000, 10 ** 4)]
    fit = P.hardy_ramanujan_fit([2500, 5000, 10 ** 4])
    ok = max(gaps) <= 2.0 and abs(fit["slope"] - 2.565) <= 0.01
    announce("4", ok,
             f"gaps {gaps[0]:.4f}, {gaps[1]:.4f} <= 2; corrected slope "
             f"{fit['slope']:.5f} = 2.565 +/- 0.01")


def test_criterion_05_wulff_isotropic_and_l1():
    lam, result = wulff.normalize_lambda(W.constant(1.0), 1.0, 4096)
    body_l1 = wulff.wulff_body(W.l1_norm(), 1.0, 4096)
    lam_l1, _ = wulff.normalize_lambda(W.l1_norm(), 1.0, 4096)
    area_gap = abs(G.polygon_area(body_l1) - 4.0)
    ok = (abs(lam - 1.0 / math.sqrt(math.pi)) <= 1e-4
          and abs(result.functional_value - 2.0 * math.sqrt(math.pi)) <= 1e-3
          and area_gap <= 1e-9 and abs(lam_l1 - 0.5) <= 1e-9)
    announce("5", ok,
             f"lambda1 {lam:.6f} vs 1/sqrt(pi), W {result.functional_value:.6f}"
             f" vs 2 sqrt(pi), L1 area gap {area_gap:.2e}")


def test_criterion_06_homothety_laws():
    w1 = wulff.build_result(W.constant(1.0), 1.0, 1024)
    w3 = wulff.build_result(W.constant(1.0), 3.0, 1024)
    m1 = M.build_result(W.entropy(), 1.0, 1024)
    m2 = M.build_result(W.entropy(), 2.0, 1024)
    errs = [
        abs(w3.area - 9.0 * w1.area) / (9.0 * w1.area),
        abs(w3.functional_value - 3.0 * w1.functional_value)
        / (3.0 * w1.functional_value),
        abs(m2.volume - 4.0 * m1.volume) / (4.0 * m1.volume),
        abs(m2.functional_value - 2.0 * m1.functional_value)
        / (2.0 * m1.functional_value),
    ]
    announce("6", max(errs) <= 1e-10,
             f"max relative homothety error {max(errs):.2e} <= 1e-10")


def test_criterion_07_triangle_identity():
    rep = M.triangle_identity_check(W.entropy(), SQRT6_OVER_PI, (0.05, 5.0),
                                    4096)
    devs = [M.triangle_identity_check(W.entropy(), SQRT6_OVER_PI, (0.1, 3.0),
                                      m).deviation
            for m in (256, 1024, 4096)]
    r1, r2 = devs[0] / devs[1], devs[1] / devs[2]
    ok = rep.deviation <= 1e-4 and 8.0 <= r1 <= 24.0 and 8.0 <= r2 <= 24.0
    announce("7", ok,
             f"deviation {rep.deviation:.3e} <= 1e-4 at m = 4096; decay "
             f"ratios {r1:.1f}, {r2:.1f} in [8, 24]")


def test_criterion_08_duality_identity():
    inst = D.DualityInstance(W.entropy(), 10.0, (1.0, 5.0), (5.0, 1.0))
    curves = D.random_monotone_curves((1.0, 5.0), (5.0, 1.0), 100, 3)
    rep = D.duality_identity_check(inst, curves)
    ok = (abs(rep.constant - 80.0) <= 1e-12
          and rep.max_relative_deviation <= 1e-9
          and rep.disagreements == 0)
    announce("8", ok,
             f"constant {rep.constant:g}, max relative deviation "
             f"{rep.max_relative_deviation:.2e} <= 1e-9, "
             f"{rep.disagreements} ranking disagreements")


def test_criterion_09_optimality_harnesses():
    wrep = wulff.minimality_harness(W.constant(1.0), trials=1000, seed=2026,
                                    m=1024)
    mrep = M.maximality_harness(W.entropy(), trials=1000, seed=2026, m=4096)
    ok = (wrep.passed and wrep.worst_margin >= -wrep.tolerance
          and mrep.passed and mrep.worst_excess <= mrep.tolerance)
    announce("9", ok,
             f"minimality margin {wrep.worst_margin:.2e} >= -{wrep.tolerance:.1e};"
             f" maximality excess {mrep.worst_excess:.2e} <= {mrep.tolerance:.1e}"
             f" (1000 trials each)")


def test_criterion_10_divergence_dichotomy():
    verdict = M.detect_divergence(W.sqrt_product())
    results = {g: M.divergence_witness(W.sqrt_product(), g)
               for g in (0.1, 0.01)}
    ok = verdict.is_divergent and all(
        abs(r.volume - 1.0) <= 1e-6 and r.value > 2.0 / (3.0 * g)
        for g, r in results.items())
    announce("10", ok,
             "divergent; witness values "
             + ", ".join(f"{r.value:.2f} > {2.0 / (3.0 * g):.2f} (gamma={g:g})"
                         for g, r in results.items())
             + "; volumes within 1e-6")


def test_criterion_11_sampler_exactness():
    space = P.enumerate_partitions(8)
    counts = collections.Counter(
        P.sample_uniform_exact(8, P._derived_int_seed(42, i)).parts
        for i in range(22000))
    chi_p = stats.chisquare([counts.get(q.parts, 0) for q in space]).pvalue
    boltz, _ = P.sample_boltzmann_many(500, 5000, 11)
    exact = [P.sample_uniform_exact(500, P._derived_int_seed(13, i))
             for i in range(5000)]
    ks_p = stats.ks_2samp([b.parts[0] for b in boltz],
                          [e.parts[0] for e in exact]).pvalue
    ok = (chi_p > 0.001 and ks_p > 0.001
          and P.partition_count(8) == 22 == len(space)
          and P.partition_count(50) == 204226)
    announce("11", ok,
             f"chi-square p = {chi_p:.3f} > 0.001 (22000 draws); KS p = "
             f"{ks_p:.3f} > 0.001 (n = 500); p(8) = 22, p(50) = 204226")


def test_criterion_12a_mean_profile_concentration(experiment_1e4):
    rep = experiment_1e4
    announce("12a", rep.mean_sup_distance <= 0.05,
             f"mean-profile sup distance {rep.mean_sup_distance:.4f} <= 0.05 "
             f"at n = 1e4, 200 samples, seed 7")


@pytest.mark.xfail(
    strict=True,
    reason="spec calibration defect: profile fluctuations at n = 1000 are "
           "of scale n**-0.25 = 0.178 ~ eps, so the within-0.15 probability "
           "is ~0.1 under the declared sup metric (and ~0.7 under a planar "
           "point-to-curve metric); no defensible metric reaches 0.9 at "
           "this n.  See the decisions ledger.")
def test_criterion_12b_fraction_within_eps_at_n1000(experiment_1e3):
    rep = experiment_1e3
    frac = rep.fraction_within(0.15)
    announce("12b", frac >= 0.9,
             f"fraction within 0.15 at n = 1000 is {frac:.3f} (spec wants "
             f">= 0.9; unattainable at this n, see ledger)")


def test_criterion_12c_concentration_trend(experiment_1e3, experiment_1e4):
    """Supporting check: concentration improves with n, as claimed."""
    f3 = experiment_1e3.fraction_within(0.15)
    f4 = experiment_1e4.fraction_within(0.15)
    ok = (f4 > f3
          and experiment_1e4.mean_sup_distance
          < experiment_1e3.mean_sup_distance)
    announce("12c", ok,
             f"fraction within 0.15 rises {f3:.2f} -> {f4:.2f} and the "
             f"mean-profile distance falls "
             f"{experiment_1e3.mean_sup_distance:.4f} -> "
             f"{experiment_1e4.mean_sup_distance:.4f} as n grows")


def test_criterion_13_entropy_normalization_consistency():
    gap11 = P.entropy_limit_check(1, 1, 1000)[2]
    gap34 = P.entropy_limit_check(3, 4, 1000)[2]
    rng = np.random.default_rng(23)
    w = W.entropy()
    worst = 0.0
    checked = 0
    while checked < 100:
        k = int(rng.integers(2, 40))
        xs = np.sort(rng.uniform(0.0, 5.0, k))
        ys = np.sort(rng.uniform(0.0, 5.0, k))[::-1]
        pts = np.column_stack([xs, ys])
        d = np.abs(np.diff(pts, axis=0)).max(axis=1)
        pts = pts[np.concatenate([[True], d > 1e-9])]
        if len(pts) < 2:
            continue
        c = G.MonotoneCurve(pts)
        worst = max(worst, abs(P.eq17_integral(c)
                               - G.functional_on_curve(w, c)))
        checked += 1
    ok = gap11 <= 0.01 and gap34 <= 0.01 and worst <= 1e-9
    announce("13", ok,
             f"staircase-count gaps {gap11:.4f}, {gap34:.4f} <= 0.01; "
             f"graph-form vs arc-form worst gap {worst:.2e} <= 1e-9 "
             f"on 100 random curves")
