import math

import numpy as np
import pytest

from limitshape import duality as D
from limitshape import geometry as G
from limitshape import weights as W
from limitshape.errors import BoxTooSmallError, DomainError

P1, P2 = (1.0, 5.0), (5.0, 1.0)


def make_instance(eta=None, box=10.0):
    return D.DualityInstance(eta or W.entropy(), box, P1, P2)


class TestReflectedWeight:
    def test_diagonal_value(self):
        w = D.t_n_weight(make_instance())
        expect = 10.0 * math.sqrt(2.0) - math.sqrt(2.0) * math.log(2.0)
        assert float(w.value(-3 * math.pi / 4)) == pytest.approx(expect,
                                                                 abs=1e-12)

    def test_degenerate_zero_weight(self):
        inst = D.DualityInstance(W.constant(0.0, W.MAXIMIZING), 10.0, P1, P2)
        w = D.t_n_weight(inst)
        assert float(w.value(math.pi)) == pytest.approx(10.0, abs=1e-12)

    def test_reflection_symmetry(self):
        w = D.t_n_weight(make_instance())
        rng = np.random.default_rng(4)
        th = rng.uniform(0.0, math.pi / 2, 256)
        base = np.asarray(w.value(th))
        for reflected in (math.pi - th, -th, math.pi + th):
            assert np.max(np.abs(np.asarray(w.value(reflected)) - base)) \
                <= 1e-12

    def test_evenness_validates(self):
        assert W.validate(D.t_n_weight(make_instance())).valid

    def test_box_too_small(self):
        with pytest.raises(BoxTooSmallError):
            D.t_n_weight(D.DualityInstance(W.entropy(), 0.5,
                                           (0.1, 0.4), (0.4, 0.1)))

    def test_positive_whenever_box_exceeds_twice_max(self):
        eta = W.entropy()
        box = 2.0 * eta.max_value() + 1e-6
        inst = D.DualityInstance(eta, box, (0.2, box - 0.2), (box - 0.2, 0.2))
        w = D.t_n_weight(inst)
        th = np.linspace(0.0, 2 * math.pi, 4096, endpoint=False)
        assert np.asarray(w.value(th)).min() > 0.0

    def test_endpoint_validation(self):
        with pytest.raises(DomainError):
            D.DualityInstance(W.entropy(), 10.0, (5.0, 1.0), (1.0, 5.0))
        with pytest.raises(DomainError):
            D.DualityInstance(W.entropy(), 10.0, (0.0, 5.0), (5.0, 1.0))


class TestIdentity:
    def test_hundred_staircases(self):
        inst = make_instance()
        curves = D.random_monotone_curves(P1, P2, 100, 3)
        rep = D.duality_identity_check(inst, curves)
        assert rep.constant == pytest.approx(80.0, abs=1e-12)
        assert rep.max_relative_deviation <= 1e-9
        assert rep.disagreements == 0
        assert rep.passed

    def test_constant_independent_of_weight(self):
        curves = D.random_monotone_curves(P1, P2, 20, 5)
        for eta in (W.entropy(), W.sqrt_product()):
            rep = D.duality_identity_check(make_instance(eta), curves)
            assert rep.constant == pytest.approx(80.0, abs=1e-12)
            assert rep.max_relative_deviation <= 1e-9

    def test_segment_vs_lshape(self):
        inst = make_instance()
        segment = G.MonotoneCurve(np.asarray([P1, P2]))
        lshape = G.MonotoneCurve(np.asarray([P1, (P2[0], P1[1]), P2]))
        rep = D.duality_identity_check(inst, [segment, lshape])
        assert abs(rep.sums[0] - rep.sums[1]) <= 1e-12 * rep.constant

    def test_endpoint_mismatch_rejected(self):
        inst = make_instance()
        wrong = G.MonotoneCurve(np.asarray([[1.0, 4.0], [5.0, 1.0]]))
        with pytest.raises(DomainError):
            D.duality_identity_check(inst, [wrong])

    def test_report_json(self):
        rep = D.duality_identity_check(
            make_instance(), D.random_monotone_curves(P1, P2, 5, 1))
        data = rep.to_json_dict()
        assert data["constant"] == pytest.approx(80.0)
        assert data["disagreements"] == 0


class TestTransfer:
    def test_entropy_arc(self):
        rep = D.minimax_transfer_check(W.entropy(), trials=200, seed=1, m=2048)
        assert rep.passed
        assert rep.disagreements == 0
        assert rep.max_value_excess <= rep.tolerance
        assert rep.max_dual_shortfall <= rep.tolerance
        # strict convexity: the equal-area chord blend loses by a margin
        assert rep.chord_margin > rep.tolerance

    def test_orderings_coincide_exactly(self):
        rep = D.minimax_transfer_check(W.entropy(), trials=60, seed=8, m=512)
        # the identity makes the V-excess and W-shortfall literally equal
        assert rep.max_value_excess == pytest.approx(rep.max_dual_shortfall,
                                                     abs=1e-9)
