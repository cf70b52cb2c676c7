import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from limitshape import weights as W
from limitshape.errors import DomainError, WeightSpecError

SQRT2_LN2 = math.sqrt(2.0) * math.log(2.0)


class TestEvaluate:
    def test_constant(self):
        w = W.constant(1.0)
        for theta in (0.0, 0.3, 2.0, -1.0, 6.0):
            assert W.evaluate(w, theta) == 1.0

    def test_l1_at_diagonal(self):
        assert W.evaluate(W.l1_norm(), math.pi / 4) == pytest.approx(math.sqrt(2.0))

    def test_sqrt_product_at_diagonal(self):
        # support distance of the hyperbola x*y = 1 along the diagonal
        assert W.evaluate(W.sqrt_product(), math.pi / 4) == pytest.approx(
            math.sqrt(2.0), abs=1e-12)

    def test_entropy_at_diagonal(self):
        assert W.entropy_weight(math.pi / 4) == pytest.approx(SQRT2_LN2, abs=1e-12)

    def test_entropy_at_3_4_direction(self):
        d = W.Direction.from_components(0.6, 0.8)
        assert W.entropy_weight(d) == pytest.approx(0.9560713465806603, abs=1e-12)

    def test_entropy_boundary_decay(self):
        w = W.entropy()
        assert float(w.value_components(1.0, 0.0)) == 0.0
        assert float(w.value_components(0.0, 1.0)) == 0.0
        assert float(w.value(1e-8)) < 1e-6

    def test_maximizing_domain_error(self):
        with pytest.raises(DomainError):
            W.evaluate(W.entropy(), 2.0)

    def test_direction_unit_invariant(self):
        with pytest.raises(DomainError):
            W.Direction.from_components(0.6, 0.9)
        d = W.Direction(0.7)
        assert d.n1 ** 2 + d.n2 ** 2 == pytest.approx(1.0, abs=1e-12)


class TestDerivative:
    def test_constant_zero(self):
        assert W.derivative(W.constant(2.5), 1.1) == 0.0

    def test_entropy_critical_at_diagonal(self):
        assert abs(W.derivative(W.entropy(), math.pi / 4)) < 1e-12

    def test_sqrt_product_critical_at_diagonal(self):
        assert abs(W.derivative(W.sqrt_product(), math.pi / 4)) < 1e-12

    @pytest.mark.parametrize("factory", [W.entropy, W.sqrt_product])
    def test_finite_difference_agreement(self, factory):
        w = factory()
        h = 1e-6
        for theta in np.linspace(0.15, math.pi / 2 - 0.15, 23):
            fd = (w.value(theta + h) - w.value(theta - h)) / (2 * h)
            assert w.derivative(theta) == pytest.approx(fd, abs=1e-6)

    def test_l1_finite_difference_agreement(self):
        w = W.l1_norm()
        h = 1e-6
        for theta in (0.3, 1.2, 2.2, 4.0):
            fd = (w.value(theta + h) - w.value(theta - h)) / (2 * h)
            assert w.derivative(theta) == pytest.approx(fd, abs=1e-6)

    def test_tabulated_boundary_domain_error(self):
        w = W.tabulate(W.entropy(), 512)
        lo, hi = w.domain()
        with pytest.raises(DomainError):
            w.derivative(lo)

    def test_entropy_boundary_domain_error(self):
        with pytest.raises(DomainError):
            W.derivative(W.entropy(), 0.0)


class TestValidate:
    def test_constant_minimizing_valid(self):
        assert W.validate(W.constant(1.0)).valid

    def test_constant_maximizing_invalid(self):
        report = W.validate(W.constant(1.0, W.MAXIMIZING))
        assert not report.valid
        assert any("boundary decay" in v for v in report.violations)

    def test_entropy_valid(self):
        assert W.validate(W.entropy()).valid

    def test_sqrt_product_valid(self):
        assert W.validate(W.sqrt_product()).valid

    def test_l1_valid(self):
        assert W.validate(W.l1_norm()).valid

    def test_negative_constant_invalid(self):
        report = W.validate(W.constant(-1.0))
        assert not report.valid

    def test_report_is_json_ready(self):
        d = W.validate(W.entropy()).to_json_dict()
        assert d["valid"] is True and d["problem_class"] == "maximizing"


class TestInvariants:
    def test_evenness_minimizing(self):
        rng = np.random.default_rng(0)
        thetas = rng.uniform(0.0, 2 * math.pi, 1024)
        for w in (W.constant(1.3), W.l1_norm()):
            gap = np.abs(np.asarray(w.value(thetas))
                         - np.asarray(w.value(thetas + math.pi)))
            assert gap.max() <= 1e-12

    def test_entropy_symmetry(self):
        rng = np.random.default_rng(1)
        thetas = rng.uniform(1e-6, math.pi / 2 - 1e-6, 1024)
        w = W.entropy()
        gap = np.abs(np.asarray(w.value(thetas))
                     - np.asarray(w.value(math.pi / 2 - thetas)))
        assert gap.max() <= 1e-12

    def test_entropy_bound_and_argmax(self):
        w = W.entropy()
        grid = np.linspace(1e-9, math.pi / 2 - 1e-9, 4097)
        vals = np.asarray(w.value(grid))
        assert vals.min() >= 0.0
        assert vals.max() <= SQRT2_LN2 + 1e-12
        argmax = grid[int(np.argmax(vals))]
        assert argmax == pytest.approx(math.pi / 4, abs=2 * (grid[1] - grid[0]))

    def test_tabulated_round_trip(self):
        # the monotone-cubic interpolant clamps the derivative at the
        # weight's interior maximum, so the error there is O(h^2); away
        # from that single angle the round trip is far below 1e-8
        base = W.entropy()
        tab = W.tabulate(base, 4096)
        lo, hi = 0.05, math.pi / 2 - 0.05
        grid = np.linspace(lo, hi, 10001)
        gap = np.abs(np.asarray(tab.value(grid)) - np.asarray(base.value(grid)))
        assert gap.max() <= 1e-7
        away = np.abs(grid - math.pi / 4) > 0.02
        assert gap[away].max() <= 1e-8

    @given(st.floats(min_value=0.01, max_value=1.55))
    @settings(max_examples=50, deadline=None)
    def test_entropy_one_homogeneous_components(self, theta):
        w = W.entropy()
        n1, n2 = math.cos(theta), math.sin(theta)
        v1 = float(w.value_components(n1, n2))
        v3 = float(w.value_components(3.0 * n1, 3.0 * n2))
        assert v3 == pytest.approx(3.0 * v1, rel=1e-12)


class TestTabulatedAndSpecs:
    def test_csv_round_trip(self, tmp_path):
        path = tmp_path / "weight.csv"
        grid = np.linspace(0.01, math.pi / 2 - 0.01, 64)
        vals = np.asarray(W.entropy().value(grid))
        rows = ["theta_radians,value"] + [f"{t:.17g},{v:.17g}"
                                          for t, v in zip(grid, vals)]
        path.write_text("\n".join(rows) + "\n", encoding="utf-8")
        w = W.load_tabulated_csv(path, W.MAXIMIZING)
        assert np.allclose(np.asarray(w.value(grid)), vals)

    def test_csv_header_required(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0.1,0.5\n0.2,0.6\n", encoding="utf-8")
        with pytest.raises(WeightSpecError):
            W.load_tabulated_csv(path, W.MAXIMIZING)

    def test_csv_strictly_increasing(self, tmp_path):
        path = tmp_path / "bad2.csv"
        path.write_text("theta,value\n0.2,0.5\n0.1,0.6\n", encoding="utf-8")
        with pytest.raises(WeightSpecError):
            W.load_tabulated_csv(path, W.MAXIMIZING)

    def test_from_spec_grammar(self):
        assert W.from_spec("constant:2", W.MINIMIZING).value(0.3) == 2.0
        assert W.from_spec("l1", W.MINIMIZING).kind == "l1"
        assert W.from_spec("entropy", W.MAXIMIZING).kind == "entropy"
        assert W.from_spec("sqrt_product", W.MAXIMIZING).kind == "sqrt_product"
        with pytest.raises(WeightSpecError):
            W.from_spec("nope", W.MINIMIZING)
        with pytest.raises(WeightSpecError):
            W.from_spec("missing_file.csv", W.MAXIMIZING)

    def test_tabulated_outside_grid_domain_error(self):
        w = W.tabulate(W.entropy(), 256)
        lo, _ = w.domain()
        with pytest.raises(DomainError):
            w.value(lo - 1e-3)

    def test_bare_entropy_comparison_weight(self):
        w = W.bare_entropy()
        assert W.validate(w).valid
        assert float(w.value(math.pi / 4)) == pytest.approx(math.log(2.0),
                                                            abs=1e-6)

    def test_tiny_grid_linear_fallback(self):
        w = W.tabulated([0.2, 0.8, 1.4], [0.1, 0.5, 0.2], W.MAXIMIZING)
        # midpoint of the first cell interpolates linearly
        assert float(w.value(0.5)) == pytest.approx(0.3, abs=1e-12)
