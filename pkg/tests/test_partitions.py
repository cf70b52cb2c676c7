import collections
import math

import numpy as np
import pytest
from scipy import stats

from limitshape import geometry as G
from limitshape import partitions as P
from limitshape import weights as W
from limitshape.errors import DomainError, EnumerationLimitError
from limitshape.maxshape import V_MAX_ENTROPY, limit_curve


def brute_force_paths(a, b) -> int:
    """DFS oracle for monotone lattice paths (right or down only)."""
    if a == b:
        return 1
    total = 0
    if a[0] < b[0]:
        total += brute_force_paths((a[0] + 1, a[1]), b)
    if a[1] > b[1]:
        total += brute_force_paths((a[0], a[1] - 1), b)
    return total


def dp_partition_count(n: int) -> int:
    """Independent bounded-largest-part DP oracle for p(n)."""
    table = [[0] * (n + 1) for _ in range(n + 1)]
    for k in range(n + 1):
        table[0][k] = 1
    for m in range(1, n + 1):
        for k in range(1, n + 1):
            table[m][k] = table[m][k - 1] + (table[m - k][min(k, m - k)]
                                             if m >= k else 0)
    return table[n][n]


class TestCounting:
    def test_small_values(self):
        assert [P.partition_count(k) for k in range(9)] == \
            [1, 1, 2, 3, 5, 7, 11, 15, 22]

    def test_p8_against_enumeration(self):
        assert P.partition_count(8) == len(P.enumerate_partitions(8)) == 22

    def test_p50_against_dp_oracle(self):
        assert P.partition_count(50) == dp_partition_count(50) == 204226

    def test_negative_rejected(self):
        with pytest.raises(DomainError):
            P.partition_count(-1)

    def test_enumerate_order(self):
        assert [q.parts for q in P.enumerate_partitions(3)] == \
            [(3,), (2, 1), (1, 1, 1)]
        assert [q.parts for q in P.enumerate_partitions(1)] == [(1,)]

    def test_enumerate_limit(self):
        with pytest.raises(EnumerationLimitError):
            P.enumerate_partitions(31)


class TestExactSampler:
    def test_n1_always_single(self):
        for i in range(20):
            assert P.sample_uniform_exact(1, i).parts == (1,)

    def test_n2_balanced(self):
        draws = [P.sample_uniform_exact(2, P._derived_int_seed(7, i)).parts
                 for i in range(10000)]
        freq = sum(1 for p in draws if p == (2,)) / len(draws)
        assert abs(freq - 0.5) <= 0.02

    @pytest.mark.parametrize("n,draws", [(6, 8000), (10, 12000)])
    def test_chi_square_uniformity(self, n, draws):
        space = P.enumerate_partitions(n)
        counts = collections.Counter(
            P.sample_uniform_exact(n, P._derived_int_seed(n, i)).parts
            for i in range(draws))
        observed = [counts.get(q.parts, 0) for q in space]
        assert stats.chisquare(observed).pvalue > 0.001

    def test_refuses_above_table_bound(self):
        with pytest.raises(EnumerationLimitError):
            P.sample_uniform_exact(P.EXACT_SAMPLER_LIMIT + 1, 0)

    def test_sum_invariant(self):
        for i in range(50):
            p = P.sample_uniform_exact(137, P._derived_int_seed(3, i))
            assert p.n == 137
            assert sum(k * r for k, r in p.multiplicities().items()) == 137


class TestBoltzmannSampler:
    def test_sum_exact_at_large_n(self):
        p = P.sample_boltzmann(10 ** 4, 5)
        assert p.n == 10 ** 4

    def test_ks_against_exact_sampler(self):
        draws, diag = P.sample_boltzmann_many(500, 1500, 11)
        exact = [P.sample_uniform_exact(500, P._derived_int_seed(13, i))
                 for i in range(1500)]
        ks = stats.ks_2samp([b.parts[0] for b in draws],
                            [e.parts[0] for e in exact])
        assert ks.pvalue > 0.001
        assert 0.0 < diag.acceptance_rate < 1.0

    def test_minimum_size(self):
        with pytest.raises(DomainError):
            P.sample_boltzmann(50, 0)


class TestProfiles:
    def test_profile_311(self):
        prof = P.profile(P.Partition((3, 1, 1)))
        assert prof.phi([0.5, 1.5, 2.5, 3.5]).tolist() == [3.0, 1.0, 1.0, 0.0]

    def test_staircase_of_single_cell(self):
        curve = P.profile(P.Partition((1,))).to_curve()
        assert curve.points.tolist() == [[0, 1], [1, 1], [1, 0]]

    def test_profile_area_is_n(self):
        for i in range(25):
            p = P.sample_uniform_exact(60, P._derived_int_seed(17, i))
            assert G.curve_volume(P.profile(p).to_curve()) == pytest.approx(
                60.0, abs=1e-9)

    def test_scaled_area_is_one(self):
        p = P.sample_uniform_exact(240, 3)
        scaled = P.scale(P.profile(p))
        assert G.curve_volume(scaled.curve) == pytest.approx(1.0, abs=1e-12)

    def test_profile_values_match_curve(self):
        p = P.Partition((4, 2, 2, 1))
        xs = np.asarray([0.1, 0.5, 0.9, 1.2])
        direct = P.profile_values(p, xs)
        curve = P.scale(P.profile(p)).curve
        assert np.allclose(direct, G.curve_eval(curve, xs))


class TestStaircaseCounting:
    @pytest.mark.parametrize("a,b", [((0, 1), (1, 0)), ((0, 2), (2, 0)),
                                     ((1, 4), (3, 1)), ((0, 3), (4, 0))])
    def test_against_brute_force(self, a, b):
        assert P.staircase_count(a, b) == brute_force_paths(a, b)

    def test_degenerate(self):
        assert P.staircase_count((2, 2), (2, 2)) == 1

    def test_orientation_error(self):
        with pytest.raises(DomainError):
            P.staircase_count((1, 0), (0, 1))

    @pytest.mark.parametrize("a,b", [(3, 3), (4, 6), (6, 6)])
    def test_counts_profiles_in_box(self, a, b):
        # partitions fitting in an a-wide, b-tall box vs lattice paths

        def count_in_box(width, height, largest):
            # weakly decreasing sequences of the given height, parts <= width
            if height == 0:
                return 1
            return sum(count_in_box(width, height - 1, part)
                       for part in range(min(width, largest) + 1))

        assert count_in_box(a, b, a) == P.staircase_count((0, b), (a, 0))


class TestEntropyLimit:
    def test_diagonal_slope(self):
        emp, lim, gap = P.entropy_limit_check(1, 1, 1000)
        assert lim == pytest.approx(math.sqrt(2.0) * math.log(2.0), abs=1e-12)
        assert gap <= 0.01

    def test_three_four_slope(self):
        emp, lim, gap = P.entropy_limit_check(3, 4, 1000)
        assert lim == pytest.approx(0.9560713465806603, abs=1e-12)
        assert gap <= 0.01

    def test_doubling_halves_gap(self):
        _, _, g1 = P.entropy_limit_check(1, 1, 500)
        _, _, g2 = P.entropy_limit_check(1, 1, 1000)
        assert g1 / g2 == pytest.approx(2.0, rel=0.2)


class TestEq17:
    def test_diagonal_segment(self):
        c = G.MonotoneCurve(np.asarray([[0.0, 1.0], [1.0, 0.0]]))
        assert P.eq17_integral(c) == pytest.approx(2 * math.log(2), abs=1e-12)

    def test_limit_curve_value(self):
        xs = np.geomspace(1.2e-5, 9.0, 4096)
        c = G.MonotoneCurve(np.column_stack([xs, limit_curve(xs)]))
        assert P.eq17_integral(c) == pytest.approx(V_MAX_ENTROPY, abs=1e-3)

    def test_axis_staircase_zero(self):
        stair = P.profile(P.Partition((3, 2, 2))).to_curve()
        assert P.eq17_integral(stair) == 0.0

    def test_matches_entropy_functional(self):
        rng = np.random.default_rng(23)
        w = W.entropy()
        for _ in range(100):
            k = int(rng.integers(2, 40))
            xs = np.sort(rng.uniform(0.0, 5.0, k))
            ys = np.sort(rng.uniform(0.0, 5.0, k))[::-1]
            pts = np.column_stack([xs, ys])
            d = np.abs(np.diff(pts, axis=0)).max(axis=1)
            pts = pts[np.concatenate([[True], d > 1e-9])]
            if len(pts) < 2:
                continue
            c = G.MonotoneCurve(pts)
            assert abs(P.eq17_integral(c) - G.functional_on_curve(w, c)) <= 1e-9


class TestHardyRamanujan:
    def test_ln_p50(self):
        ln_p, _, _ = P.hardy_ramanujan_check(50)
        assert ln_p == pytest.approx(math.log(204226), abs=1e-12)

    def test_gap_small_at_desk_scale(self):
        for n in (5000, 10000):
            _, _, gap = P.hardy_ramanujan_check(n)
            assert gap <= 2.0

    def test_corrected_fit_slope(self):
        fit = P.hardy_ramanujan_fit([2500, 5000, 10000])
        assert fit["slope"] == pytest.approx(V_MAX_ENTROPY, abs=0.01)
        # raw regression is biased low by the log prefactor
        assert fit["raw_slope"] < fit["slope"] - 0.02

    def test_chord_counts_track_maximal_entropy(self):
        # summed log staircase counts along the limit curve approach
        # sqrt(N) * v for diagrams of area N
        n = 10 ** 4
        root = math.sqrt(n)
        xs = [0.01, 0.35, 1.0, 2.2, 3.4]
        pts = [(int(round(root * x)), int(round(root * float(limit_curve(x)))))
               for x in xs]
        total = 0.0
        for a, b in zip(pts, pts[1:]):
            total += math.log(P.staircase_count(a, b))
        assert total == pytest.approx(root * V_MAX_ENTROPY, rel=0.05)


class TestExperiment:
    def test_smoke_small(self):
        rep = P.limit_shape_experiment(200, 3, 0)
        assert rep.below_validity_floor
        assert len(rep.distances) == 3

    def test_mean_profile_at_n1000(self):
        rep = P.limit_shape_experiment(1000, 200, 7)
        assert rep.mean_sup_distance <= 0.05
        assert rep.metric == "sup_distance_window"

    def test_minimum_n(self):
        with pytest.raises(DomainError):
            P.limit_shape_experiment(50, 10, 0)

    def test_report_round_trip(self):
        rep = P.limit_shape_experiment(150, 2, 1)
        data = rep.to_json_dict()
        assert data["n"] == 150 and len(data["distances"]) == 2
        assert data["metric"] == "sup_distance_window"
