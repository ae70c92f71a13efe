"""Fuzzy controller unit tests with independent oracles.

The hand-evaluated membership formulas below intentionally duplicate the
declared parametrization (centers, reach-based sigmas) rather than calling
into the package, so the expected values stay independent of the code under
test.
"""

import math

import numpy as np
import pytest

from bcvsim.fuzzy import (
    DEFAULT_CENTERS,
    LABELS,
    LookupTable,
    MamdaniController,
    RuleTable,
    Triangle,
    Gaussian,
    Shoulder,
    make_variable,
    negate_label,
)

HWHM = math.sqrt(2.0 * math.log(2.0))


def sigma_for(reach):
    return reach / HWHM


@pytest.fixture(scope="module")
def controller():
    return MamdaniController()


@pytest.fixture(scope="module")
def _lut_cache(controller):
    return LookupTable.build(controller)


# -- membership shapes ----------------------------------------------------

def test_triangle_peak_and_feet():
    tri = Triangle(-0.6, -0.26, 0.0)
    assert tri.mu(-0.26) == 1.0
    assert tri.mu(-0.6) == 0.0
    assert tri.mu(0.0) == 0.0
    assert tri.mu(-0.43) == pytest.approx(0.5, abs=1e-12)


def test_gaussian_half_maximum_at_reach():
    g = Gaussian(0.6, sigma_for(0.2), sigma_for(0.17))
    assert g.mu(0.6) == 1.0
    assert g.mu(0.6 - 0.2) == pytest.approx(0.5, abs=1e-12)
    assert g.mu(0.6 + 0.17) == pytest.approx(0.5, abs=1e-12)


def test_shoulder_saturates_beyond_center():
    sh = Shoulder(1.0, sigma_for(0.2), side=+1)
    assert sh.mu(1.0) == 1.0
    assert sh.mu(1.5) == 1.0
    assert sh.mu(0.8) == pytest.approx(0.5, abs=1e-12)
    lo = Shoulder(-1.0, sigma_for(0.2), side=-1)
    assert lo.mu(-1.2) == 1.0
    assert lo.mu(-0.8) == pytest.approx(0.5, abs=1e-12)


def test_membership_values_bounded(controller):
    zs = np.linspace(-1.3, 1.3, 400)
    for var in (controller.deviation, controller.rate, controller.output):
        for mf in var.mfs:
            vals = [mf.mu(z) for z in zs]
            assert min(vals) >= 0.0 and max(vals) <= 1.0


# -- partition invariants -------------------------------------------------

class TestPartition:
    def test_adjacent_crossings_within_band(self, controller):
        zs = np.linspace(-1, 1, 4001)
        for var in (controller.deviation, controller.rate, controller.output):
            mu = np.array([[mf.mu(z) for z in zs] for mf in var.mfs])
            for i in range(6):
                crossing = np.max(np.minimum(mu[i], mu[i + 1]))
                assert 0.4 <= crossing + 1e-9 and crossing <= 0.6 + 1e-9, (
                    f"{var.name} {LABELS[i]}/{LABELS[i+1]} cross at {crossing}")

    def test_no_coverage_gaps(self, controller):
        zs = np.linspace(-1, 1, 4001)
        for var in (controller.deviation, controller.rate, controller.output):
            mu = np.array([[mf.mu(z) for z in zs] for mf in var.mfs])
            assert np.min(np.max(mu, axis=0)) >= 0.4 - 1e-9

    def test_mirror_symmetry_bitwise(self, controller):
        zs = np.linspace(0.0, 1.0, 501)
        for var in (controller.deviation, controller.rate, controller.output):
            for i in range(7):
                j = 6 - i
                for z in zs:
                    assert var.mfs[i].mu(-z) == var.mfs[j].mu(z)

    def test_bad_partitions_rejected(self):
        with pytest.raises(ValueError):
            make_variable("x", 1.0, centers=(-1, -0.5, -0.25, 0.0, 0.25, 0.6, 1.0))
        with pytest.raises(ValueError):
            make_variable("x", 1.0, shapes=("shoulder",) * 7)
        with pytest.raises(ValueError):
            make_variable("x", -1.0)


# -- fuzzification ---------------------------------------------------------

class TestFuzzify:
    def test_zero_input_peaks_zo(self, controller):
        # NS/PS are triangles footed at the origin, so they read exactly 0
        # there; the gaussian mid labels keep sub-1e-3 tails.
        deg = controller.deviation.fuzzify(0.0)
        assert deg[3] == 1.0
        assert deg[2] == deg[4] < 0.6
        assert all(deg[k] <= 1e-3 for k in (0, 1, 5, 6))

    def test_universe_edge_saturates_pb(self, controller):
        deg = controller.deviation.fuzzify(controller.deviation.gain)
        assert deg[6] == 1.0
        deg = controller.deviation.fuzzify(10 * controller.deviation.gain)  # clamped
        assert deg[6] == 1.0

    def test_half_scale_vector_matches_hand_evaluation(self, controller):
        # Declared layout: centers (+-1, +-0.6, +-0.26, 0), NS/ZO/PS triangles
        # with feet at neighbor centers, NM/PM gaussians, NB/PB shoulders,
        # all half-maximum reaches covering half of each gap.
        deg = controller.deviation.fuzzify(0.5 * controller.deviation.gain)
        z = 0.5
        expected = [
            math.exp(-0.5 * ((z + 1.0) / sigma_for(0.2)) ** 2),   # NB
            math.exp(-0.5 * ((z + 0.6) / sigma_for(0.17)) ** 2),  # NM right flank
            0.0,                                                   # NS
            0.0,                                                   # ZO
            (0.6 - z) / 0.34,                                      # PS falling edge
            math.exp(-0.5 * ((0.6 - z) / sigma_for(0.17)) ** 2),  # PM left flank
            math.exp(-0.5 * ((1.0 - z) / sigma_for(0.2)) ** 2),   # PB inner flank
        ]
        assert deg == pytest.approx(expected, abs=1e-12)

    def test_at_least_one_degree_above_04(self, controller):
        for z in np.linspace(-1.5, 1.5, 101):
            deg = controller.deviation.fuzzify(z * controller.deviation.gain)
            assert deg.max() >= 0.4 - 1e-9


# -- rule table -------------------------------------------------------------

class TestRuleTable:
    def test_default_is_total_odd_monotone(self):
        table = RuleTable()
        for i, a in enumerate(LABELS):
            for j, b in enumerate(LABELS):
                out = table.output(a, b)
                assert out in LABELS
                assert table.output(negate_label(a), negate_label(b)) == negate_label(out)

    def test_symmetric_in_inputs(self):
        # The shipped grid is symmetric, so transposed reading is identical.
        table = RuleTable()
        for a in LABELS:
            for b in LABELS:
                assert table.output(a, b) == table.output(b, a)

    def test_rejects_bad_label(self):
        rows = [list(r) for r in RuleTable().rows]
        rows[0][0] = "XX"
        with pytest.raises(ValueError):
            RuleTable(tuple(tuple(r) for r in rows))

    def test_rejects_odd_symmetry_break(self):
        rows = [list(r) for r in RuleTable().rows]
        rows[0][0] = "ZO"  # mirror cell (PB,PB) stays PB
        with pytest.raises(ValueError, match="odd-symmetric"):
            RuleTable(tuple(tuple(r) for r in rows))

    def test_rejects_non_monotone(self):
        rows = [list(r) for r in RuleTable().rows]
        rows[0][1], rows[0][2] = rows[0][2], rows[0][1]
        rows[6][4], rows[6][5] = rows[6][5], rows[6][4]
        with pytest.raises(ValueError):
            RuleTable(tuple(tuple(r) for r in rows))


# -- inference ---------------------------------------------------------------

class TestInfer:
    def test_one_hot_conformance_all_49(self, controller):
        # A single rule firing at full strength must reproduce its consequent
        # membership exactly, for every cell of the table.
        for i in range(7):
            for j in range(7):
                deg_e = np.zeros(7); deg_e[i] = 1.0
                deg_de = np.zeros(7); deg_de[j] = 1.0
                curve = controller.infer(deg_e, deg_de)
                k = controller.rules.output_index(i, j)
                assert np.array_equal(curve, controller._consequents[k]), (
                    f"cell ({LABELS[i]}, {LABELS[j]})")

    def test_mirrored_one_hot_curves(self, controller):
        deg_nb = np.zeros(7); deg_nb[0] = 1.0
        deg_pb = np.zeros(7); deg_pb[6] = 1.0
        curve_a = controller.infer(deg_nb, deg_nb)
        curve_b = controller.infer(deg_pb, deg_pb)
        assert np.array_equal(curve_a, curve_b[::-1])

    def test_mixed_degrees_equal_max_of_clipped_consequents(self, controller):
        deg = np.zeros(7); deg[3] = 0.7; deg[4] = 0.3
        curve = controller.infer(deg, deg)
        # Four rules fire: (ZO,ZO)->ZO@0.7, (ZO,PS)->PS@0.3, (PS,ZO)->PS@0.3,
        # (PS,PS)->PS@0.3; aggregate is the pointwise max of the clips.
        mzo = controller._consequents[3]
        mps = controller._consequents[4]
        expected = np.maximum(np.minimum(0.7, mzo), np.minimum(0.3, mps))
        assert np.array_equal(curve, expected)

    def test_curve_bounded(self, controller):
        rng = np.random.default_rng(7)
        for _ in range(50):
            deg_e = rng.uniform(0, 1, 7)
            deg_de = rng.uniform(0, 1, 7)
            curve = controller.infer(deg_e, deg_de)
            assert curve.min() >= 0.0 and curve.max() <= 1.0


# -- defuzzification ----------------------------------------------------------

class TestDefuzz:
    def test_symmetric_curve_gives_zero(self, controller):
        zs = controller.output_samples
        curve = np.exp(-np.abs(zs) * 3.0)
        assert controller.defuzz(curve) == 0.0

    def test_constant_curve_gives_zero(self, controller):
        assert controller.defuzz(np.ones(controller.resolution)) == 0.0

    def test_clipped_shoulder_matches_closed_form(self, controller):
        # Closed-form centroid of the output PB flank over the universe via
        # the gaussian integral; the discrete sum carries an O(h) endpoint
        # bias, measured at 0.22 deg for the 201-sample default.
        sigma = sigma_for(0.2)
        a = 2.0 / sigma
        den = math.sqrt(math.pi / 2.0) * math.erf(a / math.sqrt(2.0)) * sigma
        centroid = 1.0 + sigma * sigma * (math.exp(-a * a / 2.0) - 1.0) / den
        analytic = centroid * controller.output.gain
        discrete = controller.defuzz(controller._consequents[6])
        assert discrete == pytest.approx(analytic, abs=0.35)

    def test_empty_aggregate_raises(self, controller):
        with pytest.raises(ValueError, match="empty aggregate"):
            controller.defuzz(np.zeros(controller.resolution))

    def test_result_within_output_universe(self, controller):
        rng = np.random.default_rng(11)
        for _ in range(100):
            curve = rng.uniform(0, 1, controller.resolution)
            assert abs(controller.defuzz(curve)) <= controller.output.gain


# -- end-to-end evaluation ------------------------------------------------------

def brute_force_eval(controller, e, de):
    """Independent pipeline: plain loops, no shared code paths."""
    deg_e = [mf.mu(controller.deviation.normalize(e)) for mf in controller.deviation.mfs]
    deg_de = [mf.mu(controller.rate.normalize(de)) for mf in controller.rate.mfs]
    zs = controller.output_samples
    num = den = 0.0
    for k, z in enumerate(zs):
        best = 0.0
        for i in range(7):
            for j in range(7):
                w = min(deg_e[i], deg_de[j],
                        controller.output.mfs[controller.rules.output_index(i, j)].mu(z))
                if w > best:
                    best = w
        num += z * best
        den += best
    return (num / den) * controller.output.gain


class TestEvaluate:
    def test_zero_fixed_point_exact(self, controller):
        assert controller.evaluate(0.0, 0.0) == 0.0

    def test_oddness_on_grid(self, controller):
        emax, demax = controller.deviation.gain, controller.rate.gain
        tol = 1e-9 * controller.output.gain
        for e in np.linspace(-emax, emax, 21):
            for de in np.linspace(-demax, demax, 21):
                assert abs(controller.evaluate(e, de) + controller.evaluate(-e, -de)) <= tol

    def test_output_bounded(self, controller):
        emax, demax = controller.deviation.gain, controller.rate.gain
        rng = np.random.default_rng(3)
        for _ in range(200):
            e = rng.uniform(-2 * emax, 2 * emax)
            de = rng.uniform(-2 * demax, 2 * demax)
            assert abs(controller.evaluate(e, de)) <= controller.output.gain

    def test_monotone_deviation_sweep(self, controller):
        emax = controller.deviation.gain
        us = [controller.evaluate(e, 0.0) for e in np.linspace(-emax, emax, 21)]
        for a, b in zip(us, us[1:]):
            assert b >= a - 0.5

    def test_saturated_corner_matches_brute_force(self, controller):
        e, de = controller.deviation.gain, controller.rate.gain
        assert controller.evaluate(e, de) == pytest.approx(
            brute_force_eval(controller, e, de), abs=1e-9)

    def test_random_points_match_brute_force(self, controller):
        rng = np.random.default_rng(19)
        emax, demax = controller.deviation.gain, controller.rate.gain
        for _ in range(25):
            e = rng.uniform(-emax, emax)
            de = rng.uniform(-demax, demax)
            assert controller.evaluate(e, de) == pytest.approx(
                brute_force_eval(controller, e, de), abs=1e-9)

    def test_resolution_validation(self):
        with pytest.raises(ValueError):
            MamdaniController(resolution=50)
        with pytest.raises(ValueError):
            MamdaniController(resolution=200)


# -- lookup table -----------------------------------------------------------------

class TestLookup:
    @pytest.fixture()
    def lut(self, _lut_cache):
        return _lut_cache

    def test_grid_nodes_exact(self, controller, lut):
        for i in (0, 13, 50, 87, 100):
            for j in (0, 25, 50, 75, 100):
                e = float(lut.e_axis[i])
                de = float(lut.de_axis[j])
                assert lut.lookup(e, de) == lut.grid[i, j]

    def test_cell_center_is_corner_mean(self, controller, lut):
        i, j = 40, 60
        e = 0.5 * (lut.e_axis[i] + lut.e_axis[i + 1])
        de = 0.5 * (lut.de_axis[j] + lut.de_axis[j + 1])
        corners = (lut.grid[i, j] + lut.grid[i + 1, j]
                   + lut.grid[i, j + 1] + lut.grid[i + 1, j + 1])
        assert lut.lookup(float(e), float(de)) == pytest.approx(corners / 4.0, rel=1e-12)

    def test_fidelity_within_one_degree(self, controller, lut):
        rng = np.random.default_rng(42)
        emax, demax = controller.deviation.gain, controller.rate.gain
        worst = 0.0
        for _ in range(1000):
            e = rng.uniform(-emax, emax)
            de = rng.uniform(-demax, demax)
            worst = max(worst, abs(lut.lookup(e, de) - controller.evaluate(e, de)))
        assert worst <= 1.0

    def test_values_within_output_universe(self, lut, controller):
        assert np.all(np.abs(lut.grid) <= controller.output.gain + 1e-12)

    def test_clamps_out_of_range_queries(self, controller, lut):
        emax, demax = controller.deviation.gain, controller.rate.gain
        assert lut.lookup(5 * emax, 0.0) == lut.lookup(emax, 0.0)
        assert lut.lookup(0.0, -9 * demax) == lut.lookup(0.0, -demax)

    def test_minimum_resolution_enforced(self, controller):
        with pytest.raises(ValueError):
            LookupTable.build(controller, 1, 5)
