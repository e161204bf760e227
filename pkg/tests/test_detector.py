import math

import numpy as np
import pytest

from qndsim import (
    DesignTargets,
    DetectorDesign,
    backaction_model,
    design_report,
    entropy_bits,
    error_model,
    optimize_design,
    reference_calibration,
    relative_backaction,
    response_range,
    sql_check,
)


def unit_design(**overrides):
    params = dict(gamma=1.0, delta=1.0, tau_p=1.0, n_electrons=1)
    params.update(overrides)
    return DetectorDesign(**params)


def random_design(rng):
    return DetectorDesign(
        gamma=float(rng.uniform(0.2, 5.0)),
        delta=float(rng.uniform(0.5, 50.0)),
        tau_p=float(rng.uniform(0.1, 10.0)),
        n_electrons=int(rng.integers(1, 10**6)),
        c_ba=float(rng.uniform(0.1, 10.0)),
        c_err=float(rng.uniform(0.1, 10.0)),
        c_phi=float(rng.uniform(0.1, 10.0)),
    )


class TestScalingLaws:
    def test_backaction_vanishes_without_photons(self):
        assert backaction_model(unit_design(), 0.0) == 0.0

    def test_backaction_unit_normalization(self):
        assert backaction_model(unit_design(), 1.0) == 1.0

    def test_backaction_detuning_doubling(self):
        d1, d2 = unit_design(), unit_design(delta=2.0)
        assert backaction_model(d2, 1.0) == backaction_model(d1, 1.0) / 16.0

    def test_error_unit_normalization(self):
        assert error_model(unit_design()) == 1.0

    def test_error_quadrupled_electrons_halves(self):
        assert error_model(unit_design(n_electrons=4)) == 0.5

    def test_error_doubled_gamma_quarters(self):
        assert error_model(unit_design(gamma=2.0)) == 0.25

    def test_exponents_at_random_design_points(self):
        rng = np.random.default_rng(55)
        for _ in range(20):
            d = random_design(rng)
            n = float(rng.uniform(1.0, 1e6))
            base_ba = backaction_model(d, n)
            base_err = error_model(d)

            def scaled(**kw):
                fields = dict(
                    gamma=d.gamma, delta=d.delta, tau_p=d.tau_p,
                    n_electrons=d.n_electrons, c_ba=d.c_ba, c_err=d.c_err,
                    c_phi=d.c_phi,
                )
                fields.update(kw)
                return DetectorDesign(**fields)

            assert abs(backaction_model(d, 2 * n) / base_ba - 2.0) <= 1e-12
            assert abs(
                backaction_model(scaled(n_electrons=2 * d.n_electrons), n) / base_ba - 2.0
            ) <= 1e-12
            assert abs(backaction_model(scaled(delta=2 * d.delta), n) / base_ba - 1 / 16) <= 1e-12
            assert abs(backaction_model(scaled(tau_p=2 * d.tau_p), n) / base_ba - 0.5) <= 1e-12
            assert abs(error_model(scaled(delta=2 * d.delta)) / base_err - 2.0) <= 1e-12
            assert abs(error_model(scaled(gamma=2 * d.gamma)) / base_err - 0.25) <= 1e-12
            assert abs(
                error_model(scaled(n_electrons=4 * d.n_electrons)) / base_err - 0.5
            ) <= 1e-12
            # error carries no pulse-duration or photon-number dependence
            assert error_model(scaled(tau_p=3.7 * d.tau_p)) == base_err

    def test_backaction_error_product_is_detuning_free(self):
        # delta^4 cancels in delta_n_ba * delta_n_err^4 at fixed tau_p, n, N
        rng = np.random.default_rng(77)
        for _ in range(10):
            d = random_design(rng)
            n = float(rng.uniform(1.0, 1e5))
            combos = []
            for delta in (d.delta, 3.1 * d.delta):
                dd = DetectorDesign(
                    gamma=d.gamma, delta=delta, tau_p=d.tau_p,
                    n_electrons=d.n_electrons, c_ba=d.c_ba, c_err=d.c_err,
                    c_phi=d.c_phi,
                )
                combos.append(backaction_model(dd, n) * error_model(dd) ** 4)
            assert abs(combos[0] / combos[1] - 1.0) <= 1e-12

    def test_positivity_validation(self):
        with pytest.raises(ValueError):
            unit_design(gamma=0.0)
        with pytest.raises(ValueError):
            unit_design(n_electrons=0)


class TestResponseRangeAndEntropy:
    def test_error_target_sets_lower_boundary(self):
        design, targets, _ = reference_calibration()
        n_min, _ = response_range(design, targets)
        assert n_min == 10000.0

    def test_phase_bound_sets_upper_boundary(self):
        design, targets, _ = reference_calibration()
        _, n_max = response_range(design, targets)
        assert abs(n_max - 1e6) <= 1e-3

    def test_relaxed_error_target_gives_unit_floor(self):
        d = unit_design(c_phi=1e-6)
        n_min, _ = response_range(d, DesignTargets(0.5, 0.999999, 1.0))
        assert abs(n_min - 1.0) <= 1e-6

    def test_entropy_reference_numbers(self):
        assert abs(entropy_bits(1e4, 1e6, 1e2) - math.log2(9900.0)) <= 1e-12

    def test_entropy_two_values_one_bit(self):
        assert entropy_bits(0.0, 2.0, 1.0) == 1.0

    def test_entropy_sub_resolution_range(self):
        assert entropy_bits(0.0, 1.0, 2.0) == 0.0

    def test_entropy_invalid_inputs(self):
        with pytest.raises(ValueError):
            entropy_bits(2.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            entropy_bits(0.0, 1.0, 0.0)

    def test_entropy_monotonicity(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            n_min = float(rng.uniform(0.0, 10.0))
            n_max = n_min + float(rng.uniform(10.0, 1e5))
            err = float(rng.uniform(0.01, 5.0))
            base = entropy_bits(n_min, n_max, err)
            assert entropy_bits(n_min, n_max * 1.5, err) > base
            assert entropy_bits(n_min, n_max, err * 0.5) > base


class TestSQLCheck:
    def test_reference_point_is_exactly_marginal(self):
        # error 1e2 equals sqrt(1e4): fails the strict comparison
        design, targets, _ = reference_calibration()
        assert sql_check(design, response_range(design, targets)) is False

    def test_clearly_below(self):
        d = unit_design(c_err=50.0)
        assert sql_check(d, (1e4, 1e6)) is True

    def test_clearly_above(self):
        d = unit_design(c_err=1e3)
        assert sql_check(d, (1e4, 1e6)) is False

    def test_range_validation(self):
        with pytest.raises(ValueError):
            sql_check(unit_design(), (0.0, 1.0))


class TestDesignReport:
    def test_reference_point_report(self):
        design, targets, _ = reference_calibration()
        rep = design_report(design, targets)
        assert rep.feasible
        assert rep.n_min == 10000.0
        assert abs(rep.delta_n_err - 100.0) <= 1e-12
        assert abs(rep.distinguishable_values - 9900.0) <= 1e-6
        assert abs(rep.entropy_bits - 13.273212809854334) <= 1e-9
        assert "backaction-ratio" in rep.binding_constraints

    def test_backaction_violation_marks_infeasible(self):
        design, targets, _ = reference_calibration()
        hot = DetectorDesign(
            gamma=2.0, delta=1.0, tau_p=1.0, n_electrons=1,
            c_ba=design.c_ba, c_err=design.c_err, c_phi=design.c_phi,
        )
        rep = design_report(hot, targets)
        assert not rep.feasible
        assert rep.binding_constraints[0] == "backaction-ratio"

    def test_inverted_range_marks_infeasible(self):
        d = unit_design(c_err=10.0, c_phi=10.0)
        rep = design_report(d, DesignTargets(0.9, 0.01, 1.0))
        assert not rep.feasible
        assert "response-range" in rep.binding_constraints

    def test_feasible_reports_never_invert_the_range(self):
        rng = np.random.default_rng(13)
        targets = DesignTargets(0.1, 0.1, 1.0)
        for _ in range(200):
            d = random_design(rng)
            rep = design_report(d, targets)
            if rep.feasible:
                assert rep.n_min <= rep.n_max
                assert rep.entropy_bits >= 0.0


class TestOptimizer:
    def test_reference_fixture_recovers_the_unit_point(self):
        design, targets, bounds = reference_calibration()
        best, rep = optimize_design(
            targets, bounds, c_ba=design.c_ba, c_err=design.c_err, c_phi=design.c_phi
        )
        assert (best.gamma, best.delta, best.n_electrons) == (1.0, 1.0, 1)
        assert rep.feasible
        assert rep.n_min == 10000.0
        assert abs(rep.entropy_bits - 13.3) <= 0.5

    def test_deterministic(self):
        design, targets, bounds = reference_calibration()
        runs = [
            optimize_design(
                targets, bounds, c_ba=design.c_ba, c_err=design.c_err, c_phi=design.c_phi
            )
            for _ in range(2)
        ]
        assert runs[0][0] == runs[1][0]
        assert runs[0][1] == runs[1][1]

    def test_relaxing_error_target_cannot_hurt(self):
        design, _, bounds = reference_calibration()
        tight = DesignTargets(1e-2, 1e-2, 1.0)
        loose = DesignTargets(1e-2, 0.5, 1.0)
        kw = dict(c_ba=design.c_ba, c_err=design.c_err, c_phi=design.c_phi)
        _, rep_tight = optimize_design(tight, bounds, **kw)
        _, rep_loose = optimize_design(loose, bounds, **kw)
        assert rep_loose.n_min < rep_tight.n_min
        assert rep_loose.entropy_bits >= rep_tight.entropy_bits

    def test_forced_infeasibility_reports_worst_constraint(self):
        design, _, bounds = reference_calibration()
        impossible = DesignTargets(1e-12, 1e-12, 1.0)
        best, rep = optimize_design(
            impossible, bounds, c_ba=design.c_ba, c_err=design.c_err, c_phi=design.c_phi
        )
        assert not rep.feasible
        assert rep.binding_constraints
        assert rep.binding_constraints[0] in ("backaction-ratio", "response-range")

    def test_bounds_validation(self):
        _, targets, _ = reference_calibration()
        with pytest.raises(ValueError):
            optimize_design(targets, {"gamma": (1.0, 2.0)})
