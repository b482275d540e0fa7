"""
Unit tests for the spectral checks and their reports.
"""

import json
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "../..")))

from core.utils import HypothesisViolated, VerificationFailed
from gvsa.node_functions import NodeFunctionKind
from gvsa.supports import build_support_correlation
from theory.checks import (
    check_amplitude_scaling_bounds,
    check_condition_number,
    check_gershgorin_dirichlet,
    check_gershgorin_discs_ic,
    check_indefiniteness_lde,
    check_lde_rank_lift,
    check_parseval,
    check_rank_lift_ic,
)
from theory.reports import (
    DEGENERATE,
    FAILED,
    PASSED,
    ClaimId,
    SpectralBoundReport,
    require_all_passed,
    within_tolerance,
    write_reports_json,
)
from theory.suite import random_deviations, random_spd


def _spd_case(seed, n=8):
    rng = np.random.default_rng(seed)
    return random_deviations(rng, n), random_spd(rng, n)


def _correlation(seed, n):
    rng = np.random.default_rng(seed)
    return build_support_correlation(rng.standard_normal((n, 4 * n))).effective()


class TestReports:
    def test_tolerance(self):
        assert within_tolerance(1.0 + 1e-10, 1.0)
        assert not within_tolerance(1.0 + 1e-8, 1.0)
        assert within_tolerance(1e-10, 0.0)

    def test_failed_report_keeps_witness(self):
        report = SpectralBoundReport.compare(
            ClaimId.PARSEVAL, lhs=2.0, rhs=1.0, n=2, inputs={"x": np.ones(2)}
        ).with_origin(seed=5, trial=3)
        assert report.status == FAILED
        assert report.margin == -1.0
        assert report.witness == {"seed": 5, "trial": 3, "x": [1.0, 1.0]}

    def test_passed_report_has_no_witness(self):
        report = SpectralBoundReport.compare(
            ClaimId.PARSEVAL, lhs=0.5, rhs=1.0, n=2, inputs={"x": np.ones(2)}
        )
        assert report.passed and report.witness is None

    def test_side_condition(self):
        report = SpectralBoundReport.compare(
            ClaimId.RANK_LIFT_IC, lhs=0.0, rhs=1.0, n=2, inputs={}, holds=False
        )
        assert not report.passed

    def test_require_all_passed(self):
        bad = SpectralBoundReport.compare(ClaimId.PARSEVAL, 2.0, 1.0, 2, {})
        with pytest.raises(VerificationFailed):
            require_all_passed([bad])
        require_all_passed([SpectralBoundReport.degenerate(ClaimId.PARSEVAL, 2, "zero")])

    def test_write_json(self, tmp_path):
        reports = [check_rank_lift_ic([1.0, 2.0], np.eye(2)).with_origin(1, 0)]
        path = write_reports_json(tmp_path / "verify.json", reports, {"manifest": "abc"})
        payload = json.loads(path.read_text())
        assert payload["all_passed"] is True
        assert payload["manifest"] == "abc"
        assert payload["summary"] == {"rank_lift_ic": {"passed": 1}}
        entry = payload["reports"][0]
        assert entry["claim_id"] == "rank_lift_ic"
        assert entry["seed"] == 1
        assert entry["margin"] == pytest.approx(entry["rhs"] - entry["lhs"])


class TestRankLiftIc:
    def test_identity_support(self):
        report = check_rank_lift_ic([1.0, 2.0], np.eye(2))
        assert report.passed
        assert report.details["min_eigenvalue"] == 1.0
        assert report.details["rank"] == 2

    @pytest.mark.parametrize("seed", range(5))
    def test_random_positive_definite(self, seed):
        d, w = _spd_case(seed)
        assert check_rank_lift_ic(d, w).passed

    def test_mean_is_subtracted(self):
        report = check_rank_lift_ic([2.0, 3.0], np.eye(2), mean=[1.0, 1.0])
        assert report.details["min_eigenvalue"] == 1.0

    def test_zero_deviation(self):
        with pytest.raises(HypothesisViolated):
            check_rank_lift_ic([1.0, 0.0], np.eye(2))

    def test_indefinite_support(self):
        with pytest.raises(HypothesisViolated):
            check_rank_lift_ic([1.0, 1.0], np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_semidefinite_support(self):
        with pytest.raises(HypothesisViolated):
            check_rank_lift_ic([1.0, 1.0], np.ones((2, 2)))

    def test_asymmetric_support(self):
        with pytest.raises(HypothesisViolated):
            check_rank_lift_ic([1.0, 1.0], np.array([[2.0, 1.0], [0.0, 2.0]]))


class TestGershgorinDirichlet:
    def test_constant_signal(self):
        report = check_gershgorin_dirichlet(np.full(4, 3.0), _correlation(0, 4))
        assert report.passed
        assert report.lhs == 0.0 and report.rhs == 0.0

    def test_two_nodes_closed_form(self):
        c = -0.7
        report = check_gershgorin_dirichlet([0.0, 1.0], np.array([[1.0, c], [c, 1.0]]))
        assert report.lhs == pytest.approx(abs(c), rel=1e-12)
        assert report.rhs == pytest.approx(2.0 * abs(c), rel=1e-12)

    @pytest.mark.parametrize("seed", range(10))
    def test_random(self, seed):
        rng = np.random.default_rng(seed)
        a = rng.uniform(-1.0, 1.0, (10, 10))
        assert check_gershgorin_dirichlet(rng.standard_normal(10), a + a.T).passed


class TestLdeRankLift:
    def test_lifts_rank_three_to_full(self):
        x = np.random.default_rng(3).standard_normal(10)
        report = check_lde_rank_lift(x, _correlation(4, 10))
        assert report.passed
        assert report.details["rank_j"] == 3
        assert report.details["rank_omega"] == 10

    def test_three_nodes(self):
        report = check_lde_rank_lift([0.0, 1.0, 3.0], _correlation(5, 3))
        assert report.details["rank_j"] <= 3
        assert report.passed

    def test_repeated_value(self):
        with pytest.raises(HypothesisViolated):
            check_lde_rank_lift([0.0, 1.0, 1.0], _correlation(5, 3))

    def test_zero_support_entry(self):
        with pytest.raises(HypothesisViolated):
            check_lde_rank_lift([0.0, 1.0, 2.0], np.eye(3))


class TestIndefinitenessLde:
    def test_constant_signal_is_degenerate(self):
        report = check_indefiniteness_lde(np.ones(5), _correlation(0, 5))
        assert report.status == DEGENERATE
        assert report.passed

    @pytest.mark.parametrize("seed", range(5))
    def test_both_signs(self, seed):
        rng = np.random.default_rng(seed)
        report = check_indefiniteness_lde(rng.standard_normal(10), _correlation(seed, 10))
        assert report.status == PASSED
        assert report.details["trace"] == 0.0
        assert report.details["min_eigenvalue"] < 0.0 < report.details["max_eigenvalue"]


class TestAmplitudeScaling:
    def test_uniform_deviation_is_tight(self):
        _, w = _spd_case(1, n=6)
        report = check_amplitude_scaling_bounds(np.full(6, -1.5), w)
        assert report.passed
        assert report.details["min"] == pytest.approx(report.details["lower"], rel=1e-9)
        assert report.details["max"] == pytest.approx(report.details["upper"], rel=1e-9)

    def test_identity_support(self):
        d = np.array([0.5, -2.0, 1.0])
        report = check_amplitude_scaling_bounds(d, np.eye(3))
        assert report.passed
        assert report.details["min"] == 0.25
        assert report.details["max"] == 4.0

    @pytest.mark.parametrize("seed", range(5))
    def test_random(self, seed):
        assert check_amplitude_scaling_bounds(*_spd_case(seed)).passed


class TestConditionNumber:
    def test_identity_support_is_equality(self):
        d = np.array([0.5, -2.0, 1.0])
        report = check_condition_number(d, np.eye(3))
        assert report.passed
        assert report.lhs == pytest.approx(16.0, rel=1e-12)
        assert report.rhs == pytest.approx(16.0, rel=1e-12)

    def test_uniform_deviation(self):
        _, w = _spd_case(2, n=5)
        report = check_condition_number(np.full(5, 0.8), w)
        assert report.passed
        assert report.lhs == pytest.approx(report.rhs, rel=1e-8)

    @pytest.mark.parametrize("seed", range(5))
    def test_random(self, seed):
        assert check_condition_number(*_spd_case(seed)).passed

    def test_zero_deviation(self):
        with pytest.raises(HypothesisViolated):
            check_condition_number([0.0, 1.0], np.eye(2))


class TestGershgorinDiscs:
    def test_diagonal_support(self):
        report = check_gershgorin_discs_ic([1.0, -2.0, 0.5], np.diag([1.0, 2.0, 3.0]))
        assert report.passed
        assert report.lhs == 0.0
        assert report.details["r_max"] == 0.0

    def test_single_node(self):
        assert check_gershgorin_discs_ic([2.0], np.array([[3.0]])).passed

    @pytest.mark.parametrize("seed", range(5))
    def test_random(self, seed):
        assert check_gershgorin_discs_ic(*_spd_case(seed)).passed


class TestParseval:
    def test_zero_signal(self):
        report = check_parseval(np.zeros((4, 3)), _correlation(0, 4))
        assert report.passed
        assert report.lhs == 0.0

    def test_single_column_diagonal_support(self):
        x = np.array([[1.0], [-2.0], [3.0]])
        assert check_parseval(x, np.diag([1.0, 2.0, 3.0])).passed

    @pytest.mark.parametrize("kind", [NodeFunctionKind("ic"), NodeFunctionKind("lde")])
    def test_random(self, kind):
        x = np.random.default_rng(7).standard_normal((8, 16))
        report = check_parseval(x, _correlation(8, 8), kind)
        assert report.passed
        assert report.details["kind"] == kind.label()
