"""Tests for problem normalization and the jet Poisson solver."""

from fractions import Fraction

import pytest

from g2_poisson.services.errors import NonClosedFormError, NormalizationError, PointSolveError, PositivityError
from g2_poisson.services.forms import Form
from g2_poisson.services.g2 import G2Structure, sigma_can
from g2_poisson.services.jets import Jet
from g2_poisson.services.scalars import RATIONAL
from g2_poisson.services.solver import PoissonProblem, SolverService, jet_poisson_solve, normalization_scale


class TestNormalizationScale:
    """c with eta(0) = sign * c * sigma_can(0)."""

    def test_positive_multiple(self):
        assert normalization_scale(sigma_can(RATIONAL, 2).scale(3), 1) == 3

    def test_negative_multiple(self):
        assert normalization_scale(sigma_can(RATIONAL, 2).scale(Fraction(-1, 2)), -1) == Fraction(1, 2)

    def test_wrong_sign(self):
        with pytest.raises(NormalizationError):
            normalization_scale(sigma_can(RATIONAL, 2), -1)

    def test_off_pattern_component(self):
        eta = sigma_can(RATIONAL, 2) + Form.basis(RATIONAL, 2, (1, 2, 4), Fraction(1, 10))
        with pytest.raises(NormalizationError):
            normalization_scale(eta, 1)

    def test_unequal_coefficients(self):
        eta = sigma_can(RATIONAL, 2) + Form.basis(RATIONAL, 2, (1, 4, 5))
        with pytest.raises(NormalizationError):
            normalization_scale(eta, 1)


class TestPoissonProblem:
    """Validation of the right-hand side."""

    def test_from_canonical(self):
        problem = PoissonProblem.from_form(sigma_can(RATIONAL, 3), order=5)
        assert problem.sign == 1
        assert problem.scale == 1
        assert problem.order == 5
        assert problem.eta.order == 5

    def test_negative_sign_detected(self):
        problem = PoissonProblem.from_form(sigma_can(RATIONAL, 3).scale(-2))
        assert problem.sign == -1
        assert problem.scale == 2

    def test_non_cube_scale_over_rationals(self):
        problem = PoissonProblem.from_form(sigma_can(RATIONAL, 3).scale(2))
        assert problem.sign == 1
        assert problem.scale == 2
        assert problem.field is RATIONAL

    def test_indefinite_rhs(self):
        with pytest.raises(PositivityError):
            PoissonProblem.from_form(Form.basis(RATIONAL, 3, (1, 2, 3)))

    def test_sign_override_must_agree(self):
        with pytest.raises(NormalizationError):
            PoissonProblem.from_form(sigma_can(RATIONAL, 3), sign=-1)

    def test_rejects_non_closed(self):
        x7 = Jet.variable(RATIONAL, 3, 7)
        eta = sigma_can(RATIONAL, 3) + Form.from_components(RATIONAL, 3, 3, [((1, 2, 3), x7)])
        with pytest.raises(NonClosedFormError):
            PoissonProblem.from_form(eta)

    def test_rejects_other_degrees(self):
        with pytest.raises(NormalizationError):
            PoissonProblem.from_form(Form.basis(RATIONAL, 3, (1, 2)))


class TestSolverService:
    """Environment configuration."""

    def test_defaults(self, monkeypatch):
        monkeypatch.delenv("G2_DEFAULT_ORDER", raising=False)
        monkeypatch.delenv("G2_ORDER_MARGIN", raising=False)
        monkeypatch.delenv("G2_MAX_OUTER_ITERATIONS", raising=False)
        service = SolverService()
        assert service.default_order == 6
        assert service.margin == 4
        assert service.max_iterations is None

    def test_env_overrides(self, monkeypatch):
        monkeypatch.setenv("G2_DEFAULT_ORDER", "4")
        monkeypatch.setenv("G2_ORDER_MARGIN", "2")
        monkeypatch.setenv("G2_MAX_OUTER_ITERATIONS", "3")
        service = SolverService()
        assert service.problem(sigma_can(RATIONAL, 2)).order == 4
        assert service.margin == 2
        assert service.max_iterations == 3

    def test_negative_rhs_is_obstructed(self):
        problem = PoissonProblem.from_form(sigma_can(RATIONAL, 3).scale(-1))
        with pytest.raises(PointSolveError):
            jet_poisson_solve(problem, audit=False)


@pytest.mark.slow
class TestJetPoissonSolve:
    """End-to-end solves with a certificate built from scratch."""

    def test_constant_rhs(self):
        problem = PoissonProblem.from_form(sigma_can(RATIONAL, 4))
        solution = jet_poisson_solve(problem, audit=False)
        assert solution.residual_valuation > 2
        assert solution.gauge_consistent
        assert solution.sigma.is_closed()
        structure = G2Structure.closed(solution.sigma)
        assert structure.sign == 1
        assert (structure.laplacian - problem.eta).vanishes_through(2)

    def test_report_payload(self):
        problem = PoissonProblem.from_form(sigma_can(RATIONAL, 3).scale(8))
        solution = jet_poisson_solve(problem)
        data = solution.to_dict()
        assert data["order"] == 3
        assert data["residual_valuation"] > 1
        assert data["scale"]["exponent"] == "1/3"
