"""Tests for the first-order correction sigma_1."""

from fractions import Fraction

import pytest

from g2_poisson.services.errors import PointSolveError
from g2_poisson.services.first_order import (
    build_sigma1,
    build_tau_star,
    derived_weights,
    origin_gamma,
    printed_weights,
    second_jets,
)
from g2_poisson.services.forms import Form
from g2_poisson.services.g2 import G2Structure, sigma_can
from g2_poisson.services.jets import DIM, Jet
from g2_poisson.services.point_model import build_sigma0
from g2_poisson.services.scalars import RATIONAL


def mixed_tau(order=3):
    """x_1 x_2 e^12 + x_1^2 e^13."""
    mixed = Jet.monomial(RATIONAL, order, (1, 1, 0, 0, 0, 0, 0))
    square = Jet.monomial(RATIONAL, order, (2, 0, 0, 0, 0, 0, 0))
    return Form.from_components(RATIONAL, 2, order, [((1, 2), mixed), ((1, 3), square)])


def empty_jets():
    return [[[[Fraction(0)] * DIM for _ in range(DIM)] for _ in range(DIM)] for _ in range(DIM)]


class TestWeights:
    """Printed and derived tau* weights."""

    def test_printed(self):
        assert printed_weights(1, 1) == Fraction(1, 2)
        assert printed_weights(1, 2) == 2

    def test_derived_from_gamma(self):
        weight = derived_weights(Fraction(1, 12))
        assert weight(0, 0) == Fraction(-1, 2)
        assert weight(0, 1) == -1


class TestSecondJets:
    """Second derivatives of a 2-form at the origin."""

    def test_values_and_antisymmetry(self):
        jets = second_jets(mixed_tau())
        assert jets[0][1][0][1] == 1
        assert jets[0][1][1][0] == 1
        assert jets[1][0][0][1] == -1
        assert jets[0][2][0][0] == 2

    def test_rejects_other_degrees(self, sample_three_form):
        with pytest.raises(ValueError):
            second_jets(sample_three_form)


class TestTauStar:
    """tau* = sum w_kl tau_ij,kl x_k^3 x_l e^ij."""

    def test_printed_weights_by_default(self):
        tau_star = build_tau_star(second_jets(mixed_tau()))
        component = tau_star.component((1, 2))
        assert tau_star.order == 4
        assert component.coefficient((3, 1, 0, 0, 0, 0, 0)) == 2
        assert component.coefficient((1, 3, 0, 0, 0, 0, 0)) == 2
        assert tau_star.component((1, 3)).coefficient((4, 0, 0, 0, 0, 0, 0)) == 1

    def test_asymmetric_jets_rejected(self):
        jets = empty_jets()
        jets[0][1][0][1] = Fraction(1)
        with pytest.raises(ValueError):
            build_tau_star(jets)


class TestOriginGamma:
    """gamma read off g(0) = gamma^-1 I."""

    def test_flat(self, canonical_structure):
        assert origin_gamma(canonical_structure) == 1

    def test_scaled(self):
        structure = G2Structure.from_form(sigma_can(RATIONAL, 2).scale(8))
        assert origin_gamma(structure) == Fraction(1, 4)


@pytest.mark.slow
class TestBuildSigma1:
    """The corrected structure on a constant right-hand side."""

    def test_conditions_hold(self):
        order = 4
        point = build_sigma0(1, 1, order)
        eta = sigma_can(RATIONAL, order)
        result = build_sigma1(point.sigma0, eta, 1)
        assert result.satisfied
        assert result.residual_valuation >= 2
        assert result.sigma1.phi.is_closed()

    def test_wrong_origin_value_rejected(self):
        point = build_sigma0(1, 1, 4)
        with pytest.raises(PointSolveError):
            build_sigma1(point.sigma0, sigma_can(RATIONAL, 4).scale(2), 1)
