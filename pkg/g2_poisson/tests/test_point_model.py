"""Tests for the local model at the origin."""

from fractions import Fraction

import pytest

from g2_poisson.services.errors import PointSolveError
from g2_poisson.services.g2 import sigma_can
from g2_poisson.services.point_model import (
    build_sigma0,
    build_theta,
    canonical_component,
    closed_linear_candidates,
    describe_values,
    values_match,
    verify_pointsolve,
)
from g2_poisson.services.scalars import RATIONAL, BigFloatField


@pytest.fixture(scope="module")
def pointsolve_claims():
    return {claim.claim_id: claim for claim in verify_pointsolve(2)}


class TestHelpers:
    """Canonical components and value comparison."""

    def test_canonical_component(self):
        assert canonical_component(sigma_can().at_origin()) == 1
        assert canonical_component(sigma_can().scale(-3).at_origin()) == -3
        assert canonical_component({(1, 2, 4): Fraction(5)}) == 0

    def test_values_match_uses_backend_zero(self):
        field = BigFloatField(128)
        third = field.coerce(Fraction(1, 3))
        assert values_match({(1, 2, 3): third * 3}, {(1, 2, 3): 1}, field)
        assert not values_match({(1, 2, 3): 1}, {}, RATIONAL)

    def test_describe_values(self):
        assert describe_values({}) == "0"
        assert describe_values({(1, 2, 3): Fraction(1, 2)}) == "e^123: 1/2"

    def test_linear_candidates_are_closed(self):
        candidates = closed_linear_candidates()
        assert len(candidates) == 21
        assert all(form.is_closed() for _, form in candidates)


class TestVerifyPointSolve:
    """Every computation behind the quadratic form theta."""

    def test_theta_basics_pass(self, pointsolve_claims):
        assert pointsolve_claims["theta-closed"].status == "pass"
        assert pointsolve_claims["theta-at-origin = sigma_can"].status == "pass"

    def test_surrogate_pass(self, pointsolve_claims):
        assert pointsolve_claims["euclidean-surrogate = 12·sigma_can"].status == "pass"

    def test_laplacian_at_origin_fails_with_witness(self, pointsolve_claims):
        claim = pointsolve_claims["delta-theta-at-origin = 12·sigma_can"]
        assert claim.status == "fail"
        assert claim.witness == "0"

    def test_star_three_forms_fails(self, pointsolve_claims):
        assert pointsolve_claims["star-three-forms"].status == "fail"

    def test_canonical_component_is_informational(self, pointsolve_claims):
        assert pointsolve_claims["canonical-component-of-delta-theta"].status == "info"

    def test_theta_laplacian_vanishes_at_origin(self):
        assert build_theta(1).laplacian.at_origin() == {}


class TestBuildSigma0:
    """sigma_0 = c (sigma_can + t L + t^2 Q)."""

    def test_positive_rhs(self):
        solution = build_sigma0(1)
        field = solution.field
        assert solution.sign == 1
        assert solution.weight > 0
        assert values_match(solution.sigma0.phi.at_origin(), sigma_can().at_origin(), field)
        assert values_match(solution.sigma0.laplacian.at_origin(), sigma_can().at_origin(), field)

    def test_scaled_rhs(self):
        solution = build_sigma0(8)
        field = solution.field
        expected = sigma_can().scale(8).at_origin()
        assert values_match(solution.sigma0.laplacian.at_origin(), expected, field)

    def test_higher_order_structure_is_closed(self):
        solution = build_sigma0(1, order=4)
        assert solution.sigma0.order == 4
        assert solution.sigma0.phi.is_closed()

    def test_negative_rhs_is_obstructed(self):
        with pytest.raises(PointSolveError):
            build_sigma0(1, sign=-1)

    def test_bad_sign(self):
        with pytest.raises(ValueError):
            build_sigma0(1, sign=0)

    def test_to_dict(self):
        solution = build_sigma0(1)
        data = solution.to_dict()
        assert data["sign"] == 1
        assert data["backend"] == solution.field.tag
        assert data["linear_term"].startswith("x")
