"""Tests for the homogeneity audit of sigma -> Delta_sigma sigma."""

from fractions import Fraction

import pytest

from g2_poisson.services.scale_audit import _fit_exponent, determine_scale, symbolic_exponents


@pytest.fixture(scope="module")
def positive_audit():
    return determine_scale()


class TestExponents:
    """Exponents derived by hand and fitted from samples."""

    def test_symbolic(self):
        assert symbolic_exponents() == {"b": 3, "metric": Fraction(2, 3), "laplacian": Fraction(1, 3)}

    def test_fit_exponent(self):
        assert _fit_exponent([(Fraction(8), Fraction(4)), (Fraction(27), Fraction(9))]) == Fraction(2, 3)
        assert _fit_exponent([(Fraction(8), Fraction(3))]) is None


class TestDetermineScale:
    """Running the pipeline on lambda * sigma."""

    def test_sampled_exponents_match(self, positive_audit):
        assert positive_audit.exponent == Fraction(1, 3)
        assert positive_audit.metric_exponent == Fraction(2, 3)
        assert positive_audit.b_exponent == 3
        assert positive_audit.cross_checked

    def test_printed_constants_disagree(self, positive_audit):
        assert positive_audit.printed_exponent == Fraction(-1, 2)
        assert not positive_audit.printed_consistent

    def test_theta_has_no_scale(self, positive_audit):
        assert positive_audit.theta_value == "0"
        assert positive_audit.theta_scale is None
        assert any("vanishes at the origin" in note for note in positive_audit.notes)

    def test_positive_scale_found(self, positive_audit):
        assert positive_audit.lam is not None
        assert positive_audit.scale is not None
        data = positive_audit.to_dict()
        assert data["cross_checked"] is True
        assert data["exponent"] == "1/3"

    def test_negative_sign_records_obstruction(self):
        audit = determine_scale(sign=-1)
        assert audit.lam is None
        assert audit.scale is None
        assert audit.exponent == Fraction(1, 3)

    def test_non_cube_sample(self, positive_audit):
        assert positive_audit.radical_sample == {"metric": True, "laplacian": True}
        assert positive_audit.radical_checked
        assert positive_audit.to_dict()["radical_sample"]["backend"] == "radical:3:2"
