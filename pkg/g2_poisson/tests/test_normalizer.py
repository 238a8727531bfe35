"""Tests for best-effort coordinate normalization."""

from fractions import Fraction

import pytest

from g2_poisson.services.errors import NormalizationError
from g2_poisson.services.forms import Form
from g2_poisson.services.g2 import sigma_can
from g2_poisson.services.jets import DIM, Jet
from g2_poisson.services.normalizer import normalize_besteffort, pullback_by_matrix
from g2_poisson.services.scalars import RATIONAL


def shear():
    """Upper triangular with diagonal (2, 1, ..., 1) and a few rational off-diagonal entries."""
    matrix = [[Fraction(1) if i == j else Fraction(0) for j in range(DIM)] for i in range(DIM)]
    matrix[0][0] = Fraction(2)
    matrix[0][3] = Fraction(1, 2)
    matrix[2][5] = Fraction(-1, 3)
    matrix[4][6] = Fraction(3)
    return matrix


class TestPullback:
    """(M^* a)(x) = a(Mx)."""

    def test_diagonal_scaling(self):
        matrix = [[Fraction(2) if i == j else Fraction(0) for j in range(DIM)] for i in range(DIM)]
        form = Form.basis(RATIONAL, 1, (1, 2, 3))
        assert pullback_by_matrix(form, matrix) == Form.basis(RATIONAL, 1, (1, 2, 3), 8)
        x1 = Form.function(Jet.variable(RATIONAL, 1, 1))
        assert pullback_by_matrix(x1, matrix) == x1.scale(2)

    def test_pullback_keeps_closedness(self, sample_three_form):
        pulled = pullback_by_matrix(sample_three_form.d(), shear())
        assert pulled.is_closed()


class TestNormalizeBestEffort:
    """eta(0) carried onto sign * sigma_can(0) in big-float."""

    def test_sheared_canonical_form(self):
        eta = pullback_by_matrix(sigma_can(RATIONAL, 1), shear())
        result = normalize_besteffort(eta, bits=128)
        assert result.sign == 1
        assert result.error < 1e-12
        data = result.to_dict()
        assert data["sign"] == 1

    def test_negative_form(self):
        eta = pullback_by_matrix(sigma_can(RATIONAL, 1), shear()).scale(-1)
        result = normalize_besteffort(eta, bits=128)
        assert result.sign == -1
        assert result.error < 1e-12

    def test_degenerate_form(self):
        with pytest.raises(NormalizationError):
            normalize_besteffort(Form.basis(RATIONAL, 1, (1, 2, 3)), bits=128)
