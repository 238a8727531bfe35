"""Tests for the flat right inverse and the graded linear solve."""

from fractions import Fraction

import pytest

from g2_poisson.services.errors import NonClosedFormError, StagnationError
from g2_poisson.services.forms import Form, euclidean_laplacian_jet, random_closed_form
from g2_poisson.services.g2 import laplacian_euclid
from g2_poisson.services.jets import Jet, random_jet
from g2_poisson.services.right_inverse import graded_linear_solve, poly_laplace_inverse, right_inverse_jet
from g2_poisson.services.scalars import RATIONAL


class TestPolyLaplaceInverse:
    """w with -sum d^2 w = q, degree by degree."""

    def test_inverts_random_polynomial(self, rng):
        q = random_jet(rng, RATIONAL, 5, n_terms=6)
        w = poly_laplace_inverse(q)
        assert euclidean_laplacian_jet(w).equal_to_order(q, 3)

    def test_constant(self):
        w = poly_laplace_inverse(Jet.constant(RATIONAL, 3, 14))
        # -sum d^2 (-|x|^2) = 14
        assert w.coefficient((2, 0, 0, 0, 0, 0, 0)) == -1


class TestRightInverse:
    """R = kill-low-jets(d G h)."""

    def test_is_right_inverse_on_closed_forms(self, rng):
        for degree in (2, 3, 4):
            phi = random_closed_form(rng, RATIONAL, 5, degree)
            image = right_inverse_jet(phi)
            assert image.is_closed()
            assert laplacian_euclid(image).equal_to_order(phi)

    def test_top_degree_is_populated(self):
        x1_cubed = Jet.monomial(RATIONAL, 5, (3, 0, 0, 0, 0, 0, 0))
        phi = Form.from_components(RATIONAL, 3, 5, [((1, 2, 3), x1_cubed)])
        image = right_inverse_jet(phi)
        assert image
        assert image.effective == 5
        assert laplacian_euclid(image).equal_to_order(phi, 3)

    def test_dense_closed_forms(self, rng):
        for _ in range(5):
            phi = random_closed_form(rng, RATIONAL, 5, 3, n_components=10, n_terms=12)
            assert laplacian_euclid(right_inverse_jet(phi)).equal_to_order(phi, 3)

    def test_kill_order(self, rng):
        phi = random_closed_form(rng, RATIONAL, 5, 3)
        assert right_inverse_jet(phi, 2).vanishes_through(2)

    def test_zero_form(self):
        zero = Form.zero(RATIONAL, 3, 4)
        assert not right_inverse_jet(zero)

    def test_rejects_non_closed(self):
        x2 = Jet.variable(RATIONAL, 3, 2)
        phi = Form.from_components(RATIONAL, 3, 3, [((1, 4, 5), x2)])
        with pytest.raises(NonClosedFormError):
            right_inverse_jet(phi)

    def test_rejects_functions(self):
        with pytest.raises(NonClosedFormError):
            right_inverse_jet(Form.function(Jet.constant(RATIONAL, 3, 1)))


class TestGradedSolve:
    """L psi = phi for L = gamma * Delta + K."""

    def test_flat_operator(self, rng):
        gamma = Fraction(1, 12)
        phi = random_closed_form(rng, RATIONAL, 5, 3)
        trace = []

        def L(psi):
            return laplacian_euclid(psi).scale(gamma)

        psi = graded_linear_solve(L, phi, gamma, trace=trace)
        assert L(psi).equal_to_order(phi)
        assert all(a < b for a, b in zip(trace, trace[1:]))

    def test_stagnation(self):
        phi = Form.basis(RATIONAL, 3, (1, 2, 3))

        def L(psi):
            return Form.zero(RATIONAL, 3, 3)

        with pytest.raises(StagnationError):
            graded_linear_solve(L, phi, 1)
