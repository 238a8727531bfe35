"""Tests for connections, the DeTurck field, flows and dual-number linearizations."""

import pytest

from g2_poisson.services.deturck import (
    christoffels,
    deturck_field,
    eps_part,
    flow_pullback,
    lie_derivative,
    linearize_V,
    linearized_laplacian,
    perturb,
    psi_map,
    psi_total,
    real_part,
)
from g2_poisson.services.errors import FlowDivergenceError, NonClosedFormError, PositivityError
from g2_poisson.services.forms import Form, VectorFieldJet, random_closed_form, random_form
from g2_poisson.services.g2 import G2Structure, sigma_can
from g2_poisson.services.jets import DIM, Jet, random_jet
from g2_poisson.services.scalars import RATIONAL, DualField


def perturbed_structure(rng, order=3):
    tail = random_closed_form(rng, RATIONAL, order, 3, min_valuation=1, n_components=2, n_terms=2)
    return G2Structure.closed(sigma_can(RATIONAL, order) + tail)


def quadratic_field(rng, order=3):
    return VectorFieldJet(tuple(random_jet(rng, RATIONAL, order, n_terms=2, min_degree=2) for _ in range(DIM)))


class TestConnection:
    """Levi-Civita symbols of jet metrics."""

    def test_flat_metric_has_no_symbols(self, canonical_structure):
        assert christoffels(canonical_structure.metric).is_zero()

    def test_symbols_are_symmetric(self, rng):
        connection = christoffels(perturbed_structure(rng).metric)
        assert connection.is_symmetric()

    def test_symbols_are_memoized(self, rng):
        metric = perturbed_structure(rng).metric
        assert christoffels(metric) is christoffels(metric)


class TestDeTurckField:
    """V(zeta, phi) from the connection difference."""

    def test_self_gauge_vanishes(self, rng):
        structure = perturbed_structure(rng)
        assert deturck_field(structure, structure, 1).is_zero()

    def test_negative_structure_rejected(self, canonical_structure):
        negative = G2Structure.closed(sigma_can(RATIONAL, 4).scale(-1))
        with pytest.raises(PositivityError):
            deturck_field(canonical_structure, negative, 1)


class TestFlows:
    """Lie derivatives and time-1 flows of jet vector fields."""

    def test_radial_lie_derivative_counts_degree(self, canonical_form):
        radial = VectorFieldJet.radial(RATIONAL, canonical_form.order)
        assert lie_derivative(radial, canonical_form) == canonical_form.scale(3)

    def test_zero_field_is_identity(self, sample_three_form):
        zero = VectorFieldJet.zero(RATIONAL, sample_three_form.order)
        assert flow_pullback(zero, sample_three_form) is sample_three_form

    def test_flow_inverse(self, rng):
        V = quadratic_field(rng)
        a = random_form(rng, RATIONAL, 3, 3)
        assert flow_pullback(-V, flow_pullback(V, a)).equal_to_order(a)

    def test_flow_commutes_with_d(self, rng):
        V = quadratic_field(rng)
        a = random_form(rng, RATIONAL, 3, 2)
        assert flow_pullback(V, a.d()).equal_to_order(flow_pullback(V, a).d())

    def test_infinitesimal_flow_is_lie_derivative(self, rng):
        dual = DualField(RATIONAL)
        V = quadratic_field(rng)
        a = random_form(rng, RATIONAL, 3, 2)
        moved = flow_pullback(V.scale(dual.epsilon), a.promote(dual))
        assert real_part(moved).equal_to_order(a)
        assert eps_part(moved).equal_to_order(lie_derivative(V, a))

    def test_infinitesimal_translation(self):
        dual = DualField(RATIONAL)
        x1 = Jet.variable(RATIONAL, 3, 1)
        a = Form.from_components(RATIONAL, 2, 3, [((2, 3), x1)])
        moved = flow_pullback(VectorFieldJet.coordinate(RATIONAL, 3, 1).scale(dual.epsilon), a.promote(dual))
        assert eps_part(moved) == Form.basis(RATIONAL, 3, (2, 3))

    def test_linear_field_diverges_over_rationals(self, sample_three_form):
        radial = VectorFieldJet.radial(RATIONAL, sample_three_form.order)
        with pytest.raises(FlowDivergenceError):
            flow_pullback(radial, sample_three_form)


class TestLinearization:
    """Directional derivatives through the dual backend."""

    def test_perturb_splits(self, canonical_form, rng):
        psi = random_closed_form(rng, RATIONAL, canonical_form.order, 3)
        moved = perturb(canonical_form, psi)
        assert isinstance(moved.field, DualField)
        assert eps_part(moved) == psi
        assert real_part(moved) == canonical_form

    def test_constant_direction_has_flat_laplacian(self, canonical_structure):
        psi = Form.basis(RATIONAL, canonical_structure.order, (1, 2, 4))
        assert linearized_laplacian(canonical_structure, psi).vanishes_through()

    def test_non_closed_direction_rejected(self, canonical_structure):
        x5 = Jet.variable(RATIONAL, canonical_structure.order, 5)
        psi = Form.from_components(RATIONAL, 3, canonical_structure.order, [((1, 2, 3), x5)])
        with pytest.raises(NonClosedFormError):
            linearize_V(canonical_structure, canonical_structure, psi, 1)

    def test_linearized_gauge_is_homogeneous(self, rng):
        zeta = perturbed_structure(rng)
        phi = perturbed_structure(rng)
        psi = random_closed_form(rng, RATIONAL, 3, 3, min_valuation=1)
        once = linearize_V(zeta, phi, psi, 1)
        twice = linearize_V(zeta, phi, psi.scale(2), 1)
        assert (twice - once.scale(2)).is_zero()

    def test_zero_direction(self, rng):
        zeta = perturbed_structure(rng)
        assert linearize_V(zeta, zeta, Form.zero(RATIONAL, 3, 3), 1).is_zero()


class TestPsiMap:
    """The remainder Psi of the linearized Laplacian."""

    def test_total_does_not_see_zeta(self, rng):
        first, second, phi = [perturbed_structure(rng) for _ in range(3)]
        psi = random_closed_form(rng, RATIONAL, 3, 3, min_valuation=1)
        assert psi_total(first, phi, psi, 1).equal_to_order(psi_total(second, phi, psi, 1))

    def test_total_reassembles_linearization(self, rng):
        zeta = perturbed_structure(rng)
        phi = perturbed_structure(rng)
        psi = random_closed_form(rng, RATIONAL, 3, 3, min_valuation=1)
        expected = linearized_laplacian(phi, psi) + phi.laplacian_of(psi)
        assert psi_total(zeta, phi, psi, 1).equal_to_order(expected)

    def test_keeps_closed_forms_closed(self, rng):
        phi = perturbed_structure(rng, 4)
        zeta = perturbed_structure(rng, 4)
        psi = random_closed_form(rng, RATIONAL, 4, 3, min_valuation=1)
        assert psi_map(phi, phi, psi, 1).is_closed()
        assert psi_map(zeta, phi, psi, 1).is_closed()
