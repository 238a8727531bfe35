"""Seeded property checks for the right inverse, dilations, Taylor projections and the DeTurck gauge."""

import logging
import random
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable

from ..services.deturck import (
    deturck_field,
    eps_part,
    flow_pullback,
    lie_derivative,
    linearize_V,
    linearized_laplacian,
    psi_map,
    psi_total,
    real_part,
)
from ..services.forms import (
    Form,
    Projection,
    VectorFieldJet,
    exterior_derivative,
    random_closed_form,
    random_form,
    taylor_project,
)
from ..services.g2 import G2Structure, laplacian_euclid, sigma_can
from ..services.jets import DIM, random_jet
from ..services.point_model import build_sigma0
from ..services.reports import Claim, ClaimRecorder
from ..services.right_inverse import right_inverse_jet
from ..services.scalars import DualField
from ..services.solver import PRINTED_GAMMA, gauged_linear_operator
from .base import BaseSuite

logger = logging.getLogger(__name__)

DILATIONS = (Fraction(2), Fraction(1, 2), Fraction(-3), Fraction(2, 3))

Case = Callable[[random.Random], tuple[bool, str]]


def _batch(rng: random.Random, cases: int, check: Case) -> tuple[bool, str]:
    """Run check on `cases` draws; the witness names the first failing draw."""
    for case in range(cases):
        ok, witness = check(rng)
        if not ok:
            return False, f"case {case}: {witness}"
    return True, f"{cases} cases"


def _random_positive(rng: random.Random, field: Any, order: int) -> G2Structure:
    """sigma_can plus a small closed perturbation vanishing at the origin."""
    tail = random_closed_form(rng, field, order, 3, min_valuation=1, n_components=2, n_terms=2)
    return G2Structure.closed(sigma_can(field, order) + tail)


def _random_field(rng: random.Random, field: Any, order: int) -> VectorFieldJet:
    return VectorFieldJet(tuple(random_jet(rng, field, order, n_terms=2, min_degree=2) for _ in range(DIM)))


class IdentitiesSuite(BaseSuite):
    """Exact identities of every module, drawn from one seeded generator."""

    def __init__(self):
        super().__init__(
            name="identities",
            description="Right inverse, dilation commutation, Taylor projections and DeTurck gauge identities.",
            default_order=6,
        )

    def run(self, seed: int, order: int, backend: Any, **kwargs: Any) -> list[Claim]:
        """
        Runs the identity batches in a fixed order from one generator.

        Args:
            seed: Seed of the shared random.Random
            order: Truncation order of the flat identities
            backend: Scalar field of the random jets
            **kwargs: cases (flat identities, default 100), gauge_cases (default 50), gauge_order (default 3)

        Returns:
            One claim per identity family
        """
        rng = random.Random(seed)
        cases = int(kwargs.get("cases", 100))
        gauge_cases = int(kwargs.get("gauge_cases", 50))
        gauge_order = int(kwargs.get("gauge_order", 3))
        recorder = ClaimRecorder()

        def right_inverse(rng: random.Random) -> tuple[bool, str]:
            phi = random_closed_form(rng, backend, order, 3, min_valuation=1)
            R = right_inverse_jet(phi)
            if not exterior_derivative(R).vanishes_through():
                return False, "d R(phi) != 0"
            return laplacian_euclid(R).equal_to_order(phi), repr(phi)

        def dilation(rng: random.Random) -> tuple[bool, str]:
            phi = random_closed_form(rng, backend, order, 3)
            s = rng.choice(DILATIONS)
            left = laplacian_euclid(phi.dilate(s))
            right = laplacian_euclid(phi).dilate(s).scale(backend.coerce(1 / (s * s)))
            return left.equal_to_order(right), f"s = {s}"

        def projection(rng: random.Random) -> tuple[bool, str]:
            alpha = random_form(rng, backend, order, rng.randint(1, 4))
            n = rng.randint(1, order - 1)
            keep = exterior_derivative(taylor_project(alpha, n, Projection.KEEP_LOW_JETS))
            expected = taylor_project(exterior_derivative(alpha), n - 1, Projection.KEEP_LOW_JETS)
            if not keep.equal_to_order(expected, n - 1):
                return False, f"d P_{n} != P_{n - 1} d"
            closed = random_closed_form(rng, backend, order, 3)
            killed = taylor_project(closed, n, Projection.KILL_LOW_JETS)
            return killed.is_closed(), f"n = {n}"

        recorder.check("right-inverse", "Delta_g R = id and d R = 0", lambda: _batch(rng, cases, right_inverse))
        recorder.check(
            "dilation-commutation",
            "Delta_g A_s phi = s^-2 A_s Delta_g phi",
            lambda: _batch(rng, cases, dilation),
        )
        recorder.check(
            "taylor-projection-closedness",
            "d P_n = P_(n-1) d",
            lambda: _batch(rng, cases, projection),
        )
        self._gauge_claims(recorder, rng, backend, gauge_order, gauge_cases)
        return recorder.claims

    def _gauge_claims(
        self, recorder: ClaimRecorder, rng: random.Random, backend: Any, order: int, cases: int
    ) -> None:
        few = max(1, cases // 10)

        def self_gauge(rng: random.Random) -> tuple[bool, str]:
            zeta = _random_positive(rng, backend, order)
            return deturck_field(zeta, zeta, 1).is_zero(), "V(zeta, zeta) != 0"

        def zero_flow(rng: random.Random) -> tuple[bool, str]:
            a = random_form(rng, backend, order, rng.randint(0, DIM))
            return flow_pullback(VectorFieldJet.zero(backend, order), a) == a, "zero flow moved the form"

        def inverse_flow(rng: random.Random) -> tuple[bool, str]:
            V = _random_field(rng, backend, order)
            a = random_form(rng, backend, order, 3)
            back = flow_pullback(-V, flow_pullback(V, a))
            return back.equal_to_order(a), repr(V.components)

        def flow_derivative(rng: random.Random) -> tuple[bool, str]:
            # flow of eps * V is a + eps * L_V a since eps^2 = 0
            V = _random_field(rng, backend, order)
            a = random_form(rng, backend, order, rng.randint(0, DIM))
            dual = DualField(backend)
            moved = flow_pullback(V.scale(dual.epsilon), a.promote(dual))
            if not real_part(moved).equal_to_order(a):
                return False, "real part moved"
            return eps_part(moved).equal_to_order(lie_derivative(V, a)), repr(V.components)

        def homogeneous_gauge(rng: random.Random) -> tuple[bool, str]:
            zeta = _random_positive(rng, backend, order + 1)
            phi = _random_positive(rng, backend, order + 1)
            psi = random_closed_form(rng, backend, order + 1, 3, min_valuation=1)
            once = linearize_V(zeta, phi, psi, 1)
            twice = linearize_V(zeta, phi, psi.scale(2), 1)
            return (twice - once.scale(2)).is_zero(), repr(psi)

        def closed_preserving(rng: random.Random) -> tuple[bool, str]:
            zeta = _random_positive(rng, backend, order + 2)
            phi = _random_positive(rng, backend, order + 2)
            psi = random_closed_form(rng, backend, order + 2, 3, min_valuation=1)
            return psi_map(zeta, phi, psi, 1).is_closed(), repr(psi)

        def zeta_independent(rng: random.Random) -> tuple[bool, str]:
            first, second, phi = [_random_positive(rng, backend, order + 2) for _ in range(3)]
            psi = random_closed_form(rng, backend, order + 2, 3, min_valuation=1)
            totals = [psi_total(zeta, phi, psi, 1) for zeta in (first, second)]
            return totals[0].equal_to_order(totals[1]), repr(psi)

        def pointwise(rng: random.Random) -> tuple[bool, str]:
            zeta = _random_positive(rng, backend, order + 2)
            phi = _random_positive(rng, backend, order + 2)
            psi = random_closed_form(rng, backend, order + 2, 3)
            chi = random_closed_form(rng, backend, order + 2, 3, min_valuation=2)
            left = psi_map(zeta, phi, psi, 1).at_origin()
            right = psi_map(zeta, phi, psi + chi, 1).at_origin()
            return left == right, f"chi = {chi!r}"

        recorder.check("deturck-self-gauge", "V(zeta, zeta) = 0", lambda: _batch(rng, cases, self_gauge))
        recorder.check("flow-zero-field", "flow of the zero field is the identity", lambda: _batch(rng, cases, zero_flow))
        recorder.check("flow-inverse", "flow then inverse flow is the identity", lambda: _batch(rng, cases, inverse_flow))
        recorder.check(
            "flow-derivative = lie-derivative",
            "Taylor's theorem, equality and Cartan's formula",
            lambda: _batch(rng, cases, flow_derivative),
        )
        recorder.check(
            "linearized-gauge-homogeneous",
            "The components of V'",
            lambda: _batch(rng, few, homogeneous_gauge),
        )
        recorder.check(
            "psi-closed-preserving",
            "Psi maps closed forms to closed forms",
            lambda: _batch(rng, few, closed_preserving),
        )
        recorder.check(
            "psi-total-zeta-independent",
            "the sum on the right-hand side is the same for all choices of zeta",
            lambda: _batch(rng, few, zeta_independent),
        )
        recorder.check(
            "psi-pointwise-first-order",
            "linear functions of the components of psi(x) and nabla psi(x)",
            lambda: _batch(rng, few, pointwise),
        )
        recorder.check(
            "linearized-principal-part",
            "coincide with those of the operator 12^-1 Delta_g",
            lambda: _batch(rng, few, lambda r: _linearized_principal_part(r, _local_model(order + 2))),
        )
        recorder.check(
            "gauged-principal-part",
            "gamma Delta_g + K with K raising valuation",
            lambda: _batch(rng, few, lambda r: _gauged_principal_part(r, _local_model(order + 2))),
        )


@lru_cache(maxsize=None)
def _local_model(order: int) -> G2Structure:
    """sigma_0 for eta(0) = sigma_can."""
    return build_sigma0(1, 1, order).sigma0


def _quadratic_direction(rng: random.Random, field: Any, order: int) -> Form:
    """Closed psi with psi(0) = 0 and grad psi(0) = 0: d of a cubic 2-form."""
    primitive = random_form(rng, field, order + 1, 2, n_components=2, n_terms=2, min_degree=3, max_degree=3)
    return exterior_derivative(primitive).restrict(order)


def _linearized_principal_part(rng: random.Random, sigma0: G2Structure) -> tuple[bool, str]:
    """(d/dt Delta_{sigma_0 + t psi}(sigma_0 + t psi) + 12^-1 Delta_g psi)(0) = 0 on quadratic psi."""
    psi = _quadratic_direction(rng, sigma0.field, sigma0.order)
    total = linearized_laplacian(sigma0, psi) + sigma0.laplacian_of(psi).scale(PRINTED_GAMMA)
    values = total.at_origin()
    return not values, f"residue {values!r}"


def _gauged_principal_part(rng: random.Random, sigma0: G2Structure) -> tuple[bool, str]:
    """Origin value of the gauged linearization on a quadratic psi against gamma Delta_g psi."""
    field = sigma0.field
    operator = gauged_linear_operator(sigma0, sigma0.laplacian, 1)
    gamma = field.one / sigma0.metric.at_origin()[0][0]
    psi = _quadratic_direction(rng, field, sigma0.order)
    left = operator(psi).at_origin()
    right = sigma0.laplacian_of(psi).scale(gamma).at_origin()
    return left == right, f"gamma = {field.format(gamma)}"


# Create a single, global instance of the suite
identities_suite = IdentitiesSuite()
