"""First-order correction of the point solution: tau*, sigma_1* = sigma_0 + d tau*, and the gauged sigma_1."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional

from .deturck import deturck_field, flow_pullback
from .errors import PointSolveError
from .forms import Form, Projection, VectorFieldJet, all_indices, exterior_derivative, radial_homotopy, taylor_project
from .g2 import G2Structure
from .jets import DIM, Jet
from .scalars import RATIONAL

logger = logging.getLogger(__name__)

SecondJets = list[list[list[list[Any]]]]
Weights = Callable[[int, int], Any]


def printed_weights(k: int, l: int) -> Fraction:
    """2 / (1 + 3 delta_kl)."""
    return Fraction(2, 4) if k == l else Fraction(2)


def derived_weights(gamma: Any, field: Any = RATIONAL) -> Weights:
    """-1 / (12 gamma (1 + delta_kl)), so that gamma * Delta tau* recovers the quadratic primitive."""
    gamma = field.coerce(gamma)

    def weight(k: int, l: int) -> Any:
        return field.coerce(-1) / (field.coerce(12 * (2 if k == l else 1)) * gamma)

    return weight


def second_jets(tau: Form) -> SecondJets:
    """d^2 tau_ij / dx_k dx_l (0) as a 7x7x7x7 array, 0-based and antisymmetric in (i, j)."""
    if tau.degree != 2:
        raise ValueError(f"second jets are read off a 2-form, got degree {tau.degree}")
    zero = tau.field.zero
    out = [[[[zero] * DIM for _ in range(DIM)] for _ in range(DIM)] for _ in range(DIM)]
    for (i, j), jet in tau.terms.items():
        for exps, coeff in jet.homogeneous_part(2).terms.items():
            axes = [a for a in range(DIM) for _ in range(exps[a])]
            k, l = axes
            value = coeff * tau.field.coerce(2) if k == l else coeff
            for a, b in {(k, l), (l, k)}:
                out[i - 1][j - 1][a][b] = value
                out[j - 1][i - 1][a][b] = -value
    return out


def build_tau_star(
    tau_second: SecondJets,
    weights: Optional[Weights] = None,
    field: Any = RATIONAL,
    order: int = 4,
) -> Form:
    """sum over i<j and k, l of w_kl * d^2 tau_ij/dx_k dx_l (0) * x_k^3 x_l e^ij.

    The printed weights 2/(1 + 3 delta_kl) are the default.
    """
    weights = weights or printed_weights
    for i in range(DIM):
        for j in range(DIM):
            for k in range(DIM):
                for l in range(k + 1, DIM):
                    if tau_second[i][j][k][l] != tau_second[i][j][l][k]:
                        raise ValueError(f"second jets of tau_{i + 1}{j + 1} are not symmetric in ({k + 1}, {l + 1})")
    order = max(order, 4)
    terms: dict[tuple[int, int], Jet] = {}
    for i, j in all_indices(2):
        acc = Jet.zero(field, order)
        for k in range(DIM):
            for l in range(DIM):
                value = tau_second[i - 1][j - 1][k][l]
                if value == 0:
                    continue
                exps = [0] * DIM
                exps[k] += 3
                exps[l] += 1
                acc = acc + Jet.monomial(field, order, exps, field.coerce(weights(k, l)) * field.coerce(value))
        if acc:
            terms[(i, j)] = acc
    return Form(field, 2, order, terms)


@dataclass
class FirstOrderResult:
    """sigma_1 with the pieces that produced it and the three conditions at the origin."""

    sigma1: G2Structure
    tau_star: Form
    gauge: VectorFieldJet
    gamma: Any
    residual: Form
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def satisfied(self) -> bool:
        return all(self.checks.values())

    @property
    def residual_valuation(self) -> int:
        return self.residual.known_valuation()


def origin_gamma(structure: G2Structure) -> Any:
    """gamma with g(0) = gamma^-1 * identity; the metric at the origin must be a multiple of the identity."""
    origin = structure.metric.at_origin()
    diagonal = origin[0][0]
    for i in range(DIM):
        for j in range(DIM):
            expected = diagonal if i == j else structure.field.zero
            if not structure.field.is_zero(origin[i][j] - expected):
                raise PointSolveError(
                    "metric at the origin is not a multiple of the identity",
                    witness=f"g({i + 1},{j + 1})(0) = {origin[i][j]}",
                )
    return structure.field.one / diagonal


def build_sigma1(
    sigma0: G2Structure,
    eta: Form,
    sign: int,
    gamma: Optional[Any] = None,
    weights: Optional[Weights] = None,
    strict: bool = True,
) -> FirstOrderResult:
    """Correct sigma_0 so that Delta sigma_1 sigma_1 - eta vanishes through degree 1.

    Args:
        sigma0: Point solution, an exact polynomial at the working order
        eta: Right-hand side at the same order, over a compatible backend
        sign: Sign certificate of eta
        gamma: Principal scale; read off the metric of sigma_0 when omitted
        weights: tau* weights; derived from gamma when omitted
        strict: Raise when a condition at the origin fails

    Returns:
        FirstOrderResult carrying the checked conditions
    """
    working = sigma0.field
    order = sigma0.order
    eta = eta.promote(working) if eta.field != working else eta
    rho0 = sigma0.laplacian - eta
    rho0.require_effective(1, "Delta sigma_0 sigma_0 - eta")
    if not rho0.vanishes_through(0):
        raise PointSolveError("sigma_0 does not solve the equation at the origin", witness=repr(rho0.at_origin()))

    linear = taylor_project(rho0, 1, Projection.KEEP_LOW_JETS)
    tau = radial_homotopy(linear)
    gamma = origin_gamma(sigma0) if gamma is None else working.coerce(gamma)
    weights = weights or derived_weights(gamma, working)
    tau_star = build_tau_star(second_jets(tau), weights, working, order)
    if tau_star.order != order:
        tau_star = tau_star.restrict(order)
    logger.info(f"tau* has {sum(len(j) for j in tau_star.terms.values())} terms, gamma = {working.format(gamma)}")

    star_form = sigma0.phi + exterior_derivative(tau_star).map_jets(lambda j: j.with_effective(order), effective=order)
    sigma1_star = G2Structure.closed(star_form)
    V = deturck_field(sigma0, sigma1_star, sign)
    sigma1_form = flow_pullback(-V, sigma1_star.phi)
    sigma1 = G2Structure.closed(sigma1_form)

    residual = sigma1.laplacian - eta
    checks = {
        "value": residual.vanishes_through(0),
        "gradient": residual.vanishes_through(1),
        "origin": (sigma1.phi - eta.scale(sign)).vanishes_through(0),
    }
    result = FirstOrderResult(sigma1, tau_star, V, gamma, residual, checks)
    for name, ok in checks.items():
        if not ok:
            logger.warning(f"sigma_1 condition {name} fails at the origin")
    if strict and not result.satisfied:
        failed = [name for name, ok in checks.items() if not ok]
        raise PointSolveError(
            f"sigma_1 violates the first-order conditions {failed}",
            witness=repr(taylor_project(residual, 1, Projection.KEEP_LOW_JETS)),
        )
    return result
