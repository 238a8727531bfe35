"""Jet-order solution of Delta_sigma sigma = eta at the origin through the DeTurck-gauged fixed point."""

import logging
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

from .deturck import deturck_field, eps_part, flow_pullback, perturb
from .errors import (
    InsufficientOrderError,
    NonClosedFormError,
    NormalizationError,
    PointSolveError,
    PositivityError,
    StagnationError,
)
from .first_order import FirstOrderResult, build_sigma1
from .forms import Form, VectorFieldJet, exterior_derivative
from .g2 import G2Structure, Positivity, canonical_sign, positivity_check
from .point_model import CANONICAL_TRIPLES, PointSolution, build_sigma0
from .right_inverse import LinearMap, graded_linear_solve
from .scale_audit import ScaleAudit, determine_scale

logger = logging.getLogger(__name__)

PRINTED_GAMMA = Fraction(1, 12)


def gauged_residual(sigma1: G2Structure, psi: Form, eta: Form, sign: int) -> Form:
    """Delta_{sigma_1+psi}(sigma_1+psi) - (flow of V(sigma_1, sigma_1+psi))^* eta."""
    moved = G2Structure.closed(sigma1.phi + psi) if psi else sigma1
    V = deturck_field(sigma1, moved, sign)
    return moved.laplacian - flow_pullback(V, eta)


def gauged_linear_operator(sigma1: G2Structure, eta: Form, sign: int) -> LinearMap:
    """psi -> minus the derivative of the gauged residual at psi = 0, exact through dual numbers."""

    def apply(psi: Form) -> Form:
        if not psi:
            return Form.zero(sigma1.field, 3, sigma1.order, psi.effective)
        direction = perturb(sigma1.phi, psi) - sigma1.phi
        return -eps_part(gauged_residual(sigma1, direction, eta, sign))

    return apply


def normalization_scale(eta: Form, sign: int) -> Any:
    """c > 0 with eta(0) = sign * c * sigma_can(0); NormalizationError otherwise."""
    field = eta.field
    values = eta.at_origin()
    first = CANONICAL_TRIPLES[0]
    c = field.coerce(values.get(first, field.zero)) * field.coerce(sign) * field.coerce(canonical_sign(first))
    if field.sign(c) <= 0:
        raise NormalizationError(
            f"eta(0) is not a positive multiple of {'+' if sign > 0 else '-'}sigma_can(0)",
            witness=repr(values),
        )
    for index, value in values.items():
        if canonical_sign(index) == 0:
            raise NormalizationError("eta(0) has components outside the canonical pattern", witness=repr(values))
    for index in CANONICAL_TRIPLES:
        expected = c * field.coerce(sign * canonical_sign(index))
        if not field.is_zero(field.coerce(values.get(index, field.zero)) - expected):
            raise NormalizationError(
                "eta(0) is not a multiple of sigma_can(0); normalize coordinates first",
                witness=repr(values),
            )
    return c


@dataclass
class PoissonProblem:
    """A closed definite right-hand side with its sign certificate and normalization."""

    eta: Form
    order: int
    sign: int
    scale: Any

    @property
    def field(self) -> Any:
        return self.eta.field

    @classmethod
    def from_form(cls, eta: Form, order: Optional[int] = None, sign: Optional[int] = None) -> "PoissonProblem":
        if eta.degree != 3:
            raise NormalizationError(f"eta must be a 3-form, got degree {eta.degree}")
        if not eta.is_closed():
            raise NonClosedFormError("eta is not closed", witness=repr(exterior_derivative(eta)))
        positivity = positivity_check(eta)
        if positivity is Positivity.NEITHER:
            raise PositivityError("eta is neither positive nor negative at the origin", witness=repr(eta.at_origin()))
        detected = 1 if positivity is Positivity.POSITIVE else -1
        if sign is not None and sign != detected:
            raise NormalizationError(f"--sign {sign:+d} disagrees with eta, which is {positivity.value}")
        order = eta.order if order is None else order
        if order > eta.order:
            eta = eta.extend(order)
        elif order < eta.order:
            eta = eta.restrict(order)
        return cls(eta, order, detected, normalization_scale(eta, detected))


@dataclass
class JetSolution:
    """sigma with Delta_sigma sigma - eta vanishing through degree order - 2."""

    sigma: Form
    gauge: VectorFieldJet
    residual: Form
    residual_valuation: int
    gauged_valuation: int
    trace: list[dict[str, Any]] = field(default_factory=list)
    gamma: Any = None
    point: Optional[PointSolution] = None
    first_order: Optional[FirstOrderResult] = None
    audit: Optional[ScaleAudit] = None

    @property
    def field(self) -> Any:
        return self.sigma.field

    @property
    def gauge_consistent(self) -> bool:
        cap = self.sigma.order - 1
        return min(self.residual_valuation, cap) == min(self.gauged_valuation, cap)

    def to_dict(self) -> dict[str, Any]:
        data = {
            "backend": self.field.tag,
            "gamma": self.field.format(self.field.coerce(self.gamma)),
            "gauge_consistent": self.gauge_consistent,
            "gauged_valuation": self.gauged_valuation,
            "order": self.sigma.order,
            "residual_valuation": self.residual_valuation,
            "trace": self.trace,
        }
        if self.point is not None:
            data["point"] = self.point.to_dict()
        if self.first_order is not None:
            data["first_order"] = dict(self.first_order.checks)
        if self.audit is not None:
            data["scale"] = self.audit.to_dict()
        return data


def _capped_valuation(a: Form, cap: int) -> int:
    return min(a.known_valuation(), cap)


def jet_poisson_solve(
    problem: PoissonProblem,
    margin: int = 4,
    max_iterations: Optional[int] = None,
    audit: bool = True,
) -> JetSolution:
    """Solve Delta_sigma sigma = eta through degree order - 2 at the origin.

    Args:
        problem: Normalized right-hand side and target order
        margin: Extra working order consumed by flows and Laplacians
        max_iterations: Outer iteration limit, the working order by default
        audit: Run the scale audit and attach it to the solution

    Returns:
        JetSolution certified on a freshly built structure
    """
    k = problem.order
    target = k - 2
    working_order = max(k + margin, 5)
    max_iterations = max_iterations or working_order
    started = time.perf_counter()

    audit_result = determine_scale(problem.sign, problem.scale, problem.field) if audit else None
    point = build_sigma0(problem.scale, problem.sign, working_order, problem.field)
    working = point.field
    eta = problem.eta.extend(working_order).promote(working)
    logger.info(f"Point solution ready over {working.tag} at working order {working_order}")

    first = build_sigma1(point.sigma0, eta, problem.sign, strict=False)
    if not (first.checks["value"] and first.checks["origin"]):
        raise PointSolveError("sigma_1 misses the right-hand side at the origin", witness=repr(first.checks))
    if not first.checks["gradient"]:
        logger.warning("sigma_1 leaves a linear residual; the outer loop absorbs it")
    sigma1 = first.sigma1
    gamma = first.gamma
    if not working.is_zero(gamma - working.coerce(PRINTED_GAMMA)):
        logger.warning(f"Principal scale gamma = {working.format(gamma)} differs from 1/12")

    operator = gauged_linear_operator(sigma1, eta, problem.sign)
    psi = Form.zero(working, 3, working_order)
    trace: list[dict[str, Any]] = []
    previous = None
    for iteration in range(max_iterations + 1):
        residual = gauged_residual(sigma1, psi, eta, problem.sign)
        valuation = residual.known_valuation()
        logger.info(f"Outer iteration {iteration}: gauged residual valuation {valuation}")
        if valuation > target:
            residual.require_effective(target, "gauged residual")
            trace.append({"iteration": iteration, "valuation": valuation})
            break
        if residual.effective < valuation:
            raise InsufficientOrderError(
                f"gauged residual is only known to order {residual.effective} at valuation {valuation}; "
                "rerun with a larger --order margin",
            )
        if previous is not None and valuation <= previous:
            raise StagnationError(f"gauged residual valuation stuck at {valuation}", witness=f"iteration {iteration}")
        previous = valuation
        inner: list[int] = []
        psi = psi + graded_linear_solve(operator, residual, gamma, trace=inner)
        trace.append({"iteration": iteration, "valuation": valuation, "inner": inner})
    else:
        raise StagnationError(f"no convergence in {max_iterations} outer iterations", witness=f"valuation {previous}")

    gauged_valuation = residual.known_valuation()
    star = G2Structure.closed(sigma1.phi + psi)
    V = deturck_field(sigma1, star, problem.sign)
    sigma = flow_pullback(-V, star.phi)

    # certificate from scratch
    certified = G2Structure.closed(sigma)
    if certified.sign != 1:
        raise PointSolveError("solution is not positive at the origin", witness=repr(sigma.at_origin()))
    final = certified.laplacian - eta
    final.require_effective(target, "Delta sigma sigma - eta")
    final_valuation = final.known_valuation()
    if final_valuation <= target:
        raise StagnationError(
            f"certified residual valuation {final_valuation} does not exceed {target}",
            witness=repr(final.truncate_jets(final_valuation)),
        )
    logger.info(
        f"Solved to order {k}: residual valuation {final_valuation} in {time.perf_counter() - started:.1f}s"
    )
    return JetSolution(
        sigma=sigma.restrict(k),
        gauge=V.map_jets(lambda j: j.restrict(k)),
        residual=final.restrict(k),
        residual_valuation=_capped_valuation(final, k + 1),
        gauged_valuation=_capped_valuation(residual, k + 1),
        trace=trace,
        gamma=gamma,
        point=point,
        first_order=first,
        audit=audit_result,
    )


class SolverService:
    """Environment-configured entry point to the solver."""

    def __init__(self):
        self.default_order = int(os.getenv("G2_DEFAULT_ORDER", "6"))
        self.margin = int(os.getenv("G2_ORDER_MARGIN", "4"))
        max_iterations = os.getenv("G2_MAX_OUTER_ITERATIONS")
        self.max_iterations = int(max_iterations) if max_iterations else None

    def problem(self, eta: Form, order: Optional[int] = None, sign: Optional[int] = None) -> PoissonProblem:
        return PoissonProblem.from_form(eta, order or self.default_order, sign)

    def solve(self, problem: PoissonProblem, audit: bool = True) -> JetSolution:
        logger.info(f"Solving to order {problem.order} with margin {self.margin} over {problem.field.tag}")
        return jet_poisson_solve(problem, self.margin, self.max_iterations, audit)


# Global service instance
solver_service = SolverService()
