"""Right inverse of the flat Laplacian on closed jet forms and the degree-graded linear solve."""

import logging
from fractions import Fraction
from typing import Any, Callable, Optional

from .errors import NonClosedFormError, StagnationError
from .forms import Form, Projection, euclidean_laplacian_jet, exterior_derivative, radial_homotopy, taylor_project
from .jets import DIM, Jet, unit_exponent

logger = logging.getLogger(__name__)

LinearMap = Callable[[Form], Form]


def _radius_squared(field: Any, order: int) -> Jet:
    acc = Jet.zero(field, order)
    for axis in range(1, DIM + 1):
        acc = acc + Jet.monomial(field, order, unit_exponent(axis, 2), 1)
    return acc


def poly_laplace_inverse(q: Jet) -> Jet:
    """w with laplacian_euclid(w) = q, degree by degree.

    For homogeneous q of degree d, w = sum_j c_j |x|^(2j+2) Delta^j q with
    c_0 = -1/kappa_0 and c_j = c_(j-1)/kappa_j, kappa_j = 2(j+1)(2d-2j+7),
    since Delta(|x|^(2m) p) = |x|^(2m) Delta p - 2m(2e+2m+5)|x|^(2m-2) p
    for p homogeneous of degree e.
    """
    field, order = q.field, q.order
    exact = q.with_effective(order)
    r2 = _radius_squared(field, order)
    result = Jet.zero(field, order)
    for d in range(0, order - 1):
        part = exact.homogeneous_part(d)
        if not part:
            continue
        coeff = Fraction(0)
        radial = r2
        p = part
        j = 0
        while p:
            kappa = 2 * (j + 1) * (2 * d - 2 * j + 7)
            coeff = Fraction(-1, kappa) if j == 0 else coeff / kappa
            result = result + (radial * p).scale(coeff)
            p = euclidean_laplacian_jet(p).with_effective(order)
            radial = radial * r2
            j += 1
    return result.with_effective(min(order, q.effective + 2))


def right_inverse_jet(phi: Form, kill_order: Optional[int] = None) -> Form:
    """R(phi) = kill-low-jets(d G h phi), with G acting on every component.

    The potential is built one order above phi so the top degree of R(phi)
    is populated.
    """
    if phi.degree == 0:
        raise NonClosedFormError("the right inverse acts on forms of degree >= 1")
    if not phi.is_closed():
        raise NonClosedFormError("the right inverse needs a closed form", witness=repr(exterior_derivative(phi)))
    if not phi:
        return Form.zero(phi.field, phi.degree, phi.order, min(phi.order, phi.effective + 2))
    work = phi.extend(phi.order + 1)
    primitive = radial_homotopy(work)
    potential = primitive.map_jets(poly_laplace_inverse, effective=min(work.order, primitive.effective + 2))
    result = exterior_derivative(potential).restrict(phi.order)
    result = Form(result.field, result.degree, result.order, result.terms, min(phi.order, phi.effective + 2))
    if kill_order is None or kill_order < 0:
        return result
    return taylor_project(result, min(kill_order, result.effective), Projection.KILL_LOW_JETS)


def graded_linear_solve(
    L: LinearMap,
    phi: Form,
    gamma: Any,
    max_steps: Optional[int] = None,
    trace: Optional[list[int]] = None,
) -> Form:
    """Solve L psi = phi for L = gamma * Delta + K with K raising valuation after R.

    Each step adds gamma^-1 R(phi - L psi); the residual valuation must grow
    strictly until the residual vanishes to its effective order.
    """
    field = phi.field
    inv_gamma = field.one / field.coerce(gamma)
    steps = max_steps if max_steps is not None else phi.order + 2
    psi = Form.zero(field, phi.degree, phi.order)
    previous = None
    for step in range(steps + 1):
        residual = phi - L(psi) if psi else phi
        valuation = residual.known_valuation()
        if trace is not None:
            trace.append(valuation)
        logger.debug(f"Graded solve step {step}: residual valuation {valuation}, effective {residual.effective}")
        if valuation > residual.effective:
            return psi
        if previous is not None and valuation <= previous:
            raise StagnationError(
                f"residual valuation stayed at {valuation} in step {step}",
                witness=repr(residual.truncate_jets(valuation)),
            )
        previous = valuation
        correction = right_inverse_jet(residual, valuation + 1).scale(inv_gamma)
        psi = psi + correction
    raise StagnationError(f"graded solve did not converge in {steps} steps", witness=f"valuation {previous}")
