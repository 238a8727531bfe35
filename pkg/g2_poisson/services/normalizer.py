"""Best-effort coordinate normalization of eta(0) to a multiple of sigma_can (big-float, not certified)."""

import logging
import os
from dataclasses import dataclass
from itertools import product
from typing import Any, Optional

from .errors import NormalizationError, PositivityError
from .forms import Form, MultiIndex
from .g2 import G2Structure, sigma_can
from .jets import DIM, Jet, unit_exponent
from .scalars import BigFloatField, field_from_tag

logger = logging.getLogger(__name__)

Matrix = list[list[Any]]


def _pull_jet(jet: Jet, images: list[Jet]) -> Jet:
    """Substitute x_i -> images[i] (linear jets) into every monomial."""
    field, order = jet.field, jet.order
    powers: dict[tuple[int, int], Jet] = {}

    def power(axis: int, n: int) -> Jet:
        key = (axis, n)
        if key not in powers:
            powers[key] = Jet.constant(field, order, 1) if n == 0 else power(axis, n - 1) * images[axis]
        return powers[key]

    acc = Jet.zero(field, order)
    for exps, coeff in jet.terms.items():
        term = Jet.constant(field, order, coeff)
        for axis, n in enumerate(exps):
            if n:
                term = term * power(axis, n)
        acc = acc + term
    return acc.with_effective(jet.effective)


def pullback_by_matrix(a: Form, matrix: Matrix) -> Form:
    """(M^* a)(x) = a(Mx) with e^i -> sum_j M_ij e^j."""
    field, order = a.field, a.order
    images = [
        Jet.from_terms(field, order, [(unit_exponent(j + 1), matrix[i][j]) for j in range(DIM)]) for i in range(DIM)
    ]
    covectors = [
        Form.from_components(
            field, 1, order, [((j + 1,), Jet.constant(field, order, matrix[i][j])) for j in range(DIM)]
        )
        for i in range(DIM)
    ]
    result = Form.zero(field, a.degree, order)
    for index, jet in a.terms.items():
        basis = Form.function(_pull_jet(jet, images))
        for axis in index:
            basis = basis.wedge(covectors[axis - 1])
        result = result + basis
    return Form(field, a.degree, order, result.terms, a.effective)


def _triple(values: dict[MultiIndex, Any], u: list[Any], v: list[Any], w: list[Any], ctx: Any) -> Any:
    total = ctx.mpf(0)
    for (i, j, k), coeff in values.items():
        i, j, k = i - 1, j - 1, k - 1
        minor = (
            u[i] * (v[j] * w[k] - v[k] * w[j])
            - u[j] * (v[i] * w[k] - v[k] * w[i])
            + u[k] * (v[i] * w[j] - v[j] * w[i])
        )
        total += coeff * minor
    return total


def _cross(values: dict[MultiIndex, Any], u: list[Any], v: list[Any], ctx: Any) -> list[Any]:
    basis = [[ctx.mpf(1) if a == b else ctx.mpf(0) for b in range(DIM)] for a in range(DIM)]
    return [_triple(values, u, v, basis[k], ctx) for k in range(DIM)]


def _orthonormal_complement(frame: list[list[Any]], ctx: Any) -> list[Any]:
    """First standard basis vector left over after Gram-Schmidt against the frame."""
    for axis in range(DIM):
        v = [ctx.mpf(1) if a == axis else ctx.mpf(0) for a in range(DIM)]
        for f in frame:
            dot = ctx.fsum(x * y for x, y in zip(v, f))
            v = [x - dot * y for x, y in zip(v, f)]
        norm = ctx.sqrt(ctx.fsum(x * x for x in v))
        if norm > ctx.mpf(10) ** (-ctx.dps // 2):
            return [x / norm for x in v]
    raise NormalizationError("could not extend the frame")


def canonical_frame(values: dict[MultiIndex, Any], ctx: Any) -> list[list[Any]]:
    """Orthonormal f_1..f_7 with phi(f_a, f_b, f_c) following the sigma_can pattern, for a unit-metric phi."""
    f1 = _orthonormal_complement([], ctx)
    f2 = _orthonormal_complement([f1], ctx)
    f3 = _cross(values, f1, f2, ctx)
    f4 = _orthonormal_complement([f1, f2, f3], ctx)
    f5 = _cross(values, f1, f4, ctx)
    f6 = _cross(values, f2, f4, ctx)
    f7 = [-x for x in _cross(values, f3, f4, ctx)]
    return [f1, f2, f3, f4, f5, f6, f7]


@dataclass
class NormalizedForm:
    """eta pulled back by x -> matrix * x, with eta(0) close to sign * c * sigma_can."""

    eta: Form
    matrix: Matrix
    c: Any
    sign: int
    error: Any

    def to_dict(self) -> dict[str, Any]:
        return {
            "c": str(self.c),
            "error": str(self.error),
            "matrix": [[str(x) for x in row] for row in self.matrix],
            "sign": self.sign,
        }


def normalize_besteffort(eta: Form, bits: Optional[int] = None) -> NormalizedForm:
    """Move eta(0) onto sign * sigma_can(0) by a linear change of coordinates.

    The symmetric square root S of the metric of sign * eta(0) makes the
    metric Euclidean; a frame built from the cross product of the resulting
    unit form then carries it onto sigma_can. Everything runs in big-float.
    """
    bits = bits or int(os.getenv("G2_BIGFLOAT_BITS", "256"))
    field = eta.field if isinstance(eta.field, BigFloatField) else field_from_tag(f"bigfloat:{bits}")
    ctx = field.ctx
    eta = eta.promote(field)
    try:
        origin = G2Structure.from_form(eta.restrict(0))
    except PositivityError as e:
        raise NormalizationError(f"eta(0) is not definite: {e}", witness=e.witness) from e
    sign = origin.sign
    g0 = ctx.matrix(origin.metric.at_origin())
    eigenvalues, vectors = ctx.eigsy(g0)
    inv_sqrt = ctx.matrix(DIM, DIM)
    for i, j in product(range(DIM), repeat=2):
        inv_sqrt[i, j] = ctx.fsum(vectors[i, m] * vectors[j, m] / ctx.sqrt(eigenvalues[m]) for m in range(DIM))

    unit_values = {}
    signed = eta.scale(sign).restrict(0)
    first = pullback_by_matrix(signed, [[inv_sqrt[i, j] for j in range(DIM)] for i in range(DIM)])
    for index, value in first.at_origin().items():
        unit_values[index] = value
    frame = canonical_frame(unit_values, ctx)
    # x -> S^-1 F x with the frame vectors as columns of F
    matrix = [
        [ctx.fsum(inv_sqrt[i, m] * frame[j][m] for m in range(DIM)) for j in range(DIM)] for i in range(DIM)
    ]
    normalized = pullback_by_matrix(eta, matrix)

    target = sigma_can(field).scale(sign).at_origin()
    values = normalized.at_origin()
    error = max(
        (abs(values.get(index, ctx.mpf(0)) - target.get(index, ctx.mpf(0))) for index in set(values) | set(target)),
        default=ctx.mpf(0),
    )
    if error > ctx.mpf(10) ** (-ctx.dps // 3):
        raise NormalizationError(
            f"the frame search did not reach sigma_can (error {ctx.nstr(error, 8)})",
            witness=repr(values),
        )
    logger.info(f"Normalized eta(0) onto {'+' if sign > 0 else '-'}sigma_can with error {ctx.nstr(error, 8)}")
    return NormalizedForm(normalized, matrix, ctx.mpf(1), sign, error)
