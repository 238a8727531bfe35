"""Local model at the origin: the quadratic form theta and the point solution sigma_0.

A closed structure sigma_0 with sigma_0(0) = sign * eta(0) and
Delta sigma_0 (0) = eta(0) is assembled as c * (sigma_can + t L + t^2 Q):
L is a closed linear 3-form that switches on torsion at the origin, Q a
closed quadratic 3-form found by exact linear algebra, and t the scale that
matches the canonical component.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Optional

from sympy import Matrix
from sympy import Rational as SympyRational

from .errors import PointSolveError, ScalarDomainError
from .forms import Form, MultiIndex, all_indices, complement, complement_sign
from .g2 import INDEX_MINUS, INDEX_PLUS, G2Structure, canonical_sign, laplacian_euclid, sigma_can, theta_form
from .jets import DIM, Jet, unit_exponent
from .reports import Claim, ClaimRecorder
from .scalars import RATIONAL, RationalField, exact_rational_root, field_from_tag

logger = logging.getLogger(__name__)

CANONICAL_TRIPLES: tuple[MultiIndex, ...] = INDEX_PLUS + INDEX_MINUS

# |sigma_can|^2 in the flat metric
CANONICAL_NORM = 7

# Delta_theta theta (0) as printed for the quadratic form theta.
PRINTED_THETA_FACTOR = 12

DEFAULT_CANDIDATES = 6


def canonical_component(values: dict[MultiIndex, Any], field: Any = RATIONAL) -> Any:
    """Coefficient of sigma_can in the flat orthogonal splitting of a constant 3-form."""
    acc = field.zero
    for index in CANONICAL_TRIPLES:
        value = values.get(index)
        if value is not None:
            acc = acc + field.coerce(value) * field.coerce(canonical_sign(index))
    return acc / field.coerce(CANONICAL_NORM)


def describe_values(values: dict[MultiIndex, Any], field: Any = RATIONAL) -> str:
    if not values:
        return "0"
    return ", ".join(f"e^{''.join(map(str, index))}: {field.format(values[index])}" for index in sorted(values))


def values_match(left: dict[MultiIndex, Any], right: dict[MultiIndex, Any], field: Any) -> bool:
    """Componentwise equality up to the zero test of the backend."""
    return all(
        field.is_zero(field.coerce(left.get(index, field.zero)) - field.coerce(right.get(index, field.zero)))
        for index in set(left) | set(right)
    )


def _squares(field: Any, order: int, axes: MultiIndex, weight: Any = 1) -> Jet:
    acc = Jet.zero(field, order)
    for axis in axes:
        acc = acc + Jet.monomial(field, order, unit_exponent(axis, 2), weight)
    return acc


def build_theta(sign: int = 1, field: Any = RATIONAL, order: int = 2) -> G2Structure:
    """The quadratic closed form with unit coefficients at the origin."""
    return G2Structure.closed(theta_form(sign, 1, field, max(order, 2)))


# Claims about theta


def _check_b_diagonal(structure: G2Structure) -> tuple[bool, Optional[str]]:
    field, order = structure.field, structure.order
    total = _squares(field, order, tuple(range(1, DIM + 1)))
    for i in range(DIM):
        expected = (Jet.constant(field, order, 1) - total - _squares(field, order, (i + 1,), 2)).scale(6)
        entry = structure.b_matrix[i][i]
        if not entry.equal_to_order(expected, 2):
            return False, f"B_{i + 1}{i + 1} = {entry!r}"
    return True, None


def _check_linear_parts(structure: G2Structure) -> tuple[bool, Optional[str]]:
    for i in range(DIM):
        linear = structure.metric.entries[i][i].homogeneous_part(1)
        if linear:
            return False, f"l_{i + 1} = {linear!r}"
    return True, None


def _check_quadratic_parts(structure: G2Structure) -> tuple[bool, Optional[str]]:
    field, order = structure.field, structure.order
    for i in range(DIM):
        quadratic = structure.metric.entries[i][i].homogeneous_part(2)
        expected = _squares(field, order, (i + 1,), -2).homogeneous_part(2)
        if quadratic != expected:
            return False, f"s_{i + 1} = {quadratic!r}"
    return True, None


def _check_quadratic_sum(structure: G2Structure) -> tuple[bool, Optional[str]]:
    field, order = structure.field, structure.order
    total = Jet.zero(field, order)
    for i in range(DIM):
        total = total + structure.metric.entries[i][i].homogeneous_part(2)
    expected = _squares(field, order, tuple(range(1, DIM + 1)), -2).homogeneous_part(2)
    return total == expected, None if total == expected else f"s_1 + ... + s_7 = {total!r}"


def _check_star_five_forms(structure: G2Structure) -> tuple[bool, Optional[str]]:
    field, order = structure.field, structure.order
    for index in all_indices(5):
        image = structure.star(Form.basis(field, order, index))
        expected = Form.basis(field, order, complement(index), complement_sign(index))
        if not image.equal_to_order(expected, 1):
            return False, f"*e^{''.join(map(str, index))} = {image!r}"
    return True, None


def _check_star_three_forms(structure: G2Structure) -> tuple[bool, Optional[str]]:
    """*e^ijk = (1 - |x_ijk|^2 + |x_abcd|^2 + O(|x|^3)) e^abcd, as printed."""
    field, order = structure.field, structure.order
    for index in all_indices(3):
        rest = complement(index)
        factor = Jet.constant(field, order, 1) - _squares(field, order, index) + _squares(field, order, rest)
        expected = Form(field, DIM - 3, order, {rest: factor.scale(complement_sign(index))})
        image = structure.star(Form.basis(field, order, index))
        if not image.equal_to_order(expected, 2):
            return False, f"*e^{''.join(map(str, index))} = {image!r}"
    return True, None


def _surrogate_form(field: Any, order: int) -> Form:
    """sum over the canonical triples of +-(1 - 2|x_ijk|^2) e^ijk."""
    terms = {}
    for index in CANONICAL_TRIPLES:
        jet = Jet.constant(field, order, 1) - _squares(field, order, index, 2)
        terms[index] = jet.scale(canonical_sign(index))
    return Form(field, 3, order, terms)


def _check_origin_value(structure: G2Structure, factor: int) -> tuple[bool, Optional[str]]:
    values = structure.laplacian.at_origin()
    expected = sigma_can(structure.field).scale(factor).at_origin()
    return values == expected, describe_values(values, structure.field)


def verify_pointsolve(order: int = 2) -> list[Claim]:
    """Check every computation behind the quadratic point solution; failures keep witnesses."""
    recorder = ClaimRecorder()
    with recorder.timed("theta"):
        theta = build_theta(1, RATIONAL, order)
        theta_minus = build_theta(-1, RATIONAL, order)
    can = sigma_can(RATIONAL)

    recorder.check("theta-closed", "Clearly, it is closed and oriented", lambda: theta.phi.is_closed())
    recorder.check(
        "theta-at-origin = sigma_can",
        "theta(p) has unit coefficients on the canonical pattern",
        lambda: theta.phi.at_origin() == can.at_origin(),
    )
    recorder.check("b-diagonal-expansion", "direct computation shows that", lambda: _check_b_diagonal(theta))
    recorder.check("metric-diagonal", "vol_theta is the volume form", lambda: theta.metric.is_diagonal_through(2))
    recorder.check("linear-parts-vanish", "each l_i must be identically 0", lambda: _check_linear_parts(theta))
    recorder.check(
        "sum-of-quadratic-parts",
        "s_1+...+s_7 = -2(x_1^2+x_2^2+...+x_7^2)",
        lambda: _check_quadratic_sum(theta),
    )
    recorder.check("quadratic-parts", "g_theta ii(x)=1-2x_i^2+O(|x|^3)", lambda: _check_quadratic_parts(theta))
    recorder.check(
        "star-five-forms",
        "star_theta e^{ijklm}=(1+O(|x|^2))e^{pq}",
        lambda: _check_star_five_forms(theta),
    )
    recorder.check(
        "star-three-forms",
        "star_theta e^{ijk}=(1-x_i^2-x_j^2-x_k^2+x_a^2+x_b^2+x_c^2+x_d^2+O(|x|^3))e^{abcd}",
        lambda: _check_star_three_forms(theta),
    )
    recorder.check(
        "euclidean-surrogate = 12·sigma_can",
        "Delta_g(sum tilde-theta_ijk e^{ijk})(p)=12sigma_can(p)",
        lambda: laplacian_euclid(_surrogate_form(RATIONAL, max(order, 2))).at_origin()
        == can.scale(PRINTED_THETA_FACTOR).at_origin(),
    )
    with recorder.timed("laplacian"):
        recorder.check(
            "delta-theta-at-origin = 12·sigma_can",
            "=12sigma_can(p)",
            lambda: _check_origin_value(theta, PRINTED_THETA_FACTOR),
        )
        recorder.check(
            "delta-theta-negative-at-origin = -12·sigma_can",
            "with the signs reversed at x_i^2, x_j^2 and x_k^2",
            lambda: _check_origin_value(theta_minus, -PRINTED_THETA_FACTOR),
        )
    pairing = canonical_component(theta.laplacian.at_origin())
    recorder.check(
        "canonical-component-of-delta-theta",
        "Rescaling theta will give us sigma_0",
        lambda: (True, f"{pairing}"),
        informational=True,
    )
    return recorder.claims


# Point solution


def closed_linear_candidates(order: int = 2) -> list[tuple[str, Form]]:
    """x_k e^I with k in I for the canonical triples; every one is closed."""
    candidates = []
    for index in CANONICAL_TRIPLES:
        for axis in index:
            form = Form(RATIONAL, 3, order, {index: Jet.variable(RATIONAL, order, axis)})
            candidates.append((f"x{axis}*e^{''.join(map(str, index))}", form))
    return candidates


def _quadratic_batches() -> list[list[tuple[MultiIndex, tuple[int, ...]]]]:
    """Closed quadratic monomial forms x_k x_l e^I with k, l in I, in solve order."""
    triples = all_indices(3)
    batches = [[(index, unit_exponent(index[pos], 2)) for index in triples] for pos in range(3)]
    mixed = []
    for index in triples:
        for a in range(3):
            for b in range(a + 1, 3):
                exps = [0] * DIM
                exps[index[a] - 1] = 1
                exps[index[b] - 1] = 1
                mixed.append((index, tuple(exps)))
    batches.append(mixed)
    return batches


@lru_cache(maxsize=None)
def origin_laplacian(perturbation: tuple[tuple[MultiIndex, tuple[int, ...], Fraction], ...]) -> tuple:
    """Delta(sigma_can + P)(0) for a rational polynomial P given as (index, exponent, coeff) triples."""
    order = 2
    form = sigma_can(RATIONAL, order)
    for index, exps, coeff in perturbation:
        form = form + Form(RATIONAL, 3, order, {index: Jet.monomial(RATIONAL, order, exps, coeff)})
    values = G2Structure.closed(form).laplacian.at_origin()
    return tuple(sorted(values.items()))


def _as_key(form: Form) -> tuple[tuple[MultiIndex, tuple[int, ...], Fraction], ...]:
    return tuple(sorted((index, exps, coeff) for index, jet in form.terms.items() for exps, coeff in jet.terms.items()))


def _to_sympy(value: Fraction) -> SympyRational:
    return SympyRational(value.numerator, value.denominator)


def solve_quadratic_part(rest: dict[MultiIndex, Fraction], order: int = 2) -> Form:
    """Closed quadratic Q with Delta(sigma_can + Q)(0) - Delta sigma_can (0) = -rest."""
    rows = all_indices(3)
    target = Matrix([[-_to_sympy(Fraction(rest.get(row, 0)))] for row in rows])
    if all(v == 0 for v in target):
        return Form.zero(RATIONAL, 3, order)
    basis: list[tuple[MultiIndex, tuple[int, ...]]] = []
    columns: list[dict[MultiIndex, Fraction]] = []
    for batch in _quadratic_batches():
        for index, exps in batch:
            basis.append((index, exps))
            columns.append(dict(origin_laplacian(((index, exps, Fraction(1)),))))
        matrix = Matrix(len(rows), len(columns), lambda i, j: _to_sympy(columns[j].get(rows[i], Fraction(0))))
        try:
            solution, params = matrix.gauss_jordan_solve(target)
        except ValueError:
            logger.debug(f"Quadratic correction not in the span of {len(basis)} basis forms, enlarging")
            continue
        solution = solution.subs({p: 0 for p in params})
        terms: dict[MultiIndex, Jet] = {}
        for (index, exps), value in zip(basis, solution):
            if value == 0:
                continue
            coeff = Fraction(int(value.p), int(value.q))
            jet = Jet.monomial(RATIONAL, order, exps, coeff)
            terms[index] = terms[index] + jet if index in terms else jet
        logger.info(f"Quadratic correction solved over {len(basis)} basis forms")
        return Form(RATIONAL, 3, order, terms)
    raise PointSolveError(
        "the quadratic correction is outside the span of the closed quadratic basis",
        witness=describe_values(rest),
    )


def scale_backend(c: Any, weight: Fraction, field: Any) -> tuple[Any, Any]:
    """Backend holding t = c^(1/3) / sqrt(weight), and t itself.

    Over the rational backend the smallest radical extension Q(R^(1/d)) with
    R = c^2 / weight^3 is chosen; other backends must already contain t.
    """
    if isinstance(field, RationalField):
        radicand = Fraction(c) ** 2 / weight**3
        for k in (6, 3, 2, 1):
            root = exact_rational_root(radicand, k)
            if root is not None:
                break
        degree = 6 // k
        if degree == 1:
            return field, root
        promoted = field_from_tag(f"radical:{degree}:{root}")
        logger.info(f"Point solution needs {promoted.tag}, promoting from {field.tag}")
        return promoted, promoted.generator
    try:
        t = field.power(field.coerce(c), Fraction(1, 3)) / field.power(field.coerce(weight), Fraction(1, 2))
    except ScalarDomainError as e:
        raise ScalarDomainError(
            f"{e}; the point solution needs c^(1/3)/sqrt({weight}) in {field.tag}, "
            "pass eta over the rational backend to pick the extension automatically",
            witness=e.witness,
        ) from e
    return field, t


@dataclass
class PointSolution:
    """sigma_0 = c (sigma_can + t L + t^2 Q) with its ingredients."""

    sigma0: G2Structure
    sign: int
    c: Any
    scale: Any
    weight: Fraction
    candidate: str
    linear_part: Form
    quadratic_part: Form

    @property
    def field(self) -> Any:
        return self.sigma0.field

    def to_dict(self) -> dict[str, Any]:
        return {
            "backend": self.field.tag,
            "c": self.field.format(self.field.coerce(self.c)),
            "linear_term": self.candidate,
            "quadratic_terms": sum(len(jet) for jet in self.quadratic_part.terms.values()),
            "scale_t": self.field.format(self.field.coerce(self.scale)),
            "sign": self.sign,
            "torsion_weight": str(self.weight),
        }


def _pick_linear_term(sign: int, max_candidates: int) -> tuple[str, Form, dict[MultiIndex, Fraction], Fraction]:
    first = None
    for name, linear in closed_linear_candidates()[:max_candidates]:
        values = dict(origin_laplacian(_as_key(linear)))
        weight = canonical_component(values) * sign
        logger.debug(f"Linear term {name}: canonical component {weight * sign}")
        if weight <= 0:
            continue
        if first is None:
            first = (name, linear, values, weight)
        if exact_rational_root(weight, 2) is not None:
            return name, linear, values, weight
    if first is None:
        raise PointSolveError(
            "no closed local model has Delta sigma sigma (0) along sign * sigma(0): "
            "for closed structures <Delta sigma sigma, sigma>(0) = |torsion(0)|^2 >= 0, "
            "so a negative right-hand side cannot be met with sigma(0) = -eta(0)",
            witness=f"sign={sign}",
        )
    return first


def build_sigma0(
    c: Any,
    sign: int = 1,
    order: int = 2,
    field: Any = RATIONAL,
    max_candidates: int = DEFAULT_CANDIDATES,
) -> PointSolution:
    """Closed sigma_0 with sigma_0(0) = c sigma_can and Delta sigma_0 (0) = sign * c sigma_can.

    Args:
        c: Positive scale with eta(0) = sign * c * sigma_can(0)
        sign: +1 for positive eta, -1 for negative eta
        order: Truncation order of the returned structure
        field: Backend of c; the rational backend may be promoted to a radical one
        max_candidates: How many linear terms to try

    Returns:
        PointSolution with sigma_0 over the backend that holds the scale
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    name, linear, values, weight = _pick_linear_term(sign, max_candidates)
    rest = dict(values)
    for index in CANONICAL_TRIPLES:
        rest[index] = rest.get(index, Fraction(0)) - weight * sign * canonical_sign(index)
    quadratic = solve_quadratic_part({k: v for k, v in rest.items() if v})

    working, t = scale_backend(c, weight, field)
    c_value = working.coerce(c)
    t_value = working.coerce(t)
    unit = sigma_can(RATIONAL, 2).promote(working)
    form = unit + linear.promote(working).scale(t_value) + quadratic.promote(working).scale(t_value * t_value)
    form = form.scale(c_value)

    check = G2Structure.closed(form).laplacian.at_origin()
    expected = sigma_can(working).scale(c_value * working.coerce(sign)).at_origin()
    if not values_match(check, expected, working):
        raise PointSolveError(
            "point solution does not reproduce the right-hand side at the origin",
            witness=describe_values(check, working),
        )
    logger.info(f"Point solution built from {name} with torsion weight {weight} over {working.tag}")
    structure = G2Structure.closed(form.exact_extend(order) if order > 2 else form.restrict(order))
    return PointSolution(structure, sign, c, t, weight, name, linear, quadratic)
