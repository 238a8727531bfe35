"""Homogeneity of sigma -> Delta_sigma sigma under sigma -> lambda sigma, and the resulting scales."""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

from .errors import PointSolveError
from .forms import Form
from .g2 import METRIC_ROOT, G2Structure, b_matrix, sigma_can
from .jets import DIM
from .point_model import PRINTED_THETA_FACTOR, build_sigma0, build_theta, describe_values
from .scalars import RATIONAL, field_from_tag, rational_power

logger = logging.getLogger(__name__)

# lambda values whose cube roots are rational
SAMPLE_SCALES = (Fraction(8), Fraction(27))

# a non-cube lambda, whose ratios live in Q(2^(1/3))
RADICAL_SAMPLE = ("radical:3:2", Fraction(2))

# sigma_0 = 12^(2/3) theta and Delta sigma_0 sigma_0 (p) = 12^(-1/3) Delta theta theta (p), as printed
PRINTED_SCALE_EXPONENT = Fraction(2, 3)
PRINTED_LAPLACIAN_EXPONENT = Fraction(-1, 3)


def symbolic_exponents() -> dict[str, Fraction]:
    """Exponents of lambda carried through B, the metric and the Laplacian."""
    b = Fraction(3)
    # g = B (det B / 6^7)^(-1/9) / 6 and det B scales with lambda^(3 * 7)
    metric = b - b * DIM * METRIC_ROOT
    # Delta is homogeneous of degree -1 in the metric
    laplacian = 1 - metric
    return {"b": b, "metric": metric, "laplacian": laplacian}


def _fit_exponent(pairs: list[tuple[Fraction, Fraction]], max_den: int = 9, max_num: int = 27) -> Optional[Fraction]:
    """Smallest p/q with lam^(p/q) = ratio for every (lam, ratio) pair."""
    for q in range(1, max_den + 1):
        for p in sorted(range(-max_num, max_num + 1), key=abs):
            alpha = Fraction(p, q)
            if alpha.denominator != q:
                continue
            if all(rational_power(lam, alpha) == ratio for lam, ratio in pairs):
                return alpha
    return None


def _ratio(scaled: dict, base: dict) -> Optional[Fraction]:
    """Common ratio scaled / base over all components, or None."""
    if set(scaled) != set(base) or not base:
        return None
    ratios = {Fraction(scaled[key]) / Fraction(base[key]) for key in base}
    return ratios.pop() if len(ratios) == 1 else None


def _nonzero_entries(matrix: list[list[Any]]) -> dict[tuple[int, int], Any]:
    return {(i, j): value for i, row in enumerate(matrix) for j, value in enumerate(row) if value != 0}


def _sample_form() -> Form:
    """sigma_can + L + Q from the point model, a rational form with Delta(0) != 0."""
    point = build_sigma0(1, 1, 2, RATIONAL)
    return sigma_can(RATIONAL, 2) + point.linear_part + point.quadratic_part


def _radical_sample(
    sample: Form, base_lap: dict, base_origin: list[list[Any]], exponents: dict[str, Optional[Fraction]]
) -> dict[str, bool]:
    """Check the fitted metric and Laplacian laws at a lambda with no rational cube root."""
    tag, lam = RADICAL_SAMPLE
    field = field_from_tag(tag)
    scaled = G2Structure.closed(sample.promote(field).scale(lam))
    results = {}
    if exponents["metric"] is not None:
        factor = field.power(field.coerce(lam), exponents["metric"])
        origin = scaled.metric.at_origin()
        results["metric"] = all(
            origin[i][j] == factor * field.coerce(base_origin[i][j]) for i in range(DIM) for j in range(DIM)
        )
    if exponents["laplacian"] is not None:
        factor = field.power(field.coerce(lam), exponents["laplacian"])
        values = scaled.laplacian.at_origin()
        results["laplacian"] = set(values) == set(base_lap) and all(
            values[key] == factor * field.coerce(base_lap[key]) for key in base_lap
        )
    logger.debug(f"Radical sample lambda = {lam} over {tag}: {results}")
    return results


@dataclass
class ScaleAudit:
    """Derived exponents, the printed constants checked against them, and the model scales."""

    exponent: Optional[Fraction]
    metric_exponent: Optional[Fraction]
    b_exponent: Optional[Fraction]
    symbolic: dict[str, Fraction]
    printed_exponent: Fraction
    theta_value: str
    theta_scale: Optional[str]
    lam: Any
    scale: Any
    backend: str
    notes: list[str] = field(default_factory=list)
    radical_sample: dict[str, bool] = field(default_factory=dict)

    @property
    def cross_checked(self) -> bool:
        return (
            self.exponent == self.symbolic["laplacian"]
            and self.metric_exponent == self.symbolic["metric"]
            and self.b_exponent == self.symbolic["b"]
        )

    @property
    def radical_checked(self) -> bool:
        return bool(self.radical_sample) and all(self.radical_sample.values())

    @property
    def printed_consistent(self) -> bool:
        return self.exponent == self.printed_exponent

    def to_dict(self) -> dict[str, Any]:
        return {
            "b_exponent": str(self.b_exponent),
            "backend": self.backend,
            "cross_checked": self.cross_checked,
            "exponent": str(self.exponent),
            "lambda": str(self.lam),
            "metric_exponent": str(self.metric_exponent),
            "notes": list(self.notes),
            "printed_consistent": self.printed_consistent,
            "printed_exponent": str(self.printed_exponent),
            "radical_sample": {"backend": RADICAL_SAMPLE[0], "lambda": str(RADICAL_SAMPLE[1]), **self.radical_sample},
            "scale_t": str(self.scale),
            "theta_laplacian_at_origin": self.theta_value,
            "theta_scale": self.theta_scale,
        }


def determine_scale(sign: int = 1, c: Any = 1, field: Any = RATIONAL) -> ScaleAudit:
    """Derive the exponents by running the pipeline on lambda * sigma and return the scales for eta(0) = sign * c * sigma_can."""
    sample = _sample_form()
    base = G2Structure.closed(sample)
    base_lap = base.laplacian.at_origin()
    base_origin = base.metric.at_origin()
    base_metric = _nonzero_entries(base_origin)
    base_b = b_matrix(sample)

    lap_pairs, metric_pairs, b_pairs = [], [], []
    for lam in SAMPLE_SCALES:
        scaled_form = sample.scale(lam)
        scaled = G2Structure.closed(scaled_form)
        lap_pairs.append((lam, _ratio(scaled.laplacian.at_origin(), base_lap)))
        origin = scaled.metric.at_origin()
        metric_pairs.append((lam, _ratio(_nonzero_entries(origin), base_metric)))
        b_scaled = b_matrix(scaled_form)
        same = all(b_scaled[i][j] == base_b[i][j].scale(lam**3) for i in range(DIM) for j in range(DIM))
        b_pairs.append((lam, lam**3 if same else None))

    def fit(pairs: list) -> Optional[Fraction]:
        return None if any(r is None for _, r in pairs) else _fit_exponent(pairs)

    exponent = fit(lap_pairs)
    metric_exponent = fit(metric_pairs)
    b_exponent = fit(b_pairs)
    symbolic = symbolic_exponents()
    notes = []
    radical = _radical_sample(sample, base_lap, base_origin, {"metric": metric_exponent, "laplacian": exponent})
    if not all(radical.values()):
        notes.append(f"non-cube sample lambda = {RADICAL_SAMPLE[1]} breaks the fitted laws: {radical}")
    if exponent != symbolic["laplacian"]:
        notes.append(f"sampled exponent {exponent} differs from the symbolic {symbolic['laplacian']}")

    printed = PRINTED_LAPLACIAN_EXPONENT / PRINTED_SCALE_EXPONENT
    if exponent is not None and exponent != printed:
        logger.warning(
            f"Printed constants imply Delta scaling with exponent {printed}, the pipeline gives {exponent}"
        )
        notes.append(f"12^(2/3) and 12^(-1/3) need exponent {printed}; derived exponent is {exponent}")

    theta = build_theta(sign, RATIONAL, 2)
    theta_values = theta.laplacian.at_origin()
    theta_scale = None
    if theta_values and exponent is not None and exponent != 1:
        # lambda = c and lambda^alpha * 12 = c give c^(1 - alpha) = 12
        theta_scale = f"{PRINTED_THETA_FACTOR}^({1 / (1 - exponent)})"
    if not theta_values:
        notes.append("Delta theta theta vanishes at the origin, so no multiple of theta meets both conditions")

    lam = scale = None
    backend = field.tag
    try:
        point = build_sigma0(c, sign, 2, field)
        backend = point.field.tag
        lam = point.field.format(point.field.coerce(c))
        scale = point.field.format(point.field.coerce(point.scale))
    except PointSolveError as e:
        notes.append(str(e))
    logger.info(f"Scale audit: exponent {exponent}, metric exponent {metric_exponent}, lambda {lam}")
    return ScaleAudit(
        exponent=exponent,
        metric_exponent=metric_exponent,
        b_exponent=b_exponent,
        symbolic=symbolic,
        printed_exponent=printed,
        theta_value=describe_values(theta_values),
        theta_scale=theta_scale,
        lam=lam,
        scale=scale,
        backend=backend,
        notes=notes,
        radical_sample=radical,
    )
