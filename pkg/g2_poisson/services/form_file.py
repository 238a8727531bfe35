"""Textual form files: parsing, canonical serialization and atomic writes."""

import json
import logging
import os
import tempfile
from dataclasses import dataclass
from typing import Any, Union

from .errors import FormFileError, G2PoissonError
from .forms import Form, VectorFieldJet
from .g2 import MetricJet
from .jets import DIM, Jet
from .scalars import field_from_tag

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
KIND_FORM = "form"
KIND_VECTOR = "vector"
# symmetric 2-tensor stored on pairs i <= j
KIND_METRIC = "metric"
KINDS = {KIND_FORM: None, KIND_VECTOR: 1, KIND_METRIC: 2}


@dataclass
class FormFile:
    """A form, vector field or metric with the metadata written next to it."""

    form: Form
    kind: str = KIND_FORM

    @property
    def field(self) -> Any:
        return self.form.field

    @classmethod
    def from_vector_field(cls, V: VectorFieldJet) -> "FormFile":
        """Store V^i under the index (i,) of a 1-form."""
        terms = {(axis,): V[axis] for axis in range(1, DIM + 1) if V[axis]}
        return cls(Form(V.field, 1, V.order, terms, V.effective), KIND_VECTOR)

    @classmethod
    def from_metric(cls, g: MetricJet) -> "FormFile":
        terms = {(i, j): g[i, j] for i in range(1, DIM + 1) for j in range(i, DIM + 1) if g[i, j]}
        return cls(Form(g.field, 2, g.order, terms, g.effective), KIND_METRIC)

    def vector_field(self) -> VectorFieldJet:
        if self.kind != KIND_VECTOR:
            raise FormFileError(f"file holds a {self.kind}, not a vector field")
        return VectorFieldJet(tuple(self.form.component((axis,)) for axis in range(1, DIM + 1)))

    def to_dict(self) -> dict[str, Any]:
        field = self.form.field
        terms = []
        for index in sorted(self.form.terms):
            jet = self.form.terms[index]
            for exps in sorted(jet.terms):
                terms.append(
                    {
                        "coeff": field.format(jet.terms[exps]),
                        "exponents": list(exps),
                        "indices": list(index),
                    }
                )
        data = {
            "backend": field.tag,
            "degree": self.form.degree,
            "format_version": FORMAT_VERSION,
            "kind": self.kind,
            "order": self.form.order,
            "terms": terms,
        }
        if self.form.effective < self.form.order:
            data["effective"] = self.form.effective
        return data

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def _require(data: dict, key: str, kind: type) -> Any:
    if key not in data:
        raise FormFileError(f"form file is missing '{key}'")
    value = data[key]
    if not isinstance(value, kind) or isinstance(value, bool):
        raise FormFileError(f"'{key}' must be {kind.__name__}, got {value!r}")
    return value


def _parse_term(
    field: Any, degree: int, order: int, term: Any, position: int, strict: bool = True
) -> tuple[tuple[int, ...], tuple, Any]:
    if not isinstance(term, dict):
        raise FormFileError(f"term {position} is not an object")
    indices = tuple(_require(term, "indices", list))
    exps = tuple(_require(term, "exponents", list))
    coeff = _require(term, "coeff", str)
    if len(indices) != degree or any(not isinstance(i, int) or not 1 <= i <= DIM for i in indices):
        raise FormFileError(f"term {position}: indices {list(indices)} do not fit a {degree}-form")
    if any(a > b or (strict and a == b) for a, b in zip(indices, indices[1:])):
        raise FormFileError(f"term {position}: indices {list(indices)} are not ascending")
    if len(exps) != DIM or any(not isinstance(e, int) or e < 0 for e in exps):
        raise FormFileError(f"term {position}: exponents must be {DIM} non-negative integers")
    if sum(exps) > order:
        raise FormFileError(f"term {position}: monomial degree {sum(exps)} exceeds order {order}")
    try:
        value = field.parse(coeff)
    except (G2PoissonError, ValueError, ZeroDivisionError) as e:
        raise FormFileError(f"term {position}: bad coefficient {coeff!r}: {e}") from e
    return indices, exps, value


def parse_form_file(text: str) -> FormFile:
    """Parse and validate a form file; every failure is a FormFileError."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormFileError(f"form file is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise FormFileError("form file must hold a JSON object")
    version = _require(data, "format_version", int)
    if version != FORMAT_VERSION:
        raise FormFileError(f"unsupported format version {version}")
    degree = _require(data, "degree", int)
    order = _require(data, "order", int)
    if not 0 <= degree <= DIM or order < 0:
        raise FormFileError(f"bad degree {degree} or order {order}")
    kind = data.get("kind", KIND_FORM)
    if kind not in KINDS or KINDS[kind] not in (None, degree):
        raise FormFileError(f"bad kind {kind!r} for degree {degree}")
    try:
        field = field_from_tag(_require(data, "backend", str))
    except G2PoissonError as e:
        raise FormFileError(str(e)) from e

    components: dict[tuple[int, ...], dict[tuple, Any]] = {}
    for position, term in enumerate(_require(data, "terms", list)):
        indices, exps, value = _parse_term(field, degree, order, term, position, strict=kind != KIND_METRIC)
        bucket = components.setdefault(indices, {})
        if exps in bucket:
            raise FormFileError(f"term {position}: duplicate monomial {list(exps)} in e^{list(indices)}")
        bucket[exps] = value
    effective = data.get("effective", order)
    if not isinstance(effective, int) or effective > order:
        raise FormFileError(f"bad effective order {effective!r}")
    terms = {index: Jet(field, order, bucket, effective) for index, bucket in components.items()}
    return FormFile(Form(field, degree, order, terms, effective), kind)


def read_form_file(path: Union[str, os.PathLike]) -> FormFile:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as e:
        raise FormFileError(f"cannot read {path}: {e}") from e
    parsed = parse_form_file(text)
    logger.info(f"Read {parsed.kind} of degree {parsed.form.degree}, order {parsed.form.order} from {path}")
    return parsed


def write_text_atomic(path: Union[str, os.PathLike], text: str) -> None:
    """Write through a temp file in the target directory, then os.replace."""
    directory = os.path.dirname(os.path.abspath(path))
    handle = None
    try:
        os.makedirs(directory, exist_ok=True)
        handle = tempfile.NamedTemporaryFile(
            "w", encoding="utf-8", dir=directory, prefix=".g2-", suffix=".tmp", delete=False
        )
        with handle:
            handle.write(text)
        os.replace(handle.name, path)
    except OSError as e:
        if handle is not None and os.path.exists(handle.name):
            os.unlink(handle.name)
        raise FormFileError(f"cannot write {path}: {e}") from e


def write_form_file(path: Union[str, os.PathLike], value: Union[Form, VectorFieldJet, MetricJet, FormFile]) -> None:
    if isinstance(value, MetricJet):
        value = FormFile.from_metric(value)
    elif isinstance(value, VectorFieldJet):
        value = FormFile.from_vector_field(value)
    elif isinstance(value, Form):
        value = FormFile(value)
    write_text_atomic(path, value.dumps())
    logger.info(f"Wrote {value.kind} of degree {value.form.degree} to {path}")

