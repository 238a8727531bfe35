"""Tests for form files: parsing, canonical output and atomic writes."""

import json

import pytest

from g2_poisson.services.errors import FormFileError
from g2_poisson.services.form_file import (
    KIND_METRIC,
    KIND_VECTOR,
    FormFile,
    parse_form_file,
    read_form_file,
    write_form_file,
    write_text_atomic,
)
from g2_poisson.services.forms import VectorFieldJet
from g2_poisson.services.g2 import MetricJet
from g2_poisson.services.scalars import RATIONAL, RadicalField


def document(**overrides):
    data = {
        "backend": "rational",
        "degree": 3,
        "format_version": 1,
        "order": 2,
        "terms": [{"coeff": "1", "exponents": [0] * 7, "indices": [1, 2, 3]}],
    }
    data.update(overrides)
    return json.dumps(data)


class TestCanonicalOutput:
    """Serialization is byte-stable."""

    def test_reserialization_is_identical(self, sample_three_form):
        text = FormFile(sample_three_form).dumps()
        assert parse_form_file(text).dumps() == text
        assert parse_form_file(text).form == sample_three_form

    def test_layout(self, sample_three_form):
        data = json.loads(FormFile(sample_three_form).dumps())
        assert data["kind"] == "form"
        assert data["backend"] == "rational"
        assert "effective" not in data
        assert data["terms"][0] == {"coeff": "1", "exponents": [0] * 7, "indices": [1, 2, 3]}

    def test_radical_coefficients(self):
        field = RadicalField(3, 12)
        text = document(backend=field.tag, terms=[{"coeff": "1+2*t", "exponents": [0] * 7, "indices": [1, 2, 3]}])
        parsed = parse_form_file(text)
        assert parsed.field == field
        assert parse_form_file(parsed.dumps()).dumps() == parsed.dumps()


class TestParseErrors:
    """Every malformed input is a FormFileError."""

    @pytest.mark.parametrize(
        "text",
        [
            "not json",
            "[]",
            document(format_version=2),
            document(backend="complex"),
            document(kind="vector"),
            document(effective=5),
            document(terms=[{"coeff": "1", "exponents": [0] * 7, "indices": [2, 1, 3]}]),
            document(terms=[{"coeff": "1", "exponents": [0] * 7, "indices": [1, 2]}]),
            document(terms=[{"coeff": "1", "exponents": [3, 0, 0, 0, 0, 0, 0], "indices": [1, 2, 3]}]),
            document(terms=[{"coeff": "x", "exponents": [0] * 7, "indices": [1, 2, 3]}]),
            document(terms=[{"coeff": 1, "exponents": [0] * 7, "indices": [1, 2, 3]}]),
        ],
    )
    def test_rejected(self, text):
        with pytest.raises(FormFileError):
            parse_form_file(text)

    def test_missing_key(self):
        data = json.loads(document())
        del data["order"]
        with pytest.raises(FormFileError):
            parse_form_file(json.dumps(data))

    def test_duplicate_monomial(self):
        term = {"coeff": "1", "exponents": [0] * 7, "indices": [1, 2, 3]}
        with pytest.raises(FormFileError):
            parse_form_file(document(terms=[term, dict(term, coeff="2")]))


class TestOtherKinds:
    """Vector fields and metrics share the format."""

    def test_vector_field(self):
        radial = VectorFieldJet.radial(RATIONAL, 2)
        stored = parse_form_file(FormFile.from_vector_field(radial).dumps())
        assert stored.kind == KIND_VECTOR
        assert stored.vector_field().components == radial.components

    def test_metric_keeps_diagonal_pairs(self):
        stored = parse_form_file(FormFile.from_metric(MetricJet.euclidean(RATIONAL, 1)).dumps())
        assert stored.kind == KIND_METRIC
        assert sorted(stored.form.terms) == [(i, i) for i in range(1, 8)]

    def test_form_is_not_a_vector_field(self, sample_three_form):
        with pytest.raises(FormFileError):
            FormFile(sample_three_form).vector_field()


class TestFiles:
    """Reading and atomic writing."""

    def test_write_then_read(self, tmp_path, sample_three_form):
        path = tmp_path / "out" / "sigma.json"
        write_form_file(path, sample_three_form)
        assert read_form_file(path).form == sample_three_form
        assert [p.name for p in path.parent.iterdir()] == ["sigma.json"]

    def test_missing_file(self, tmp_path):
        with pytest.raises(FormFileError):
            read_form_file(tmp_path / "absent.json")

    def test_unwritable_target(self, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("x")
        with pytest.raises(FormFileError):
            write_text_atomic(blocker / "sigma.json", "{}")
