"""Tests for the scalar backends."""

from fractions import Fraction

import pytest

from g2_poisson.services.errors import ScalarDomainError
from g2_poisson.services.scalars import (
    RATIONAL,
    BigFloatField,
    DualField,
    RadicalField,
    exact_rational_root,
    field_from_tag,
    rational_power,
)


class TestRationalRoots:
    """Exact roots and powers of rationals."""

    def test_exact_roots(self):
        assert exact_rational_root(Fraction(8, 27), 3) == Fraction(2, 3)
        assert exact_rational_root(Fraction(-8), 3) == Fraction(-2)
        assert exact_rational_root(Fraction(2), 2) is None
        assert exact_rational_root(Fraction(-4), 2) is None

    def test_rational_power(self):
        assert rational_power(Fraction(8), Fraction(2, 3)) == 4
        assert rational_power(Fraction(27), Fraction(-1, 3)) == Fraction(1, 3)
        assert rational_power(Fraction(12), Fraction(2, 3)) is None


class TestRationalField:
    """Arithmetic helpers of the rational backend."""

    def test_power_and_sign(self):
        assert RATIONAL.power(Fraction(4, 9), Fraction(1, 2)) == Fraction(2, 3)
        assert RATIONAL.power(Fraction(2), -2) == Fraction(1, 4)
        assert RATIONAL.sign(Fraction(-1, 3)) == -1
        assert RATIONAL.sign(Fraction(0)) == 0

    def test_irrational_power_raises(self):
        with pytest.raises(ScalarDomainError):
            RATIONAL.power(Fraction(2), Fraction(1, 2))

    def test_parse_format(self):
        assert RATIONAL.parse(" -3/4 ") == Fraction(-3, 4)
        assert RATIONAL.format(Fraction(6, 4)) == "3/2"


class TestRadicalField:
    """Q[t]/(t^d - r)."""

    def test_reducible_modulus_rejected(self):
        with pytest.raises(ScalarDomainError):
            RadicalField(2, 4)
        with pytest.raises(ScalarDomainError):
            RadicalField(3, 8)

    def test_generator_power(self):
        field = RadicalField(3, 12)
        t = field.generator
        assert t * t * t == field.coerce(12)
        assert field.power(field.coerce(12), Fraction(1, 3)) == t
        assert field.power(field.coerce(12), Fraction(2, 3)) == t * t

    def test_non_representable_power(self):
        field = RadicalField(3, 12)
        with pytest.raises(ScalarDomainError):
            field.power(field.coerce(2), Fraction(1, 2))

    def test_sign_of_mixed_element(self):
        field = RadicalField(2, 2)
        t = field.generator
        # sqrt(2) - 3/2 < 0
        assert field.sign(t - Fraction(3, 2)) == -1
        assert field.sign(t - Fraction(7, 5)) == 1

    def test_parse_format(self):
        field = RadicalField(3, 12)
        value = field.parse("1/2+-3*t+2*t^2")
        assert value == field.coerce(Fraction(1, 2)) - field.generator * 3 + field.generator * field.generator * 2
        assert field.parse(field.format(value)) == value

    def test_parse_hand_written_signs(self):
        field = RadicalField(3, 12)
        t = field.generator
        assert field.parse("1/2-3*t") == field.coerce(Fraction(1, 2)) - t * 3
        assert field.parse("-t^2 + 2") == field.coerce(2) - t * t
        assert field.parse("-5/4") == field.coerce(Fraction(-5, 4))

    @pytest.mark.parametrize("text", ["", "-", "1/2+", "1/2*3", "t^3", "x"])
    def test_parse_rejects_malformed(self, text):
        with pytest.raises(ScalarDomainError):
            RadicalField(3, 12).parse(text)

    def test_hash_matches_rationals(self):
        field = RadicalField(3, 12)
        assert hash(field.coerce(3)) == hash(3)
        assert hash(field.coerce(Fraction(1, 2))) == hash(Fraction(1, 2))
        assert {field.coerce(3): "three"}[3] == "three"
        assert len({field.coerce(2), 2, field.generator}) == 2

    def test_division(self):
        field = RadicalField(2, 3)
        t = field.generator
        x = t + 1
        assert x * (field.one / x) == field.one


class TestBigFloatField:
    """Fixed-precision floats."""

    def test_precision_floor(self):
        with pytest.raises(ScalarDomainError):
            BigFloatField(32)

    def test_noise_counts_as_zero(self):
        field = BigFloatField(128)
        third = field.coerce(Fraction(1, 3))
        assert field.is_zero(third * 3 - 1)
        assert field.sign(third) == 1

    def test_radical_coercion(self):
        field = BigFloatField(128)
        radical = RadicalField(2, 2)
        value = field.coerce(radical.generator)
        assert field.is_zero(value * value - 2)


class TestDualField:
    """Dual numbers over exact bases."""

    def test_product_rule(self):
        dual = DualField(RATIONAL)
        x = dual.coerce(3) + dual.epsilon
        y = x * x
        assert dual.real_part(y) == 9
        assert dual.eps_part(y) == 6

    def test_fractional_power_derivative(self):
        dual = DualField(RATIONAL)
        x = dual.coerce(4) + dual.epsilon
        root = dual.power(x, Fraction(1, 2))
        assert dual.real_part(root) == 2
        assert dual.eps_part(root) == Fraction(1, 4)

    def test_nested_dual_rejected(self):
        with pytest.raises(ScalarDomainError):
            DualField(DualField(RATIONAL))


class TestFieldFromTag:
    """Backend tags."""

    def test_known_tags(self):
        assert field_from_tag("rational") is RATIONAL
        assert field_from_tag("radical:3:12") == RadicalField(3, 12)
        assert field_from_tag("bigfloat:128").bits == 128
        assert field_from_tag("bigfloat").bits == 256

    def test_unknown_tag(self):
        with pytest.raises(ScalarDomainError):
            field_from_tag("complex")
        with pytest.raises(ScalarDomainError):
            field_from_tag("radical:x")
