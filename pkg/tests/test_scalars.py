from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gtl.scalars import QQi, as_exact, close, format_rational, is_exact, parse_rational

rationals = st.fractions(max_denominator=50).filter(lambda q: abs(q) < 1000)
qqi = st.builds(QQi, rationals, rationals)


def test_integer_parts_stay_ints():
    z = QQi(Fraction(4, 2), 0)
    assert type(z.re) is int and z == 2 and hash(z) == hash(2)


def test_arithmetic_examples():
    assert QQi(Fraction(1, 2), 3) * QQi(2, -1) == QQi(4, Fraction(11, 2))
    assert QQi(1, 1) / QQi(1, -1) == QQi(0, 1)
    assert str(QQi(Fraction(-2, 5), Fraction(13, 10))) == "-2/5+13/10i"
    assert str(QQi(0, -1)) == "-1i"


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        QQi(1) / QQi(0)


@given(qqi, qqi, qqi)
def test_field_laws(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert (a * b).conjugate() == a.conjugate() * b.conjugate()
    if b:
        assert (a / b) * b == a


@given(qqi)
def test_complex_agrees(a):
    assert abs(complex(a * a) - complex(a) ** 2) < 1e-6 * (1 + abs(complex(a)) ** 2)
    assert a * a.conjugate() == a.abs2()


def test_close_exact_and_float():
    assert close(QQi(1), Fraction(1), 0)
    assert not close(QQi(1), QQi(1, 1), 1.0)
    assert close(QQi(1), 1 + 1e-12j, 1e-9)
    assert not close(QQi(1), 1.1, 1e-9)


def test_exactness():
    assert is_exact(QQi(1)) and is_exact(3) and is_exact(Fraction(1, 3))
    assert not is_exact(1.0)
    with pytest.raises(TypeError):
        as_exact(0.5)


def test_parse_format_rational():
    assert parse_rational("3/6") == Fraction(1, 2)
    assert parse_rational(" 0.25 ") == Fraction(1, 4)
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(-1, 3)) == "-1/3"
    for bad in ("1/0", "abc", "", 0.5):
        with pytest.raises(ValueError):
            parse_rational(bad)
