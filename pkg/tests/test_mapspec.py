import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardyops.errors import MapSemanticError, MapSyntaxError
from hardyops.maps import Affine, Blaschke, Compose, Contact, Mobius, Monomial, Poly
from hardyops.mapspec import parse_complex, parse_map, render


def test_parse_affine():
    assert parse_map("affine a=0.5 b=0") == Affine(0.5, 0)


def test_parse_mobius_complex_parameter():
    assert parse_map("mobius lambda=0.3+0.4i") == Mobius(0.3 + 0.4j)


def test_parse_blaschke_degree_two():
    m = parse_map("blaschke zeros=[0.5,-0.5] rotation=1")
    assert m == Blaschke((0.5, -0.5), 1)
    assert len(m.zeros) == 2


def test_defaults_apply():
    assert parse_map("monomial k=3") == Monomial(3, 1.0)
    assert parse_map("affine a=0.2") == Affine(0.2, 0)


def test_compose_and_comments():
    m = parse_map("compose(monomial k=2 ;  # square after\n mobius lambda=0.5)")
    assert m == Compose(Monomial(2), Mobius(0.5))


@pytest.mark.parametrize(
    "text,value",
    [("0.3", 0.3), ("-2i", -2j), ("i", 1j), ("1e-3-0.5i", 1e-3 - 0.5j), ("-0.1+2e2i", -0.1 + 200j)],
)
def test_complex_literals(text, value):
    assert parse_complex(text) == value


@pytest.mark.parametrize(
    "text,line,col",
    [
        ("affine a=", 1, 10),
        ("affine a=0.5 b", 1, 14),
        ("mobius lambda=0.3+", 1, 15),
        ("poly coeffs=[0.1,", 1, 18),
        ("compose(affine a=0.5\n mobius lambda=0.2)", 2, 2),
        ("affine a=0.5 $", 1, 14),
    ],
)
def test_syntax_errors_carry_position(text, line, col):
    with pytest.raises(MapSyntaxError) as exc:
        parse_map(text)
    assert (exc.value.line, exc.value.column) == (line, col)


@pytest.mark.parametrize(
    "text",
    [
        "rotation a=1",
        "affine a=0.5 q=1",
        "affine a=0.5 a=0.4",
        "mobius",
        "mobius lambda=1",
        "monomial k=1.5",
        "poly coeffs=0.5",
        "contact alpha=0.5i",
        "blaschke zeros=[0.5] rotation=0.5",
    ],
)
def test_semantic_errors(text):
    with pytest.raises(MapSemanticError) as exc:
        parse_map(text)
    assert exc.value.line == 1


CATALOG = [
    Affine(0.5, 0),
    Affine(0.25 - 0.1j, 0.3j),
    Mobius(0.3 + 0.4j),
    Mobius(-0.7),
    Monomial(1),
    Monomial(3, 0.5j),
    Poly((0.1, 0.5, 0.3)),
    Blaschke((0.5, -0.5)),
    Blaschke((0.3, 0.2j), rotation=1j),
    Contact(1 / 3),
    Compose(Monomial(2), Mobius(0.5)),
]


@pytest.mark.parametrize("m", CATALOG, ids=render)
def test_render_round_trip(m):
    assert parse_map(render(m)) == m


finite = st.floats(-0.3, 0.3, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)


@given(cplx, cplx)
def test_round_trip_random_affine(a, b):
    m = Affine(a, b)
    assert parse_map(render(m)) == m


@given(st.lists(cplx, min_size=1, max_size=4), st.floats(0, 2 * np.pi))
def test_round_trip_random_blaschke(zeros, t):
    m = Blaschke(tuple(zeros), complex(np.cos(t), np.sin(t)) / abs(complex(np.cos(t), np.sin(t))))
    assert parse_map(render(m)) == m
