import pytest

from webrank.errors import ParseError
from webrank.jets import Jet
from webrank.parser import InputDocument, parse_document, parse_polynomial

XYZ = ("x", "y", "z")
N = 5
x, y, z = (Jet.var(i, 3, N) for i in range(3))


def test_quadrilateral_q():
    j = parse_polynomial("y*z + 1/2*x^2", XYZ, N)
    assert j == y * z + x * x / 2
    assert j.exact and j.order == N


def test_linear_u():
    assert parse_polynomial("y - x", XYZ, N) == y - x


def test_sparse_jet():
    j = parse_polynomial("3/2*x^2*y - z", XYZ, N)
    assert len(j.as_dict()) == 2


def test_nested_expressions():
    assert parse_polynomial("-(x+y)^2", XYZ, N) == -(x + y) ** 2
    assert parse_polynomial("(x + y)/3", XYZ, N) == (x + y) / 3
    assert parse_polynomial(" 2 * - x ", XYZ, N) == -2 * x


@pytest.mark.parametrize(
    "text, position",
    [("x y", 2), ("x/y", 2), ("w + 1", 0), ("x^-1", 2), ("(x + 1", 6), ("x +", 3), ("$", 0), ("", 0)],
)
def test_errors_report_position(text, position):
    with pytest.raises(ParseError) as info:
        parse_polynomial(text, XYZ, N)
    assert info.value.position == position


def test_terms_beyond_order_mark_inexact():
    j = parse_polynomial("x^7 + y", XYZ, N)
    assert j == y and not j.exact


def test_generators_document():
    doc = parse_document("kind: generators\ndimension: 2\nW1: 0, 1\nW2: 1, 0  # comment\nW3: 1, -(x + y)\n")
    assert doc.payload == [["0", "1"], ["1", "0"], ["1", "-(x + y)"]]
    assert doc.variables == ("x", "y")


def test_json_document_matches_text():
    text = parse_document("kind: quv\nQ: y*z\nu: y - x\nv: z - x\norder: 7\n")
    js = parse_document('{"kind": "quv", "Q": "y*z", "u": "y - x", "v": "z - x", "order": 7}')
    assert text == js


def test_default_order_rule():
    doc = parse_document("kind: basic2d\nu: x + y + x^5*y\n")
    assert doc.effective_order() == 9
    assert doc.effective_order(4) == 9
    assert doc.effective_order(12) == 12
    assert parse_document("kind: wp\nparams: 0,0,0,0,0,0,0\n").effective_order() == 6


@pytest.mark.parametrize(
    "text",
    [
        "dimension: 2",
        "kind: spiral\ndimension: 2",
        "kind: quv\nQ: x\nu: y",
        "kind: basic2d\ndimension: 3\nu: x",
        "kind: generators\ndimension: 2\nW1: 0, 1\nW2: 1, 0",
        "kind: wp\nparams: 1, 2",
        "kind: quv\nkind: quv",
        "just text",
        "{not json",
    ],
)
def test_bad_documents(text):
    with pytest.raises(ParseError):
        parse_document(text)


def test_variable_count_must_match():
    with pytest.raises(ParseError):
        InputDocument("basic2d", 2, None, ("x",), {"u": "x"})
