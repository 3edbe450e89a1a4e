import pytest
from hypothesis import given, settings, strategies as st

from webrank.errors import DegreeOverflow, NotClosed, OrderExceedsReliable
from webrank.forms import (
    DiffForm,
    VectorField,
    exterior_d,
    interior_product,
    is_zero,
    lie_derivative,
    primitive_closed_1form,
    pullback,
    wedge,
)
from webrank.jets import Jet, monomials

N = 5
x, y, z = (Jet.var(i, 3, N) for i in range(3))
dx, dy, dz = (DiffForm.dx(i, 3, N) for i in range(3))
zero = Jet.zero(3, N)
one = Jet.const(1, 3, N)
d_x = VectorField((one, zero, zero))
d_z = VectorField((zero, zero, one))


def test_wedge_antisymmetry():
    assert dx ^ dy == -(dy ^ dx)
    assert (dx ^ dx) == DiffForm.zero(3, 2, N)


def test_wedge_bilinear():
    assert (dy * x) ^ (dz * y) == (dy ^ dz) * (x * y)


def test_wedge_degree_overflow():
    with pytest.raises(DegreeOverflow):
        wedge(dx ^ dy, dy ^ dz)


def test_exterior_derivative_examples():
    assert exterior_d(dy * x) == (dx ^ dy).truncate(N - 1)
    ok, _ = is_zero(exterior_d(dx * y + dy * x))
    assert ok


def test_interior_examples():
    assert interior_product(d_x, dx ^ dy) == dy
    assert interior_product(d_z, dx ^ dy) == DiffForm.zero(3, 1, N)


def test_lie_examples():
    assert lie_derivative(d_x, dx * x) == dx.truncate(N - 1)
    ok, _ = is_zero(lie_derivative(d_x, dy))
    assert ok


def test_primitive_examples():
    assert primitive_closed_1form(dx) == x
    assert primitive_closed_1form(dx * y + dy * x) == x * y
    with pytest.raises(NotClosed) as info:
        primitive_closed_1form(dx * y)
    assert info.value.witness.index == (0, 1)


def test_is_zero_witness():
    assert is_zero(DiffForm.zero(3, 2, N)) == (True, None)
    low = DiffForm.dx(0, 3, 1) * Jet.var(0, 3, 1)
    ok, w = is_zero(low)
    assert not ok
    assert (w.index, w.exponents, w.coefficient) == ((0,), (1, 0, 0), 1)
    with pytest.raises(OrderExceedsReliable):
        is_zero(low, through_order=2)


def test_pullback_of_exact_form():
    # f = x*y pulled back along (s + t, s - t) is s^2 - t^2
    s, t = Jet.var(0, 2, N), Jet.var(1, 2, N)
    f = DiffForm.function(Jet.var(0, 2, N) * Jet.var(1, 2, N))
    assert pullback(f, [s + t, s - t]).as_function() == s * s - t * t
    dfd = pullback(exterior_d(f), [s + t, s - t])
    assert dfd == exterior_d(DiffForm.function(s * s - t * t))


coeffs = st.fractions(min_value=-4, max_value=4, max_denominator=3)
MONS = list(monomials(3, 3))


@st.composite
def functions(draw):
    terms = draw(st.dictionaries(st.sampled_from(MONS), coeffs, max_size=5))
    return Jet(3, N, terms, exact=True)


@st.composite
def one_forms(draw):
    return DiffForm.one_form([draw(functions()) for _ in range(3)])


@st.composite
def fields(draw):
    return VectorField([draw(functions()) for _ in range(3)])


@given(functions())
def test_dd_is_zero(f):
    assert is_zero(exterior_d(exterior_d(DiffForm.function(f))))[0]


@given(one_forms())
def test_dd_on_one_forms(a):
    assert is_zero(exterior_d(exterior_d(a)))[0]


@given(one_forms(), one_forms())
def test_graded_commutativity(a, b):
    assert a ^ b == -(b ^ a)


@given(fields(), one_forms(), one_forms())
def test_interior_leibniz(V, a, b):
    lhs = interior_product(V, a ^ b)
    rhs = (b * interior_product(V, a).as_function()) - (a * interior_product(V, b).as_function())
    assert lhs == rhs


@given(fields(), one_forms(), one_forms())
def test_exterior_leibniz(V, a, b):
    assert exterior_d(a ^ b) == (exterior_d(a) ^ b) - (a ^ exterior_d(b))


@settings(max_examples=50)
@given(fields(), one_forms())
def test_lie_commutes_with_d(V, a):
    assert lie_derivative(V, exterior_d(a)) == exterior_d(lie_derivative(V, a))


@given(fields(), fields(), functions())
def test_bracket_acts_as_commutator(V, W, f):
    assert V.bracket(W).apply(f) == V.apply(W.apply(f)) - W.apply(V.apply(f))


@given(functions())
def test_primitive_of_differential(f):
    f0 = f - f.constant
    assert primitive_closed_1form(exterior_d(DiffForm.function(f0))) == f0
