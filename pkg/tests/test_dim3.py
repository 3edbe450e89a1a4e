import random
import warnings
from fractions import Fraction

import pytest

from webrank.connection import Web, is_flat, pushforward_web
from webrank.dim3 import (
    NormalizedQuv,
    QuvTriple,
    basic_pair_from_closed_2form,
    blaschke_classical,
    factor_through_basics,
    m_scaling_transform,
    normalize_triple,
    pairwise_surface_invariant,
    quv_web,
    reconstruct,
    reconstruct_quv,
    taylor_ratio,
    wp_triple,
)
from webrank.errors import DegenerateTriple, DegenerateWeb, NotBasic, OrderTooLowForExactness
from webrank.forms import DiffForm, VectorField, wedge
from webrank.jets import Jet

from webgen import random_poly, random_triple

pytestmark = pytest.mark.filterwarnings("ignore::webrank.errors.OrderTooLowForExactness")

N = 8
x, y, z = (Jet.var(i, 3, N) for i in range(3))

# parameter vector -> vanishing pair set, d = 6, 1, 2, 3, 4, 5
TABLE = [
    ((0, 0, 0, 0, 0, 0, 0), {(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)}),
    ((0, 0, -2, -1, 0, 1, 1), {(1, 4)}),
    ((0, 0, 0, 1, 1, 0, 0), {(1, 2), (1, 4)}),
    ((-2, -2, -2, 1, 1, 1, 1), {(1, 4), (2, 4), (3, 4)}),
    ((-1, -1, 0, 1, 1, 0, 0), {(1, 2), (1, 4), (2, 4), (3, 4)}),
    ((-1, 0, 0, 1, 0, 0, 0), {(1, 2), (1, 3), (1, 4), (2, 4), (3, 4)}),
]


def quadrilateral(order=N):
    X, Y, Z = (Jet.var(i, 3, order) for i in range(3))
    return QuvTriple(Y * Z + X * X / 2, Y - X, Z - X)


def cross(a, b):
    return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]


def test_quadrilateral_derived_functions_and_directions():
    qw = quv_web(quadrilateral())
    assert (qw.f, qw.g, qw.h) == (y, z, x)
    expected = [(0, 0, 1), (1, 0, 0), (0, 1, 0), (1, 1, 1)]
    for g, e in zip(qw.web.generators, expected):
        assert not any(cross(g.at_origin(), e))


def test_generators_annihilate_basic_pairs():
    t, qw = random_triple(random.Random(1), N)
    coords = [Jet.var(i, 3, N) for i in range(3)]
    pairs = [(qw.f, coords[0]), (qw.g, coords[1]), (qw.h, coords[2]), (t.u, t.v)]
    for V, (p, q) in zip(qw.web.generators, pairs):
        assert V.apply(p).is_zero() and V.apply(q).is_zero()


def test_degenerate_triple_is_refused():
    with pytest.raises(DegenerateTriple):
        quv_web(QuvTriple(x * y, y, z))


@pytest.mark.parametrize("params, vanishing", TABLE)
def test_pairwise_table(params, vanishing):
    report = pairwise_surface_invariant(quv_web(wp_triple(params, N)).web)
    assert set(report.vanishing_pairs) == vanishing
    assert report.d == len(vanishing)
    assert report.exact


def test_generic_parameters_give_no_integrable_pair():
    report = pairwise_surface_invariant(quv_web(wp_triple((3, -1, 2, 5, -7, 1, 4), N)).web)
    assert report.d == 0


def test_pairwise_warns_at_low_order():
    t, qw = random_triple(random.Random(2), 5)
    with pytest.warns(OrderTooLowForExactness):
        pairwise_surface_invariant(qw.web)


def test_pairwise_is_stable_under_diffeomorphisms_and_rescaling():
    rng = random.Random(3)
    web = quv_web(wp_triple((0, 0, 0, 1, 1, 0, 0), N)).web
    phi = [Jet.var(i, 3, N) + random_poly(rng, 3, N, 2, 2, 3) for i in range(3)]
    unit = 1 + x - y / 3
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OrderTooLowForExactness)
        pushed = pairwise_surface_invariant(pushforward_web(web, phi))
        scaled = pairwise_surface_invariant(Web(tuple(g * unit for g in web.generators)))
    assert set(pushed.vanishing_pairs) == set(scaled.vanishing_pairs) == {(1, 2), (1, 4)}


def test_wp_zero_is_quadrilateral():
    t = wp_triple((0,) * 7, N)
    assert isinstance(t, NormalizedQuv)
    assert (t.Q, t.u, t.v) == (y * z + x * x / 2, y - x, z - x)


def test_ratio_examples():
    assert not taylor_ratio(wp_triple((0,) * 7, N)).defined
    assert taylor_ratio(wp_triple((0, 0, 0, 1, 0, 2, 0), N)).value == Fraction(1, 2)


def test_m_scaling():
    t = wp_triple((0, 0, 0, 1, 0, 2, 0), N)
    assert m_scaling_transform(t, 1) == t
    half = m_scaling_transform(t, 2)
    for e in ((1, 2, 0), (2, 0, 1)):
        assert half.Q[e] == t.Q[e] / 2
    assert taylor_ratio(half) == taylor_ratio(t)


def test_m_scaling_is_a_dilation_of_the_web():
    t = wp_triple((1, 0, -1, 2, 0, 1, 3), N)
    m = 3
    scaled = m_scaling_transform(t, m)
    dilated = pushforward_web(quv_web(t).web, [x * m, y * m, z * m])
    target = quv_web(scaled).web
    for a, b in zip(dilated.generators, target.generators):
        k = min(a.order, b.order)
        assert all(c.is_zero() for c in cross(a.truncate(k).components, b.truncate(k).components))
    assert pairwise_surface_invariant(dilated).vanishing == pairwise_surface_invariant(target).vanishing
    assert is_flat(dilated)


def test_factor_through_basics_examples():
    assert factor_through_basics(x + y * y, x + y * y, z) == Jet.var(0, 2, N)
    s, t = Jet.var(0, 2, N), Jet.var(1, 2, N)
    p0, q0 = x + y * z, z
    assert factor_through_basics(p0 * q0 + q0 * q0, p0, q0) == s * t + t * t
    with pytest.raises(NotBasic):
        factor_through_basics(y, x, z)


def test_basic_pair_examples():
    p0, q0 = x + y * z, z - x * x
    dp, dq = (DiffForm.one_form([j.diff(i) for i in range(3)]) for j in (p0, q0))
    base = wedge(dp, dq)
    p, q = basic_pair_from_closed_2form(base, p0, q0)
    assert (p, q) == (p0, q0)
    p, _ = basic_pair_from_closed_2form(base * (p0 * 2), p0, q0)
    assert p == p0 * p0
    p, _ = basic_pair_from_closed_2form(base * q0, p0, q0)
    assert p == p0 * q0


def test_reconstruct_quadrilateral():
    web = quv_web(quadrilateral(9)).web
    t = reconstruct_quv(web)
    again = quv_web(t).web
    assert pairwise_surface_invariant(again).d == 6
    assert is_flat(again)


def test_reconstruction_recovers_normal_form_triple():
    t = wp_triple((0, 0, -2, -1, 0, 1, 1), N)
    rec = reconstruct(quv_web(t).web)
    k = rec.triple.order
    assert isinstance(rec.triple, NormalizedQuv)
    assert rec.triple.Q == t.Q.truncate(k)


@pytest.mark.parametrize("seed", [4, 5])
def test_reconstruction_satisfies_dq_identity(seed):
    t, qw = random_triple(random.Random(seed), N)
    rec = reconstruct(qw.web, normalize=False)
    r = rec.triple
    for i, b in enumerate((rec.f, rec.g, rec.h)):
        assert (r.Q.diff(i) - r.u * r.v.diff(i) - b).is_zero()
    before = pairwise_surface_invariant(qw.web)
    after = pairwise_surface_invariant(quv_web(r).web)
    assert set(before.vanishing_pairs) == set(after.vanishing_pairs)


def test_normalize_triple_keeps_normal_forms():
    t = wp_triple((1, 2, 0, 1, -1, 0, 2), N)
    n = normalize_triple(t)
    assert n.Q.truncate(2) == t.Q.truncate(2)
    assert n.u.truncate(1) == t.u.truncate(1) and n.v.truncate(1) == t.v.truncate(1)


def test_normalize_distorted_quadrilateral():
    # quadrilateral in the linear coordinates (x, y, z) = A (X, Y, Z)
    X, Y, Z = x + y, y - z * 2, x + z
    t = QuvTriple(Y * Z + X * X / 2, Y - X, Z - X)
    n = normalize_triple(t)
    k = n.Q.order
    assert n.Q == (y * z + x * x / 2).truncate(k)
    assert pairwise_surface_invariant(quv_web(n).web).d == 6


def test_blaschke_examples():
    X, Y = Jet.var(0, 2, 6), Jet.var(1, 2, 6)
    assert blaschke_classical(X + Y)[(0, 1)].is_zero()
    assert blaschke_classical(X * Y + X + Y)[(0, 1)].is_zero()
    form = blaschke_classical(X + Y + X * X * Y)
    expected = 2 * (1 + 2 * X * Y).inv() ** 2
    assert form[(0, 1)] == expected.truncate(form.order)
    with pytest.raises(DegenerateWeb):
        blaschke_classical(X + Y * Y)
