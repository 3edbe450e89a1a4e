"""Acceptance gate: one test per criterion, each recording a PASS/FAIL line."""

import random
import time
from fractions import Fraction

import pytest

from webrank.connection import (
    abelian_relation,
    connection_data,
    is_flat,
    planar_web,
    rescale_section,
    swap_with_last,
    zero_sum_section,
)
from webrank.dim3 import (
    NormalizedQuv,
    WpParams,
    blaschke_classical,
    m_scaling_transform,
    pairwise_surface_invariant,
    quv_web,
    reconstruct,
    reconstruct_quv,
    taylor_ratio,
    wp_triple,
)
from webrank.forms import DiffForm, interior_product, is_zero, lie_derivative
from webrank.jets import Jet

from webgen import random_poly, random_triple, random_u, random_web, small_rational

pytestmark = pytest.mark.filterwarnings("ignore::webrank.errors.OrderTooLowForExactness")

# sign relating the curvature of a planar 3-web to the classical formula
EPSILON = 1

TABLE = [
    ((0, 0, 0, 0, 0, 0, 0), {(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)}),
    ((0, 0, -2, -1, 0, 1, 1), {(1, 4)}),
    ((0, 0, 0, 1, 1, 0, 0), {(1, 2), (1, 4)}),
    ((-2, -2, -2, 1, 1, 1, 1), {(1, 4), (2, 4), (3, 4)}),
    ((-1, -1, 0, 1, 1, 0, 0), {(1, 2), (1, 4), (2, 4), (3, 4)}),
    ((-1, 0, 0, 1, 0, 0, 0), {(1, 2), (1, 3), (1, 4), (2, 4), (3, 4)}),
]


def test_criterion_1_wp_table(criterion):
    rng = random.Random(2024)
    generic = tuple(small_rational(rng) for _ in range(7))
    cases = TABLE + [(generic, set())]
    failures, slowest = [], 0.0
    for params, vanishing in cases:
        start = time.perf_counter()
        report = pairwise_surface_invariant(quv_web(wp_triple(params, 8)).web)
        slowest = max(slowest, time.perf_counter() - start)
        if set(report.vanishing_pairs) != vanishing or report.d != len(vanishing) or not report.exact:
            failures.append(params)
    ds = [len(v) for _, v in cases]
    ok = not failures and slowest < 10
    criterion(1, ok, f"d = {ds}, all exact, slowest run {slowest:.2f}s, failures {failures}")
    assert ok


@pytest.fixture(scope="module")
def flat_triples():
    rng = random.Random(7)
    start = time.perf_counter()
    out = []
    for _ in range(25):
        t, qw = random_triple(rng, 9, degree=4)
        data = connection_data(zero_sum_section(qw.web))
        out.append((t, qw, data, data.flatness()))
    return out, time.perf_counter() - start


def test_criterion_2_constructed_webs_are_flat(criterion, flat_triples):
    runs, elapsed = flat_triples
    orders = [v.order for *_, v in runs if v]
    failures = sum(1 for *_, v in runs if not v or v.order < 5)
    ok = failures == 0 and len(runs) == 25 and elapsed < 300
    criterion(2, ok, f"25 triples, curvature zero through order {min(orders) if orders else '-'}, {failures} failures, {elapsed:.1f}s")
    assert ok


def test_criterion_3_generic_webs_are_curved(criterion):
    rng = random.Random(99)
    curved = 0
    for _ in range(25):
        if not is_flat(random_web(rng, 3, 6, degree=2)):
            curved += 1
    ok = curved >= 24
    criterion(3, ok, f"{curved}/25 random 4-webs in dimension 3 are not flat")
    assert ok


def test_criterion_4_gauge_invariance(criterion):
    rng = random.Random(4)
    failures = []
    for trial in range(10):
        n = 2 if trial % 2 == 0 else 3
        section = zero_sum_section(random_web(rng, n, 6))
        base = connection_data(section)
        x = [Jet.var(i, n, 6) for i in range(n)]
        unit = 1 + x[0] + x[1] / 2
        shifted = connection_data(rescale_section(section, unit))
        dlog = DiffForm.one_form([unit.diff(i) * unit.inv() for i in range(n)])
        if not is_zero(shifted.omega - base.omega + dlog * (n - 1))[0]:
            failures.append((trial, "rescale omega"))
        if not is_zero(shifted.curvature - base.curvature)[0]:
            failures.append((trial, "rescale curvature"))
        for lam in range(1, n + 1):
            swapped = connection_data(swap_with_last(section, lam))
            if not is_zero(swapped.omega - base.omega)[0]:
                failures.append((trial, f"swap {lam}"))
    ok = not failures
    criterion(4, ok, f"10 webs (n = 2, 3), exact rational equality, failures {failures}")
    assert ok


def test_criterion_5_blaschke_equivalence(criterion):
    rng = random.Random(5)
    failures = []
    for trial in range(10):
        u, web = random_u(rng, 6)
        curvature = connection_data(zero_sum_section(web)).curvature
        classical = blaschke_classical(u).truncate(curvature.order) * EPSILON
        if not is_zero(curvature - classical)[0]:
            failures.append(trial)
    x, y = Jet.var(0, 2, 6), Jet.var(1, 2, 6)
    # x*y itself has a critical point at 0; shifting keeps the same hexagonal web
    hexagonal = bool(is_flat(planar_web(x * y + x + y)))
    at_origin = connection_data(zero_sum_section(planar_web(x + y + x * x * y))).curvature[(0, 1)].constant
    ok = not failures and hexagonal and at_origin == 2
    criterion(5, ok, f"epsilon = {EPSILON} on 10 planar webs (failures {failures}), xy-type flat: {hexagonal}, x+y+x^2y: {at_origin} at 0")
    assert ok


def test_criterion_6_abelian_relations(criterion, flat_triples):
    runs, _ = flat_triples
    failures = []
    for k, (_, qw, _, _) in enumerate(runs):
        rel = abelian_relation(qw.web, verify=False)
        V = rel.data.section.fields
        total = rel.eta[0]
        for e in rel.eta[1:]:
            total = total + e
        if total.coeffs:
            failures.append((k, "sum"))
        for i in range(3):
            star = V[i].apply(rel.f) + rel.f * rel.data.phi[i]
            if not star.is_zero(star.order - 1):
                failures.append((k, f"star {i + 1}"))
        for lam, (v, e) in enumerate(zip(V, rel.eta)):
            lie = lie_derivative(v, e)
            if not is_zero(lie, lie.order - 1)[0] or not is_zero(interior_product(v, e))[0]:
                failures.append((k, f"eta {lam + 1}"))
    ok = not failures
    criterion(6, ok, f"25 flat webs: sum exactly zero, (V_i f) + f phi_i and L_V eta vanish, failures {failures}")
    assert ok


def test_criterion_7_reconstruction_round_trip(criterion):
    rng = random.Random(77)
    failures = []
    start = time.perf_counter()
    for k in range(10):
        t, qw = random_triple(rng, 9, degree=4)
        rec = reconstruct(qw.web, normalize=False)
        r = rec.triple
        if reconstruct_quv(qw.web) != r:
            failures.append((k, "reconstruct_quv"))
        for i, b in enumerate((rec.f, rec.g, rec.h)):
            if not (r.Q.diff(i) - r.u * r.v.diff(i) - b).is_zero():
                failures.append((k, f"dQ slot {i}"))
        again = quv_web(r).web
        if not is_flat(again):
            failures.append((k, "flat"))
        before = pairwise_surface_invariant(qw.web)
        after = pairwise_surface_invariant(again)
        if set(before.vanishing_pairs) != set(after.vanishing_pairs):
            failures.append((k, "pairs"))
    ok = not failures
    criterion(7, ok, f"10 triples round-trip, failures {failures}, {time.perf_counter() - start:.1f}s")
    assert ok


def random_normalized(rng, order=6):
    x, y, z = (Jet.var(i, 3, order) for i in range(3))
    while True:
        t = NormalizedQuv(
            y * z + x * x / 2 + random_poly(rng, 3, order, 3, 4, 6),
            y - x + random_poly(rng, 3, order, 2, 3, 4),
            z - x + random_poly(rng, 3, order, 2, 3, 4),
        )
        if taylor_ratio(t).defined:
            return t


def test_criterion_8_ratio_invariant(criterion):
    half = taylor_ratio(wp_triple(WpParams(aa=1, cc=2), 8)).value
    rng = random.Random(8)
    failures = []
    for k in range(5):
        t = random_normalized(rng)
        r = taylor_ratio(t).value
        for m in (2, 3, -1, Fraction(1, 2)):
            if taylor_ratio(m_scaling_transform(t, m)).value != r:
                failures.append((k, m))
    quad = taylor_ratio(wp_triple((0,) * 7, 8))
    ok = half == Fraction(1, 2) and not failures and not quad.defined
    criterion(8, ok, f"ratio(aa=1, cc=2) = {half}, m-scaling failures {failures}, quadrilateral defined: {quad.defined}")
    assert ok


def test_criterion_9_infinitely_many_classes(criterion):
    start = time.perf_counter()
    ratios, flat = [], []
    for k in range(1, 11):
        t = wp_triple(WpParams(aa=k, cc=1), 8)
        web = quv_web(t).web
        flat.append(bool(is_flat(web)))
        # read the ratio off the normal form recovered from the web itself
        normal = reconstruct(web).triple
        ratios.append(taylor_ratio(normal).value)
    elapsed = time.perf_counter() - start
    ok = len(set(ratios)) == 10 and None not in ratios and all(flat) and elapsed < 60
    criterion(9, ok, f"ratios {[str(r) for r in ratios]}, all flat {all(flat)}, {elapsed:.1f}s")
    assert ok
