"""Flat 4-webs of curves in dimension three.

Every flat 4-web comes from a triple ``(Q, u, v)``: with

    f = Q_x - u v_x,   g = Q_y - u v_y,   h = Q_z - u v_z

the four foliations with basic pairs ``(f, x), (g, y), (h, z), (u, v)`` carry
the abelian relation ``df^dx + dg^dy + dh^dz + du^dv = 0``.  This module builds
those webs, goes back from a flat web to a triple, and computes two
isomorphism invariants: the number ``d`` of pairs of foliations lying in a
common foliation by surfaces, and a ratio of Taylor coefficients.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple

from ._rational import ONE, ZERO, rational
from .connection import (
    Web,
    abelian_relation,
    check_general_position,
    first_integrals,
    pushforward_web,
)
from .errors import (
    DegenerateTriple,
    DegenerateWeb,
    NotBasic,
    NotClosed,
    NumVarsMismatch,
    OrderTooLowForExactness,
)
from .forms import DiffForm, VectorField, exterior_d, is_zero, primitive_closed_1form, wedge
from .jets import Jet, const_det, const_matrix_inverse, formal_inverse

__all__ = [
    "QuvTriple",
    "NormalizedQuv",
    "WpParams",
    "PairwiseReport",
    "RatioInvariant",
    "Reconstruction",
    "quv_web",
    "pairwise_surface_invariant",
    "wp_triple",
    "taylor_ratio",
    "m_scaling_transform",
    "normalize_triple",
    "factor_through_basics",
    "basic_pair_from_closed_2form",
    "reconstruct",
    "reconstruct_quv",
    "blaschke_classical",
    "PAIRS",
]

PAIRS = tuple(combinations(range(1, 5), 2))


def _two_form_at_origin(a, b):
    w = wedge(DiffForm.one_form([a.diff(i) for i in range(3)]), DiffForm.one_form([b.diff(i) for i in range(3)]))
    return [w[idx].constant for idx in ((0, 1), (0, 2), (1, 2))]


def _rank(rows):
    rows = [list(r) for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][col]:
                f = rows[r][col] / rows[rank][col]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


@dataclass(frozen=True)
class QuvTriple:
    Q: Jet
    u: Jet
    v: Jet

    def __post_init__(self):
        for j in (self.Q, self.u, self.v):
            if not isinstance(j, Jet) or j.nvars != 3:
                raise NumVarsMismatch("Q, u, v must be jets in 3 variables")

    @property
    def order(self):
        return min(self.Q.order, self.u.order, self.v.order)

    def derived(self):
        """``(f, g, h)`` with ``dQ = f dx + g dy + h dz + u dv``."""
        Q, u, v = self.Q, self.u, self.v
        return tuple(Q.diff(i) - u * v.diff(i) for i in range(3))

    def two_forms_at_origin(self):
        f, g, h = self.derived()
        x, y, z = (Jet.var(i, 3, self.order) for i in range(3))
        return [
            _two_form_at_origin(f, x),
            _two_form_at_origin(g, y),
            _two_form_at_origin(h, z),
            _two_form_at_origin(self.u, self.v),
        ]

    def is_nondegenerate(self):
        """Three of ``df^dx, dg^dy, dh^dz, du^dv`` independent at the origin."""
        return _rank(self.two_forms_at_origin()) == 3

    def lift(self, order):
        return type(self)(self.Q.lift(order), self.u.lift(order), self.v.lift(order))


def _leading_terms_ok(t):
    Q, u, v = t.Q, t.u, t.v
    q = {e: c for e, c in Q.items() if sum(e) <= 2}
    lu = {e: c for e, c in u.items() if sum(e) <= 1}
    lv = {e: c for e, c in v.items() if sum(e) <= 1}
    return (
        q == {(2, 0, 0): rational(1, 2), (0, 1, 1): ONE}
        and lu == {(1, 0, 0): -ONE, (0, 1, 0): ONE}
        and lv == {(1, 0, 0): -ONE, (0, 0, 1): ONE}
    )


@dataclass(frozen=True)
class NormalizedQuv(QuvTriple):
    """Triple in the normal form ``Q = x^2/2 + yz + O(3)``,
    ``u = y - x + O(2)``, ``v = z - x + O(2)``."""

    def __post_init__(self):
        super().__post_init__()
        if self.order < 2 or not _leading_terms_ok(self):
            raise DegenerateTriple("triple is not in normal form")


class QuvWeb(NamedTuple):
    web: Web
    f: Jet
    g: Jet
    h: Jet


def quv_web(t):
    """Generators ``V_1 = f_z dy - f_y dz``, ``V_2 = -g_z dx + g_x dz``,
    ``V_3 = h_y dx - h_x dy``, ``V_4 = grad u x grad v``."""
    f, g, h = t.derived()
    fx, fy, fz = (f.diff(i) for i in range(3))
    gx, gy, gz = (g.diff(i) for i in range(3))
    hx, hy, hz = (h.diff(i) for i in range(3))
    ux, uy, uz = (t.u.diff(i) for i in range(3))
    vx, vy, vz = (t.v.diff(i) for i in range(3))
    order = fx.order
    zero = Jet.zero(3, order)
    V1 = VectorField((zero, fz, -fy))
    V2 = VectorField((-gz, zero, gx))
    V3 = VectorField((hy, -hx, zero))
    V4 = VectorField((uy * vz - uz * vy, uz * vx - ux * vz, ux * vy - uy * vx))
    web = Web((V1, V2, V3, V4))
    verdict = check_general_position(web)
    if not verdict:
        raise DegenerateTriple(f"derived web is not in general position: {verdict.subset}")
    return QuvWeb(web, f, g, h)


def _det3(cols):
    a, b, c = cols
    return (
        a[0] * (b[1] * c[2] - b[2] * c[1])
        - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
    )


@dataclass
class PairwiseReport:
    """``D[(l, m)] = det(V_l, V_m, [V_l, V_m])`` for the six pairs (1-based)."""

    D: dict
    vanishing: dict
    order: int
    exact: bool

    @property
    def d(self):
        return sum(self.vanishing.values())

    @property
    def vanishing_pairs(self):
        return tuple(p for p in PAIRS if self.vanishing[p])


def pairwise_surface_invariant(web, through_order=None):
    if web.n != 3:
        raise NumVarsMismatch("the pair invariant is defined for 4-webs in dimension 3")
    V = web.generators
    D = {}
    for lam, mu in PAIRS:
        a, b = V[lam - 1], V[mu - 1]
        D[(lam, mu)] = _det3((a.components, b.components, a.bracket(b).components))
    order = min(j.order for j in D.values())
    if through_order is not None:
        order = min(order, through_order)
    vanishing = {p: D[p].is_zero(order) for p in PAIRS}
    exact = all(j.exact for j in D.values())
    if not exact:
        warnings.warn(
            f"pair determinants are series, verdicts hold through order {order} only",
            OrderTooLowForExactness,
            stacklevel=2,
        )
    return PairwiseReport(D, vanishing, order, exact)


@dataclass(frozen=True)
class WpParams:
    a: object = 0
    b: object = 0
    c: object = 0
    aa: object = 0
    bb: object = 0
    cc: object = 0
    e: object = 0

    def __post_init__(self):
        for name in ("a", "b", "c", "aa", "bb", "cc", "e"):
            object.__setattr__(self, name, rational(getattr(self, name)))

    @classmethod
    def from_sequence(cls, values):
        values = list(values)
        if len(values) != 7:
            raise ValueError("W_P needs seven parameters (a, b, c, aa, bb, cc, e)")
        return cls(*values)

    def as_tuple(self):
        return (self.a, self.b, self.c, self.aa, self.bb, self.cc, self.e)


def wp_triple(P, order=8):
    """``u = y - x``, ``v = z - x`` and
    ``Q = yz + x^2/2 + a x^2y/2 + aa y^2x/2 + b y^2z/2 + bb z^2y/2
    + c z^2x/2 + cc x^2z/2 + e xyz``."""
    if not isinstance(P, WpParams):
        P = WpParams.from_sequence(P)
    half = rational(1, 2)
    Q = Jet(
        3,
        order,
        {
            (0, 1, 1): 1,
            (2, 0, 0): half,
            (2, 1, 0): P.a * half,
            (1, 2, 0): P.aa * half,
            (0, 2, 1): P.b * half,
            (0, 1, 2): P.bb * half,
            (1, 0, 2): P.c * half,
            (2, 0, 1): P.cc * half,
            (1, 1, 1): P.e,
        },
        exact=True,
    )
    u = Jet(3, order, {(0, 1, 0): 1, (1, 0, 0): -1}, exact=True)
    v = Jet(3, order, {(0, 0, 1): 1, (1, 0, 0): -1}, exact=True)
    return NormalizedQuv(Q, u, v)


@dataclass(frozen=True)
class RatioInvariant:
    value: object = None
    reason: str = ""

    @property
    def defined(self):
        return self.value is not None


def taylor_ratio(t):
    """``(2 Q_120 - v_110 + 2 v_020) / (2 Q_201 + u_101 + v_101)``.

    ``phi_ijk`` is the coefficient of ``x^i y^j z^k`` in the series of ``phi``.
    """
    if not isinstance(t, NormalizedQuv):
        t = NormalizedQuv(t.Q, t.u, t.v)
    if t.order < 3:
        raise ValueError("taylor_ratio needs Q through order 3")
    num = 2 * t.Q[(1, 2, 0)] - t.v[(1, 1, 0)] + 2 * t.v[(0, 2, 0)]
    den = 2 * t.Q[(2, 0, 1)] + t.u[(1, 0, 1)] + t.v[(1, 0, 1)]
    if not den:
        return RatioInvariant(None, "denominator 2Q_201 + u_101 + v_101 vanishes")
    return RatioInvariant(num / den)


def _dilate(j, m, weight):
    """Coefficient of degree k multiplied by ``m^(weight - k)``."""
    out = {}
    for e, c in j.items():
        out[e] = c * m ** (weight - sum(e))
    return Jet(j.nvars, j.order, out, exact=j.exact)


def m_scaling_transform(t, m):
    """``(m^2 Q(x/m), m u(x/m), m v(x/m))``, isomorphic via ``x -> m x``."""
    m = rational(m)
    if not m:
        raise ValueError("m must be nonzero")
    return NormalizedQuv(_dilate(t.Q, m, 2), _dilate(t.u, m, 1), _dilate(t.v, m, 1))


def _complete_chart(funcs):
    """Append coordinate functions until the linear parts form a basis."""
    n = funcs[0].nvars
    order = min(f.order for f in funcs)
    rows = [[f[tuple(1 if i == k else 0 for i in range(n))] for k in range(n)] for f in funcs]
    chart = list(funcs)
    for k in range(n):
        if len(chart) == n:
            break
        cand = rows + [[ONE if i == k else ZERO for i in range(n)]]
        if _rank(cand) == len(cand):
            rows = cand
            chart.append(Jet.var(k, n, order))
    if len(chart) != n or not const_det(rows):
        raise DegenerateWeb("basic functions have dependent differentials at the origin")
    return chart


def factor_through_basics(G, p0, q0):
    """Bivariate ``D`` with ``D(p0, q0) = G``; ``G`` must be constant on the
    common level sets of ``p0`` and ``q0``."""
    chart = _complete_chart([p0, q0])
    order = min(G.order, min(c.order for c in chart))
    chart = [c.truncate(order) for c in chart]
    psi = formal_inverse(chart)
    H = G.truncate(order).compose(psi)
    D = {}
    for e, c in H.items():
        if any(e[2:]):
            raise NotBasic(f"function depends on a transverse chart coordinate (monomial {e})")
        D[e[:2]] = c
    return Jet(2, order, D)


def _coefficient_slot(form):
    for idx, c in form.components():
        if c.constant:
            return idx
    return None


def basic_pair_from_closed_2form(eta, p0, q0):
    """Return ``(p, q0)`` with ``dp ^ dq0 = eta`` where ``eta = G dp0 ^ dq0``.

    ``p = F(p0, q0)`` with ``F(s, t) = int_0^s D(r, t) dr`` and ``D(p0, q0) = G``.
    """
    n = eta.n
    if eta.degree != 2:
        raise ValueError("expected a 2-form")
    if n > 2 and eta.order >= 1:
        ok, w = is_zero(exterior_d(eta))
        if not ok:
            raise NotClosed(f"2-form is not closed: {w}", w)
    base = wedge(
        DiffForm.one_form([p0.diff(i) for i in range(n)]),
        DiffForm.one_form([q0.diff(i) for i in range(n)]),
    )
    slot = _coefficient_slot(base)
    if slot is None:
        raise DegenerateWeb("dp0 ^ dq0 vanishes at the origin")
    G = eta[slot] / base[slot]
    ok, w = is_zero(eta - base * G)
    if not ok:
        raise NotBasic(f"2-form is not a multiple of dp0 ^ dq0: {w}")
    D = factor_through_basics(G, p0, q0)
    F = D.antiderivative(0)
    order = min(F.order, p0.order, q0.order)
    p = F.truncate(order).compose([p0.truncate(order), q0.truncate(order)])
    return p, q0


def _combine_with_linear_part(integrals, target):
    """Combination of first integrals whose linear part equals ``target``."""
    n = integrals[0].nvars
    units = [tuple(1 if i == k else 0 for i in range(n)) for k in range(n)]
    lin = [[F[u] for u in units] for F in integrals]
    m = len(integrals)
    # least-squares-free exact solve: pick m independent columns
    for cols in combinations(range(n), m):
        M = [[lin[j][c] for j in range(m)] for c in cols]
        Minv = const_matrix_inverse(M)
        if Minv is None:
            continue
        rhs = [rational(target[c]) for c in cols]
        coef = [sum(Minv[i][k] * rhs[k] for k in range(m)) for i in range(m)]
        got = [sum(coef[j] * lin[j][c] for j in range(m)) for c in range(n)]
        if got != [rational(t) for t in target]:
            raise DegenerateWeb("requested linear part is not attainable by first integrals")
        out = integrals[0].scale(coef[0])
        for j in range(1, m):
            out = out + integrals[j].scale(coef[j])
        return out
    raise DegenerateWeb("first integrals have dependent linear parts")


@dataclass
class Reconstruction:
    """Output of :func:`reconstruct`.

    ``chart`` gives the new coordinates ``(X, Y, Z)`` as jets in the old ones;
    ``f, g, h`` are the re-gauged basic functions paired with ``X, Y, Z`` and
    ``triple`` satisfies ``dQ = f dX + g dY + h dZ + u dv``.
    """

    triple: QuvTriple
    f: Jet
    g: Jet
    h: Jet
    chart: list
    web: Web


def _chart_seeds(web):
    """Linear parts for X, Y, Z sending V_1, V_2, V_3, V_4 at 0 to multiples
    of (0,0,1), (1,0,0), (0,1,0) and exactly (1,1,1) for the sum."""
    d = [web.generators[i].at_origin() for i in range(4)]
    M = [[d[i][k] for i in range(3)] for k in range(3)]
    Minv = const_matrix_inverse(M)
    if Minv is None:
        raise DegenerateWeb("first three directions are dependent")
    k = [sum(Minv[i][r] * d[3][r] for r in range(3)) for i in range(3)]
    if not all(k):
        raise DegenerateWeb("fourth direction lies in a coordinate plane of the others")
    E = [[k[i] * d[i][r] for i in range(3)] for r in range(3)]
    beta = const_matrix_inverse(E)
    return [beta[1], beta[2], beta[0]]


def reconstruct(web, normalize=True):
    """Recover a triple ``(Q, u, v)`` whose web is isomorphic to a flat ``web``.

    Coordinates ``X, Y, Z`` are first integrals of ``V_1, V_2, V_3``; the
    abelian relation's forms ``eta_l`` are rewritten as ``df^dX``, ``dg^dY``,
    ``dh^dZ``, ``du^dv`` and ``Q`` is a primitive of
    ``f dX + g dY + h dZ + u dv``.  With ``normalize`` the basic functions are
    re-gauged affinely so that the triple has the normal-form leading terms.
    """
    if web.n != 3:
        raise NumVarsMismatch("reconstruction is implemented for 4-webs in dimension 3")
    seeds = _chart_seeds(web)
    chart = [
        _combine_with_linear_part(first_integrals(web.generators[i]), seeds[i]) for i in range(3)
    ]
    moved = pushforward_web(web, chart)
    rel = abelian_relation(moved, verify=False)
    order = rel.order
    X, Y, Z = (Jet.var(i, 3, order) for i in range(3))
    targets = [(0, 1, 0), (0, 0, 1), (1, 0, 0)]
    basics = []
    for lam, (q0, target) in enumerate(zip((X, Y, Z), targets)):
        ints = first_integrals(moved.generators[lam].truncate(order))
        p0 = _combine_with_linear_part(ints, target)
        p, _ = basic_pair_from_closed_2form(rel.eta[lam], p0, q0)
        basics.append(p)
    ints = first_integrals(moved.generators[3].truncate(order))
    u0 = _combine_with_linear_part(ints, (-1, 1, 0))
    v0 = _combine_with_linear_part(ints, (-1, 0, 1))
    u, v = basic_pair_from_closed_2form(rel.eta[3], u0, v0)
    f, g, h = basics
    if normalize:
        f, g, h, u, v = _regauge(f, g, h, u, v)
    theta = (
        DiffForm.one_form([f, Jet.zero(3, f.order), Jet.zero(3, f.order)])
        + DiffForm.one_form([Jet.zero(3, g.order), g, Jet.zero(3, g.order)])
        + DiffForm.one_form([Jet.zero(3, h.order), Jet.zero(3, h.order), h])
        + DiffForm.one_form([v.diff(i) for i in range(3)]) * u
    )
    Q = primitive_closed_1form(theta)
    order = min(Q.order, u.order, v.order)
    triple = QuvTriple(Q.truncate(order), u.truncate(order), v.truncate(order))
    if normalize and order >= 2 and _leading_terms_ok(triple):
        triple = NormalizedQuv(triple.Q, triple.u, triple.v)
    return Reconstruction(triple, f, g, h, chart, moved)


def _lin(j):
    return [j[(1, 0, 0)], j[(0, 1, 0)], j[(0, 0, 1)]]


def _regauge(f, g, h, u, v):
    """Affine re-gauge to ``f ~ y, g ~ z, h ~ x, u ~ y - x, v ~ z - x``."""
    f = f - Jet.var(0, 3, f.order).scale(_lin(f)[0])
    g = g - Jet.var(1, 3, g.order).scale(_lin(g)[1])
    h = h - Jet.var(2, 3, h.order).scale(_lin(h)[2])
    # u, v linear parts in the basis (y - x, z - x)
    lu, lv = _lin(u), _lin(v)
    p, q, r, s = lu[1], lu[2], lv[1], lv[2]
    delta = p * s - q * r
    if not delta:
        raise DegenerateWeb("du ^ dv vanishes at the origin")
    for name, j, idx in (("f", f, 1), ("g", g, 2), ("h", h, 0)):
        if _lin(j)[idx] != delta:
            raise DegenerateWeb(f"linear part of {name} is inconsistent with the abelian relation")
    # S = diag(delta, 1) [[p, q], [r, s]]^{-1}, det S = 1
    inv = [[s / delta, -q / delta], [-r / delta, p / delta]]
    S = [[delta * inv[0][0], delta * inv[0][1]], [inv[1][0], inv[1][1]]]
    u2 = u.scale(S[0][0]) + v.scale(S[0][1])
    v2 = u.scale(S[1][0]) + v.scale(S[1][1])
    k = ONE / delta
    return f.scale(k), g.scale(k), h.scale(k), u2.scale(k), v2


def reconstruct_quv(web):
    return reconstruct(web, normalize=False).triple


def normalize_triple(t):
    """Normal form of a triple up to isomorphism (residual gauge not removed)."""
    try:
        web = quv_web(t).web
    except DegenerateTriple:
        raise
    try:
        result = reconstruct(web, normalize=True).triple
    except DegenerateWeb as exc:
        raise DegenerateTriple(str(exc)) from exc
    if not isinstance(result, NormalizedQuv):
        raise DegenerateTriple("reconstruction did not reach the normal form")
    return result


def blaschke_classical(u):
    """``d/dx d/dy log(u_x / u_y) dx^dy`` for the planar web (x, y, u)."""
    if u.nvars != 2:
        raise NumVarsMismatch("expected a function of two variables")
    ux, uy = u.diff(0), u.diff(1)
    if not ux.constant or not uy.constant:
        raise DegenerateWeb("u_x and u_y must not vanish at the origin")
    w = ux * uy.inv()
    dlog = w.diff(1) * w.inv()
    return DiffForm(2, 2, {(0, 1): dlog.diff(0)})
