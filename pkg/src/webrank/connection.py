"""Curvature of (n+1)-webs of curves in dimension n.

Pipeline: generators -> zero-sum section ``sum V = 0`` -> dual coframe
``alpha`` -> structure functions ``C_ij^k`` -> ``phi_i`` -> connection form
``omega = sum phi_i alpha_i`` -> curvature ``Omega = d omega``.  A web is
flat (rank one) exactly when ``Omega`` vanishes, and then ``f = exp(P)`` with
``dP = -omega`` gives the abelian relation ``eta_i = f A_i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from ._rational import ONE, ZERO
from .errors import (
    DegeneratePosition,
    GeneralPositionError,
    NotFlatError,
    NumVarsMismatch,
    OrderExceedsReliable,
    SingularAtOrigin,
    SingularFrame,
    VanishingAtOrigin,
    WebError,
    ZeroConstantTerm,
)
from .forms import (
    DiffForm,
    VectorField,
    Witness,
    exterior_d,
    interior_product,
    is_zero,
    lie_derivative,
    primitive_closed_1form,
    wedge,
)
from .jets import Jet, JetMatrix, const_det, const_matrix_inverse, formal_inverse, jet_matrix_inverse

__all__ = [
    "Web",
    "ZeroSumSection",
    "ConnectionData",
    "AbelianRelation",
    "FlatThroughOrder",
    "NotFlat",
    "ConsistencyError",
    "check_general_position",
    "zero_sum_section",
    "connection_data",
    "is_flat",
    "abelian_relation",
    "rescale_section",
    "swap_with_last",
    "first_integrals",
    "pushforward_web",
    "planar_web",
]


class ConsistencyError(WebError, AssertionError):
    """An identity that must hold by construction failed (order deficit or bug)."""


@dataclass(frozen=True)
class Web:
    """n+1 foliations by curves in dimension n, one generator field each."""

    generators: tuple

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        if len(gens) < 3:
            raise ValueError("a web of curves needs at least 3 generators (n >= 2)")
        n = len(gens) - 1
        for g in gens:
            if not isinstance(g, VectorField) or g.n != n:
                raise NumVarsMismatch(f"expected {n + 1} vector fields in dimension {n}")

    @property
    def n(self):
        return len(self.generators) - 1

    @property
    def order(self):
        return min(g.order for g in self.generators)

    def truncate(self, order):
        return Web(tuple(g.truncate(order) for g in self.generators))


@dataclass(frozen=True)
class PositionVerdict:
    ok: bool
    subset: tuple = None

    def __bool__(self):
        return self.ok


def check_general_position(web):
    """Every n of the n+1 directions at the origin must be independent.

    Returns the first failing subset (1-based, lexicographic) as a violation.
    """
    values = [g.at_origin() for g in web.generators]
    for subset in combinations(range(web.n + 1), web.n):
        cols = [values[i] for i in subset]
        M = [[col[k] for col in cols] for k in range(web.n)]
        if not const_det(M):
            return PositionVerdict(False, tuple(i + 1 for i in subset))
    return PositionVerdict(True)


@dataclass(frozen=True)
class ZeroSumSection:
    """Generators ``V_1..V_{n+1}`` with ``sum V = 0`` identically."""

    fields: tuple

    def __post_init__(self):
        fields = tuple(self.fields)
        object.__setattr__(self, "fields", fields)
        total = fields[0]
        for f in fields[1:]:
            total = total + f
        for c in total.components:
            if c:
                raise ValueError("vector fields do not sum to zero")

    @property
    def n(self):
        return len(self.fields) - 1

    @property
    def order(self):
        return min(f.order for f in self.fields)

    def as_web(self):
        return Web(self.fields)


def _frame(fields):
    n = len(fields)
    return JetMatrix([[fields[i].components[k] for i in range(n)] for k in range(n)])


def zero_sum_section(web):
    """Normalize to ``V_i = -c_i W_i`` (i <= n), ``V_{n+1} = W_{n+1}``,
    where ``W_{n+1} = sum_i c_i W_i``."""
    n = web.n
    W = web.generators
    M = _frame(W[:n])
    try:
        Minv = jet_matrix_inverse(M)
    except SingularAtOrigin as exc:
        raise SingularFrame("first n generators are dependent at the origin") from exc
    last = W[n].components
    c = []
    for i in range(n):
        acc = Minv[i, 0] * last[0]
        for k in range(1, n):
            acc = acc + Minv[i, k] * last[k]
        c.append(acc)
    for i, ci in enumerate(c):
        if not ci.constant:
            raise DegeneratePosition(f"generator {n + 1} has no component along generator {i + 1} at the origin")
    fields = [W[i] * (-c[i]) for i in range(n)]
    order = min(f.order for f in fields)
    fields.append(W[n].truncate(order) if W[n].order > order else W[n])
    return ZeroSumSection(tuple(fields))


@dataclass(frozen=True)
class FlatThroughOrder:
    order: int
    exact: bool = False

    def __bool__(self):
        return True


@dataclass(frozen=True)
class NotFlat:
    witness: Witness
    order: int

    def __bool__(self):
        return False


@dataclass
class ConnectionData:
    """Coframe, structure functions and connection/curvature forms of a section.

    Indices are 0-based: ``alpha[i]`` is dual to ``section.fields[i]`` and
    ``C[(i, j)][k]`` is the ``V_k`` component of ``[V_i, V_j]`` for ``i < j``.
    """

    section: ZeroSumSection
    alpha: list
    A: list
    C: dict
    phi: list
    omega: DiffForm
    curvature: DiffForm

    @property
    def n(self):
        return self.section.n

    def structure(self, i, j, k):
        """``C_ij^k`` extended by antisymmetry."""
        if i == j:
            return Jet.zero(self.n, self.phi[0].order)
        if i < j:
            return self.C[(i, j)][k]
        return -self.C[(j, i)][k]

    def flatness(self, through_order=None):
        Omega = self.curvature
        if through_order is None:
            through_order = Omega.order
        ok, witness = is_zero(Omega, through_order)
        if ok:
            return FlatThroughOrder(through_order, self.exact)
        return NotFlat(witness, through_order)

    @property
    def exact(self):
        """True when no truncation touched the curvature.

        Needs polynomial fields (degree a) and a polynomial coframe (degree b);
        the curvature then has degree <= 2a + 2b - 2, and every intermediate
        stays within its order exactly when ``2(a + b) <= order``.
        """
        comps = [c for v in self.section.fields for c in v.components]
        coframe = [c for a in self.alpha for c in a.coeffs.values()]
        if not all(c.exact for c in comps + coframe):
            return False
        a = max(c.degree for c in comps)
        b = max(c.degree for c in coframe)
        return 2 * (max(a, 0) + max(b, 0)) <= self.section.order

    def volume(self):
        vol = self.alpha[0]
        for a in self.alpha[1:]:
            vol = wedge(vol, a)
        return vol


def _evaluate_1form(alpha, V):
    return interior_product(V, alpha).as_function()


def connection_data(section, verify=True):
    n = section.n
    V = section.fields
    Minv = jet_matrix_inverse(_frame(V[:n]))
    alpha = [DiffForm.one_form(Minv.rows[i]) for i in range(n)]
    C = {}
    for i, j in combinations(range(n), 2):
        bracket = V[i].bracket(V[j])
        C[(i, j)] = [_evaluate_1form(alpha[k], bracket) for k in range(n)]
    phi = []
    for i in range(n):
        terms = [C[(j, i)][j] for j in range(i)] + [-C[(i, j)][j] for j in range(i + 1, n)]
        total = terms[0]
        for t in terms[1:]:
            total = total + t
        phi.append(total)
    omega = alpha[0] * phi[0]
    for i in range(1, n):
        omega = omega + alpha[i] * phi[i]
    curvature = exterior_d(omega)
    A = []
    for i in range(n):
        rest = [alpha[j] for j in range(n) if j != i]
        form = rest[0]
        for r in rest[1:]:
            form = wedge(form, r)
        A.append(form if i % 2 == 0 else -form)
    data = ConnectionData(section, alpha, A, C, phi, omega, curvature)
    if verify:
        problems = verify_connection(data)
        if problems:
            raise ConsistencyError("; ".join(problems))
    return data


def verify_connection(data):
    """Check the defining identities through their reliable orders.

    Returns a list of human-readable failures (empty when all hold).
    """
    n = data.n
    V = data.section.fields
    alpha = data.alpha
    problems = []
    for i in range(n):
        for j in range(n):
            val = _evaluate_1form(alpha[i], V[j]) - (1 if i == j else 0)
            if not val.is_zero():
                problems.append(f"alpha_{i + 1}(V_{j + 1}) != delta")
    for k in range(n):
        rhs = DiffForm.zero(n, 2, alpha[0].order)
        for i, j in combinations(range(n), 2):
            rhs = rhs - wedge(alpha[i], alpha[j]) * data.C[(i, j)][k]
        ok, w = is_zero(exterior_d(alpha[k]) - rhs)
        if not ok:
            problems.append(f"d alpha_{k + 1} structure equation fails at {w}")
    vol = data.volume()
    for i in range(n):
        dA = exterior_d(data.A[i])
        ok, w = is_zero(dA - vol * data.phi[i])
        if not ok:
            problems.append(f"dA_{i + 1} != phi_{i + 1} vol at {w}")
        ok, w = is_zero(dA - wedge(data.omega, data.A[i]))
        if not ok:
            problems.append(f"dA_{i + 1} != omega ^ A_{i + 1} at {w}")
    return problems


def is_flat(web, through_order=None, section=None):
    """Flatness verdict of the curvature through ``through_order``."""
    if section is None:
        section = zero_sum_section(web)
    data = connection_data(section, verify=False)
    if through_order is not None and through_order > data.curvature.order:
        raise OrderExceedsReliable(
            f"curvature is reliable through order {data.curvature.order}, asked {through_order}"
        )
    return data.flatness(through_order)


@dataclass
class AbelianRelation:
    """``f`` with ``f(0) = 1`` and the basic (n-1)-forms ``eta_1..eta_{n+1}``."""

    f: Jet
    eta: list
    data: ConnectionData = field(repr=False)

    @property
    def order(self):
        return min(e.order for e in self.eta)


def abelian_relation(web_or_section, verify=True):
    section = web_or_section if isinstance(web_or_section, ZeroSumSection) else zero_sum_section(web_or_section)
    data = connection_data(section, verify=verify)
    verdict = data.flatness()
    if not verdict:
        raise NotFlatError(f"web is not flat: curvature coefficient {verdict.witness}", verdict.witness)
    P = primitive_closed_1form(-data.omega)
    f = P.exp()
    eta = [A * f for A in data.A]
    last = eta[0]
    for e in eta[1:]:
        last = last + e
    eta.append(-last)
    rel = AbelianRelation(f, eta, data)
    if verify:
        problems = verify_abelian_relation(rel)
        if problems:
            raise ConsistencyError("; ".join(problems))
    return rel


def verify_abelian_relation(rel):
    problems = []
    V = rel.data.section.fields
    n = len(V) - 1
    total = rel.eta[0]
    for e in rel.eta[1:]:
        total = total + e
    if total.coeffs:
        problems.append("sum of eta is not exactly zero")
    if rel.f.constant != 1:
        problems.append("f(0) != 1")
    for lam, (v, e) in enumerate(zip(V, rel.eta)):
        ok, w = is_zero(interior_product(v, e))
        if not ok:
            problems.append(f"i_V{lam + 1} eta_{lam + 1} != 0 at {w}")
        ok, w = is_zero(lie_derivative(v, e))
        if not ok:
            problems.append(f"L_V{lam + 1} eta_{lam + 1} != 0 at {w}")
    for i in range(n):
        star = V[i].apply(rel.f) + rel.f * rel.data.phi[i]
        if not star.is_zero():
            problems.append(f"(V_{i + 1} f) + f phi_{i + 1} != 0")
    return problems


def rescale_section(section, unit):
    if not unit.constant:
        raise ZeroConstantTerm("rescaling unit vanishes at the origin")
    return ZeroSumSection(tuple(v * unit for v in section.fields))


def swap_with_last(section, index):
    """Exchange ``V_index`` (1-based, 1..n) with ``V_{n+1}``."""
    n = section.n
    if not 1 <= index <= n:
        raise IndexError(f"index must lie in 1..{n}")
    fields = list(section.fields)
    fields[index - 1], fields[n] = fields[n], fields[index - 1]
    return ZeroSumSection(tuple(fields))


def _linear_jets(matrix, order):
    return [Jet.linear(row, order) for row in matrix]


def first_integrals(V):
    """n-1 independent formal first integrals of ``V`` vanishing at the origin.

    With ``p`` the first index where ``V(0)`` is nonzero, straighten ``V(0)``
    to the last axis via ``x = B y`` (B = remaining unit vectors, then V(0)),
    then solve ``V . F = 0`` degree by degree: the constant part acts as
    ``d/dy_n`` and its preimage is taken as an antiderivative in ``y_n``.
    """
    n = V.n
    v0 = V.at_origin()
    p = next((k for k, c in enumerate(v0) if c), None)
    if p is None:
        raise VanishingAtOrigin("vector field vanishes at the origin")
    N = V.order
    cols = [[ONE if r == k else ZERO for r in range(n)] for k in range(n) if k != p] + [list(v0)]
    B = [[cols[j][k] for j in range(n)] for k in range(n)]
    Binv = const_matrix_inverse(B)
    if N == 0:
        return [Jet.linear(Binv[j], 0) for j in range(n - 1)]
    x_of_y = _linear_jets(B, N)
    moved = [c.compose(x_of_y) for c in V.components]
    Vt = VectorField(
        sum((moved[k].scale(Binv[i][k]) for k in range(n) if Binv[i][k]), Jet.zero(n, N)) for i in range(n)
    )
    F = [Jet.var(j, n, N) for j in range(n - 1)]
    for d in range(2, N + 1):
        for j in range(n - 1):
            residual = Vt.apply(F[j]).homogeneous(d - 1)
            if residual:
                F[j] = F[j] - residual.antiderivative(n - 1)
    y_of_x = _linear_jets(Binv, N)
    return [Fj.compose(y_of_x) for Fj in F]


def pushforward_web(web, phi):
    """Transport a web along the formal diffeomorphism ``X = phi(x)``."""
    phi = list(phi)
    n = web.n
    if len(phi) != n:
        raise NumVarsMismatch("diffeomorphism arity does not match the web dimension")
    psi = formal_inverse(phi)
    J = [[phi[k].diff(j) for j in range(n)] for k in range(n)]
    gens = []
    for W in web.generators:
        comps = []
        for k in range(n):
            acc = J[k][0] * W.components[0]
            for j in range(1, n):
                acc = acc + J[k][j] * W.components[j]
            comps.append(acc.compose(psi))
        gens.append(VectorField(comps))
    return Web(tuple(gens))


def planar_web(u):
    """3-web in the plane with basic functions ``x``, ``y`` and ``u(x, y)``."""
    if u.nvars != 2:
        raise NumVarsMismatch("planar_web expects a function of two variables")
    N = u.order
    ux, uy = u.diff(0), u.diff(1)
    one = Jet.const(1, 2, N - 1)
    zero = Jet.zero(2, N - 1)
    return Web((VectorField((zero, one)), VectorField((one, zero)), VectorField((uy, -ux))))


def general_position_or_raise(web):
    verdict = check_general_position(web)
    if not verdict:
        raise GeneralPositionError(f"generators {set(verdict.subset)} are dependent at the origin", verdict.subset)
    return verdict
