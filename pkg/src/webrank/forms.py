"""Vector fields and exterior forms with jet coefficients in one coordinate chart.

Forms are always written in the coordinate coframe ``dx_1, ..., dx_n``; a
p-form maps strictly increasing index tuples (0-based) to jets.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from ._rational import ZERO
from .errors import DegreeOverflow, NotClosed, NumVarsMismatch, OrderExceedsReliable
from .jets import Jet, _layout

__all__ = [
    "VectorField",
    "DiffForm",
    "Witness",
    "wedge",
    "exterior_d",
    "interior_product",
    "lie_derivative",
    "primitive_closed_1form",
    "is_zero",
    "pullback",
]


class VectorField:
    """``sum_k components[k] * d/dx_k``."""

    __slots__ = ("components",)

    def __init__(self, components):
        comps = tuple(components)
        if not comps:
            raise ValueError("a vector field needs at least one component")
        n = len(comps)
        for c in comps:
            if not isinstance(c, Jet) or c.nvars != n:
                raise NumVarsMismatch(f"components must be jets in {n} variables")
        self.components = comps

    @classmethod
    def constant(cls, values, order):
        n = len(values)
        return cls(Jet.const(v, n, order) for v in values)

    @property
    def n(self):
        return len(self.components)

    @property
    def order(self):
        return min(c.order for c in self.components)

    def __getitem__(self, k):
        return self.components[k]

    def __iter__(self):
        return iter(self.components)

    def at_origin(self):
        return tuple(c.constant for c in self.components)

    def apply(self, f):
        """Directional derivative ``V . f``."""
        return _sum(c * f.diff(k) for k, c in enumerate(self.components))

    __call__ = apply

    def bracket(self, other):
        """Lie bracket ``[self, other]`` componentwise."""
        return VectorField(self.apply(w) - other.apply(v) for v, w in zip(self.components, other.components))

    def __add__(self, other):
        return VectorField(a + b for a, b in zip(self.components, other.components))

    def __sub__(self, other):
        return VectorField(a - b for a, b in zip(self.components, other.components))

    def __neg__(self):
        return VectorField(-a for a in self.components)

    def __mul__(self, scalar):
        return VectorField(a * scalar for a in self.components)

    __rmul__ = __mul__

    def truncate(self, order):
        return VectorField(c.truncate(order) for c in self.components)

    def __eq__(self, other):
        if not isinstance(other, VectorField) or other.n != self.n:
            return False
        return all(a == b for a, b in zip(self.components, other.components))

    __hash__ = None

    def __repr__(self):
        return f"VectorField({[c.to_str() for c in self.components]}, order={self.order})"


def _sum(jets):
    total = None
    for j in jets:
        total = j if total is None else total + j
    return total


def _merge_sign(a, b):
    """Sign of the shuffle sorting ``a + b``, or 0 if they share an index."""
    if set(a) & set(b):
        return 0
    inversions = sum(1 for i in a for j in b if i > j)
    return -1 if inversions % 2 else 1


@dataclass(frozen=True)
class Witness:
    """A nonzero coefficient: form slot, monomial exponents and value."""

    index: tuple
    exponents: tuple
    coefficient: object

    @property
    def degree(self):
        return sum(self.exponents)


class DiffForm:
    """Exterior p-form ``sum_I c_I dx_I`` with jet coefficients.

    ``order`` is the minimum reliable order over the coefficients; it is kept
    explicitly so that vanishing coefficients do not erase it.
    """

    __slots__ = ("n", "degree", "coeffs", "order")

    def __init__(self, n, degree, coeffs=None, order=None):
        if not 0 <= degree <= n:
            raise DegreeOverflow(f"degree {degree} impossible in dimension {n}")
        clean = {}
        orders = [] if order is None else [order]
        for idx, c in (coeffs or {}).items():
            idx = tuple(idx)
            if len(idx) != degree or any(i >= j for i, j in zip(idx, idx[1:])):
                raise ValueError(f"index {idx} is not strictly increasing of length {degree}")
            if idx and not 0 <= idx[-1] < n or idx and idx[0] < 0:
                raise IndexError(f"index {idx} out of range")
            if c.nvars != n:
                raise NumVarsMismatch(f"coefficient in {c.nvars} variables, expected {n}")
            orders.append(c.order)
            if c:
                clean[idx] = c
        if not orders:
            raise ValueError("an empty form needs an explicit order")
        self.n = n
        self.degree = degree
        self.order = min(orders)
        self.coeffs = {k: (v if v.order == self.order else v.truncate(self.order)) for k, v in clean.items()}

    # ---- constructors -------------------------------------------------
    @classmethod
    def function(cls, f):
        return cls(f.nvars, 0, {(): f})

    @classmethod
    def one_form(cls, coeffs):
        coeffs = list(coeffs)
        return cls(len(coeffs), 1, {(i,): c for i, c in enumerate(coeffs)})

    @classmethod
    def dx(cls, i, n, order):
        return cls(n, 1, {(i,): Jet.const(1, n, order)})

    @classmethod
    def zero(cls, n, degree, order):
        return cls(n, degree, {}, order)

    # ---- access ---------------------------------------------------------
    def __getitem__(self, idx):
        idx = tuple(idx)
        c = self.coeffs.get(idx)
        return c if c is not None else Jet.zero(self.n, self.order)

    def components(self):
        """All coefficients (including zeros) in lexicographic slot order."""
        return [(idx, self[idx]) for idx in combinations(range(self.n), self.degree)]

    def as_function(self):
        if self.degree != 0:
            raise ValueError("not a 0-form")
        return self[()]

    # ---- linear structure -------------------------------------------------
    def _check(self, other):
        if not isinstance(other, DiffForm) or other.n != self.n or other.degree != self.degree:
            raise ValueError("forms must share dimension and degree")

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out[k] + v if k in out else v
        return DiffForm(self.n, self.degree, out, min(self.order, other.order))

    def __neg__(self):
        return DiffForm(self.n, self.degree, {k: -v for k, v in self.coeffs.items()}, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, f):
        """Multiply by a function (jet) or a scalar."""
        if isinstance(f, Jet):
            order = min(self.order, f.order)
        else:
            order = self.order
        return DiffForm(self.n, self.degree, {k: v * f for k, v in self.coeffs.items()}, order)

    __rmul__ = __mul__

    def truncate(self, order):
        return DiffForm(self.n, self.degree, {k: v.truncate(order) for k, v in self.coeffs.items()}, order)

    def __xor__(self, other):
        return wedge(self, other)

    def __eq__(self, other):
        if not isinstance(other, DiffForm) or other.n != self.n or other.degree != self.degree:
            return False
        return is_zero(self - other)[0]

    __hash__ = None

    def __repr__(self):
        body = ", ".join(f"{k}: {v.to_str()}" for k, v in sorted(self.coeffs.items()))
        return f"DiffForm(degree={self.degree}, order={self.order}, {{{body}}})"


def wedge(a, b):
    if a.n != b.n:
        raise NumVarsMismatch("forms live in different dimensions")
    p, q = a.degree, b.degree
    if p + q > a.n:
        raise DegreeOverflow(f"wedge of degrees {p} and {q} exceeds dimension {a.n}")
    order = min(a.order, b.order)
    out = {}
    for I, f in a.coeffs.items():
        for J, g in b.coeffs.items():
            s = _merge_sign(I, J)
            if not s:
                continue
            K = tuple(sorted(I + J))
            term = f * g if s > 0 else -(f * g)
            out[K] = out[K] + term if K in out else term
    return DiffForm(a.n, p + q, out, order)


def exterior_d(a):
    n = a.n
    if a.degree >= n:
        raise DegreeOverflow("exterior derivative of a top-degree form")
    order = max(a.order - 1, 0)
    out = {}
    for I, f in a.coeffs.items():
        for j in range(n):
            if j in I:
                continue
            df = f.diff(j)
            if not df:
                continue
            s = _merge_sign((j,), I)
            K = tuple(sorted((j,) + I))
            term = df if s > 0 else -df
            out[K] = out[K] + term if K in out else term
    return DiffForm(n, a.degree + 1, out, order)


def interior_product(V, a):
    if V.n != a.n:
        raise NumVarsMismatch("vector field and form live in different dimensions")
    if a.degree < 1:
        raise ValueError("interior product of a 0-form")
    order = min(V.order, a.order)
    out = {}
    for I, f in a.coeffs.items():
        for pos, i in enumerate(I):
            vi = V.components[i]
            if not vi:
                continue
            K = I[:pos] + I[pos + 1:]
            term = vi * f
            if pos % 2:
                term = -term
            out[K] = out[K] + term if K in out else term
    return DiffForm(a.n, a.degree - 1, out, order)


def lie_derivative(V, a):
    """Cartan's formula ``L_V = i_V d + d i_V``."""
    if a.degree == 0:
        return DiffForm.function(V.apply(a.as_function()))
    if a.degree == a.n:
        return exterior_d(interior_product(V, a))
    return interior_product(V, exterior_d(a)) + exterior_d(interior_product(V, a))


def is_zero(a, through_order=None):
    """``(True, None)`` if every coefficient vanishes through the order, else
    ``(False, witness)`` with a minimal-degree nonzero coefficient."""
    if through_order is None:
        through_order = a.order
    if through_order > a.order:
        raise OrderExceedsReliable(f"asked for order {through_order}, form reliable to {a.order}")
    best = None
    for idx in sorted(a.coeffs):
        hit = a.coeffs[idx].first_nonzero(through_order)
        if hit is not None and (best is None or sum(hit[0]) < best.degree):
            best = Witness(idx, hit[0], hit[1])
    return (best is None, best)


def primitive_closed_1form(theta):
    """Primitive ``P`` with ``dP = theta`` and ``P(0) = 0`` (radial homotopy).

    A monomial ``c x^a`` in slot ``i`` contributes ``c x^a x_i / (|a| + 1)``.
    """
    if theta.degree != 1:
        raise ValueError("expected a 1-form")
    n = theta.n
    if n > 1 and theta.order >= 1:
        ok, witness = is_zero(exterior_d(theta))
        if not ok:
            raise NotClosed(f"form is not closed: d(theta) has {witness}", witness)
    shifts, degshift, units = _layout(n)
    out = {}
    for (i,), c in theta.coeffs.items():
        for k, v in c._terms.items():
            key = k + units[i]
            out[key] = out.get(key, ZERO) + v / ((k >> degshift) + 1)
    exact = all(c.exact for c in theta.coeffs.values())
    return Jet._make(n, theta.order + 1, {k: v for k, v in out.items() if v}, exact)


def pullback(a, maps):
    """Pull ``a`` back along the formal map ``x_k = maps[k](y)``."""
    maps = list(maps)
    if len(maps) != a.n:
        raise NumVarsMismatch("map arity does not match the form's dimension")
    m = maps[0].nvars
    differentials = [DiffForm.one_form([f.diff(j) for j in range(m)]) for f in maps]
    order = min([a.order] + [f.order for f in maps])
    if a.degree == 0:
        return DiffForm.function(a.as_function().compose(maps))
    out = DiffForm.zero(m, a.degree, max(order - 1, 0))
    for I, c in a.coeffs.items():
        term = DiffForm.function(c.compose(maps))
        for i in I:
            term = wedge(term, differentials[i])
        out = out + term
    return out

