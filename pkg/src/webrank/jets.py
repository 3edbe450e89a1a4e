"""Truncated multivariate power series (jets) over exact rationals.

A :class:`Jet` stores the Taylor coefficients of a germ at the origin up to its
``order`` (the degree through which the coefficients are trustworthy).  All
arithmetic propagates ``order``: the minimum over inputs for ring operations,
minus one for differentiation, plus one for antiderivatives, unchanged for
inversion and composition.

Exponent vectors are packed into a single Python int.  Each variable owns an
8-bit field and the total degree sits in the top field, so adding two keys
multiplies the monomials and comparing keys sorts by degree first.  This keeps
the truncated product (the hot loop of the whole package) down to integer
additions and comparisons.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations_with_replacement

from . import _rational
from ._rational import ONE, ZERO, rational
from .errors import (
    DegreeOverflow,
    NonvanishingArgument,
    NumVarsMismatch,
    OrderExceedsReliable,
    SingularAtOrigin,
    SingularJacobian,
    ZeroConstantTerm,
)

BITS = 8
MASK = (1 << BITS) - 1
MAX_ORDER = 250

__all__ = [
    "Jet",
    "JetMatrix",
    "jet_add",
    "jet_mul",
    "jet_inv",
    "jet_diff",
    "jet_antiderivative",
    "jet_compose",
    "formal_inverse",
    "jet_matrix_inverse",
    "const_matrix_inverse",
]


@lru_cache(maxsize=None)
def _layout(nvars):
    shifts = tuple(BITS * (nvars - 1 - i) for i in range(nvars))
    degshift = BITS * nvars
    units = tuple((1 << s) + (1 << degshift) for s in shifts)
    return shifts, degshift, units


def _pack(exps, nvars):
    shifts, degshift, _ = _layout(nvars)
    key = sum(exps) << degshift
    for e, s in zip(exps, shifts):
        if e < 0 or e > MASK:
            raise DegreeOverflow(f"exponent {e} out of range")
        key |= e << s
    return key


def _unpack(key, nvars):
    shifts, _, _ = _layout(nvars)
    return tuple((key >> s) & MASK for s in shifts)


def _sort_key(nvars):
    # ascending degree, then x1 before x2 before ... within a degree
    _, degshift, _ = _layout(nvars)
    low = (1 << degshift) - 1
    return lambda k: (k >> degshift, -(k & low))


def _check_order(order):
    if not isinstance(order, int) or order < 0:
        raise ValueError(f"order must be a non-negative int, got {order!r}")
    if order > MAX_ORDER:
        raise DegreeOverflow(f"order {order} exceeds supported maximum {MAX_ORDER}")


def _mul_packed(a_sorted, b_sorted, order, degshift):
    """Truncated Cauchy product of two key-sorted term lists."""
    bound = (order + 1) << degshift
    out = {}
    get = out.get
    for ka, ca in a_sorted:
        rem = bound - ka
        if rem <= 0:
            break
        for kb, cb in b_sorted:
            if kb >= rem:
                break
            k = ka + kb
            out[k] = get(k, ZERO) + ca * cb
    return out


class Jet:
    """Germ of a function of ``nvars`` variables known through degree ``order``.

    ``exact`` marks jets known to equal a polynomial exactly (nothing was lost
    to truncation or to a series expansion).
    """

    __slots__ = ("nvars", "order", "_terms", "exact", "_sorted")

    def __init__(self, nvars, order, terms=None, exact=False):
        if not isinstance(nvars, int) or nvars < 1:
            raise ValueError("nvars must be a positive int")
        _check_order(order)
        packed = {}
        complete = True
        for exps, c in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != nvars:
                raise NumVarsMismatch(f"exponent {exps} does not have {nvars} entries")
            if sum(exps) > order:
                complete = False
                continue
            c = rational(c)
            if c:
                k = _pack(exps, nvars)
                c = packed.get(k, ZERO) + c
                if c:
                    packed[k] = c
                else:
                    del packed[k]
        self.nvars = nvars
        self.order = order
        self._terms = packed
        self.exact = bool(exact) and complete
        self._sorted = None

    @classmethod
    def _make(cls, nvars, order, packed, exact):
        """Trusted constructor: ``packed`` has no zero values and respects ``order``."""
        self = object.__new__(cls)
        self.nvars = nvars
        self.order = order
        self._terms = packed
        self.exact = exact
        self._sorted = None
        return self

    @classmethod
    def _clean(cls, nvars, order, packed, exact):
        bound = (order + 1) << _layout(nvars)[1]
        dropped = any(k >= bound for k in packed)
        terms = {k: c for k, c in packed.items() if c and k < bound}
        return cls._make(nvars, order, terms, exact and not dropped)

    # ---- constructors -------------------------------------------------
    @classmethod
    def zero(cls, nvars, order):
        _check_order(order)
        return cls._make(nvars, order, {}, True)

    @classmethod
    def const(cls, value, nvars, order):
        _check_order(order)
        c = rational(value)
        return cls._make(nvars, order, {0: c} if c else {}, True)

    @classmethod
    def var(cls, index, nvars, order):
        """The coordinate function ``x_index`` (0-based)."""
        if not 0 <= index < nvars:
            raise IndexError(f"variable {index} out of range for {nvars} variables")
        _check_order(order)
        if order == 0:
            return cls._make(nvars, 0, {}, False)
        return cls._make(nvars, order, {_layout(nvars)[2][index]: ONE}, True)

    @classmethod
    def linear(cls, coeffs, order):
        """The linear form ``sum_i coeffs[i] * x_i``."""
        n = len(coeffs)
        units = _layout(n)[2]
        terms = {}
        for u, c in zip(units, coeffs):
            c = rational(c)
            if c:
                terms[u] = c
        if order == 0:
            return cls._make(n, 0, {}, not terms)
        return cls._make(n, order, terms, True)

    # ---- inspection ---------------------------------------------------
    def _sorted_terms(self):
        if self._sorted is None:
            self._sorted = sorted(self._terms.items())
        return self._sorted

    def items(self):
        """``(exponent_tuple, coefficient)`` pairs in graded-lex order."""
        n = self.nvars
        for k in sorted(self._terms, key=_sort_key(n)):
            yield _unpack(k, n), self._terms[k]

    def as_dict(self):
        return dict(self.items())

    def coeff(self, exps):
        exps = tuple(exps)
        if len(exps) != self.nvars:
            raise NumVarsMismatch(f"exponent {exps} does not have {self.nvars} entries")
        if sum(exps) > self.order:
            raise OrderExceedsReliable(f"degree {sum(exps)} exceeds reliable order {self.order}")
        return self._terms.get(_pack(exps, self.nvars), ZERO)

    __getitem__ = coeff

    @property
    def constant(self):
        return self._terms.get(0, ZERO)

    @property
    def degree(self):
        """Largest stored total degree (-1 for the zero jet)."""
        if not self._terms:
            return -1
        return max(self._terms) >> _layout(self.nvars)[1]

    @property
    def valuation(self):
        """Smallest stored total degree (``None`` for the zero jet)."""
        if not self._terms:
            return None
        return min(self._terms) >> _layout(self.nvars)[1]

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self, through_order=None):
        if through_order is None:
            through_order = self.order
        return self.first_nonzero(through_order) is None

    def first_nonzero(self, through_order=None):
        """Minimal-degree nonzero ``(exponents, coefficient)`` through the order."""
        if through_order is None:
            through_order = self.order
        for exps, c in self.items():
            if sum(exps) > through_order:
                return None
            return exps, c
        return None

    def homogeneous(self, degree):
        degshift = _layout(self.nvars)[1]
        terms = {k: c for k, c in self._terms.items() if k >> degshift == degree}
        return Jet._make(self.nvars, self.order, terms, self.exact)

    def truncate(self, order):
        """Same germ viewed through a lower order."""
        _check_order(order)
        if order > self.order:
            raise OrderExceedsReliable("truncate cannot raise the reliable order; use lift")
        return Jet._clean(self.nvars, order, self._terms, self.exact)

    def lift(self, order):
        """Raise the order of an exact polynomial (no information is invented)."""
        _check_order(order)
        if order <= self.order:
            return self.truncate(order)
        if not self.exact:
            raise ValueError("only exact polynomial jets can be lifted to a higher order")
        return Jet._make(self.nvars, order, dict(self._terms), True)

    # ---- coercion -----------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.nvars != self.nvars:
                raise NumVarsMismatch(f"jets in {self.nvars} and {other.nvars} variables")
            return other
        return Jet.const(other, self.nvars, self.order)

    # ---- ring operations ----------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        order = min(self.order, other.order)
        out = dict(self._terms)
        get = out.get
        for k, c in other._terms.items():
            out[k] = get(k, ZERO) + c
        return Jet._clean(self.nvars, order, out, self.exact and other.exact)

    __radd__ = __add__

    def __neg__(self):
        return Jet._make(self.nvars, self.order, {k: -c for k, c in self._terms.items()}, self.exact)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, scalar):
        s = rational(scalar)
        if not s:
            return Jet._make(self.nvars, self.order, {}, self.exact)
        return Jet._make(self.nvars, self.order, {k: c * s for k, c in self._terms.items()}, self.exact)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        other = self._coerce(other)
        order = min(self.order, other.order)
        n = self.nvars
        out = _mul_packed(self._sorted_terms(), other._sorted_terms(), order, _layout(n)[1])
        exact = self.exact and other.exact
        if exact and self._terms and other._terms:
            exact = self.degree + other.degree <= order
        return Jet._make(n, order, {k: c for k, c in out.items() if c}, exact)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.inv()
        return self.scale(ONE / rational(other))

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inv()

    def __pow__(self, power):
        if not isinstance(power, int) or power < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = Jet.const(1, self.nvars, self.order)
        base = self
        while power:
            if power & 1:
                result = result * base
            power >>= 1
            if power:
                base = base * base
        return result

    def __eq__(self, other):
        if not isinstance(other, Jet):
            if isinstance(other, float):
                return NotImplemented
            try:
                other = self._coerce(other)
            except TypeError:
                return NotImplemented
        if other.nvars != self.nvars:
            return False
        return (self - other).is_zero()

    __hash__ = None

    # ---- series operations ----------------------------------------------
    def _buckets(self):
        degshift = _layout(self.nvars)[1]
        buckets = [[] for _ in range(self.order + 1)]
        for k, c in self._terms.items():
            buckets[k >> degshift].append((k, c))
        return buckets

    def inv(self):
        """Multiplicative inverse; the constant term must be nonzero."""
        a0 = self.constant
        if not a0:
            raise ZeroConstantTerm("cannot invert a jet with vanishing constant term")
        inv0 = ONE / a0
        N = self.order
        A = self._buckets()
        C = [[(0, inv0)]]
        for d in range(1, N + 1):
            acc = {}
            get = acc.get
            for j in range(1, d + 1):
                Cj = C[d - j]
                if not Cj:
                    continue
                for ka, ca in A[j]:
                    for kc, cc in Cj:
                        k = ka + kc
                        acc[k] = get(k, ZERO) + ca * cc
            C.append([(k, -inv0 * c) for k, c in acc.items() if c])
        terms = {k: c for bucket in C for k, c in bucket}
        return Jet._make(self.nvars, N, terms, self.exact and self.degree <= 0)

    def exp(self):
        """Exponential series of a jet vanishing at the origin."""
        if self.constant:
            raise NonvanishingArgument("exp is only defined here for jets with zero constant term")
        N = self.order
        P = self._buckets()
        E = [[(0, ONE)]]
        for d in range(1, N + 1):
            acc = {}
            get = acc.get
            for j in range(1, d + 1):
                Ed = E[d - j]
                if not Ed or not P[j]:
                    continue
                for kp, cp in P[j]:
                    cpj = cp * j
                    for ke, ce in Ed:
                        k = kp + ke
                        acc[k] = get(k, ZERO) + cpj * ce
            E.append([(k, c / d) for k, c in acc.items() if c])
        terms = {k: c for bucket in E for k, c in bucket}
        return Jet._make(self.nvars, N, terms, self.exact and not self._terms)

    def diff(self, var):
        n = self.nvars
        if not 0 <= var < n:
            raise IndexError(f"variable {var} out of range for {n} variables")
        shifts, degshift, units = _layout(n)
        s, unit = shifts[var], units[var]
        out = {}
        for k, c in self._terms.items():
            e = (k >> s) & MASK
            if e:
                out[k - unit] = c * e
        order = max(self.order - 1, 0)
        return Jet._clean(n, order, out, self.exact)

    def antiderivative(self, var):
        n = self.nvars
        if not 0 <= var < n:
            raise IndexError(f"variable {var} out of range for {n} variables")
        shifts, degshift, units = _layout(n)
        s, unit = shifts[var], units[var]
        out = {k + unit: c / (((k >> s) & MASK) + 1) for k, c in self._terms.items()}
        return Jet._make(n, self.order + 1, out, self.exact)

    def compose(self, args):
        """Substitute ``args[i]`` for ``x_i``; every argument must vanish at 0."""
        args = list(args)
        if len(args) != self.nvars:
            raise NumVarsMismatch(f"expected {self.nvars} arguments, got {len(args)}")
        if not args:
            raise ValueError("no arguments")
        m = args[0].nvars
        for a in args:
            if not isinstance(a, Jet) or a.nvars != m:
                raise NumVarsMismatch("composition arguments must be jets sharing nvars")
            if a.constant:
                raise NonvanishingArgument("composition argument does not vanish at the origin")
        order = min([self.order] + [a.order for a in args])
        args = [a if a.order == order else a.truncate(order) for a in args]
        n = self.nvars
        acc = {}
        get = acc.get
        cache = {(0,) * n: Jet.const(1, m, order)}

        def mono(exps):
            hit = cache.get(exps)
            if hit is not None:
                return hit
            j = max(i for i, e in enumerate(exps) if e)
            prev = list(exps)
            prev[j] -= 1
            val = mono(tuple(prev)) * args[j]
            cache[exps] = val
            return val

        arg_degs = [a.degree for a in args]
        true_degree = 0
        for exps, c in self.items():
            # arguments vanish at 0, so higher monomials only feed degrees > order
            true_degree = max(true_degree, sum(e * d for e, d in zip(exps, arg_degs)))
            if sum(exps) > order:
                continue
            for k, tc in mono(exps)._terms.items():
                acc[k] = get(k, ZERO) + c * tc
        exact = self.exact and all(a.exact for a in args) and true_degree <= order
        return Jet._make(m, order, {k: c for k, c in acc.items() if c}, exact)

    # ---- display --------------------------------------------------------
    def to_str(self, names=None):
        n = self.nvars
        if names is None:
            names = ("x", "y", "z") if n <= 3 else tuple(f"x{i + 1}" for i in range(n))
        parts = []
        for exps, c in self.items():
            q = _rational.to_fraction(c)
            mono = "*".join(
                name if e == 1 else f"{name}^{e}" for name, e in zip(names, exps) if e
            )
            if not mono:
                body = str(q)
            elif q == 1:
                body = mono
            elif q == -1:
                body = "-" + mono
            else:
                body = f"{q}*{mono}"
            parts.append(body)
        text = " + ".join(parts).replace("+ -", "- ") if parts else "0"
        return text

    def __str__(self):
        return f"{self.to_str()} + O({self.order + 1})"

    def __repr__(self):
        return f"Jet(nvars={self.nvars}, order={self.order}, {self.to_str()!r})"


# ---- functional aliases ---------------------------------------------------


def jet_add(a, b):
    return a + b


def jet_mul(a, b):
    return a * b


def jet_inv(a):
    return a.inv()


def jet_diff(a, var):
    return a.diff(var)


def jet_antiderivative(a, var):
    return a.antiderivative(var)


def jet_compose(F, args):
    return F.compose(args)


# ---- constant linear algebra ----------------------------------------------


def const_matrix_inverse(M):
    """Inverse of a square matrix of rationals, or ``None`` if singular."""
    n = len(M)
    A = [[rational(x) for x in row] + [ONE if i == j else ZERO for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col]), None)
        if piv is None:
            return None
        A[col], A[piv] = A[piv], A[col]
        p = ONE / A[col][col]
        A[col] = [x * p for x in A[col]]
        for r in range(n):
            if r != col and A[r][col]:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [row[n:] for row in A]


def const_det(M):
    n = len(M)
    A = [[rational(x) for x in row] for row in M]
    det = ONE
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col]), None)
        if piv is None:
            return ZERO
        if piv != col:
            A[col], A[piv] = A[piv], A[col]
            det = -det
        det *= A[col][col]
        p = ONE / A[col][col]
        for r in range(col + 1, n):
            if A[r][col]:
                f = A[r][col] * p
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return det


def formal_inverse(phi):
    """Compositional inverse of a formal map ``phi`` with ``phi(0) = 0``.

    Solves ``psi = L^{-1} (y - H(psi))`` by fixed-point iteration, where ``L``
    is the linear part and ``H`` the nonlinear remainder; iteration ``t`` fixes
    the degree-``t`` part, so each pass only needs order ``t``.
    """
    phi = list(phi)
    n = len(phi)
    if n == 0 or any(p.nvars != n for p in phi):
        raise NumVarsMismatch("formal_inverse needs n jets in n variables")
    if any(p.constant for p in phi):
        raise NonvanishingArgument("map does not fix the origin")
    order = min(p.order for p in phi)
    if order == 0:
        raise SingularJacobian("order 0 carries no linear part")
    units = _layout(n)[2]
    L = [[p._terms.get(units[j], ZERO) for j in range(n)] for p in phi]
    Linv = const_matrix_inverse(L)
    if Linv is None:
        raise SingularJacobian("Jacobian at the origin is singular")
    H = [p - Jet.linear(L[i], p.order) for i, p in enumerate(phi)]
    H = [h.truncate(order) for h in H]
    nonlinear = any(h._terms for h in H)

    def apply_linv(vecs, t):
        return [
            sum((v.scale(Linv[i][j]) for j, v in enumerate(vecs) if Linv[i][j]), Jet.zero(n, t))
            for i in range(n)
        ]

    y = [Jet.var(i, n, order) for i in range(n)]
    psi = [Jet.linear(row, order) for row in Linv]
    if not nonlinear:
        return psi
    for t in range(2, order + 1):
        # psi is right through degree t-1; H has valuation >= 2, so its unknown
        # degree-t part cannot reach H(psi) below degree t+1
        psi_t = [Jet._make(n, t, p._terms, False) for p in psi]
        Hpsi = [h.truncate(t).compose(psi_t) for h in H]
        psi = apply_linv([y[i].truncate(t) - Hpsi[i] for i in range(n)], t)
    # the inverse of a nonlinear polynomial map is a genuine series
    return [Jet._make(n, order, p._terms, False) for p in psi]


# ---- jet matrices -----------------------------------------------------------


class JetMatrix:
    """Rectangular matrix of jets sharing ``nvars``."""

    __slots__ = ("rows",)

    def __init__(self, rows):
        rows = [list(r) for r in rows]
        if not rows or not rows[0]:
            raise ValueError("empty matrix")
        ncols = len(rows[0])
        nv = rows[0][0].nvars
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix")
            for e in r:
                if e.nvars != nv:
                    raise NumVarsMismatch("matrix entries must share nvars")
        self.rows = rows

    @classmethod
    def identity(cls, size, nvars, order):
        return cls([[Jet.const(1 if i == j else 0, nvars, order) for j in range(size)] for i in range(size)])

    @property
    def shape(self):
        return len(self.rows), len(self.rows[0])

    @property
    def nvars(self):
        return self.rows[0][0].nvars

    @property
    def order(self):
        return min(e.order for r in self.rows for e in r)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def at_origin(self):
        return [[e.constant for e in r] for r in self.rows]

    def __matmul__(self, other):
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise ValueError("shape mismatch")
        out = []
        for i in range(n):
            row = []
            for j in range(m):
                acc = self.rows[i][0] * other.rows[0][j]
                for t in range(1, k):
                    acc = acc + self.rows[i][t] * other.rows[t][j]
                row.append(acc)
            out.append(row)
        return JetMatrix(out)

    def __eq__(self, other):
        if not isinstance(other, JetMatrix) or self.shape != other.shape:
            return False
        return all(a == b for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb))

    __hash__ = None

    def inverse(self):
        return jet_matrix_inverse(self)

    def __repr__(self):
        return f"JetMatrix({self.rows!r})"


def jet_matrix_inverse(M):
    """Gauss-Jordan over the jet ring, pivoting on units (nonzero constant term)."""
    n, m = M.shape
    if n != m:
        raise ValueError("matrix must be square")
    if const_matrix_inverse(M.at_origin()) is None:
        raise SingularAtOrigin("matrix is singular at the origin")
    order = M.order
    nv = M.nvars
    A = [[e.truncate(order) for e in row] for row in M.rows]
    B = [[Jet.const(1 if i == j else 0, nv, order) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if A[r][col].constant)
        A[col], A[piv] = A[piv], A[col]
        B[col], B[piv] = B[piv], B[col]
        p = A[col][col].inv()
        A[col] = [x * p for x in A[col]]
        B[col] = [x * p for x in B[col]]
        for r in range(n):
            if r != col and A[r][col]:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
                B[r] = [x - f * y for x, y in zip(B[r], B[col])]
    return JetMatrix(B)


def monomials(nvars, max_degree):
    """All exponent tuples of total degree <= max_degree, graded order."""
    out = []
    for d in range(max_degree + 1):
        for combo in combinations_with_replacement(range(nvars), d):
            e = [0] * nvars
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return out
