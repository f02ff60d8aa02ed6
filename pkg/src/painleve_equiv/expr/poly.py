"""Exact multivariate polynomials and rational functions over Q.

Sparse arithmetic and gcds are delegated to sympy's dict-based polynomial
rings (``sympy.polys.rings``); this module adds the pieces the rest of the
package relies on: a canonical form, automatic unification of variable sets,
fast simultaneous substitution and a grammar-conformant printer.

Symbolic parameters such as ``c`` or ``alpha`` are ordinary ring variables, so
Q(params)[x, y, ...] localised at the denominators is represented as a single
field of fractions Q(x, y, ..., params).
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

from sympy.polys.domains import QQ
from sympy.polys.euclidtools import dmp_inner_gcd
from sympy.polys.orderings import lex
from sympy.polys.polyerrors import HeuristicGCDFailed
from sympy.polys.rings import PolyRing

from ..errors import DivisionByZero

# Jet and frame coordinates come first so printed output reads naturally.
_PRIORITY = ("x", "y", "p", "a1", "a2", "a3", "a4", "a5")


def _cofactors(f, g):
    """``(h, f/h, g/h)`` with ``h = gcd(f, g)``.

    The sparse heuristic gcd gives up on some inputs; the dense routine falls
    back to subresultants.
    """
    try:
        return f.cofactors(g)
    except HeuristicGCDFailed:
        ring = f.ring
        h, a, b = dmp_inner_gcd(f.to_dense(), g.to_dense(), ring.ngens - 1, ring.domain)
        return ring.from_dense(h), ring.from_dense(a), ring.from_dense(b)


def _order_key(name):
    try:
        return (0, _PRIORITY.index(name), "")
    except ValueError:
        return (1, 0, name)


class Space:
    """An ordered set of variable names together with its polynomial ring.

    Spaces are interned: two spaces with the same names are the same object,
    and names are always stored in the canonical order.
    """

    __slots__ = ("names", "ring", "index", "__weakref__")

    def __init__(self, names):
        self.names = names
        self.ring = PolyRing(names, QQ, lex) if names else PolyRing(("_",), QQ, lex)
        self.index = {n: i for i, n in enumerate(names)}

    def __repr__(self):
        return f"Space({', '.join(self.names)})"

    def __contains__(self, name):
        return name in self.index

    def union(self, other):
        if self is other:
            return self
        return space(self.names + other.names)


@lru_cache(maxsize=None)
def _space(names):
    return Space(names)


def space(names=()):
    """Return the interned :class:`Space` over ``names`` (any iterable)."""
    return _space(tuple(sorted(set(names), key=_order_key)))


def _lift(poly, src, dst):
    """Re-embed a polynomial of ``src.ring`` in the ring of the superset ``dst``."""
    if src is dst:
        return poly
    ring = dst.ring
    if not src.names:
        return ring.ground_new(poly.LC) if poly else ring.zero
    pos = [dst.index[n] for n in src.names]
    width = len(dst.names)
    out = {}
    for mono, coeff in poly.items():
        m = [0] * width
        for j, e in zip(pos, mono):
            m[j] = e
        out[tuple(m)] = coeff
    return ring.from_dict(out)


def _to_qq(value):
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, int):
        return QQ(value)
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, Rational):
        return QQ(int(value.numerator), int(value.denominator))
    try:
        return QQ.convert(value)
    except Exception as exc:  # pragma: no cover - defensive
        raise TypeError(f"cannot use {value!r} as an exact coefficient") from exc


def _fraction(q):
    return Fraction(int(QQ.numer(q)), int(QQ.denom(q)))


class Polynomial:
    """Read-mostly view of a sparse polynomial, as exposed to callers."""

    __slots__ = ("_p", "space")

    def __init__(self, poly, sp):
        self._p = poly
        self.space = sp

    @classmethod
    def from_terms(cls, terms, names):
        """Build from ``{exponent-tuple: coefficient}`` over ``names`` (in that order)."""
        sp = space(names)
        pos = [sp.index[n] for n in names]
        out = {}
        for mono, coeff in dict(terms).items():
            if not coeff:
                continue
            m = [0] * len(sp.names)
            for j, e in zip(pos, mono):
                m[j] = e
            out[tuple(m)] = _to_qq(coeff)
        return cls(sp.ring.from_dict(out) if out else sp.ring.zero, sp)

    def terms(self):
        """``[(exponents, Fraction)]`` in decreasing lex order; no zero coefficients."""
        return [(m, _fraction(c)) for m, c in self._p.terms()]

    def degree(self, name):
        if name not in self.space.index:
            return 0 if self._p else -1
        return self._p.degree(self.space.index[name])

    def is_zero(self):
        return not self._p

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            sp = self.space.union(other.space)
            return _lift(self._p, self.space, sp) == _lift(other._p, other.space, sp)
        return NotImplemented

    def __hash__(self):
        return hash((self.space.names, frozenset(self._p.items())))

    def __repr__(self):
        return f"Polynomial({format_poly(self._p, self.space)})"


class RationalFunction:
    """Canonical quotient of two polynomials.

    Canonical form: ``gcd(num, den) = 1`` and ``den`` is monic in the lex order
    of its space. Together with interned spaces this makes equality structural;
    ``a == b`` compares the stored dictionaries after lifting to a common space.
    """

    __slots__ = ("num", "den", "space", "_hash", "_vars")

    def __init__(self, num, den, sp, _canonical=False):
        if not _canonical:
            num, den = _canon(num, den)
        self.num = num
        self.den = den
        self.space = sp
        self._hash = None
        self._vars = None

    # -- construction -------------------------------------------------------
    @classmethod
    def constant(cls, value, sp=None):
        sp = sp or space()
        ring = sp.ring
        return cls(ring.ground_new(_to_qq(value)), ring.one, sp, _canonical=True)

    @classmethod
    def variable(cls, name, sp=None):
        sp = space((name,)) if sp is None else sp
        if name not in sp.index:
            sp = sp.union(space((name,)))
        return cls(sp.ring.gens[sp.index[name]], sp.ring.one, sp, _canonical=True)

    @classmethod
    def from_polynomial(cls, poly):
        return cls(poly._p, poly.space.ring.one, poly.space, _canonical=True)

    @classmethod
    def coerce(cls, value):
        if isinstance(value, RationalFunction):
            return value
        return cls.constant(value)

    # -- inspection ---------------------------------------------------------
    @property
    def numerator(self):
        return Polynomial(self.num, self.space)

    @property
    def denominator(self):
        return Polynomial(self.den, self.space)

    def is_zero(self):
        return not self.num

    def is_constant(self):
        return self.num.is_ground and self.den.is_ground

    def is_polynomial(self):
        return self.den.is_ground

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("not a constant")
        if not self.num:
            return Fraction(0)
        return _fraction(self.num.LC) / _fraction(self.den.LC)

    def variables(self):
        """Names that actually occur (not merely declared in the space)."""
        if self._vars is None:
            used = set()
            for poly in (self.num, self.den):
                for mono in poly.itermonoms():
                    for i, e in enumerate(mono):
                        if e:
                            used.add(self.space.names[i])
            self._vars = frozenset(used)
        return self._vars

    def depends_on(self, name):
        return name in self.variables()

    def degree(self, name):
        """Degree of the numerator in ``name`` (``-1`` for the zero function)."""
        if not self.num:
            return -1
        if name not in self.space.index:
            return 0
        return self.num.degree(self.space.index[name])

    def coefficients(self, names):
        """Split the numerator by monomials in ``names``.

        Returns ``{exponents: Polynomial-in-the-remaining-variables}`` where
        exponents follow the order of ``names``.
        """
        idx = [self.space.index.get(n) for n in names]
        groups = {}
        for mono, coeff in self.num.items():
            key = tuple(mono[i] if i is not None else 0 for i in idx)
            rest = list(mono)
            for i in idx:
                if i is not None:
                    rest[i] = 0
            groups.setdefault(key, {})[tuple(rest)] = coeff
        ring = self.space.ring
        return {k: Polynomial(ring.from_dict(v), self.space) for k, v in groups.items()}

    # -- coercion helpers ---------------------------------------------------
    def _pair(self, other):
        if not isinstance(other, RationalFunction):
            other = RationalFunction.constant(other, self.space)
        if other.space is self.space:
            return self.num, self.den, other.num, other.den, self.space
        sp = self.space.union(other.space)
        return (
            _lift(self.num, self.space, sp),
            _lift(self.den, self.space, sp),
            _lift(other.num, other.space, sp),
            _lift(other.den, other.space, sp),
            sp,
        )

    def lift(self, sp):
        """Same function viewed in the larger space ``sp``."""
        if sp is self.space:
            return self
        sp = self.space.union(sp)
        return RationalFunction(
            _lift(self.num, self.space, sp), _lift(self.den, self.space, sp), sp, _canonical=True
        )

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, (RationalFunction, int, Fraction, Rational)):
            return NotImplemented
        a, b, c, d, sp = self._pair(other)
        if not a:
            return RationalFunction(c, d, sp, _canonical=True)
        if not c:
            return RationalFunction(a, b, sp, _canonical=True)
        if b == d:
            return RationalFunction(a + c, b, sp)
        if b.is_ground:
            return RationalFunction(a * d + c * b, b * d, sp)
        if d.is_ground:
            return RationalFunction(a * d + c * b, b * d, sp)
        g, bb, dd = _cofactors(b, d)
        return RationalFunction(a * dd + c * bb, b * dd, sp)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, self.space, _canonical=True)

    def __sub__(self, other):
        if not isinstance(other, (RationalFunction, int, Fraction, Rational)):
            return NotImplemented
        return self + (-RationalFunction.coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, (RationalFunction, int, Fraction, Rational)):
            return NotImplemented
        a, b, c, d, sp = self._pair(other)
        if not a or not c:
            return RationalFunction(sp.ring.zero, sp.ring.one, sp, _canonical=True)
        # cross cancellation keeps the intermediate sizes down
        if not d.is_ground:
            _, a, d = _cofactors(a, d)
        if not b.is_ground:
            _, c, b = _cofactors(c, b)
        num, den = a * c, b * d
        lc = den.LC
        if lc != 1:
            num = num.quo_ground(lc)
            den = den.quo_ground(lc)
        return RationalFunction(num, den, sp, _canonical=True)

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise DivisionByZero("inverse of the zero rational function")
        return RationalFunction(self.den, self.num, self.space)

    def __truediv__(self, other):
        if not isinstance(other, (RationalFunction, int, Fraction, Rational)):
            return NotImplemented
        other = RationalFunction.coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return RationalFunction.coerce(other) * self.inverse()

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        return RationalFunction(self.num**k, self.den**k, self.space, _canonical=True)

    # -- calculus -----------------------------------------------------------
    def diff(self, name):
        """Exact partial derivative with respect to ``name``."""
        if name not in self.space.index or not self.num:
            return RationalFunction.constant(0, self.space)
        i = self.space.index[name]
        ring = self.space.ring
        x = ring.gens[i]
        if self.den.is_ground:
            return RationalFunction(self.num.diff(x), self.den, self.space, _canonical=True)
        dn = self.num.diff(x)
        dd = self.den.diff(x)
        if not dd:
            return RationalFunction(dn, self.den, self.space)
        # (n'd - nd')/d^2 with the common factor gcd(d, d') removed first
        g, d1, dd1 = _cofactors(self.den, dd)
        return RationalFunction(dn * d1 - self.num * dd1, self.den * d1, self.space)

    def subs(self, bindings):
        """Simultaneous substitution of rational functions (or numbers) for variables."""
        live = {}
        for name, value in bindings.items():
            if name in self.space.index and self.depends_on(name):
                live[name] = RationalFunction.coerce(value)
        if not live:
            return self
        powers = {n: {1: v} for n, v in live.items()}
        num = _evaluate(self.num, self.space, live, powers)
        den = _evaluate(self.den, self.space, live, powers)
        if den.is_zero():
            raise DivisionByZero("denominator vanishes identically after substitution")
        return num / den

    # -- comparison ---------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, RationalFunction):
            if other.space is self.space:
                return self.num == other.num and self.den == other.den
            a, b, c, d, _ = self._pair(other)
            return a == c and b == d
        if isinstance(other, (int, Fraction, Rational)) and not isinstance(other, bool):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            used = sorted(self.variables(), key=_order_key)
            sp = space(used)
            if sp is self.space:
                n, d = self.num, self.den
            else:
                pos = [self.space.index[u] for u in used]
                n = {tuple(m[i] for i in pos): c for m, c in self.num.items()}
                d = {tuple(m[i] for i in pos): c for m, c in self.den.items()}
            self._hash = hash((tuple(used), frozenset(dict(n).items()), frozenset(dict(d).items())))
        return self._hash

    def __bool__(self):
        return bool(self.num)

    def __repr__(self):
        return f"RationalFunction({self})"

    def __str__(self):
        return format_rational(self)


def _canon(num, den):
    if not den:
        raise DivisionByZero("zero denominator")
    ring = den.ring
    if not num:
        return ring.zero, ring.one
    if not den.is_ground:
        _, num, den = _cofactors(num, den)
    lc = den.LC
    if lc != 1:
        num = num.quo_ground(lc)
        den = den.quo_ground(lc)
    return num, den


def _evaluate(poly, sp, vals, powers):
    """Evaluate ``poly`` at ``vals`` by grouping monomials in the bound variables.

    Every partial product is kept canonical, which avoids the expression swell
    of clearing all denominators at once.
    """
    names = list(vals)
    idx = [sp.index[n] for n in names]
    groups = {}
    for mono, coeff in poly.items():
        key = tuple(mono[i] for i in idx)
        rest = list(mono)
        for i in idx:
            rest[i] = 0
        groups.setdefault(key, {})[tuple(rest)] = coeff

    def power(n, k):
        table = powers[n]
        if k not in table:
            half = power(n, k // 2)
            sq = half * half
            table[k] = sq * vals[n] if k % 2 else sq
        return table[k]

    terms = []
    for key, rest in groups.items():
        term = RationalFunction(sp.ring.from_dict(rest), sp.ring.one, sp, _canonical=True)
        for n, k in zip(names, key):
            if k:
                term = term * power(n, k)
        terms.append(term)
    return rf_sum(terms)


# -- printing ---------------------------------------------------------------

def _format_coeff(c):
    f = _fraction(c)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def format_poly(poly, sp):
    if not poly:
        return "0"
    pieces = []
    for mono, coeff in poly.terms():
        factors = []
        for name, e in zip(sp.names, mono):
            if e == 1:
                factors.append(name)
            elif e:
                factors.append(f"{name}^{e}")
        neg = coeff < 0
        c = -coeff if neg else coeff
        cs = _format_coeff(c)
        if factors:
            body = "*".join(factors) if c == 1 else cs + "*" + "*".join(factors)
        else:
            body = cs
        pieces.append((neg, body))
    first_neg, first = pieces[0]
    out = ("-" if first_neg else "") + first
    for neg, body in pieces[1:]:
        out += (" - " if neg else " + ") + body
    return out


def _needs_parens(poly):
    if len(poly) > 1:
        return True
    if len(poly) == 1:
        (mono, coeff), = poly.items()
        f = _fraction(coeff)
        return f.denominator != 1 or f < 0
    return False


_ATOM = re.compile(r"^[A-Za-z0-9_]+(\^[0-9]+)?$")


def format_rational(rf):
    num = format_poly(rf.num, rf.space)
    if rf.den == rf.space.ring.one:
        return num
    den = format_poly(rf.den, rf.space)
    if _needs_parens(rf.num):
        num = f"({num})"
    if not _ATOM.match(den):
        den = f"({den})"
    return f"{num}/{den}"


def rf_sum(items):
    """Sum of many rational functions, grouping equal denominators first."""
    items = [i for i in items if not i.is_zero()]
    if not items:
        return RationalFunction.constant(0)
    sp = items[0].space
    for it in items[1:]:
        sp = sp.union(it.space)
    groups = {}
    for it in items:
        it = it.lift(sp)
        key = it.den
        if key in groups:
            groups[key] = groups[key] + it.num
        else:
            groups[key] = it.num
    parts = [RationalFunction(n, d, sp) for d, n in groups.items() if n]
    if not parts:
        return RationalFunction.constant(0, sp)
    while len(parts) > 1:
        nxt = [parts[i] + parts[i + 1] for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
    return parts[0]
