"""Radical towers and their elements.

A tower adjoins generators one at a time, ``u_i^d_i = R_i`` with ``R_i`` an
element of the tower built so far. Elements are finite sums
``sum c_e * u_1^e_1 ... u_k^e_k`` with rational-function coefficients and every
``e_i < d_i``. Generators are never replaced by a chosen root; the relation is
carried along and printed, and root choice is left to the caller
(see :meth:`RadicalTower.specialize`).
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

from sympy import integer_nthroot

from ..errors import DivisionByZero, NonInvertible
from .poly import RationalFunction, _fraction, format_rational, rf_sum


class RadicalTower:
    """Immutable chain of radical extensions. Build with :meth:`adjoin`."""

    __slots__ = ("gens", "degrees", "relations", "_prefixes", "_logd", "_hash")

    def __init__(self):
        self.gens = ()
        self.degrees = ()
        self.relations = ()
        self._prefixes = ()
        self._logd = {}
        self._hash = None

    def __len__(self):
        return len(self.gens)

    @property
    def degree(self):
        """Product of the generator degrees."""
        out = 1
        for d in self.degrees:
            out *= d
        return out

    def adjoin(self, name, degree, rhs):
        """New tower with ``name^degree = rhs`` appended."""
        if degree < 2:
            raise ValueError("generator degree must be at least 2")
        if name in self.gens:
            raise ValueError(f"generator {name!r} already in the tower")
        rhs = ExtensionElement.coerce(rhs, self)
        if rhs.is_zero():
            raise DivisionByZero(f"relation {name}^{degree} = 0 is degenerate")
        if rhs.tower is not self:
            rhs = rhs.lift(self)
        for c in rhs.terms.values():
            if name in c.variables():
                raise ValueError(f"relation for {name!r} mentions a base variable of the same name")
        t = RadicalTower()
        t.gens = self.gens + (name,)
        t.degrees = self.degrees + (int(degree),)
        t.relations = self.relations + (rhs,)
        t._prefixes = self._prefixes + (self,)
        return t

    def prefix(self, k):
        """The tower formed by the first ``k`` generators."""
        if k == len(self.gens):
            return self
        return self._prefixes[k]

    def is_prefix_of(self, other):
        k = len(self.gens)
        return k <= len(other.gens) and (other.prefix(k) is self or other.prefix(k) == self)

    def index(self, name):
        return self.gens.index(name)

    def gen(self, name):
        """The generator ``name`` as an element."""
        i = self.gens.index(name)
        e = tuple(1 if j == i else 0 for j in range(len(self.gens)))
        return ExtensionElement(self, {e: RationalFunction.constant(1)})

    def relation_rhs(self, name):
        """``R_i`` lifted to this tower."""
        i = self.gens.index(name)
        return self.relations[i].lift(self)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, RadicalTower):
            return NotImplemented
        return (
            self.gens == other.gens
            and self.degrees == other.degrees
            and all(a.terms == b.terms for a, b in zip(self.relations, other.relations))
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.gens, self.degrees))
        return self._hash

    def __repr__(self):
        if not self.gens:
            return "RadicalTower()"
        return "RadicalTower(" + "; ".join(self.describe()) + ")"

    def describe(self):
        """``['ybar^5 = ...', ...]`` in adjunction order."""
        return [f"{g}^{d} = {r}" for g, d, r in zip(self.gens, self.degrees, self.relations)]

    # -- calculus support ---------------------------------------------------
    def _log_derivative(self, i, name):
        """``d(u_i)/u_i = dR_i / (d_i R_i)``, an element of ``prefix(i)``."""
        key = (i, name)
        if key not in self._logd:
            base = self.prefix(i)
            r = self.relations[i]
            dr = r.diff(name)
            if dr.is_zero():
                val = ExtensionElement.zero(base)
            else:
                val = dr * (r * self.degrees[i]).inverse()
            self._logd[key] = val
        return self._logd[key]

    # -- branch handling ----------------------------------------------------
    def base_roots(self, name):
        """Rational-function roots of ``u^d = R`` when ``R`` is a base element.

        Only real rational roots are found: one for odd ``d`` and zero or two
        (``±r``) for even ``d``. Used for branch splitting in verification.
        """
        i = self.gens.index(name)
        r = self.relations[i]
        if not r.in_base():
            return []
        root = rational_root(r.base_part(), self.degrees[i])
        if root is None:
            return []
        if self.degrees[i] % 2:
            return [root]
        return [root, -root]

    def specialize(self, name, value):
        """Fix generator ``name`` to ``value`` (an element of the tower below it).

        Returns ``(tower, mapper)`` where ``tower`` omits ``name`` and ``mapper``
        sends elements of ``self`` to elements of the new tower.
        """
        i = self.gens.index(name)
        below = self.prefix(i)
        value = ExtensionElement.coerce(value, below)
        if value.tower is not below:
            value = value.lift(below)
        new = below
        mapped_rel = []
        for j in range(i + 1, len(self.gens)):
            rel = _map_element(self.relations[j], i, value, new)
            mapped_rel.append(rel)
            new = new.adjoin(self.gens[j], self.degrees[j], rel)
        target = new

        def mapper(el):
            el = ExtensionElement.coerce(el, self)
            if el.tower is not self:
                el = el.lift(self)
            return _map_element(el, i, value, target)

        return target, mapper


EMPTY_TOWER = RadicalTower()


def _map_element(el, i, value, target):
    """Replace generator ``i`` of ``el.tower`` by ``value``; result lives in ``target``."""
    k = len(target.gens)
    acc = {}
    vpow = {0: ExtensionElement.one(target)}
    for e, c in el.terms.items():
        ei = e[i] if i < len(e) else 0
        rest = e[:i] + e[i + 1 :]
        rest = rest + (0,) * (k - len(rest))
        mono = ExtensionElement(target, {rest: c})
        if ei not in vpow:
            vpow[ei] = value.lift(target) ** ei
        part = mono * vpow[ei]
        for ee, cc in part.terms.items():
            acc.setdefault(ee, []).append(cc)
    return ExtensionElement._from_lists(target, acc)


def rational_root(rf, d):
    """Exact ``d``-th root of a rational function when one exists over Q, else ``None``."""
    if rf.is_zero():
        return rf
    parts = []
    for poly in (rf.num, rf.den):
        coeff, factors = poly.sqf_list()
        c = _fraction(coeff)
        if c < 0:
            if d % 2 == 0:
                return None
            sign = -1
            c = -c
        else:
            sign = 1
        rn, okn = integer_nthroot(c.numerator, d)
        rd, okd = integer_nthroot(c.denominator, d)
        if not (okn and okd):
            return None
        acc = poly.ring.ground_new(poly.ring.domain(sign * int(rn), int(rd)))
        for f, k in factors:
            if k % d:
                return None
            acc = acc * f ** (k // d)
        parts.append(acc)
    return RationalFunction(parts[0], parts[1], rf.space)


class ExtensionElement:
    """Reduced element of a :class:`RadicalTower`."""

    __slots__ = ("tower", "terms")

    def __init__(self, tower, terms):
        self.tower = tower
        self.terms = terms

    # -- construction -------------------------------------------------------
    @classmethod
    def zero(cls, tower=EMPTY_TOWER):
        return cls(tower, {})

    @classmethod
    def one(cls, tower=EMPTY_TOWER):
        return cls(tower, {(0,) * len(tower.gens): RationalFunction.constant(1)})

    @classmethod
    def from_base(cls, rf, tower=EMPTY_TOWER):
        rf = RationalFunction.coerce(rf)
        if rf.is_zero():
            return cls(tower, {})
        return cls(tower, {(0,) * len(tower.gens): rf})

    @classmethod
    def coerce(cls, value, tower=EMPTY_TOWER):
        if isinstance(value, ExtensionElement):
            return value
        if isinstance(value, (RationalFunction, int, Fraction, Rational)):
            return cls.from_base(value, tower)
        raise TypeError(f"cannot coerce {type(value).__name__} into an extension element")

    @classmethod
    def _from_lists(cls, tower, acc):
        out = {}
        for e, cs in acc.items():
            s = cs[0] if len(cs) == 1 else rf_sum(cs)
            if not s.is_zero():
                out[e] = s
        return cls(tower, out)

    def lift(self, tower):
        """View ``self`` in a tower having ``self.tower`` as a prefix."""
        if tower is self.tower:
            return self
        if not self.tower.is_prefix_of(tower):
            raise ValueError("element does not live in a prefix of the requested tower")
        pad = (0,) * (len(tower.gens) - len(self.tower.gens))
        return ExtensionElement(tower, {e + pad: c for e, c in self.terms.items()})

    # -- inspection ---------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def in_base(self):
        """True when no generator occurs."""
        return all(not any(e) for e in self.terms)

    def base_part(self):
        """Coefficient of the trivial monomial."""
        return self.terms.get((0,) * len(self.tower.gens), RationalFunction.constant(0))

    def coefficient(self, exps):
        return self.terms.get(tuple(exps), RationalFunction.constant(0))

    def variables(self):
        out = set()
        for c in self.terms.values():
            out |= c.variables()
        return out

    def generators_used(self):
        used = set()
        for e in self.terms:
            for g, k in zip(self.tower.gens, e):
                if k:
                    used.add(g)
        return used

    # -- arithmetic ---------------------------------------------------------
    def _pair(self, other):
        if not isinstance(other, ExtensionElement):
            other = ExtensionElement.coerce(other, self.tower)
        a, b = self, other
        if a.tower is b.tower:
            return a, b, a.tower
        if a.tower.is_prefix_of(b.tower):
            return a.lift(b.tower), b, b.tower
        if b.tower.is_prefix_of(a.tower):
            return a, b.lift(a.tower), a.tower
        raise ValueError("operands live in unrelated towers")

    def __add__(self, other):
        if not isinstance(other, (ExtensionElement, RationalFunction, int, Fraction, Rational)):
            return NotImplemented
        a, b, t = self._pair(other)
        out = dict(a.terms)
        for e, c in b.terms.items():
            if e in out:
                s = out[e] + c
                if s.is_zero():
                    del out[e]
                else:
                    out[e] = s
            else:
                out[e] = c
        return ExtensionElement(t, out)

    __radd__ = __add__

    def __neg__(self):
        return ExtensionElement(self.tower, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, (ExtensionElement, RationalFunction, int, Fraction, Rational)):
            return NotImplemented
        return self + (-ExtensionElement.coerce(other, self.tower))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, rf):
        """Multiply by a base rational function (no reduction needed)."""
        rf = RationalFunction.coerce(rf)
        if rf.is_zero():
            return ExtensionElement(self.tower, {})
        return ExtensionElement(self.tower, {e: c * rf for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (RationalFunction, int, Fraction, Rational)):
            return self.scale(other)
        if not isinstance(other, ExtensionElement):
            return NotImplemented
        a, b, t = self._pair(other)
        if not a.terms or not b.terms:
            return ExtensionElement(t, {})
        if len(b.terms) == 1 and not any(next(iter(b.terms))):
            return a.scale(next(iter(b.terms.values())))
        if len(a.terms) == 1 and not any(next(iter(a.terms))):
            return b.scale(next(iter(a.terms.values())))
        acc = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                _reduce_into(acc, e, c1 * c2, t)
        return ExtensionElement._from_lists(t, acc)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = ExtensionElement.one(self.tower)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def inverse(self):
        """Multiplicative inverse; ``NonInvertible`` for zero divisors."""
        if not self.terms:
            raise DivisionByZero("inverse of the zero element")
        t = self.tower
        top = -1
        for e in self.terms:
            for i in range(len(e) - 1, -1, -1):
                if e[i]:
                    top = max(top, i)
                    break
        if top < 0:
            return ExtensionElement.from_base(self.base_part().inverse(), t)
        below = t.prefix(top)
        # view self as a univariate polynomial in u_top over the tower below it
        coeffs = {}
        for e, c in self.terms.items():
            k = e[top]
            coeffs.setdefault(k, {})[e[:top]] = c
        a = {k: ExtensionElement(below, v) for k, v in coeffs.items()}
        d = t.degrees[top]
        m = {d: ExtensionElement.one(below), 0: -t.relations[top]}
        inv = _univariate_inverse(a, m, below)
        out = {}
        pad = (0,) * (len(t.gens) - top - 1)
        for k, el in inv.items():
            for e, c in el.terms.items():
                out[e + (k,) + pad] = c
        result = ExtensionElement(t, out)
        return result

    def __truediv__(self, other):
        if isinstance(other, (RationalFunction, int, Fraction, Rational)):
            return self.scale(RationalFunction.coerce(other).inverse())
        if not isinstance(other, ExtensionElement):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return ExtensionElement.coerce(other, self.tower) * self.inverse()

    # -- calculus -----------------------------------------------------------
    def diff(self, name):
        """Partial derivative in the base variable ``name``.

        Uses ``du_i = u_i * dR_i / (d_i R_i)``, which follows from differentiating
        the relation ``u_i^d_i = R_i``.
        """
        t = self.tower
        acc = {}
        logs = {}
        for e, c in self.terms.items():
            dc = c.diff(name)
            if not dc.is_zero():
                acc.setdefault(e, []).append(dc)
            for i, ei in enumerate(e):
                if not ei:
                    continue
                if i not in logs:
                    logs[i] = t._log_derivative(i, name).lift(t)
                w = logs[i]
                if w.is_zero():
                    continue
                for ew, cw in w.terms.items():
                    _reduce_into(acc, tuple(x + y for x, y in zip(e, ew)), c * cw * ei, t)
        return ExtensionElement._from_lists(t, acc)

    # -- comparison and printing -------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (ExtensionElement, RationalFunction, int, Fraction, Rational)):
            try:
                a, b, _ = self._pair(other)
            except ValueError:
                return False
            return a.terms == b.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"ExtensionElement({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        pieces = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                g if k == 1 else f"{g}^{k}" for g, k in zip(self.tower.gens, e) if k
            )
            neg = len(c.num) == 1 and c.num.LC < 0
            if neg:
                c = -c
            ctext = format_rational(c)
            if mono:
                if ctext == "1":
                    body = mono
                elif len(c.num) > 1 and c.den == c.space.ring.one:
                    body = f"({ctext})*{mono}"
                else:
                    body = f"{ctext}*{mono}"
            else:
                multi = len(self.terms) > 1 and len(c.num) > 1 and c.den == c.space.ring.one
                body = f"({ctext})" if multi else ctext
            pieces.append((neg, body))
        neg, body = pieces[0]
        out = ("-" if neg else "") + body
        for neg, body in pieces[1:]:
            out += (" - " if neg else " + ") + body
        return out


def _reduce_into(acc, e, c, tower):
    """Accumulate ``c * u^e`` into ``acc`` after reducing with the tower relations."""
    if c.is_zero():
        return
    for i in range(len(e) - 1, -1, -1):
        d = tower.degrees[i]
        if e[i] >= d:
            q, r = divmod(e[i], d)
            rel = _relation_power(tower, i, q)
            base = e[:i] + (r,) + e[i + 1 :]
            for er, cr in rel.terms.items():
                # the relation only involves generators below i
                ne = tuple(x + y for x, y in zip(base, er)) + base[len(er):]
                _reduce_into(acc, ne, c * cr, tower)
            return
    acc.setdefault(e, []).append(c)


def _relation_power(tower, i, q):
    key = ("relpow", i, q)
    cache = tower._logd
    if key not in cache:
        cache[key] = tower.relations[i] ** q
    return cache[key]


def _udeg(p):
    return max(p) if p else -1


def _uclean(p):
    return {k: v for k, v in p.items() if not v.is_zero()}


def _univariate_inverse(a, m, field):
    """Inverse of ``a`` modulo ``m`` (dicts degree -> element of ``field``)."""
    r0, r1 = _uclean(m), _uclean(a)
    s0, s1 = {}, {0: ExtensionElement.one(field)}
    while _udeg(r1) > 0:
        lead_inv = _checked_inverse(r1[_udeg(r1)])
        q = {}
        r = dict(r0)
        while r and _udeg(r) >= _udeg(r1):
            dr = _udeg(r)
            shift = dr - _udeg(r1)
            coef = r[dr] * lead_inv
            q[shift] = q.get(shift, ExtensionElement.zero(field)) + coef
            for k, v in r1.items():
                r[k + shift] = r.get(k + shift, ExtensionElement.zero(field)) - coef * v
            r = _uclean(r)
            if r and _udeg(r) == dr:
                # exact cancellation must remove the leading term
                r.pop(dr)
        prod = {}
        for i, qi in q.items():
            for j, sj in s1.items():
                prod[i + j] = prod.get(i + j, ExtensionElement.zero(field)) + qi * sj
        s_new = dict(s0)
        for k, v in prod.items():
            s_new[k] = s_new.get(k, ExtensionElement.zero(field)) - v
        r0, r1 = r1, r
        s0, s1 = s1, _uclean(s_new)
    if not r1:
        raise NonInvertible("element shares a factor with a tower relation (zero divisor)")
    c = _checked_inverse(r1[0])
    return {k: v * c for k, v in s1.items() if not (v * c).is_zero()}


def _checked_inverse(el):
    try:
        return el.inverse()
    except DivisionByZero:
        raise NonInvertible("zero leading coefficient during tower inversion") from None


def is_zero(e) -> bool:
    """Exact zero test for rational functions and tower elements."""
    if isinstance(e, (ExtensionElement, RationalFunction)):
        return e.is_zero()
    return e == 0


def differentiate(e, name):
    """Partial derivative of a rational function or tower element."""
    return e.diff(name)


def common_tower(elements):
    """Longest tower among ``elements``; all others must be prefixes of it."""
    best = EMPTY_TOWER
    for el in elements:
        if isinstance(el, ExtensionElement) and len(el.tower) > len(best):
            best = el.tower
    for el in elements:
        if isinstance(el, ExtensionElement) and not el.tower.is_prefix_of(best):
            raise ValueError("bindings live in unrelated towers")
    return best


def substitute(e, bindings, tower=None):
    """Simultaneously substitute tower elements for base variables of ``e``.

    ``bindings`` maps variable names to :class:`ExtensionElement`,
    :class:`RationalFunction` or numbers. The result is reduced in the common
    tower; an identically vanishing denominator raises :class:`DivisionByZero`.
    """
    if isinstance(e, ExtensionElement):
        acc = ExtensionElement.zero(tower or e.tower)
        parts = []
        for exps, c in e.terms.items():
            mono = ExtensionElement(e.tower, {exps: RationalFunction.constant(1)})
            parts.append(substitute(c, bindings, tower) * mono)
        for p in parts:
            acc = acc + p
        return acc
    e = RationalFunction.coerce(e)
    live = {n: v for n, v in bindings.items() if e.depends_on(n)}
    t = common_tower(list(live.values()) + ([ExtensionElement.zero(tower)] if tower else []))
    if all(not isinstance(v, ExtensionElement) or v.in_base() for v in live.values()):
        plain = {n: (v.base_part() if isinstance(v, ExtensionElement) else v) for n, v in live.items()}
        return ExtensionElement.from_base(e.subs(plain), t)
    vals = {n: ExtensionElement.coerce(v, t).lift(t) for n, v in live.items()}
    num = _eval_poly(e.num, e.space, vals, t)
    den = _eval_poly(e.den, e.space, vals, t)
    if den.is_zero():
        raise DivisionByZero("denominator vanishes identically after substitution")
    if den.in_base():
        return num.scale(den.base_part().inverse())
    return num * den.inverse()


def _eval_poly(poly, sp, vals, tower):
    names = [n for n in vals]
    idx = [sp.index[n] for n in names]
    groups = {}
    for mono, coeff in poly.items():
        key = tuple(mono[i] for i in idx)
        rest = list(mono)
        for i in idx:
            rest[i] = 0
        groups.setdefault(key, {})[tuple(rest)] = coeff
    powers = {n: {0: ExtensionElement.one(tower)} for n in names}

    def power(n, k):
        table = powers[n]
        if k not in table:
            table[k] = power(n, k - 1) * vals[n]
        return table[k]

    acc = {}
    for key, rest in groups.items():
        coef = RationalFunction(sp.ring.from_dict(rest), sp.ring.one, sp, _canonical=True)
        term = None
        for n, k in zip(names, key):
            if k:
                pw = power(n, k)
                term = pw if term is None else term * pw
        if term is None:
            acc.setdefault((0,) * len(tower.gens), []).append(coef)
            continue
        for ee, cc in term.terms.items():
            acc.setdefault(ee, []).append(cc * coef)
    return ExtensionElement._from_lists(tower, acc)


def all_branches(tower):
    """Enumerate rational root assignments for base-valued generators.

    Yields ``(tower', mapper, choices)`` triples, starting with the generic
    (unsplit) tower. After a generator is fixed, later relations may become
    base-valued (``ybar^3 = y^3*abar/alpha`` once ``abar = alpha``), so the
    search recurses on the specialised tower.
    """
    yield tower, (lambda el: el), {}
    yield from _split(tower, (lambda el: el), {})


def _split(t, mapper, choices):
    for g in t.gens:
        roots = t.base_roots(g)
        if not roots:
            continue
        i = t.gens.index(g)
        for r in roots:
            t2, mp = t.specialize(g, ExtensionElement.from_base(r, t.prefix(i)))

            def m2(el, _a=mapper, _b=mp):
                return _b(_a(el))

            c2 = dict(choices)
            c2[g] = r
            yield t2, m2, c2
            yield from _split(t2, m2, c2)
        return
