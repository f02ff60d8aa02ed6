"""Group-parameter normalization.

Each scheme is a list of equations between derived invariants and constants.
They are solved one at a time for a designated frame variable; the solver
accepts equations that are linear in that unknown, or binomial
(``c_n u^n + c_0 = 0``, which adjoins a radical generator). Anything else is
reported as :class:`NonTriangular`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from sympy import factor_list, gcd_list

from .errors import (
    BranchViolation,
    DivisionByZero,
    NonTriangular,
    ResidualFrameVariable,
    UnsupportedConstraintSystem,
)
from .expr import ExtensionElement, RationalFunction, substitute
from .expr.tower import EMPTY_TOWER, RadicalTower
from .invariants import (
    DerivationSet,
    InvariantWord,
    WordEvaluator,
    builtin_derivations_fiber,
    fiber_bases,
    fundamental_fiber,
    point_bases,
    word,
)
from .jet import ODE

EXTRA = "*"  # placeholder unknown: the table's single non-standard coordinate

# Diagonal entries of the structure matrix; these never vanish, so factors
# that are pure powers of them can be dropped from an equation.
NONZERO = {"fiber": frozenset({"a1", "a4"}), "point": frozenset({"a1", "a3", "a5"})}


@dataclass(frozen=True)
class SchemeEquation:
    """``W(word) = value`` or, with ``denominator``, ``W(word)/W(denominator) = value``."""

    word: InvariantWord
    value: Fraction
    unknown: str
    denominator: Optional[InvariantWord] = None

    def residual(self, W):
        lhs = W(self.word)
        if self.denominator is None:
            return lhs - self.value
        return lhs - W(self.denominator) * self.value

    def render(self, symbol):
        def name(w):
            return f"{symbol}_{{{w}}}" if w.indices else f"{symbol}_{w.base}"

        v = self.value
        vtext = str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
        lhs = name(self.word)
        if self.denominator is not None:
            lhs = f"{lhs}/{name(self.denominator)}"
        return f"{lhs} = {vtext}"


def _eq(w, value, unknown, den=None):
    return SchemeEquation(word(w), Fraction(value), unknown, word(den) if den else None)


@dataclass(frozen=True)
class NormalizationScheme:
    target: str
    problem: str
    equations: tuple
    scale: Fraction = Fraction(1)

    @property
    def symbol(self):
        return "I" if self.problem == "fiber" else "K"

    def describe(self):
        return ", ".join(e.render(self.symbol) for e in self.equations)


FIBER_P1 = NormalizationScheme(
    "P1",
    "fiber",
    (_eq("1", -12, "a1"), _eq("1;3", 0, "a2"), _eq("1;333", 1, "a4", "1;33")),
)

FIBER_P2 = NormalizationScheme(
    "P2",
    "fiber",
    (_eq("1", -12, "a1"), _eq("1;3", -12, "a2"), _eq("1;31", 0, "a4")),
)

# The point invariants are evaluated as K' = -K/6 (see the README section on
# conventions); with that scale the usual normalization values apply.
_POINT_HEAD = (
    _eq("1", -12, "a1"),
    _eq("2", 0, "a4"),
    _eq("1;1", 0, EXTRA),
    _eq("1;3", 0, "a2"),
)

POINT_P1 = NormalizationScheme(
    "P1", "point", _POINT_HEAD + (_eq("1;33", 720, "a5", "1;333"),), Fraction(-1, 6)
)
POINT_P2 = NormalizationScheme(
    "P2", "point", _POINT_HEAD + (_eq("2;3", Fraction(-5, 24), "a5", "1;31"),), Fraction(-1, 6)
)

SCHEMES = {
    ("P1", "fiber"): FIBER_P1,
    ("P2", "fiber"): FIBER_P2,
    ("P2a0", "fiber"): FIBER_P2,
    ("P1", "point"): POINT_P1,
    ("P2", "point"): POINT_P2,
    ("P2a0", "point"): POINT_P2,
}


def scheme_for(target, problem) -> NormalizationScheme:
    return SCHEMES[(target, problem)]


# -- branch conditions -------------------------------------------------------


def check_branch(f: ODE, problem: str):
    if problem == "fiber":
        inv = fundamental_fiber(f)
        if not (inv["I2"].is_zero() and inv["I3"].is_zero()):
            raise BranchViolation("I2 and I3 do not both vanish identically")
    else:
        if not f.partial("pppp").is_zero():
            raise BranchViolation("f is not a polynomial of degree at most 3 in p")


# -- solving -----------------------------------------------------------------


@dataclass(frozen=True)
class NormalizedInvariant:
    word: InvariantWord
    value: ExtensionElement
    frame: tuple = ()

    def __post_init__(self):
        left = sorted(self.value.variables() & set(self.frame))
        if left:
            raise ResidualFrameVariable(f"{self.word} still depends on {left}")


@dataclass
class FrameSolution:
    f: ODE
    scheme: NormalizationScheme
    values: dict
    tower: RadicalTower
    evaluator: WordEvaluator
    frame: tuple
    _norm: dict = field(default_factory=dict, repr=False)

    def normalized(self, w) -> NormalizedInvariant:
        w = word(w)
        if w not in self._norm:
            raw = self.evaluator(w)
            val = substitute(raw, self.values, self.tower)
            if val.tower is not self.tower:
                val = val.lift(self.tower)
            self._norm[w] = NormalizedInvariant(w, val, self.frame)
        return self._norm[w]

    def value(self, w) -> ExtensionElement:
        return self.normalized(w).value

    def residuals(self):
        """Scheme equations after substitution; all zero for a valid solution."""
        return [substitute(e.residual(self.evaluator), self.values, self.tower) for e in self.scheme.equations]


def _evaluator(f, scheme, derivs):
    bases = fiber_bases(f) if scheme.problem == "fiber" else point_bases(f)
    if scheme.scale != 1:
        bases = {k: v * scheme.scale for k, v in bases.items()}
    return WordEvaluator(f, derivs, bases)


def _resolve_unknowns(scheme, derivs):
    frame = derivs.frame_variables()
    named = {e.unknown for e in scheme.equations if e.unknown != EXTRA}
    extra = [c for c in frame if c not in named and c != "a3"]
    out = []
    for e in scheme.equations:
        if e.unknown != EXTRA:
            out.append(e.unknown)
            continue
        if len(extra) != 1:
            raise NonTriangular(f"expected exactly one extra coordinate, found {extra}")
        out.append(extra[0])
    return out, frame


def solve_frame(f: ODE, scheme: NormalizationScheme, derivs: DerivationSet | None = None) -> FrameSolution:
    """Solve the scheme equations in order for their unknowns."""
    if derivs is None:
        derivs = builtin_derivations_fiber()
    check_branch(f, scheme.problem)
    unknowns, frame = _resolve_unknowns(scheme, derivs)
    W = _evaluator(f, scheme, derivs)
    tower = EMPTY_TOWER
    values = {}
    for eq, u in zip(scheme.equations, unknowns):
        raw = eq.residual(W)
        expr = substitute(raw, values, tower) if values else ExtensionElement.from_base(raw, tower)
        nz = u in NONZERO[scheme.problem]
        tower, sol = _solve_one(expr, u, tower, eq.render(scheme.symbol), nz)
        for k in list(values):
            values[k] = substitute(values[k], {u: sol}, tower)
        values[u] = sol
    return FrameSolution(f, scheme, values, tower, W, frame)


def normalized(w, f: ODE, scheme: NormalizationScheme, derivs=None) -> NormalizedInvariant:
    return solve_frame(f, scheme, derivs).normalized(w)


def _collect(expr: ExtensionElement, u: str):
    """Clear u-dependent denominators and group by powers of ``u``."""
    dens = {}
    for c in expr.terms.values():
        if c.depends_on(u):
            dens.setdefault(c.den, RationalFunction(c.den, c.den.ring.one, c.space, _canonical=True))
    for d in dens.values():
        expr = expr.scale(d)
    groups = {}
    for gexp, c in expr.terms.items():
        inv_den = RationalFunction(c.den.ring.one, c.den, c.space, _canonical=True)
        for (k,), poly in c.coefficients([u]).items():
            coef = RationalFunction.from_polynomial(poly) * inv_den
            groups.setdefault(k, {}).setdefault(gexp, []).append(coef)
    return {k: ExtensionElement._from_lists(expr.tower, g) for k, g in groups.items()}


def _solve_one(expr: ExtensionElement, u: str, tower: RadicalTower, label: str, nonzero: bool):
    if expr.is_zero():
        raise DivisionByZero(f"{label} holds identically; {u} cannot be normalized")
    groups = {k: v for k, v in _collect(expr, u).items() if not v.is_zero()}
    low = min(groups)
    if low and not nonzero:
        if len(groups) == 1:
            return tower, ExtensionElement.zero(tower)
        raise NonTriangular(f"{label} has the root {u} = 0 besides others")
    groups = {k - low: v for k, v in groups.items()}
    degs = sorted(groups)
    if degs == [0]:
        raise DivisionByZero(f"{label}: the coefficient of {u} vanishes identically")
    if len(degs) != 2:
        raise NonTriangular(f"{label} is not linear or binomial in {u}")
    n = degs[1]
    rhs = -groups[0] * groups[n].inverse()
    if n == 1:
        return tower, rhs
    name = f"{u}_root"
    new = tower.adjoin(name, n, rhs)
    return new, new.gen(name)


# -- necessary conditions on parameters -------------------------------------


@dataclass(frozen=True)
class ParameterConstraint:
    """Admissible values of the single parameter ``name``; ``values is None`` means all."""

    name: Optional[str]
    values: Optional[frozenset]
    system: tuple = ()

    @property
    def unconstrained(self):
        return self.values is None

    def describe(self):
        if self.name is None:
            return "no constraints computed"
        if self.values is None:
            return f"admissible {self.name}: all values"
        vals = ", ".join(_fmt(v) for v in sorted(self.values))
        return f"admissible {self.name}: {{{vals}}}"


def _fmt(v):
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _numerators(inv):
    if isinstance(inv, NormalizedInvariant):
        inv = inv.value
    if isinstance(inv, ExtensionElement):
        return [c for c in inv.terms.values()]
    return [RationalFunction.coerce(inv)]


def parameter_constraints(inv, params: Iterable[str]) -> ParameterConstraint:
    """Parameter values for which ``inv`` can vanish identically in every other variable."""
    params = sorted(set(params))
    rfs = [r for r in _numerators(inv) if not r.is_zero()]
    if not params:
        if rfs:
            return ParameterConstraint(None, frozenset(), ())
        return ParameterConstraint(None, None, ())
    system = []
    for r in rfs:
        others = sorted(r.variables() - set(params))
        for poly in r.coefficients(others).values():
            if not poly.is_zero():
                system.append(poly)
    if not system:
        return ParameterConstraint(params[0] if len(params) == 1 else None, None, ())
    used = set()
    for poly in system:
        used |= RationalFunction.from_polynomial(poly).variables()
    if len(params) > 1 and len(used) > 1:
        raise UnsupportedConstraintSystem("several parameters in the coefficient system", tuple(system))
    name = params[0] if len(params) == 1 else (sorted(used)[0] if used else None)
    exprs = [poly._p.as_expr() for poly in system]
    g = gcd_list(exprs)
    if not g.free_symbols:
        return ParameterConstraint(name, frozenset(), tuple(system))
    _, factors = factor_list(g)
    roots = set()
    for fac, _mult in factors:
        if len(fac.free_symbols) != 1:
            raise UnsupportedConstraintSystem("coefficient system is not univariate", tuple(system))
        poly = fac.as_poly()
        if poly.degree() != 1:
            raise UnsupportedConstraintSystem(f"irrational roots of {fac}", tuple(system))
        a, b = poly.all_coeffs()
        roots.add(-Fraction(int(b.p), int(b.q)) / Fraction(int(a.p), int(a.q)))
    return ParameterConstraint(name, frozenset(roots), tuple(system))
