"""Candidate transformations, exact verification and verdicts."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import DerivationTableError, DivisionByZero, MissingDerivations, NonInvertible, PainleveError
from .expr import ExtensionElement, RationalFunction, substitute
from .expr.tower import EMPTY_TOWER, RadicalTower, all_branches
from .invariants import DerivationSet, builtin_derivations_fiber
from .jet import ODE, PointMap, contact_denominator, contact_numerator
from .normalization import FrameSolution, scheme_for, solve_frame
from . import numeric

YBAR = "ybar"
ABAR = "abar"


@dataclass(frozen=True)
class Target:
    key: str
    ode: ODE
    alpha: Optional[str] = None  # target parameter bound to the abar generator
    title: str = ""

    def __str__(self):
        return self.title or self.key


TARGETS = {
    "P1": Target("P1", ODE.parse("6*y^2 + x"), None, "y'' = 6*y^2 + x"),
    "P2": Target("P2", ODE.parse("2*y^3 + x*y + alpha", ["alpha"]), "alpha", "y'' = 2*y^3 + x*y + alpha"),
    "P2a0": Target("P2a0", ODE.parse("2*y^3 + x*y"), None, "y'' = 2*y^3 + x*y"),
}

_ALIASES = {"p1": "P1", "p2": "P2", "p2a0": "P2a0", "p2α0": "P2a0", "p2alpha0": "P2a0"}


def get_target(name) -> Target:
    if isinstance(name, Target):
        return name
    key = _ALIASES.get(str(name).lower(), name)
    try:
        return TARGETS[key]
    except KeyError:
        raise ValueError(f"unknown target {name!r}") from None


@dataclass(frozen=True)
class CandidateTransformation:
    target: str
    problem: str
    xbar: ExtensionElement
    ybar: ExtensionElement
    pbar: ExtensionElement
    tower: RadicalTower
    alphabar: Optional[ExtensionElement] = None

    @property
    def degree(self):
        return self.tower.degree

    def relations(self):
        return list(zip(self.tower.gens, self.tower.degrees, self.tower.relations))

    def as_dict(self):
        out = {
            "xbar": str(self.xbar),
            "pbar": str(self.pbar),
            "tower": [{"gen": g, "degree": d, "relation": str(r)} for g, d, r in self.relations()],
        }
        if self.alphabar is not None:
            out["alphabar"] = str(self.alphabar)
        return out

    def describe(self):
        lines = [f"pbar = {self.pbar}", f"xbar = {self.xbar}"]
        lines += [f"{g}^{d} = {r}" for g, d, r in self.relations()]
        return lines


def _nz(el, what):
    if el.is_zero():
        raise DivisionByZero(f"{what} vanishes identically")
    return el


def _div(a, b, what):
    _nz(b, what)
    try:
        return a * b.inverse()
    except NonInvertible:
        raise DivisionByZero(f"{what} is a zero divisor") from None


def _vals(sol: FrameSolution, *words):
    return [sol.value(w) for w in words]


def _adjoin(tower, name, degree, rhs, what):
    _nz(rhs, what)
    t = tower.adjoin(name, degree, rhs)
    return t, t.gen(name)


# -- fiber-preserving candidates ---------------------------------------------


def candidate_p1_fiber(f: ODE, solution: FrameSolution | None = None) -> CandidateTransformation:
    sol = solution or solve_frame(f, scheme_for("P1", "fiber"))
    i33, i3333, i33333 = _vals(sol, "1;33", "1;3333", "1;33333")
    q = _nz(i33, "I_{1;33}")
    s = _nz(q * q * 5 + i33333 * 4, "5*I_{1;33}^2 + 4*I_{1;33333}")
    r5 = _div(q**5 * Fraction(-1, 23328000), s * s, "(5*I_{1;33}^2 + 4*I_{1;33333})^2")
    t, yb = _adjoin(sol.tower, YBAR, 5, r5, "ybar^5")
    q = q.lift(t)
    pbar = _div(s.lift(t) * 129600, q**3, "I_{1;33}^3") * yb**4
    xbar = _div((i3333.lift(t) * 120 + q * q * 43) * -6, q * q, "I_{1;33}^2") * yb**2
    return CandidateTransformation("P1", "fiber", xbar, yb, pbar, t)


def candidate_p2_fiber(f: ODE, solution: FrameSolution | None = None) -> CandidateTransformation:
    """alpha != 0. The textbook formulas assume the opposite sign for X1;
    here they are stated for the derivations as shipped (see README)."""
    sol = solution or solve_frame(f, scheme_for("P2", "fiber"))
    i33, i331, i3331, i33311 = _vals(sol, "1;33", "1;331", "1;3331", "1;33311")
    d = _nz(i33 * i33311 + 3096576 - i331 * 4032, "I_{1;33}*I_{1;33311} + 3096576 - 4032*I_{1;331}")
    e = _nz(i3331 - 4032, "I_{1;3331} - 4032")
    _nz(i33311, "I_{1;33311}")
    a2 = _div(-(d * d), i33311 * e * e * 112, "112*I_{1;33311}*(I_{1;3331} - 4032)^2")
    t, ab = _adjoin(sol.tower, ABAR, 2, a2, "abar^2")
    y3 = _div(ab * 48384, d.lift(t), "denominator of ybar^3")
    t, yb = _adjoin(t, YBAR, 3, y3, "ybar^3")
    ab = ab.lift(t)
    pbar = _div(i33311.lift(t) * e.lift(t) * Fraction(-1, 6), d.lift(t), "denominator of pbar") * yb**2 * ab
    xbar = (i331.lift(t) * Fraction(1, 72) - 16) * yb**2
    return CandidateTransformation("P2", "fiber", xbar, yb, pbar, t, ab)


def candidate_p2a0_fiber(f: ODE, solution: FrameSolution | None = None) -> CandidateTransformation:
    sol = solution or solve_frame(f, scheme_for("P2a0", "fiber"))
    i331, i3331, i33311 = _vals(sol, "1;331", "1;3331", "1;33311")
    e = i3331 - 4032
    den = _nz(i33311 * e * e, "I_{1;33311}*(I_{1;3331} - 4032)^2")
    t, yb = _adjoin(sol.tower, YBAR, 6, _div(ExtensionElement.from_base(-20901888, den.tower), den, "ybar^6"), "ybar^6")
    pbar = (i33311.lift(t) * e.lift(t) * Fraction(-1, 290304)) * yb**5
    xbar = ((i331.lift(t) - 1152) * Fraction(1, 72)) * yb**2
    return CandidateTransformation("P2a0", "fiber", xbar, yb, pbar, t)


# -- point candidates ---------------------------------------------------------

_C = 2**15 * 3**5 * 11**3
_C3 = 2**9 * 3**3 * 5 * 11**2


def _point_derivs(derivs):
    if derivs is None or len(derivs) == 0:
        raise MissingDerivations("the point problem needs a derivation table (--derivations)")
    if derivs.problem != "point":
        raise DerivationTableError(f"expected a point derivation table, got {derivs.problem!r}")
    return derivs


def candidate_point(f: ODE, target, derivs: DerivationSet | None, solution=None) -> CandidateTransformation:
    tgt = get_target(target)
    derivs = _point_derivs(derivs)
    sol = solution or solve_frame(f, scheme_for(tgt.key, "point"), derivs)
    if tgt.key == "P1":
        return _point_p1(sol)
    if tgt.key == "P2":
        return _point_p2(sol)
    return _point_p2a0(sol)


def _point_p1(sol):
    q, k3333, k33333 = _vals(sol, "1;33313", "1;3333", "1;33333")
    _nz(q, "K_{1;33313}")
    a = _nz(k33333 * _C + q * q * 264, "2^15*3^5*11^3*K_{1;33333} + 264*K_{1;33313}^2")
    r5 = _div(q**5 * Fraction(-88, 375), a * a, "ybar^5 denominator")
    t, yb = _adjoin(sol.tower, YBAR, 5, r5, "ybar^5")
    q, a = q.lift(t), a.lift(t)
    pbar = _div(a * Fraction(5, 4), q**3, "K_{1;33313}^3") * yb**4
    xbar = _div((k3333.lift(t) * _C3 + q * q * 43) * -6, q * q, "K_{1;33313}^2") * yb**2
    return CandidateTransformation("P1", "point", xbar, yb, pbar, t)


def _point_p2(sol):
    k23, k133, k1331, k1333 = _vals(sol, "2;3", "1;33", "1;331", "1;333")
    d = _nz(k23 * k133 * 25 - 115200 + k23 * 1728 - k1331 * 150, "denominator D")
    e = _nz(k23 * k133 * 15 - 216000 + k23 * 4032 - k1331 * 450 - k23 * k1333 * 50, "factor E")
    _nz(k23, "K_{2;3}")
    a2 = _div(d * d * -108, k23 * e * e, "K_{2;3}*E^2")
    t, ab = _adjoin(sol.tower, ABAR, 2, a2, "abar^2")
    y3 = _div(ab * -1800, d.lift(t), "D")
    t, yb = _adjoin(t, YBAR, 3, y3, "ybar^3")
    ab = ab.lift(t)
    pbar = _div(k23.lift(t) * e.lift(t) * Fraction(-1, 18), d.lift(t), "D") * yb**2 * ab
    xbar = ((k23 * k133 * 25 + k23 * 336 - 57600 - k1331 * 50) * Fraction(1, 3600)).lift(t) * yb**2
    return CandidateTransformation("P2", "point", xbar, yb, pbar, t, ab)


def _point_p2a0(sol):
    k23, k133, k1333 = _vals(sol, "2;3", "1;33", "1;333")
    e = k23 * 576 + k23 * k1333 * 25 + k23 * k133 * 30 - 64800
    den = _nz(k23 * e * e, "K_{2;3}*E0^2")
    y6 = _div(ExtensionElement.from_base(-87480000, den.tower), den, "ybar^6 denominator")
    t, yb = _adjoin(sol.tower, YBAR, 6, y6, "ybar^6")
    pbar = (k23 * e * Fraction(-1, 16200)).lift(t) * yb**5
    xbar = ((k23 * k133 * 5 - 5760 - k23 * 72) * Fraction(1, 1080)).lift(t) * yb**2
    return CandidateTransformation("P2a0", "point", xbar, yb, pbar, t)


def candidate(f: ODE, target, problem="fiber", derivs=None) -> CandidateTransformation:
    tgt = get_target(target)
    if problem == "point":
        return candidate_point(f, tgt, derivs)
    if problem != "fiber":
        raise ValueError(f"unknown transformation class {problem!r}")
    build = {"P1": candidate_p1_fiber, "P2": candidate_p2_fiber, "P2a0": candidate_p2a0_fiber}[tgt.key]
    sol = solve_frame(f, scheme_for(tgt.key, "fiber"), derivs or builtin_derivations_fiber())
    return build(f, sol)


# -- verification -------------------------------------------------------------


@dataclass(frozen=True)
class Verification:
    ok: bool
    failed_check: Optional[str] = None
    branch: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


_P = RationalFunction.variable("p")


def _checks(f, tgt, problem, xb, yb, pb, ab):
    """Name of the first failing check, or ``None``."""
    if "p" in xb.variables() or "p" in yb.variables():
        return "point map"
    if (xb.diff("x") * yb.diff("y") - xb.diff("y") * yb.diff("x")).is_zero():
        return "Jacobian"
    dx = contact_denominator(xb)
    if not (pb * dx - contact_numerator(yb)).is_zero():
        return "contact condition"
    if problem == "fiber" and not xb.diff("y").is_zero():
        return "fiber preservation"
    extra = {}
    if tgt.alpha is not None:
        if ab is None:
            return "alphabar missing"
        if any(not ab.diff(v).is_zero() for v in ("x", "y", "p")):
            return "alphabar constant"
        extra[tgt.alpha] = ab
    t_f = substitute(tgt.ode.f, {"x": xb, "y": yb, "p": pb, **extra}, xb.tower)
    res = t_f * dx - pb.diff("x") - pb.diff("y") * _P - pb.diff("p") * f.f
    if not res.is_zero():
        return "pullback identity"
    return None


def verify(f: ODE, target, cand: CandidateTransformation, problem=None, prescreen=False) -> Verification:
    """Exact check that ``cand`` maps ``f`` to the target.

    Tries the generic tower first and then every specialisation of generators
    with rational roots (sign choices such as ``abar = alpha``).
    """
    tgt = get_target(target)
    problem = problem or cand.problem
    if prescreen and not numeric.prescreen(f.f, tgt.ode.f, cand, tgt.alpha):
        return Verification(False, "numeric prescreen")
    first_fail = None
    for tower, mapper, choices in all_branches(cand.tower):
        try:
            xb, yb, pb = mapper(cand.xbar), mapper(cand.ybar), mapper(cand.pbar)
            ab = mapper(cand.alphabar) if cand.alphabar is not None else None
            fail = _checks(f, tgt, problem, xb, yb, pb, ab)
        except (DivisionByZero, NonInvertible) as exc:
            fail = type(exc).__name__
        if fail is None:
            return Verification(True, None, {k: str(v) for k, v in choices.items()})
        if first_fail is None:
            first_fail = fail
        if fail == "point map":
            break
    return Verification(False, first_fail)


# -- verdicts -----------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    equivalent: bool
    transformation: Optional[CandidateTransformation] = None
    failure_reason: Optional[str] = None
    degree: Optional[int] = None
    detail: str = ""
    candidate: Optional[CandidateTransformation] = None
    branch: dict = field(default_factory=dict)


def classify(f: ODE, target, problem="fiber", derivs=None, prescreen=False) -> Verdict:
    """Branch check, normalization, candidate, verification."""
    tgt = get_target(target)
    try:
        if problem == "point":
            _point_derivs(derivs)
        cand = candidate(f, tgt, problem, derivs)
    except PainleveError as exc:
        return Verdict(False, failure_reason=exc.reason, detail=str(exc))
    res = verify(f, tgt, cand, problem, prescreen)
    if not res.ok:
        return Verdict(
            False,
            failure_reason="VerificationFailed",
            detail=f"{res.failed_check} check failed",
            candidate=cand,
        )
    return Verdict(True, cand, None, cand.degree, candidate=cand, branch=res.branch)


# -- symmetry fixtures ----------------------------------------------------------


@dataclass(frozen=True)
class SymmetryFixture:
    name: str
    target: str
    map: PointMap
    alphabar: Optional[ExtensionElement] = None

    def candidate(self):
        from .jet import prolong

        pm = prolong(self.map)
        return CandidateTransformation(
            self.target, "fiber", self.map.xbar, self.map.ybar, pm.pbar, self.map.tower, self.alphabar
        )


def symmetry_fixtures():
    """The discrete symmetry groups of P1, P2 and P2 with alpha = 0."""
    from .expr import rational

    y, x = rational("y"), rational("x")
    out = []
    t = EMPTY_TOWER.adjoin(YBAR, 5, y**5)
    yb = t.gen(YBAR)
    out.append(SymmetryFixture("P1 symmetries", "P1", PointMap(yb**2 * (x / y**2), yb, t)))

    alpha = rational("alpha", ["alpha"])
    t = EMPTY_TOWER.adjoin(ABAR, 2, alpha**2)
    ab = t.gen(ABAR)
    t = t.adjoin(YBAR, 3, ab.lift(t) * (y**3 / alpha))
    yb = t.gen(YBAR)
    out.append(SymmetryFixture("P2 symmetries", "P2", PointMap(yb**2 * (x / y**2), yb, t), ab.lift(t)))

    t = EMPTY_TOWER.adjoin(YBAR, 6, y**6)
    yb = t.gen(YBAR)
    out.append(SymmetryFixture("P2 (alpha = 0) symmetries", "P2a0", PointMap(yb**2 * (x / y**2), yb, t)))
    return out
