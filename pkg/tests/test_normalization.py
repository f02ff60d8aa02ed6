from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from painleve_equiv.errors import (
    BranchViolation,
    DivisionByZero,
    NonTriangular,
    ResidualFrameVariable,
    UnsupportedConstraintSystem,
)
from painleve_equiv.expr import ExtensionElement, rational
from painleve_equiv.expr.tower import EMPTY_TOWER
from painleve_equiv.invariants import builtin_derivations_fiber, fiber_bases, word, WordEvaluator
from painleve_equiv.jet import ODE, PointMap, pullback_ode
from painleve_equiv.normalization import (
    FIBER_P1,
    FIBER_P2,
    NormalizationScheme,
    NormalizedInvariant,
    _solve_one,
    normalized,
    parameter_constraints,
    solve_frame,
)

from strategies import nonzero_int, small_int

NAMES = ("x", "y", "p", "a1", "a2", "a4", "c", "d")


def R(text):
    return rational(text, NAMES)


def F(text, params=()):
    return ODE.parse(text, params)


def test_first_equation_fixes_a1_a4_squared():
    # I1 = 12/(a1 a4^2) = -12
    head = NormalizationScheme("P1", "fiber", FIBER_P1.equations[:1])
    sol = solve_frame(F("6*y^2+x"), head)
    assert sol.values["a1"].base_part() * R("a4^2") == -1


def test_p1_full_scheme_is_satisfiable():
    sol = solve_frame(F("6*y^2+x"), FIBER_P1)
    assert all(r.is_zero() for r in sol.residuals())
    assert sol.values["a2"].is_zero()


def test_family_a_frame_matches_oracle():
    # oracle: sequential solving with plain sympy
    sol = solve_frame(F("-p^2/y + (y^4+x)/y"), FIBER_P1)
    assert sol.values["a4"].base_part() == R("2*p/y")
    assert sol.values["a1"].base_part() == R("-y^3/(6*p^2)")
    assert sol.values["a2"].base_part() == R("-y^3/(12*p^2)")
    assert sol.value("1;33").base_part() == R("-60*y^4/p^2")


def test_forced_values():
    sol = solve_frame(F("-p^2/y + (y^4+x)/y"), FIBER_P1)
    assert sol.value("1") == ExtensionElement.from_base(R("-12"), sol.tower)
    assert sol.value("1;333") * sol.value("1;33").inverse() == ExtensionElement.one(sol.tower)


def test_normalized_helper():
    inv = normalized("1", F("6*y^2+x"), FIBER_P1)
    assert inv.word == word("1") and inv.value.base_part() == -12


def test_family_b_c5_division_by_zero():
    with pytest.raises(DivisionByZero):
        solve_frame(F("5*p^2/y + y*(y^4+x)"), FIBER_P1)


def test_branch_violation():
    with pytest.raises(BranchViolation):
        solve_frame(F("p^3 + x"), FIBER_P1)


def test_p2_scheme_on_p2():
    sol = solve_frame(F("2*y^3+x*y"), FIBER_P2)
    assert all(r.is_zero() for r in sol.residuals())


def test_residual_frame_variable_is_asserted():
    with pytest.raises(ResidualFrameVariable):
        NormalizedInvariant(word("1"), ExtensionElement.from_base(R("a1*x")), ("a1", "a2", "a4"))
    with pytest.raises(AssertionError):
        NormalizedInvariant(word("1"), ExtensionElement.from_base(R("a4")), ("a4",))


def test_non_triangular_equation():
    expr = ExtensionElement.from_base(R("a4^2 + a4*x + 1"))
    with pytest.raises(NonTriangular):
        _solve_one(expr, "a4", EMPTY_TOWER, "test", True)


def test_binomial_equation_adjoins_root():
    expr = ExtensionElement.from_base(R("a4^3*y - x"))
    tower, sol = _solve_one(expr, "a4", EMPTY_TOWER, "test", True)
    assert tower.degrees == (3,) and tower.relations[0].base_part() == R("x/y")


def test_deterministic():
    f = F("3*p^2/y + (y^4+x)/y")
    a, b = solve_frame(f, FIBER_P1), solve_frame(f, FIBER_P1)
    assert a.tower == b.tower
    assert {k: str(v) for k, v in a.values.items()} == {k: str(v) for k, v in b.values.items()}


# -- parameter constraints ----------------------------------------------------


def _i11(text):
    f = F(text, ["c"])
    return WordEvaluator(f, builtin_derivations_fiber(), fiber_bases(f))("1;1")


def test_constraints_family_a():
    pc = parameter_constraints(_i11("c*p^2/y + (y^4+x)/y"), ["c"])
    assert pc.values == {Fraction(-1), Fraction(3)}
    assert pc.describe() == "admissible c: {-1, 3}"


def test_constraints_family_b():
    pc = parameter_constraints(_i11("c*p^2/y + y*(y^4+x)"), ["c"])
    assert pc.values == {Fraction(-3), Fraction(5)}


def test_constraints_zero_invariant():
    pc = parameter_constraints(R("0"), ["c"])
    assert pc.unconstrained
    assert pc.describe() == "admissible c: all values"


def test_constraints_unsupported():
    with pytest.raises(UnsupportedConstraintSystem):
        parameter_constraints(R("(c^2 - 2)*x"), ["c"])
    with pytest.raises(UnsupportedConstraintSystem) as err:
        parameter_constraints(R("(c - d)*x + (c + d - 1)*y"), ["c", "d"])
    assert err.value.system


def test_constraints_no_solution():
    assert parameter_constraints(R("(c - 1)*x + (c - 2)*y"), ["c"]).values == frozenset()


# -- properties ---------------------------------------------------------------


@st.composite
def p1_images(draw):
    """P1 pulled back along a random fiber-preserving affine map."""
    a, c = draw(nonzero_int), draw(nonzero_int)
    b, d, e = draw(small_int), draw(small_int), draw(small_int)
    m = PointMap(R("x") * a + b, R("y") * c + R("x") * d + e)
    return ODE(pullback_ode(R("6*y^2+x"), m).base_part())


@given(p1_images())
def test_scheme_residuals_vanish(f):
    sol = solve_frame(f, FIBER_P1)
    assert all(r.is_zero() for r in sol.residuals())
    for w in ("1;33", "1;3333"):
        assert not (sol.value(w).variables() & {"a1", "a2", "a4"})
