import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from painleve_equiv.errors import DegenerateMap, NonInvertible
from painleve_equiv.expr import ExtensionElement, rational
from painleve_equiv.expr.tower import EMPTY_TOWER
from painleve_equiv.jet import (
    ODE,
    PointMap,
    ProlongedMap,
    cartan_Dx,
    compose,
    contact_denominator,
    contact_numerator,
    is_fiber_preserving,
    prolong,
    pullback_ode,
    pullback_residual,
)

from strategies import nonzero_int, polynomials, rational_functions, small_int


def R(text):
    return rational(text, ("x", "y", "p", "c"))


def base(el):
    assert el.in_base()
    return el.base_part()


def quintic_map():
    t = EMPTY_TOWER.adjoin("ybar", 5, R("y^10/108"))
    yb = t.gen("ybar")
    return PointMap(yb**2 * R("6*x/y^4"), yb, t)


# -- cartan_Dx ----------------------------------------------------------------


def test_total_derivative_examples():
    f = ODE.parse("6*y^2+x")
    assert cartan_Dx(f, R("y")) == R("p")
    assert cartan_Dx(f, R("p")) == f.f
    assert cartan_Dx(f, f.partial("y")) == R("12*p")


def test_total_derivative_keeps_frame_constant():
    f = ODE.parse("6*y^2+x")
    g = rational("a1*y", ("y", "a1"))
    assert cartan_Dx(f, g) == rational("a1*p", ("p", "a1"))


# -- prolong ------------------------------------------------------------------


def test_prolong_identity():
    assert base(prolong(PointMap.identity()).pbar) == R("p")


def test_prolong_square():
    m = PointMap(R("x"), R("y^2"))
    assert base(prolong(m).pbar) == R("2*y*p")


def test_prolong_quintic_map():
    pm = prolong(quintic_map())
    yb = pm.tower.gen("ybar")
    assert pm.pbar == yb**4 * R("36*p/y^7")


def test_degenerate_maps():
    with pytest.raises(DegenerateMap):
        PointMap(R("x + p"), R("y"))
    with pytest.raises(DegenerateMap):
        PointMap(R("x + y"), R("2*x + 2*y"))


# -- pullback -----------------------------------------------------------------


def test_pullback_of_free_particle_by_square():
    # oracle: 2p^2 + 2y y'' = 0
    assert base(pullback_ode(R("0"), PointMap(R("x"), R("y^2")))) == R("-p^2/y")


def test_pullback_identity_of_zero():
    assert base(pullback_ode(R("0"), PointMap.identity())).is_zero()


def test_pullback_p1_by_quintic_map():
    g = pullback_ode(R("6*y^2+x"), quintic_map())
    assert base(g) == R("-p^2/y + (y^4+x)/y")


def test_pullback_frozen_examples():
    # oracle: direct y''-elimination in plain sympy
    g = pullback_ode(R("6*y^2+x"), PointMap(R("x+1"), R("2*y+x")))
    assert base(g) == R("(6*x^2 + 24*x*y + x + 24*y^2 + 1)/2")
    g = pullback_ode(R("6*y^2+x"), PointMap(R("2*x"), R("y^2")))
    assert base(g) == R("(-p^2 + 4*x + 12*y^4)/y")


def test_pullback_needs_p_in_pbar():
    # a hand-built prolongation whose pbar is free of p leaves y'' undetermined
    pm = ProlongedMap(PointMap.identity(), ExtensionElement.from_base(R("x")))
    with pytest.raises(NonInvertible):
        pullback_ode(R("0"), pm)


# -- fiber preservation -------------------------------------------------------


def test_fiber_preservation_examples():
    assert is_fiber_preserving(quintic_map())
    assert not is_fiber_preserving(PointMap(R("x + y"), R("y")))
    t = EMPTY_TOWER.adjoin("ybar", 6, R("y^12/4"))
    yb = t.gen("ybar")
    assert is_fiber_preserving(PointMap(yb**2 * R("2*x/y^4"), yb, t))


# -- properties ---------------------------------------------------------------


@st.composite
def fiber_maps(draw):
    a, c = draw(nonzero_int), draw(nonzero_int)
    b = draw(small_int)
    d = draw(polynomials(("x",), max_terms=3, max_deg=2))
    e = draw(st.integers(-2, 2))
    xb = R("x") * a + b
    yb = R("y") * c + R("y^2") * e + d
    return PointMap(xb, yb)


@st.composite
def point_maps(draw):
    xb = draw(polynomials(("x", "y"), max_terms=3, max_deg=2))
    yb = draw(polynomials(("x", "y"), max_terms=3, max_deg=2))
    jac = xb.diff("x") * yb.diff("y") - xb.diff("y") * yb.diff("x")
    assume(not jac.is_zero())
    assume(not (xb.diff("x") + xb.diff("y") * R("p")).is_zero())
    return PointMap(xb, yb)


small_odes = polynomials(("x", "y", "p"), max_terms=3, max_deg=2)


@given(rational_functions())
def test_identity_pullback_is_identity(f):
    assert base(pullback_ode(f, PointMap.identity())) == f


@given(small_odes, fiber_maps(), fiber_maps())
def test_pullback_is_functorial(f, m1, m2):
    once = base(pullback_ode(f, m1))
    twice = base(pullback_ode(once, m2))
    assert twice == base(pullback_ode(f, compose(m1, m2)))


@given(point_maps())
def test_prolongation_satisfies_contact_condition(m):
    pm = prolong(m)
    assert pm.pbar * contact_denominator(m.xbar) == contact_numerator(m.ybar)


@given(rational_functions(), rational_functions(), rational_functions())
def test_total_derivative_is_a_derivation(f, g, h):
    assert cartan_Dx(f, g * h) == cartan_Dx(f, g) * h + g * cartan_Dx(f, h)
    assert cartan_Dx(f, g + h) == cartan_Dx(f, g) + cartan_Dx(f, h)


@given(small_odes, point_maps())
def test_pullback_satisfies_target(target, m):
    pm = prolong(m)
    assume(not pm.pbar.diff("p").is_zero())
    g = pullback_ode(target, pm)
    assert pullback_residual(target, pm, base(g)).is_zero()
