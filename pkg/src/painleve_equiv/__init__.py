"""Equivalence of second-order ODEs to the first and second Painlevé equations.

Typical use::

    from painleve_equiv import ODE, classify
    verdict = classify(ODE.parse("-p^2/y + (y^4 + x)/y"), "P1", "fiber")
"""

from .classifier import (
    TARGETS,
    CandidateTransformation,
    Target,
    Verdict,
    Verification,
    candidate,
    candidate_p1_fiber,
    candidate_p2_fiber,
    candidate_p2a0_fiber,
    candidate_point,
    classify,
    get_target,
    symmetry_fixtures,
    verify,
)
from .errors import *  # noqa: F401,F403
from .expr import ExtensionElement, RadicalTower, RationalFunction, parse, rational, to_rational
from .invariants import (
    DerivationSet,
    DerivationSpec,
    InvariantWord,
    apply_word,
    builtin_derivations_fiber,
    dump_derivations,
    fundamental_fiber,
    fundamental_point,
    load_derivations,
)
from .jet import ODE, PointMap, ProlongedMap, cartan_Dx, is_fiber_preserving, prolong, pullback_ode
from .normalization import (
    FIBER_P1,
    FIBER_P2,
    POINT_P1,
    POINT_P2,
    NormalizationScheme,
    normalized,
    parameter_constraints,
    solve_frame,
)

__version__ = "0.1.0"
