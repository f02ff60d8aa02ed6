"""The finite symmetry groups of P1, P2 and P2 with alpha = 0.

Each group is encoded as one multi-valued map: ybar is a root of y^d, so the
d branches are the scalings ybar = w*y by d-th roots of unity. Every map pulls
its equation back to itself. Classifying each equation against itself gives a
tower of the same degree.
"""

from painleve_equiv import classify, get_target, symmetry_fixtures, verify

for fx in symmetry_fixtures():
    tgt = get_target(fx.target)
    cand = fx.candidate()
    print(f"{fx.name}: degree {cand.degree}, maps {tgt} to itself: {verify(tgt.ode, tgt, cand).ok}")
    for line in cand.describe():
        print("   ", line)
    if fx.alphabar is not None:
        print("    abar^2 = alpha^2:", (fx.alphabar * fx.alphabar).base_part())
    v = classify(tgt.ode, tgt, "fiber")
    print("    self-classification degree:", v.degree)
    print()
