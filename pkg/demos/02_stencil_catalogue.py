#!/usr/bin/env python3
"""Inspect the formula catalogue and re-derive weights from order conditions.

Every update formula the steppers use is catalogued as a stencil of nodal
weights.  Exact rational arithmetic expands each one in a Taylor series and
measures the largest polynomial degree it reproduces, so order claims are
checked, not trusted.  Two printed correctors (type1 and the averaged blend)
carry a nonzero h^2 residual and land at degree 1: the solver therefore
defaults to the type2 corrector, the only printed variant whose measured
degree matches its claim.
"""

from fractions import Fraction as F

from pece.stencil import (
    CATALOGUE,
    catalogue_by_name,
    exactness_degree,
    solve_weights,
    taylor_residual,
)

print(f"{'name':26s} {'claimed':8s} {'measured':9s} leading residual")
for entry in CATALOGUE:
    s = entry.stencil
    degree = exactness_degree(s)
    order, coeff = taylor_residual(s, s.claimed_order + 3).first_nonzero()
    flag = "" if degree >= s.claimed_order else "  <- differs from claim"
    print(f"{s.name:26s} {s.claimed_order:<8d} {degree:<9d} {coeff} * h^{order} x^({order}){flag}")

print()
print("Deriving the explicit two-step predictor from scratch: fix the")
print("BDF2-shaped displacement weights, forbid any weight at the new node,")
print("and ask for order 2.  The solve returns the printed coefficients:")
solved = solve_weights(order_goal=2, velocity_pins={1: 0},
                       with_acceleration=False, role="predictor")
print(f"  velocity weights = {solved.velocity}")
print(f"  matches catalogue: {solved.velocity == catalogue_by_name('two_step_predictor').velocity}")

print()
print("The acceleration-weighted predictor needs one extra constraint, the")
print("5/6 h^2 total acceleration weight:")
solved = solve_weights(order_goal=3, velocity_pins={1: 0}, acceleration_pins={1: 0},
                       acceleration_weight_sum=F(5, 6), role="predictor")
print(f"  velocity     = {solved.velocity}")
print(f"  acceleration = {solved.acceleration}")

print()
print("Over-constraining reports exactly which conditions clash:")
report = solve_weights(order_goal=3, velocity_pins={1: 0, 0: 0, -1: 0},
                       acceleration_weight_sum=F(5, 6))
print(f"  {report}")
