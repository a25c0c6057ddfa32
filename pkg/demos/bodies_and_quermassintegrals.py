"""Convex bodies from support functions, and what their quermassintegrals say.

Walks through the body constructors, the Steiner formula, the
Aleksandrov-Fenchel chain, and the asymmetry measures that quantify how
far a body is from a ball.
"""

from math import pi

import numpy as np

from hessfk.geometry import (
    af_deficit,
    asymmetry_report,
    bonnesen_gap,
    gs_pair,
    make_ellipse,
    make_smoothed_polygon,
    offset,
    quermass_2d,
    quermass_ball,
)

# An ellipse with semi-axes 1.5 and 1.0: area pi*a*b, perimeter ~ 7.93.
E = make_ellipse(1.5, 1.0)
W = quermass_2d(E)
print("ellipse (1.5, 1.0):")
print(f"  area      = {W.area:.12f}   (exact {1.5 * pi:.12f})")
print(f"  perimeter = {W.perimeter:.12f}")

# A unit square with corners rounded by radius 0.5.  The constructor
# calibrates the discrete perimeter and area to the exact Steiner values.
SQ = make_smoothed_polygon([(0, 0), (1, 0), (1, 1), (0, 1)], 0.5)
Wsq = quermass_2d(SQ)
print("\nsquare (+) 0.5*B:")
print(f"  perimeter = {Wsq.perimeter:.12f}   (Steiner {4 + pi:.12f})")
print(f"  area      = {Wsq.area:.12f}   (Steiner {1 + 2 + pi / 4:.12f})")

# The Steiner formula |K + rho*B| = W0 + 2*W1*rho + pi*rho^2 holds for any
# body, to machine precision, because the quadrature treats it as an identity.
for rho in (0.1, 1.0, 10.0):
    Wr = quermass_2d(offset(E, rho))
    predicted = W.area + 2 * W.W[1] * rho + pi * rho ** 2
    print(f"\nSteiner residual at rho={rho:>4}: {Wr.area - predicted:.2e}")

# Balls in higher dimension have W_i = omega_n R^(n-i) in closed form.
print("\nquermassintegrals of the 3-ball, R=2:", quermass_ball(3, 2.0).W)

# The Aleksandrov-Fenchel deficit is zero exactly on balls and positive
# otherwise; rounding a polygon more and more drives it to zero.
print("\nAF deficit (W1/pi) - sqrt(W0/pi):")
for rho in (0.2, 0.5, 1.0, 3.0):
    K = make_smoothed_polygon([(0, 0), (1, 0), (1, 1), (0, 1)], rho)
    print(f"  rho={rho:>4}: {af_deficit(quermass_2d(K), 0, 1):.6f}")

# Asymmetry report: inradius/circumradius deficiencies against the ball
# with the same perimeter (k=2), plus the Hausdorff asymmetry.
rep = asymmetry_report(E, k=2)
print("\nasymmetry of the ellipse against its perimeter ball:")
print(f"  d_2 = {rep.d_k:.6f}   D_2 = {rep.D_k:.6f}   Delta = {rep.Delta:.6f}")
print(f"  delta_H = {rep.delta_H:.6f}   (r={rep.r_in:.4f}, R={rep.R_circ:.4f}, "
      f"R*={rep.R_star:.4f})")

# Two quantitative isoperimetric quantities: the Bonnesen slack and the
# Bonnesen-type pair whose ratio estimates the unknown stability constant.
print(f"\nBonnesen slack P^2 - 4 pi A - pi^2 (R - r)^2 = {bonnesen_gap(E):.6f}")
ratios = []
for a in np.linspace(1.02, 1.3, 8):
    lhs, rhs = gs_pair(make_ellipse(a, 1 / a))
    ratios.append(lhs / rhs)
print(f"empirical constant for the (R-r)^(5/2) bound on ellipses: "
      f"{max(ratios):.4f}")
