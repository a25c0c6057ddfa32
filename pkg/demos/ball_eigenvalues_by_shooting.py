"""Unit-ball eigenvalues of k-Hessian operators by radial shooting.

S_k(D^2 u) = lambda (-u)^k reduces on radial functions to an ODE in r.
Shooting with lambda = 1 from u(0) = -1 and reading off the first zero
r_star gives lambda_k(B_1) = r_star^(2k).  The k = 1 values are classical
(squared Bessel zero, pi^2), which anchors the solver.
"""

from math import pi

from hessfk.radial_spectra import (
    hessian_integral_radial,
    lambda_ball,
    rayleigh_paraboloid,
    shoot_eigen,
)

print("lambda_k(B_1) for n <= 4 (error estimates in parentheses):")
for n in range(2, 5):
    row = []
    for k in range(1, n + 1):
        pair = shoot_eigen(n, k)
        row.append(f"k={k}: {pair.lambda1:.8f} ({pair.error_estimate:.1e})")
    print(f"  n={n}:  " + "   ".join(row))

print(f"\nchecks: lambda_1(B_1^2) = j01^2 = 5.78318596...  "
      f"lambda_1(B_1^3) = pi^2 = {pi ** 2:.8f}")

# The paraboloid (|x|^2 - 1)/2 gives a closed-form Rayleigh quotient that
# must dominate the shot value.
print("\nparaboloid Rayleigh bounds vs shot values:")
for n, k in [(2, 1), (2, 2), (3, 2), (4, 4)]:
    bound = rayleigh_paraboloid(n, k)
    lam = shoot_eigen(n, k).lambda1
    print(f"  (n={n}, k={k}): {lam:.6f} <= {bound:.6f}")

# Scaling law lambda_k(B_R) = R^(-2k) lambda_k(B_1).
print("\nscaling: t^(2k) * lambda_2(B_t^2) is constant:")
for t in (0.5, 1.0, 2.0, 3.0):
    print(f"  t={t}: {t ** 4 * lambda_ball(2, 2, t):.12f}")

# The normalized eigenprofile satisfies the Rayleigh identity: its Hessian
# integral equals the eigenvalue.
pair = shoot_eigen(2, 2)
print(f"\nRayleigh identity: I_2[profile] = {hessian_integral_radial(pair, 1.0):.8f}"
      f" vs lambda = {pair.lambda1:.8f}")
