"""Shared fixtures and independent numerical oracles.

The oracles here deliberately avoid the library's own code paths: the
ellipse perimeter comes from the arithmetic-geometric mean form of the
complete elliptic integral, and the first Bessel-J0 zero from the power
series plus bisection.
"""

import numpy as np
import pytest

from hessfk.geometry import make_disk, make_ellipse, make_smoothed_polygon

UNIT_SQUARE = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]


def regular_polygon(m, side=1.0):
    """Vertices of a regular m-gon with the given side length."""
    R = side / (2 * np.sin(np.pi / m))
    ang = 2 * np.pi * np.arange(m) / m
    return np.column_stack([R * np.cos(ang), R * np.sin(ang)])


def agm_ellipse_perimeter(a, b):
    """Ellipse circumference 4*a*E(e) via the AGM form of E."""
    a, b = max(a, b), min(a, b)
    an, bn = 1.0, b / a
    cn = np.sqrt(1.0 - bn * bn)
    s = 0.5 * cn * cn
    pow2 = 1.0
    for _ in range(80):
        if cn < 1e-18:
            break
        an, bn, cn = (an + bn) / 2, np.sqrt(an * bn), (an - bn) / 2
        pow2 *= 2
        s += 0.5 * pow2 * cn * cn
    K = np.pi / (2 * an)
    E = K * (1.0 - s)
    return 4 * a * E


def bessel_j0_first_zero():
    """First positive zero of J0 by power series plus bisection."""

    def j0(x):
        term, total = 1.0, 1.0
        q = x * x / 4
        for m in range(1, 40):
            term *= -q / (m * m)
            total += term
        return total

    lo, hi = 2.0, 3.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if j0(lo) * j0(mid) <= 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


J01 = bessel_j0_first_zero()


@pytest.fixture(scope="session")
def unit_disk():
    return make_disk(1.0, 1024)


@pytest.fixture(scope="session")
def ellipse_15():
    return make_ellipse(1.5, 1.0, 1024)


@pytest.fixture(scope="session")
def smoothed_square():
    return make_smoothed_polygon(UNIT_SQUARE, 1.0, 1024)


@pytest.fixture(scope="session")
def body_corpus():
    """Mixed bag of valid bodies for property tests."""
    from hessfk.geometry import translate

    bodies = [
        make_disk(1.0, 1024),
        make_disk(2.5, 512),
        make_ellipse(1.5, 1.0, 1024),
        make_ellipse(1.05, 1 / 1.05, 1024),
        make_ellipse(2.0, 1.0, 1024),
        make_smoothed_polygon(UNIT_SQUARE, 0.3, 1024),
        make_smoothed_polygon(UNIT_SQUARE, 1.0, 1024),
        make_smoothed_polygon(regular_polygon(3), 0.5, 1024),
        make_smoothed_polygon(regular_polygon(5), 0.4, 1024),
        translate(make_ellipse(1.3, 0.9, 1024), (0.4, -0.2)),
    ]
    return bodies
