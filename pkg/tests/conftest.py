import numpy as np
import pytest

import curveflow as cf


@pytest.fixture(scope="session")
def circle256():
    return cf.make_curve("circle", 256)


@pytest.fixture(scope="session")
def circle2_256():
    return cf.make_curve("circle", 256, radius=2.0)


@pytest.fixture(scope="session")
def trefoil256():
    return cf.make_curve("trefoil", 256)


@pytest.fixture(scope="session")
def trefoil1024():
    return cf.make_curve("trefoil", 1024)


def all_hamiltonians():
    return [
        cf.Length(),
        cf.FluxTranslation(axis=(0.0, 0.0, 1.0)),
        cf.FluxRotation(axis=(0.0, 0.0, 1.0)),
        cf.SquaredCurvature(),
        cf.TotalTorsion(),
        cf.SquaredScale(),
        cf.LengthTimesK(),
    ]


def rel(a, b):
    return abs(a - b) / (abs(b) + 1e-300)


@pytest.fixture(scope="session")
def trefoil_oracle():
    """Analytic trefoil quantities via independent symbolic differentiation."""
    sympy = pytest.importorskip("sympy")
    th = sympy.symbols("t", real=True)
    c = sympy.Matrix(
        [
            (2 + sympy.cos(2 * th)) * sympy.cos(3 * th),
            (2 + sympy.cos(2 * th)) * sympy.sin(3 * th),
            sympy.sin(4 * th),
        ]
    )
    c1, c2, c3 = c.diff(th), c.diff(th, 2), c.diff(th, 3)
    cross = c1.cross(c2)
    speed = sympy.sqrt(c1.dot(c1))
    kappa_sq = cross.dot(cross) / (c1.dot(c1)) ** 3
    tau = c1.dot(c2.cross(c3)) / cross.dot(cross)
    return {
        "speed": sympy.lambdify(th, speed, "numpy"),
        "kappa_sq": sympy.lambdify(th, kappa_sq, "numpy"),
        "torsion": sympy.lambdify(th, tau, "numpy"),
    }


# Frozen values computed from the independent oracles (adaptive quadrature of
# the analytic speed, cross-checked by a 2e6-sample midpoint rule; symbolic
# Frenet invariants evaluated exactly).
TREFOIL_LENGTH = 42.96641805556875
TREFOIL_KAPPA_SQ_AT_0 = 0.102136252524179
TREFOIL_TORSION_AT_0 = -0.035916195543731
TRANSLATED_CIRCLE_ANGULAR = (0.0, -15.0 * np.pi, 0.0)
