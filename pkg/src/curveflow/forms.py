"""Liouville one-forms and weighted (pre)symplectic two-forms on curve space.

The inertia weight is a pointwise multiplication operator: identity, a power
of the total length Phi(l) = C l^p, a user-supplied conformal factor
lambda(c), or the curvature weight 1 + kappa^2.  The one-form is

    theta(w, c, h) = sum_i weight_i <c_i x (D_s c)_i, h_i> w_i,

and the two-forms are the negatives of its exterior derivative, written out
per weight variant.  Every two-form here is exactly antisymmetric in
floating-point arithmetic (all terms are built from cross products or
explicitly antisymmetrized pairs).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._backend import kernels as K
from .curves import (
    DiscreteCurve,
    ConfigurationError,
    UnsupportedWeightError,
    WeightError,
    _check_field,
    length_gradient,
)

# The identity-weight two-form is this multiple of the classical
# Marsden-Weinstein form; all formulas below are written against the
# identity-weight normalization to keep the bookkeeping in one place.
MW_FACTOR = 3.0


class WeightSpec:
    """Base class for inertia-weight variants."""

    __slots__ = ()


@dataclass(frozen=True)
class Identity(WeightSpec):
    """Unweighted L2 structure."""


@dataclass(frozen=True)
class LengthWeighted(WeightSpec):
    """Pointwise weight Phi(l) = coeff * l^power of the total length."""

    coeff: float = 1.0
    power: float = 0.0

    def __post_init__(self):
        if not self.coeff > 0:
            raise ConfigurationError(f"length weight needs coeff > 0, got {self.coeff}")

    def phi(self, ell: float) -> float:
        return self.coeff * ell**self.power

    def dphi(self, ell: float) -> float:
        return self.coeff * self.power * ell ** (self.power - 1.0)


@dataclass(frozen=True)
class ConformalCustom(WeightSpec):
    """User-supplied conformal factor with its weighted L2 gradient field.

    ``value`` maps a curve to a positive scalar; ``gradient`` maps a curve to
    the (N, 3) field g with  d(value)(k) = sum_i <g_i, k_i> w_i.  The
    gradient must pass the finite-difference check before it is used to build
    Hamiltonian fields.
    """

    value: Callable[[DiscreteCurve], float]
    gradient: Callable[[DiscreteCurve], np.ndarray]


@dataclass(frozen=True)
class CurvatureWeighted(WeightSpec):
    """Pointwise weight 1 + kappa^2."""


def pointwise_weight(w: WeightSpec, c: DiscreteCurve) -> np.ndarray:
    """Per-vertex multiplier of the L2 measure for this weight."""
    if isinstance(w, Identity):
        return np.ones(c.n)
    if isinstance(w, LengthWeighted):
        return np.full(c.n, w.phi(c.measure.total_length))
    if isinstance(w, ConformalCustom):
        return np.full(c.n, conformal_factor(w, c))
    if isinstance(w, CurvatureWeighted):
        return 1.0 + c.curvature_sq
    raise UnsupportedWeightError(f"unknown weight variant {type(w).__name__}")


def conformal_factor(w: WeightSpec, c: DiscreteCurve) -> float:
    """Scalar conformal factor lambda(c); undefined for the curvature weight."""
    if isinstance(w, Identity):
        return 1.0
    if isinstance(w, LengthWeighted):
        return w.phi(c.measure.total_length)
    if isinstance(w, ConformalCustom):
        lam = float(w.value(c))
        if not lam > 0:
            raise WeightError(f"conformal factor must be positive, got {lam}")
        return lam
    raise UnsupportedWeightError(
        "the curvature weight is not a scalar conformal factor"
    )


def theta(w: WeightSpec, c: DiscreteCurve, h: np.ndarray) -> float:
    """Weighted Liouville one-form sum_i weight_i <c_i x (D_s c)_i, h_i> w_i."""
    h = _check_field(c, h)
    s = pointwise_weight(w, c) * c.measure.vertex_weights
    return K.triple_sum(h, c.vertices, c.derivative(1), s)


def omega_mw(c: DiscreteCurve, h: np.ndarray, k: np.ndarray) -> float:
    """Classical two-form sum_i det((D_s c)_i, h_i, k_i) w_i (no factor 3)."""
    h = _check_field(c, h)
    k = _check_field(c, k)
    return K.triple_sum(c.derivative(1), h, k, c.measure.vertex_weights)


def omega(w: WeightSpec, c: DiscreteCurve, h: np.ndarray, k: np.ndarray) -> float:
    """Weighted presymplectic two-form evaluated on a pair of fields."""
    h = _check_field(c, h)
    k = _check_field(c, k)
    if isinstance(w, Identity):
        return MW_FACTOR * omega_mw(c, h, k)
    if isinstance(w, LengthWeighted):
        ell = c.measure.total_length
        wv = c.measure.vertex_weights
        d2 = c.derivative(2)
        base = w.phi(ell) * MW_FACTOR * omega_mw(c, h, k)
        dphi = w.dphi(ell)
        if dphi == 0.0:
            return base
        ident = Identity()
        cross = K.dot_sum(h, d2, wv) * theta(ident, c, k) - K.dot_sum(
            k, d2, wv
        ) * theta(ident, c, h)
        return base + dphi * cross
    if isinstance(w, ConformalCustom):
        lam = conformal_factor(w, c)
        grad = _check_field(c, w.gradient(c))
        wv = c.measure.vertex_weights
        ident = Identity()
        base = lam * MW_FACTOR * omega_mw(c, h, k)
        return base + theta(ident, c, h) * K.dot_sum(grad, k, wv) - theta(
            ident, c, k
        ) * K.dot_sum(grad, h, wv)
    if isinstance(w, CurvatureWeighted):
        return _omega_curvature(c, h, k)
    raise UnsupportedWeightError(f"unknown weight variant {type(w).__name__}")


def _omega_curvature(c: DiscreteCurve, h: np.ndarray, k: np.ndarray) -> float:
    wv = c.measure.vertex_weights
    a = c.derivative(1)
    b = c.derivative(2)
    k2 = c.curvature_sq
    dk2 = K.centered_diff_scalar(k2, wv)
    core = K.triple_sum(a, h, k, (3.0 * (1.0 + k2)) * wv) + K.triple_sum(
        c.vertices, h, k, dk2 * wv
    )
    cxa = K.rows_cross(c.vertices, a)

    def one_sided(x, y):
        dx = K.centered_diff(x, wv)
        ddx = K.centered_diff(dx, wv)
        coeff = 4.0 * k2 * K.rows_dot(dx, a) - 2.0 * K.rows_dot(ddx, b)
        return K.dot_sum(cxa, y, coeff * wv)

    return core + one_sided(h, k) - one_sided(k, h)


def scale_defect(w: WeightSpec, c: DiscreteCurve) -> float:
    """3 lambda(c) + d lambda(c)[c]; zero exactly when the one-form is
    invariant under rescaling the curve."""
    if isinstance(w, Identity):
        return 3.0
    if isinstance(w, LengthWeighted):
        ell = c.measure.total_length
        return w.coeff * (3.0 + w.power) * ell**w.power
    if isinstance(w, ConformalCustom):
        lam = conformal_factor(w, c)
        grad = _check_field(c, w.gradient(c))
        return 3.0 * lam + K.dot_sum(grad, c.vertices, c.measure.vertex_weights)
    raise UnsupportedWeightError(
        "scale defect is undefined for the curvature weight (not a scalar factor)"
    )


def grad_lambda(w: WeightSpec, c: DiscreteCurve) -> np.ndarray:
    """Weighted L2 gradient field of the conformal factor.

    For the length family this is Phi'(l) times the exact first variation of
    the polygon length (the discrete counterpart of -Phi'(l) D_s^2 c).
    """
    if isinstance(w, Identity):
        return np.zeros((c.n, 3))
    if isinstance(w, LengthWeighted):
        dphi = w.dphi(c.measure.total_length)
        if dphi == 0.0:
            return np.zeros((c.n, 3))
        return dphi * length_gradient(c)
    if isinstance(w, ConformalCustom):
        return _check_field(c, w.gradient(c))
    raise UnsupportedWeightError(
        "the curvature weight has no scalar conformal gradient"
    )


def almost_symplectic(w: WeightSpec, c: DiscreteCurve, h, k) -> float:
    """Skew form G^w(J h, k) built directly from the rotated metric.

    Unlike ``omega`` this is generally NOT closed for curve-dependent weights;
    it exists as the negative control for the closedness checks.
    """
    h = _check_field(c, h)
    k = _check_field(c, k)
    s = pointwise_weight(w, c) * c.measure.vertex_weights
    return K.triple_sum(k, c.derivative(1), h, s)
