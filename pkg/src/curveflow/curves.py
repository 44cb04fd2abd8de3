"""Discrete closed space curves and their differential-geometric primitives.

A curve is an ordered closed polygon of N >= 8 vertices in R^3 with no
degenerate edges.  Arclength differentiation uses non-uniform centered
differences, (f[i+1] - f[i-1]) / (l[i-1] + l[i]); higher orders iterate the
first-order operator.  Quadrature uses the dual vertex weights
w[i] = (l[i-1] + l[i]) / 2, which partition the total length exactly and make
the difference operator exactly skew-adjoint in the weighted inner product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ._backend import kernels as K

# Immersion guard: reject edges shorter than this fraction of the mean edge.
EDGE_FLOOR_FACTOR = 1e-9
# Torsion is set to 0 wherever kappa^2 falls below this fraction of its mean.
TORSION_FLOOR_FACTOR = 1e-8


class CurveflowError(Exception):
    """Base class for all package errors."""


class ConfigurationError(CurveflowError):
    """Invalid parameters: bad vertex counts, radii, scenario values."""


class DegenerateCurveError(CurveflowError):
    """Vertex data violating the discrete immersion condition."""


class EdgeCollapseError(DegenerateCurveError):
    """An evolving curve lost the immersion condition mid-flow."""


class NumericalBlowupError(CurveflowError):
    """Non-finite values appeared during time integration."""


class WeightError(CurveflowError):
    """Invalid inertia weight (nonpositive conformal factor, failed check)."""


class UnsupportedWeightError(CurveflowError):
    """Operation undefined for this weight variant."""


class FlowInvarianceError(CurveflowError):
    """Hamiltonian lacks an invariance required by the scale-invariant case."""


class DegenerateSpanError(CurveflowError):
    """Projection directions became numerically dependent."""


@dataclass(frozen=True)
class ArclengthMeasure:
    """Edge lengths, dual vertex weights and total length of a closed polygon."""

    edge_lengths: np.ndarray
    vertex_weights: np.ndarray
    total_length: float


@dataclass(frozen=True)
class DiscreteCurve:
    """Immutable closed polygon; derived fields are cached per instance."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(np.asarray(self.vertices, dtype=np.float64))
        if v.ndim != 2 or v.shape[1] != 3:
            raise ConfigurationError(f"vertices must have shape (N, 3), got {v.shape}")
        if v.shape[0] < 8:
            raise ConfigurationError(
                f"a closed curve needs at least 8 vertices, got {v.shape[0]}"
            )
        if not np.isfinite(v).all():
            raise DegenerateCurveError("non-finite vertex coordinates")
        el = K.edge_lengths(v)
        if el.min() <= EDGE_FLOOR_FACTOR * el.mean():
            raise DegenerateCurveError(
                f"shortest edge {el.min():.3e} below immersion floor "
                f"({EDGE_FLOOR_FACTOR:g} x mean edge {el.mean():.3e})"
            )
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "_edge_lengths", el)

    @property
    def n(self) -> int:
        return self.vertices.shape[0]

    @cached_property
    def measure(self) -> ArclengthMeasure:
        el = self._edge_lengths
        return ArclengthMeasure(el, K.vertex_weights(el), float(el.sum()))

    # Cached arclength derivatives of the vertex positions.
    @cached_property
    def _d1(self) -> np.ndarray:
        return K.centered_diff(self.vertices, self.measure.vertex_weights)

    @cached_property
    def _d2(self) -> np.ndarray:
        return K.centered_diff(self._d1, self.measure.vertex_weights)

    @cached_property
    def _d3(self) -> np.ndarray:
        return K.centered_diff(self._d2, self.measure.vertex_weights)

    @cached_property
    def _d4(self) -> np.ndarray:
        return K.centered_diff(self._d3, self.measure.vertex_weights)

    def derivative(self, order: int) -> np.ndarray:
        """Arclength derivative of the vertex positions, order 1..4."""
        if order == 1:
            return self._d1
        if order == 2:
            return self._d2
        if order == 3:
            return self._d3
        if order == 4:
            return self._d4
        raise ConfigurationError(f"derivative order must be in 1..4, got {order}")

    @cached_property
    def curvature_sq(self) -> np.ndarray:
        return K.rows_dot(self._d2, self._d2)

    @cached_property
    def _torsion(self) -> np.ndarray:
        k2 = self.curvature_sq
        num = K.rows_dot(self._d3, K.rows_cross(self._d1, self._d2))
        floor = TORSION_FLOOR_FACTOR * k2.mean()
        safe = np.where(k2 >= floor, k2, 1.0)
        return np.where(k2 >= floor, num / safe, 0.0)


def measures(c: DiscreteCurve) -> ArclengthMeasure:
    """Arclength measure of the polygon (edge lengths, weights, total)."""
    return c.measure


def arclength_derivative(c: DiscreteCurve, f: np.ndarray, order: int = 1) -> np.ndarray:
    """Apply the centered arclength difference operator ``order`` times to f."""
    if not 1 <= order <= 4:
        raise ConfigurationError(f"derivative order must be in 1..4, got {order}")
    f = _check_field(c, f)
    w = c.measure.vertex_weights
    for _ in range(order):
        f = K.centered_diff(f, w)
    return f


def curvature_sq(c: DiscreteCurve) -> np.ndarray:
    """Per-vertex squared curvature |D_s^2 c|^2."""
    return c.curvature_sq.copy()


def torsion(c: DiscreteCurve) -> np.ndarray:
    """Per-vertex torsion <D_s^3 c, D_s c x D_s^2 c> / kappa^2, floored to 0
    where the squared curvature is negligible."""
    return c._torsion.copy()


def l2_inner(c: DiscreteCurve, h: np.ndarray, k: np.ndarray) -> float:
    """Weighted L2 pairing sum_i <h_i, k_i> w_i."""
    h = _check_field(c, h)
    k = _check_field(c, k)
    return K.dot_sum(h, k, c.measure.vertex_weights)


def vertical_projection(c: DiscreteCurve, h: np.ndarray) -> np.ndarray:
    """Pointwise projection <D_s c, h> D_s c onto the reparametrization directions."""
    h = _check_field(c, h)
    t = c._d1
    return K.rows_dot(t, h)[:, None] * t


def tangent_cross(c: DiscreteCurve, h: np.ndarray) -> np.ndarray:
    """Pointwise D_s c x h (the raw discrete tangent, not renormalized)."""
    h = _check_field(c, h)
    return K.rows_cross(c._d1, h)


def unit_edges(c: DiscreteCurve) -> np.ndarray:
    """Unit edge vectors e_i = (c_{i+1} - c_i) / l_i."""
    v = c.vertices
    u = np.roll(v, -1, axis=0) - v
    return u / c.measure.edge_lengths[:, None]


def length_gradient(c: DiscreteCurve) -> np.ndarray:
    """Exact weighted gradient of the polygon length: (e_{i-1} - e_i) / w_i.

    This is the first variation of sum_i l_i; it agrees with -D_s^2 c up to
    the discretization order.
    """
    e = unit_edges(c)
    return (np.roll(e, 1, axis=0) - e) / c.measure.vertex_weights[:, None]


def _check_field(c: DiscreteCurve, f: np.ndarray) -> np.ndarray:
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (c.n, 3):
        raise ValueError(f"field shape {f.shape} does not match curve ({c.n}, 3)")
    return np.ascontiguousarray(f)


# ---------------------------------------------------------------------------
# Built-in curve families


def make_curve(family: str, n: int, **params) -> DiscreteCurve:
    """Sample a built-in closed curve at theta_i = 2 pi i / n.

    Families: ``circle`` (radius), ``trefoil``,
    ``torus_knot`` (p, q, big_radius, small_radius).
    """
    if n < 8:
        raise ConfigurationError(f"need at least 8 vertices, got {n}")
    theta = 2.0 * np.pi * np.arange(n) / n
    if family == "circle":
        r = float(params.pop("radius", 1.0))
        _reject_unknown(family, params)
        if r <= 0:
            raise ConfigurationError(f"circle radius must be positive, got {r}")
        v = np.stack([r * np.cos(theta), r * np.sin(theta), np.zeros(n)], axis=1)
    elif family == "trefoil":
        _reject_unknown(family, params)
        rad = 2.0 + np.cos(2.0 * theta)
        v = np.stack(
            [rad * np.cos(3.0 * theta), rad * np.sin(3.0 * theta), np.sin(4.0 * theta)],
            axis=1,
        )
    elif family == "torus_knot":
        p = int(params.pop("p", 2))
        q = int(params.pop("q", 3))
        big = float(params.pop("big_radius", 2.0))
        small = float(params.pop("small_radius", 0.5))
        _reject_unknown(family, params)
        if p == 0 or q == 0:
            raise ConfigurationError("torus knot winding numbers must be nonzero")
        if not 0 < small < big:
            raise ConfigurationError(
                f"need 0 < small_radius < big_radius, got {small}, {big}"
            )
        rad = big + small * np.cos(q * theta)
        v = np.stack(
            [rad * np.cos(p * theta), rad * np.sin(p * theta), small * np.sin(q * theta)],
            axis=1,
        )
    else:
        raise ConfigurationError(f"unknown curve family '{family}'")
    return DiscreteCurve(v)


def _reject_unknown(family, params):
    if params:
        raise ConfigurationError(
            f"unknown parameter(s) for '{family}': {sorted(params)}"
        )


# ---------------------------------------------------------------------------
# Curve file format: header "N <count>", then N lines "x y z".


def save_curve(path, c: DiscreteCurve) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"N {c.n}\n")
        for x, y, z in c.vertices:
            fh.write(f"{x:.17g} {y:.17g} {z:.17g}\n")


def load_curve(path) -> DiscreteCurve:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 2 or header[0] != "N":
            raise ConfigurationError(f"{path}: expected header 'N <count>'")
        try:
            n = int(header[1])
        except ValueError:
            raise ConfigurationError(f"{path}: bad vertex count {header[1]!r}") from None
        rows = []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ConfigurationError(f"{path}:{lineno}: expected 'x y z'")
            rows.append([float(p) for p in parts])
    if len(rows) != n:
        raise ConfigurationError(f"{path}: header says {n} vertices, found {len(rows)}")
    return DiscreteCurve(np.asarray(rows, dtype=np.float64))


# ---------------------------------------------------------------------------
# Geometry helpers


def resample_uniform(c: DiscreteCurve) -> DiscreteCurve:
    """Redistribute the N vertices uniformly in arclength (linear interpolation).

    Vertex 0 stays fixed; all evaluated quantities are reparametrization
    invariant, so resampling only changes the sampling, not the shape.
    """
    el = c.measure.edge_lengths
    s = np.concatenate([[0.0], np.cumsum(el)])
    total = s[-1]
    targets = total * np.arange(c.n) / c.n
    closed = np.vstack([c.vertices, c.vertices[:1]])
    v = np.stack([np.interp(targets, s, closed[:, d]) for d in range(3)], axis=1)
    return DiscreteCurve(v)


def polyline_gap(a: DiscreteCurve, b: DiscreteCurve) -> float:
    """Symmetric max vertex-to-polyline distance between two closed polygons.

    A discrete Hausdorff-type distance: parametrization independent, used to
    compare shapes produced by different evolution paths.
    """
    return max(_directed_gap(a, b), _directed_gap(b, a))


def _directed_gap(a: DiscreteCurve, b: DiscreteCurve) -> float:
    p = a.vertices
    q0 = b.vertices
    seg = np.roll(q0, -1, axis=0) - q0
    seg_len2 = np.maximum(np.einsum("ij,ij->i", seg, seg), 1e-300)
    diff = p[:, None, :] - q0[None, :, :]
    t = np.clip(np.einsum("ijk,jk->ij", diff, seg) / seg_len2[None, :], 0.0, 1.0)
    closest = diff - t[:, :, None] * seg[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", closest, closest)
    return float(np.sqrt(d2.min(axis=1).max()))


def diameter(c: DiscreteCurve) -> float:
    """Diameter of the vertex set (max pairwise distance)."""
    v = c.vertices
    d2 = np.einsum("ijk,ijk->ij", v[:, None, :] - v[None, :, :], v[:, None, :] - v[None, :, :])
    return float(np.sqrt(d2.max()))
