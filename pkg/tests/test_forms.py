import numpy as np
import pytest

import curveflow as cf
from curveflow.verify import fd_directional, fourier_fields, rotation_matrix

from conftest import rel

EZ = np.array([0.0, 0.0, 1.0])


def ez_field(n):
    return np.broadcast_to(EZ, (n, 3)).copy()


ALL_WEIGHTS = [
    cf.Identity(),
    cf.LengthWeighted(1.0, 1.0),
    cf.LengthWeighted(2.0, -2.0),
    cf.LengthWeighted(1.0, -3.0),
    cf.CurvatureWeighted(),
]


class TestTheta:
    def test_circle_axis_value(self, circle256):
        assert rel(cf.theta(cf.Identity(), circle256, ez_field(256)), 2 * np.pi) < 1e-3

    def test_vanishes_on_vertical(self, trefoil256):
        rng = np.random.default_rng(3)
        a = rng.standard_normal(256)
        vert = a[:, None] * trefoil256.derivative(1)
        scale = abs(cf.theta(cf.Identity(), trefoil256, rng.standard_normal((256, 3))))
        assert abs(cf.theta(cf.Identity(), trefoil256, vert)) < 1e-13 * scale

    def test_linear_in_weight(self, circle256):
        base = cf.theta(cf.Identity(), circle256, ez_field(256))
        doubled = cf.theta(cf.LengthWeighted(2.0, 0.0), circle256, ez_field(256))
        assert rel(doubled, 2.0 * base) < 1e-14
        assert rel(doubled, 4 * np.pi) < 1e-3

    def test_nonpositive_conformal_rejected(self, circle256):
        w = cf.ConformalCustom(value=lambda c: -1.0, gradient=lambda c: np.zeros((c.n, 3)))
        with pytest.raises(cf.WeightError):
            cf.theta(w, circle256, ez_field(256))


class TestOmegaMW:
    def test_planar_pair_zero(self, circle256):
        ex = np.broadcast_to(np.array([1.0, 0.0, 0.0]), (256, 3))
        ey = np.broadcast_to(np.array([0.0, 1.0, 0.0]), (256, 3))
        assert abs(cf.omega_mw(circle256, ex, ey)) < 1e-12

    def test_circle_axis_position(self, circle256):
        val = cf.omega_mw(circle256, ez_field(256), circle256.vertices)
        assert rel(val, 2 * np.pi) < 1e-3

    def test_antisymmetry_with_equal_args(self, trefoil256):
        h = np.random.default_rng(4).standard_normal((256, 3))
        assert cf.omega_mw(trefoil256, h, h) == 0.0


class TestOmega:
    def test_constant_weight_reduces_to_identity(self, trefoil256):
        h, k = fourier_fields(256, 2, 11)
        a = cf.omega(cf.LengthWeighted(1.0, 0.0), trefoil256, h, k)
        b = cf.omega(cf.Identity(), trefoil256, h, k)
        assert a == b

    @pytest.mark.parametrize("w", ALL_WEIGHTS, ids=lambda w: cf.spec_name(w))
    def test_exact_antisymmetry(self, trefoil256, w):
        h, k = fourier_fields(256, 2, 12)
        assert cf.omega(w, trefoil256, h, k) == -cf.omega(w, trefoil256, k, h)
        assert cf.omega(w, trefoil256, h, h) == 0.0

    @pytest.mark.parametrize("w", ALL_WEIGHTS, ids=lambda w: cf.spec_name(w))
    def test_bilinearity(self, trefoil256, w):
        h1, h2, k = fourier_fields(256, 3, 13)
        lhs = cf.omega(w, trefoil256, 2.0 * h1 - 0.5 * h2, k)
        rhs = 2.0 * cf.omega(w, trefoil256, h1, k) - 0.5 * cf.omega(w, trefoil256, h2, k)
        scale = abs(lhs) + abs(cf.omega(w, trefoil256, h1, k)) + 1e-12
        assert abs(lhs - rhs) < 1e-12 * scale

    def test_vertical_kernel_refinement_length_weighted(self):
        w = cf.LengthWeighted(1.0, -2.0)
        residuals = []
        for n in (128, 256, 512):
            c = cf.make_curve("trefoil", n)
            s = np.concatenate([[0.0], np.cumsum(c.measure.edge_lengths[:-1])])
            phase = 2 * np.pi * s / c.measure.total_length
            a = 1.0 + 0.4 * np.sin(2 * phase) + 0.3 * np.cos(3 * phase)
            vert = a[:, None] * c.derivative(1)
            k = fourier_fields(n, 1, 14)[0]
            scale = abs(cf.omega(w, c, fourier_fields(n, 1, 15)[0], k)) + 1e-12
            residuals.append(abs(cf.omega(w, c, vert, k)) / scale)
        assert residuals[0] / residuals[1] > 2.0
        assert residuals[1] / residuals[2] > 2.0

    def test_curvature_weighted_vertical_kernel_refinement(self):
        residuals = []
        for n in (128, 256, 512):
            c = cf.make_curve("trefoil", n)
            s = np.concatenate([[0.0], np.cumsum(c.measure.edge_lengths[:-1])])
            phase = 2 * np.pi * s / c.measure.total_length
            a = 1.0 + 0.4 * np.sin(2 * phase) + 0.3 * np.cos(3 * phase)
            vert = a[:, None] * c.derivative(1)
            k = fourier_fields(n, 1, 14)[0]
            scale = abs(cf.omega(cf.CurvatureWeighted(), c, fourier_fields(n, 1, 15)[0], k))
            residuals.append(abs(cf.omega(cf.CurvatureWeighted(), c, vert, k)) / scale)
        assert residuals[0] / residuals[1] > 2.0
        assert residuals[1] / residuals[2] > 2.0


class TestScaleDefect:
    def test_constant_weight(self, circle256):
        assert rel(cf.scale_defect(cf.LengthWeighted(1.0, 0.0), circle256), 3.0) < 1e-12

    def test_scale_invariant_weight(self, trefoil256):
        assert abs(cf.scale_defect(cf.LengthWeighted(1.0, -3.0), trefoil256)) == 0.0

    def test_identity(self, circle256):
        assert cf.scale_defect(cf.Identity(), circle256) == 3.0

    def test_curvature_weight_rejected(self, circle256):
        with pytest.raises(cf.UnsupportedWeightError):
            cf.scale_defect(cf.CurvatureWeighted(), circle256)

    def test_conformal_matches_power_law(self, trefoil256):
        # lambda(c) = l^2 supplied as a custom weight: defect = 5 l^2.
        w = cf.ConformalCustom(
            value=lambda c: c.measure.total_length**2,
            gradient=lambda c: 2.0 * c.measure.total_length * cf.length_gradient(c),
        )
        ell = trefoil256.measure.total_length
        assert rel(cf.scale_defect(w, trefoil256), 5.0 * ell**2) < 1e-12


class TestGradLambda:
    def test_constant_weight_zero(self, trefoil256):
        assert np.abs(cf.grad_lambda(cf.LengthWeighted(3.0, 0.0), trefoil256)).max() == 0.0

    def test_circle_outward_radial(self, circle256):
        g = cf.grad_lambda(cf.LengthWeighted(1.0, 1.0), circle256)
        theta = 2 * np.pi * np.arange(256) / 256
        outward = np.stack([np.cos(theta), np.sin(theta), np.zeros(256)], axis=1)
        assert np.abs(g - outward).max() < 1e-12

    @pytest.mark.parametrize("power", [1.0, -2.0, -3.0])
    def test_fd_validation(self, trefoil256, power):
        w = cf.LengthWeighted(1.5, power)
        g = cf.grad_lambda(w, trefoil256)
        worst = 0.0
        for k in fourier_fields(256, 10, 40):
            fd = fd_directional(
                lambda c: w.phi(c.measure.total_length), trefoil256, k, 1e-5
            )
            lin = cf.l2_inner(trefoil256, g, k)
            worst = max(worst, abs(fd - lin) / (abs(fd) + 1e-12))
        assert worst < 1e-6

    def test_curvature_weight_rejected(self, circle256):
        with pytest.raises(cf.UnsupportedWeightError):
            cf.grad_lambda(cf.CurvatureWeighted(), circle256)


class TestFormInvariances:
    @pytest.mark.parametrize("w", ALL_WEIGHTS, ids=lambda w: cf.spec_name(w))
    def test_cyclic_shift(self, trefoil256, w):
        h, k = fourier_fields(256, 2, 16)
        shift = 101
        cs = cf.DiscreteCurve(np.roll(trefoil256.vertices, shift, axis=0))
        th0 = cf.theta(w, trefoil256, h)
        om0 = cf.omega(w, trefoil256, h, k)
        th1 = cf.theta(w, cs, np.roll(h, shift, axis=0))
        om1 = cf.omega(w, cs, np.roll(h, shift, axis=0), np.roll(k, shift, axis=0))
        assert rel(th1, th0) < 1e-13
        assert rel(om1, om0) < 1e-13

    @pytest.mark.parametrize("w", ALL_WEIGHTS, ids=lambda w: cf.spec_name(w))
    def test_rotation_invariance(self, trefoil256, w):
        h, k = fourier_fields(256, 2, 17)
        rot = rotation_matrix([0.3, -1.0, 0.7], 2.2)
        cr = cf.DiscreteCurve(trefoil256.vertices @ rot.T)
        assert rel(cf.theta(w, cr, h @ rot.T), cf.theta(w, trefoil256, h)) < 1e-12
        assert (
            rel(
                cf.omega(w, cr, h @ rot.T, k @ rot.T),
                cf.omega(w, trefoil256, h, k),
            )
            < 1e-12
        )

    def test_translation_control(self, trefoil256):
        h, k = fourier_fields(256, 2, 18)
        shifted = cf.DiscreteCurve(trefoil256.vertices + np.array([1.0, -2.0, 0.5]))
        om0 = cf.omega(cf.Identity(), trefoil256, h, k)
        om1 = cf.omega(cf.Identity(), shifted, h, k)
        assert rel(om1, om0) < 1e-13  # det form: exactly translation invariant
        th0 = cf.theta(cf.Identity(), trefoil256, h)
        th1 = cf.theta(cf.Identity(), shifted, h)
        assert rel(th1, th0) > 1e-3  # must-fail control: theta is not

    @pytest.mark.parametrize("a", [0.5, 2.0])
    def test_scale_invariance_at_power_minus_three(self, trefoil256, a):
        w = cf.LengthWeighted(2.0, -3.0)
        h = fourier_fields(256, 1, 19)[0]
        ca = cf.DiscreteCurve(a * trefoil256.vertices)
        assert rel(cf.theta(w, ca, a * h), cf.theta(w, trefoil256, h)) < 1e-12


class TestExteriorDerivative:
    """omega = -d theta and closedness, via the verify-module FD oracles."""

    @pytest.mark.parametrize(
        "w",
        [cf.Identity(), cf.LengthWeighted(1.0, 1.0), cf.CurvatureWeighted()],
        ids=lambda w: cf.spec_name(w),
    )
    def test_form_consistency(self, trefoil1024, w):
        rep = cf.check_form_consistency(w, trefoil1024, pairs=3)
        assert rep.passed, rep

    def test_pair_with_equal_fields_trivial(self, trefoil256):
        h = fourier_fields(256, 1, 20)[0]
        assert cf.omega(cf.LengthWeighted(1.0, 1.0), trefoil256, h, h) == 0.0

    def test_closedness(self, trefoil1024):
        rep = cf.check_closedness(cf.LengthWeighted(1.0, -2.0), trefoil1024, triples=2)
        assert rep.passed, rep

    def test_almost_symplectic_not_closed(self, trefoil1024):
        rep = cf.check_closedness_control(cf.LengthWeighted(1.0, 1.0), trefoil1024, triples=2)
        assert rep.passed, rep  # control passes when non-closedness detected

    def test_length_weighted_two_expressions_agree(self, trefoil256):
        # The test-field-derivative expression of the weighted form matches
        # the implemented curve-derivative expression to roundoff (exact
        # summation by parts of the centered difference).
        w = cf.LengthWeighted(1.0, 1.0)
        c = trefoil256
        h, k = fourier_fields(256, 2, 21)
        ident = cf.Identity()
        ell = c.measure.total_length
        dphi = w.dphi(ell)
        dh = cf.arclength_derivative(c, h, 1)
        dk = cf.arclength_derivative(c, k, 1)
        t = c.derivative(1)
        alt = w.phi(ell) * 3.0 * cf.omega_mw(c, h, k) - dphi * (
            cf.l2_inner(c, dh, t) * cf.theta(ident, c, k)
            - cf.l2_inner(c, dk, t) * cf.theta(ident, c, h)
        )
        val = cf.omega(w, c, h, k)
        assert rel(alt, val) < 1e-12
