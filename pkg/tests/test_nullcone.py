import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lagplanes.errors import NotInNullCone, WrongSignature
from lagplanes.linalg import QuadraticForm, SymplecticStructure, orthonormalize, subspace_distance
from lagplanes.nullcone import (
    CHARTS,
    CirclePoint,
    Component,
    PlaneBasis,
    adapted_basis,
    chart_graph_basis,
    circle_matrix,
    lagrangian_check,
    lagrangian_residual,
    null_cone_residual,
    plane_from_circle,
    plane_membership,
    recovered_matrix,
    restrict_to_chart_graph,
    symmetric_matrix,
)
from lagplanes.normal_forms import (
    elliptic_double_nilpotent,
    hyperbolic_quadruplet,
    hyperbolic_real_simple,
)

from .conftest import coordinate_plane, random_signature_zero

W4 = SymplecticStructure.standard(4)
ADAPTED = QuadraticForm(np.diag([-1.0, -1.0, 1.0, 1.0]))
coef = st.floats(-5.0, 5.0, allow_nan=False)
angle = st.floats(0.0, 2 * np.pi, allow_nan=False)
component = st.sampled_from(list(Component))


def frame_for(seed):
    Q = QuadraticForm(random_signature_zero(np.random.default_rng(seed)))
    return Q, adapted_basis(Q)


class TestAdaptedBasis:
    def test_already_adapted(self):
        frame = adapted_basis(ADAPTED)
        np.testing.assert_allclose(np.abs(frame.P), np.eye(4), atol=1e-15)

    def test_block_swap(self):
        frame = adapted_basis(QuadraticForm(np.diag([1.0, 1.0, -1.0, -1.0])))
        swap = np.block([[np.zeros((2, 2)), np.eye(2)], [np.eye(2), np.zeros((2, 2))]])
        np.testing.assert_allclose(np.abs(frame.P), swap, atol=1e-15)

    def test_hyperbolic_form(self):
        Q = QuadraticForm(hyperbolic_real_simple(1.0, 2.0))
        frame = adapted_basis(Q)
        residual = frame.P.T @ Q.S @ frame.P - np.diag([-1.0, -1.0, 1.0, 1.0])
        assert np.max(np.abs(residual)) <= 1e-8
        np.testing.assert_allclose(frame.P @ frame.Pinv, np.eye(4), atol=1e-14)

    @pytest.mark.parametrize("diag,inert", [([1, 2, 3, 4], (4, 0, 0)), ([1, 1, 1, -1], (3, 1, 0))])
    def test_wrong_signature(self, diag, inert):
        with pytest.raises(WrongSignature) as info:
            adapted_basis(QuadraticForm(np.diag(np.array(diag, dtype=float))))
        assert tuple(info.value.inertia) == inert


class TestCircles:
    def test_identity_graph(self):
        plane = plane_from_circle(adapted_basis(ADAPTED), CirclePoint(Component.ROTATION, 0.0))
        expected = np.array([[1, 0], [0, 1], [1, 0], [0, 1]]) / np.sqrt(2)
        assert subspace_distance(plane.B, expected) < 1e-15

    def test_minus_identity_graph(self):
        plane = plane_from_circle(adapted_basis(ADAPTED), CirclePoint(Component.ROTATION, np.pi))
        expected = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]])
        assert subspace_distance(plane.B, expected) < 1e-15

    def test_reflection_matrix(self):
        M = circle_matrix(Component.REFLECTION, 0.3)
        assert np.linalg.det(M) == pytest.approx(-1.0)
        np.testing.assert_allclose(M.T @ M, np.eye(2), atol=1e-15)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**31), component, angle)
    def test_planes_lie_in_null_cone(self, seed, comp, theta):
        Q, frame = frame_for(seed)
        plane = plane_from_circle(frame, CirclePoint(comp, theta))
        assert null_cone_residual(Q, plane.B) <= 1e-12

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**31), component, angle)
    def test_membership_roundtrip(self, seed, comp, theta):
        Q, frame = frame_for(seed)
        pt = plane_membership(frame, Q, plane_from_circle(frame, CirclePoint(comp, theta)))
        assert pt.component is comp
        gap = abs((pt.theta - theta + np.pi) % (2 * np.pi) - np.pi)
        assert gap < 1e-9

    def test_membership_of_coordinate_plane(self):
        Q = QuadraticForm(hyperbolic_real_simple(1.0, 2.0))
        frame = adapted_basis(Q)
        plane = PlaneBasis(coordinate_plane("p1", "p2"))
        pt = plane_membership(frame, Q, plane)
        back = plane_from_circle(frame, pt)
        assert subspace_distance(back.B, plane.B) < 1e-12

    def test_membership_of_symplectic_plane(self):
        Q = QuadraticForm(hyperbolic_real_simple(1.0, 1.0))
        frame = adapted_basis(Q)
        # sample the circles for a null-cone plane on which omega does not vanish
        planes = [plane_from_circle(frame, CirclePoint(c, t))
                  for c in Component for t in np.linspace(0, 2 * np.pi, 9)[:-1]]
        plane = max(planes, key=lambda p: lagrangian_residual(p.B, W4))
        assert lagrangian_residual(plane.B, W4) > 0.1
        pt = plane_membership(frame, Q, PlaneBasis(plane.B))
        assert subspace_distance(plane_from_circle(frame, pt).B, plane.B) < 1e-12

    def test_membership_rejects_outside_planes(self):
        Q = QuadraticForm(hyperbolic_real_simple(1.0, 2.0))
        with pytest.raises(NotInNullCone):
            plane_membership(adapted_basis(Q), Q, PlaneBasis(coordinate_plane("q2", "p2")))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**31), component, angle)
    def test_recovered_matrix_orthogonal(self, seed, comp, theta):
        Q, frame = frame_for(seed)
        M = recovered_matrix(frame, plane_from_circle(frame, CirclePoint(comp, theta)))
        np.testing.assert_allclose(M.T @ M, np.eye(2), atol=1e-9)

    def test_regauged_frame_spans_same_circles(self, rng):
        Q, frame = frame_for(5)
        Qx, _ = np.linalg.qr(rng.standard_normal((2, 2)))
        Qy, _ = np.linalg.qr(rng.standard_normal((2, 2)))
        other = frame.regauged(Qx, Qy)
        np.testing.assert_allclose(other.P.T @ Q.S @ other.P, np.diag([-1.0, -1.0, 1.0, 1.0]),
                                   atol=1e-12)
        for theta in np.linspace(0, 2 * np.pi, 7):
            for comp in Component:
                plane = plane_from_circle(other, CirclePoint(comp, theta))
                pt = plane_membership(frame, Q, plane)
                assert subspace_distance(plane_from_circle(frame, pt).B, plane.B) < 1e-10


class TestTwoCircles:
    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**31), angle, angle)
    def test_each_null_vector_lies_on_one_plane_per_circle(self, seed, a, b):
        Q, frame = frame_for(seed)
        x = np.array([np.cos(a), np.sin(a)])
        y = np.array([np.cos(b), np.sin(b)])
        v = frame.P @ np.concatenate([x, y])
        thetas = {Component.ROTATION: b - a, Component.REFLECTION: b + a}
        containing = []
        grid = np.linspace(0, 2 * np.pi, 721)[:-1]
        for comp in Component:
            B = plane_from_circle(frame, CirclePoint(comp, thetas[comp])).B
            vn = v / np.linalg.norm(v)
            assert np.linalg.norm(vn - B @ (B.T @ vn)) < 1e-12
            containing.append(B)
            # away from the solution angle v leaves the plane
            for t in grid:
                if abs((t - thetas[comp] + np.pi) % (2 * np.pi) - np.pi) > 0.05:
                    Bt = plane_from_circle(frame, CirclePoint(comp, t)).B
                    assert np.linalg.norm(vn - Bt @ (Bt.T @ vn)) > 1e-3
        # the two planes meet exactly in the line through v
        sv = np.linalg.svd(np.hstack(containing), compute_uv=False)
        assert sv[2] > 1e-6 * sv[0]

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**31), component, angle, angle, angle)
    def test_no_three_dimensional_subspace(self, seed, comp, theta, a, b):
        Q, frame = frame_for(seed)
        B = plane_from_circle(frame, CirclePoint(comp, theta)).B
        w = frame.P @ np.array([np.cos(a), np.sin(a), np.cos(b), np.sin(b)])
        w = w - B @ (B.T @ w)
        if np.linalg.norm(w) < 1e-3:
            return
        V = orthonormalize(np.column_stack([B, w]))
        assert null_cone_residual(Q, V) > 1e-6


class TestCharts:
    def test_charts_are_symplectic(self):
        Omega = W4.Omega
        for chart in CHARTS.values():
            np.testing.assert_array_equal(chart.C.T @ Omega @ chart.C, Omega)

    @settings(max_examples=40, deadline=None)
    @given(coef, coef, coef, st.floats(0.2, 3.0), st.sampled_from([1.0, -1.0]))
    def test_elliptic_chart_i(self, a, b, c, lam, sign):
        Q = QuadraticForm(elliptic_double_nilpotent(sign, lam))
        got = 2 * np.array(restrict_to_chart_graph(Q, CHARTS["i"], (a, b, c)))
        expected = [sign + 2 * lam * b, 2 * lam * (c - a), sign - 2 * lam * b]
        np.testing.assert_allclose(got, expected, atol=1e-12 * (1 + lam) * (1 + abs(a) + abs(b) + abs(c)))

    @settings(max_examples=40, deadline=None)
    @given(coef, coef, coef, coef, coef)
    def test_quadruplet_chart_i(self, a, b, c, kappa, lam):
        Q = QuadraticForm(hyperbolic_quadruplet(kappa, lam))
        got = restrict_to_chart_graph(Q, CHARTS["i"], (a, b, c))
        expected = [kappa * a - lam * b, 2 * kappa * b + lam * (a - c), kappa * c + lam * b]
        np.testing.assert_allclose(got, expected, atol=1e-11)

    @settings(max_examples=40, deadline=None)
    @given(coef, coef, coef, coef, coef)
    def test_real_semisimple_chart_i(self, a, b, c, l1, l2):
        Q = QuadraticForm(hyperbolic_real_simple(l1, l2))
        got = restrict_to_chart_graph(Q, CHARTS["i"], (a, b, c))
        np.testing.assert_allclose(got, [l1 * a, (l1 + l2) * b, l2 * c], atol=1e-11)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**31), st.sampled_from(list(CHARTS)), coef, coef, coef, coef, coef)
    def test_restriction_evaluates_h(self, seed, chart_id, a, b, c, x1, x2):
        Q = QuadraticForm(random_signature_zero(np.random.default_rng(seed)))
        chart = CHARTS[chart_id]
        ka, kb, kc = restrict_to_chart_graph(Q, chart, (a, b, c))
        point = chart_graph_basis(chart, symmetric_matrix(a, b, c)) @ np.array([x1, x2])
        scale = 1 + (abs(a) + abs(b) + abs(c) + 1) ** 2 * (x1 * x1 + x2 * x2)
        assert ka * x1 * x1 + kb * x1 * x2 + kc * x2 * x2 == pytest.approx(Q(point), abs=1e-11 * scale)

    @pytest.mark.parametrize("chart_id", list(CHARTS))
    def test_zero_matrix_gives_coordinate_plane(self, chart_id):
        S = random_signature_zero(np.random.default_rng(3))
        C = CHARTS[chart_id].C
        K = (C.T @ S @ C)[:2, :2]
        got = restrict_to_chart_graph(QuadraticForm(S), CHARTS[chart_id], np.zeros((2, 2)))
        np.testing.assert_allclose(got, [K[0, 0], 2 * K[0, 1], K[1, 1]], atol=1e-14)


class TestLagrangian:
    def test_coordinate_planes(self):
        assert lagrangian_check(PlaneBasis(coordinate_plane("q1", "q2")), W4)
        assert not lagrangian_check(PlaneBasis(coordinate_plane("q2", "p2")), W4)

    @settings(max_examples=40, deadline=None)
    @given(st.sampled_from(list(CHARTS)), coef, coef, coef, coef)
    def test_graph_lagrangian_iff_symmetric(self, chart_id, a, b, c, skew):
        chart = CHARTS[chart_id]
        sym = symmetric_matrix(a, b, c)
        assert lagrangian_check(PlaneBasis(orthonormalize(chart_graph_basis(chart, sym))), W4)
        if abs(skew) > 1e-3:
            M = sym + np.array([[0.0, skew], [-skew, 0.0]])
            B = orthonormalize(chart_graph_basis(chart, M))
            assert not lagrangian_check(PlaneBasis(B), W4)
