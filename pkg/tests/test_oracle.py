import numpy as np
import pytest

from lagplanes.census import census, verify_plane
from lagplanes.errors import WrongDimension
from lagplanes.linalg import QuadraticForm, SymplecticStructure, standard_omega
from lagplanes.normal_forms import CASES, R4_CASES, make_case, quadratic_matrix, random_params
from lagplanes.nullcone import CHARTS, restrict_to_chart_graph
from lagplanes.oracle import chart_scan, oracle_agrees, oracle_census, verify_oracle_planes
from lagplanes.spectrum import build_system

from .conftest import coordinate_plane, has_plane

W4 = SymplecticStructure.standard(4)


def form(case, **params):
    return QuadraticForm(CASES[case](**params))


class TestChartScan:
    def test_quadruplet_chart_i(self):
        (sol,) = chart_scan(form("hyperbolic-quadruplet"), W4, "i")
        np.testing.assert_allclose(sol.M, 0.0, atol=1e-12)

    def test_elliptic_nilpotent_chart_i(self):
        assert chart_scan(form("elliptic-double-nilpotent"), W4, "i") == []

    @pytest.mark.parametrize("chart_id", ["iii", "iv"])
    def test_elliptic_nilpotent_outside_chart_ii(self, chart_id):
        assert chart_scan(form("elliptic-double-nilpotent", sign=-1.0), W4, chart_id) == []

    def test_semisimple_curve_chart_iii(self):
        sols = chart_scan(form("hyperbolic-real-double-ss"), W4, CHARTS["iii"])
        M = np.array([s.M for s in sols])
        assert len(sols) >= 8
        np.testing.assert_allclose(M[:, [0, 2]], 0.0, atol=1e-9)
        assert np.ptp(M[:, 1]) > 10
        assert len({s.cluster_id for s in sols}) == 1

    @pytest.mark.parametrize("case", ["hyperbolic-real-simple", "hyperbolic-quadruplet"])
    def test_solutions_zero_restriction(self, case):
        Q = form(case)
        for chart_id, chart in CHARTS.items():
            for sol in chart_scan(Q, W4, chart_id):
                coeffs = restrict_to_chart_graph(Q, chart, sol.M)
                assert max(map(abs, coeffs)) <= 1e-9 * np.max(np.abs(Q.S))

    def test_wrong_dimension(self):
        with pytest.raises(WrongDimension):
            chart_scan(form("r8-h1"), SymplecticStructure.standard(8), "i")


class TestOracleCensus:
    def test_real_distinct(self):
        rep = oracle_census(QuadraticForm(quadratic_matrix(2, {("p1", "q1"): 1.0, ("p2", "q2"): 2.0})), W4)
        assert rep.count == 4
        assert not rep.curve_detected
        for zero in [("p1", "p2"), ("q1", "q2"), ("q1", "p2"), ("p1", "q2")]:
            assert has_plane(rep.isolated_planes, coordinate_plane(*zero), 1e-8)

    def test_real_semisimple(self):
        rep = oracle_census(QuadraticForm(quadratic_matrix(2, {("p1", "q1"): 1.0, ("p2", "q2"): 1.0})), W4)
        assert rep.curve_detected
        assert rep.count == 2
        assert has_plane(rep.isolated_planes, coordinate_plane("q1", "q2"), 1e-8)
        assert has_plane(rep.isolated_planes, coordinate_plane("p1", "p2"), 1e-8)

    def test_elliptic_distinct(self):
        S = quadratic_matrix(2, {("p1", "p1"): 0.5, ("q1", "q1"): 0.5,
                                 ("p2", "p2"): -1.0, ("q2", "q2"): -1.0})
        rep = oracle_census(QuadraticForm(S), W4)
        assert rep.count == 0
        assert not rep.curve_detected

    def test_isolated_planes_distinct(self):
        rep = oracle_census(form("hyperbolic-real-double-nilpotent"), W4)
        planes = rep.isolated_planes
        for i, p in enumerate(planes):
            assert not has_plane(planes[i + 1:], p.B, 1e-6)

    @pytest.mark.parametrize("case", R4_CASES)
    def test_agrees_with_census(self, case):
        rng = np.random.default_rng(len(case))
        for seed in range(3):
            Q, W, _ = make_case(case, random_params(case, rng), seed=seed, conjugate=True)
            rep = oracle_census(Q, W)
            assert oracle_agrees(rep, census(Q, W))
            for vr in verify_oracle_planes(rep, Q, W):
                assert vr.passes(1e-8)

    def test_every_solution_verifies(self):
        Q, W, _ = make_case("hyperbolic-quadruplet", seed=5, conjugate=True)
        sys = build_system(Q, W)
        for plane in oracle_census(Q, W).isolated_planes:
            assert verify_plane(plane, sys, 1e-8).passes(1e-8)

    def test_non_standard_omega(self, rng):
        A = rng.standard_normal((4, 4)) + 3 * np.eye(4)
        S = CASES["hyperbolic-real-double-nilpotent"]()
        Q = QuadraticForm(A.T @ S @ A)
        W = SymplecticStructure(A.T @ standard_omega(4) @ A)
        rep = oracle_census(Q, W)
        assert oracle_agrees(rep, census(Q, W))
        assert rep.count == 3

    def test_deterministic(self):
        Q, W, _ = make_case("hyperbolic-real-simple", seed=2, conjugate=True)
        a, b = oracle_census(Q, W), oracle_census(Q, W)
        assert [p.provenance for p in a.isolated_planes] == [p.provenance for p in b.isolated_planes]
