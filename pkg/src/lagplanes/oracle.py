"""Brute-force search for Lagrangian planes in the null-cone on R^4.

Independent of the circle method in :mod:`lagplanes.census`: every
Lagrangian plane is the graph ``y = M x`` of a symmetric ``M`` in at least
one of the four Darboux charts, and it lies in the null-cone iff the three
coefficients of ``H(x, M x)`` vanish.  We grid-search ``(alpha, beta,
gamma)``, refine promising seeds by damped Newton, and merge the
solutions of all charts.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .census import verify_plane
from .errors import WrongDimension
from .linalg import (
    QuadraticForm,
    SymplecticStructure,
    max_abs,
    orthonormalize,
    standard_omega,
    subspace_distance,
    symplectic_basis,
)
from .nullcone import CHARTS, PlaneBasis, SymplecticChart, chart_graph_basis, symmetric_matrix
from .spectrum import build_system

DEFAULT_BOUND = 10.0
DEFAULT_RESOLUTION = 21
MAX_STEPS = 50
CONVERGED = 1e-11
DEDUP = 1e-6
#: double roots are only located to about sqrt(eps), so they merge more loosely
TANGENT_DEDUP = 1e-4
CURVE_MIN_POINTS = 8
#: seeds kept per chart besides the grid's local minima
SEEDS_PER_CHART = 64
_FD_STEP = 1e-3


@dataclass(frozen=True)
class ChartSolution:
    chart_id: str
    M: tuple  # (alpha, beta, gamma)
    residual: float
    cluster_id: int = -1
    singular: bool = False


@dataclass(frozen=True, eq=False)
class OracleReport:
    isolated_planes: tuple
    curve_detected: bool
    per_chart: dict
    warnings: tuple = field(default=())

    @property
    def count(self) -> int:
        return len(self.isolated_planes)


def _darboux(W: SymplecticStructure) -> np.ndarray:
    Omega = np.asarray(W.Omega)
    if np.array_equal(Omega, standard_omega(4)):
        return np.eye(4)
    return symplectic_basis(W)


def _coefficients(A: np.ndarray, M: np.ndarray) -> np.ndarray:
    """Coefficients (a, b, c) of ``[I; M]^T A [I; M]`` for a batch of symmetric M.

    ``A`` is ``(..., 4, 4)``; ``M`` is ``(..., 3)``; result ``(..., 3)``.
    """
    alpha, beta, gamma = M[..., 0], M[..., 1], M[..., 2]
    G = np.zeros(M.shape[:-1] + (4, 2))
    G[..., 0, 0] = G[..., 1, 1] = 1.0
    G[..., 2, 0], G[..., 2, 1] = alpha, beta
    G[..., 3, 0], G[..., 3, 1] = beta, gamma
    K = np.swapaxes(G, -1, -2) @ A @ G
    return np.stack([K[..., 0, 0], K[..., 0, 1] + K[..., 1, 0], K[..., 1, 1]], axis=-1)


def _normalized(F: np.ndarray, M: np.ndarray) -> np.ndarray:
    # H on an orthonormal basis of the graph is F / (1 + |M|^2) up to O(1) factors
    return np.linalg.norm(F, axis=-1) / (1.0 + np.sum(M * M, axis=-1))


def _jacobian(A: np.ndarray, M: np.ndarray) -> np.ndarray:
    # central differences are exact for the quadratic coefficient map
    J = np.empty(M.shape + (3,))
    for k in range(3):
        e = np.zeros(3)
        e[k] = _FD_STEP
        J[..., :, k] = (_coefficients(A, M + e) - _coefficients(A, M - e)) / (2.0 * _FD_STEP)
    return J


def _newton(A: np.ndarray, M: np.ndarray, steps: int = MAX_STEPS):
    """Damped Newton (least-squares steps, backtracking on |F|) for a batch of seeds.

    Seeds keep iterating past the convergence threshold down to roundoff,
    which double roots need; a seed leaves the batch once no step length
    reduces its residual (its state would not change again).
    """
    M = M.copy()
    F = _coefficients(A, M)
    res = np.linalg.norm(F, axis=-1)
    active = np.flatnonzero(res > 0)
    for _ in range(steps):
        if not len(active):
            break
        Ma, Fa, ra = M[active], F[active], res[active]
        step = -(np.linalg.pinv(_jacobian(A, Ma), rcond=1e-12) @ Fa[..., None])[..., 0]
        improved = np.zeros(len(active), dtype=bool)
        pending = np.arange(len(active))
        t = 1.0
        for _ in range(12):
            trial = Ma[pending] + t * step[pending]
            Ft = _coefficients(A, trial)
            rt = np.linalg.norm(Ft, axis=-1)
            ok = rt < ra[pending]
            done = pending[ok]
            Ma[done], Fa[done], ra[done] = trial[ok], Ft[ok], rt[ok]
            improved[done] = True
            pending = pending[~ok]
            if not len(pending):
                break
            t *= 0.5
        M[active], F[active], res[active] = Ma, Fa, ra
        active = active[improved & (ra > 0)]
    return M, res


def _seed_grid(bound: float, resolution: int) -> np.ndarray:
    axis = np.linspace(-bound, bound, resolution)
    return np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1)


def _select_seeds(A: np.ndarray, grid: np.ndarray) -> np.ndarray:
    F = _coefficients(A, grid)
    r = _normalized(F, grid)
    # local minima over the 26-neighborhood, plus the overall smallest values
    padded = np.pad(r, 1, constant_values=np.inf)
    n = r.shape[0]
    is_min = np.ones_like(r, dtype=bool)
    for di, dj, dk in itertools.product((-1, 0, 1), repeat=3):
        if (di, dj, dk) != (0, 0, 0):
            shifted = padded[1 + di:1 + di + n, 1 + dj:1 + dj + n, 1 + dk:1 + dk + n]
            is_min &= r <= shifted
    best = np.argsort(r.ravel(), kind="stable")[:SEEDS_PER_CHART]
    chosen = np.union1d(np.flatnonzero(is_min.ravel()), best)
    return grid.reshape(-1, 3)[chosen]


def _plane(D: np.ndarray, chart: SymplecticChart, M) -> np.ndarray:
    return orthonormalize(D @ chart_graph_basis(chart, symmetric_matrix(*M)))


def _is_singular(A: np.ndarray, M) -> bool:
    sv = np.linalg.svd(_jacobian(A, np.asarray(M, dtype=float)[None])[0], compute_uv=False)
    return bool(sv[-1] <= 1e-6 * sv[0])


def _merge(items):
    """Keep one entry per plane from ``(residual, B, singular, payload)`` items."""
    kept = []
    for res, B, singular, payload in sorted(items, key=lambda it: it[0]):
        duplicate = False
        for _, B2, singular2, _ in kept:
            radius = TANGENT_DEDUP if singular and singular2 else DEDUP
            if subspace_distance(B, B2) <= radius:
                duplicate = True
                break
        if not duplicate:
            kept.append((res, B, singular, payload))
    return kept


def _chain_components(points: np.ndarray, gap: float):
    n = len(points)
    comp = list(range(n))

    def find(i):
        while comp[i] != i:
            comp[i] = comp[comp[i]]
            i = comp[i]
        return i

    for i, j in itertools.combinations(range(n), 2):
        if np.linalg.norm(points[i] - points[j]) <= gap:
            comp[find(i)] = find(j)
    labels = [find(i) for i in range(n)]
    remap = {lab: k for k, lab in enumerate(dict.fromkeys(labels))}
    return [remap[lab] for lab in labels]


def _on_curve(A: np.ndarray, M: np.ndarray, threshold: float) -> bool:
    """Whether the root ``M`` continues into a one-parameter family of roots.

    A regular root is isolated.  At a singular root we step along the
    Jacobian's null direction and Newton-correct: landing away from ``M``
    means a curve, falling back (or failing) means an isolated tangency.
    """
    _, sv, Vt = np.linalg.svd(_jacobian(A, M[None])[0])
    if sv[-1] > 1e-6 * sv[0]:
        return False
    h = 1e-2 * (1.0 + np.linalg.norm(M))
    trial = (M + h * Vt[-1])[None]
    moved, res = _newton(A, trial)
    return bool(res[0] <= threshold and np.linalg.norm(moved[0] - M) > 0.5 * h)


def chart_scan(Q: QuadraticForm, W: SymplecticStructure, chart: SymplecticChart | str,
               bound: float = DEFAULT_BOUND, resolution: int = DEFAULT_RESOLUTION):
    """Symmetric matrices ``M`` whose chart graph lies in the null-cone.

    The form is normalized to ``max|S| = 1`` and written in a Darboux
    basis of ``W`` first.  Returns deduplicated :class:`ChartSolution`
    values; solutions chained closer than 1.5 grid spacings share a
    ``cluster_id``.
    """
    solutions, _ = _scan(Q, W, chart, bound, resolution)
    return solutions


def _scan(Q, W, chart, bound, resolution):
    if Q.dim != 4:
        raise WrongDimension(f"the chart oracle works on R^4, got dimension {Q.dim}")
    if isinstance(chart, str):
        chart = CHARTS[chart]
    D = _darboux(W)
    S = D.T @ Q.S @ D
    S = S / max_abs(S)
    A = chart.C.T @ S @ chart.C
    seeds = _select_seeds(A, _seed_grid(bound, resolution))
    M, res = _newton(A, seeds)
    ok = res <= CONVERGED
    items = []
    for m, r in zip(M[ok], res[ok]):
        m = tuple(float(v) for v in m)
        items.append((float(r), _plane(D, chart, m), _is_singular(A, m), m))
    sols = [ChartSolution(chart.chart_id, m, r, singular=sg) for r, _, sg, m in _merge(items)]
    spacing = 2.0 * bound / max(resolution - 1, 1)
    if sols:
        labels = _chain_components(np.array([s.M for s in sols]), 1.5 * spacing)
        sols = [ChartSolution(s.chart_id, s.M, s.residual, lab, s.singular)
                for s, lab in zip(sols, labels)]
    return sols, (A, D, chart)


def oracle_census(Q: QuadraticForm, W: SymplecticStructure, bound: float = DEFAULT_BOUND,
                  resolution: int = DEFAULT_RESOLUTION) -> OracleReport:
    """Union of the four chart scans.

    A chain of at least 8 solutions within one chart, or a singular
    solution that continues along its null direction, marks a curve of
    Lagrangian planes.  Isolated planes are the remaining solutions that
    do not continue into a family, deduplicated across charts and
    returned in the input coordinates.
    """
    per_chart = {}
    candidates = []
    curve = False
    warnings = []
    spacing = 2.0 * bound / max(resolution - 1, 1)
    for chart_id, chart in CHARTS.items():
        sols, (A, D, chart) = _scan(Q, W, chart, bound, resolution)
        per_chart[chart_id] = sols
        sizes = {}
        for s in sols:
            sizes[s.cluster_id] = sizes.get(s.cluster_id, 0) + 1
        curve_clusters = {c for c, k in sizes.items() if k >= CURVE_MIN_POINTS}
        curve |= bool(curve_clusters)
        isolated_here = []
        for s in sols:
            # a regular root is isolated whatever its neighbors; chains only flag the curve
            if s.singular and (s.cluster_id in curve_clusters
                               or _on_curve(A, np.array(s.M), CONVERGED)):
                curve = True
                continue
            isolated_here.append(s)
            candidates.append((s.residual, _plane(D, chart, s.M), s.singular, (chart_id, s.M)))
        for a, b in itertools.combinations(isolated_here, 2):
            if np.linalg.norm(np.subtract(a.M, b.M)) < spacing:
                warnings.append(f"InsufficientResolution: chart {chart_id} has distinct "
                                f"solutions closer than one grid spacing")
    planes = [PlaneBasis(B, ("chart",) + payload) for _, B, _, payload in _merge(candidates)]
    return OracleReport(tuple(planes), curve, per_chart, tuple(dict.fromkeys(warnings)))


def oracle_agrees(report: OracleReport, census_result, tol: float = DEDUP) -> bool:
    """Isolated counts, curve flag and plane spans all match a census result."""
    agg = census_result.aggregate
    if report.curve_detected == agg.is_finite:
        return False
    if len(report.isolated_planes) != len(census_result.planes):
        return False
    return all(any(subspace_distance(p.B, c.B) <= tol for c in census_result.planes)
               for p in report.isolated_planes)


def verify_oracle_planes(report: OracleReport, Q: QuadraticForm, W: SymplecticStructure,
                         tol: float = 1e-8):
    sys = build_system(Q, W)
    return [verify_plane(p, sys, tol, strict=False) for p in report.isolated_planes]
