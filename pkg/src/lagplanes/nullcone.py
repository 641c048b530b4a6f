"""Planes in the null-cone of a signature-zero form on R^4.

In an adapted basis the form reads ``|y|^2 - |x|^2`` with ``x, y`` in R^2,
and every plane in the null-cone is the graph ``y = M x`` of an orthogonal
2x2 matrix ``M``.  The planes therefore form two circles, the rotations
``M(theta)`` and the reflections ``M(theta) diag(1, -1)``.

The second half of the module provides the four Darboux charts in which a
Lagrangian plane is the graph of a symmetric matrix.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import NotInNullCone, WrongDimension, WrongSignature
from .linalg import (
    DEFAULT_TOL,
    QuadraticForm,
    SymplecticStructure,
    congruence_diagonalize,
    inertia,
    max_abs,
    orthonormalize,
    subspace_distance,
)

#: principal-angle threshold (sine) below which two planes are the same plane
SAME_PLANE_TOL = 1e-7


class Component(str, enum.Enum):
    ROTATION = "Rotation"
    REFLECTION = "Reflection"

    @property
    def det(self) -> int:
        return 1 if self is Component.ROTATION else -1


@dataclass(frozen=True, eq=False)
class AdaptedFrame:
    """Change of basis with ``P^T S P = diag(-1, -1, +1, +1)``."""

    P: np.ndarray
    Pinv: np.ndarray
    ell: int = 2

    def regauged(self, Qx, Qy) -> "AdaptedFrame":
        """Another adapted frame, ``P diag(Qx, Qy)`` for ``Qx, Qy`` in O(2)."""
        G = np.zeros((4, 4))
        G[:2, :2] = Qx
        G[2:, 2:] = Qy
        return AdaptedFrame(self.P @ G, G.T @ self.Pinv, self.ell)


@dataclass(frozen=True, eq=False)
class PlaneBasis:
    """Subspace given by orthonormal columns ``B``; ``provenance`` records its origin."""

    B: np.ndarray
    provenance: tuple = field(default=())

    @property
    def k(self) -> int:
        return self.B.shape[1]

    def same_plane(self, other: "PlaneBasis", tol: float = SAME_PLANE_TOL) -> bool:
        return subspace_distance(self.B, other.B) <= tol

    def mapped(self, T, provenance=None) -> "PlaneBasis":
        """Image of the plane under the linear map ``T``."""
        return PlaneBasis(orthonormalize(np.asarray(T) @ self.B),
                          self.provenance if provenance is None else provenance)


@dataclass(frozen=True)
class CirclePoint:
    component: Component
    theta: float

    @property
    def M(self) -> np.ndarray:
        return circle_matrix(self.component, self.theta)


def circle_matrix(component: Component, theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    R = np.array([[c, -s], [s, c]])
    if component is Component.REFLECTION:
        R = R @ np.diag([1.0, -1.0])
    return R


def adapted_basis(Q: QuadraticForm, tol: float = DEFAULT_TOL) -> AdaptedFrame:
    """Adapted frame for a form of inertia (2, 2, 0) on R^4.

    Raises
    ------
    WrongSignature
        carrying the actual inertia, for definite or index-1 forms (and
        degenerate ones), whose null-cones contain no planes.
    """
    if Q.dim != 4:
        raise WrongDimension(f"adapted_basis works on R^4, got dimension {Q.dim}")
    inert = inertia(Q, tol)
    if tuple(inert) != (2, 2, 0):
        raise WrongSignature(inert)
    P, _ = congruence_diagonalize(Q, tol)
    return AdaptedFrame(P, np.linalg.inv(P), 2)


def graph_basis(frame: AdaptedFrame, M) -> np.ndarray:
    """Unnormalized basis ``P [I; M]`` of the plane ``y = M x``."""
    return frame.P @ np.vstack([np.eye(2), np.asarray(M)])


def plane_from_circle(frame: AdaptedFrame, pt: CirclePoint) -> PlaneBasis:
    B = orthonormalize(graph_basis(frame, pt.M))
    return PlaneBasis(B, ("circle", pt.component.value, float(pt.theta)))


def null_cone_residual(Q: QuadraticForm, B) -> float:
    """``max |B^T S B|`` relative to ``max|S|``; zero iff H vanishes on span(B)."""
    B = np.asarray(B)
    scale = max_abs(Q.S)
    return max_abs(B.T @ Q.S @ B) / scale if scale else 0.0


def plane_membership(frame: AdaptedFrame, Q: QuadraticForm, plane: PlaneBasis,
                     tol: float = DEFAULT_TOL) -> CirclePoint:
    """Locate a null-cone plane on one of the two circles.

    Returns the circle point whose graph plane is ``plane``.  ``Q`` is the
    form the frame was adapted to; it is used for the containment check.
    """
    B = np.asarray(plane.B)
    if B.shape != (4, 2):
        raise WrongDimension(f"expected a 4x2 plane basis, got {B.shape}")
    res = null_cone_residual(Q, B)
    if res > tol:
        raise NotInNullCone("plane is not contained in the null-cone", res)
    Z = frame.Pinv @ B
    # the x-projection is injective on null-cone planes
    M = Z[2:] @ np.linalg.inv(Z[:2])
    component = Component.ROTATION if np.linalg.det(M) > 0 else Component.REFLECTION
    theta = float(np.arctan2(M[1, 0], M[0, 0]) % (2.0 * np.pi))
    return CirclePoint(component, theta)


def recovered_matrix(frame: AdaptedFrame, plane: PlaneBasis) -> np.ndarray:
    """The matrix M with ``plane = graph(M)`` in adapted coordinates (no checks)."""
    Z = frame.Pinv @ np.asarray(plane.B)
    return Z[2:] @ np.linalg.inv(Z[:2])


# -- symplectic charts ------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SymplecticChart:
    """Darboux splitting ``(x, y)`` of R^4 with ``omega = dy1^dx1 + dy2^dx2``.

    ``C`` maps chart coordinates ``(x1, x2, y1, y2)`` to ``(q1, q2, p1, p2)``.
    """

    chart_id: str
    description: str
    C: np.ndarray


def _chart(chart_id, description, rows):
    C = np.zeros((4, 4))
    # rows: for each of (q1, q2, p1, p2), (chart coordinate index, sign)
    for i, (j, sign) in enumerate(rows):
        C[i, j] = sign
    C.setflags(write=False)
    return SymplecticChart(chart_id, description, C)


X1, X2, Y1, Y2 = range(4)

CHARTS = {
    "i": _chart("i", "y = (p1, p2), x = (q1, q2)",
                [(X1, 1), (X2, 1), (Y1, 1), (Y2, 1)]),
    "ii": _chart("ii", "y = (q1, q2), x = (-p1, -p2)",
                 [(Y1, 1), (Y2, 1), (X1, -1), (X2, -1)]),
    "iii": _chart("iii", "y = (q1, p2), x = (-p1, q2)",
                  [(Y1, 1), (X2, 1), (X1, -1), (Y2, 1)]),
    "iv": _chart("iv", "y = (p1, q2), x = (q1, -p2)",
                 [(X1, 1), (Y2, 1), (Y1, 1), (X2, -1)]),
}


def symmetric_matrix(alpha: float, beta: float, gamma: float) -> np.ndarray:
    return np.array([[alpha, beta], [beta, gamma]])


def chart_graph_basis(chart: SymplecticChart, M) -> np.ndarray:
    """Unnormalized basis ``C [I; M]`` of the chart graph ``y = M x``."""
    return chart.C @ np.vstack([np.eye(2), np.asarray(M, dtype=float)])


def restrict_to_chart_graph(Q: QuadraticForm, chart: SymplecticChart, M):
    """Coefficients ``(a, b, c)`` of ``H(x, Mx) = a x1^2 + b x1 x2 + c x2^2``.

    ``M`` is a symmetric 2x2 matrix or an ``(alpha, beta, gamma)`` triple.
    """
    if Q.dim != 4:
        raise WrongDimension(f"charts live on R^4, got dimension {Q.dim}")
    M = np.asarray(M, dtype=float)
    if M.shape == (3,):
        M = symmetric_matrix(*M)
    G = chart_graph_basis(chart, M)
    K = G.T @ Q.S @ G
    return float(K[0, 0]), float(K[0, 1] + K[1, 0]), float(K[1, 1])


def lagrangian_check(plane: PlaneBasis, W: SymplecticStructure,
                     tol: float = DEFAULT_TOL) -> bool:
    """True iff omega vanishes on the span (``max |omega(b_i, b_j)| <= tol max|Omega|``)."""
    B = np.asarray(plane.B)
    if 2 * B.shape[1] != W.dim:
        raise WrongDimension(f"a Lagrangian subspace of R^{W.dim} has dimension "
                             f"{W.dim // 2}, got {B.shape[1]}")
    return lagrangian_residual(B, W) <= tol


def lagrangian_residual(B, W: SymplecticStructure) -> float:
    B = np.asarray(B)
    return max_abs(B.T @ W.Omega @ B) / max_abs(W.Omega)
