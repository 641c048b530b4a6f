"""Lagrangian planes in the null-cone of a signature-zero system on R^4.

The symplectic pairing of the two graph vectors of the null-cone plane at
angle ``theta`` is ``g(theta) = c0 + c1 cos(theta) + c2 sin(theta)`` on each
circle (``M^T J M = det(M) J`` for orthogonal ``M`` kills every quadratic
term).  Lagrangian planes are exactly the zeros of ``g``, so each circle
contributes none, one (tangency), two, or all of its planes.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateSystem,
    NotInNullCone,
    NotInvariant,
    NotLagrangian,
    TrigFormViolation,
    WrongDimension,
    WrongSignature,
)
from .linalg import DEFAULT_TOL, QuadraticForm, SymplecticStructure, inertia, max_abs
from .nullcone import (
    AdaptedFrame,
    CirclePoint,
    Component,
    PlaneBasis,
    adapted_basis,
    circle_matrix,
    graph_basis,
    lagrangian_residual,
    null_cone_residual,
    plane_from_circle,
)
from .spectrum import HamiltonianSystem, Multiplicity, SpectrumReport, build_system, classify

DEFAULT_TANGENCY_TOL = 1e-7
ROOT_MERGE = 1e-6


class OutcomeKind(str, enum.Enum):
    NO_ROOTS = "NoRoots"
    ONE_ROOT = "OneRoot"
    TWO_ROOTS = "TwoRoots"
    ALL_LAGRANGIAN = "AllLagrangian"


class DynamicsLabel(str, enum.Enum):
    STABLE = "StableManifold"
    UNSTABLE = "UnstableManifold"
    SADDLE = "Saddle"
    PERIODIC = "Periodic"


@dataclass(frozen=True)
class Aggregate:
    """Plane count: ``Finite(k)``, ``Infinite`` or ``InfinitePlusTwo``."""

    kind: str
    k: int | None = None

    @classmethod
    def finite(cls, k: int) -> "Aggregate":
        return cls("Finite", int(k))

    @property
    def is_finite(self) -> bool:
        return self.kind == "Finite"

    def __str__(self) -> str:
        return f"Finite({self.k})" if self.is_finite else self.kind


INFINITE = Aggregate("Infinite")
INFINITE_PLUS_TWO = Aggregate("InfinitePlusTwo")

#: plane count for each multiplicity structure of a signature-zero system on R^4
EXPECTED_COUNT = {
    Multiplicity.SIMPLE_IMAGINARY: Aggregate.finite(0),
    Multiplicity.DOUBLE_IMAGINARY_NILPOTENT: Aggregate.finite(1),
    Multiplicity.QUADRUPLET: Aggregate.finite(2),
    Multiplicity.DOUBLE_REAL_NILPOTENT: Aggregate.finite(3),
    Multiplicity.SIMPLE_REAL: Aggregate.finite(4),
    Multiplicity.DOUBLE_IMAGINARY_SEMISIMPLE: INFINITE,
    Multiplicity.DOUBLE_REAL_SEMISIMPLE: INFINITE_PLUS_TWO,
}


@dataclass(frozen=True)
class TrigAffine:
    c0: float
    c1: float
    c2: float
    probe_scale: float = 0.0

    def __call__(self, theta):
        return self.c0 + self.c1 * np.cos(theta) + self.c2 * np.sin(theta)

    @property
    def amplitude(self) -> float:
        return math.hypot(self.c1, self.c2)


@dataclass(frozen=True)
class CircleOutcome:
    kind: OutcomeKind
    roots: tuple = ()
    tangency_flag: bool = False
    margin: float = math.inf  # (|c0| - r) / scale; distance from the tangency boundary


@dataclass(frozen=True)
class VerificationReport:
    max_H_on_plane: float
    max_omega_on_plane: float
    invariance_defect: float
    dynamics_label: DynamicsLabel | None
    restricted_eigenvalues: tuple = ()

    def passes(self, tol: float) -> bool:
        return max(self.max_H_on_plane, self.max_omega_on_plane, self.invariance_defect) <= tol


@dataclass(frozen=True, eq=False)
class CensusResult:
    rotation: CircleOutcome | None
    reflection: CircleOutcome | None
    aggregate: Aggregate
    planes: tuple = ()
    verification: tuple = ()
    reason: str = ""
    flags: tuple = ()
    spectrum: SpectrumReport | None = None
    consistent: bool | None = None
    frame: AdaptedFrame | None = None
    trig: dict = field(default_factory=dict)

    def outcome(self, component: Component) -> CircleOutcome | None:
        return self.rotation if component is Component.ROTATION else self.reflection


def _pairing_on_circle(frame: AdaptedFrame, Omega, component: Component, theta: float) -> float:
    U = graph_basis(frame, circle_matrix(component, theta))
    return float(U[:, 0] @ Omega @ U[:, 1])


def omega_restriction(frame: AdaptedFrame, W: SymplecticStructure,
                      component: Component, tol: float = DEFAULT_TOL) -> TrigAffine:
    """Coefficients of ``theta -> omega(u1(theta), u2(theta))`` on one circle.

    Raises ``TrigFormViolation`` if the probe at ``3 pi / 2`` disagrees with
    the affine-trigonometric form built from the other three probes.
    """
    Omega = np.asarray(W.Omega)
    g0, g1, g2, g3 = (_pairing_on_circle(frame, Omega, component, k * np.pi / 2)
                      for k in range(4))
    c0 = 0.5 * (g0 + g2)
    c1 = 0.5 * (g0 - g2)
    c2 = g1 - c0
    adapted_scale = max_abs(frame.P.T @ Omega @ frame.P)
    probe_scale = max(abs(g0), abs(g1), abs(g2), abs(g3), adapted_scale * np.finfo(float).eps)
    # roundoff in g is relative to the adapted pairing, not to g itself
    if abs(g3 - (c0 - c2)) > tol * max(probe_scale, adapted_scale):
        raise TrigFormViolation(f"{component.value} circle: g(3pi/2) = {g3:.6e} but "
                                f"c0 - c2 = {c0 - c2:.6e}")
    return TrigAffine(c0, c1, c2, probe_scale)


def circle_roots(t: TrigAffine, tol: float, scale: float,
                 tangency_tol: float | None = None) -> CircleOutcome:
    """Zeros of ``c0 + c1 cos(theta) + c2 sin(theta)`` on ``[0, 2 pi)``.

    ``tangency_tol`` (default ``tol``) sets the band around ``|c0| = r``
    treated as a double root.
    """
    band = tol * scale
    tband = (tol if tangency_tol is None else tangency_tol) * scale
    c0, c1, c2 = t.c0, t.c1, t.c2
    if max(abs(c0), abs(c1), abs(c2)) <= band:
        return CircleOutcome(OutcomeKind.ALL_LAGRANGIAN, margin=0.0)
    r = math.hypot(c1, c2)
    if r <= band:
        return CircleOutcome(OutcomeKind.NO_ROOTS, margin=(abs(c0) - r) / scale)
    phi = math.atan2(c2, c1)
    diff = abs(c0) - r
    margin = diff / scale
    two_pi = 2.0 * math.pi
    if abs(diff) <= tband:
        theta = (phi + (math.pi if c0 > 0 else 0.0)) % two_pi
        return CircleOutcome(OutcomeKind.ONE_ROOT, (theta,), True, margin)
    if diff > 0:
        return CircleOutcome(OutcomeKind.NO_ROOTS, margin=margin)
    half = math.acos(max(-1.0, min(1.0, -c0 / r)))
    roots = sorted({(phi - half) % two_pi, (phi + half) % two_pi})
    gap = abs(roots[-1] - roots[0])
    if len(roots) == 1 or min(gap, two_pi - gap) < ROOT_MERGE:
        return CircleOutcome(OutcomeKind.ONE_ROOT, (roots[0],), True, margin)
    return CircleOutcome(OutcomeKind.TWO_ROOTS, tuple(roots), False, margin)


def _dynamics_label(eigs, scale: float) -> DynamicsLabel | None:
    thr = 1e-7 * max(scale, np.finfo(float).tiny)
    re = np.real(eigs)
    if np.all(np.abs(re) <= thr):
        return DynamicsLabel.PERIODIC
    if np.all(re < -thr):
        return DynamicsLabel.STABLE
    if np.all(re > thr):
        return DynamicsLabel.UNSTABLE
    if np.any(re < -thr) and np.any(re > thr):
        return DynamicsLabel.SADDLE
    return None


def verify_plane(plane: PlaneBasis, sys: HamiltonianSystem, tol: float = DEFAULT_TOL,
                 strict: bool = True) -> VerificationReport:
    """Null-cone, Lagrangian and invariance residuals of a plane, plus its dynamics.

    All residuals are scale free: ``H`` and ``omega`` residuals are relative
    to the max-abs entries of ``S`` and ``Omega``; the invariance defect is
    the ``(k+1)``-th singular value of ``[B | L B / max|L|]``.  With
    ``strict`` a residual above ``tol`` raises the matching error.
    """
    B = np.asarray(plane.B)
    k = B.shape[1]
    h_res = null_cone_residual(sys.Q, B)
    w_res = lagrangian_residual(B, sys.W)
    L = np.asarray(sys.L)
    lscale = max_abs(L)
    LB = L @ B / lscale if lscale else L @ B
    sv = np.linalg.svd(np.hstack([B, LB]), compute_uv=False)
    inv_res = float(sv[k]) if len(sv) > k else 0.0
    Lr = B.T @ L @ B
    eigs = np.linalg.eigvals(Lr)
    label = _dynamics_label(eigs, max(np.max(np.abs(eigs)), 0.0))
    if strict:
        if h_res > tol:
            raise NotInNullCone("H does not vanish on the plane", h_res)
        if w_res > tol:
            raise NotLagrangian("omega does not vanish on the plane", w_res)
        if inv_res > tol:
            raise NotInvariant("plane is not invariant under L", inv_res)
    order = np.lexsort((eigs.imag, eigs.real))
    return VerificationReport(h_res, w_res, inv_res, label,
                              tuple(complex(z) for z in eigs[order]))


def _no_plane_reason(inert) -> str:
    if inert.n_plus == 0 or inert.n_minus == 0:
        return "signature ±2 (definite form): the null-cone is {0} and contains no planes"
    return "signature ±1 (index-1 form): the null-cone contains no planes"


def census(Q: QuadraticForm, W: SymplecticStructure, tol: float = DEFAULT_TOL,
           tangency_tol: float = DEFAULT_TANGENCY_TOL,
           frame: AdaptedFrame | None = None) -> CensusResult:
    """All Lagrangian planes in the null-cone of ``H`` on R^4.

    Parameters
    ----------
    Q, W
        Hamiltonian and symplectic structure, both 4x4.
    tol
        Relative tolerance for inertia, vanishing coefficients and plane
        verification.
    tangency_tol
        Relative width of the band around ``|c0| = r`` that counts as a
        single (tangential) root.
    frame
        Adapted frame to use; computed when omitted.  Results do not
        depend on the choice.

    Returns
    -------
    CensusResult
        Circle outcomes, the aggregate count, the isolated planes in the
        input coordinates (rotation circle first, angles ascending), and a
        verification report for each.
    """
    if Q.dim != 4 or W.dim != 4:
        raise WrongDimension(f"census works on R^4 (got {Q.dim}); use decompose for "
                             f"higher dimensions")
    inert = inertia(Q, tol)
    if inert.n_zero:
        raise DegenerateSystem(f"S is degenerate, inertia {tuple(inert)}")
    sys = build_system(Q, W)
    spectrum = classify(sys, tol)
    if frame is None:
        try:
            frame = adapted_basis(Q, tol)
        except WrongSignature as exc:
            return CensusResult(None, None, Aggregate.finite(0), reason=_no_plane_reason(exc.inertia),
                                spectrum=spectrum)

    trig = {c: omega_restriction(frame, W, c, tol) for c in Component}
    scale = max(t.probe_scale for t in trig.values())
    outcomes = {c: circle_roots(trig[c], tol, scale, tangency_tol) for c in Component}

    flags = list(spectrum.condition_flags)
    for c, out in outcomes.items():
        if out.kind is not OutcomeKind.ALL_LAGRANGIAN and \
                tangency_tol < abs(out.margin) <= 10.0 * tangency_tol:
            flags.append(f"TangencyAmbiguity:{c.value}")

    planes, reports = [], []
    for c in Component:
        for theta in outcomes[c].roots:
            plane = plane_from_circle(frame, CirclePoint(c, theta))
            planes.append(plane)
            reports.append(verify_plane(plane, sys, tol, strict=False))

    full = [c for c in Component if outcomes[c].kind is OutcomeKind.ALL_LAGRANGIAN]
    isolated = len(planes)
    if not full:
        aggregate = Aggregate.finite(isolated)
    elif len(full) == 1 and isolated == 2:
        aggregate = INFINITE_PLUS_TWO
    else:
        aggregate = INFINITE
        if isolated or len(full) == 2:
            flags.append("UnexpectedCircleCombination")

    expected = EXPECTED_COUNT.get(spectrum.multiplicity_structure)
    consistent = None if expected is None else (expected == aggregate)
    return CensusResult(
        rotation=outcomes[Component.ROTATION],
        reflection=outcomes[Component.REFLECTION],
        aggregate=aggregate,
        planes=tuple(planes),
        verification=tuple(reports),
        flags=tuple(flags),
        spectrum=spectrum,
        consistent=consistent,
        frame=frame,
        trig=trig,
    )


def circle_planes(result: CensusResult, component: Component, count: int = 16):
    """Planes at ``count`` equally spaced angles on one circle of a census."""
    if result.frame is None:
        return []
    thetas = 2.0 * np.pi * np.arange(count) / count
    return [plane_from_circle(result.frame, CirclePoint(component, float(t))) for t in thetas]


def lagrangian_circles(result: CensusResult):
    """Components whose every plane is Lagrangian."""
    return [c for c in Component
            if result.outcome(c) is not None and result.outcome(c).kind is OutcomeKind.ALL_LAGRANGIAN]
