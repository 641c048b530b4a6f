"""Symplectic eigenspace splitting and plane counts in higher dimensions.

A signature-zero system whose eigenvalue groups ``{lam, -lam, conj(lam),
-conj(lam)}`` are pairwise distinct splits into omega-orthogonal invariant
blocks of dimension 2 or 4.  Every Lagrangian subspace in the null-cone is
a direct sum of one such subspace per block, so the count is the product
of per-block counts ``delta``:

=========  ==============================  =====
block dim  eigenvalues                     delta
=========  ==============================  =====
2          imaginary pair                  0
2          real pair                       2
4          imaginary, non-semisimple       1
4          complex quadruplet              2
4          real, non-semisimple            3
=========  ==============================  =====

Semisimple double blocks carry infinitely many planes and make the
product unbounded unless another block contributes zero.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .census import INFINITE, Aggregate, census, verify_plane
from .errors import DegenerateSystem, HypothesisViolated, IllSeparated, SharedEigenvalues
from .linalg import (
    DEFAULT_TOL,
    QuadraticForm,
    SymplecticStructure,
    check_symplectic,
    cluster_points,
    congruence_diagonalize,
    inertia,
    max_abs,
    orthonormalize,
)
from .nullcone import PlaneBasis
from .spectrum import HamiltonianSystem, Multiplicity, Quadruplet, build_system, classify

#: blocks must be omega-orthogonal to this relative accuracy
ORTHOGONALITY_TOL = 1e-6
#: null-space gap: largest "zero" singular value over smallest kept one
NULLSPACE_GAP = 1e-4


@dataclass(frozen=True, eq=False)
class SymplecticBlock:
    basis: np.ndarray
    quadruplet: Quadruplet
    kind: str  # "real", "imaginary" or "complex"
    restricted_Q: QuadraticForm
    restricted_W: SymplecticStructure

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def system(self) -> HamiltonianSystem:
        return build_system(self.restricted_Q, self.restricted_W)


@dataclass(frozen=True)
class DeltaValue:
    """Per-block plane count; ``value is None`` means unbounded."""

    value: int | None
    block_count: Aggregate | None = None

    @property
    def unbounded(self) -> bool:
        return self.value is None

    def __str__(self) -> str:
        return "unbounded" if self.unbounded else str(self.value)


@dataclass(frozen=True, eq=False)
class DecompositionResult:
    blocks: tuple
    deltas: tuple
    count: Aggregate
    planes: tuple | None
    notes: tuple = field(default=())


def _spectral_polynomial(L2: np.ndarray, kind: str, a: float, b: float, d: int) -> np.ndarray:
    """``q(L^2)`` whose kernel is the invariant subspace of one eigenvalue group."""
    I = np.eye(L2.shape[0])
    if kind == "real":
        factor, power = L2 - a * a * I, d // 2
    elif kind == "imaginary":
        factor, power = L2 + b * b * I, d // 2
    else:
        factor = L2 @ L2 - 2.0 * (a * a - b * b) * L2 + (a * a + b * b) ** 2 * I
        power = d // 4
    return np.linalg.matrix_power(factor, power)


def symplectic_eigenspaces(sys: HamiltonianSystem, tol: float = DEFAULT_TOL):
    """Split ``R^2n`` into omega-orthogonal invariant blocks, one per eigenvalue group.

    Blocks are ordered by the real part, then the imaginary part, of the
    group representative (so imaginary blocks come first).

    Raises
    ------
    IllSeparated
        when groups are too close to separate reliably, or the computed
        subspaces fail the rank / orthogonality checks.
    HypothesisViolated
        when a block has dimension above 4.
    """
    if inertia(sys.Q, tol).n_zero:
        raise DegenerateSystem("S is degenerate")
    L = np.asarray(sys.L)
    dim = L.shape[0]
    scale = max_abs(L)
    radius = 100.0 * tol * scale
    raw = np.linalg.eigvals(L)
    keys = np.abs(raw.real) + 1j * np.abs(raw.imag)
    groups = cluster_points(keys, radius)
    centers = [complex(np.mean(keys[g])) for g in groups]
    for i, j in itertools.combinations(range(len(groups)), 2):
        if abs(centers[i] - centers[j]) <= 10.0 * radius:
            raise IllSeparated(f"eigenvalue groups {centers[i]:.6g} and {centers[j]:.6g} "
                               f"are within {10.0 * radius:.3e}")
    dims = [len(g) for g in groups]
    if max(dims) > 4:
        raise HypothesisViolated(f"block dimensions {sorted(dims)} exceed 4", block_dims=dims)

    L2 = L @ L
    Omega = np.asarray(sys.W.Omega)
    blocks = []
    for g, center in sorted(zip(groups, centers), key=lambda gc: (gc[1].real, gc[1].imag)):
        d = len(g)
        a = center.real if center.real > radius else 0.0
        b = center.imag if center.imag > radius else 0.0
        kind = "imaginary" if a == 0.0 else ("real" if b == 0.0 else "complex")
        if kind == "complex" and d != 4:
            raise HypothesisViolated(f"quadruplet block of dimension {d}", block_dims=dims)
        if d == dim:
            Z = np.eye(dim)
        else:
            Pq = _spectral_polynomial(L2, kind, a, b, d)
            _, sv, Vt = np.linalg.svd(Pq / max_abs(Pq))
            kept, dropped = sv[dim - d - 1], sv[dim - d]
            if dropped > NULLSPACE_GAP * kept:
                raise IllSeparated(f"invariant subspace for {center:.6g} is not numerically "
                                   f"isolated (singular values {dropped:.3e} vs {kept:.3e})")
            Z = orthonormalize(Vt[dim - d:].T)
        multiplicity = d // 4 if kind == "complex" else d // 2
        quad = Quadruplet(complex(a, b), multiplicity)
        rQ = QuadraticForm(Z.T @ sys.S @ Z)
        rW = check_symplectic(Z.T @ Omega @ Z, tol)
        blocks.append(SymplecticBlock(Z, quad, kind, rQ, rW))

    wscale = max_abs(Omega)
    for bi, bj in itertools.combinations(blocks, 2):
        cross = max_abs(bi.basis.T @ Omega @ bj.basis) / wscale
        if cross > ORTHOGONALITY_TOL:
            raise IllSeparated(f"blocks {bi.quadruplet.value:.6g} and {bj.quadruplet.value:.6g} "
                               f"are not omega-orthogonal ({cross:.3e})")
    return blocks


def delta(block: SymplecticBlock, tol: float = DEFAULT_TOL) -> DeltaValue:
    """Number of Lagrangian subspaces in the null-cone of one block."""
    if block.dim == 2:
        if block.kind == "real":
            return DeltaValue(2)
        if block.kind == "imaginary":
            return DeltaValue(0)
    elif block.dim == 4:
        info = classify(block.system(), tol)
        table = {
            Multiplicity.DOUBLE_IMAGINARY_NILPOTENT: 1,
            Multiplicity.QUADRUPLET: 2,
            Multiplicity.DOUBLE_REAL_NILPOTENT: 3,
        }
        if info.multiplicity_structure in table:
            return DeltaValue(table[info.multiplicity_structure])
        if info.multiplicity_structure in (Multiplicity.DOUBLE_IMAGINARY_SEMISIMPLE,
                                           Multiplicity.DOUBLE_REAL_SEMISIMPLE):
            return DeltaValue(None, census(block.restricted_Q, block.restricted_W, tol).aggregate)
        raise HypothesisViolated(f"4-dimensional block with structure "
                                 f"{info.multiplicity_structure}", block_dims=[4])
    raise HypothesisViolated(f"block of dimension {block.dim} ({block.kind})",
                             block_dims=[block.dim])


def count_product(deltas) -> Aggregate:
    """Product of per-block counts.

    A zero factor wins over unbounded ones.  A lone unbounded block keeps
    its own census count; any other product with an unbounded factor is
    ``Infinite``.
    """
    deltas = list(deltas)
    if any(dv.value == 0 for dv in deltas):
        return Aggregate.finite(0)
    unbounded = [dv for dv in deltas if dv.unbounded]
    if not unbounded:
        return Aggregate.finite(int(np.prod([dv.value for dv in deltas])))
    if len(deltas) == 1 and deltas[0].block_count is not None:
        return deltas[0].block_count
    return INFINITE


def block_planes(block: SymplecticBlock, tol: float = DEFAULT_TOL):
    """Lagrangian subspaces of one block lying in its null-cone, in full coordinates.

    Returns ``None`` for blocks with infinitely many.
    """
    Z = block.basis
    if block.dim == 2:
        if block.kind != "real":
            return []
        P, _ = congruence_diagonalize(block.restricted_Q, tol)
        return [PlaneBasis(orthonormalize((Z @ P @ np.array([1.0, s]))[:, None]),
                           ("line", s))
                for s in (1.0, -1.0)]
    result = census(block.restricted_Q, block.restricted_W, tol)
    if not result.aggregate.is_finite:
        return None
    return [plane.mapped(Z) for plane in result.planes]


def compose_planes(blocks, block_plane_lists, sys: HamiltonianSystem | None = None,
                   tol: float = DEFAULT_TOL):
    """All direct sums of one Lagrangian subspace per block.

    With ``sys`` given, every composed subspace is checked (null-cone,
    Lagrangian, invariant) and a failure raises.

    Raises
    ------
    SharedEigenvalues
        if two blocks carry the same eigenvalue group, so the splitting
        of a Lagrangian subspace along blocks is not forced.
    """
    blocks = list(blocks)
    for bi, bj in itertools.combinations(blocks, 2):
        vi, vj = bi.quadruplet.value, bj.quadruplet.value
        if abs(vi - vj) <= 1e-7 * max(abs(vi), abs(vj), 1e-300):
            raise SharedEigenvalues(f"blocks share the eigenvalue group of {vi:.6g}")
    planes = []
    for idx in itertools.product(*[range(len(pl)) for pl in block_plane_lists]):
        cols = [block_plane_lists[b][i].B for b, i in enumerate(idx)]
        plane = PlaneBasis(orthonormalize(np.hstack(cols)), ("block_sum", tuple(idx)))
        if sys is not None:
            verify_plane(plane, sys, max(tol, 1e-8))
        planes.append(plane)
    return planes


def decompose(sys: HamiltonianSystem, tol: float = DEFAULT_TOL,
              strict: bool = False) -> DecompositionResult:
    """Blocks, per-block counts, their product and (when finite) the composed planes.

    With ``strict`` an unbounded block that is not cancelled by a zero
    factor raises ``SharedEigenvalues``: the block is a sum of two
    2-dimensional subsystems with equal eigenvalues, outside the reach of
    the product formula.
    """
    blocks = symplectic_eigenspaces(sys, tol)
    deltas = [delta(b, tol) for b in blocks]
    count = count_product(deltas)
    notes = []
    unbounded = [b for b, dv in zip(blocks, deltas) if dv.unbounded]
    if unbounded and count != Aggregate.finite(0):
        msg = ("semisimple double eigenvalue block(s) at "
               + ", ".join(f"{b.quadruplet.value:.6g}" for b in unbounded)
               + ": product formula does not apply")
        if strict:
            raise SharedEigenvalues(msg)
        notes.append(msg)
    planes = None
    if count.is_finite:
        if count.k == 0:
            planes = ()
        else:
            lists = [block_planes(b, tol) for b in blocks]
            planes = tuple(compose_planes(blocks, lists, sys, tol))
    return DecompositionResult(tuple(blocks), tuple(deltas), count, planes, tuple(notes))
