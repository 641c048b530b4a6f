"""Hamiltonian matrix and spectral classification.

On R^4 the characteristic polynomial of a Hamiltonian matrix is even,
``t^4 + c t^2 + d``, so its type and multiplicity structure follow from
the two roots ``u = t^2`` of ``u^2 + c u + d`` without a general
eigensolver.  Higher dimensions cluster the eigenvalues returned by
:func:`lagplanes.linalg.eigenvalues`.
"""
from __future__ import annotations

import cmath
import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSystem, DimensionMismatch, NotHamiltonian
from .linalg import (
    DEFAULT_TOL,
    QuadraticForm,
    SymplecticStructure,
    cluster_points,
    inertia,
    max_abs,
)


class SystemType(str, enum.Enum):
    ELLIPTIC = "Elliptic"
    HYPERBOLIC = "Hyperbolic"
    MIXED = "Mixed"


class Multiplicity(str, enum.Enum):
    SIMPLE_IMAGINARY = "SimpleImaginary"
    DOUBLE_IMAGINARY_SEMISIMPLE = "DoubleImaginarySemisimple"
    DOUBLE_IMAGINARY_NILPOTENT = "DoubleImaginaryNilpotent"
    QUADRUPLET = "Quadruplet"
    SIMPLE_REAL = "SimpleReal"
    DOUBLE_REAL_SEMISIMPLE = "DoubleRealSemisimple"
    DOUBLE_REAL_NILPOTENT = "DoubleRealNilpotent"


@dataclass(frozen=True, eq=False)
class HamiltonianSystem:
    Q: QuadraticForm
    W: SymplecticStructure
    L: np.ndarray

    @property
    def dim(self) -> int:
        return self.Q.dim

    @property
    def S(self) -> np.ndarray:
        return self.Q.S

    @property
    def Omega(self) -> np.ndarray:
        return self.W.Omega


@dataclass(frozen=True)
class EvenQuarticInvariants:
    c: float
    d: float
    disc: float

    def u_roots(self):
        """The two roots of ``u^2 + c u + d`` (complex in general), larger real part first."""
        sq = cmath.sqrt(self.disc)
        u1 = (-self.c + sq) / 2.0
        u2 = (-self.c - sq) / 2.0
        return (u1, u2) if (u1.real, u1.imag) >= (u2.real, u2.imag) else (u2, u1)


@dataclass(frozen=True)
class Quadruplet:
    """One eigenvalue group ``{lam, -lam, conj(lam), -conj(lam)}``.

    ``value`` is the representative with non-negative real and imaginary
    parts; ``multiplicity`` is the algebraic multiplicity of ``value``.
    """

    value: complex
    multiplicity: int

    @property
    def members(self):
        lam = self.value
        return sorted({lam, -lam, lam.conjugate(), -lam.conjugate()},
                      key=lambda z: (z.real, z.imag))


@dataclass(frozen=True)
class SpectrumReport:
    quadruplets: tuple
    type: SystemType
    multiplicity_structure: Multiplicity | None
    condition_flags: tuple = field(default=())

    @property
    def eigenvalues(self):
        vals = []
        for quad in self.quadruplets:
            for z in quad.members:
                vals.extend([z] * quad.multiplicity)
        return sorted(vals, key=lambda z: (z.real, z.imag))


def build_system(Q: QuadraticForm, W: SymplecticStructure) -> HamiltonianSystem:
    """Solve ``Omega L = S`` for the Hamiltonian matrix."""
    if Q.dim != W.dim:
        raise DimensionMismatch(f"S is {Q.dim}x{Q.dim} but Omega is {W.dim}x{W.dim}")
    L = np.linalg.solve(W.Omega, Q.S)
    L.setflags(write=False)
    return HamiltonianSystem(Q, W, L)


def even_quartic(L) -> EvenQuarticInvariants:
    """Coefficients of ``char(L) = t^4 + c t^2 + d`` for a 4x4 Hamiltonian matrix."""
    L = np.asarray(L, dtype=float)
    if L.shape != (4, 4):
        raise DimensionMismatch(f"even_quartic needs a 4x4 matrix, got {L.shape}")
    scale = max(max_abs(L), np.finfo(float).tiny)
    L2 = L @ L
    # odd coefficients of the characteristic polynomial: -tr(L) and -(tr(L^3) - ...)/3
    tr1 = np.trace(L)
    tr3 = np.trace(L2 @ L)
    coef3 = -tr1
    coef1 = -(tr1 ** 3 - 3.0 * tr1 * np.trace(L2) + 2.0 * tr3) / 6.0
    if abs(coef3) > 1e-7 * scale or abs(coef1) > 1e-7 * scale ** 3:
        raise NotHamiltonian(f"odd coefficients of char(L) do not vanish "
                             f"(t^3: {coef3:.3e}, t^1: {coef1:.3e})")
    c = -np.trace(L2) / 2.0
    d = float(np.linalg.det(L))
    return EvenQuarticInvariants(float(c), d, float(c * c - 4.0 * d))


def _double_band(inv: EvenQuarticInvariants, tol: float) -> float:
    return tol * max(inv.c ** 2, abs(inv.d))


def classify(sys: HamiltonianSystem, tol: float = DEFAULT_TOL) -> SpectrumReport:
    """Elliptic / hyperbolic / mixed type and (on R^4) multiplicity structure."""
    inert = inertia(sys.Q, tol)
    if inert.n_zero:
        raise DegenerateSystem(f"S is degenerate, inertia {tuple(inert)}")
    if sys.dim == 4:
        return _classify_r4(sys, tol)
    return _classify_general(sys, tol)


def _classify_r4(sys: HamiltonianSystem, tol: float) -> SpectrumReport:
    L = np.asarray(sys.L)
    inv = even_quartic(L)
    scale = max_abs(L)
    if abs(inv.d) <= tol * scale ** 4:
        raise DegenerateSystem(f"det L = {inv.d:.3e} is numerically zero")
    flags = []
    band = _double_band(inv, tol)
    if band / 10.0 < abs(inv.disc) <= 10.0 * band:
        flags.append("AmbiguousClassification")

    if abs(inv.disc) <= band:
        u = -inv.c / 2.0
        semisimple = max_abs(L @ L - u * np.eye(4)) <= tol * scale ** 2
        if u < 0:
            kind = SystemType.ELLIPTIC
            mult = (Multiplicity.DOUBLE_IMAGINARY_SEMISIMPLE if semisimple
                    else Multiplicity.DOUBLE_IMAGINARY_NILPOTENT)
            lam = complex(0.0, np.sqrt(-u))
        else:
            kind = SystemType.HYPERBOLIC
            mult = (Multiplicity.DOUBLE_REAL_SEMISIMPLE if semisimple
                    else Multiplicity.DOUBLE_REAL_NILPOTENT)
            lam = complex(np.sqrt(u), 0.0)
        return SpectrumReport((Quadruplet(lam, 2),), kind, mult, tuple(flags))

    u1, u2 = inv.u_roots()
    if inv.disc < 0:
        # complex-conjugate u pair: one full quadruplet +-a +- ib
        lam = cmath.sqrt(u1)
        lam = complex(abs(lam.real), abs(lam.imag))
        return SpectrumReport((Quadruplet(lam, 1),), SystemType.HYPERBOLIC,
                              Multiplicity.QUADRUPLET, tuple(flags))
    u1, u2 = u1.real, u2.real
    quads = tuple(
        Quadruplet(complex(np.sqrt(u), 0.0) if u > 0 else complex(0.0, np.sqrt(-u)), 1)
        for u in sorted((u1, u2))
    )
    if u1 < 0 and u2 < 0:
        return SpectrumReport(quads, SystemType.ELLIPTIC, Multiplicity.SIMPLE_IMAGINARY,
                              tuple(flags))
    if u1 > 0 and u2 > 0:
        return SpectrumReport(quads, SystemType.HYPERBOLIC, Multiplicity.SIMPLE_REAL,
                              tuple(flags))
    return SpectrumReport(quads, SystemType.MIXED, None, tuple(flags))


def _classify_general(sys: HamiltonianSystem, tol: float) -> SpectrumReport:
    L = np.asarray(sys.L)
    scale = max_abs(L)
    raw = np.linalg.eigvals(L)
    keys = np.abs(raw.real) + 1j * np.abs(raw.imag)
    quads = []
    for members in cluster_points(keys, 100.0 * tol * scale):
        key = complex(np.mean(keys[members]))
        re = key.real if key.real > tol * scale else 0.0
        im = key.imag if key.imag > tol * scale else 0.0
        lam = complex(re, im)
        # members of one quadruplet: 4 values if re, im both nonzero, else 2
        per_copy = 4 if (re and im) else 2
        quads.append(Quadruplet(lam, max(1, len(members) // per_copy)))
    quads.sort(key=lambda q: (q.value.real, q.value.imag))
    imaginary = [q.value.real == 0.0 for q in quads]
    if all(imaginary):
        kind = SystemType.ELLIPTIC
    elif not any(imaginary):
        kind = SystemType.HYPERBOLIC
    else:
        kind = SystemType.MIXED
    return SpectrumReport(tuple(quads), kind, None, ())
