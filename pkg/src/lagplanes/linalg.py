"""Small dense real linear algebra used by the rest of the package.

Conventions
-----------
Phase-space vectors are ordered ``(q1, ..., qn, p1, ..., pn)`` and the
standard symplectic matrix is ``[[0, -I], [I, 0]]``, so that
``omega(e_p_i, e_q_i) = +1``.  A quadratic form is ``H(x) = x^T S x`` (no
factor 1/2) and the Hamiltonian matrix is ``L = Omega^{-1} S``.

All tolerances are relative to the max-abs entry of the matrix involved.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateForm,
    DegenerateOmega,
    InvalidMatrix,
    NoConvergence,
    NotSkew,
    WrongDimension,
)

DEFAULT_TOL = 1e-9


def max_abs(A) -> float:
    A = np.asarray(A)
    return float(np.max(np.abs(A))) if A.size else 0.0


def as_real_matrix(A, name: str = "matrix") -> np.ndarray:
    """Return ``A`` as a finite 2-d float array, raising ``InvalidMatrix`` otherwise."""
    try:
        M = np.array(A, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidMatrix(f"{name}: not a real numeric array ({exc})") from None
    if M.ndim != 2:
        raise InvalidMatrix(f"{name}: expected a 2-d array, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidMatrix(f"{name}: entries must be finite")
    return M


def _frozen(M: np.ndarray) -> np.ndarray:
    M = np.array(M, dtype=float)
    M.setflags(write=False)
    return M


def standard_omega(dim: int) -> np.ndarray:
    """``[[0, -I], [I, 0]]`` of size ``dim`` (must be even)."""
    if dim % 2:
        raise WrongDimension(f"symplectic dimension must be even, got {dim}")
    n = dim // 2
    W = np.zeros((dim, dim))
    W[:n, n:] = -np.eye(n)
    W[n:, :n] = np.eye(n)
    return W


@dataclass(frozen=True, eq=False)
class QuadraticForm:
    """Symmetric matrix ``S`` of ``H(x) = x^T S x``; symmetrized on construction."""

    S: np.ndarray

    def __init__(self, S):
        S = as_real_matrix(S, "S")
        if S.shape[0] != S.shape[1]:
            raise InvalidMatrix(f"S must be square, got shape {S.shape}")
        if S.shape[0] % 2:
            raise WrongDimension(f"phase space must be even-dimensional, got {S.shape[0]}")
        object.__setattr__(self, "S", _frozen(0.5 * (S + S.T)))

    @property
    def dim(self) -> int:
        return self.S.shape[0]

    def __call__(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ self.S @ x)

    def scaled(self, c: float) -> "QuadraticForm":
        return QuadraticForm(c * self.S)

    def congruent(self, P) -> "QuadraticForm":
        """The form ``P^T S P`` (the same Hamiltonian in the basis given by the columns of P)."""
        P = np.asarray(P, dtype=float)
        return QuadraticForm(P.T @ self.S @ P)


@dataclass(frozen=True, eq=False)
class SymplecticStructure:
    """Validated nondegenerate skew matrix; build with :func:`check_symplectic`."""

    Omega: np.ndarray

    @property
    def dim(self) -> int:
        return self.Omega.shape[0]

    def pairing(self, x, y) -> float:
        return float(np.asarray(x) @ self.Omega @ np.asarray(y))

    @classmethod
    def standard(cls, dim: int) -> "SymplecticStructure":
        return cls(_frozen(standard_omega(dim)))


@dataclass(frozen=True)
class Inertia:
    n_plus: int
    n_minus: int
    n_zero: int

    @property
    def dim(self) -> int:
        return self.n_plus + self.n_minus + self.n_zero

    @property
    def index(self) -> int:
        return min(self.n_plus, self.n_minus)

    @property
    def signature(self) -> int:
        return self.n_plus - self.n_minus

    def __iter__(self):
        return iter((self.n_plus, self.n_minus, self.n_zero))


def jacobi_eigh(S, tol: float = 1e-13, max_sweeps: int = 100):
    """Cyclic Jacobi eigen-decomposition of a small symmetric matrix.

    Returns ``(w, V)`` with ascending eigenvalues ``w`` and orthonormal
    eigenvector columns ``V`` so that ``S = V diag(w) V^T``.  Iterates until
    the off-diagonal Frobenius norm is at most ``tol * max|S|``.
    """
    A = np.array(S, dtype=float)
    n = A.shape[0]
    V = np.eye(n)
    scale = max_abs(A)
    if scale == 0.0 or n == 1:
        return np.diag(A).copy(), V
    threshold = tol * scale
    for sweep in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(A, -1) ** 2) * 2.0)
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                # rotation angle zeroing A[p, q]; t = tan(angle), smaller root
                tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                if tau == 0.0:
                    t = 1.0
                elif abs(tau) > 1e150:
                    t = 0.5 / tau
                else:
                    t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                J = np.array([[c, s], [-s, c]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ J
                A[idx, :] = J.T @ A[idx, :]
                A[p, q] = A[q, p] = 0.0
                V[:, idx] = V[:, idx] @ J
    else:
        raise NoConvergence(f"Jacobi iteration did not converge in {max_sweeps} sweeps",
                            iterations=max_sweeps)
    w = np.diag(A).copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def inertia(Q: QuadraticForm, tol: float = DEFAULT_TOL) -> Inertia:
    """Counts of positive, negative and numerically zero eigenvalues of ``S``.

    Eigenvalues within ``tol * max|S|`` of zero count as zero; the zero
    form has inertia ``(0, 0, dim)``.
    """
    w, _ = jacobi_eigh(Q.S)
    band = tol * max_abs(Q.S)
    n_plus = int(np.sum(w > band))
    n_minus = int(np.sum(w < -band))
    return Inertia(n_plus, n_minus, len(w) - n_plus - n_minus)


def congruence_diagonalize(Q: QuadraticForm, tol: float = DEFAULT_TOL):
    """Find ``P`` with ``P^T S P = diag(-1, ..., -1, +1, ..., +1)``.

    Negative directions come first.  Returns ``(P, Inertia)``.

    Raises
    ------
    DegenerateForm
        if ``S`` has numerically zero eigenvalues.
    """
    w, V = jacobi_eigh(Q.S)
    band = tol * max_abs(Q.S)
    inert = Inertia(int(np.sum(w > band)), int(np.sum(w < -band)),
                    int(np.sum(np.abs(w) <= band)))
    if inert.n_zero or band == 0.0:
        raise DegenerateForm(f"quadratic form is degenerate, inertia {tuple(inert)}")
    # w is ascending, so the negative eigenvalues are already first
    P = V / np.sqrt(np.abs(w))
    return P, inert


def check_symplectic(Omega, tol: float = DEFAULT_TOL) -> SymplecticStructure:
    """Validate a candidate symplectic matrix.

    Raises ``NotSkew`` if ``|Omega + Omega^T|`` exceeds ``tol * max|Omega|``
    and ``DegenerateOmega`` if the smallest singular value is that small.
    """
    W = as_real_matrix(Omega, "Omega")
    if W.shape[0] != W.shape[1]:
        raise InvalidMatrix(f"Omega must be square, got shape {W.shape}")
    if W.shape[0] % 2:
        raise WrongDimension(f"Omega must be even-dimensional, got {W.shape[0]}")
    scale = max_abs(W)
    if scale == 0.0:
        raise DegenerateOmega("Omega is the zero matrix")
    if max_abs(W + W.T) > tol * scale:
        raise NotSkew(f"Omega is not skew-symmetric (|Omega + Omega^T| = {max_abs(W + W.T):.3e})")
    smin = np.linalg.svd(W, compute_uv=False)[-1]
    if smin <= tol * scale:
        raise DegenerateOmega(f"Omega is degenerate (smallest singular value {smin:.3e})")
    return SymplecticStructure(_frozen(0.5 * (W - W.T)))


def eigenvalues(A, tol: float = DEFAULT_TOL):
    """Eigenvalues of a real square matrix grouped by multiplicity.

    Values closer than ``tol * max|A|`` are merged into one group whose
    value is the group mean.  Near-real groups are snapped onto the real
    axis, so the result is closed under conjugation.

    Returns a list of ``(value, multiplicity)`` sorted by real then
    imaginary part.
    """
    A = as_real_matrix(A, "A")
    if A.shape[0] != A.shape[1]:
        raise InvalidMatrix(f"expected a square matrix, got shape {A.shape}")
    try:
        raw = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"eigenvalue iteration failed: {exc}") from None
    radius = tol * max_abs(A)
    groups = cluster_points(raw, radius)
    out = []
    for members in groups:
        z = complex(np.mean(raw[members]))
        if abs(z.imag) <= radius:
            z = complex(z.real, 0.0)
        out.append((z, len(members)))
    out.sort(key=lambda item: (round(item[0].real, 12), item[0].imag))
    return out


def cluster_points(values, radius: float):
    """Single-linkage clustering of complex numbers; returns index lists."""
    values = np.asarray(values, dtype=complex)
    n = len(values)
    label = list(range(n))

    def find(i):
        while label[i] != i:
            label[i] = label[label[i]]
            i = label[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) <= radius:
                label[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _expm_taylor(X: np.ndarray) -> np.ndarray:
    # scaling and squaring around a Taylor series truncated at machine precision
    norm = np.linalg.norm(X, 1)
    squarings = max(0, int(np.ceil(np.log2(norm / 0.5)))) if norm > 0.5 else 0
    Y = X / 2.0 ** squarings
    E = np.eye(X.shape[0])
    term = np.eye(X.shape[0])
    for k in range(1, 40):
        term = term @ Y / k
        E = E + term
        if max_abs(term) <= 1e-18 * max_abs(E):
            break
    for _ in range(squarings):
        E = E @ E
    return E


def random_symplectic(dim: int, seed: int, magnitude: float = 1.0) -> np.ndarray:
    """Random symplectic matrix ``exp(Omega_std A)`` for a random symmetric ``A``.

    ``A`` is normalized to unit spectral norm and multiplied by
    ``magnitude``; so ``magnitude = 0`` yields the identity and the
    condition number of the result is at most ``exp(2 * magnitude)``.
    """
    if dim % 2:
        raise WrongDimension(f"dimension must be even, got {dim}")
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((dim, dim))
    A = 0.5 * (X + X.T)
    A /= np.linalg.norm(A, 2)
    return _expm_taylor(magnitude * (standard_omega(dim) @ A))


def orthonormalize(B, tol: float = 1e-12) -> np.ndarray:
    """Modified Gram-Schmidt with one re-orthogonalization pass.

    Raises ``InvalidMatrix`` if the columns are numerically dependent.
    """
    B = np.array(B, dtype=float)
    Q = np.zeros_like(B)
    for j in range(B.shape[1]):
        v = B[:, j].copy()
        norm0 = np.linalg.norm(v)
        for _ in range(2):
            for i in range(j):
                v -= (Q[:, i] @ v) * Q[:, i]
        norm = np.linalg.norm(v)
        if norm0 == 0.0 or norm <= tol * norm0:
            raise InvalidMatrix("columns are linearly dependent")
        Q[:, j] = v / norm
    return Q


def subspace_distance(B1, B2) -> float:
    """Sine of the largest principal angle between two column spans.

    Both inputs must have orthonormal columns.  Subspaces of different
    dimension are at distance 1.
    """
    B1 = np.asarray(B1, dtype=float)
    B2 = np.asarray(B2, dtype=float)
    if B1.shape != B2.shape:
        return 1.0
    R = B2 - B1 @ (B1.T @ B2)
    return float(np.linalg.svd(R, compute_uv=False)[0]) if R.size else 0.0


def symplectic_basis(W: SymplecticStructure) -> np.ndarray:
    """Darboux basis by skew Gram-Schmidt.

    Returns ``D`` with ``D^T Omega D = Omega_std``; the first half of the
    columns play the role of the q-axes and the second half the p-axes.
    """
    Omega = np.asarray(W.Omega)
    dim = Omega.shape[0]
    n = dim // 2
    pool = [v for v in np.eye(dim)]
    es, fs = [], []
    for _ in range(n):
        # pivot: the pair (e, f) in the pool with the largest pairing
        best = None
        for i, e in enumerate(pool):
            for j, f in enumerate(pool):
                if i != j:
                    val = f @ Omega @ e
                    if best is None or abs(val) > abs(best[2]):
                        best = (i, j, val)
        i, j, val = best
        e = pool[i]
        f = pool[j] / val
        es.append(e)
        fs.append(f)
        rest = []
        for k, v in enumerate(pool):
            if k in (i, j):
                continue
            a = v @ Omega @ f
            b = v @ Omega @ e
            rest.append(v + a * e - b * f)
        pool = rest
    return np.column_stack(es + fs)
