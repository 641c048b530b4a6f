"""Normal-form Hamiltonians for every spectral stratum, plus the R^8 examples.

Each case is a function of named parameters returning the symmetric
matrix ``S`` with ``H(x) = x^T S x`` in ``(q1, .., qn, p1, .., pn)`` order.
"""
from __future__ import annotations

import re

import numpy as np

from .linalg import QuadraticForm, SymplecticStructure, random_symplectic

_VAR = re.compile(r"^([qp])(\d+)$")


def quadratic_matrix(n: int, terms: dict) -> np.ndarray:
    """Symmetric matrix of ``sum coef * a * b`` over ``{("p1", "q1"): coef, ...}``.

    A square is written ``("q1", "q1")``.
    """
    S = np.zeros((2 * n, 2 * n))

    def index(name):
        m = _VAR.match(name)
        if not m or not 1 <= int(m.group(2)) <= n:
            raise ValueError(f"unknown variable {name!r} for n = {n}")
        i = int(m.group(2)) - 1
        return i if m.group(1) == "q" else n + i

    for (a, b), coef in terms.items():
        i, j = index(a), index(b)
        if i == j:
            S[i, i] += coef
        else:
            S[i, j] += coef / 2.0
            S[j, i] += coef / 2.0
    return S


def elliptic_simple(a=0.5, b=1.0, sign=1.0):
    """``sign (a (p1^2 + q1^2) - b (p2^2 + q2^2))`` with ``a, b > 0``, ``a != b``."""
    return sign * quadratic_matrix(2, {("p1", "p1"): a, ("q1", "q1"): a,
                                       ("p2", "p2"): -b, ("q2", "q2"): -b})


def elliptic_double_ss(a=0.5, sign=1.0):
    """``sign a ((p1^2 + q1^2) - (p2^2 + q2^2))``: 1:-1 resonance, semisimple."""
    return elliptic_simple(a, a, sign)


def elliptic_double_nilpotent(sign=1.0, lam=1.0):
    """``+-1/2 (q1^2 + q2^2) + lam (p2 q1 - p1 q2)``."""
    return quadratic_matrix(2, {("q1", "q1"): 0.5 * sign, ("q2", "q2"): 0.5 * sign,
                                ("p2", "q1"): lam, ("p1", "q2"): -lam})


def hyperbolic_quadruplet(kappa=1.0, lam=1.0):
    """``kappa (p1 q1 + p2 q2) + lam (p1 q2 - p2 q1)``; eigenvalues ``+-kappa +- i lam``."""
    return quadratic_matrix(2, {("p1", "q1"): kappa, ("p2", "q2"): kappa,
                                ("p1", "q2"): lam, ("p2", "q1"): -lam})


def hyperbolic_real_simple(lam1=1.0, lam2=2.0):
    """``lam1 p1 q1 + lam2 p2 q2``, ``lam1 != lam2``."""
    return quadratic_matrix(2, {("p1", "q1"): lam1, ("p2", "q2"): lam2})


def hyperbolic_real_double_ss(lam=1.0):
    return hyperbolic_real_simple(lam, lam)


def hyperbolic_real_double_nilpotent(lam=1.0, mu=1.0):
    """``lam (p1 q1 + p2 q2) + mu p1 q2``."""
    return quadratic_matrix(2, {("p1", "q1"): lam, ("p2", "q2"): lam, ("p1", "q2"): mu})


def r8_h1():
    """``(p1^2+q1^2) - 2(p2^2+q2^2) + 3(p3^2+q3^2) - 4(p4^2+q4^2)``: elliptic, signature 0."""
    terms = {}
    for i, w in enumerate([1.0, -2.0, 3.0, -4.0], start=1):
        terms[(f"p{i}", f"p{i}")] = w
        terms[(f"q{i}", f"q{i}")] = w
    return quadratic_matrix(4, terms)


def r8_h2():
    """``(p1^2+q1^2) - 2(p2^2+q2^2) + p3 q3 + 2 p4 q4``."""
    return quadratic_matrix(4, {("p1", "p1"): 1.0, ("q1", "q1"): 1.0,
                                ("p2", "p2"): -2.0, ("q2", "q2"): -2.0,
                                ("p3", "q3"): 1.0, ("p4", "q4"): 2.0})


def r8_product_6(lam=1.0, mu=1.0, kappa=2.0, nu=1.0):
    """Real non-semisimple block on modes 1-2 plus a quadruplet block on modes 3-4.

    ``lam (p1 q1 + p2 q2) + mu p1 q2 + kappa (p3 q3 + p4 q4) + nu (p3 q4 - p4 q3)``;
    the two blocks contribute 3 and 2 planes.
    """
    return quadratic_matrix(4, {("p1", "q1"): lam, ("p2", "q2"): lam, ("p1", "q2"): mu,
                                ("p3", "q3"): kappa, ("p4", "q4"): kappa,
                                ("p3", "q4"): nu, ("p4", "q3"): -nu})


CASES = {
    "elliptic-simple": elliptic_simple,
    "elliptic-double-ss": elliptic_double_ss,
    "elliptic-double-nilpotent": elliptic_double_nilpotent,
    "hyperbolic-quadruplet": hyperbolic_quadruplet,
    "hyperbolic-real-simple": hyperbolic_real_simple,
    "hyperbolic-real-double-ss": hyperbolic_real_double_ss,
    "hyperbolic-real-double-nilpotent": hyperbolic_real_double_nilpotent,
    "r8-h1": r8_h1,
    "r8-h2": r8_h2,
    "r8-product-6": r8_product_6,
}

R4_CASES = [name for name in CASES if not name.startswith("r8-")]


def random_params(case: str, rng: np.random.Generator) -> dict:
    """Parameters drawn well inside the stratum of ``case`` (ratios >= 1.3 where distinctness matters)."""
    def mag():
        return float(rng.uniform(0.5, 2.0))

    def sgn():
        return float(rng.choice([-1.0, 1.0]))

    if case == "elliptic-simple":
        a = mag()
        ratio = float(rng.uniform(1.3, 3.0))
        b = a * ratio if rng.random() < 0.5 else a / ratio
        return {"a": a, "b": b, "sign": sgn()}
    if case == "elliptic-double-ss":
        return {"a": mag(), "sign": sgn()}
    if case == "elliptic-double-nilpotent":
        return {"sign": sgn(), "lam": sgn() * mag()}
    if case == "hyperbolic-quadruplet":
        return {"kappa": sgn() * mag(), "lam": sgn() * mag()}
    if case == "hyperbolic-real-simple":
        lam1 = mag()
        lam2 = lam1 * float(rng.uniform(1.3, 3.0))
        if rng.random() < 0.5:
            lam1, lam2 = lam2, lam1
        return {"lam1": sgn() * lam1, "lam2": sgn() * lam2}
    if case == "hyperbolic-real-double-ss":
        return {"lam": sgn() * mag()}
    if case == "hyperbolic-real-double-nilpotent":
        return {"lam": sgn() * mag(), "mu": sgn() * mag()}
    raise KeyError(case)


def make_case(case: str, params: dict | None = None, seed: int | None = None,
              conjugate: bool = False, magnitude: float = 1.0):
    """Quadratic form and standard symplectic structure for a named case.

    With ``conjugate`` the form is replaced by ``T^T S T`` for
    ``T = random_symplectic(dim, seed, magnitude)``.  Returns ``(Q, W, T)``
    where ``T`` is the identity when not conjugated.
    """
    if case not in CASES:
        raise KeyError(f"unknown case {case!r}; choose from {', '.join(CASES)}")
    S = CASES[case](**(params or {}))
    dim = S.shape[0]
    T = np.eye(dim)
    if conjugate:
        T = random_symplectic(dim, 0 if seed is None else seed, magnitude)
        S = T.T @ S @ T
    return QuadraticForm(S), SymplecticStructure.standard(dim), T

