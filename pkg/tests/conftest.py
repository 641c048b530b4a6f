import numpy as np
import pytest

from lagplanes.linalg import subspace_distance

AXES = {"q1": 0, "q2": 1, "p1": 2, "p2": 3}


def coordinate_plane(*zero):
    """Basis of the R^4 coordinate plane on which the named coordinates vanish."""
    keep = [i for name, i in AXES.items() if name not in zero]
    return np.eye(4)[:, keep]


def has_plane(planes, B, tol=1e-7):
    return any(subspace_distance(np.asarray(getattr(p, "B", p)), B) <= tol for p in planes)


def random_signature_zero(rng, dim=4):
    """Random symmetric matrix with inertia (dim/2, dim/2, 0)."""
    n = dim // 2
    eig = np.concatenate([-rng.uniform(0.3, 2.0, n), rng.uniform(0.3, 2.0, n)])
    V, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    return V @ np.diag(eig) @ V.T


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("tests.test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
