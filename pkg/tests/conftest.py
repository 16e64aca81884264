import numpy as np
import pytest

from escrk.integrator import LinearSystem


def random_antisymmetric_system(rng: np.random.Generator, dim: int) -> tuple[LinearSystem, np.ndarray]:
    """``L = H^{-1} K`` with ``K`` skew and ``H`` SPD, so ``L^T H + H L = 0``."""
    k = rng.standard_normal((dim, dim))
    K = k - k.T
    g = rng.standard_normal((dim, dim))
    H = g @ g.T + dim * np.eye(dim)
    L = np.linalg.solve(H, K)
    system = LinearSystem(
        dim=dim,
        apply_L=lambda u: L @ u,
        energy=lambda u: 0.5 * float(u @ H @ u),
        norm_L=None,
    )
    return system, L


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
