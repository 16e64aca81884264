"""Linear 1D peridynamics with a Gaussian micromodulus on a periodic grid.

The semi-discrete system is ``U'' = -A U`` written as ``[U; V]' = [V; -A U]``,
with ``A`` from midpoint quadrature of the nonlocal force integral.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ..integrator import LinearSystem

XI_MAX = 8.0


@dataclass(frozen=True)
class PeridynamicsSpec:
    x_lo: float = -20.0
    x_hi: float = 20.0
    n_x: int = 100
    delta: float = 5.0
    rho: float = 1.0
    T: float = 5.0

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("horizon delta must be positive")
        if self.n_x < 2:
            raise ValueError("n_x must be >= 2")
        if not self.x_hi > self.x_lo:
            raise ValueError("empty domain")
        if self.delta > 0.5 * (self.x_hi - self.x_lo):
            raise ValueError("horizon exceeds half the periodic domain")

    @property
    def dx(self) -> float:
        return (self.x_hi - self.x_lo) / self.n_x

    @property
    def centers(self) -> np.ndarray:
        return self.x_lo + (np.arange(1, self.n_x + 1) - 0.5) * self.dx


def micromodulus(x, delta: float):
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) < delta, 4.0 / math.sqrt(math.pi) * np.exp(-x * x), 0.0)


def stiffness_matrix(spec: PeridynamicsSpec) -> np.ndarray:
    """Dense ``A``; rows sum to zero and the matrix is circulant."""
    n, dx = spec.n_x, spec.dx
    length = spec.x_hi - spec.x_lo
    offs = np.abs(np.arange(n)[None, :] - np.arange(n)[:, None]) * dx
    dist = np.minimum(offs, length - offs)
    kern = micromodulus(dist, spec.delta)
    np.fill_diagonal(kern, 0.0)
    A = -(dx / spec.rho) * kern
    A[np.diag_indices(n)] = (dx / spec.rho) * kern.sum(axis=1)
    return A


def pd_build(spec: PeridynamicsSpec) -> LinearSystem:
    n = spec.n_x
    A = stiffness_matrix(spec)
    x = spec.centers

    def apply_L(u):
        out = np.empty_like(u)
        out[:n] = u[n:]
        out[n:] = -(A @ u[:n])
        return out

    def energy(u):
        U, V = u[:n], u[n:]
        return 0.5 * float(V @ V) + 0.5 * float(U @ (A @ U))

    def exact(t):
        return np.concatenate([pd_exact(x, t), np.full(n, np.nan)])

    u0 = np.concatenate([np.exp(-x * x), np.zeros(n)])
    # ||L||_H = sqrt(rho(A)); A is symmetric
    norm = math.sqrt(max(np.linalg.eigvalsh(A)[-1], 0.0))
    return LinearSystem(
        dim=2 * n, apply_L=apply_L, energy=energy, exact=exact, norm_L=norm,
        initial=u0, name="peridynamics",
    )


class QuadratureError(ArithmeticError):
    pass


def _integrand(xi, t):
    return (2.0 / math.sqrt(math.pi)) * math.exp(-xi * xi) * math.cos(
        2.0 * t * math.sqrt(-math.expm1(-xi * xi))
    )


def _pd_exact_scalar(x: float, t: float, quad_tol: float) -> float:
    # the achieved error is checked below, so quad's own warnings are redundant
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        if x == 0.0:
            val, err = integrate.quad(_integrand, 0.0, XI_MAX, args=(t,), epsabs=quad_tol,
                                      epsrel=0.0, limit=500)
        else:
            val, err = integrate.quad(_integrand, 0.0, XI_MAX, args=(t,), weight="cos",
                                      wvar=2.0 * x, epsabs=quad_tol, epsrel=0.0, limit=500)
    if not err <= quad_tol:
        raise QuadratureError(f"u_e({x}, {t}): achieved {val} +- {err}, wanted {quad_tol}")
    return val


def pd_exact(x, t: float, quad_tol: float = 1e-13):
    """Exact displacement of the infinite bar from a Gaussian initial pulse."""
    if not quad_tol > 0:
        raise ValueError("quad_tol must be positive")
    xs = np.asarray(x, dtype=float)
    out = np.array([_pd_exact_scalar(abs(float(v)), float(t), quad_tol) for v in xs.ravel()])
    return out.reshape(xs.shape) if xs.ndim else float(out[0])
