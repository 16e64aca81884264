"""Algebra of explicit Runge-Kutta methods in monomial (stability-polynomial) form.

A method applied to a linear autonomous system ``u' = L u`` advances the state by
``u_{n+1} = sum_k a_k (hL)^k u_n``.  For operators that are antisymmetric in some
energy inner product, the per-step energy change is an even polynomial in ``h``
whose coefficients ``b_k`` depend only on the ``a_k``.  Everything in this module
is a pure function of those coefficient sequences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "RKCoefficients",
    "EnergyProfile",
    "DegenerateCoefficientError",
    "NotStronglyStableError",
    "energy_coefficients",
    "energy_coefficient_scales",
    "leading_index",
    "solution_order",
    "stage_ratios",
    "strong_stability_bound",
    "amplification",
    "energy_profile",
]

ZERO_TOL = 1e-10
ORDER_TOL = 1e-12
A_S_TOL = 1e-15


class DegenerateCoefficientError(ValueError):
    """Raised when a coefficient needed as a divisor vanishes."""


class NotStronglyStableError(ValueError):
    """Raised when the energy coefficients do not admit a strong stability bound."""

    def __init__(self, message: str, index: int, value: float):
        super().__init__(message)
        self.index = index
        self.value = value


@dataclass(frozen=True)
class RKCoefficients:
    """Monomial coefficients ``a_0..a_s`` of the stability polynomial."""

    a: tuple[float, ...]
    name: Optional[str] = None

    def __post_init__(self):
        a = tuple(float(x) for x in self.a)
        object.__setattr__(self, "a", a)
        if len(a) < 2:
            raise ValueError("need at least a_0 and a_1 (s >= 1)")
        if a[0] != 1.0:
            raise ValueError(f"a_0 must equal 1, got {a[0]!r}")
        if not all(math.isfinite(x) for x in a):
            raise ValueError("coefficients must be finite")
        if abs(a[-1]) <= A_S_TOL:
            raise ValueError("leading coefficient a_s must be nonzero")

    @property
    def s(self) -> int:
        return len(self.a) - 1

    def __len__(self):
        return len(self.a)

    def __getitem__(self, k):
        return self.a[k]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.a, dtype=float)


def _coeffs(a) -> RKCoefficients:
    return a if isinstance(a, RKCoefficients) else RKCoefficients(tuple(a))


def energy_coefficients(a) -> np.ndarray:
    """Return ``b_1..b_s`` of the per-step energy update.

    ``b_k = a_k^2 + 2 sum_{i=1}^{min(k, s-k)} (-1)^i a_{k-i} a_{k+i}``.
    The returned array is indexed from zero, so ``b[k-1]`` is ``b_k``.
    """
    a = _coeffs(a).a
    s = len(a) - 1
    b = np.empty(s)
    for k in range(1, s + 1):
        terms = [a[k] * a[k]]
        for i in range(1, min(k, s - k) + 1):
            terms.append(2.0 * (-1) ** i * a[k - i] * a[k + i])
        b[k - 1] = math.fsum(terms)
    return b


def energy_coefficient_scales(a) -> np.ndarray:
    """Sum of absolute summand magnitudes behind each ``b_k``.

    Rounding in the stored ``a_k`` leaves residuals proportional to these
    magnitudes in coefficients that vanish in exact arithmetic.
    """
    a = _coeffs(a).a
    s = len(a) - 1
    out = np.empty(s)
    for k in range(1, s + 1):
        out[k - 1] = a[k] * a[k] + 2.0 * sum(
            abs(a[k - i] * a[k + i]) for i in range(1, min(k, s - k) + 1)
        )
    return out


def _zero_thresholds(b: np.ndarray, tol: float, scale) -> np.ndarray:
    if scale is None:
        return np.full(b.shape, tol * np.max(np.abs(b)))
    return tol * np.asarray(scale, dtype=float)


def leading_index(b: Sequence[float], tol: float = ZERO_TOL, scale=None) -> tuple[int, int]:
    """Return ``(m, r)``: the first index with a nonzero ``b_m`` and ``r = 2m - 1``.

    A coefficient counts as zero when ``|b_k| <= tol * max|b|``.  Passing
    ``scale`` (e.g. from :func:`energy_coefficient_scales`) replaces ``max|b|``
    with a per-coefficient magnitude.
    """
    b = np.asarray(b, dtype=float)
    if b.size == 0 or not np.any(b):
        raise ValueError("energy coefficients are empty or all zero")
    thresh = _zero_thresholds(b, tol, scale)
    nonzero = np.flatnonzero(np.abs(b) > thresh)
    if nonzero.size == 0:
        raise ValueError("no energy coefficient exceeds the zero threshold")
    m = int(nonzero[0]) + 1
    return m, 2 * m - 1


def solution_order(a, tol: float = ORDER_TOL) -> int:
    """Largest ``p <= s`` with ``a_k = 1/k!`` for every ``k <= p``."""
    a = _coeffs(a).a
    p = 0
    for k in range(1, len(a)):
        if abs(a[k] - 1.0 / math.factorial(k)) > tol:
            break
        p = k
    return p


def stage_ratios(a) -> np.ndarray:
    """Low-storage stage multipliers ``c_j = a_{s-j+1} / a_{s-j}``, ``j = 1..s``."""
    a = _coeffs(a).a
    s = len(a) - 1
    for k, ak in enumerate(a):
        if ak == 0.0:
            raise DegenerateCoefficientError(
                f"degenerate coefficient a_{k} = 0; stage form unavailable"
            )
    return np.array([a[s - j + 1] / a[s - j] for j in range(1, s + 1)])


def strong_stability_bound(a, tol: float = ZERO_TOL) -> tuple[float, float]:
    """Return ``(lambda, b_{s-1})`` with ``lambda = sqrt(-b_{s-1} / b_s)``.

    Requires ``b_k = 0`` for ``1 <= k <= s-2`` and ``b_{s-1} < 0``; the method is
    then strongly stable whenever ``h ||L|| <= lambda``.
    """
    coeffs = _coeffs(a)
    s = coeffs.s
    if s < 2:
        raise NotStronglyStableError("not strongly stable: s < 2", 1, float("nan"))
    b = energy_coefficients(coeffs)
    thresh = tol * energy_coefficient_scales(coeffs)
    for k in range(1, s - 1):
        if abs(b[k - 1]) > thresh[k - 1]:
            raise NotStronglyStableError(
                f"not strongly stable: b_{k} = {b[k - 1]:.6e} is nonzero",
                k,
                float(b[k - 1]),
            )
    b_sm1 = float(b[s - 2])
    if not b_sm1 < -thresh[s - 2]:
        raise NotStronglyStableError(
            f"not strongly stable: b_{s - 1} = {b_sm1:.6e} is not negative",
            s - 1,
            b_sm1,
        )
    return math.sqrt(-b_sm1 / b[s - 1]), b_sm1


def amplification(a, z):
    """Evaluate ``G(z) = sum_k a_k z^k`` by Horner's rule (scalar or array ``z``)."""
    a = _coeffs(a).a
    z = np.asarray(z, dtype=complex)
    g = np.full(z.shape, a[-1], dtype=complex)
    for ak in reversed(a[:-1]):
        g = g * z + ak
    return g if g.ndim else complex(g)


@dataclass(frozen=True)
class EnergyProfile:
    b: tuple[float, ...]
    m: int
    r: int
    p: int
    lam: Optional[float] = None
    b_sm1: float = field(default=float("nan"))

    @property
    def strongly_stable(self) -> bool:
        return self.lam is not None

    @property
    def b_leading(self) -> float:
        return self.b[self.m - 1]


def energy_profile(a, tol: float = ZERO_TOL) -> EnergyProfile:
    """Collect the energy coefficients, orders and (if any) the stability bound."""
    coeffs = _coeffs(a)
    b = energy_coefficients(coeffs)
    m, r = leading_index(b, tol, scale=energy_coefficient_scales(coeffs))
    try:
        lam, _ = strong_stability_bound(coeffs, tol)
    except NotStronglyStableError:
        lam = None
    b_sm1 = float(b[coeffs.s - 2]) if coeffs.s >= 2 else float("nan")
    return EnergyProfile(
        b=tuple(float(x) for x in b),
        m=m,
        r=r,
        p=solution_order(coeffs),
        lam=lam,
        b_sm1=b_sm1,
    )
