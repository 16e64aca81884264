"""Named methods, closed-form families, and a numeric re-derivation of the
energy-superconvergent coefficients."""
from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .rk_core import (
    EnergyProfile,
    RKCoefficients,
    energy_coefficients,
    energy_profile,
    leading_index,
    energy_coefficient_scales,
)

__all__ = [
    "MethodDescriptor",
    "taylor_method",
    "family_one_below",
    "family_two_below",
    "catalog",
    "get_method",
    "solve_esc",
    "esc_residual",
]

log = logging.getLogger(__name__)

_NAME_RE = re.compile(r"^RK\((\d+),(\d+),(\d+)\)(-[ab])?$")


@dataclass(frozen=True)
class MethodDescriptor:
    name: str
    coefficients: RKCoefficients
    profile: EnergyProfile

    @property
    def s(self) -> int:
        return self.coefficients.s

    @property
    def p(self) -> int:
        return self.profile.p

    @property
    def r(self) -> int:
        return self.profile.r

    @property
    def lam(self):
        return self.profile.lam

    @classmethod
    def build(cls, name: str, a) -> "MethodDescriptor":
        """Construct and check that ``name`` agrees with the recomputed orders."""
        coeffs = RKCoefficients(tuple(a), name=name)
        profile = energy_profile(coeffs)
        match = _NAME_RE.match(name)
        if match is None:
            raise ValueError(f"malformed method name {name!r}")
        s, p, r = (int(g) for g in match.groups()[:3])
        got = (coeffs.s, profile.p, profile.r)
        if (s, p, r) != got:
            raise ValueError(f"{name}: recomputed (s, p, r) = {got}")
        return cls(name, coeffs, profile)


def _taylor_prefix(n: int) -> list[float]:
    return [1.0 / math.factorial(k) for k in range(n + 1)]


def taylor_method(s: int) -> RKCoefficients:
    """The ``s``-stage method of order ``s``: ``a_k = 1/k!``."""
    if s < 1:
        raise ValueError("s must be >= 1")
    return RKCoefficients(tuple(_taylor_prefix(s)), name=f"taylor-{s}")


def family_one_below(s: int) -> RKCoefficients:
    """Odd ``s > 1``: order ``s-1`` and energy order ``s+2``."""
    if s <= 1 or s % 2 == 0:
        raise ValueError(f"family_one_below needs odd s > 1, got {s}")
    f = math.factorial
    a = _taylor_prefix(s - 1) + [1.0 / f(s) - 1.0 / f(s + 1)]
    return RKCoefficients(tuple(a))


def family_two_below(s: int) -> RKCoefficients:
    """Even ``s > 4``: order ``s-2`` and energy order ``s+3``."""
    if s <= 4 or s % 2 == 1:
        raise ValueError(f"family_two_below needs even s > 4, got {s}")
    f = math.factorial
    common = 3.0 / f(s + 2) - 3.0 / f(s + 1)
    a = _taylor_prefix(s - 2) + [common + 1.0 / f(s - 1), common + 1.0 / f(s)]
    return RKCoefficients(tuple(a))


def _table_coefficients() -> list[tuple[str, list[float]]]:
    r2, r5, r10 = math.sqrt(2.0), math.sqrt(5.0), math.sqrt(10.0)
    p2 = [1.0, 1.0, 0.5]
    p4 = _taylor_prefix(4)
    return [
        ("RK(3,2,5)", p2 + [1 / 8]),
        ("RK(4,2,7)-a", p2 + [(2 - r2) / 4, (3 - 2 * r2) / 8]),
        ("RK(4,2,7)-b", p2 + [(2 + r2) / 4, (3 + 2 * r2) / 8]),
        ("RK(5,2,9)-a", p2 + [(r5 - 1) / 8, (r5 - 2) / 8, (r5 - 2) ** 2 / (16 * (r5 - 1))]),
        ("RK(5,2,9)-b", p2 + [1 / 4, 1 / 8, 1 / 32]),
        ("RK(4,4,5)", p4),
        ("RK(5,4,7)", p4 + [1 / 144]),
        ("RK(6,4,9)", p4 + [1 / 128, 1 / 1152]),
        ("RK(7,4,11)", p4 + [(r10 - 2) / 144, (r10 - 3) / 144, (8 * r10 - 25) / 3456]),
    ]


@lru_cache(maxsize=None)
def _catalog() -> tuple[MethodDescriptor, ...]:
    return tuple(MethodDescriptor.build(name, a) for name, a in _table_coefficients())


def catalog() -> list[MethodDescriptor]:
    """All nine tabulated methods, second-order family first."""
    return list(_catalog())


def get_method(name: str) -> MethodDescriptor:
    key = name.replace(" ", "").upper()
    for m in _catalog():
        if m.name.upper() == key:
            return m
    raise KeyError(f"unknown method {name!r}; known: {[m.name for m in _catalog()]}")


# ---------------------------------------------------------------------------
# Numeric re-derivation
# ---------------------------------------------------------------------------

def _check_esc_args(s: int, p: int):
    if p < 2 or p % 2:
        raise ValueError(f"p must be even and >= 2, got {p}")
    if not p < s <= p + 3:
        raise ValueError(f"need p < s <= p + 3, got s={s}, p={p}")


def _targets(s: int, p: int) -> range:
    # indices k of b_k forced to vanish
    return range(p // 2 + 1, s - p // 2 + 1)


def esc_residual(x: np.ndarray, s: int, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Residual ``b_k`` over the target indices and its Jacobian in ``a_{p+1}..a_s``."""
    a = np.concatenate([_taylor_prefix(p), x])
    ks = list(_targets(s, p))
    res = np.empty(len(ks))
    jac = np.zeros((len(ks), s - p))
    for row, k in enumerate(ks):
        lo, hi = max(0, 2 * k - s), min(2 * k, s)
        res[row] = sum((-1) ** (k + i) * a[i] * a[2 * k - i] for i in range(lo, hi + 1))
        for j in range(p + 1, s + 1):
            if lo <= 2 * k - j <= hi:
                jac[row, j - p - 1] = 2.0 * (-1) ** (k + j) * a[2 * k - j]
    return res, jac


def _polish(x, s, p, steps=3):
    # a few undamped steps past the tolerance, kept only while the update shrinks
    last = np.inf
    for _ in range(steps):
        res, jac = esc_residual(x, s, p)
        try:
            step = np.linalg.solve(jac, -res)
        except np.linalg.LinAlgError:
            break
        size = np.max(np.abs(step))
        if not size < last:
            break
        x, last = x + step, size
    return x


def _newton(x0, s, p, tol, max_iter, max_halvings):
    x = np.array(x0, dtype=float)
    res, jac = esc_residual(x, s, p)
    norm = np.max(np.abs(res))
    for _ in range(max_iter):
        if norm < tol:
            return _polish(x, s, p)
        try:
            step = np.linalg.solve(jac, -res)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(step)):
            return None
        t = 1.0
        for _ in range(max_halvings + 1):
            x_new = x + t * step
            res_new, jac_new = esc_residual(x_new, s, p)
            norm_new = np.max(np.abs(res_new))
            if norm_new < norm:
                break
            t *= 0.5
        else:
            # no descent; accept only if already at round-off level
            return x if norm < 10 * tol else None
        x, res, jac, norm = x_new, res_new, jac_new, norm_new
    return x if norm < tol else None


def solve_esc(
    s: int,
    p: int,
    seeds: int = 32,
    *,
    rng_seed: int = 0,
    tol: float = 1e-14,
    max_iter: int = 100,
    max_halvings: int = 40,
    dedup: float = 1e-9,
) -> list[RKCoefficients]:
    """Find real ``a_{p+1}..a_s`` zeroing ``b_k`` for ``p/2 < k <= s - p/2``.

    Damped Newton from ``seeds`` random starts (log-uniform magnitudes in
    ``[1e-6, 1]`` with random signs) plus the Taylor start ``a_k = 1/k!``.
    Distinct roots reaching energy order ``2s - p + 1`` are returned sorted by
    ``a_{p+1}``.
    """
    _check_esc_args(s, p)
    n = s - p
    rng = np.random.default_rng(rng_seed)
    starts = [np.array([1.0 / math.factorial(k) for k in range(p + 1, s + 1)])]
    for _ in range(seeds):
        mag = 10.0 ** rng.uniform(-6.0, 0.0, size=n)
        sign = rng.choice([-1.0, 1.0], size=n)
        starts.append(mag * sign)

    roots: list[np.ndarray] = []
    failed = 0
    for x0 in starts:
        x = _newton(x0, s, p, tol, max_iter, max_halvings)
        if x is None:
            failed += 1
            continue
        if abs(x[-1]) <= 1e-15:
            continue
        if any(np.max(np.abs(x - y)) < dedup for y in roots):
            continue
        roots.append(x)

    out = []
    for x in sorted(roots, key=lambda v: v[0]):
        coeffs = RKCoefficients(tuple(_taylor_prefix(p)) + tuple(x))
        b = energy_coefficients(coeffs)
        _, r = leading_index(b, scale=energy_coefficient_scales(coeffs))
        if r != 2 * s - p + 1:
            log.debug("discarding root %s with r=%d", x, r)
            continue
        out.append(coeffs)
    if not out:
        log.warning("solve_esc(%d, %d): no convergent seed (%d of %d failed)", s, p, failed, len(starts))
    return out
