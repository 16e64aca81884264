"""Error norms, convergence orders, stability regions and energy-drift fits."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .rk_core import amplification, energy_coefficient_scales, energy_coefficients, ZERO_TOL

__all__ = [
    "ROUNDOFF_FLOOR",
    "ConvergenceRow",
    "ConvergenceTable",
    "StabilityRegion",
    "error_norms",
    "relative_energy_deviation",
    "convergence_orders",
    "fit_order",
    "stability_region",
    "region_area",
    "imaginary_axis_interval",
    "energy_decay_fit",
]

ROUNDOFF_FLOOR = 5e-16
DEFAULT_WINDOW = (-6.0, 1.0, -5.0, 5.0)


def error_norms(errors, spacing: float) -> tuple[float, float, float]:
    """``(spacing * sum|e|, spacing * sqrt(sum e^2), max|e|)``."""
    if not spacing > 0:
        raise ValueError("spacing must be positive")
    e = np.abs(np.asarray(errors, dtype=float).ravel())
    if e.size == 0:
        raise ValueError("no errors given")
    return float(spacing * e.sum()), float(spacing * math.sqrt(float(e @ e))), float(e.max())


def relative_energy_deviation(e0: float, et: float) -> float:
    if e0 == 0:
        raise ValueError("initial energy is zero")
    return (et - e0) / e0


@dataclass
class ConvergenceRow:
    n: int
    eps1: float = math.nan
    eps2: float = math.nan
    eps_inf: float = math.nan
    eps_e: float = math.nan
    order1: Optional[float] = None
    order2: Optional[float] = None
    order_inf: Optional[float] = None
    order_e: Optional[float] = None
    n_t: Optional[int] = None
    unstable: bool = False


@dataclass
class ConvergenceTable:
    rows: list[ConvergenceRow] = field(default_factory=list)
    label: str = ""

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    @property
    def ns(self) -> np.ndarray:
        return np.array([r.n for r in self.rows])


_PAIRS = (("eps1", "order1"), ("eps2", "order2"), ("eps_inf", "order_inf"), ("eps_e", "order_e"))


def _order(coarse: float, fine: float, floor: float) -> Optional[float]:
    coarse, fine = abs(coarse), abs(fine)
    if not (math.isfinite(coarse) and math.isfinite(fine)):
        return None
    if fine < floor or coarse == 0.0:
        return None
    return math.log2(coarse / fine)


def convergence_orders(table: ConvergenceTable, floor: float = ROUNDOFF_FLOOR) -> ConvergenceTable:
    """Fill the order columns with ``log2`` of consecutive error ratios.

    Resolutions must double from row to row.  An order is left empty when the
    finer error sits below ``floor`` or either row is unstable.
    """
    rows = sorted(table.rows, key=lambda r: r.n)
    out = [replace(rows[0], order1=None, order2=None, order_inf=None, order_e=None)] if rows else []
    for prev, row in zip(rows, rows[1:]):
        if row.n != 2 * prev.n:
            raise ValueError(f"resolutions must double: {prev.n} -> {row.n}")
        orders = {}
        for eps, order in _PAIRS:
            if prev.unstable or row.unstable:
                orders[order] = None
            else:
                orders[order] = _order(getattr(prev, eps), getattr(row, eps), floor)
        out.append(replace(row, **orders))
    return ConvergenceTable(out, table.label)


def fit_order(ns: Sequence[float], errors: Sequence[float], floor: float = 0.0) -> float:
    """Least-squares slope of ``-log2|err|`` against ``log2 n``, ignoring ``|err| <= floor``."""
    ns = np.asarray(ns, dtype=float)
    err = np.abs(np.asarray(errors, dtype=float))
    keep = np.isfinite(err) & (err > floor)
    if keep.sum() < 2:
        raise ValueError("need at least two errors above the floor to fit an order")
    slope = np.polyfit(np.log2(ns[keep]), np.log2(err[keep]), 1)[0]
    return float(-slope)


# ---------------------------------------------------------------------------
# Stability regions
# ---------------------------------------------------------------------------

@dataclass
class StabilityRegion:
    re: np.ndarray
    im: np.ndarray
    modulus: np.ndarray  # shape (len(im), len(re))
    boundary: np.ndarray  # complex boundary samples

    def ordered_boundary(self) -> np.ndarray:
        """Boundary samples sorted by angle about their centroid."""
        b = self.boundary
        if b.size == 0:
            return b
        centre = b.mean()
        return b[np.argsort(np.angle(b - centre), kind="stable")]


def _crossings(x0, x1, f0, f1):
    # linear interpolation of log|G| between neighbours with a sign change
    mask = (f0 <= 0) != (f1 <= 0)
    t = f0[mask] / (f0[mask] - f1[mask])
    return x0[mask] + t * (x1[mask] - x0[mask])


def stability_region(a, window=DEFAULT_WINDOW, resolution: int = 1024) -> StabilityRegion:
    """Sample ``|G(z)|`` on a uniform grid and extract ``|G| = 1`` crossings."""
    if resolution < 16:
        raise ValueError("resolution must be >= 16")
    re_lo, re_hi, im_lo, im_hi = window
    re = np.linspace(re_lo, re_hi, resolution)
    im = np.linspace(im_lo, im_hi, resolution)
    z = re[None, :] + 1j * im[:, None]
    mod = np.abs(amplification(a, z))
    with np.errstate(divide="ignore"):
        f = np.log(mod)
    f = np.where(np.isfinite(f), f, -745.0)
    pts = [
        _crossings(z[:, :-1], z[:, 1:], f[:, :-1], f[:, 1:]),
        _crossings(z[:-1, :], z[1:, :], f[:-1, :], f[1:, :]),
    ]
    boundary = np.concatenate(pts)
    return StabilityRegion(re, im, mod, boundary)


def region_area(region: StabilityRegion) -> float:
    """Grid estimate of the area where ``|G| <= 1``."""
    dre = region.re[1] - region.re[0]
    dim = region.im[1] - region.im[0]
    return float(np.count_nonzero(region.modulus <= 1.0) * dre * dim)


def imaginary_axis_interval(a, y_max: float = 10.0, tol: float = 1e-12, samples: int = 4096) -> float:
    """Largest ``y*`` such that ``|G(iy)| <= 1`` on ``[0, y*]``.

    Uses ``|G(iy)|^2 - 1 = sum_k b_k y^{2k}``, divided by the leading power
    ``y^{2m}`` so the sign at the origin is that of ``b_m``.  Zero entries of
    ``b`` below the rounding threshold are dropped first.
    """
    if not y_max > 0:
        raise ValueError("y_max must be positive")
    b = energy_coefficients(a)
    b = np.where(np.abs(b) > ZERO_TOL * energy_coefficient_scales(a), b, 0.0)
    m = int(np.flatnonzero(b)[0])
    reduced = b[m:]  # coefficients of powers (y^2)^0, (y^2)^1, ...

    def excess(y):
        return np.polynomial.polynomial.polyval(np.asarray(y) ** 2, reduced)

    if reduced[0] > 0:
        return 0.0
    ys = np.linspace(0.0, y_max, samples + 1)
    vals = excess(ys)
    bad = np.flatnonzero(vals > 0)
    if bad.size == 0:
        return float(y_max)
    lo, hi = ys[bad[0] - 1], ys[bad[0]]
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if excess(mid) > 0:
            hi = mid
        else:
            lo = mid
    return float(lo)


# ---------------------------------------------------------------------------
# Long-run energy drift
# ---------------------------------------------------------------------------

def energy_decay_fit(record, floor: float = 1e-15) -> tuple[float, float]:
    """Fit ``log10|eps_E| = slope * log10 t + intercept`` over recorded samples."""
    t = np.asarray(record.times, dtype=float)
    eps = np.abs(np.asarray(record.relative_energy_deviation, dtype=float))
    if np.count_nonzero(t > 0) < 10:
        raise ValueError("need at least 10 recorded samples after t = 0")
    keep = (t > 0) & (eps >= floor)
    if keep.sum() < 2:
        raise ValueError("energy exactly conserved to precision")
    slope, intercept = np.polyfit(np.log10(t[keep]), np.log10(eps[keep]), 1)
    return float(slope), float(intercept)
