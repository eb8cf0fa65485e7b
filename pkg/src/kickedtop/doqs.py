"""Density of quasienergy states from the exact spectrum: histogram and
trace-series estimators, integrated DOQS, and extraction of the logarithmic
divergence and the jump discontinuities.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import _kernels
from .effective import fold_quasienergy
from .floquet import FloquetSpectrum

__all__ = [
    "DoqsCurve",
    "LogFit",
    "midpoint_grid",
    "doqs_histogram",
    "doqs_from_traces",
    "integrated_doqs",
    "fit_log_divergence",
    "estimate_jump",
]


@dataclass(frozen=True)
class DoqsCurve:
    """rho(eps) on an ascending grid in [-omega/2, omega/2), plus N(eps).

    meta carries the producing parameters (j, kappa, p, T, bins or n_max,
    sigma, route).  n_integrated is filled by integrated_doqs.
    """

    grid: np.ndarray
    rho: np.ndarray
    meta: dict
    n_integrated: Optional[np.ndarray] = None

    @property
    def omega(self) -> float:
        return 2.0 * np.pi / self.meta.get("T", 1.0)


@dataclass(frozen=True)
class LogFit:
    """Least-squares fit of rho = -A log|eps - eps_S| + c."""

    amplitude: float
    offset: float
    amplitude_stderr: float


def midpoint_grid(omega: float, n: int) -> np.ndarray:
    """n cell midpoints tiling [-omega/2, omega/2)."""
    h = omega / n
    return -0.5 * omega + h * (np.arange(n) + 0.5)


def doqs_histogram(spec: FloquetSpectrum, bins: int) -> DoqsCurve:
    """Equal-width binned DOQS, normalized so the cell sum is exactly 1."""
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    omega = spec.omega
    counts, _ = np.histogram(
        spec.quasienergies, bins=bins, range=(-0.5 * omega, 0.5 * omega)
    )
    width = omega / bins
    dim = spec.dim
    rho = counts / (dim * width)
    n_int = np.cumsum(counts) / dim
    meta = {"T": spec.T, "bins": bins, "route": "histogram", "dim": dim}
    return DoqsCurve(grid=midpoint_grid(omega, bins), rho=rho, meta=meta, n_integrated=n_int)


def doqs_from_traces(traces: np.ndarray, grid: np.ndarray, sigma: float, dim: int, T: float = 1.0) -> DoqsCurve:
    """Gaussian-damped trace series for rho(eps).

    rho = T/2pi + (T/(pi dim)) sum_n exp(-n^2 sigma^2 / 2) Re[t_n e^{i n eps T}];
    sigma is the effective smoothing scale, trading series truncation against
    resolution.
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    traces = np.ascontiguousarray(traces, dtype=complex)
    grid = np.ascontiguousarray(grid, dtype=float)
    rho = _kernels.trace_series_rho(traces, grid, float(sigma), float(T), float(dim))
    meta = {"T": T, "n_max": len(traces), "sigma": sigma, "route": "traces", "dim": dim}
    return DoqsCurve(grid=grid, rho=rho, meta=meta)


def _cell_widths(grid: np.ndarray) -> np.ndarray:
    # cells bounded by midpoints between grid neighbors, end cells symmetric
    b = np.empty(len(grid) + 1)
    b[1:-1] = 0.5 * (grid[1:] + grid[:-1])
    b[0] = grid[0] - 0.5 * (grid[1] - grid[0])
    b[-1] = grid[-1] + 0.5 * (grid[-1] - grid[-2])
    return np.diff(b)


def integrated_doqs(curve: DoqsCurve) -> DoqsCurve:
    """Cumulative integral N(eps) from -omega/2, by cell sums.

    Each grid point owns the cell bounded by the midpoints to its neighbors
    (grid points are cell centers for the histogram and uniform-grid routes),
    so histogram curves integrate to exactly 1 and uniform trace-series grids
    to 1 up to the series aliasing error.
    """
    if len(curve.grid) < 2:
        raise ValueError("need at least two grid points")
    n_int = np.cumsum(curve.rho * _cell_widths(curve.grid))
    return replace(curve, n_integrated=n_int)


def fit_log_divergence(curve: DoqsCurve, eps_s: float, window: tuple = None) -> LogFit:
    """Fit rho = -A log|eps - eps_S| + c over |eps - eps_S| in [r_min, r_max].

    Both sides of eps_S are pooled; distances are circular.  Defaults:
    r_min = 2 grid spacings (keeps the singular cell out), r_max = 0.25/T.
    """
    spacing = float(np.median(np.diff(curve.grid)))
    t_period = curve.meta.get("T", 1.0)
    if window is None:
        window = (2.0 * spacing, 0.25 / t_period)
    r_min, r_max = window
    if r_min < spacing:
        raise ValueError(f"r_min = {r_min} is below one grid spacing {spacing:.3e}")
    d = np.abs(fold_quasienergy(curve.grid - eps_s, curve.omega))
    sel = (d >= r_min) & (d <= r_max)
    if np.count_nonzero(sel) < 6:
        raise ValueError(f"only {np.count_nonzero(sel)} grid points in the fit window")
    x = np.log(d[sel])
    y = curve.rho[sel]
    design = np.column_stack([-x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    dof = len(y) - 2
    var = float(resid @ resid) / dof if dof > 0 else 0.0
    cov = var * np.linalg.inv(design.T @ design)
    return LogFit(
        amplitude=float(coef[0]),
        offset=float(coef[1]),
        amplitude_stderr=float(np.sqrt(cov[0, 0])),
    )


def estimate_jump(curve: DoqsCurve, eps_c: float, w: float) -> float:
    """rho jump across eps_c: mean over (eps_c, eps_c + w] minus mean over
    [eps_c - w, eps_c).  One-sided means cancel the symmetric part of the
    smooth background (including the log term) to first order."""
    spacing = float(np.median(np.diff(curve.grid)))
    if w < 2.0 * spacing:
        raise ValueError(f"window w = {w} must be at least two grid spacings ({2 * spacing:.3e})")
    d = fold_quasienergy(curve.grid - eps_c, curve.omega)
    right = (d > 0) & (d <= w)
    left = (d < 0) & (d >= -w)
    if not (np.any(right) and np.any(left)):
        raise ValueError("window contains no grid points on one side")
    return float(curve.rho[right].mean() - curve.rho[left].mean())
