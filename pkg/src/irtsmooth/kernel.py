"""Kernel functions, Nadaraya-Watson estimation, grids, bandwidth selection.

The option characteristic curve estimate at an evaluation point is the
kernel-weighted average of one-hot selection vectors. Production estimation
runs on a binned grid; the exact (unbinned) estimator is kept as an oracle
and exposed behind a flag.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Sequence

import numpy as np

from .errors import (DegenerateGridError, DomainError, EmptyNeighborhoodError,
                     InputError)

_MODULE = "kernel-core"

DEFAULT_GRID_SIZE = 51

ROT_CONSTANT = 1.06


class Kernel(Enum):
    GAUSSIAN = "gaussian"
    UNIFORM = "uniform"
    QUADRATIC = "quadratic"


def kernel_eval(kernel: Kernel, u: np.ndarray | float) -> np.ndarray:
    """K(u): Gaussian exp(-u^2/2); uniform and quadratic supported on [-1, 1]."""
    u = np.asarray(u, dtype=np.float64)
    if kernel is Kernel.GAUSSIAN:
        return np.exp(-0.5 * u * u)
    inside = (np.abs(u) <= 1.0).astype(np.float64)
    if kernel is Kernel.UNIFORM:
        return inside
    return (1.0 - u * u) * inside


@dataclass(frozen=True)
class KernelConfig:
    """Kernel choice plus the bandwidth policy and its resolved values."""

    kernel: Kernel = Kernel.GAUSSIAN
    bandwidth_policy: str = "rot"  # "rot" | "cv" | "fixed"
    bandwidths: np.ndarray | None = None

    def __post_init__(self):
        if self.bandwidths is not None:
            h = np.asarray(self.bandwidths, dtype=np.float64)
            h.setflags(write=False)
            object.__setattr__(self, "bandwidths", h)
            if np.any(h <= 0.0):
                raise DomainError("bandwidths must be positive",
                                  module=_MODULE, operation="KernelConfig")


@dataclass(frozen=True)
class EvaluationGrid:
    """Equally spaced evaluation points with subjects grouped into bins.

    Bin s covers [theta_s - delta/2, theta_s + delta/2); the last bin closes
    its right edge so the top subject is counted and sum(bin_counts) == n.
    """

    points: np.ndarray
    spacing: float
    bin_index: np.ndarray
    bin_counts: np.ndarray

    @property
    def size(self) -> int:
        return self.points.size


def build_grid(thetas: np.ndarray, q: int = DEFAULT_GRID_SIZE) -> EvaluationGrid:
    """q equally spaced points spanning the ability range, with bin counts."""
    thetas = np.asarray(thetas, dtype=np.float64)
    if q < 2:
        raise InputError("grid needs at least 2 points",
                         module=_MODULE, operation="build_grid")
    lo, hi = float(thetas.min()), float(thetas.max())
    if hi <= lo:
        raise DegenerateGridError("all ability estimates are equal; no grid span",
                                  module=_MODULE, operation="build_grid")
    points = np.linspace(lo, hi, q)
    delta = (hi - lo) / (q - 1)
    return grid_for_thetas(points, delta, thetas)


def grid_from_points(points: np.ndarray, thetas: np.ndarray) -> EvaluationGrid:
    """Build a grid from explicit evaluation points (must be equally spaced).

    Abilities outside the covered span are folded into the edge bins so the
    bin counts still sum to n.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.size < 2:
        raise InputError("explicit grids need at least 2 points",
                         module=_MODULE, operation="grid_from_points")
    gaps = np.diff(points)
    if np.any(gaps <= 0.0):
        raise InputError("evaluation points must be strictly increasing",
                         module=_MODULE, operation="grid_from_points")
    spacing = float(gaps.mean())
    if np.max(np.abs(gaps - spacing)) > 1e-9 * max(abs(spacing), 1.0):
        raise InputError("evaluation points must be equally spaced",
                         module=_MODULE, operation="grid_from_points")
    return grid_for_thetas(points, spacing, thetas)


def grid_for_thetas(points: np.ndarray, spacing: float,
                    thetas: np.ndarray) -> EvaluationGrid:
    """Bin abilities onto existing grid points (shared grids across groups)."""
    points = np.asarray(points, dtype=np.float64)
    thetas = np.asarray(thetas, dtype=np.float64)
    q = points.size
    idx = np.floor((thetas - points[0]) / spacing + 0.5).astype(np.int64)
    idx = np.clip(idx, 0, q - 1)
    counts = np.bincount(idx, minlength=q).astype(np.float64)
    points = points.copy()
    points.setflags(write=False)
    idx.setflags(write=False)
    counts.setflags(write=False)
    return EvaluationGrid(points=points, spacing=spacing, bin_index=idx,
                          bin_counts=counts)


def binned_selections(grid: EvaluationGrid, selections: np.ndarray,
                      n_options: int) -> np.ndarray:
    """Grouped one-hot tallies: out[s, l] counts bin-s subjects choosing l+1."""
    selections = np.asarray(selections, dtype=np.int64)
    q = grid.size
    flat = grid.bin_index * n_options + (selections - 1)
    tally = np.bincount(flat, minlength=q * n_options).astype(np.float64)
    return tally.reshape(q, n_options)


def rule_of_thumb_bandwidth(n: int, sigma_theta: float) -> float:
    """Plug-in bandwidth 1.06 * sigma_theta * n^(-1/5), shared by all items."""
    if n < 2:
        raise InputError("rule of thumb needs n >= 2",
                         module=_MODULE, operation="rule_of_thumb_bandwidth")
    if sigma_theta <= 0:
        raise DomainError("sigma_theta must be positive",
                          module=_MODULE, operation="rule_of_thumb_bandwidth")
    return ROT_CONSTANT * sigma_theta * float(n) ** -0.2


def nw_weights(thetas: np.ndarray, point: float, h: float,
               kernel: Kernel) -> np.ndarray:
    """Normalized kernel weights of every subject at one evaluation point."""
    if h <= 0:
        raise DomainError("bandwidth must be positive",
                          module=_MODULE, operation="nw_weights")
    raw = kernel_eval(kernel, (point - np.asarray(thetas, dtype=np.float64)) / h)
    total = raw.sum()
    if total <= 0.0:
        raise EmptyNeighborhoodError(
            f"no subject within kernel reach of evaluation point {point!r}",
            module=_MODULE, operation="nw_weights", location=f"theta={point}")
    return raw / total


def weight_matrix(thetas: np.ndarray, points: np.ndarray, h: float,
                  kernel: Kernel) -> np.ndarray:
    """Rows of Nadaraya-Watson weights, one row per evaluation point."""
    thetas = np.asarray(thetas, dtype=np.float64)
    points = np.asarray(points, dtype=np.float64)
    raw = kernel_eval(kernel, (points[:, None] - thetas[None, :]) / h)
    totals = raw.sum(axis=1)
    empty = totals <= 0.0
    if np.any(empty):
        where = points[empty][0]
        raise EmptyNeighborhoodError(
            f"no subject within kernel reach of evaluation point {where!r}",
            module=_MODULE, operation="weight_matrix", location=f"theta={where}")
    return raw / totals[:, None]


def nw_estimate(thetas: np.ndarray, selections: np.ndarray, n_options: int,
                point: float, h: float, kernel: Kernel) -> np.ndarray:
    """Exact Nadaraya-Watson option probabilities at one evaluation point.

    Returns the length-m vector sum_i w_i(point) * y_il: a convex
    combination of one-hot vectors, so entries are nonnegative and sum to 1.
    """
    selections = np.asarray(selections, dtype=np.int64)
    w = nw_weights(thetas, point, h, kernel)
    return np.bincount(selections - 1, weights=w, minlength=n_options)


def nw_estimate_binned(grid: EvaluationGrid, ytilde: np.ndarray, point: float,
                       h: float, kernel: Kernel) -> np.ndarray:
    """Binned Nadaraya-Watson estimate at one grid point.

    Exact when every subject sits on a grid point; otherwise a grouped
    approximation over the q bins.
    """
    if h <= 0:
        raise DomainError("bandwidth must be positive",
                          module=_MODULE, operation="nw_estimate_binned")
    ks = kernel_eval(kernel, (point - grid.points) / h)
    denom = ks @ grid.bin_counts
    if denom <= 0.0:
        raise EmptyNeighborhoodError(
            f"no occupied bin within kernel reach of {point!r}",
            module=_MODULE, operation="nw_estimate_binned", location=f"theta={point}")
    return (ks @ ytilde) / denom


def occ_curve_binned(grid: EvaluationGrid, ytilde: np.ndarray, h: float,
                     kernel: Kernel) -> np.ndarray:
    """Binned estimate at every grid point at once: a (q x m) curve matrix."""
    kmat = kernel_eval(kernel, (grid.points[:, None] - grid.points[None, :]) / h)
    denom = kmat @ grid.bin_counts
    empty = denom <= 0.0
    if np.any(empty):
        where = grid.points[empty][0]
        raise EmptyNeighborhoodError(
            f"no occupied bin within kernel reach of {where!r}",
            module=_MODULE, operation="occ_curve_binned", location=f"theta={where}")
    return (kmat @ ytilde) / denom[:, None]


def occ_curve_exact(thetas: np.ndarray, selections: np.ndarray, n_options: int,
                    points: np.ndarray, h: float, kernel: Kernel) -> np.ndarray:
    """Unbinned estimate at every evaluation point: a (q x m) curve matrix."""
    selections = np.asarray(selections, dtype=np.int64)
    w = weight_matrix(thetas, points, h, kernel)
    onehot = np.zeros((selections.size, n_options))
    onehot[np.arange(selections.size), selections - 1] = 1.0
    return w @ onehot


def cv_bandwidth(thetas: np.ndarray, selections: np.ndarray, n_options: int,
                 candidates: Sequence[float], kernel: Kernel,
                 ) -> tuple[float, np.ndarray]:
    """Leave-one-out cross-validation over a candidate bandwidth grid.

    For each candidate the deleted estimate at each subject's ability is
    compared with that subject's one-hot selection; the score is the mean
    squared vector distance. Candidates whose deleted neighborhood is empty
    for some subject (compact kernels) score +inf; ties break to the
    smallest bandwidth. Cost is O(candidates * n^2): the kernel matrix is
    recomputed per candidate since the Gaussian kernel does not factor
    across bandwidths.
    """
    thetas = np.asarray(thetas, dtype=np.float64)
    selections = np.asarray(selections, dtype=np.int64)
    cand = np.asarray(list(candidates), dtype=np.float64)
    if cand.size == 0:
        raise InputError("no bandwidth candidates",
                         module=_MODULE, operation="cv_bandwidth")
    if np.any(cand <= 0.0):
        raise DomainError("bandwidth candidates must be positive",
                          module=_MODULE, operation="cv_bandwidth")
    n = thetas.size
    if n < 3:
        raise InputError("cross-validation needs n >= 3",
                         module=_MODULE, operation="cv_bandwidth")

    onehot = np.zeros((n, n_options))
    onehot[np.arange(n), selections - 1] = 1.0
    diffs = thetas[:, None] - thetas[None, :]
    scores = np.empty(cand.size)
    for c, h in enumerate(cand):
        kmat = kernel_eval(kernel, diffs / h)
        np.fill_diagonal(kmat, 0.0)
        totals = kmat.sum(axis=1)
        if np.any(totals <= 0.0):
            scores[c] = np.inf
            continue
        predicted = (kmat / totals[:, None]) @ onehot
        scores[c] = float(np.mean(np.sum((onehot - predicted) ** 2, axis=1)))
    if not np.any(np.isfinite(scores)):
        raise EmptyNeighborhoodError(
            "every candidate bandwidth leaves some deleted neighborhood empty",
            module=_MODULE, operation="cv_bandwidth")
    best = scores.min()
    best_h = float(cand[scores == best].min())
    return best_h, scores


def default_cv_candidates(h_rot: float, count: int = 30) -> np.ndarray:
    """Log-spaced candidate grid on [0.2, 3] x the rule-of-thumb bandwidth."""
    return np.geomspace(0.2 * h_rot, 3.0 * h_rot, count)


def resolve_bandwidths(config: KernelConfig, data_selections: np.ndarray,
                       total_options: np.ndarray, thetas: np.ndarray,
                       sigma_theta: float) -> KernelConfig:
    """Fill per-item bandwidths according to the configured policy."""
    n, k = data_selections.shape
    if config.bandwidth_policy == "fixed":
        if config.bandwidths is None:
            raise InputError("fixed bandwidth policy needs explicit values",
                             module=_MODULE, operation="resolve_bandwidths")
        h = config.bandwidths
        if h.size == 1:
            h = np.repeat(h, k)
        if h.size != k:
            raise InputError(f"{h.size} bandwidths for {k} items",
                             module=_MODULE, operation="resolve_bandwidths")
        return replace(config, bandwidths=h)
    h_rot = rule_of_thumb_bandwidth(n, sigma_theta)
    if config.bandwidth_policy == "rot":
        return replace(config, bandwidths=np.full(k, h_rot))
    if config.bandwidth_policy == "cv":
        cand = default_cv_candidates(h_rot)
        best = np.empty(k)
        for j in range(k):
            best[j], _ = cv_bandwidth(thetas, data_selections[:, j],
                                      int(total_options[j]), cand, config.kernel)
        return replace(config, bandwidths=best)
    raise InputError(f"unknown bandwidth policy {config.bandwidth_policy!r}",
                     module=_MODULE, operation="resolve_bandwidths")
