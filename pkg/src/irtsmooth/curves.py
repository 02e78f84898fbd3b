"""Curve-level analytics on top of the kernel OCC estimates.

Standard errors and pointwise confidence intervals, expected item and test
scores, the conditional score standard deviation, relative credibility
curves with their maximum-likelihood abilities, subject-level curve
evaluation, the total-score density, and item-total correlations.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import ndtri

from .ability import AbilityEstimates
from .data import ResponseMatrix, ScoringScheme
from .errors import (DegenerateDensityError, DegenerateLikelihoodError,
                     DomainError, InputError)
from .kernel import (EvaluationGrid, Kernel, binned_selections,
                     occ_curve_binned, occ_curve_exact, weight_matrix)

_MODULE = "curves"

RCC_PROBABILITY_FLOOR = 1e-12


@dataclass(frozen=True)
class ConfidenceConfig:
    """Two-sided confidence level; z is the 1 - alpha/2 normal quantile."""

    alpha: float = 0.05

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise DomainError("alpha must lie in (0, 1)",
                              module=_MODULE, operation="ConfidenceConfig")

    @property
    def z(self) -> float:
        return float(ndtri(1.0 - self.alpha / 2.0))


@dataclass(frozen=True)
class ItemCurves:
    """One item's estimated curves on the shared grid.

    occ and stderr are (q x m) with one column per option (including a
    synthetic missing option when present); weights holds the option scores.
    """

    label: str
    occ: np.ndarray
    stderr: np.ndarray
    weights: np.ndarray
    bandwidth: float
    keyed_option: int | None  # 1-based code of the max-weight option, if any

    @property
    def n_options(self) -> int:
        return self.occ.shape[1]

    def eis(self) -> np.ndarray:
        return expected_item_score(self)

    def eis_bounds(self) -> tuple[float, float]:
        return float(self.weights.min()), float(self.weights.max())


@dataclass(frozen=True)
class CurveSet:
    """All items' curves plus the inputs needed for subject-level analytics."""

    items: tuple[ItemCurves, ...]
    grid: EvaluationGrid
    thetas: np.ndarray
    kernel: Kernel

    @property
    def n_items(self) -> int:
        return len(self.items)


@dataclass(frozen=True)
class RelativeCredibility:
    """One subject's relative likelihood over the grid, normalized to max 1."""

    curve: np.ndarray
    theta_ml: float
    score_ml: float
    floored: bool  # True when some factor hit the probability floor


class SubjectScale(Enum):
    OBSERVED_SCORE = "observed"
    THETA_ML = "ml"


def estimate_curves(data: ResponseMatrix, scheme: ScoringScheme,
                    ability: AbilityEstimates, grid: EvaluationGrid,
                    bandwidths: np.ndarray, kernel: Kernel,
                    exact: bool = False) -> CurveSet:
    """Estimate every item's OCC matrix and standard errors on the grid.

    The binned estimator is the production path; ``exact`` switches to the
    unbinned sum over subjects (identical when subjects sit on grid points).
    """
    scheme.validate_lengths(data)
    if data.has_missing():
        raise InputError("apply a missing policy before curve estimation",
                         module=_MODULE, operation="estimate_curves")
    bandwidths = np.asarray(bandwidths, dtype=np.float64)
    if bandwidths.size != data.n_items:
        raise InputError(f"{bandwidths.size} bandwidths for {data.n_items} items",
                         module=_MODULE, operation="estimate_curves")
    totals = data.total_options()
    items = []
    for j in range(data.n_items):
        m = int(totals[j])
        col = data.selections[:, j]
        h = float(bandwidths[j])
        if exact:
            occ = occ_curve_exact(ability.thetas, col, m, grid.points, h, kernel)
        else:
            ytilde = binned_selections(grid, col, m)
            occ = occ_curve_binned(grid, ytilde, h, kernel)
        stderr = occ_stderr(ability.thetas, occ, grid, h, kernel)
        w = scheme.weights[j]
        keyed = None
        if np.ptp(w) > 0:
            keyed = int(np.argmax(w)) + 1
        items.append(ItemCurves(label=data.item_labels[j], occ=occ,
                                stderr=stderr, weights=w, bandwidth=h,
                                keyed_option=keyed))
    return CurveSet(items=tuple(items), grid=grid,
                    thetas=np.asarray(ability.thetas, dtype=np.float64),
                    kernel=kernel)


def curve_at_thetas(occ: np.ndarray, grid: EvaluationGrid,
                    thetas: np.ndarray) -> np.ndarray:
    """Evaluate a (q x m) grid curve at arbitrary abilities by linear interpolation."""
    thetas = np.asarray(thetas, dtype=np.float64)
    out = np.empty((thetas.size, occ.shape[1]))
    for l in range(occ.shape[1]):
        out[:, l] = np.interp(thetas, grid.points, occ[:, l])
    return out


def occ_stderr(thetas: np.ndarray, occ: np.ndarray, grid: EvaluationGrid,
               h: float, kernel: Kernel) -> np.ndarray:
    """Pointwise standard errors of the OCC estimate.

    Each selection indicator is Bernoulli with success probability given by
    the fitted curve at the subject's ability (linear interpolation), so the
    variance at an evaluation point is the squared-weight sum of those
    Bernoulli variances.
    """
    p_subj = curve_at_thetas(occ, grid, thetas)
    bern = p_subj * (1.0 - p_subj)
    w = weight_matrix(thetas, grid.points, h, kernel)
    return np.sqrt((w * w) @ bern)


def expected_item_score(item: ItemCurves) -> np.ndarray:
    """Weight-averaged OCC: the regression of the item score on ability."""
    return item.occ @ item.weights


def eis_stderr(thetas: np.ndarray, item: ItemCurves, grid: EvaluationGrid,
               kernel: Kernel) -> np.ndarray:
    """Pointwise standard errors of the expected item score.

    The per-subject score variance combines the Bernoulli variances of the
    options with the negative cross terms coming from selections being
    mutually exclusive (y_l * y_t = 0 for l != t).
    """
    x = item.weights
    p = curve_at_thetas(item.occ, grid, thetas)
    var_term = (p * (1.0 - p)) @ (x * x)
    cross_term = (p @ x) ** 2 - (p * p) @ (x * x)
    per_subject = var_term - cross_term
    w = weight_matrix(thetas, grid.points, item.bandwidth, kernel)
    return np.sqrt(np.maximum((w * w) @ per_subject, 0.0))


def confidence_band(estimate: np.ndarray, stderr: np.ndarray,
                    conf: ConfidenceConfig) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric approximate pointwise interval: estimate -/+ z * stderr."""
    arm = conf.z * stderr
    return estimate - arm, estimate + arm


def expected_test_score(curves: CurveSet) -> np.ndarray:
    """Sum of expected item scores over the (shared-grid) items."""
    ets = np.zeros(curves.grid.size)
    for item in curves.items:
        ets += expected_item_score(item)
    return ets


def score_variance(occ: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Per-grid-point variance of the item score implied by a curve matrix."""
    x = weights
    var_term = (occ * (1.0 - occ)) @ (x * x)
    cross_term = (occ @ x) ** 2 - (occ * occ) @ (x * x)
    return var_term - cross_term


def conditional_score_sd(curves: CurveSet) -> np.ndarray:
    """Conditional standard deviation of the total score along the grid.

    Items are locally independent given ability, so per-item score variances
    add before the square root.
    """
    total = np.zeros(curves.grid.size)
    for item in curves.items:
        total += score_variance(item.occ, item.weights)
    return np.sqrt(np.maximum(total, 0.0))


def relative_credibility(curves: CurveSet, selections: np.ndarray,
                         ets: np.ndarray | None = None) -> RelativeCredibility:
    """Relative likelihood of each grid ability given one response pattern.

    The product of selected-option probabilities is taken in log space and
    normalized so its maximum is exactly 1. The maximum-likelihood ability
    is the (smallest, on ties) grid point attaining that maximum, and the ML
    score is the expected test score there.
    """
    selections = np.asarray(selections, dtype=np.int64)
    if selections.size != curves.n_items:
        raise InputError(
            f"{selections.size} selections for {curves.n_items} items",
            module=_MODULE, operation="relative_credibility")
    if ets is None:
        ets = expected_test_score(curves)
    log_l = np.zeros(curves.grid.size)
    floored = False
    for j, item in enumerate(curves.items):
        col = item.occ[:, selections[j] - 1]
        if np.all(col <= 0.0):
            raise DegenerateLikelihoodError(
                f"option {selections[j]} of item {item.label!r} has zero "
                "probability across the whole grid",
                module=_MODULE, operation="relative_credibility")
        if np.any(col < RCC_PROBABILITY_FLOOR):
            floored = True
        log_l += np.log(np.maximum(col, RCC_PROBABILITY_FLOOR))
    log_l -= log_l.max()
    curve = np.exp(log_l)
    idx = int(np.argmax(curve))
    return RelativeCredibility(curve=curve, theta_ml=float(curves.grid.points[idx]),
                               score_ml=float(ets[idx]), floored=floored)


def credibility_all(curves: CurveSet, data: ResponseMatrix,
                    ets: np.ndarray | None = None,
                    ) -> tuple[list[RelativeCredibility | None], list[int]]:
    """Relative credibility for every subject; degenerate ones return None.

    The second element lists the (0-based) subjects whose likelihood was
    degenerate, for reporting.
    """
    if ets is None:
        ets = expected_test_score(curves)
    out: list[RelativeCredibility | None] = []
    failed: list[int] = []
    for i in range(data.n_subjects):
        try:
            out.append(relative_credibility(curves, data.selections[i], ets))
        except DegenerateLikelihoodError:
            out.append(None)
            failed.append(i)
    return out, failed


def subject_occ(curves: CurveSet, ability: AbilityEstimates,
                scale: SubjectScale = SubjectScale.OBSERVED_SCORE,
                ) -> list[np.ndarray]:
    """Per item, the (m_j x n) option probabilities at each subject's position.

    The position is the subject's ordinal ability (observed-score scale) or
    the maximum-likelihood ability; curves are linearly interpolated.
    """
    if scale is SubjectScale.THETA_ML:
        if ability.theta_ml is None:
            raise InputError("ML abilities not computed yet",
                             module=_MODULE, operation="subject_occ")
        positions = ability.theta_ml
    else:
        positions = ability.thetas
    out = []
    for item in curves.items:
        out.append(curve_at_thetas(item.occ, curves.grid, positions).T)
    return out


def score_density(total_scores: np.ndarray,
                  grid_size: int = 512) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian kernel density of the total scores.

    Bandwidth 1.06 * s * n^(-1/5) with s the sample standard deviation; the
    density is evaluated on ``grid_size`` equispaced points covering the
    data range padded by three bandwidths.
    """
    t = np.asarray(total_scores, dtype=np.float64)
    n = t.size
    if n < 2:
        raise InputError("density needs at least 2 scores",
                         module=_MODULE, operation="score_density")
    s = float(np.std(t, ddof=1))
    if s <= 0.0:
        raise DegenerateDensityError("total scores have zero variance",
                                     module=_MODULE, operation="score_density")
    h = 1.06 * s * n ** -0.2
    xs = np.linspace(t.min() - 3.0 * h, t.max() + 3.0 * h, grid_size)
    z = (xs[:, None] - t[None, :]) / h
    dens = np.exp(-0.5 * z * z).sum(axis=1) / (n * h * np.sqrt(2.0 * np.pi))
    return xs, dens


def item_total_correlation(data: ResponseMatrix,
                           scheme: ScoringScheme) -> np.ndarray:
    """Product-moment correlation of each item's score with the total score.

    Zero-variance items (or a zero-variance total) yield NaN as the
    undefined marker.
    """
    scheme.validate_lengths(data)
    if data.has_missing():
        raise InputError("apply a missing policy before correlations",
                         module=_MODULE, operation="item_total_correlation")
    n, k = data.selections.shape
    item_scores = np.empty((n, k))
    for j in range(k):
        item_scores[:, j] = scheme.weights[j][data.selections[:, j] - 1]
    total = item_scores.sum(axis=1)
    t_centered = total - total.mean()
    t_ss = float(t_centered @ t_centered)
    out = np.full(k, np.nan)
    for j in range(k):
        x = item_scores[:, j] - item_scores[:, j].mean()
        x_ss = float(x @ x)
        if x_ss <= 0.0 or t_ss <= 0.0:
            continue
        out[j] = float(x @ t_centered) / np.sqrt(x_ss * t_ss)
    return out
