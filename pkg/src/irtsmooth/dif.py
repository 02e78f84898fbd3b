"""Differential item functioning: group-wise curves on a pooled ability scale.

Groups are compared at equal ability, so ranking and the evaluation grid
come from the pooled sample; only the smoothing runs per group (with each
group's own n in the rule-of-thumb bandwidth).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .ability import AbilityEstimates
from .curves import CurveSet, estimate_curves, expected_test_score, score_density
from .data import ResponseMatrix, ScoringScheme
from .errors import DegenerateDensityError, InputError
from .kernel import (EvaluationGrid, Kernel, KernelConfig, build_grid,
                     grid_for_thetas, resolve_bandwidths)

_MODULE = "dif"

DEFAULT_MIN_GROUP_SIZE = 30

DEFAULT_QQ_PROBS = np.arange(1, 100) / 100.0


@dataclass(frozen=True)
class GroupCurves:
    """One group's curves, expected scores, and total-score density."""

    label: str
    size: int
    member_index: np.ndarray           # 0-based rows of the pooled matrix
    curves: CurveSet
    ets: np.ndarray
    expected_scores: np.ndarray        # per member, ETS interpolated at theta_i
    density: tuple[np.ndarray, np.ndarray] | None


@dataclass(frozen=True)
class GroupedAnalysis:
    """Pooled plus per-group estimation results for DIF inspection."""

    groups: tuple[GroupCurves, ...]
    pooled: CurveSet
    pooled_ets: np.ndarray
    ability: AbilityEstimates
    qq_pairs: dict[tuple[str, str], tuple[np.ndarray, np.ndarray, np.ndarray]]
    dropped: tuple[tuple[str, int], ...]


def qq_expected_scores(group_a: np.ndarray, group_b: np.ndarray,
                       probs: np.ndarray | None = None,
                       ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Matched empirical quantiles of two score samples.

    Uses linear-interpolation sample quantiles, so identical distributions
    land exactly on the diagonal. Returns (quantiles_a, quantiles_b, probs).
    """
    a = np.asarray(group_a, dtype=np.float64)
    b = np.asarray(group_b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise InputError("both groups need at least one score",
                         module=_MODULE, operation="qq_expected_scores")
    if probs is None:
        probs = DEFAULT_QQ_PROBS
    probs = np.asarray(probs, dtype=np.float64)
    qa = np.quantile(a, probs, method="linear")
    qb = np.quantile(b, probs, method="linear")
    return qa, qb, probs


def dif_estimate(data: ResponseMatrix, scheme: ScoringScheme,
                 ability: AbilityEstimates, group_labels: np.ndarray,
                 config: KernelConfig, q: int | None = None,
                 grid: EvaluationGrid | None = None,
                 min_group_size: int = DEFAULT_MIN_GROUP_SIZE,
                 ) -> GroupedAnalysis:
    """Estimate pooled and per-group curves over one shared ability scale.

    Groups smaller than ``min_group_size`` are dropped (recorded in
    ``dropped``); fewer than two surviving groups is an error. Bandwidths
    follow ``config``: the rule of thumb uses each group's own size, cv runs
    within each group, and fixed values apply to every group unchanged.
    """
    labels = np.asarray(group_labels)
    if labels.shape != (data.n_subjects,):
        raise InputError(
            f"{labels.size} group labels for {data.n_subjects} subjects",
            module=_MODULE, operation="dif_estimate")

    unique = sorted(str(v) for v in np.unique(labels))
    text_labels = labels.astype(str)
    kept, dropped = [], []
    for label in unique:
        size = int(np.sum(text_labels == label))
        if size < min_group_size:
            dropped.append((label, size))
        else:
            kept.append(label)
    if len(kept) < 2:
        raise InputError(
            f"only {len(kept)} group(s) of at least {min_group_size} subjects",
            module=_MODULE, operation="dif_estimate")

    if grid is None:
        grid = build_grid(ability.thetas, q or 51)
    pooled_config = resolve_bandwidths(config, data.selections,
                                       data.total_options(), ability.thetas,
                                       ability.distribution.sigma_theta)
    pooled = estimate_curves(data, scheme, ability, grid,
                             pooled_config.bandwidths, config.kernel)
    pooled_ets = expected_test_score(pooled)

    groups = []
    for label in kept:
        members = np.flatnonzero(text_labels == label)
        sub_data = replace(data, selections=data.selections[members])
        sub_ability = replace(
            ability,
            total_scores=ability.total_scores[members],
            ranks=ability.ranks[members],
            thetas=ability.thetas[members],
            theta_ml=None,
        )
        sub_grid = grid_for_thetas(grid.points, grid.spacing, sub_ability.thetas)
        sub_config = resolve_bandwidths(config, sub_data.selections,
                                        sub_data.total_options(),
                                        sub_ability.thetas,
                                        ability.distribution.sigma_theta)
        curves = estimate_curves(sub_data, scheme, sub_ability, sub_grid,
                                 sub_config.bandwidths, config.kernel)
        ets = expected_test_score(curves)
        expected = np.interp(sub_ability.thetas, grid.points, ets)
        try:
            density = score_density(sub_ability.total_scores)
        except DegenerateDensityError:
            density = None
        groups.append(GroupCurves(label=label, size=members.size,
                                  member_index=members, curves=curves,
                                  ets=ets, expected_scores=expected,
                                  density=density))

    qq = {}
    for i in range(len(groups)):
        for j in range(i + 1, len(groups)):
            a, b = groups[i], groups[j]
            qq[(a.label, b.label)] = qq_expected_scores(a.expected_scores,
                                                        b.expected_scores)
    return GroupedAnalysis(groups=tuple(groups), pooled=pooled,
                           pooled_ets=pooled_ets, ability=ability,
                           qq_pairs=qq, dropped=tuple(dropped))
