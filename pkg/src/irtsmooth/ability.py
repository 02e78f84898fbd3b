"""Ordinal ability estimation: summary scores, transformed ranks, quantiles.

Only the rank order of subjects is identified, so abilities are quantiles
F^{-1}(rank / (n + 1)) of a chosen latent distribution. The n + 1 denominator
keeps the largest rank strictly below 1, so every ability is finite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.special import ndtri
from scipy.stats import rankdata

from .data import ResponseMatrix, ScoringScheme
from .errors import DomainError, InputError

_MODULE = "ability"


class DistFamily(Enum):
    NORMAL = "normal"
    UNIFORM = "uniform"
    LOGISTIC = "logistic"


@dataclass(frozen=True)
class LatentDistribution:
    """Latent-trait distribution F fixing the ability metric.

    Families: normal(mean, sd), uniform(low, high), logistic(location,
    scale). The implied standard deviation feeds the rule-of-thumb
    bandwidth.
    """

    family: DistFamily
    params: tuple[float, float]

    def __post_init__(self):
        a, b = self.params
        if self.family is DistFamily.NORMAL and b <= 0:
            raise DomainError("normal sd must be positive",
                              module=_MODULE, operation="LatentDistribution")
        if self.family is DistFamily.UNIFORM and b <= a:
            raise DomainError("uniform upper bound must exceed the lower",
                              module=_MODULE, operation="LatentDistribution")
        if self.family is DistFamily.LOGISTIC and b <= 0:
            raise DomainError("logistic scale must be positive",
                              module=_MODULE, operation="LatentDistribution")

    @property
    def sigma_theta(self) -> float:
        """Standard deviation implied by the distribution."""
        a, b = self.params
        if self.family is DistFamily.NORMAL:
            return b
        if self.family is DistFamily.UNIFORM:
            return (b - a) / np.sqrt(12.0)
        return b * np.pi / np.sqrt(3.0)

    def quantile(self, p: np.ndarray) -> np.ndarray:
        """F^{-1}(p), strictly increasing on (0, 1)."""
        p = np.asarray(p, dtype=np.float64)
        a, b = self.params
        if self.family is DistFamily.NORMAL:
            return a + b * ndtri(p)
        if self.family is DistFamily.UNIFORM:
            return a + p * (b - a)
        return a + b * np.log(p / (1.0 - p))

    @classmethod
    def parse(cls, spec: str) -> "LatentDistribution":
        """Parse a ``family:param1,param2`` spec, e.g. ``normal:0,1``."""
        name, _, rest = spec.partition(":")
        try:
            family = DistFamily(name.strip().lower())
        except ValueError:
            raise InputError(f"unknown latent distribution {name!r}",
                             module=_MODULE, operation="LatentDistribution.parse") from None
        if not rest:
            params = _DEFAULT_PARAMS[family]
        else:
            parts = rest.split(",")
            if len(parts) != 2:
                raise InputError(
                    f"distribution spec {spec!r} needs exactly two parameters",
                    module=_MODULE, operation="LatentDistribution.parse")
            try:
                params = (float(parts[0]), float(parts[1]))
            except ValueError:
                raise InputError(f"non-numeric distribution parameters in {spec!r}",
                                 module=_MODULE, operation="LatentDistribution.parse") from None
        return cls(family=family, params=params)


_DEFAULT_PARAMS = {
    DistFamily.NORMAL: (0.0, 1.0),
    DistFamily.UNIFORM: (0.0, 1.0),
    DistFamily.LOGISTIC: (0.0, 1.0),
}


@dataclass(frozen=True)
class AbilityEstimates:
    """Per-subject score, transformed rank, and ability quantile.

    ``theta_ml`` stays None until relative-credibility curves produce the
    maximum-likelihood refinements.
    """

    total_scores: np.ndarray
    ranks: np.ndarray
    thetas: np.ndarray
    distribution: LatentDistribution
    theta_ml: np.ndarray | None = field(default=None)

    @property
    def n_subjects(self) -> int:
        return self.total_scores.size


def total_score(data: ResponseMatrix, scheme: ScoringScheme) -> np.ndarray:
    """Weighted total t_i = sum_j x_{j, y_ij}; requires a missing-free matrix."""
    return subject_statistic(data, scheme, "total")


def subject_statistic(data: ResponseMatrix, scheme: ScoringScheme,
                      stat: str = "total") -> np.ndarray:
    """Summary statistic of the per-item scores: total, mean, or median."""
    if data.has_missing():
        raise InputError("apply a missing policy before scoring",
                         module=_MODULE, operation="total_score")
    scheme.validate_lengths(data)
    per_item = np.empty((data.n_subjects, data.n_items))
    for j in range(data.n_items):
        per_item[:, j] = scheme.weights[j][data.selections[:, j] - 1]
    if stat == "total":
        return per_item.sum(axis=1)
    if stat == "mean":
        return per_item.mean(axis=1)
    if stat == "median":
        return np.median(per_item, axis=1)
    raise InputError(f"unknown rank statistic {stat!r}",
                     module=_MODULE, operation="subject_statistic")


def rank_subjects(scores: np.ndarray,
                  rank_override: np.ndarray | None = None) -> np.ndarray:
    """Transformed ranks r_i = rank(S_i) / (n + 1), midranks on ties.

    ``rank_override`` substitutes externally supplied raw ranks (values on
    the 1..n scale) for the score-based ones.
    """
    scores = np.asarray(scores, dtype=np.float64)
    n = scores.size
    if n < 2:
        raise InputError("ranking needs at least 2 subjects",
                         module=_MODULE, operation="rank_subjects")
    if rank_override is not None:
        raw = np.asarray(rank_override, dtype=np.float64)
        if raw.size != n:
            raise InputError(
                f"rank override lists {raw.size} subjects, data has {n}",
                module=_MODULE, operation="rank_subjects")
    else:
        raw = rankdata(scores, method="average")
    return raw / (n + 1.0)


def ranks_to_theta(ranks: np.ndarray, dist: LatentDistribution) -> np.ndarray:
    """Ability quantiles F^{-1}(r_i); monotone in the ranks."""
    ranks = np.asarray(ranks, dtype=np.float64)
    if np.any(ranks <= 0.0) or np.any(ranks >= 1.0):
        bad = ranks[(ranks <= 0.0) | (ranks >= 1.0)][0]
        raise DomainError(f"rank {bad} outside (0, 1)",
                          module=_MODULE, operation="ranks_to_theta")
    return dist.quantile(ranks)


def estimate_abilities(data: ResponseMatrix, scheme: ScoringScheme,
                       dist: LatentDistribution, stat: str = "total",
                       rank_override: np.ndarray | None = None) -> AbilityEstimates:
    """Full pipeline: summary score, transformed rank, ability quantile."""
    scores = subject_statistic(data, scheme, stat)
    ranks = rank_subjects(scores, rank_override)
    thetas = ranks_to_theta(ranks, dist)
    return AbilityEstimates(total_scores=scores, ranks=ranks, thetas=thetas,
                            distribution=dist)
