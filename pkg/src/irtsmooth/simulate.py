"""Synthetic response generation from known parametric curves.

Used by tests and the acceptance suite to measure how well the
nonparametric estimates recover curves whose truth is available in closed
form: two-parameter logistic items and graded-response rating items.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.special import expit

from .data import ItemFormat, ResponseMatrix
from .errors import DomainError, InputError, ParseError

_MODULE = "simulation"

TWO_PL = "2pl"
GRADED = "graded"


@dataclass(frozen=True)
class ParametricItem:
    """A 2PL item (one difficulty) or graded-response item (ordered thresholds)."""

    kind: str
    discrimination: float
    locations: tuple[float, ...]

    def __post_init__(self):
        if self.kind not in (TWO_PL, GRADED):
            raise InputError(f"unknown item kind {self.kind!r}",
                             module=_MODULE, operation="ParametricItem")
        if self.discrimination <= 0:
            raise DomainError("discrimination must be positive",
                              module=_MODULE, operation="ParametricItem")
        if self.kind == TWO_PL and len(self.locations) != 1:
            raise InputError("a 2pl item has exactly one difficulty",
                             module=_MODULE, operation="ParametricItem")
        if self.kind == GRADED:
            if len(self.locations) < 1:
                raise InputError("a graded item needs at least one threshold",
                                 module=_MODULE, operation="ParametricItem")
            if np.any(np.diff(self.locations) <= 0):
                raise DomainError("graded thresholds must be strictly increasing",
                                  module=_MODULE, operation="ParametricItem")

    @property
    def n_options(self) -> int:
        return 2 if self.kind == TWO_PL else len(self.locations) + 1

    def probabilities(self, thetas: np.ndarray) -> np.ndarray:
        """True option probabilities, one row per ability value.

        2PL: option 2 is the correct one with probability
        logistic(a (theta - b)). Graded: adjacent differences of cumulative
        logistics, telescoping to a sum of one.
        """
        thetas = np.atleast_1d(np.asarray(thetas, dtype=np.float64))
        a = self.discrimination
        if self.kind == TWO_PL:
            p = expit(a * (thetas - self.locations[0]))
            return np.column_stack([1.0 - p, p])
        cum = expit(a * (thetas[:, None] - np.asarray(self.locations)[None, :]))
        m = self.n_options
        probs = np.empty((thetas.size, m))
        probs[:, 0] = 1.0 - cum[:, 0]
        probs[:, 1:m - 1] = cum[:, :-1] - cum[:, 1:]
        probs[:, m - 1] = cum[:, -1]
        return probs


def simulate_responses(items: Sequence[ParametricItem], n: int, seed: int,
                       ) -> tuple[ResponseMatrix, np.ndarray,
                                  Callable[[int, np.ndarray], np.ndarray]]:
    """Sample n subjects' responses from the given items.

    Abilities are standard normal (matching the default latent
    distribution), and categories are drawn by inverse CDF, one item at a
    time, from a single seeded stream. Returns the response matrix, the true
    abilities, and an evaluator ``true_occ(item_index, thetas)`` yielding the
    exact option probabilities for error measurement.
    """
    if n < 1:
        raise InputError("need at least one subject",
                         module=_MODULE, operation="simulate_responses")
    if not items:
        raise InputError("need at least one item",
                         module=_MODULE, operation="simulate_responses")
    rng = np.random.default_rng(seed)
    thetas = rng.standard_normal(n)
    k = len(items)
    selections = np.empty((n, k), dtype=np.int64)
    for j, item in enumerate(items):
        probs = item.probabilities(thetas)
        cum = np.cumsum(probs, axis=1)
        u = rng.random(n)
        selections[:, j] = np.minimum((u[:, None] > cum).sum(axis=1),
                                      item.n_options - 1) + 1
    matrix = ResponseMatrix(
        selections=selections,
        option_counts=np.array([item.n_options for item in items]),
        missing_option=np.zeros(k, dtype=bool),
        item_labels=tuple(str(j + 1) for j in range(k)),
    )

    def true_occ(item_index: int, at: np.ndarray) -> np.ndarray:
        return items[item_index].probabilities(at)

    return matrix, thetas, true_occ


def scoring_for_items(items: Sequence[ParametricItem],
                      ) -> tuple[list[ItemFormat], list[int]]:
    """Format tags and key usable with build_scoring for simulated items."""
    formats, key = [], []
    for item in items:
        if item.kind == TWO_PL:
            formats.append(ItemFormat.MULTIPLE_CHOICE)
            key.append(2)
        else:
            formats.append(ItemFormat.RATING_SCALE)
            key.append(item.n_options)
    return formats, key


def load_items(source: str) -> list[ParametricItem]:
    """Read an item spec file: a JSON list of item objects.

    Each object is {"kind": "2pl", "a": ..., "b": ...} or
    {"kind": "graded", "a": ..., "thresholds": [...]}.
    """
    with open(source, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid item spec JSON: {exc}",
                             module=_MODULE, operation="load_items",
                             location=source) from None
    if not isinstance(raw, list):
        raise ParseError("item spec must be a JSON list",
                         module=_MODULE, operation="load_items", location=source)
    items = []
    for pos, entry in enumerate(raw):
        kind = entry.get("kind", TWO_PL)
        a = float(entry.get("a", 1.0))
        if kind == TWO_PL:
            locations = (float(entry.get("b", 0.0)),)
        else:
            locations = tuple(float(v) for v in entry.get("thresholds", ()))
        try:
            items.append(ParametricItem(kind=kind, discrimination=a,
                                        locations=locations))
        except (InputError, DomainError) as exc:
            raise ParseError(f"item {pos + 1}: {exc.message}",
                             module=_MODULE, operation="load_items",
                             location=source) from None
    return items
