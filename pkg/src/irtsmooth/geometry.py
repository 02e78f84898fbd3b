"""Probability-simplex coordinates and the rank-based PCA test summary.

Option-probability vectors live on a simplex; for 3 or 4 options they map
one-to-one onto a unit-altitude equilateral triangle or regular tetrahedron,
where the perpendicular distance from a point to the face opposite vertex l
equals the l-th probability.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .curves import CurveSet, ItemCurves, expected_item_score
from .errors import DomainError, InputError

_MODULE = "geometry-analytics"

# Equilateral triangle with unit altitude: side 2/sqrt(3).
_TRI_SIDE = 2.0 / np.sqrt(3.0)
TRIANGLE_VERTICES = np.array([
    [0.0, 0.0],
    [_TRI_SIDE, 0.0],
    [_TRI_SIDE / 2.0, 1.0],
])

# Regular tetrahedron with unit altitude: edge sqrt(3/2); apex above the
# base centroid at height 1.
_TET_EDGE = np.sqrt(1.5)
TETRAHEDRON_VERTICES = np.array([
    [0.0, 0.0, 0.0],
    [_TET_EDGE, 0.0, 0.0],
    [_TET_EDGE / 2.0, _TET_EDGE * np.sqrt(3.0) / 2.0, 0.0],
    [_TET_EDGE / 2.0, _TET_EDGE * np.sqrt(3.0) / 6.0, 1.0],
])

TRAIT_BANDS = ("low", "medium", "high")


@dataclass(frozen=True)
class SimplexTrajectory:
    """An item's OCC trajectory inside the reference triangle/tetrahedron.

    ``barycentric`` rows are the (renormalized) probabilities of the shown
    options; ``cartesian`` is their planar or spatial embedding;
    ``trait_band`` labels each grid point low/medium/high by splitting the
    grid into three contiguous, equal (within one) groups.
    """

    item_label: str
    vertex_options: tuple[int, ...]  # 1-based option codes at the vertices
    barycentric: np.ndarray
    cartesian: np.ndarray
    trait_band: tuple[str, ...]


@dataclass(frozen=True)
class PcaSummary:
    """Items in the plane of the first two principal components."""

    scores: np.ndarray              # (k, 2)
    explained_variance: np.ndarray  # first two eigenvalues, descending
    extreme_items: tuple[int, int, int, int]  # 0-based: low/high on pc1, pc2


def barycentric_to_cartesian(bary: np.ndarray, dims: int) -> np.ndarray:
    """Map simplex coordinates into the unit-altitude reference figure."""
    vertices = TRIANGLE_VERTICES if dims == 3 else TETRAHEDRON_VERTICES
    return np.asarray(bary, dtype=np.float64) @ vertices


def trait_bands(q: int) -> tuple[str, ...]:
    """Contiguous low/medium/high grid bands of equal (within one) size."""
    labels = []
    for band, chunk in zip(TRAIT_BANDS, np.array_split(np.arange(q), 3)):
        labels.extend([band] * chunk.size)
    return tuple(labels)


def simplex_coords(item: ItemCurves, dims: int) -> SimplexTrajectory:
    """Project an item's OCC trajectory into the 3- or 4-vertex simplex.

    Items with more options than vertices show the ``dims`` options with the
    highest mean probability over the grid, renormalized per grid point.
    """
    if dims not in (3, 4):
        raise DomainError("simplex display supports 3 or 4 options",
                          module=_MODULE, operation="simplex_coords")
    m = item.n_options
    if dims > m:
        raise DomainError(
            f"item {item.label!r} has {m} options, fewer than {dims}",
            module=_MODULE, operation="simplex_coords")
    occ = item.occ
    if m > dims:
        means = occ.mean(axis=0)
        order = np.argsort(-means, kind="stable")[:dims]
        chosen = np.sort(order)
        sub = occ[:, chosen]
        sums = sub.sum(axis=1)
        if np.any(sums <= 0.0):
            raise DomainError(
                f"item {item.label!r}: selected options carry zero total "
                "probability at some grid point",
                module=_MODULE, operation="simplex_coords")
        bary = sub / sums[:, None]
    else:
        chosen = np.arange(m)
        bary = occ
    cart = barycentric_to_cartesian(bary, dims)
    return SimplexTrajectory(
        item_label=item.label,
        vertex_options=tuple(int(c) + 1 for c in chosen),
        barycentric=bary,
        cartesian=cart,
        trait_band=trait_bands(occ.shape[0]),
    )


def normalized_eis_matrix(curves: CurveSet) -> np.ndarray:
    """(q x k) expected item scores rescaled to [0, 1] per item."""
    q = curves.grid.size
    out = np.empty((q, curves.n_items))
    for j, item in enumerate(curves.items):
        eis = expected_item_score(item)
        lo, hi = item.eis_bounds()
        if hi > lo:
            out[:, j] = (eis - lo) / (hi - lo)
        else:
            out[:, j] = 0.0
    return out


def pca_summary(curves: CurveSet) -> PcaSummary:
    """PCA of the rank-transformed expected item scores.

    Each grid point's k normalized EIS values are replaced by zero-centered
    midranks; the PCA runs on the resulting (q x k) matrix. Component signs
    are fixed so the first correlates positively with item difficulty
    (1 - mean normalized EIS) and the second with the EIS slope along the
    grid.
    """
    k = curves.n_items
    q = curves.grid.size
    if k < 3:
        raise InputError("PCA summary needs at least 3 items",
                         module=_MODULE, operation="pca_summary")
    if q < 2:
        raise InputError("PCA summary needs at least 2 grid points",
                         module=_MODULE, operation="pca_summary")
    norm = normalized_eis_matrix(curves)
    ranks = np.empty_like(norm)
    for s in range(q):
        ranks[s] = rankdata(norm[s], method="average") - (k + 1) / 2.0

    # Zero-centered ranks are the centered data (every row sums to zero), so
    # the item covariance is the plain second-moment matrix.
    cov = ranks.T @ ranks / (q - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.maximum(eigvals[order], 0.0)
    scores = eigvecs[:, order[:2]].copy()

    difficulty = 1.0 - norm.mean(axis=0)
    grid_centered = curves.grid.points - curves.grid.points.mean()
    slope = grid_centered @ norm
    for comp, target in enumerate((difficulty, slope)):
        r = _safe_corr(scores[:, comp], target)
        if r < 0.0:
            scores[:, comp] = -scores[:, comp]

    extremes = (int(np.argmin(scores[:, 0])), int(np.argmax(scores[:, 0])),
                int(np.argmin(scores[:, 1])), int(np.argmax(scores[:, 1])))
    return PcaSummary(scores=scores, explained_variance=eigvals[:2],
                      extreme_items=extremes)


def _safe_corr(a: np.ndarray, b: np.ndarray) -> float:
    sa, sb = np.std(a), np.std(b)
    if sa <= 0.0 or sb <= 0.0:
        return 0.0
    return float(np.mean((a - a.mean()) * (b - b.mean())) / (sa * sb))
