"""Detection kernels for the twelve line-pattern properties of an axis pair.

Every kernel operates on min-max normalized values in [0, 1] and is a pure
function of its inputs, so results are reproducible regardless of the order
in which windows or axis pairs are evaluated.

Property families
-----------------
* Correlation / variance share one Pearson pass: the correlation coefficient
  and its covariance numerator, later split by sign into the pos/neg variants.
* Skewness and outliers look at the primary axis only (marginal properties).
* Density change and clear grouping are Kullback-Leibler divergences between
  per-axis kernel density estimates and between neighborhood-probability
  matrices respectively.
* Neighborhood is the parallelism of the line bundle (spread of segment
  angles); fan is the occupancy of secondary-axis bins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import LengthMismatchError, ZeroBandwidthError

#: Windows with fewer member rows than this produce null raw values:
#: quartiles, Pearson r and third moments are noise on smaller samples.
MIN_WINDOW_POINTS = 5

#: Floor applied to the denominator distribution inside KL sums so that
#: near-disjoint supports stay finite.
KL_FLOOR = 1e-12

#: Bandwidth / sigma substitute for zero-variance windows.
DEGENERATE_BANDWIDTH = 1e-3

#: Default secondary-axis bin count for the fan detector.
DEFAULT_FAN_BINS = 20


class PropertyId(str, Enum):
    """The twelve detectable properties. Values are the wire/CLI keys."""

    POS_CORRELATION = "pos_corr"
    NEG_CORRELATION = "neg_corr"
    POS_VARIANCE = "pos_var"
    NEG_VARIANCE = "neg_var"
    POS_SKEWNESS = "pos_skew"
    NEG_SKEWNESS = "neg_skew"
    OUTLIERS = "outliers"
    DENSITY_CHANGE = "density_change"
    CLEAR_GROUPING = "clear_grouping"
    SPLIT_UP = "split_up"
    NEIGHBORHOOD = "neighborhood"
    FAN = "fan"


#: Properties computed from the primary axis alone. Everything else needs
#: the (primary, secondary) value pairs.
MARGINAL_PROPERTIES = frozenset(
    {PropertyId.POS_SKEWNESS, PropertyId.NEG_SKEWNESS, PropertyId.OUTLIERS}
)

BIVARIATE_PROPERTIES = frozenset(PropertyId) - MARGINAL_PROPERTIES


@dataclass(frozen=True)
class RawWindowValue:
    """An un-normalized detector output for one window.

    ``value`` is None exactly when the window holds fewer than
    MIN_WINDOW_POINTS rows. Sibling properties (pos/neg pairs, clear
    grouping / split up) share the same underlying raw statistic.
    """

    property: PropertyId
    window_index: int
    value: float | None
    n_points: int


def _as_floats(values) -> np.ndarray:
    return np.asarray(values, dtype=np.float64)


def pearson(xs, ys) -> tuple[float, float]:
    """Pearson correlation and its covariance numerator.

    Returns ``(r, numerator)`` with ``numerator = sum((x-mean_x)*(y-mean_y))``
    and ``r = numerator / (sqrt(sum((x-mean_x)^2)) * sqrt(sum((y-mean_y)^2)))``,
    clipped to [-1, 1]. Either series being constant yields (0.0, 0.0): the
    denominator is zero and no direction of association is defensible.
    """
    x = _as_floats(xs)
    y = _as_floats(ys)
    if x.shape != y.shape:
        raise LengthMismatchError(f"series lengths differ: {x.size} vs {y.size}")
    if x.max() == x.min() or y.max() == y.min():
        return 0.0, 0.0
    dx = x - x.mean()
    dy = y - y.mean()
    numerator = float(dx @ dy)
    denom = math.sqrt(float(dx @ dx)) * math.sqrt(float(dy @ dy))
    r = numerator / denom
    r = max(-1.0, min(1.0, r))
    return r, numerator


def skewness(xs) -> float:
    """Fisher-Pearson moment skewness g = m3 / m2^(3/2) (1/N moments).

    Constant input returns 0.0 by convention.
    """
    x = _as_floats(xs)
    if x.max() == x.min():
        return 0.0
    d = x - x.mean()
    m2 = float(np.mean(d * d))
    m3 = float(np.mean(d * d * d))
    return m3 / m2**1.5


def outliers(xs) -> int:
    """Count of values outside the interquartile fences.

    Quartiles use linear interpolation at rank ``q * (n - 1)``; the fences
    are ``Q1 - 1.5*IQR`` and ``Q3 + 1.5*IQR`` and values sitting exactly on
    a fence are not outliers.
    """
    x = _as_floats(xs)
    q1, q3 = np.percentile(x, [25.0, 75.0])
    iqr = q3 - q1
    lo = q1 - 1.5 * iqr
    hi = q3 + 1.5 * iqr
    return int(np.count_nonzero((x < lo) | (x > hi)))


def kde_density(points, eval_at, h) -> np.ndarray:
    """Gaussian kernel density of ``points`` sampled at ``eval_at``.

    The raw estimate ``sum_i exp(-(x' - x_i)^2 / (2 h^2)) / (N h sqrt(2 pi))``
    is renormalized to sum to 1 over the evaluation points, turning it into
    a discrete probability vector suitable for KL comparison.
    """
    if h <= 0:
        raise ZeroBandwidthError(f"bandwidth must be positive, got {h}")
    pts = _as_floats(points)
    ev = _as_floats(eval_at)
    d = ev[:, None] - pts[None, :]
    dens = np.exp(-(d * d) / (2.0 * h * h)).sum(axis=1)
    dens /= pts.size * h * math.sqrt(2.0 * math.pi)
    total = float(dens.sum())
    if total <= 0.0:
        return np.full(ev.size, 1.0 / ev.size)
    return dens / total


def window_bandwidth(values) -> float:
    """Per-window KDE bandwidth / neighborhood sigma: the population
    standard deviation of the window's values, or 1e-3 when it is zero."""
    s = float(np.std(_as_floats(values)))
    return s if s > 0.0 else DEGENERATE_BANDWIDTH


def _kl_divergence(p: np.ndarray, q: np.ndarray) -> float:
    """sum p * log(p / q) with q floored at KL_FLOOR and 0*log(0/q) = 0.

    Clamped at 0: the floor inflates q's mass by ~1e-12 at most, which could
    otherwise push an identical-distribution comparison epsilon-negative.
    """
    qf = np.maximum(q, KL_FLOOR)
    mask = p > 0.0
    kl = float(np.sum(p[mask] * (np.log(p[mask]) - np.log(qf[mask]))))
    return max(kl, 0.0)


def _kde_probability(values: np.ndarray) -> np.ndarray:
    return kde_density(values, values, window_bandwidth(values))


def density_change(x_rows, y_rows) -> float:
    """KL divergence between the primary and secondary density estimates.

    Each axis is density-estimated at its own window values with its own
    bandwidth; the divergence pairs the i-th probabilities of both vectors.
    Zero when both axes carry identical values; always >= 0.
    """
    x = _as_floats(x_rows)
    y = _as_floats(y_rows)
    if x.shape != y.shape:
        raise LengthMismatchError(f"series lengths differ: {x.size} vs {y.size}")
    return _kl_divergence(_kde_probability(x), _kde_probability(y))


def neighborhood_probabilities(points, sigma) -> np.ndarray:
    """Row-stochastic Gaussian neighbor probabilities.

    Entry (i, j) is ``exp(-(x_i - x_j)^2 / sigma^2)`` normalized over all
    j != i; the diagonal is 0 and every row sums to 1. Rows are computed
    with the row-minimum exponent shifted out, which cancels in the
    normalization and keeps extreme rows from underflowing to 0/0.
    """
    if sigma <= 0:
        raise ZeroBandwidthError(f"sigma must be positive, got {sigma}")
    pts = _as_floats(points)
    if pts.size < 2:
        raise LengthMismatchError("need at least two points for neighborhoods")
    diff = pts[:, None] - pts[None, :]
    d2 = (diff * diff) / (sigma * sigma)
    np.fill_diagonal(d2, np.inf)
    shift = d2.min(axis=1)
    w = np.exp(-(d2 - shift[:, None]))  # diagonal exp(-inf) = 0
    return w / w.sum(axis=1, keepdims=True)


def _neighborhood_probability(values: np.ndarray) -> np.ndarray:
    return neighborhood_probabilities(values, window_bandwidth(values))


def clear_grouping(x_rows, y_rows) -> float:
    """Disruption of the primary axis' neighborhood structure on the secondary.

    Sums, over every ordered point pair (i, j != i), the KL contribution of
    the primary neighborhood probability against the secondary one. Invariant
    under positive affine maps of the values (distances and sigma rescale
    together), hence 0 when y is an affine image of x; always >= 0.
    """
    x = _as_floats(x_rows)
    y = _as_floats(y_rows)
    if x.shape != y.shape:
        raise LengthMismatchError(f"series lengths differ: {x.size} vs {y.size}")
    return _kl_divergence(_neighborhood_probability(x), _neighborhood_probability(y))


def parallelism(x_rows, y_rows) -> float:
    """1 minus the angular extent of the line segments, over pi/2.

    Segment angles are ``atan(y_i - x_i)``; for normalized values the slopes
    live in [-1, 1], so the extent is at most pi/2 and the score in [0, 1].
    A perfectly parallel bundle scores 1.
    """
    x = _as_floats(x_rows)
    y = _as_floats(y_rows)
    if x.shape != y.shape:
        raise LengthMismatchError(f"series lengths differ: {x.size} vs {y.size}")
    angles = np.arctan(y - x)
    return 1.0 - float(angles.max() - angles.min()) / (math.pi / 2.0)


def fan(x_rows, y_rows, bins: int = DEFAULT_FAN_BINS) -> float:
    """Fraction of secondary-axis bins hit by the window's lines.

    The secondary range [0, 1] splits into ``bins`` equal bins, the last one
    closed so the value 1.0 lands in bin bins-1. A window spraying its lines
    across the whole secondary axis scores 1; a focused bundle scores 1/bins.
    """
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    y = _as_floats(y_rows)
    idx = np.minimum((y * bins).astype(np.int64), bins - 1)
    return float(np.unique(idx).size) / float(bins)


def evaluate_window(
    x_rows, y_rows, window_index: int, *, bins: int = DEFAULT_FAN_BINS
) -> list[RawWindowValue]:
    """All twelve raw property values for one window of an axis pair.

    Underpopulated windows (< MIN_WINDOW_POINTS rows) yield None for every
    property. Sibling properties share one statistic: both correlation
    variants carry r, both variance variants carry the covariance numerator,
    both skewness variants carry g, and split up carries the clear-grouping
    divergence.
    """
    x = _as_floats(x_rows)
    y = _as_floats(y_rows)
    n = int(x.size)
    if n < MIN_WINDOW_POINTS:
        return [
            RawWindowValue(property=p, window_index=window_index, value=None, n_points=n)
            for p in PropertyId
        ]
    r, cov_num = pearson(x, y)
    g = skewness(x)
    out_count = float(outliers(x))
    dc = density_change(x, y)
    cg = clear_grouping(x, y)
    par = parallelism(x, y)
    fn = fan(x, y, bins)
    raw = {
        PropertyId.POS_CORRELATION: r,
        PropertyId.NEG_CORRELATION: r,
        PropertyId.POS_VARIANCE: cov_num,
        PropertyId.NEG_VARIANCE: cov_num,
        PropertyId.POS_SKEWNESS: g,
        PropertyId.NEG_SKEWNESS: g,
        PropertyId.OUTLIERS: out_count,
        PropertyId.DENSITY_CHANGE: dc,
        PropertyId.CLEAR_GROUPING: cg,
        PropertyId.SPLIT_UP: cg,
        PropertyId.NEIGHBORHOOD: par,
        PropertyId.FAN: fn,
    }
    return [
        RawWindowValue(property=p, window_index=window_index, value=raw[p], n_points=n)
        for p in PropertyId
    ]
