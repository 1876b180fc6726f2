"""Normalization of raw detector values and per-axis-pair score aggregation.

Raw detector statistics live on wildly different scales (a correlation in
[-1, 1], an unbounded KL divergence, an outlier count). This module maps
every property to a comparable [0, 1] score:

* correlation and variance are confidence-weighted by the two-sided p-value
  of the correlation's t statistic,
* skewness is confidence-weighted by a sign-flip permutation test,
* the KL pair (clear grouping / split up) is z-scored against the pooled
  divergences of the whole dataset at the current window size and squashed
  through a logistic, so the two scores are exact complements,
* density change and outlier counts are min-max scaled against their pooled
  dataset-wide values,
* neighborhood and fan are damped by the fraction of rows the window holds.

A ScoringEngine caches raw detector values per (dataset, window geometry),
so weight changes never re-run detectors; only the cheap weighted
aggregation into the score matrix is repeated.
"""

from __future__ import annotations

import math
import threading
from collections import OrderedDict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .data import Dataset
from .detectors import (
    DEFAULT_FAN_BINS,
    MIN_WINDOW_POINTS,
    PropertyId,
    _kde_probability,
    _kl_divergence,
    _neighborhood_probability,
    fan,
    outliers,
    parallelism,
    pearson,
    skewness,
)
from .errors import (
    EmptyMatrixError,
    InvalidAxisPairError,
    NoActivePropertiesError,
    UnknownAxisError,
)
from .windows import Window, WindowSpec, make_windows

DEFAULT_PERMUTATIONS = 200
MIN_PERMUTATIONS = 100
DEFAULT_CACHE_BYTES = 256 * 1024 * 1024

# Correlations this close to +-1 are clamped before the t statistic so the
# division by 1 - r^2 stays finite; |r| = 1 still maps to p = 0, m = 1.
_R_CLAMP = 1.0 - 1e-12


@dataclass(frozen=True)
class Weights:
    """Per-property weights in [0, 1].

    Missing properties default to 0. The mapping is canonicalized to hold
    every property in declaration order, which keeps weighted sums and JSON
    output deterministic.
    """

    values: Mapping[PropertyId, float]

    def __post_init__(self) -> None:
        canon: dict[PropertyId, float] = {}
        for prop in PropertyId:
            w = float(self.values.get(prop, 0.0))
            if not (0.0 <= w <= 1.0):
                raise ValueError(f"weight for {prop.value} must be in [0, 1], got {w}")
            canon[prop] = w
        object.__setattr__(self, "values", canon)

    @classmethod
    def uniform(cls) -> "Weights":
        return cls({p: 1.0 for p in PropertyId})

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, float]) -> "Weights":
        resolved: dict[PropertyId, float] = {}
        for key, value in mapping.items():
            prop = key if isinstance(key, PropertyId) else PropertyId(str(key))
            resolved[prop] = float(value)
        return cls(resolved)

    def is_active(self) -> bool:
        return any(w > 0.0 for w in self.values.values())

    def require_active(self) -> None:
        if not self.is_active():
            raise NoActivePropertiesError("all property weights are zero")

    def to_json(self) -> dict[str, float]:
        return {p.value: w for p, w in self.values.items()}


def parse_weights(text: str) -> Weights:
    """Parse the flat weights format ``"pos_corr=1.0,fan=0.5"``.

    Unknown property keys, repeated keys, malformed numbers, and an entirely
    empty string raise ValueError.
    """
    mapping: dict[PropertyId, float] = {}
    parts = [p.strip() for p in text.split(",")]
    if not any(parts):
        raise ValueError("empty weights string")
    for part in parts:
        if not part:
            raise ValueError(f"empty weight entry in {text!r}")
        key, sep, value = part.partition("=")
        if not sep:
            raise ValueError(f"weight entry {part!r} is not key=value")
        try:
            prop = PropertyId(key.strip())
        except ValueError:
            raise ValueError(f"unknown property {key.strip()!r}") from None
        if prop in mapping:
            raise ValueError(f"property {prop.value!r} given twice")
        mapping[prop] = float(value)
    return Weights(mapping)


# --------------------------------------------------------------------------
# statistical helpers: t-distribution p-value via the regularized
# incomplete beta, evaluated with the standard continued fraction
# --------------------------------------------------------------------------


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (Lentz's method)."""
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 300):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 3e-16:
            break
    return h


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b), accurate to well under 1e-8 absolute error."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_two_sided_p(t: float, df: float) -> float:
    """P(|T| >= |t|) for a Student-t variable with ``df`` degrees of freedom."""
    if df <= 0:
        return 1.0
    x = df / (df + t * t)
    return regularized_incomplete_beta(df / 2.0, 0.5, x)


def _correlation_p_value(r: float, n: int) -> float:
    """Two-sided p-value of ``r`` over ``n`` samples via t = r sqrt(n-2)/sqrt(1-r^2)."""
    df = n - 2
    if df <= 0:
        return 1.0
    rc = min(abs(r), _R_CLAMP)
    t2 = rc * rc * df / (1.0 - rc * rc)
    return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t2))


def _logistic(z: float) -> float:
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


# --------------------------------------------------------------------------
# per-property normalization
# --------------------------------------------------------------------------


def normalize_correlation(r: float, n: int) -> tuple[float, float]:
    """(pos, neg) correlation scores: ``|r| * (1 - p)`` routed by sign.

    ``p`` is the two-sided t-test p-value of the correlation, so weak
    correlations over few points vanish while |r| = 1 maps to exactly 1.
    """
    if r == 0.0 or n < 3:
        return 0.0, 0.0
    p = _correlation_p_value(r, n)
    m = min(abs(r), 1.0) * (1.0 - p)
    return (m, 0.0) if r > 0.0 else (0.0, m)


def normalize_variance(numerator: float, n: int, r: float) -> tuple[float, float]:
    """(pos, neg) variance scores from the covariance numerator.

    For values in [0, 1] the numerator is bounded by n/4, so ``4|num|/n``
    is a [0, 1] magnitude independent of window population; it is damped by
    the same correlation p-value as the correlation scores and routed to the
    positive or negative variant by its sign.
    """
    if numerator == 0.0 or n < 3:
        return 0.0, 0.0
    magnitude = min(4.0 * abs(numerator) / n, 1.0)
    m = magnitude * (1.0 - _correlation_p_value(r, n))
    return (m, 0.0) if numerator > 0.0 else (0.0, m)


def normalize_skewness(
    g: float,
    xs,
    permutations: int = DEFAULT_PERMUTATIONS,
    seed: int = 0,
) -> tuple[float, float]:
    """(pos, neg) skewness scores via a sign-flip permutation test.

    Each resample reflects every value about the sample mean with
    probability 1/2; ``p`` is the fraction of resamples whose |skewness|
    reaches |g|. The score is ``min(|g|, 1) * (1 - p)`` routed by the sign
    of g. Seeded, so the exact value is reproducible, and exactly
    antisymmetric: negating the input swaps pos and neg.
    """
    if permutations < MIN_PERMUTATIONS:
        raise ValueError(f"need at least {MIN_PERMUTATIONS} resamples, got {permutations}")
    x = np.asarray(xs, dtype=np.float64)
    rng = np.random.default_rng(seed)
    flips = rng.random((permutations, x.size)) < 0.5
    mean = x.mean()
    reflected = np.where(flips, 2.0 * mean - x, x)
    d = reflected - reflected.mean(axis=1, keepdims=True)
    m2 = np.mean(d * d, axis=1)
    m3 = np.mean(d * d * d, axis=1)
    denom = m2**1.5
    g_perm = np.divide(m3, denom, out=np.zeros_like(m3), where=denom > 0.0)
    p = float(np.mean(np.abs(g_perm) >= abs(g)))
    m = min(abs(g), 1.0) * (1.0 - p)
    if g > 0.0:
        return m, 0.0
    if g < 0.0:
        return 0.0, m
    return 0.0, 0.0


def normalize_kl_family(
    raw_values: Sequence[float | None],
) -> tuple[list[float | None], list[float | None]]:
    """Map pooled clear-grouping divergences to complementary [0, 1] scores.

    ``raw_values`` are all window divergences of the dataset at the current
    window size (None for underpopulated windows). Each value is z-scored
    against the pool and squashed: clear grouping = 1 - logistic(z), split
    up = 1 - clear grouping, so the two are exact complements and a low
    divergence reads as strong grouping. A zero-spread pool maps everything
    to 0.5.
    """
    present = [v for v in raw_values if v is not None]
    mu = 0.0
    sigma = 0.0
    if len(present) >= 2:
        mu = sum(present) / len(present)
        sigma = math.sqrt(sum((v - mu) ** 2 for v in present) / len(present))
    clear: list[float | None] = []
    split: list[float | None] = []
    for v in raw_values:
        if v is None:
            clear.append(None)
            split.append(None)
            continue
        if sigma == 0.0:
            cg = 0.5
        else:
            cg = 1.0 - _logistic((v - mu) / sigma)
        clear.append(cg)
        split.append(1.0 - cg)
    return clear, split


def minmax_unit(raw_values: Sequence[float | None]) -> list[float | None]:
    """Pooled min-max map to [0, 1] for density change and outlier counts.

    Degenerate pools keep their meaning: an all-zero pool maps to 0.0 (the
    signal is genuinely absent everywhere), a constant nonzero pool maps to
    0.5 (present but without contrast, same convention as the z-score path).
    """
    present = [v for v in raw_values if v is not None]
    if not present:
        return [None for _ in raw_values]
    lo = min(present)
    hi = max(present)
    out: list[float | None] = []
    for v in raw_values:
        if v is None:
            out.append(None)
        elif hi > lo:
            out.append((v - lo) / (hi - lo))
        elif hi == 0.0:
            out.append(0.0)
        else:
            out.append(0.5)
    return out


def scale_pargnostics(
    value: float, n_window: int, n_total: int, window_fraction: float
) -> float:
    """Damp a score by the window's share of its expected population.

    ``factor = min(1, n_window / (n_total * window_fraction))``: windows
    holding fewer rows than a uniform spread would give them cannot claim
    full confidence for population-sensitive scores (neighborhood, fan).
    """
    expected = n_total * window_fraction
    if expected <= 0.0:
        return value
    return value * min(1.0, n_window / expected)


# --------------------------------------------------------------------------
# aggregation types
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class WindowProfile:
    """Per-window normalized scores of one ordered axis pair.

    Every list has one entry per window of the pair's primary axis; None
    marks underpopulated windows. split_up[w] == 1 - clear_grouping[w]
    exactly wherever both are non-null.
    """

    pair: tuple[int, int]
    per_property: Mapping[PropertyId, tuple[float | None, ...]]
    window_bounds: tuple[tuple[float, float], ...]

    def to_json(self) -> dict:
        return {
            "pair": [self.pair[0], self.pair[1]],
            "per_property": {
                p.value: [v for v in vals] for p, vals in self.per_property.items()
            },
            "window_bounds": [[lo, hi] for lo, hi in self.window_bounds],
        }


@dataclass(frozen=True)
class ScoreMatrix:
    """Directed per-axis-pair scores: cells[i][j] scores j as successor of i.

    The diagonal is None. ``per_cell_breakdown[(i, j)]`` holds the
    unweighted per-property means the weighted cell was built from.
    """

    dims: tuple[str, ...]
    cells: tuple[tuple[float | None, ...], ...]
    per_cell_breakdown: Mapping[tuple[int, int], Mapping[PropertyId, float]]

    @property
    def dim_count(self) -> int:
        return len(self.dims)

    def to_json(self) -> dict:
        n = len(self.dims)
        breakdown: list[list[dict | None]] = [[None] * n for _ in range(n)]
        for (i, j), per_prop in self.per_cell_breakdown.items():
            breakdown[i][j] = {p.value: v for p, v in per_prop.items()}
        return {
            "dims": list(self.dims),
            "cells": [list(row) for row in self.cells],
            "breakdown": breakdown,
        }


# --------------------------------------------------------------------------
# the engine
# --------------------------------------------------------------------------


@dataclass
class _RawBundle:
    """Raw detector statistics for every axis pair at one window geometry."""

    windows: list[list[Window]]
    # per axis, per window (None = underpopulated)
    marg_skew: list[list[float | None]]
    marg_out: list[list[float | None]]
    # per ordered pair: streams keyed r / cov / dc / cg / par / fan
    biv: dict[tuple[int, int], dict[str, list[float | None]]]
    nbytes: int


@dataclass
class _ScoredBundle:
    """Normalized per-window scores and their per-pair means for one seed."""

    profiles: dict[tuple[int, int], WindowProfile]
    means: dict[tuple[int, int], dict[PropertyId, float]]
    nbytes: int


def _derived_seed(seed: int, axis: int, window_index: int) -> int:
    """Stable per-(axis, window) child seed for the permutation test."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(axis, window_index))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


class ScoringEngine:
    """Computes, normalizes, and caches scores for datasets.

    Raw detector values are cached per (dataset fingerprint, window
    geometry); normalized bundles additionally key on (seed, permutations).
    Weight changes therefore only redo the weighted mean over cached
    per-pair means. The cache is safe for concurrent readers; insertions
    take a lock, and a racing duplicate computation is harmless because
    results are deterministic.
    """

    def __init__(
        self,
        *,
        fan_bins: int = DEFAULT_FAN_BINS,
        cache_bytes: int = DEFAULT_CACHE_BYTES,
    ):
        self.fan_bins = fan_bins
        self.cache_bytes = cache_bytes
        self._raw_cache: OrderedDict[tuple, _RawBundle] = OrderedDict()
        self._scored_cache: OrderedDict[tuple, _ScoredBundle] = OrderedDict()
        self._lock = threading.Lock()

    # -- cache plumbing ----------------------------------------------------

    def _cache_get(self, cache: OrderedDict, key: tuple):
        with self._lock:
            bundle = cache.get(key)
            if bundle is not None:
                cache.move_to_end(key)
            return bundle

    def _cache_put(self, cache: OrderedDict, key: tuple, bundle) -> None:
        with self._lock:
            cache[key] = bundle
            cache.move_to_end(key)
            total = sum(b.nbytes for b in self._raw_cache.values())
            total += sum(b.nbytes for b in self._scored_cache.values())
            for store in (self._raw_cache, self._scored_cache):
                while total > self.cache_bytes and len(store) > 1:
                    _, evicted = store.popitem(last=False)
                    total -= evicted.nbytes

    # -- raw stage -----------------------------------------------------------

    def _get_raw(self, dataset: Dataset, spec: WindowSpec) -> _RawBundle:
        key = (dataset.fingerprint, spec.window_fraction, spec.stride_fraction)
        bundle = self._cache_get(self._raw_cache, key)
        if bundle is None:
            bundle = self._compute_raw(dataset, spec)
            self._cache_put(self._raw_cache, key, bundle)
        return bundle

    def _compute_raw(self, dataset: Dataset, spec: WindowSpec) -> _RawBundle:
        cols = dataset.columns
        dim = len(cols)
        windows = [make_windows(c, spec) for c in cols]
        marg_skew: list[list[float | None]] = []
        marg_out: list[list[float | None]] = []
        biv: dict[tuple[int, int], dict[str, list[float | None]]] = {}
        nbytes = 0

        for i in range(dim):
            wins = windows[i]
            nbytes += sum(w.member_rows.nbytes for w in wins)
            xs: list[np.ndarray | None] = []
            kde_x: list[np.ndarray | None] = []
            neigh_x: list[np.ndarray | None] = []
            skews: list[float | None] = []
            outs: list[float | None] = []
            for w in wins:
                if w.n_points < MIN_WINDOW_POINTS:
                    xs.append(None)
                    kde_x.append(None)
                    neigh_x.append(None)
                    skews.append(None)
                    outs.append(None)
                    continue
                x = cols[i].normalized[w.member_rows]
                xs.append(x)
                kde_x.append(_kde_probability(x))
                neigh_x.append(_neighborhood_probability(x))
                skews.append(skewness(x))
                outs.append(float(outliers(x)))
            marg_skew.append(skews)
            marg_out.append(outs)

            for j in range(dim):
                if j == i:
                    continue
                streams: dict[str, list[float | None]] = {
                    k: [] for k in ("r", "cov", "dc", "cg", "par", "fan")
                }
                for widx, w in enumerate(wins):
                    x = xs[widx]
                    if x is None:
                        for stream in streams.values():
                            stream.append(None)
                        continue
                    y = cols[j].normalized[w.member_rows]
                    r, cov = pearson(x, y)
                    streams["r"].append(r)
                    streams["cov"].append(cov)
                    streams["dc"].append(_kl_divergence(kde_x[widx], _kde_probability(y)))
                    streams["cg"].append(
                        _kl_divergence(neigh_x[widx], _neighborhood_probability(y))
                    )
                    streams["par"].append(parallelism(x, y))
                    streams["fan"].append(fan(x, y, self.fan_bins))
                biv[(i, j)] = streams
                nbytes += 6 * len(wins) * 16

        return _RawBundle(
            windows=windows,
            marg_skew=marg_skew,
            marg_out=marg_out,
            biv=biv,
            nbytes=nbytes,
        )

    # -- normalized stage ----------------------------------------------------

    def _get_scored(
        self, dataset: Dataset, spec: WindowSpec, seed: int, permutations: int
    ) -> _ScoredBundle:
        if seed < 0:
            raise ValueError(f"seed must be non-negative, got {seed}")
        key = (
            dataset.fingerprint,
            spec.window_fraction,
            spec.stride_fraction,
            seed,
            permutations,
        )
        bundle = self._cache_get(self._scored_cache, key)
        if bundle is None:
            raw = self._get_raw(dataset, spec)
            bundle = self._compute_scored(dataset, spec, seed, permutations, raw)
            self._cache_put(self._scored_cache, key, bundle)
        return bundle

    def _compute_scored(
        self,
        dataset: Dataset,
        spec: WindowSpec,
        seed: int,
        permutations: int,
        raw: _RawBundle,
    ) -> _ScoredBundle:
        cols = dataset.columns
        dim = len(cols)
        n_total = dataset.row_count
        wf = spec.window_fraction
        pair_order = [(i, j) for i in range(dim) for j in range(dim) if i != j]
        counts = {pair: len(raw.biv[pair]["cg"]) for pair in pair_order}

        def _flatten(stream_key: str) -> list[float | None]:
            flat: list[float | None] = []
            for pair in pair_order:
                flat.extend(raw.biv[pair][stream_key])
            return flat

        def _unflatten(flat: Sequence[float | None]) -> dict[tuple[int, int], list]:
            out: dict[tuple[int, int], list] = {}
            pos = 0
            for pair in pair_order:
                out[pair] = list(flat[pos : pos + counts[pair]])
                pos += counts[pair]
            return out

        # dataset-wide pools at this window size
        cg_flat, su_flat = normalize_kl_family(_flatten("cg"))
        cg_scores = _unflatten(cg_flat)
        su_scores = _unflatten(su_flat)
        dc_scores = _unflatten(minmax_unit(_flatten("dc")))

        out_flat: list[float | None] = []
        for a in range(dim):
            out_flat.extend(raw.marg_out[a])
        out_norm_flat = minmax_unit(out_flat)
        out_scores: list[list[float | None]] = []
        pos = 0
        for a in range(dim):
            w_count = len(raw.marg_out[a])
            out_scores.append(out_norm_flat[pos : pos + w_count])
            pos += w_count

        # marginal skewness scores, one permutation test per (axis, window)
        pos_skew: list[list[float | None]] = []
        neg_skew: list[list[float | None]] = []
        for a in range(dim):
            ps: list[float | None] = []
            ns: list[float | None] = []
            for widx, w in enumerate(raw.windows[a]):
                g = raw.marg_skew[a][widx]
                if g is None:
                    ps.append(None)
                    ns.append(None)
                    continue
                x = cols[a].normalized[w.member_rows]
                p_score, n_score = normalize_skewness(
                    g, x, permutations, _derived_seed(seed, a, widx)
                )
                ps.append(p_score)
                ns.append(n_score)
            pos_skew.append(ps)
            neg_skew.append(ns)

        profiles: dict[tuple[int, int], WindowProfile] = {}
        means: dict[tuple[int, int], dict[PropertyId, float]] = {}
        for i, j in pair_order:
            wins = raw.windows[i]
            streams = raw.biv[(i, j)]
            scores: dict[PropertyId, list[float | None]] = {p: [] for p in PropertyId}
            for widx, w in enumerate(wins):
                r = streams["r"][widx]
                if r is None:
                    for p in PropertyId:
                        scores[p].append(None)
                    continue
                n = w.n_points
                pc, nc = normalize_correlation(r, n)
                pv, nv = normalize_variance(streams["cov"][widx], n, r)
                scores[PropertyId.POS_CORRELATION].append(pc)
                scores[PropertyId.NEG_CORRELATION].append(nc)
                scores[PropertyId.POS_VARIANCE].append(pv)
                scores[PropertyId.NEG_VARIANCE].append(nv)
                scores[PropertyId.POS_SKEWNESS].append(pos_skew[i][widx])
                scores[PropertyId.NEG_SKEWNESS].append(neg_skew[i][widx])
                scores[PropertyId.OUTLIERS].append(out_scores[i][widx])
                scores[PropertyId.DENSITY_CHANGE].append(dc_scores[(i, j)][widx])
                scores[PropertyId.CLEAR_GROUPING].append(cg_scores[(i, j)][widx])
                scores[PropertyId.SPLIT_UP].append(su_scores[(i, j)][widx])
                scores[PropertyId.NEIGHBORHOOD].append(
                    scale_pargnostics(streams["par"][widx], n, n_total, wf)
                )
                scores[PropertyId.FAN].append(
                    scale_pargnostics(streams["fan"][widx], n, n_total, wf)
                )
            profiles[(i, j)] = WindowProfile(
                pair=(i, j),
                per_property={p: tuple(vals) for p, vals in scores.items()},
                window_bounds=tuple((w.lo, w.hi) for w in wins),
            )
            means[(i, j)] = {
                p: _mean_or_zero(vals) for p, vals in scores.items()
            }

        n_windows = sum(len(w) for w in raw.windows)
        nbytes = len(pair_order) * 12 * (n_windows // max(dim, 1) + 1) * 32
        return _ScoredBundle(profiles=profiles, means=means, nbytes=nbytes)

    # -- public API ------------------------------------------------------------

    def windows_for_axis(
        self, dataset: Dataset, axis: int, spec: WindowSpec
    ) -> list[Window]:
        if not (0 <= axis < dataset.dim_count):
            raise UnknownAxisError(f"axis {axis} out of range")
        return self._get_raw(dataset, spec).windows[axis]

    def profile(
        self,
        dataset: Dataset,
        pair: tuple[int, int],
        spec: WindowSpec,
        *,
        seed: int = 0,
        permutations: int = DEFAULT_PERMUTATIONS,
    ) -> WindowProfile:
        i, j = pair
        dim = dataset.dim_count
        if not (0 <= i < dim and 0 <= j < dim):
            raise UnknownAxisError(f"axis pair ({i}, {j}) out of range for {dim} axes")
        if i == j:
            raise InvalidAxisPairError(f"diagonal pair ({i}, {i}) has no profile")
        bundle = self._get_scored(dataset, spec, seed, permutations)
        return bundle.profiles[(i, j)]

    def profiles(
        self,
        dataset: Dataset,
        spec: WindowSpec,
        *,
        seed: int = 0,
        permutations: int = DEFAULT_PERMUTATIONS,
    ) -> dict[tuple[int, int], WindowProfile]:
        bundle = self._get_scored(dataset, spec, seed, permutations)
        return dict(bundle.profiles)

    def matrix(
        self,
        dataset: Dataset,
        weights: Weights,
        spec: WindowSpec,
        *,
        seed: int = 0,
        permutations: int = DEFAULT_PERMUTATIONS,
    ) -> ScoreMatrix:
        if dataset.dim_count < 2:
            raise EmptyMatrixError("need at least two axes for a score matrix")
        weights.require_active()
        bundle = self._get_scored(dataset, spec, seed, permutations)
        dim = dataset.dim_count
        weight_sum = sum(weights.values[p] for p in PropertyId)
        cells: list[list[float | None]] = [[None] * dim for _ in range(dim)]
        breakdown: dict[tuple[int, int], dict[PropertyId, float]] = {}
        for (i, j), per_prop in bundle.means.items():
            weighted = sum(weights.values[p] * per_prop[p] for p in PropertyId)
            cells[i][j] = weighted / weight_sum
            breakdown[(i, j)] = dict(per_prop)
        return ScoreMatrix(
            dims=tuple(dataset.dims),
            cells=tuple(tuple(row) for row in cells),
            per_cell_breakdown=breakdown,
        )


def _mean_or_zero(values: Iterable[float | None]) -> float:
    present = [v for v in values if v is not None]
    if not present:
        return 0.0
    return sum(present) / len(present)


_default_engine = ScoringEngine()


def default_engine() -> ScoringEngine:
    return _default_engine


def build_profile(
    dataset: Dataset,
    pair: tuple[int, int],
    spec: WindowSpec,
    *,
    seed: int = 0,
    permutations: int = DEFAULT_PERMUTATIONS,
    engine: ScoringEngine | None = None,
) -> WindowProfile:
    """Normalized per-window scores for one ordered axis pair."""
    return (engine or _default_engine).profile(
        dataset, pair, spec, seed=seed, permutations=permutations
    )


def build_matrix(
    dataset: Dataset,
    weights: Weights,
    spec: WindowSpec,
    *,
    seed: int = 0,
    permutations: int = DEFAULT_PERMUTATIONS,
    engine: ScoringEngine | None = None,
) -> ScoreMatrix:
    """The directed score matrix over all ordered axis pairs.

    cells[i][j] is the weighted mean of the per-property window-mean scores
    of pair (i, j); scaling all weights by a constant leaves it unchanged.
    """
    return (engine or _default_engine).matrix(
        dataset, weights, spec, seed=seed, permutations=permutations
    )


# --------------------------------------------------------------------------
# shared JSON result document (service and CLI emit the same shape)
# --------------------------------------------------------------------------


def result_document(
    dataset: Dataset,
    weights: Weights,
    spec: WindowSpec,
    seed: int,
    *,
    matrix: ScoreMatrix,
    profiles: Sequence[WindowProfile],
    dropped_rows: int,
    ordering: dict | None = None,
) -> dict:
    matrix_json = matrix.to_json()
    doc = {
        "dims": dataset.dims,
        "window_spec": {
            "window_fraction": spec.window_fraction,
            "stride_fraction": spec.stride_fraction,
        },
        "weights": weights.to_json(),
        "seed": seed,
        "matrix": {
            "cells": matrix_json["cells"],
            "breakdown": matrix_json["breakdown"],
        },
        "profiles": [p.to_json() for p in profiles],
        "dropped_rows": dropped_rows,
    }
    if ordering is not None:
        doc["ordering"] = ordering
    return doc
