"""Value-based sliding windows along a normalized primary axis.

Windows live in value space, not rank space: the k-th window covers
``[k * stride_fraction, k * stride_fraction + window_fraction]`` of the
normalized [0, 1] axis range, and a row belongs to every window whose
closed interval contains its value. Because stride never exceeds the
window width, consecutive windows overlap and the union of all windows
covers the whole axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Column

# fp slack when deciding that a window has reached the end of the axis;
# keeps k * stride rounding from fabricating a final sliver window.
_END_TOL = 1e-12


@dataclass(frozen=True)
class WindowSpec:
    """Window geometry. ``stride_fraction`` defaults to half the window."""

    window_fraction: float
    stride_fraction: float | None = None

    def __post_init__(self) -> None:
        wf = self.window_fraction
        if not (0.0 < wf <= 1.0):
            raise ValueError(f"window_fraction must be in (0, 1], got {wf}")
        if self.stride_fraction is None:
            object.__setattr__(self, "stride_fraction", wf / 2.0)
        sf = self.stride_fraction
        if not (0.0 < sf <= 1.0):
            raise ValueError(f"stride_fraction must be in (0, 1], got {sf}")
        if sf > wf:
            raise ValueError(
                f"stride_fraction {sf} must not exceed window_fraction {wf}"
            )


@dataclass(frozen=True)
class Window:
    """One window: closed value interval plus the member row indices."""

    lo: float
    hi: float
    member_rows: np.ndarray

    @property
    def n_points(self) -> int:
        return int(self.member_rows.size)


def window_bounds(spec: WindowSpec) -> list[tuple[float, float]]:
    """The (lo, hi) interval of every window, clamping the last hi to 1."""
    bounds: list[tuple[float, float]] = []
    k = 0
    while True:
        lo = k * spec.stride_fraction
        hi = lo + spec.window_fraction
        if hi >= 1.0 - _END_TOL:
            bounds.append((lo, 1.0))
            return bounds
        bounds.append((lo, hi))
        k += 1


def window_count(spec: WindowSpec) -> int:
    return len(window_bounds(spec))


def make_windows(axis: Column, spec: WindowSpec) -> list[Window]:
    """Slice ``axis`` into overlapping windows of its normalized values.

    Membership uses closed intervals on both ends, so rows sitting exactly
    on a boundary belong to both adjacent windows. Member indices ascend.
    """
    values = axis.normalized
    windows: list[Window] = []
    for lo, hi in window_bounds(spec):
        members = np.nonzero((values >= lo) & (values <= hi))[0]
        windows.append(Window(lo=lo, hi=hi, member_rows=members))
    return windows
