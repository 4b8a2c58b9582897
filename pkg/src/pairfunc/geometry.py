"""Axis-aligned windows, slabs, cubes, box partitions and exact planar segment predicates.

Everything here is an immutable value; all operations are pure functions, so the
types are safe to share across threads.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

__all__ = [
    "Window",
    "AxisBox",
    "Slab",
    "Cube",
    "BoxPartition",
    "box_at_index",
    "segments_properly_cross",
    "project_to_plane",
    "window_to_text",
    "window_from_text",
    "box_to_text",
    "box_from_text",
]


def _g17(x: float) -> str:
    """Format a float with 17 significant digits (lossless round-trip)."""
    return format(float(x), ".17g")


@dataclass(frozen=True)
class Window:
    """Rectangle [0, n] x [0, a_2 n^alpha_2] x ... x [0, a_d n^alpha_d].

    ``boundary_margin`` is the exponent of the margin n^boundary_margin used by
    the shrunk window (boundary-effect trimming for admissibility rules).
    """

    n: float
    dim: int = 2
    coefficients: tuple[float, ...] = ()   # a_2 .. a_d
    exponents: tuple[float, ...] = ()      # alpha_2 .. alpha_d
    boundary_margin: float = 0.2

    def __post_init__(self):
        if not (self.n > 0 and math.isfinite(self.n)):
            raise ValueError(f"window scale n must be positive and finite, got {self.n}")
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")
        coeffs = tuple(float(c) for c in self.coefficients) or (1.0,) * (self.dim - 1)
        expos = tuple(float(e) for e in self.exponents) or (1.0,) * (self.dim - 1)
        if len(coeffs) != self.dim - 1 or len(expos) != self.dim - 1:
            raise ValueError("need one coefficient and one exponent per axis j = 2..d")
        if any(c <= 0 for c in coeffs) or any(e <= 0 for e in expos):
            raise ValueError("coefficients and exponents must be positive")
        if not (0.0 < self.boundary_margin < 1.0):
            raise ValueError("boundary_margin must lie in (0, 1)")
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "exponents", expos)

    @property
    def sides(self) -> tuple[float, ...]:
        return (float(self.n),) + tuple(
            a * self.n ** al for a, al in zip(self.coefficients, self.exponents)
        )

    @property
    def volume(self) -> float:
        return float(np.prod(self.sides))

    def contains(self, y: Sequence[float]) -> bool:
        return len(y) == self.dim and all(0.0 <= v <= s for v, s in zip(y, self.sides))

    def shrunk(self) -> "AxisBox":
        """Window trimmed by n^boundary_margin on every face; raises when empty."""
        m = self.n ** self.boundary_margin
        lower = (m,) * self.dim
        upper = tuple(s - m for s in self.sides)
        if any(lo >= up for lo, up in zip(lower, upper)):
            raise ValueError("shrunk window is empty; margin exceeds half of a side")
        return AxisBox(lower, upper)


@dataclass(frozen=True)
class AxisBox:
    """Closed axis-aligned box given by lower and upper corners."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        if len(self.lower) != len(self.upper):
            raise ValueError("corner dimensions differ")
        object.__setattr__(self, "lower", tuple(float(v) for v in self.lower))
        object.__setattr__(self, "upper", tuple(float(v) for v in self.upper))

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def center(self) -> tuple[float, ...]:
        return tuple((l + u) / 2.0 for l, u in zip(self.lower, self.upper))

    @property
    def volume(self) -> float:
        return float(np.prod([u - l for l, u in zip(self.lower, self.upper)]))

    def contains(self, y: Sequence[float]) -> bool:
        return len(y) == self.dim and all(
            l <= v <= u for v, l, u in zip(y, self.lower, self.upper)
        )


@dataclass(frozen=True)
class Slab:
    """Column around ``center``: all window points within ``half_width`` of the
    center in each of the first ``order`` coordinates, unconstrained in the rest."""

    center: tuple[float, ...]
    half_width: float
    order: int
    window: Window

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(v) for v in self.center))
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")
        if not 1 <= self.order <= self.window.dim:
            raise ValueError("locality order must lie in [1, d]")

    def contains(self, y: Sequence[float]) -> bool:
        if not self.window.contains(y):
            return False
        return all(
            abs(self.center[j] - y[j]) <= self.half_width for j in range(self.order)
        )

    @property
    def volume_bound(self) -> float:
        sides = self.window.sides
        return float((2 * self.half_width) ** self.order * np.prod(sides[self.order:]))


@dataclass(frozen=True)
class Cube:
    """Chebyshev ball: center + [-m, m]^d."""

    center: tuple[float, ...]
    half_side: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(v) for v in self.center))
        if self.half_side <= 0:
            raise ValueError("half_side must be positive")

    def contains(self, y: Sequence[float]) -> bool:
        return len(y) == len(self.center) and all(
            abs(c - v) <= self.half_side for c, v in zip(self.center, y)
        )


def reference_slab_volume(window: Window, order: int, half_width: float = 1.0) -> float:
    """Volume of the slab anchored at the origin corner, the normalizing
    constant used by concentration thresholds."""
    sides = window.sides
    if not 1 <= order <= window.dim:
        raise ValueError("locality order must lie in [1, d]")
    vol = 1.0
    for j in range(order):
        vol *= min(half_width, sides[j])
    for j in range(order, window.dim):
        vol *= sides[j]
    return vol


@dataclass(frozen=True)
class BoxPartition:
    """Lexicographically indexed cover of a window with equal boxes.

    The box side along axis i is r * a_i (a_1 = 1); there are ceil(a_i / r) * n
    boxes along axis i, axis 1 varying fastest, 1-based index.  Requires the
    window scale n to be a positive integer and all side exponents equal to 1.
    """

    window: Window
    r: float

    def __post_init__(self):
        n = self.window.n
        if n != int(n) or n < 1:
            raise ValueError("box partitions require an integer window scale n >= 1")
        if any(e != 1.0 for e in self.window.exponents):
            raise ValueError("box partitions require all side exponents equal to 1")
        if self.r <= 0:
            raise ValueError("box scale r must be positive")
        for a in (1.0,) + self.window.coefficients:
            if math.ceil(a / self.r) * self.r < 1.0:
                raise ValueError(
                    "boxes do not cover the window along an axis; increase r or a_j"
                )

    @property
    def coefficients(self) -> tuple[float, ...]:
        return (1.0,) + self.window.coefficients

    @property
    def axis_counts(self) -> tuple[int, ...]:
        n = int(self.window.n)
        return tuple(math.ceil(a / self.r) * n for a in self.coefficients)

    @property
    def total_boxes(self) -> int:
        return int(np.prod(self.axis_counts))

    @property
    def box_volume(self) -> float:
        return float(np.prod([self.r * a for a in self.coefficients]))

    def box(self, j: int) -> AxisBox:
        return box_at_index(self, j)

    def boxes(self):
        for j in range(1, self.total_boxes + 1):
            yield box_at_index(self, j)


def box_at_index(partition: BoxPartition, j: int) -> AxisBox:
    """Closed box with 1-based lexicographic index j (axis 1 fastest)."""
    total = partition.total_boxes
    if not 1 <= j <= total:
        raise IndexError(f"box index {j} outside [1, {total}]")
    counts = partition.axis_counts
    coeffs = partition.coefficients
    idx = j - 1
    lower, upper = [], []
    for count, a in zip(counts, coeffs):
        c = idx % count
        idx //= count
        side = partition.r * a
        lower.append(c * side)
        upper.append((c + 1) * side)
    return AxisBox(tuple(lower), tuple(upper))


# Orientation predicate: float evaluation guarded by a forward error bound, with
# exact rational fallback.  No epsilon thresholds enter the decision.
_CCW_ERRBOUND = 3.3306690621773724e-16


def _orient_exact(a, b, c) -> int:
    ax, ay = Fraction(a[0]), Fraction(a[1])
    bx, by = Fraction(b[0]), Fraction(b[1])
    cx, cy = Fraction(c[0]), Fraction(c[1])
    det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    return (det > 0) - (det < 0)


def orientation(a, b, c) -> int:
    """Sign of the determinant |b-a, c-a|: +1 counter-clockwise, -1 clockwise, 0 collinear."""
    detleft = (b[0] - a[0]) * (c[1] - a[1])
    detright = (b[1] - a[1]) * (c[0] - a[0])
    det = detleft - detright
    errbound = _CCW_ERRBOUND * (abs(detleft) + abs(detright))
    if det > errbound:
        return 1
    if det < -errbound:
        return -1
    return _orient_exact(a, b, c)


def segments_properly_cross(p1, q1, p2, q2) -> bool:
    """True iff the open segments (p1,q1) and (p2,q2) meet in exactly one interior point.

    Endpoint contacts, collinear overlaps and shared endpoints do not count.
    Total function: non-finite input yields False.
    """
    coords = (*p1, *q1, *p2, *q2)
    if not all(math.isfinite(v) for v in coords):
        return False
    d1 = orientation(p2, q2, p1)
    d2 = orientation(p2, q2, q1)
    d3 = orientation(p1, q1, p2)
    d4 = orientation(p1, q1, q2)
    return d1 * d2 < 0 and d3 * d4 < 0


def project_to_plane(x: Sequence[float]) -> tuple[float, float]:
    """First two coordinates of a point in dimension >= 2."""
    if len(x) < 2:
        raise ValueError("projection needs dimension >= 2")
    return (float(x[0]), float(x[1]))


def window_to_text(window: Window) -> str:
    a = ", ".join(_g17(v) for v in window.coefficients)
    al = ", ".join(_g17(v) for v in window.exponents)
    return (
        f'{{"dim": {window.dim}, "n": {_g17(window.n)}, "a": [{a}], '
        f'"alpha": [{al}], "margin": {_g17(window.boundary_margin)}}}'
    )


def window_from_text(text: str) -> Window:
    rec = json.loads(text)
    return Window(
        n=rec["n"],
        dim=rec["dim"],
        coefficients=tuple(rec["a"]),
        exponents=tuple(rec["alpha"]),
        boundary_margin=rec["margin"],
    )


def box_to_text(box: AxisBox) -> str:
    lo = ", ".join(_g17(v) for v in box.lower)
    up = ", ".join(_g17(v) for v in box.upper)
    return f'{{"lower": [{lo}], "upper": [{up}]}}'


def box_from_text(text: str) -> AxisBox:
    rec = json.loads(text)
    return AxisBox(tuple(rec["lower"]), tuple(rec["upper"]))
