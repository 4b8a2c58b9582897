"""Barcodes: lifetime models, merge forests with the Elder rule, inversion
counts, and shield configurations for insertion-insensitive boxes.

Coordinate 1 plays the role of time throughout.  A bar is (birth, lifetime);
lifetime +inf encodes a branch that never dies inside the window, and such
bars are never admissible (admissibility requires a lifetime in the open
interval (0, 1)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .geometry import Cube, _g17
from .process import MarkedPoint, PointConfiguration, insert_point

__all__ = [
    "Bar",
    "Barcode",
    "MergeForest",
    "ShieldedBoxConfig",
    "uniform_lifetimes",
    "build_merge_forest",
    "elder_lifetimes",
    "inversion_score",
    "inversion_count",
    "shield_membership",
    "shield_property_check",
    "barcode_to_text",
    "barcode_from_text",
]


@dataclass(frozen=True)
class Bar:
    owner: int
    birth: float
    lifetime: float

    def __post_init__(self):
        if self.lifetime < 0:
            raise ValueError("lifetimes are nonnegative")

    @property
    def admissible(self) -> bool:
        return 0.0 < self.lifetime < 1.0


@dataclass(frozen=True)
class Barcode:
    bars: tuple[Bar, ...]

    def __len__(self):
        return len(self.bars)

    def __iter__(self):
        return iter(self.bars)

    def births(self) -> np.ndarray:
        return np.array([b.birth for b in self.bars], dtype=float)

    def lifetimes(self) -> np.ndarray:
        return np.array([b.lifetime for b in self.bars], dtype=float)

    def owners(self) -> np.ndarray:
        return np.array([b.owner for b in self.bars], dtype=np.int64)

    def by_owner(self, owner: int) -> Bar:
        for b in self.bars:
            if b.owner == owner:
                return b
        raise KeyError(f"no bar owned by {owner}")


def uniform_lifetimes(cfg: PointConfiguration) -> Barcode:
    """Pass-through lifetimes: each point's bar takes its uniform mark."""
    if cfg.mark_model.kind != "uniform01":
        raise ValueError("uniform lifetimes need the uniform01 mark model")
    return Barcode(tuple(Bar(p.id, p.position[0], p.mark) for p in cfg.points))


def _ancestor_indices(positions: np.ndarray, cylinder_radius: float) -> np.ndarray:
    """For time-sorted positions, the index of each point's earliest strict
    successor within the cylinder (spatial distance in coordinates 2..d at
    most the radius); -1 when none exists."""
    n = len(positions)
    anc = np.full(n, -1, dtype=np.int64)
    if n < 2:
        return anc
    rest = positions[:, 1:]
    d2 = rest[:, None, :] - rest[None, :, :]
    within = np.einsum("ijk,ijk->ij", d2, d2) <= cylinder_radius**2 + 0.0
    later = np.triu(np.ones((n, n), dtype=bool), 1)  # strict (time, coords, id) order
    cand = within & later
    has = cand.any(axis=1)
    anc[has] = np.argmax(cand[has], axis=1)
    return anc


@dataclass(frozen=True)
class MergeForest:
    """Forest built by linking each point to its earliest later neighbor inside
    a unit cylinder, with Elder-rule survivor bookkeeping.

    Maps are keyed by point id.  ``ancestor`` maps a point to itself when no
    ancestor exists; ``survivor`` is defined on merge points (tree degree >= 3);
    ``death`` maps each dying leaf to the merge point that kills it.
    """

    cfg: PointConfiguration
    cylinder_radius: float
    ancestor: dict[int, int]
    children: dict[int, tuple[int, ...]]
    leaves: tuple[int, ...]
    merge_points: tuple[int, ...]
    survivor: dict[int, int]
    death: dict[int, int]

    def degree(self, point_id: int) -> int:
        out = 1 if self.ancestor[point_id] != point_id else 0
        return len(self.children.get(point_id, ())) + out


def build_merge_forest(cfg: PointConfiguration, cylinder_radius: float = 1.0) -> MergeForest:
    if cfg.window.dim < 2:
        raise ValueError("merge forests need dimension >= 2")
    pts = cfg.points
    n = len(pts)
    pos = cfg.positions_array()
    anc_idx = _ancestor_indices(pos, cylinder_radius)

    ids = [p.id for p in pts]
    ancestor = {ids[i]: (ids[anc_idx[i]] if anc_idx[i] >= 0 else ids[i]) for i in range(n)}
    children: dict[int, list[int]] = {pid: [] for pid in ids}
    for i in range(n):
        if anc_idx[i] >= 0:
            children[ids[anc_idx[i]]].append(ids[i])

    leaves = tuple(pid for pid in ids if not children[pid])
    degree = {
        pid: len(children[pid]) + (1 if ancestor[pid] != pid else 0) for pid in ids
    }
    merge_points = tuple(pid for pid in ids if degree[pid] >= 3)

    # One pass in time order; each branch carries the birth-minimal leaf that is
    # still alive on it.  Children sort before their ancestor, so carried values
    # are ready when a point is processed.
    order = {pid: i for i, pid in enumerate(ids)}
    carried: dict[int, int] = {}
    survivor: dict[int, int] = {}
    death: dict[int, int] = {}
    for i, pid in enumerate(ids):
        kids = children[pid]
        if not kids:
            carried[pid] = pid
            continue
        arrivals = [carried[c] for c in kids]
        s = min(arrivals, key=lambda leaf: order[leaf])
        if degree[pid] >= 3:
            survivor[pid] = s
            for a in arrivals:
                if a != s:
                    death[a] = pid
        carried[pid] = s

    return MergeForest(
        cfg,
        cylinder_radius,
        ancestor,
        {k: tuple(v) for k, v in children.items()},
        leaves,
        merge_points,
        survivor,
        death,
    )


def elder_lifetimes(forest: MergeForest) -> Barcode:
    """Branch lifetimes: death time minus birth time for dying leaves, +inf for
    leaves that never lose a merge, 0 for non-leaves."""
    times = {p.id: p.position[0] for p in forest.cfg.points}
    leaves = set(forest.leaves)
    bars = []
    for p in forest.cfg.points:
        if p.id not in leaves:
            life = 0.0
        elif p.id in forest.death:
            life = times[forest.death[p.id]] - times[p.id]
        else:
            life = math.inf
        bars.append(Bar(p.id, p.position[0], life))
    return Barcode(tuple(bars))


def inversion_score(x_bar: Bar, y_bar: Bar) -> int:
    """1 iff the two bars invert: births and deaths oppositely ordered, both
    lifetimes strictly inside (0, 1)."""
    if not (x_bar.admissible and y_bar.admissible):
        return 0
    db = x_bar.birth - y_bar.birth
    dd = db + (x_bar.lifetime - y_bar.lifetime)
    return 1 if (db < 0 < dd) or (dd < 0 < db) else 0


class _Fenwick:
    def __init__(self, size: int):
        self.tree = [0] * (size + 1)

    def add(self, i: int) -> None:
        i += 1
        while i < len(self.tree):
            self.tree[i] += 1
            i += i & (-i)

    def count_le(self, i: int) -> int:
        i += 1
        total = 0
        while i > 0:
            total += self.tree[i]
            i -= i & (-i)
        return total


def inversion_count(barcode: Barcode) -> int:
    """Ordered inversion pairs (each unordered inversion counted twice).

    Sweep over bars sorted by (birth, death), counting earlier bars with a
    strictly larger death via a Fenwick tree; ties in birth or death never
    count, matching the strict sign condition.
    """
    births = barcode.births()
    lifetimes = barcode.lifetimes()
    ok = (lifetimes > 0.0) & (lifetimes < 1.0)
    if ok.sum() < 2:
        return 0
    b = births[ok]
    d = b + lifetimes[ok]
    order = np.lexsort((d, b))
    d_sorted = d[order]
    ranks = np.searchsorted(np.unique(d_sorted), d_sorted)
    tree = _Fenwick(int(ranks.max()) + 1)
    unordered = 0
    for i, r in enumerate(ranks):
        unordered += i - tree.count_le(int(r))
        tree.add(int(r))
    return 2 * unordered


def inversion_compound_counts(births: np.ndarray, lifetimes: np.ndarray) -> np.ndarray:
    """G(Z) for every bar: the number of partners forming an inversion with it.

    Vectorized over blocks; exact (sign comparisons only).  Bars with a
    lifetime outside (0, 1) get G = 0.
    """
    n = len(births)
    G = np.zeros(n, dtype=np.int64)
    ok = (lifetimes > 0.0) & (lifetimes < 1.0)
    idx = np.nonzero(ok)[0]
    if len(idx) < 2:
        return G
    b = births[idx]
    d = b + lifetimes[idx]
    block = max(1, 2_000_000 // max(1, len(idx)))
    for start in range(0, len(idx), block):
        bb = b[start : start + block, None]
        dd = d[start : start + block, None]
        inv = ((bb < b[None, :]) & (dd > d[None, :])) | (
            (bb > b[None, :]) & (dd < d[None, :])
        )
        G[idx[start : start + block]] = inv.sum(axis=1)
    return G


def barcode_to_text(barcode: Barcode) -> str:
    lines = []
    for b in barcode.bars:
        life = "inf" if math.isinf(b.lifetime) else _g17(b.lifetime)
        lines.append(f"{b.owner} {_g17(b.birth)} {life}")
    return "\n".join(lines) + ("\n" if lines else "")


def barcode_from_text(text: str) -> Barcode:
    bars = []
    for ln in text.splitlines():
        if not ln.strip():
            continue
        owner, birth, life = ln.split()
        bars.append(
            Bar(int(owner), float(birth), math.inf if life == "inf" else float(life))
        )
    return Barcode(tuple(bars))


# -- Shield configurations ---------------------------------------------------
#
# A shielded box is an axis-aligned cube of side 8 whose outer half-unit time
# slabs (the pads) are populated so densely that inserting points in the
# central side-4 cube cannot alter the merge forest outside the box.

PAD_DEPTH = 0.5          # time extent of each pad
BALL_RADIUS = 0.25       # pads must be covered by balls of this radius
GAP = 0.5                # successor / earliest-child gap bound inside pads
TOP_STRIP = 0.5          # exempt strip at the top of the last axis


@dataclass(frozen=True)
class ShieldedBoxConfig:
    """A side-8 box (half-side 4), its side-4 inner cube, and the points that
    fall inside the box.  Pad membership is decided on coordinates relative to
    the box center."""

    center: tuple[float, ...]
    points: tuple[tuple[float, ...], ...]
    half_side: float = 4.0
    inner_half_side: float = 2.0
    coverage_grid: float = 0.02

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(v) for v in self.center))
        pts = tuple(tuple(float(v) for v in p) for p in self.points)
        for p in pts:
            if len(p) != len(self.center):
                raise ValueError("point dimension does not match the box center")
            if any(abs(a - c) > self.half_side for a, c in zip(p, self.center)):
                raise ValueError("malformed box geometry: point outside the box")
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return len(self.center)

    def relative(self) -> np.ndarray:
        if not self.points:
            return np.empty((0, self.dim))
        return np.asarray(self.points, dtype=float) - np.asarray(self.center)

    def _pad_box(self, t_lo: float, t_hi: float, top_only: bool):
        from .geometry import AxisBox

        lower = [self.center[0] + t_lo] + [c - self.half_side for c in self.center[1:]]
        upper = [self.center[0] + t_hi] + [c + self.half_side for c in self.center[1:]]
        if top_only:
            lower[-1] = self.center[-1] + self.half_side - TOP_STRIP
        return AxisBox(tuple(lower), tuple(upper))

    @property
    def pad_minus(self):
        """F-: the early-time pad slab."""
        return self._pad_box(-self.half_side, -self.half_side + PAD_DEPTH, False)

    @property
    def pad_plus(self):
        """F+: the late-time pad slab."""
        return self._pad_box(self.half_side - PAD_DEPTH, self.half_side, False)

    @property
    def pad_minus_top(self):
        """The exempt top strip of F- (last axis within TOP_STRIP of the top)."""
        return self._pad_box(-self.half_side, -self.half_side + PAD_DEPTH, True)

    @property
    def pad_plus_top(self):
        return self._pad_box(self.half_side - PAD_DEPTH, self.half_side, True)

    @classmethod
    def from_configuration(
        cls, cfg: PointConfiguration, center, **kw
    ) -> "ShieldedBoxConfig":
        box = Cube(tuple(center), 4.0)
        pts = tuple(p.position for p in cfg.points if box.contains(p.position))
        return cls(tuple(center), pts, **kw)


def _pad_masks(rel: np.ndarray, half: float):
    t = rel[:, 0]
    minus = (t >= -half) & (t <= -half + PAD_DEPTH)
    plus = (t <= half) & (t >= half - PAD_DEPTH)
    top = rel[:, -1] >= half - TOP_STRIP
    return minus, plus, top


def _pads_covered(rel_pad: np.ndarray, t_lo: float, t_hi: float, half: float, grid: float) -> bool:
    """Conservative coverage test: every grid point of the pad rectangle must be
    within BALL_RADIUS - grid*sqrt(2)/2 of a pad point, which guarantees the
    continuous region is covered by the radius-1/4 balls."""
    if len(rel_pad) == 0:
        return False
    slack = BALL_RADIUS - grid * math.sqrt(2.0) / 2.0
    if slack <= 0:
        raise ValueError("coverage grid too coarse for the ball radius")
    ts = np.arange(t_lo, t_hi + grid / 2, grid)
    hs = np.arange(-half, half + grid / 2, grid)
    tt, hh = np.meshgrid(ts, hs, indexing="ij")
    queries = np.column_stack([tt.ravel(), hh.ravel()])
    tree = cKDTree(rel_pad)
    dists, _ = tree.query(queries, k=1)
    return bool(np.all(dists <= slack))


def _pad_gaps_ok(rel_pad: np.ndarray, cylinder_radius: float, mode: str, half: float) -> bool:
    """Gap clauses inside one pad, evaluated pad-locally with self-default.

    mode 'successor': every non-top point with a strict successor in the pad
    cylinder must see it within GAP.  mode 'child': every non-top point's
    earliest pad child must be within GAP.
    """
    if len(rel_pad) == 0:
        return True
    order = np.lexsort(tuple(rel_pad[:, k] for k in range(rel_pad.shape[1] - 1, -1, -1)))
    pad = rel_pad[order]
    anc = _ancestor_indices(pad, cylinder_radius)
    n = len(pad)
    top = pad[:, -1] >= half - TOP_STRIP
    if mode == "successor":
        for i in range(n):
            if top[i] or anc[i] < 0:
                continue
            if pad[anc[i], 0] - pad[i, 0] > GAP:
                return False
        return True
    earliest_child = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        j = anc[i]
        if j >= 0 and earliest_child[j] < 0:
            earliest_child[j] = i  # children visited in time order
    for j in range(n):
        if top[j] or earliest_child[j] < 0:
            continue
        if pad[j, 0] - pad[earliest_child[j], 0] > GAP:
            return False
    return True


def shield_membership(box_cfg: ShieldedBoxConfig, cylinder_radius: float = 1.0) -> bool:
    """True iff the box's annulus content forms a shield: all annulus points in
    the two pads, pads covered by radius-1/4 balls, gap clauses satisfied, and
    the rest of the annulus void."""
    if box_cfg.dim != 2:
        raise ValueError("shield membership is implemented for dimension 2")
    half = box_cfg.half_side
    rel = box_cfg.relative()
    if len(rel):
        cheb = np.abs(rel).max(axis=1)
        annulus = rel[cheb > box_cfg.inner_half_side]
    else:
        annulus = rel
    if len(annulus) == 0:
        return False  # empty pads can never be covered
    minus, plus, _ = _pad_masks(annulus, half)
    if not np.all(minus | plus):
        return False
    pad_minus = annulus[minus]
    pad_plus = annulus[plus]
    if not _pads_covered(pad_minus, -half, -half + PAD_DEPTH, half, box_cfg.coverage_grid):
        return False
    if not _pads_covered(pad_plus, half - PAD_DEPTH, half, half, box_cfg.coverage_grid):
        return False
    if not _pad_gaps_ok(pad_minus, cylinder_radius, "successor", half):
        return False
    if not _pad_gaps_ok(pad_plus, cylinder_radius, "child", half):
        return False
    return True


def outside_pair_scores(cfg: PointConfiguration, center, cylinder_radius: float = 1.0):
    """Tree-lifetime inversion scores between all pairs of points outside the
    side-8 box at ``center``: returns (outside ids, boolean score matrix)."""
    rows, outside = _outside_score_table(cfg, center, cylinder_radius)
    if not outside:
        return outside, np.zeros((0, 0), dtype=bool)
    return outside, _pair_score_matrix(rows, outside)


def _outside_score_table(cfg: PointConfiguration, center, cylinder_radius: float):
    """Births, lifetimes and an outside mask for pair-score comparison."""
    forest = build_merge_forest(cfg, cylinder_radius)
    barcode = elder_lifetimes(forest)
    box = Cube(tuple(center), 4.0)
    rows = {}
    for bar in barcode.bars:
        rows[bar.owner] = (bar.birth, bar.lifetime)
    outside = [p.id for p in cfg.points if not box.contains(p.position)]
    return rows, outside


def _pair_score_matrix(rows, ids):
    b = np.array([rows[i][0] for i in ids])
    l = np.array([rows[i][1] for i in ids])
    ok = (l > 0) & (l < 1)
    d = np.where(ok, b + np.where(ok, l, 0.0), 0.0)  # masked rows never compare
    bb = b[:, None] - b[None, :]
    dd = d[:, None] - d[None, :]
    inv = ((bb < 0) & (dd > 0)) | ((bb > 0) & (dd < 0))
    return inv & ok[:, None] & ok[None, :]


def _box_center(box) -> tuple[float, ...]:
    """Accept a center tuple or a side-8 AxisBox (e.g. from a box partition
    with scale 8)."""
    center_attr = getattr(box, "center", None)
    if center_attr is None:
        return tuple(float(v) for v in box)
    center = tuple(center_attr)
    sides = [u - l for l, u in zip(box.lower, box.upper)]
    if any(abs(s - 8.0) > 1e-9 for s in sides):
        raise ValueError("shield boxes must have side 8")
    return center


def shield_property_check(
    cfg: PointConfiguration,
    box,
    x,
    cylinder_radius: float = 1.0,
    require_membership: bool = True,
) -> bool:
    """Insert x into the box's inner cube and report whether every pair score
    between points outside the box is unchanged.

    ``box`` is the box center, or an AxisBox of side 8 (for example from
    ``box_at_index`` on a partition with scale r = 8).
    """
    center = _box_center(box)
    inner = Cube(tuple(center), 2.0)
    pos = x.position if isinstance(x, MarkedPoint) else tuple(float(v) for v in x)
    if not inner.contains(pos):
        raise ValueError("insertion point must lie in the inner cube")
    if require_membership:
        box_cfg = ShieldedBoxConfig.from_configuration(cfg, center)
        if not shield_membership(box_cfg, cylinder_radius):
            raise ValueError("box content is not a shield configuration")
    before_rows, outside = _outside_score_table(cfg, center, cylinder_radius)
    cfg2 = insert_point(cfg, pos, None if not cfg.mark_model.has_marks else x.mark)
    after_rows, _ = _outside_score_table(cfg2, center, cylinder_radius)
    if not outside:
        return True
    before = _pair_score_matrix(before_rows, outside)
    after = _pair_score_matrix(after_rows, outside)
    return bool(np.array_equal(before, after))
