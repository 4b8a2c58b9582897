"""Shared helpers and independent oracles for the test suite.

Oracles here follow the definitions literally (full scans, exhaustive path
enumeration, incremental radii) and stay independent of the optimized code
paths they check.
"""
from __future__ import annotations

import math

import numpy as np
import pytest

from pairfunc.barcodes import Bar, Barcode, inversion_score
from pairfunc.functionals import AdmissibilityRule
from pairfunc.geometry import Cube, Window
from pairfunc.process import MarkModel, MarkedPoint, PointConfiguration, insert_point


def make_configuration(window, positions, marks=None, mark_model=None):
    mark_model = mark_model or (
        MarkModel.none() if marks is None else MarkModel.uniform_radius(0.0, 2.0)
    )
    return PointConfiguration.from_arrays(window, mark_model, positions, marks)


def random_configuration(rng, window, count, mark_model=MarkModel.none()):
    sides = np.array(window.sides)
    positions = rng.uniform(0.0, 1.0, (count, window.dim)) * sides
    marks = mark_model.sample(rng, count)
    return PointConfiguration.from_arrays(window, mark_model, positions, marks)


# ---------------------------------------------------------------- oracles --

def inversion_count_quadratic(barcode: Barcode) -> int:
    """Ordered double loop over the displayed inversion indicator."""
    total = 0
    for x in barcode.bars:
        for y in barcode.bars:
            if x.owner != y.owner:
                total += inversion_score(x, y)
    return total


def box_enumeration_oracle(partition, j):
    """Row-major (axis 1 fastest) enumeration of all boxes; returns box j."""
    counts = partition.axis_counts
    coeffs = partition.coefficients
    boxes = []
    indices = [0] * len(counts)
    for _ in range(partition.total_boxes):
        lower = tuple(c * partition.r * a for c, a in zip(indices, coeffs))
        upper = tuple((c + 1) * partition.r * a for c, a in zip(indices, coeffs))
        boxes.append((lower, upper))
        for axis in range(len(counts)):  # increment with carry, axis 1 fastest
            indices[axis] += 1
            if indices[axis] < counts[axis]:
                break
            indices[axis] = 0
    return boxes[j - 1]


def forest_oracle_lifetimes(cfg, cylinder_radius=1.0):
    """Definition-literal merge forest lifetimes via exhaustive path scans."""
    pts = list(cfg.points)
    order = {p.id: i for i, p in enumerate(pts)}

    def in_cylinder(z, v):
        dz = np.array(z.position[1:]) - np.array(v.position[1:])
        return float(dz @ dz) <= cylinder_radius**2

    ancestor = {}
    for z in pts:
        cands = [
            v for v in pts
            if order[v.id] > order[z.id] and in_cylinder(z, v)
        ]
        ancestor[z.id] = min(cands, key=lambda v: order[v.id]).id if cands else z.id

    children = {p.id: [] for p in pts}
    for pid, anc in ancestor.items():
        if anc != pid:
            children[anc].append(pid)
    leaves = [p.id for p in pts if not children[p.id]]
    degree = {p.id: len(children[p.id]) + (ancestor[p.id] != p.id) for p in pts}
    merges = [p.id for p in pts if degree[p.id] >= 3]

    def path(z_id):
        seen = [z_id]
        cur = z_id
        while ancestor[cur] != cur:
            cur = ancestor[cur]
            seen.append(cur)
        return seen

    reach = {leaf: set(path(leaf)) for leaf in leaves}
    survivor = {}
    for m in merges:
        flowing = [leaf for leaf in leaves if m in reach[leaf]]
        survivor[m] = min(flowing, key=lambda l: order[l])

    times = {p.id: p.position[0] for p in pts}
    lifetimes = {}
    for p in pts:
        if p.id not in leaves:
            lifetimes[p.id] = 0.0
            continue
        killers = [m for m in merges if m in reach[p.id] and survivor[m] != p.id]
        if killers:
            first = min(killers, key=lambda m: order[m])
            lifetimes[p.id] = times[first] - times[p.id]
        else:
            lifetimes[p.id] = math.inf
    return lifetimes


def stabilization_radius_oracle(cfg, x, score, rule: AdmissibilityRule | None = None):
    """Try every m = 1, 2, ... directly against the definition."""
    ctx0 = score.build_context(cfg)
    cfg2 = insert_point(cfg, x)
    ctx1 = score.build_context(cfg2)
    x_pos = x.position if isinstance(x, MarkedPoint) else tuple(x)
    ids = [p.id for p in cfg.points]
    pos = {p.id: p.position for p in cfg.points}

    def member_map(c, ctx):
        if rule is None:
            return None
        mask = rule.mask(c, ctx)
        out = {}
        for p in c.points:
            g = sum(score.pair_value(p.id, q.id, ctx) for q in c.points if q.id != p.id)
            out[p.id] = bool(mask[p.id] and g > 0)
        return out

    before_members = member_map(cfg, ctx0)
    after_members = member_map(cfg2, ctx1)

    m = 1
    while True:
        cube = Cube(x_pos, float(m))
        ok = True
        outside = [i for i in ids if not cube.contains(pos[i])]
        for a in outside:
            for b in outside:
                if a >= b:
                    continue
                if score.pair_value(a, b, ctx0) != score.pair_value(a, b, ctx1):
                    ok = False
                    break
            if not ok:
                break
        if ok and rule is not None:
            for a in outside:
                if before_members[a] != after_members[a]:
                    ok = False
                    break
        if ok:
            return m
        m += 1


def segment_crossing_oracle(p1, q1, p2, q2, samples=10_000):
    """Dense-parameter-sampling crossing decision.

    Returns True/False, or None for near-degenerate pairs that should be
    skipped (contact near an endpoint or ambiguous minimum distance).
    """
    p1, q1, p2, q2 = map(np.asarray, (p1, q1, p2, q2))

    def min_dist_to_segment(points, a, b):
        ab = b - a
        denom = float(ab @ ab)
        if denom == 0:
            return np.linalg.norm(points - a, axis=1).min(), 0.5
        t = np.clip(((points - a) @ ab) / denom, 0.0, 1.0)
        proj = a + t[:, None] * ab
        d = np.linalg.norm(points - proj, axis=1)
        k = int(np.argmin(d))
        return float(d[k]), float(k / (len(points) - 1))

    ts = np.linspace(0.0, 1.0, samples)
    lo, hi = 0.0, 1.0
    for _ in range(4):  # refine around the argmin
        grid = p1 + np.linspace(lo, hi, samples)[:, None] * (q1 - p1)
        d, frac = min_dist_to_segment(grid, p2, q2)
        t_best = lo + (hi - lo) * frac
        width = (hi - lo) / samples * 8
        lo, hi = max(0.0, t_best - width), min(1.0, t_best + width)
    if d < 1e-6:
        # contact: proper only if strictly interior on both segments
        s_grid = p2 + ts[:, None] * (q2 - p2)
        d2, u_best = min_dist_to_segment(s_grid, p1, q1)
        if min(t_best, 1 - t_best) < 1e-3 or min(u_best, 1 - u_best) < 1e-3:
            return None
        return True
    if d < 1e-3:
        return None  # too close to call robustly
    return False


def w1_quadrature_oracle(sample, nodes=1_000_000, lo=-8.0, hi=8.0):
    """Trapezoid quadrature of |F_hat - Phi| on [lo, hi].

    The empirical CDF is constant between order statistics, so the grid is
    laid out piecewise between them; within a piece the integrand is smooth
    and the trapezoid rule converges cleanly.
    """
    from scipy.special import ndtr

    x = np.sort(np.asarray(sample, dtype=float))
    m = len(x)
    breaks = np.concatenate(([lo], np.clip(x, lo, hi), [hi]))
    total = 0.0
    per_piece = max(64, nodes // (m + 1))
    for i in range(len(breaks) - 1):
        a, b = breaks[i], breaks[i + 1]
        if b <= a:
            continue
        level = i / m
        t = np.linspace(a, b, per_piece)
        total += float(np.trapezoid(np.abs(level - ndtr(t)), t))
    return total
