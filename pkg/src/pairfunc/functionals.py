"""Generic pair functionals: double sums, compound scores, sum-log-sums,
difference operators and empirical stabilization radii.

A ``PairScore`` bundles the pair score of a model with the machinery the
functionals need: a context builder (graph, barcode, ...), a per-pair value,
and optional fast paths for the total, the compound scores and a pair-score
snapshot used to measure stabilization.  Difference operators recompute the
model from scratch on augmented configurations; correctness first, desk-scale
inputs keep that cheap.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .process import MarkedPoint, PointConfiguration, insert_point

__all__ = [
    "PairScore",
    "AdmissibilityRule",
    "FunctionalValue",
    "double_sum",
    "compound_score",
    "sum_log_sum",
    "diff_first",
    "diff_second",
    "empirical_stabilization_radius",
]


@dataclass(frozen=True)
class PairScore:
    """A symmetric pair score with declared column-type locality.

    ``build_context(cfg)`` prepares whatever the score needs; ``pair_value(a,
    b, ctx)`` evaluates the score between point ids a and b.  ``total``,
    ``compound_all`` and ``snapshot`` are optional optimized routes; the
    contract functions fall back to the generic double loop without them.
    """

    name: str
    locality_order: int
    locality_cutoff: float
    build_context: Callable[[PointConfiguration], Any]
    pair_value: Callable[[int, int, Any], float]
    symmetric: bool = True
    integer_valued: bool = True
    total: Callable[[Any], float] | None = None
    compound_all: Callable[[Any], dict[int, float]] | None = None
    snapshot: Callable[[Any], "ScoreSnapshot"] | None = None


@dataclass(frozen=True)
class AdmissibilityRule:
    """Which points enter the sum-log-sum: everything, or (for tree
    realization) points inside the shrunk window with a lifetime in (0, 1)."""

    kind: str = "all"  # "all" | "tree_realization"

    @classmethod
    def all(cls) -> "AdmissibilityRule":
        return cls("all")

    @classmethod
    def tree_realization(cls) -> "AdmissibilityRule":
        return cls("tree_realization")

    def mask(self, cfg: PointConfiguration, ctx) -> dict[int, bool]:
        if self.kind == "all":
            return {p.id: True for p in cfg.points}
        shrunk = cfg.window.shrunk()
        lifetimes = _context_lifetimes(ctx)
        out = {}
        for p in cfg.points:
            life = lifetimes.get(p.id, 0.0)
            out[p.id] = shrunk.contains(p.position) and 0.0 < life < 1.0
        return out


def _context_lifetimes(ctx) -> dict[int, float]:
    barcode = getattr(ctx, "barcode", None)
    if barcode is None:
        raise ValueError("admissibility rule needs a barcode-bearing context")
    return {bar.owner: bar.lifetime for bar in barcode.bars}


@dataclass(frozen=True)
class FunctionalValue:
    """Evaluated functional: a double sum, or a sum-log-sum with its product
    materialized only on demand (log space first)."""

    kind: str  # "double_sum" | "sum_log_sum"
    value: float
    admissible_count: int | None = None
    dropped_zero_g: int | None = None

    def product(self) -> float:
        if self.kind != "sum_log_sum":
            raise ValueError("product only defined for sum-log-sum values")
        try:
            return math.exp(self.value)
        except OverflowError:
            return math.inf

    def product_log10(self) -> float:
        if self.kind != "sum_log_sum":
            raise ValueError("product only defined for sum-log-sum values")
        return self.value / math.log(10.0)

    def product_mantissa_exponent(self) -> tuple[float, int]:
        log10 = self.product_log10()
        exp = math.floor(log10)
        return 10.0 ** (log10 - exp), int(exp)

    def to_record(self) -> dict:
        return {
            "kind": self.kind,
            "value": self.value,
            "admissible_count": self.admissible_count,
            "dropped_zero_G": self.dropped_zero_g,
        }


def double_sum(cfg: PointConfiguration, score: PairScore) -> float:
    """Sum of the pair score over ordered pairs of configuration points."""
    ctx = score.build_context(cfg)
    if score.total is not None:
        return score.total(ctx)
    ids = [p.id for p in cfg.points]
    acc = 0.0
    for a in ids:
        for b in ids:
            if a != b:
                acc += score.pair_value(a, b, ctx)
    return acc


def compound_score(cfg: PointConfiguration, z, score: PairScore, ctx=None) -> float:
    """G(Z): total score between Z and every other point."""
    z_id = z.id if isinstance(z, MarkedPoint) else int(z)
    if all(p.id != z_id for p in cfg.points):
        raise KeyError(f"unknown point id {z_id}")
    if ctx is None:
        ctx = score.build_context(cfg)
    if score.compound_all is not None:
        return score.compound_all(ctx)[z_id]
    return sum(
        score.pair_value(z_id, p.id, ctx) for p in cfg.points if p.id != z_id
    )


def sum_log_sum(
    cfg: PointConfiguration, score: PairScore, rule: AdmissibilityRule
) -> FunctionalValue:
    """Sum of log G over admissible points with positive G; counts how many
    admissible points were dropped for G = 0."""
    if not score.integer_valued:
        raise ValueError("sum-log-sum requires an integer-valued pair score")
    ctx = score.build_context(cfg)
    mask = rule.mask(cfg, ctx)
    if score.compound_all is not None:
        G = score.compound_all(ctx)
    else:
        G = {
            p.id: sum(
                score.pair_value(p.id, q.id, ctx) for q in cfg.points if q.id != p.id
            )
            for p in cfg.points
        }
    total = 0.0
    admissible = 0
    dropped = 0
    for p in cfg.points:
        if not mask[p.id]:
            continue
        admissible += 1
        g = G[p.id]
        if g > 0:
            total += math.log(g)
        else:
            dropped += 1
    return FunctionalValue("sum_log_sum", total, admissible, dropped)


def diff_first(cfg: PointConfiguration, x, functional: Callable[[PointConfiguration], float]) -> float:
    """First-order difference: functional(cfg + x) - functional(cfg), with the
    model rebuilt from scratch on the augmented configuration."""
    return functional(insert_point(cfg, x)) - functional(cfg)


def diff_second(cfg: PointConfiguration, x, y, functional: Callable[[PointConfiguration], float]) -> float:
    """Second-order difference via four full evaluations."""
    cfg_x = insert_point(cfg, x)
    cfg_y = insert_point(cfg, y)
    cfg_xy = insert_point(cfg_x, y)
    return functional(cfg_xy) - functional(cfg_x) - functional(cfg_y) + functional(cfg)


class ScoreSnapshot:
    """Pair scores of a configuration, comparable after an insertion."""

    def changed_pairs(self, other: "ScoreSnapshot"):
        raise NotImplementedError


class SparsePairSnapshot(ScoreSnapshot):
    """Scores stored as a sparse map (id_min, id_max) -> value."""

    def __init__(self, scores: dict[tuple[int, int], float], ids: set[int]):
        self.scores = scores
        self.ids = ids

    def changed_pairs(self, other: "SparsePairSnapshot"):
        keys = set(self.scores) | set(other.scores)
        for a, b in keys:
            if a not in self.ids or b not in self.ids:
                continue  # pairs involving the inserted point are unconstrained
            if self.scores.get((a, b), 0.0) != other.scores.get((a, b), 0.0):
                yield a, b


class BarPairSnapshot(ScoreSnapshot):
    """Scores determined by per-point (birth, lifetime) rows; changed pairs are
    found with one vectorized comparison restricted to the original ids."""

    def __init__(self, ids: list[int], births: np.ndarray, lifetimes: np.ndarray):
        self.ids = ids
        self.births = births
        self.lifetimes = lifetimes

    def _matrix(self, keep: np.ndarray) -> np.ndarray:
        b = self.births[keep]
        l = self.lifetimes[keep]
        ok = (l > 0) & (l < 1)
        d = np.where(ok, b + np.where(ok, l, 0.0), 0.0)
        bb = b[:, None] - b[None, :]
        dd = d[:, None] - d[None, :]
        inv = ((bb < 0) & (dd > 0)) | ((bb > 0) & (dd < 0))
        return inv & ok[:, None] & ok[None, :]

    def changed_pairs(self, other: "BarPairSnapshot"):
        common = [i for i in self.ids if i in set(other.ids)]
        pos_self = {pid: k for k, pid in enumerate(self.ids)}
        pos_other = {pid: k for k, pid in enumerate(other.ids)}
        keep_self = np.array([pos_self[i] for i in common], dtype=np.int64)
        keep_other = np.array([pos_other[i] for i in common], dtype=np.int64)
        before = self._matrix(keep_self)
        after = other._matrix(keep_other)
        ii, jj = np.nonzero(before != after)
        for i, j in zip(ii, jj):
            if i < j:
                yield common[i], common[j]


def _chebyshev(p: tuple[float, ...], q: tuple[float, ...]) -> float:
    return max(abs(a - b) for a, b in zip(p, q))


def empirical_stabilization_radius(
    cfg: PointConfiguration,
    x,
    score: PairScore,
    rule: AdmissibilityRule | None = None,
) -> int:
    """Smallest integer m >= 1 such that inserting x leaves every pair score
    between points outside the cube Q(x, m) unchanged (and, when a rule is
    given, leaves admissible-with-positive-G membership unchanged outside it).

    Computed by locating all changed pairs and memberships and taking the max
    Chebyshev distance, floored at 1.
    """
    if score.snapshot is None:
        raise ValueError(f"score {score.name!r} provides no stabilization snapshot")
    x_pos = x.position if isinstance(x, MarkedPoint) else tuple(float(v) for v in x)
    ctx_before = score.build_context(cfg)
    cfg2 = insert_point(cfg, x)
    ctx_after = score.build_context(cfg2)
    before = score.snapshot(ctx_before)
    after = score.snapshot(ctx_after)
    positions = {p.id: p.position for p in cfg.points}
    worst = 0.0
    for a, b in before.changed_pairs(after):
        worst = max(worst, min(_chebyshev(positions[a], x_pos), _chebyshev(positions[b], x_pos)))
    if rule is not None:
        members_before = _positive_membership(cfg, ctx_before, score, rule)
        members_after = _positive_membership(cfg2, ctx_after, score, rule)
        for pid, pos in positions.items():
            if members_before[pid] != members_after.get(pid):
                worst = max(worst, _chebyshev(pos, x_pos))
    return max(1, math.ceil(worst))


def _positive_membership(cfg, ctx, score: PairScore, rule: AdmissibilityRule) -> dict[int, bool]:
    mask = rule.mask(cfg, ctx)
    if score.compound_all is not None:
        G = score.compound_all(ctx)
    else:
        G = {
            p.id: sum(score.pair_value(p.id, q.id, ctx) for q in cfg.points if q.id != p.id)
            for p in cfg.points
        }
    return {p.id: bool(mask[p.id] and G[p.id] > 0) for p in cfg.points}
