"""Model catalog: the seven named pair-functional models.

crossing-fixed | crossing-max | crossing-localized:<cap>   (double sum, k = 2)
inversion-uniform | inversion-tree                         (double sum, k = 1)
treelog-uniform | treelog-tree                             (sum-log-sum, k = 1)
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from . import barcodes, graphs
from .functionals import (
    AdmissibilityRule,
    BarPairSnapshot,
    FunctionalValue,
    PairScore,
    SparsePairSnapshot,
    double_sum,
    sum_log_sum,
)
from .process import MarkModel, PointConfiguration, sample_ppp
from .geometry import Window

__all__ = ["Model", "get_model", "MODEL_NAMES"]

MODEL_NAMES = (
    "crossing-fixed",
    "crossing-max",
    "crossing-localized",
    "inversion-uniform",
    "inversion-tree",
    "treelog-uniform",
    "treelog-tree",
)


class CrossingContext:
    def __init__(self, graph: graphs.GeometricGraph):
        self.graph = graph
        self._pair_scores = None

    @property
    def pair_scores(self):
        if self._pair_scores is None:
            self._pair_scores = graphs.crossing_pair_scores(self.graph)
        return self._pair_scores


class BarcodeContext:
    def __init__(self, cfg: PointConfiguration, barcode: barcodes.Barcode):
        self.cfg = cfg
        self.barcode = barcode
        order = sorted(barcode.bars, key=lambda b: b.owner)
        self.ids = [b.owner for b in order]
        self.births = np.array([b.birth for b in order], dtype=float)
        self.lifetimes = np.array([b.lifetime for b in order], dtype=float)
        self._index = {pid: k for k, pid in enumerate(self.ids)}

    def bar(self, pid: int) -> barcodes.Bar:
        k = self._index[pid]
        return barcodes.Bar(pid, float(self.births[k]), float(self.lifetimes[k]))


def _crossing_pair_value(a: int, b: int, ctx: CrossingContext) -> float:
    if a == b:
        return 0.0
    key = (min(a, b), max(a, b))
    return ctx.pair_scores.get(key, 0) / 8.0


def _crossing_total(ctx: CrossingContext) -> float:
    return float(graphs.crossing_number(ctx.graph))


def _crossing_snapshot(ctx: CrossingContext) -> SparsePairSnapshot:
    ids = {p.id for p in ctx.graph.cfg.points}
    scores = {k: v / 8.0 for k, v in ctx.pair_scores.items()}
    return SparsePairSnapshot(scores, ids)


def _inversion_pair_value(a: int, b: int, ctx: BarcodeContext) -> float:
    if a == b:
        return 0.0
    return float(barcodes.inversion_score(ctx.bar(a), ctx.bar(b)))


def _inversion_total(ctx: BarcodeContext) -> float:
    return float(barcodes.inversion_count(ctx.barcode))


def _inversion_compound(ctx: BarcodeContext) -> dict[int, float]:
    G = barcodes.inversion_compound_counts(ctx.births, ctx.lifetimes)
    return {pid: int(g) for pid, g in zip(ctx.ids, G)}


def _inversion_snapshot(ctx: BarcodeContext) -> BarPairSnapshot:
    return BarPairSnapshot(list(ctx.ids), ctx.births.copy(), ctx.lifetimes.copy())


@dataclass(frozen=True)
class Model:
    """A named model: mark distribution, context builder, pair score, and the
    functional it feeds (double sum or sum-log-sum)."""

    name: str
    functional_kind: str          # "double_sum" | "sum_log_sum"
    locality_order: int
    mark_model: MarkModel
    score: PairScore
    admissibility: AdmissibilityRule

    def default_window(self, n: float, d: int = 2, margin: float = 0.2) -> Window:
        return Window(n=n, dim=d, boundary_margin=margin)

    def sample(self, window: Window, seed, intensity: float = 1.0) -> PointConfiguration:
        return sample_ppp(window, intensity, self.mark_model, seed)

    def evaluate(self, cfg: PointConfiguration) -> FunctionalValue:
        if self.functional_kind == "double_sum":
            return FunctionalValue("double_sum", double_sum(cfg, self.score))
        return sum_log_sum(cfg, self.score, self.admissibility)

    def functional(self) -> Callable[[PointConfiguration], float]:
        return lambda cfg: self.evaluate(cfg).value


def _crossing_model(name: str, kernel, mark_model: MarkModel, cutoff: float) -> Model:
    def build(cfg: PointConfiguration) -> CrossingContext:
        return CrossingContext(graphs.build_edges(cfg, kernel, slab_cutoff=cutoff))

    score = PairScore(
        name=name,
        locality_order=2,
        locality_cutoff=2.0 * cutoff,
        build_context=build,
        pair_value=_crossing_pair_value,
        integer_valued=False,  # ordered form carries the 1/8 weight
        total=_crossing_total,
        snapshot=_crossing_snapshot,
    )
    return Model(name, "double_sum", 2, mark_model, score, AdmissibilityRule.all())


def _barcode_model(name: str, lifetime_model: str, functional_kind: str, cutoff: float) -> Model:
    if lifetime_model == "uniform":
        mark_model = MarkModel.uniform01()

        def build(cfg: PointConfiguration) -> BarcodeContext:
            return BarcodeContext(cfg, barcodes.uniform_lifetimes(cfg))

    else:
        mark_model = MarkModel.none()

        def build(cfg: PointConfiguration) -> BarcodeContext:
            forest = barcodes.build_merge_forest(cfg, cylinder_radius=cutoff)
            return BarcodeContext(cfg, barcodes.elder_lifetimes(forest))

    score = PairScore(
        name=name,
        locality_order=1,
        locality_cutoff=1.0,
        build_context=build,
        pair_value=_inversion_pair_value,
        integer_valued=True,
        total=_inversion_total,
        compound_all=_inversion_compound,
        snapshot=_inversion_snapshot,
    )
    rule = (
        AdmissibilityRule.tree_realization()
        if functional_kind == "sum_log_sum"
        else AdmissibilityRule.all()
    )
    return Model(name, functional_kind, 1, mark_model, score, rule)


def get_model(model_id: str, cutoff: float = 1.0) -> Model:
    """Resolve a model id; crossing-localized accepts a ':<cap>' suffix."""
    base, _, arg = model_id.partition(":")
    if base == "crossing-fixed":
        return _crossing_model(model_id, graphs.FixedRadius(1.0), MarkModel.none(), cutoff)
    if base == "crossing-max":
        return _crossing_model(model_id, graphs.MaxKernel(), MarkModel.exponential(1.0), cutoff)
    if base == "crossing-localized":
        cap = int(arg) if arg else None
        return _crossing_model(model_id, graphs.Localized(cap), MarkModel.exponential(1.0), cutoff)
    if base == "inversion-uniform":
        return _barcode_model(model_id, "uniform", "double_sum", cutoff)
    if base == "inversion-tree":
        return _barcode_model(model_id, "tree", "double_sum", cutoff)
    if base == "treelog-uniform":
        return _barcode_model(model_id, "uniform", "sum_log_sum", cutoff)
    if base == "treelog-tree":
        return _barcode_model(model_id, "tree", "sum_log_sum", cutoff)
    raise ValueError(f"unknown model id {model_id!r}")
