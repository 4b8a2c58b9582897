"""Marked Poisson point processes: sampling, insertion, counting, serialization.

Reproducibility contract: every random quantity is a pure function of a master
seed and a tuple of stream keys.  Streams are derived with numpy's splittable
``SeedSequence([master, *keys])`` construction; replication r of experiment e
uses ``derive_rng(master, e, r)``, and sampling splits one further level into a
position stream (key 0, which also draws the Poisson count first) and a mark
stream (key 1).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .geometry import Window, window_from_text, window_to_text, _g17

__all__ = [
    "MarkModel",
    "MarkedPoint",
    "PointConfiguration",
    "derive_rng",
    "sample_ppp",
    "insert_point",
    "remove_point",
    "count_in",
    "dump_configuration",
    "load_configuration",
]

_U64 = (1 << 64) - 1


def derive_rng(master: int, *keys: int) -> np.random.Generator:
    """Independent generator for stream (master, *keys)."""
    seq = np.random.SeedSequence([int(master) & _U64, *[int(k) & _U64 for k in keys]])
    return np.random.default_rng(seq)


@dataclass(frozen=True)
class MarkModel:
    """Distribution of the independent mark attached to each point.

    Variants: ``none``, ``uniform01`` (lifetimes), ``exponential`` (radii with
    exponential tails, rate > 0) and ``uniform_radius`` (radii uniform on
    [lower, upper] with upper >= 1 so that radii >= 1 have positive mass).
    """

    kind: str = "none"
    rate: float = 1.0
    lower: float = 0.0
    upper: float = 1.5

    def __post_init__(self):
        if self.kind not in ("none", "uniform01", "exponential", "uniform_radius"):
            raise ValueError(f"unknown mark model {self.kind!r}")
        if self.kind == "exponential" and not self.rate > 0:
            raise ValueError("exponential mark model needs rate > 0")
        if self.kind == "uniform_radius":
            if not (0.0 <= self.lower < self.upper):
                raise ValueError("uniform_radius needs 0 <= lower < upper")
            if self.upper < 1.0:
                raise ValueError("uniform_radius needs upper >= 1")

    @classmethod
    def none(cls) -> "MarkModel":
        return cls("none")

    @classmethod
    def uniform01(cls) -> "MarkModel":
        return cls("uniform01")

    @classmethod
    def exponential(cls, rate: float = 1.0) -> "MarkModel":
        return cls("exponential", rate=rate)

    @classmethod
    def uniform_radius(cls, lower: float = 0.0, upper: float = 1.5) -> "MarkModel":
        return cls("uniform_radius", lower=lower, upper=upper)

    @property
    def has_marks(self) -> bool:
        return self.kind != "none"

    def sample(self, rng: np.random.Generator, size: int):
        if self.kind == "none":
            return None
        if self.kind == "uniform01":
            return rng.uniform(0.0, 1.0, size)
        if self.kind == "exponential":
            return rng.exponential(1.0 / self.rate, size)
        return rng.uniform(self.lower, self.upper, size)

    def validate_mark(self, mark) -> None:
        if self.kind == "none":
            if mark is not None:
                raise ValueError("mark model 'none' admits no marks")
            return
        if mark is None or not math.isfinite(mark):
            raise ValueError("this mark model requires a finite real mark")
        if self.kind == "uniform01" and not 0.0 <= mark <= 1.0:
            raise ValueError(f"uniform01 mark outside [0, 1]: {mark}")
        if mark < 0:
            raise ValueError("radius marks must be nonnegative")

    def to_record(self) -> dict:
        if self.kind == "exponential":
            return {"kind": self.kind, "rate": self.rate}
        if self.kind == "uniform_radius":
            return {"kind": self.kind, "lower": self.lower, "upper": self.upper}
        return {"kind": self.kind}

    @classmethod
    def from_record(cls, rec: dict) -> "MarkModel":
        return cls(
            rec["kind"],
            rate=rec.get("rate", 1.0),
            lower=rec.get("lower", 0.0),
            upper=rec.get("upper", 1.5),
        )


@dataclass(frozen=True)
class MarkedPoint:
    position: tuple[float, ...]
    mark: float | None
    id: int

    def __post_init__(self):
        object.__setattr__(self, "position", tuple(float(v) for v in self.position))


def _sort_key(p: MarkedPoint):
    return (p.position, p.id)


@dataclass(frozen=True)
class PointConfiguration:
    """Finite multiset of marked points in a window.

    Points are stored sorted by coordinate 1, ties broken by the remaining
    coordinates and then by id, so iteration order is deterministic.
    Configurations are immutable snapshots; insertion and removal return new
    values.
    """

    window: Window
    mark_model: MarkModel
    points: tuple[MarkedPoint, ...]
    seed: int | None = None

    def __post_init__(self):
        pts = tuple(sorted(self.points, key=_sort_key))
        ids = [p.id for p in pts]
        if len(set(ids)) != len(ids):
            raise ValueError("point ids must be unique")
        for p in pts:
            if len(p.position) != self.window.dim:
                raise ValueError("point dimension does not match the window")
            if not self.window.contains(p.position):
                raise ValueError(f"point {p.id} lies outside the window")
            self.mark_model.validate_mark(p.mark)
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_arrays(
        cls,
        window: Window,
        mark_model: MarkModel,
        positions: Sequence[Sequence[float]],
        marks: Sequence[float] | None = None,
        seed: int | None = None,
    ) -> "PointConfiguration":
        pts = []
        for i, pos in enumerate(positions):
            mark = None if marks is None else float(marks[i])
            pts.append(MarkedPoint(tuple(pos), mark, i))
        return cls(window, mark_model, tuple(pts), seed)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def positions_array(self) -> np.ndarray:
        if not self.points:
            return np.empty((0, self.window.dim))
        return np.array([p.position for p in self.points], dtype=float)

    def marks_array(self) -> np.ndarray:
        if not self.mark_model.has_marks:
            raise ValueError("configuration has no marks")
        return np.array([p.mark for p in self.points], dtype=float)

    def ids_array(self) -> np.ndarray:
        return np.array([p.id for p in self.points], dtype=np.int64)

    def by_id(self, point_id: int) -> MarkedPoint:
        for p in self.points:
            if p.id == point_id:
                return p
        raise KeyError(f"no point with id {point_id}")

    def next_id(self) -> int:
        return 1 + max((p.id for p in self.points), default=-1)


def sample_ppp(
    window: Window,
    intensity: float = 1.0,
    marks: MarkModel = MarkModel.none(),
    seed: int | Sequence[int] = 0,
) -> PointConfiguration:
    """Poisson sample on the window: count ~ Poisson(intensity * volume), then
    i.i.d. uniform positions, then i.i.d. marks.  Bit-identical for identical
    (window, intensity, marks, seed)."""
    if not intensity > 0:
        raise ValueError("intensity must be positive")
    vol = window.volume
    if not vol > 0:
        raise ValueError("degenerate window with zero volume")
    keys = (seed,) if isinstance(seed, (int, np.integer)) else tuple(seed)
    pos_rng = derive_rng(keys[0], *keys[1:], 0)
    mark_rng = derive_rng(keys[0], *keys[1:], 1)
    count = int(pos_rng.poisson(intensity * vol))
    sides = window.sides
    positions = pos_rng.uniform(0.0, 1.0, (count, window.dim)) * np.array(sides)
    mark_values = marks.sample(mark_rng, count)
    pts = []
    for i in range(count):
        mark = None if mark_values is None else float(mark_values[i])
        pts.append(MarkedPoint(tuple(positions[i]), mark, i))
    base_seed = int(keys[0]) if isinstance(seed, (int, np.integer)) else None
    return PointConfiguration(window, marks, tuple(pts), seed=base_seed)


def insert_point(cfg: PointConfiguration, x: MarkedPoint | Sequence[float], mark=None) -> PointConfiguration:
    """New configuration with one extra point under a fresh id; input unchanged."""
    if isinstance(x, MarkedPoint):
        position, mark = x.position, x.mark
    else:
        position = tuple(float(v) for v in x)
    if not cfg.window.contains(position):
        raise ValueError("inserted position lies outside the window")
    cfg.mark_model.validate_mark(mark)
    new = MarkedPoint(position, mark, cfg.next_id())
    return PointConfiguration(cfg.window, cfg.mark_model, cfg.points + (new,), cfg.seed)


def remove_point(cfg: PointConfiguration, point_id: int) -> PointConfiguration:
    kept = tuple(p for p in cfg.points if p.id != point_id)
    if len(kept) == len(cfg.points):
        raise KeyError(f"no point with id {point_id}")
    return PointConfiguration(cfg.window, cfg.mark_model, kept, cfg.seed)


def count_in(cfg: PointConfiguration, region) -> int:
    """Number of configuration points whose position lies in the region."""
    return sum(1 for p in cfg.points if region.contains(p.position))


def dump_configuration(cfg: PointConfiguration) -> str:
    """Line-oriented text dump with exact decimal round-trip."""
    header = {
        "d": cfg.window.dim,
        "window": json.loads(window_to_text(cfg.window)),
        "markmodel": cfg.mark_model.to_record(),
        "seed": cfg.seed,
    }
    lines = [json.dumps(header, sort_keys=True)]
    for p in cfg.points:
        coords = " ".join(_g17(v) for v in p.position)
        mark = "-" if p.mark is None else _g17(p.mark)
        lines.append(f"{p.id} {coords} {mark}")
    return "\n".join(lines) + "\n"


def load_configuration(text: str) -> PointConfiguration:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty configuration dump")
    header = json.loads(lines[0])
    window = window_from_text(json.dumps(header["window"]))
    mark_model = MarkModel.from_record(header["markmodel"])
    pts = []
    for ln in lines[1:]:
        fields = ln.split()
        pid = int(fields[0])
        coords = tuple(float(v) for v in fields[1 : 1 + header["d"]])
        raw_mark = fields[1 + header["d"]]
        mark = None if raw_mark == "-" else float(raw_mark)
        pts.append(MarkedPoint(coords, mark, pid))
    return PointConfiguration(window, mark_model, tuple(pts), header.get("seed"))
