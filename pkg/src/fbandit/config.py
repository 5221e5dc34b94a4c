"""Experiment configuration: a single JSON file, strict keys, round-trip
encode/decode, with CLI flags overriding individual fields."""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from typing import Optional

from .distributions import Beta, FiniteDiscrete, Mixture, PointMass
from .ecdf import SupportInterval
from .errors import ConfigError
from .ingest import ingest_empirical
from .simulation import PAPER11_GRID, PAPER21_GRID, DEFAULT_ORACLE_GRID


@dataclass
class ExperimentConfig:
    functional: str = "gini-welfare"
    policies: list = field(default_factory=lambda: ["fucb:beta=2.01"])
    arms: Optional[list] = None
    grid: Optional[object] = None  # "paper21" | "paper11" | explicit list of p-values
    n: int = 1000
    reps: int = 1
    seed: Optional[int] = None
    checkpoints: object = "geometric"  # "geometric" | "all" | explicit list
    outdir: str = "out"
    workers: int = 1
    support: list = field(default_factory=lambda: [0.0, 1.0])
    oracle_grid: int = DEFAULT_ORACLE_GRID
    engine: str = "auto"
    ns: Optional[list] = None  # table1 horizons
    functionals: Optional[list] = None  # table1 rows

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config root must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config key(s): {unknown}")
        return cls(**data)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def load(cls, path: str) -> "ExperimentConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path!r} is not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    def resolved_seed(self) -> int:
        if self.seed is not None:
            return int(self.seed)
        env = os.environ.get("FB_SEED")
        if env is not None:
            try:
                return int(env)
            except ValueError as exc:
                raise ConfigError(f"FB_SEED must be an integer, got {env!r}") from exc
        return 0

    def support_interval(self) -> SupportInterval:
        if (
            not isinstance(self.support, (list, tuple))
            or len(self.support) != 2
        ):
            raise ConfigError("field 'support' must be [a, b]")
        return SupportInterval(float(self.support[0]), float(self.support[1]))

    def grid_values(self):
        if self.grid is None:
            return None
        if self.grid == "paper21":
            return PAPER21_GRID
        if self.grid == "paper11":
            return PAPER11_GRID
        if isinstance(self.grid, (list, tuple)) and self.grid:
            return tuple(float(p) for p in self.grid)
        raise ConfigError("field 'grid' must be 'paper21', 'paper11', or a list of p-values")


def parse_arm(defn, support: SupportInterval):
    """One arm definition from JSON.

    Forms: {"beta": [a, b]}, {"point": c}, {"discrete": {"values": [...],
    "probs": [...]}}, {"mixture": {"weights": [...], "components": [...]}},
    {"data": {"path": ..., "transform": ..., "arm": id, "flip": false}}.
    """
    if not isinstance(defn, dict) or len(defn) != 1:
        raise ConfigError(f"arm definition must be a single-key object, got {defn!r}")
    kind, val = next(iter(defn.items()))
    if kind == "beta":
        return Beta(float(val[0]), float(val[1]))
    if kind == "point":
        return PointMass(float(val))
    if kind == "discrete":
        return FiniteDiscrete(tuple(val["values"]), tuple(val["probs"]))
    if kind == "mixture":
        comps = tuple(parse_arm(c, support) for c in val["components"])
        return Mixture(tuple(val["weights"]), comps)
    if kind == "data":
        path = val.get("path")
        if not path or not os.path.exists(path):
            raise ConfigError(f"arm data file does not exist: {path!r}")
        arms = ingest_empirical(
            path,
            val.get("transform", "unit-rescale"),
            flip=bool(val.get("flip", False)),
        )
        arm_id = str(val.get("arm", ""))
        if arm_id not in arms:
            raise ConfigError(
                f"arm id {arm_id!r} not found in {path!r}; available: {sorted(arms)}"
            )
        return arms[arm_id]
    raise ConfigError(f"unknown arm kind {kind!r}")
