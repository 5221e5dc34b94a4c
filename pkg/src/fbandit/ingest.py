"""Empirical-data ingestion: CSV outcomes per treatment arm, rescaled into
[0, 1], becoming per-arm resampling distributions.

Input files are UTF-8 CSV with the header ``arm_id,outcome``.  Transforms:

* ``unit-rescale`` -- affine map of the global [min, max] onto [0, 1];
* ``trim-top:q`` -- per arm, drop the top floor(q*m) outcomes, then divide by
  the global maximum across arms;
* ``normal-percentile:loc,scale`` -- x -> Phi((x - loc) / scale), percentile
  ranks under a normal reference (the cited scores-to-[0,1] recipe writes the
  inverse cdf here, which cannot land in [0,1]; the cdf is what is
  implemented, see README);
* ``duration:max_weeks`` -- x -> 1 - (x - 1)/(max_weeks - 1), so a 1-week
  duration maps to 1 and the maximum duration to 0.

``flip`` applies x -> 1 - x after the transform.  Any value outside [0, 1]
after transforming is an error, as is an arm id not in the declared list.
"""

from __future__ import annotations

import csv
import math
from typing import Dict, Optional, Sequence

import numpy as np
from scipy import special as sp

from .distributions import EmpiricalResampler
from .ecdf import UNIT_INTERVAL, ecdf_from_samples
from .errors import ConfigError, DataError

TRANSFORMS = ("unit-rescale", "trim-top", "normal-percentile", "duration")


def read_outcomes_csv(path: str) -> Dict[str, np.ndarray]:
    """arm_id -> outcome array, in file order of first appearance."""
    groups: Dict[str, list] = {}
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot open {path!r}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["arm_id", "outcome"]:
            raise DataError(f"{path!r} must start with header 'arm_id,outcome'")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < 2:
                raise DataError(f"{path!r}:{lineno}: expected two columns")
            arm = row[0].strip()
            try:
                y = float(row[1])
            except ValueError as exc:
                raise DataError(f"{path!r}:{lineno}: bad outcome {row[1]!r}") from exc
            groups.setdefault(arm, []).append(y)
    if not groups:
        raise DataError(f"{path!r} holds no observations")
    return {k: np.asarray(v, dtype=float) for k, v in groups.items()}


def parse_transform(text: str):
    """'name' or 'name:arg1[,arg2]' -> (name, args tuple)."""
    name, _, body = text.strip().partition(":")
    if name not in TRANSFORMS:
        raise ConfigError(f"unknown transform {name!r}; choose from {TRANSFORMS}")
    args = tuple(float(a) for a in body.split(",")) if body else ()
    need = {"unit-rescale": 0, "trim-top": 1, "normal-percentile": 2, "duration": 1}[name]
    if len(args) != need:
        raise ConfigError(f"transform {name!r} takes {need} argument(s)")
    return name, args


def apply_transform(groups: Dict[str, np.ndarray], name: str, args) -> Dict[str, np.ndarray]:
    if name == "unit-rescale":
        allv = np.concatenate(list(groups.values()))
        lo, hi = float(allv.min()), float(allv.max())
        if hi <= lo:
            raise DataError("unit-rescale needs at least two distinct outcome values")
        return {k: (v - lo) / (hi - lo) for k, v in groups.items()}
    if name == "trim-top":
        q = args[0]
        if not 0.0 <= q < 1.0:
            raise ConfigError("trim fraction must lie in [0, 1)")
        trimmed = {}
        for k, v in groups.items():
            drop = int(math.floor(q * v.size))
            keep = np.sort(v)[: v.size - drop] if drop else v
            if keep.size == 0:
                raise DataError(f"arm {k!r} empty after trimming")
            trimmed[k] = keep
        gmax = max(float(v.max()) for v in trimmed.values())
        if gmax <= 0:
            raise DataError("trim-top transform needs a positive global maximum")
        return {k: v / gmax for k, v in trimmed.items()}
    if name == "normal-percentile":
        loc, scale = args
        if scale <= 0:
            raise ConfigError("normal-percentile needs scale > 0")
        return {k: sp.ndtr((v - loc) / scale) for k, v in groups.items()}
    # duration
    max_weeks = args[0]
    if max_weeks <= 1:
        raise ConfigError("duration transform needs max_weeks > 1")
    for k, v in groups.items():
        if np.any((v < 1) | (v > max_weeks)):
            raise DataError(f"arm {k!r} has durations outside [1, {max_weeks:g}]")
    return {k: 1.0 - (v - 1.0) / (max_weeks - 1.0) for k, v in groups.items()}


def ingest_empirical(
    path: str,
    transform: str,
    flip: bool = False,
    arm_ids: Optional[Sequence[str]] = None,
) -> Dict[str, EmpiricalResampler]:
    """Read, transform into [0, 1], and wrap each arm as a resampler."""
    name, args = parse_transform(transform)
    groups = read_outcomes_csv(path)
    if arm_ids is not None:
        declared = list(arm_ids)
        unknown = [k for k in groups if k not in declared]
        if unknown:
            raise DataError(f"unknown arm id(s) {unknown} in {path!r}")
        missing = [k for k in declared if k not in groups]
        if missing:
            raise DataError(f"declared arm(s) {missing} have no observations")
        groups = {k: groups[k] for k in declared}
    out = apply_transform(groups, name, args)
    if flip:
        out = {k: 1.0 - v for k, v in out.items()}
    arms = {}
    for k, v in out.items():
        if np.any((v < 0.0) | (v > 1.0)):
            bad = float(v[(v < 0.0) | (v > 1.0)][0])
            raise DataError(f"arm {k!r}: transformed outcome {bad!r} outside [0, 1]")
        arms[k] = EmpiricalResampler(ecdf_from_samples(v, UNIT_INTERVAL))
    return arms
