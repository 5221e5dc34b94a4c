"""Deterministic randomness contract.

Every stream is a pure function of (master_seed, instance_index,
replication_index, lane).  Streams are derived with
``SeedSequence(master_seed, spawn_key=(instance, replication, lane))`` feeding
a Philox counter-based bit generator, so distinct coordinates give
statistically independent streams and identical coordinates reproduce the
same bytes on every run, regardless of thread scheduling.

Lane convention used by the episode runner (documented here, relied on by the
engines and tests):

* lane k, 0 <= k < K   -- outcome stream of arm k, consumed one value per pull;
* lane K               -- policy randomization (uniform exploration draws, one
                          per exploration round, then the ETC-T commitment
                          coin as the next draw).

All outcome draws are inversions of uniforms, so a stream's values depend
only on its own coordinates, never on how other arms were sampled.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class RandomSource:
    """Coordinates of one random stream."""

    master_seed: int
    instance_index: int = 0
    replication_index: int = 0
    lane: int = 0

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        ss = np.random.SeedSequence(
            self.master_seed,
            spawn_key=(self.instance_index, self.replication_index, self.lane),
        )
        return np.random.Generator(np.random.Philox(ss))

    def at(self, instance_index=None, replication_index=None) -> "RandomSource":
        kw = {}
        if instance_index is not None:
            kw["instance_index"] = instance_index
        if replication_index is not None:
            kw["replication_index"] = replication_index
        return replace(self, **kw)

    def lane_source(self, lane: int) -> "RandomSource":
        return replace(self, lane=lane)
