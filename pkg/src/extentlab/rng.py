"""Deterministic counter-based random streams for experiments.

Every trial draws from its own Philox stream keyed by (master seed,
experiment id, trial index), so results are bit-reproducible regardless of
how trials are scheduled across workers.
"""

from __future__ import annotations

import hashlib
import os

import numpy as np


def _experiment_key(experiment_id: str) -> int:
    digest = hashlib.sha256(experiment_id.encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big")


def trial_rng(master_seed: int, experiment_id: str, trial: int) -> np.random.Generator:
    """Independent stream for one trial of one experiment."""
    seq = np.random.SeedSequence(
        entropy=int(master_seed), spawn_key=(_experiment_key(experiment_id), int(trial))
    )
    return np.random.Generator(np.random.Philox(seq))


def haar_sample(dim: int, stream: np.random.Generator) -> np.ndarray:
    """Haar-random unit vector: normalized standard complex Gaussians."""
    if dim < 1:
        raise ValueError("dimension must be positive")
    v = stream.normal(size=dim) + 1j * stream.normal(size=dim)
    return v / np.linalg.norm(v)


def worker_count() -> int:
    """Worker cap for trial parallelism (EXTENTLAB_THREADS, default = cores)."""
    raw = os.environ.get("EXTENTLAB_THREADS", "")
    if raw.strip():
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1
