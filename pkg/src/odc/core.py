"""Shared numeric plumbing: datasets, distances, gamut normalization, seeding."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def as_vector(a) -> np.ndarray:
    v = np.asarray(a, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D feature vector, got shape {v.shape}")
    return v


def euclidean_distance(a, b) -> float:
    """L2 distance between two feature vectors of equal length."""
    a = as_vector(a)
    b = as_vector(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    return float(np.sqrt(np.sum((a - b) ** 2)))


def pairwise_distances(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Distances between every row of ``x`` (m, n) and every row of ``w`` (k, n)."""
    diff = x[:, None, :] - w[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def _check_raw(raw: np.ndarray, l_max: int) -> None:
    if l_max <= 0:
        raise ValueError(f"l_max must be positive, got {l_max}")
    if raw.size and (raw.min() < 0 or raw.max() > l_max):
        raise ValueError(f"raw values must lie in [0, {l_max}]")


def normalize(raw, l_max: int) -> np.ndarray:
    """Map integer gamut values in ``[0, l_max]`` onto the unit interval."""
    raw = np.asarray(raw)
    _check_raw(raw, l_max)
    return raw.astype(np.float64) / float(l_max)


def denormalize(coords, l_max: int) -> np.ndarray:
    """Inverse of :func:`normalize`, rounding half away from zero and clipping to the gamut."""
    v = np.asarray(coords, dtype=np.float64) * float(l_max)
    out = np.sign(v) * np.floor(np.abs(v) + 0.5)
    return np.clip(out, 0, l_max).astype(np.int64)


@dataclass
class Dataset:
    """Unit-interval feature vectors plus the gamut ceiling they were scaled from."""

    points: np.ndarray
    l_max: int = 255

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[1] == 0:
            raise ValueError(f"points must be a (count, dim) array, got shape {pts.shape}")
        self.points = pts

    @classmethod
    def from_raw(cls, raw, l_max: int = 255) -> "Dataset":
        raw = np.asarray(raw)
        return cls(normalize(raw.reshape(-1, raw.shape[-1]), l_max), l_max)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def require_nonempty(self) -> None:
        if len(self) == 0:
            raise ValueError("dataset is empty")


def spawn_rngs(seed: int, count: int) -> list[np.random.Generator]:
    """Independent generators fanned out deterministically from one seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def presentation_order(n_points: int, rng: np.random.Generator) -> np.ndarray:
    return rng.permutation(n_points).astype(np.int64)


def initial_prototypes(data: Dataset, k: int, rng: np.random.Generator) -> np.ndarray:
    """Pick ``k`` distinct condition vectors from the dataset as starting prototypes."""
    data.require_nonempty()
    if k < 1:
        raise ValueError(f"need at least one prototype, got {k}")
    distinct = np.unique(data.points, axis=0)
    if k > len(distinct):
        raise ValueError(f"requested {k} prototypes but the data holds only {len(distinct)} distinct points")
    idx = np.sort(rng.choice(len(distinct), size=k, replace=False))
    return distinct[rng.permutation(idx)].copy()
