"""Seeded synthetic data: Gaussian blobs in the unit cube and blob-textured multispectral volumes."""

from __future__ import annotations

import itertools

import numpy as np

from .core import Dataset
from .imageio import MultispectralImage


def blob_means(n_blobs: int, dim: int, rng: np.random.Generator, *, min_sep: float = 0.3,
               margin: float = 0.15, max_tries: int = 10000) -> np.ndarray:
    """Rejection-sample blob centres at least ``min_sep`` apart, ``margin`` away from the faces."""
    for _ in range(max_tries):
        m = rng.uniform(margin, 1.0 - margin, size=(n_blobs, dim))
        if all(np.linalg.norm(a - b) >= min_sep for a, b in itertools.combinations(m, 2)):
            return m
    raise RuntimeError("could not place blobs with the requested separation")


def gaussian_blobs(n_points: int = 3000, n_blobs: int = 3, dim: int = 3, sigma: float = 0.03,
                   seed: int = 0, min_sep: float = 0.3) -> tuple[Dataset, np.ndarray]:
    """Equal-sized isotropic blobs clipped to [0, 1]; returns the dataset and the true means."""
    rng = np.random.default_rng(seed)
    means = blob_means(n_blobs, dim, rng, min_sep=min_sep)
    sizes = np.full(n_blobs, n_points // n_blobs)
    sizes[: n_points % n_blobs] += 1
    pts = np.concatenate([m + sigma * rng.standard_normal((s, dim)) for m, s in zip(means, sizes)])
    return Dataset(np.clip(pts, 0.0, 1.0)), means


def blob_volume(n_slices: int = 4, height: int = 32, width: int = 32, n_blobs: int = 3, bands: int = 3,
                sigma: float = 0.03, seed: int = 0, l_max: int = 255) -> tuple[list[MultispectralImage], np.ndarray]:
    """Slices tiled with vertical stripes, each stripe filled with samples from one blob."""
    rng = np.random.default_rng(seed)
    means = blob_means(n_blobs, bands, rng)
    cols = np.arange(width) * n_blobs // width
    slices = []
    for _ in range(n_slices):
        shift = rng.integers(width)
        which = np.broadcast_to(np.roll(cols, shift), (height, width))
        vals = means[which] + sigma * rng.standard_normal((height, width, bands))
        px = np.floor(np.clip(vals, 0.0, 1.0) * l_max + 0.5).astype(np.int64)
        slices.append(MultispectralImage(px, l_max))
    return slices, means
