"""Reference quantizers: k-means, fuzzy c-means (classical and maximum-entropy) and a ring SOM.

All trainers take the same :class:`BaselineConfig` and return a :class:`Codebook`.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import Dataset, as_vector, initial_prototypes, pairwise_distances, presentation_order, spawn_rngs

METHOD_TAGS = ("KM", "CM", "KO", "ODC")


@dataclass
class BaselineConfig:
    n_outputs: int = 13
    max_iters: int = 200
    eta0: float = 0.1
    seed: int = 0
    som_sigma0: float = 2.0
    fcm_fuzzifier: float = 2.0

    def validate(self) -> None:
        checks = [
            ("n_outputs", self.n_outputs >= 1),
            ("max_iters", self.max_iters >= 1),
            ("eta0", 0.0 < self.eta0 < 1.0),
            ("som_sigma0", self.som_sigma0 > 0.0),
            ("fcm_fuzzifier", self.fcm_fuzzifier > 1.0),
        ]
        for name, ok in checks:
            if not ok:
                raise ValueError(f"invalid {name}: {getattr(self, name)!r}")


@dataclass
class Codebook:
    centroids: np.ndarray
    method_tag: str
    params: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        c = np.array(self.centroids, dtype=np.float64)
        if c.ndim == 1:
            c = c[:, None]
        self.centroids = c
        if self.method_tag not in METHOD_TAGS:
            raise ValueError(f"unknown method tag {self.method_tag!r}")

    @property
    def dim(self) -> int:
        return self.centroids.shape[1]

    def __len__(self) -> int:
        return self.centroids.shape[0]

    def classify_many(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1:
            x = x[None, :]
        if x.shape[1] != self.dim:
            raise ValueError(f"dimension mismatch: vector has {x.shape[1]}, codebook has {self.dim}")
        return np.argmin(pairwise_distances(x, self.centroids), axis=1)


def classify_codebook(x, cb: Codebook) -> int:
    """Index of the nearest centroid; ties go to the lowest index."""
    return int(cb.classify_many(as_vector(x))[0])


def _prepare(data: Dataset, cfg: BaselineConfig) -> None:
    data.require_nonempty()
    cfg.validate()
    if cfg.n_outputs > len(data):
        raise ValueError(f"n_outputs={cfg.n_outputs} exceeds the {len(data)} available points")


def _nearest(x: np.ndarray, c: np.ndarray, chunk: int = 65536) -> tuple[np.ndarray, np.ndarray]:
    labels = np.empty(len(x), dtype=np.int64)
    dist = np.empty(len(x))
    for s in range(0, len(x), chunk):
        d = pairwise_distances(x[s:s + chunk], c)
        labels[s:s + chunk] = np.argmin(d, axis=1)
        dist[s:s + chunk] = d[np.arange(len(d)), labels[s:s + chunk]]
    return labels, dist


def kmeans_inertia(data: Dataset, centroids: np.ndarray) -> float:
    _, dist = _nearest(data.points, centroids)
    return float(np.sum(dist ** 2))


def _kmeans_pp(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    centers = [x[rng.integers(len(x))]]
    d2 = np.sum((x - centers[0]) ** 2, axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total == 0.0:
            i = rng.integers(len(x))
        else:
            i = rng.choice(len(x), p=d2 / total)
        centers.append(x[i])
        d2 = np.minimum(d2, np.sum((x - x[i]) ** 2, axis=1))
    return np.array(centers)


def kmeans_train(data: Dataset, cfg: BaselineConfig, *, history: list | None = None) -> Codebook:
    """Batch Lloyd iterations from k-means++ seeds until the assignment stops changing."""
    _prepare(data, cfg)
    x = data.points
    k = cfg.n_outputs
    (rng,) = spawn_rngs(cfg.seed, 1)
    c = _kmeans_pp(x, k, rng)
    labels = None
    for _ in range(cfg.max_iters):
        new_labels, dist = _nearest(x, c)
        if history is not None:
            history.append(float(np.sum(dist ** 2)))
        if labels is not None and np.array_equal(labels, new_labels):
            break
        labels = new_labels
        counts = np.bincount(labels, minlength=k)
        sums = np.zeros_like(c)
        np.add.at(sums, labels, x)
        taken = np.zeros(len(x), dtype=bool)
        for j in range(k):
            if counts[j] > 0:
                c[j] = sums[j] / counts[j]
            else:
                # re-seed from the point worst served by its current centroid
                far = np.where(taken, -1.0, dist)
                i = int(np.argmax(far))
                taken[i] = True
                c[j] = x[i]
    return Codebook(c, "KM", dataclasses.asdict(cfg))


@njit(cache=True)
def _maxent_sweeps(c, points, order, eta0, max_iters, tol):
    k, dim = c.shape
    n = order.shape[0]
    total = max_iters * n
    d = np.empty(k)
    prev = np.empty_like(c)
    t = 0
    for _ in range(max_iters):
        prev[:, :] = c
        for s in range(n):
            x = points[order[s]]
            dmin = np.inf
            for i in range(k):
                acc = 0.0
                for j in range(dim):
                    r = x[j] - c[i, j]
                    acc += r * r
                d[i] = np.sqrt(acc)
                if d[i] < dmin:
                    dmin = d[i]
            z = 0.0
            top = 0
            utop = -1.0
            for i in range(k):
                u = np.exp(-(d[i] - dmin) / k)
                z += u
                if u > utop:
                    utop = u
                    top = i
            u = utop / z
            eta = eta0 * (1.0 - t / total)
            for j in range(dim):
                c[top, j] += eta * u * u * (x[j] - c[top, j])
            t += 1
        shift = 0.0
        for i in range(k):
            acc = 0.0
            for j in range(dim):
                r = c[i, j] - prev[i, j]
                acc += r * r
            if acc > shift:
                shift = acc
        if np.sqrt(shift) < tol:
            break


def fcm_memberships(x: np.ndarray, c: np.ndarray, m: float) -> np.ndarray:
    """Classical fuzzy c-means memberships; points sitting on a centroid belong to it fully."""
    d = pairwise_distances(x, c)
    u = np.empty_like(d)
    zero = d == 0.0
    hit = zero.any(axis=1)
    with np.errstate(divide="ignore"):
        inv = d[~hit] ** (-2.0 / (m - 1.0))
    u[~hit] = inv / inv.sum(axis=1, keepdims=True)
    if hit.any():
        z = zero[hit].astype(np.float64)
        u[hit] = z / z.sum(axis=1, keepdims=True)
    return u


def fcm_train(data: Dataset, cfg: BaselineConfig, variant: str = "classical") -> Codebook:
    """Fuzzy c-means.

    ``classical`` alternates membership and centroid updates with fuzzifier
    ``cfg.fcm_fuzzifier``.  ``max_entropy`` uses Gibbs memberships with
    temperature equal to the centroid count and updates only the winning
    centroid after every presented point, one sweep per iteration.  Both stop
    after ``max_iters`` or once no centroid moves more than 1e-6.
    """
    _prepare(data, cfg)
    x = data.points
    init_rng, order_rng, _ = spawn_rngs(cfg.seed, 3)
    c = initial_prototypes(data, cfg.n_outputs, init_rng)
    params = dict(dataclasses.asdict(cfg), variant=variant)
    if variant == "max_entropy":
        order = presentation_order(len(x), order_rng)
        _maxent_sweeps(c, x, order, cfg.eta0, cfg.max_iters, 1e-6)
        return Codebook(c, "CM", params)
    if variant != "classical":
        raise ValueError(f"unknown fuzzy c-means variant {variant!r}")
    m = cfg.fcm_fuzzifier
    for _ in range(cfg.max_iters):
        um = fcm_memberships(x, c, m) ** m
        new = (um.T @ x) / um.sum(axis=0)[:, None]
        shift = np.max(np.sqrt(np.sum((new - c) ** 2, axis=1)))
        c = new
        if shift < 1e-6:
            break
    return Codebook(c, "CM", params)


@njit(cache=True)
def _som_sweeps(w, points, order, eta0, sigma0, max_iters):
    k, dim = w.shape
    n = order.shape[0]
    total = max_iters * n
    for t in range(total):
        x = points[order[t % n]]
        best = 0
        dbest = np.inf
        for i in range(k):
            acc = 0.0
            for j in range(dim):
                r = x[j] - w[i, j]
                acc += r * r
            if acc < dbest:
                dbest = acc
                best = i
        frac = 1.0 - t / total
        eta = eta0 * frac
        sigma = sigma0 * frac
        for i in range(k):
            ring = abs(i - best)
            ring = min(ring, k - ring)
            if sigma < 1e-12:
                h = 1.0 if ring == 0 else 0.0
            else:
                h = np.exp(-(ring * ring) / (2.0 * sigma * sigma))
            if h < 1e-12:
                continue
            for j in range(dim):
                w[i, j] += eta * h * (x[j] - w[i, j])


def som_train(data: Dataset, cfg: BaselineConfig) -> Codebook:
    """Kohonen map on a 1-D ring with a shrinking Gaussian neighbourhood."""
    _prepare(data, cfg)
    x = data.points
    init_rng, order_rng, _ = spawn_rngs(cfg.seed, 3)
    w = initial_prototypes(data, cfg.n_outputs, init_rng)
    order = presentation_order(len(x), order_rng)
    _som_sweeps(w, x, order, cfg.eta0, cfg.som_sigma0, cfg.max_iters)
    return Codebook(np.clip(w, 0.0, 1.0), "KO", dataclasses.asdict(cfg))
