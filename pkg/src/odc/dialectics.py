"""Objective dialectical clustering.

A dialectical system is a set of poles (prototype weight vectors with a win
counter).  Training alternates historical phases of pole struggle, where the
winner of each presented condition vector moves toward it, with revolutionary
crises that remove weak poles, fuse near-identical ones, optionally
synthesize new poles from the most contradictory pairs, and perturb the
survivors with Gaussian noise.

With ``generation_enabled=False`` (the classifier mode) the pole count can only
shrink, and with one phase of one sweep the training step coincides with the
sequential maximum-entropy fuzzy c-means update.

One training iteration is one sweep over the whole (shuffled) dataset.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .core import Dataset, as_vector, initial_prototypes, pairwise_distances, presentation_order, spawn_rngs

ETA_SCHEDULES = ("linear", "constant")
NOISE_MODES = ("per-coordinate", "scalar")


@dataclass(frozen=True)
class Pole:
    weights: np.ndarray
    force: int = 0
    marked: bool = False


@dataclass
class DialecticalSystem:
    """Poles (as stacked arrays) plus the phase schedule and crisis thresholds."""

    weights: np.ndarray
    forces: np.ndarray | None = None
    n_phases: int = 2
    phase_len: int = 150
    eta0: float = 0.1
    f_min: float = 0.05
    delta_min: float = 0.01
    delta_max: float = 0.98
    chi_max: float = 0.35
    n_main: int = 1
    generation_enabled: bool = False
    rng_seed: int = 0
    eta_schedule: str = "linear"
    crisis_noise: str = "per-coordinate"

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        if w.ndim == 1:
            w = w[:, None]
        if w.ndim != 2 or w.shape[1] == 0:
            raise ValueError(f"weights must be a (poles, dim) array, got shape {w.shape}")
        self.weights = w
        if self.forces is None:
            self.forces = np.zeros(len(w), dtype=np.int64)
        else:
            self.forces = np.array(self.forces, dtype=np.int64)
        if self.forces.shape != (len(w),):
            raise ValueError("forces must hold one counter per pole")

    @property
    def dim(self) -> int:
        return self.weights.shape[1]

    @property
    def n_poles(self) -> int:
        return self.weights.shape[0]

    @property
    def poles(self) -> tuple[Pole, ...]:
        return tuple(Pole(w.copy(), int(f)) for w, f in zip(self.weights, self.forces))

    @property
    def centroids(self) -> np.ndarray:
        return self.weights

    @property
    def method_tag(self) -> str:
        return "ODC"

    def params(self) -> dict:
        return {f.name: getattr(self, f.name) for f in dataclasses.fields(self) if f.name not in ("weights", "forces")}

    def copy(self, **changes) -> "DialecticalSystem":
        base = {"weights": self.weights.copy(), "forces": self.forces.copy()}
        base.update(changes)
        return dataclasses.replace(self, **base)

    def validate(self) -> None:
        checks = [
            ("n_phases", self.n_phases >= 1),
            ("phase_len", self.phase_len >= 1),
            ("eta0", 0.0 < self.eta0 < 1.0),
            ("f_min", 0.0 <= self.f_min <= 1.0),
            ("delta_min", 0.0 <= self.delta_min <= 1.0),
            ("delta_max", 0.0 <= self.delta_max <= 1.0 and self.delta_min < self.delta_max),
            ("chi_max", self.chi_max >= 0.0),
            ("n_main", self.n_main >= 1),
            ("eta_schedule", self.eta_schedule in ETA_SCHEDULES),
            ("crisis_noise", self.crisis_noise in NOISE_MODES),
        ]
        for name, ok in checks:
            if not ok:
                raise ValueError(f"invalid {name}: {getattr(self, name)!r}")
        if self.n_poles < 1:
            raise ValueError("a dialectical system needs at least one pole")

    def classify_many(self, x: np.ndarray, chunk: int = 65536) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1:
            x = x[None, :]
        out = np.empty(len(x), dtype=np.int64)
        for s in range(0, len(x), chunk):
            out[s:s + chunk] = np.argmax(membership_matrix(x[s:s + chunk], self), axis=1)
        return out


@dataclass
class CrisisRecord:
    eliminated: int = 0
    fused: int = 0
    synthesized: int = 0
    poles_after: int = 0


@dataclass
class TrainingReport:
    final_pole_count: int
    phase_log: list[CrisisRecord] = field(default_factory=list)
    iterations_run: int = 0

    def to_text(self) -> str:
        lines = [
            f"final_pole_count = {self.final_pole_count}",
            f"iterations_run = {self.iterations_run}",
            "# phase eliminated fused synthesized poles_after",
        ]
        for i, rec in enumerate(self.phase_log, 1):
            lines.append(f"{i} {rec.eliminated} {rec.fused} {rec.synthesized} {rec.poles_after}")
        return "\n".join(lines) + "\n"


def init_system(data: Dataset, n_poles: int = 14, **params) -> DialecticalSystem:
    """Seed a system with ``n_poles`` distinct condition vectors drawn from ``data``."""
    seed = params.get("rng_seed", 0)
    init_rng = spawn_rngs(seed, 3)[0]
    system = DialecticalSystem(initial_prototypes(data, n_poles, init_rng), **params)
    system.validate()
    return system


def membership_matrix(x: np.ndarray, system: DialecticalSystem) -> np.ndarray:
    """Gibbs memberships of each row of ``x`` to every pole, shape (m, n_poles)."""
    if system.n_poles == 0:
        raise ValueError("system has no poles")
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    if x.shape[1] != system.dim:
        raise ValueError(f"dimension mismatch: vector has {x.shape[1]}, system has {system.dim}")
    d = pairwise_distances(x, system.weights)
    # shift by the row minimum so the largest exponent is exactly zero
    e = np.exp(-(d - d.min(axis=1, keepdims=True)) / system.n_poles)
    return e / e.sum(axis=1, keepdims=True)


def memberships(x, system: DialecticalSystem) -> np.ndarray:
    return membership_matrix(as_vector(x), system)[0]


def winner(x, system: DialecticalSystem) -> int:
    return int(np.argmax(memberships(x, system)))


classify = winner


def evolution_step(system: DialecticalSystem, x, eta: float) -> DialecticalSystem:
    """One round of pole struggle: the winner moves toward ``x`` and gains one unit of force."""
    if not 0.0 < eta < 1.0:
        raise ValueError(f"eta must lie in (0, 1), got {eta}")
    x = as_vector(x)
    g = memberships(x, system)
    k = int(np.argmax(g))
    out = system.copy()
    out.weights[k] += eta * g[k] ** 2 * (x - out.weights[k])
    out.forces[k] += 1
    return out


def _directed_similarity(weights: np.ndarray) -> np.ndarray:
    # sim[i, j] = g_i(w_j): membership of pole j's weights to pole i
    d = pairwise_distances(weights, weights)
    e = np.exp(-(d - d.min(axis=1, keepdims=True)) / len(weights))
    return (e / e.sum(axis=1, keepdims=True)).T


def contradiction_matrix(system: DialecticalSystem) -> np.ndarray:
    """Pairwise contradictions ``1 - similarity``; the two directed memberships are averaged."""
    sim = _directed_similarity(system.weights)
    delta = 1.0 - 0.5 * (sim + sim.T)
    np.fill_diagonal(delta, np.nan)
    return delta


def contradiction(i: int, j: int, system: DialecticalSystem) -> float:
    if i == j:
        raise ValueError("contradiction of a pole with itself is undefined")
    for idx in (i, j):
        if not 0 <= idx < system.n_poles:
            raise IndexError(f"pole index {idx} out of range")
    return float(contradiction_matrix(system)[i, j])


def crossover(wp, wq) -> np.ndarray:
    """Odd (1-based) coordinates from ``wp``, even ones from ``wq``."""
    wp = as_vector(wp)
    wq = as_vector(wq)
    child = wq.copy()
    child[0::2] = wp[0::2]
    return child


def crisis(system: DialecticalSystem, rng: np.random.Generator | None = None, *,
           final: bool = False) -> tuple[DialecticalSystem, CrisisRecord]:
    """Revolutionary crisis at the end of a historical phase.

    Weak poles (normalized force below ``f_min``) are dropped, one pole of each
    pair closer than ``delta_min`` is fused away, and when generation is enabled
    the ``n_main`` most contradictory pairs above ``delta_max`` each spawn a
    crossover child.  Unless ``final`` is set, the resulting poles get Gaussian
    noise scaled by ``chi_max`` and their forces are reset for the next phase.
    """
    if rng is None:
        rng = spawn_rngs(system.rng_seed, 3)[2]
    k = system.n_poles
    forces = system.forces
    rec = CrisisRecord()

    marked = np.zeros(k, dtype=bool)
    fmax = forces.max()
    if fmax > 0:
        marked = forces / fmax < system.f_min
    rec.eliminated = int(marked.sum())

    delta = contradiction_matrix(system)
    for i in range(k):
        for j in range(i + 1, k):
            if marked[i] or marked[j]:
                continue
            if delta[i, j] < system.delta_min:
                loser = i if forces[i] < forces[j] else j
                marked[loser] = True
                rec.fused += 1

    children = []
    if system.generation_enabled:
        pairs = [(delta[i, j], i, j) for i in range(k) for j in range(i + 1, k)
                 if not marked[i] and not marked[j] and delta[i, j] > system.delta_max]
        pairs.sort(key=lambda t: (-t[0], t[1], t[2]))
        for _, p, q in pairs[:system.n_main]:
            children.append(crossover(system.weights[p], system.weights[q]))
    rec.synthesized = len(children)

    weights = system.weights[~marked]
    new_forces = forces[~marked]
    if children:
        weights = np.vstack([weights, np.array(children)])
        new_forces = np.concatenate([new_forces, np.zeros(len(children), dtype=np.int64)])

    if not final:
        if system.crisis_noise == "scalar":
            noise = system.chi_max * rng.standard_normal()
        else:
            noise = system.chi_max * rng.standard_normal(weights.shape)
        weights = np.clip(weights + noise, 0.0, 1.0)
        new_forces = np.zeros(len(weights), dtype=np.int64)

    rec.poles_after = len(weights)
    return system.copy(weights=weights, forces=new_forces), rec


@njit(cache=True)
def _struggle(weights, forces, points, order, t0, total, eta0, constant_eta, n_steps):
    n_poles, dim = weights.shape
    n_points = order.shape[0]
    d = np.empty(n_poles)
    for s in range(n_steps):
        t = t0 + s
        x = points[order[t % n_points]]
        dmin = np.inf
        for k in range(n_poles):
            acc = 0.0
            for j in range(dim):
                r = x[j] - weights[k, j]
                acc += r * r
            d[k] = np.sqrt(acc)
            if d[k] < dmin:
                dmin = d[k]
        z = 0.0
        best = 0
        ebest = -1.0
        for k in range(n_poles):
            e = np.exp(-(d[k] - dmin) / n_poles)
            z += e
            if e > ebest:
                ebest = e
                best = k
        g = ebest / z
        eta = eta0 if constant_eta else eta0 * (1.0 - t / total)
        for j in range(dim):
            weights[best, j] += eta * g * g * (x[j] - weights[best, j])
        forces[best] += 1


def train(data: Dataset, system: DialecticalSystem) -> tuple[DialecticalSystem, TrainingReport]:
    """Run every historical phase and its closing crisis; deterministic given ``rng_seed``."""
    data.require_nonempty()
    system.validate()
    if data.dim != system.dim:
        raise ValueError(f"dimension mismatch: data has {data.dim}, system has {system.dim}")
    _, order_rng, noise_rng = spawn_rngs(system.rng_seed, 3)
    order = presentation_order(len(data), order_rng)
    steps_per_phase = system.phase_len * len(data)
    total = system.n_phases * steps_per_phase

    current = system.copy(forces=np.zeros(system.n_poles, dtype=np.int64))
    report = TrainingReport(final_pole_count=current.n_poles)
    t = 0
    for phase in range(system.n_phases):
        _struggle(current.weights, current.forces, data.points, order, t, total,
                  system.eta0, system.eta_schedule == "constant", steps_per_phase)
        t += steps_per_phase
        current, rec = crisis(current, noise_rng, final=phase == system.n_phases - 1)
        report.phase_log.append(rec)
    report.final_pole_count = current.n_poles
    report.iterations_run = t
    return current, report
