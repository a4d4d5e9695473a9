"""End-to-end quantization comparison of ODC against the KO, CM and KM baselines."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import baselines, dialectics
from .core import Dataset, spawn_rngs
from .fidelity import FidelityReport, fidelity
from .imageio import MultispectralImage, quantize

log = logging.getLogger(__name__)


@dataclass
class ExperimentConfig:
    seed: int = 0
    poles: int = 14
    phases: int = 2
    phase_len: int = 150
    outputs: int = 13
    max_iters: int = 200
    eta0: float = 0.1
    f_min: float = 0.05
    delta_min: float = 0.01
    delta_max: float = 0.98
    chi_max: float = 0.35
    max_train_pixels: int = 0
    methods: tuple = ("KO", "CM", "KM", "ODC")
    extra: dict = field(default_factory=dict)


def pooled_dataset(slices: list[MultispectralImage], cfg: ExperimentConfig) -> Dataset:
    pts = np.concatenate([s.normalized() for s in slices])
    if cfg.max_train_pixels and len(pts) > cfg.max_train_pixels:
        rng = spawn_rngs(cfg.seed, 4)[3]
        pts = pts[np.sort(rng.choice(len(pts), cfg.max_train_pixels, replace=False))]
    return Dataset(pts, slices[0].l_max)


def train_models(data: Dataset, cfg: ExperimentConfig) -> dict:
    bcfg = baselines.BaselineConfig(n_outputs=cfg.outputs, max_iters=cfg.max_iters, eta0=cfg.eta0, seed=cfg.seed)
    models = {}
    for method in cfg.methods:
        log.info("training %s", method)
        if method == "ODC":
            system = dialectics.init_system(
                data, cfg.poles, n_phases=cfg.phases, phase_len=cfg.phase_len, eta0=cfg.eta0, f_min=cfg.f_min,
                delta_min=cfg.delta_min, delta_max=cfg.delta_max, chi_max=cfg.chi_max, rng_seed=cfg.seed,
            )
            models[method], _ = dialectics.train(data, system)
        elif method == "KO":
            models[method] = baselines.som_train(data, bcfg)
        elif method == "CM":
            models[method] = baselines.fcm_train(data, bcfg, "classical")
        elif method == "KM":
            models[method] = baselines.kmeans_train(data, bcfg)
        else:
            raise ValueError(f"unknown method {method!r}")
    return models


def fidelity_rows(slices, models) -> list[tuple[str, str, FidelityReport]]:
    rows = []
    for i, img in enumerate(slices):
        for method, model in models.items():
            q, _ = quantize(img, model)
            rows.append((str(i), method, fidelity(q, img)))
    return rows


def by_method(rows) -> dict[str, dict[str, FidelityReport]]:
    out: dict[str, dict[str, FidelityReport]] = {}
    for sid, method, rep in rows:
        out.setdefault(method, {})[sid] = rep
    return out


def ordering_check(summary, psnr_gap: float = 2.0) -> dict[str, bool]:
    """BrainWeb-scale expectations: ODC's PSNR near KO's, and RMSE ordered KO <= ODC <= CM <= KM up to spread."""
    def mean(m, k):
        return summary[m][k].mean

    def leq(a, b):
        # a <= b, or the two mean +/- deviation intervals overlap
        sa, sb = summary[a]["rmse"], summary[b]["rmse"]
        return sa.mean <= sb.mean or sa.mean - sa.mean_dev <= sb.mean + sb.mean_dev

    return {
        "psnr_gap": abs(mean("ODC", "psnr") - mean("KO", "psnr")) <= psnr_gap,
        "rmse_order": leq("KO", "ODC") and leq("ODC", "CM") and leq("CM", "KM"),
    }
