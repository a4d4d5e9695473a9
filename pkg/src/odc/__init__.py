"""Objective dialectical classifier and baseline vector quantizers for multispectral images."""

from .baselines import BaselineConfig, Codebook, classify_codebook, fcm_train, kmeans_train, som_train
from .core import Dataset, denormalize, euclidean_distance, normalize
from .dialectics import (
    DialecticalSystem,
    TrainingReport,
    classify,
    contradiction,
    crisis,
    evolution_step,
    init_system,
    memberships,
    train,
    winner,
)
from .fidelity import FidelityReport

__version__ = "0.1.0"
