"""Pixel-by-pixel fidelity indexes between a multispectral image and its reference."""

from __future__ import annotations

import csv
import math
from dataclasses import astuple, dataclass

import numpy as np

INDEX_NAMES = ("me", "mae", "mse", "rmse", "psnr")
CSV_HEADER = ("slice_id", "method") + INDEX_NAMES


@dataclass(frozen=True)
class FidelityReport:
    me: float
    mae: float
    mse: float
    rmse: float
    psnr: float  # math.inf for a perfect match

    def as_row(self) -> list[str]:
        return [format_value(v) for v in astuple(self)]


def format_value(v: float) -> str:
    if math.isinf(v):
        return "inf"
    return repr(float(v))


def _pixels(img):
    return np.asarray(getattr(img, "pixels", img))


def fidelity(f, f_ref, l_max: int | None = None) -> FidelityReport:
    """ME, MAE, MSE, RMSE and PSNR of ``f`` against ``f_ref``.

    The per-pixel error is the L2 norm of the band difference vector.  Images
    are either :class:`~odc.imageio.MultispectralImage` instances or
    ``(height, width, bands)`` arrays together with ``l_max``.
    """
    if l_max is None:
        l_max = getattr(f, "l_max", None)
        ref_l_max = getattr(f_ref, "l_max", None)
        if l_max is None or ref_l_max is None:
            raise ValueError("l_max must be given for raw arrays")
        if l_max != ref_l_max:
            raise ValueError(f"gamut mismatch: {l_max} vs {ref_l_max}")
    a = _pixels(f).astype(np.float64)
    b = _pixels(f_ref).astype(np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise ValueError("empty image")
    if a.ndim == 2:
        a = a[..., None]
        b = b[..., None]
    err = np.sqrt(np.sum((a - b) ** 2, axis=-1)).ravel()
    me = float(err.max())
    mae = float(err.mean())
    mse = float(np.mean(err ** 2))
    rmse = math.sqrt(mse)
    psnr = math.inf if mse == 0.0 else 20.0 * math.log10(l_max / rmse)
    return FidelityReport(me, mae, mse, rmse, psnr)


def psnr_from_rmse(rmse: float, l_max: int = 255) -> float:
    return math.inf if rmse == 0.0 else 20.0 * math.log10(l_max / rmse)


def write_rows(path, rows) -> None:
    """Write ``(slice_id, method, FidelityReport)`` triples as CSV."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for slice_id, method, rep in rows:
            w.writerow([slice_id, method, *rep.as_row()])


def read_rows(path) -> list[tuple[str, str, FidelityReport]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != CSV_HEADER:
            raise ValueError(f"{path}: expected columns {','.join(CSV_HEADER)}")
        return [
            (row["slice_id"], row["method"], FidelityReport(*(float(row[k]) for k in INDEX_NAMES)))
            for row in reader
        ]
