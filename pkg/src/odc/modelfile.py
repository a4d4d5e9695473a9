"""Flat text format shared by trained dialectical systems and baseline codebooks.

::

    # odc model
    method = ODC
    dim = 3
    count = 13
    seed = 42
    param eta0 = 0.1
    ...
    pole <force> <w_1> ... <w_dim>

Weights are written with 17 significant digits, which round-trips doubles exactly.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path

import numpy as np

from .baselines import Codebook
from .dialectics import DialecticalSystem

MAGIC = "# odc model"


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def dumps(model) -> str:
    if isinstance(model, DialecticalSystem):
        params = model.params()
        seed = model.rng_seed
        forces = model.forces
    else:
        params = dict(model.params)
        seed = params.get("seed", 0)
        forces = np.zeros(len(model.centroids), dtype=np.int64)
    w = np.asarray(model.centroids)
    lines = [MAGIC, f"method = {model.method_tag}", f"dim = {w.shape[1]}", f"count = {w.shape[0]}", f"seed = {seed}"]
    lines += [f"param {k} = {_fmt(v)}" for k, v in sorted(params.items())]
    for f, row in zip(forces, w):
        lines.append("pole " + " ".join([str(int(f))] + [_fmt(x) for x in row]))
    return "\n".join(lines) + "\n"


def save_model(path, model) -> None:
    Path(path).write_text(dumps(model))


def _parse_value(text: str):
    if text in ("true", "false"):
        return text == "true"
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def loads(text: str):
    lines = text.splitlines()
    if not lines or lines[0].strip() != MAGIC:
        raise ValueError("not an odc model file")
    header, params, forces, rows = {}, {}, [], []
    for line in lines[1:]:
        line = line.strip()
        if not line:
            continue
        if line.startswith("pole "):
            parts = line.split()[1:]
            forces.append(int(parts[0]))
            rows.append([float(p) for p in parts[1:]])
        elif line.startswith("param "):
            key, value = (s.strip() for s in line[6:].split("=", 1))
            params[key] = _parse_value(value)
        else:
            key, value = (s.strip() for s in line.split("=", 1))
            header[key] = value
    try:
        method, dim, count = header["method"], int(header["dim"]), int(header["count"])
    except KeyError as e:
        raise ValueError(f"model file lacks {e.args[0]!r}") from None
    w = np.array(rows, dtype=np.float64).reshape(-1, dim) if rows else np.zeros((0, dim))
    if len(w) != count or any(len(r) != dim for r in rows):
        raise ValueError("model file pole rows disagree with its header")
    if method == "ODC":
        known = {f.name for f in dataclasses.fields(DialecticalSystem)}
        return DialecticalSystem(w, forces, **{k: v for k, v in params.items() if k in known})
    return Codebook(w, method, params)


def load_model(path):
    return loads(Path(path).read_text())
