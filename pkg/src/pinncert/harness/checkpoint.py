"""Versioned binary checkpoints of network parameters.

Layout::

    8 bytes   magic b"PINNCKPT"
    uint32 LE format version
    uint32 LE header length H
    H bytes   UTF-8 JSON header: layer_sizes, seed, epoch, n_params, problem
    n_params  float64 LE: weights then bias of each layer, row-major
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..net import MlpParams, init_mlp

MAGIC = b"PINNCKPT"
VERSION = 1


def save(path, params: MlpParams, epoch: int, problem: str = "") -> Path:
    path = Path(path)
    vec = params.flatten().astype("<f8")
    header = {
        "layer_sizes": list(params.layer_sizes),
        "seed": int(params.seed),
        "epoch": int(epoch),
        "n_params": int(vec.size),
        "problem": problem,
    }
    hb = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(hb)))
        fh.write(hb)
        fh.write(vec.tobytes())
    return path


def load(path) -> tuple:
    """Returns ``(params, header)``."""
    data = Path(path).read_bytes()
    if data[:8] != MAGIC:
        raise ValueError(f"{path}: not a checkpoint file")
    if len(data) < 16:
        raise ValueError(f"{path}: truncated header")
    version, hlen = struct.unpack("<II", data[8:16])
    if version != VERSION:
        raise ValueError(f"{path}: unsupported checkpoint version {version}")
    header = json.loads(data[16:16 + hlen].decode("utf-8"))
    body = data[16 + hlen:]
    n = header["n_params"]
    if len(body) != 8 * n:
        raise ValueError(f"{path}: expected {n} parameters, found {len(body) // 8}")
    vec = np.frombuffer(body, dtype="<f8").astype(float)
    template = init_mlp(header["layer_sizes"], header["seed"])
    if template.n_params != n:
        raise ValueError(f"{path}: parameter count does not match the layer sizes")
    return template.with_vector(vec), header
