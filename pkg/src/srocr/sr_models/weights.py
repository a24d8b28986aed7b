"""Weight initialization and the SRWT weight container.

Layout: b"SRWT", u32 version, u32 header length, UTF-8 JSON header, then the
slot payloads as contiguous little-endian float32 in header order.
"""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .graph import LayerGraph

MAGIC = b"SRWT"
VERSION = 1


class WeightFormatError(ValueError):
    pass


def init_weights(graph: LayerGraph, seed: int = 0) -> dict[str, np.ndarray]:
    """Kaiming fan-in normal init, scaled by 0.1 for ESRGAN; zero biases."""
    rng = np.random.default_rng(seed)
    gain = 0.1 if graph.preset.id == "esrgan_gen" else 1.0
    weights = {}
    for slot in graph.slots():
        leaf = slot.name.rsplit(".", 1)[1]
        if leaf == "weight":
            fan_in = int(np.prod(slot.shape[1:])) if len(slot.shape) == 4 else slot.shape[0]
            std = np.sqrt(2.0 / fan_in) * gain
            w = rng.standard_normal(slot.shape) * std
        elif leaf in ("bias", "beta", "mean"):
            w = np.zeros(slot.shape)
        elif leaf in ("gamma", "var"):
            w = np.ones(slot.shape)
        elif leaf == "alpha":
            w = np.full(slot.shape, 0.25)
        else:
            raise ValueError(f"no initializer for slot {slot.name!r}")
        weights[slot.name] = w.astype(np.float32)
    return weights


def save_weights(graph: LayerGraph, weights, path) -> None:
    slots = list(graph.slots())
    missing = [s.name for s in slots if s.name not in weights]
    if missing:
        raise WeightFormatError(f"cannot save: missing slots {missing[:5]}")
    entries, payloads, offset = [], [], 0
    for s in slots:
        arr = np.asarray(weights[s.name])
        if arr.shape != s.shape:
            raise WeightFormatError(f"slot {s.name}: shape {arr.shape} != graph shape {s.shape}")
        data = np.ascontiguousarray(arr, dtype="<f4").tobytes()
        entries.append({"name": s.name, "shape": list(s.shape), "offset": offset})
        payloads.append(data)
        offset += len(data)
    header = json.dumps(
        {"graph": graph.name, "preset": graph.preset.id, "scale": graph.scale, "slots": entries},
        sort_keys=True,
    ).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(header)))
        fh.write(header)
        for data in payloads:
            fh.write(data)


def read_header(path) -> tuple[dict, bytes]:
    raw = Path(path).read_bytes()
    if len(raw) < 12 or raw[:4] != MAGIC:
        raise WeightFormatError(f"{path}: not an SRWT weight file (bad magic)")
    version, hlen = struct.unpack("<II", raw[4:12])
    if version != VERSION:
        raise WeightFormatError(f"{path}: unsupported SRWT version {version}")
    if len(raw) < 12 + hlen:
        raise WeightFormatError(f"{path}: truncated header")
    try:
        header = json.loads(raw[12 : 12 + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise WeightFormatError(f"{path}: corrupt header: {exc}") from None
    return header, raw[12 + hlen :]


def load_weights(graph: LayerGraph, path) -> dict[str, np.ndarray]:
    header, payload = read_header(path)
    by_name = {e["name"]: e for e in header.get("slots", [])}
    weights = {}
    for s in graph.slots():
        entry = by_name.get(s.name)
        if entry is None:
            raise WeightFormatError(f"{path}: slot {s.name!r} missing from file")
        shape = tuple(entry["shape"])
        if shape != s.shape:
            raise WeightFormatError(f"{path}: slot {s.name!r} has shape {shape}, graph expects {s.shape}")
        start = entry["offset"]
        end = start + 4 * s.size
        if end > len(payload):
            raise WeightFormatError(f"{path}: truncated payload for slot {s.name!r}")
        weights[s.name] = np.frombuffer(payload[start:end], dtype="<f4").reshape(shape).astype(np.float32)
    return weights
