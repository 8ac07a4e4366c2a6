"""TMF1 binary format for frame-major float matrices, plus the stats file.

Layout, all little-endian:
  8-byte magic "TMF1\\0\\0\\0\\0", u32 frame count, u32 row width,
  then frames * width float32 values, row-major by frame.

Stats file: u32 width, width means (f32), width stds (f32).
"""

from __future__ import annotations

import struct

import numpy as np

MAGIC = b"TMF1\x00\x00\x00\x00"
_HEADER = struct.Struct("<8sII")


def to_bytes(matrix) -> bytes:
    matrix = np.ascontiguousarray(matrix, dtype="<f4")
    if matrix.ndim != 2:
        raise ValueError(f"TMF1 stores 2-D matrices, got shape {matrix.shape}")
    return _HEADER.pack(MAGIC, matrix.shape[0], matrix.shape[1]) + matrix.tobytes()


def from_bytes(blob, source="<bytes>"):
    if len(blob) < _HEADER.size:
        raise ValueError(f"{source}: truncated TMF1 header")
    magic, frames, width = _HEADER.unpack(blob[: _HEADER.size])
    if magic != MAGIC:
        raise ValueError(f"{source}: bad magic {magic!r}")
    payload = blob[_HEADER.size :]
    if len(payload) != frames * width * 4:
        raise ValueError(f"{source}: truncated TMF1 payload")
    return np.frombuffer(payload, dtype="<f4").reshape(frames, width).astype(np.float64)


def write_tmf(path, matrix):
    with open(path, "wb") as fh:
        fh.write(to_bytes(matrix))


def read_tmf(path):
    with open(path, "rb") as fh:
        return from_bytes(fh.read(), source=str(path))


def write_stats(path, mean, std):
    mean = np.asarray(mean, dtype="<f4")
    std = np.asarray(std, dtype="<f4")
    if mean.shape != std.shape or mean.ndim != 1:
        raise ValueError("mean and std must be equal-length vectors")
    with open(path, "wb") as fh:
        fh.write(struct.pack("<I", mean.size))
        fh.write(mean.tobytes())
        fh.write(std.tobytes())


def read_stats(path):
    with open(path, "rb") as fh:
        raw = fh.read(4)
        if len(raw) != 4:
            raise ValueError(f"{path}: truncated stats file")
        (width,) = struct.unpack("<I", raw)
        payload = fh.read(2 * width * 4)
    if len(payload) != 2 * width * 4:
        raise ValueError(f"{path}: truncated stats payload")
    values = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    return values[:width], values[width:]
