"""Self-describing model checkpoint file.

Layout: 4-byte magic, uint32 LE format version, uint64 LE header length, a JSON
header (config, vocabulary, tensor names and shapes), then each tensor's raw
little-endian float64 bytes in header order.  Byte-for-byte deterministic for
identical contents, which the training determinism contract relies on.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .model import ModelConfig, ModelParams
from .vocab import Vocabulary

MAGIC = b"PPCK"
FORMAT_VERSION = 1


class CheckpointError(ValueError):
    pass


def save_checkpoint(path, params: ModelParams, vocab: Vocabulary):
    names = sorted(params.tensors)
    header = {
        "format_version": FORMAT_VERSION,
        "config": params.config.to_dict(),
        "vocab": vocab.to_dict(),
        "tensors": [{"name": n, "shape": list(params[n].shape)} for n in names],
    }
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", FORMAT_VERSION))
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        for name in names:
            fh.write(np.ascontiguousarray(params[name], dtype="<f8").tobytes())


def load_checkpoint(path):
    """Returns (ModelParams, Vocabulary); raises CheckpointError on bad files."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != MAGIC:
        raise CheckpointError(f"{path}: not a checkpoint file (bad magic)")
    (version,) = struct.unpack_from("<I", data, 4)
    if version != FORMAT_VERSION:
        raise CheckpointError(
            f"{path}: unsupported checkpoint version {version}, expected {FORMAT_VERSION}")
    (header_len,) = struct.unpack_from("<Q", data, 8)
    header_end = 16 + header_len
    try:
        header = json.loads(data[16:header_end].decode("utf-8"))
    except ValueError as err:
        raise CheckpointError(f"{path}: corrupt header ({err})") from None
    config = ModelConfig.from_dict(header["config"])
    vocab = Vocabulary.from_dict(header["vocab"])
    tensors = {}
    offset = header_end
    for spec in header["tensors"]:
        shape = tuple(spec["shape"])
        count = int(np.prod(shape)) if shape else 1
        end = offset + 8 * count
        if end > len(data):
            raise CheckpointError(f"{path}: truncated tensor {spec['name']!r}")
        arr = np.frombuffer(data[offset:end], dtype="<f8").astype(np.float64)
        tensors[spec["name"]] = arr.reshape(shape)
        offset = end
    if offset != len(data):
        raise CheckpointError(f"{path}: {len(data) - offset} trailing bytes")
    return ModelParams(config, tensors), vocab
