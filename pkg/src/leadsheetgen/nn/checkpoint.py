"""Binary checkpoint format for named parameter tensors.

Layout (little-endian):

    magic "LSGM" | version u32 | architecture tag u8 | layout hash u64
    repeated: name length u16 | name bytes | rank u8 | dims u32 each |
              float32 data

The layout hash fingerprints the vocabulary index conventions the model
was trained under; loaders reject checkpoints from a different layout.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from ..errors import IncompatibleCheckpointError

CHECKPOINT_MAGIC = b"LSGM"
CHECKPOINT_VERSION = 1


@dataclass
class Checkpoint:
    architecture_tag: int
    layout_hash: int
    params: dict


def save_checkpoint(path, architecture_tag: int, params: dict, layout_hash: int) -> None:
    with open(path, "wb") as handle:
        handle.write(
            struct.pack(
                "<4sIBQ", CHECKPOINT_MAGIC, CHECKPOINT_VERSION, architecture_tag, layout_hash
            )
        )
        for name, value in params.items():
            encoded = name.encode("ascii")
            array = np.ascontiguousarray(value, dtype="<f4")
            handle.write(struct.pack("<H", len(encoded)))
            handle.write(encoded)
            handle.write(struct.pack("<B", array.ndim))
            handle.write(struct.pack(f"<{array.ndim}I", *array.shape))
            handle.write(array.tobytes())


def load_checkpoint(path) -> Checkpoint:
    with open(path, "rb") as handle:
        data = handle.read()
    header_size = struct.calcsize("<4sIBQ")
    if len(data) < header_size:
        raise IncompatibleCheckpointError("checkpoint truncated before header")
    magic, version, tag, layout_hash = struct.unpack_from("<4sIBQ", data)
    if magic != CHECKPOINT_MAGIC:
        raise IncompatibleCheckpointError(f"bad checkpoint magic {magic!r}")
    if version != CHECKPOINT_VERSION:
        raise IncompatibleCheckpointError(f"unsupported checkpoint version {version}")
    params = {}
    offset = header_size
    while offset < len(data):
        (name_length,) = struct.unpack_from("<H", data, offset)
        offset += 2
        name = data[offset : offset + name_length].decode("ascii")
        offset += name_length
        (rank,) = struct.unpack_from("<B", data, offset)
        offset += 1
        shape = struct.unpack_from(f"<{rank}I", data, offset)
        offset += 4 * rank
        size = int(np.prod(shape)) if rank else 1
        end = offset + 4 * size
        if end > len(data):
            raise IncompatibleCheckpointError(f"checkpoint truncated in tensor {name!r}")
        params[name] = np.frombuffer(data[offset:end], dtype="<f4").reshape(shape).copy()
        offset = end
    return Checkpoint(architecture_tag=tag, layout_hash=layout_hash, params=params)
