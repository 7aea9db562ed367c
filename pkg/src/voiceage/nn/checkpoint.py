"""Binary checkpoint format for named float32 tensors.

Layout, all integers little-endian u32:

    magic    4 bytes  b"VANN"
    version  u32      currently 1
    count    u32      number of tensors
    then per tensor:
      name_len u32, name (utf-8), ndim u32, dims u32 each,
      raw float32 little-endian values in C order.

Unknown versions are rejected so stale readers fail loudly instead
of misparsing.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from voiceage.errors import FormatError

MAGIC = b"VANN"
VERSION = 1


def save_checkpoint_bytes(arrays: dict[str, np.ndarray]) -> bytes:
    chunks = [MAGIC, struct.pack("<II", VERSION, len(arrays))]
    for name, arr in arrays.items():
        data = np.ascontiguousarray(arr, dtype="<f4")
        encoded = name.encode("utf-8")
        chunks.append(struct.pack("<I", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack("<I", data.ndim))
        chunks.append(struct.pack(f"<{data.ndim}I", *data.shape))
        chunks.append(data.tobytes())
    return b"".join(chunks)


def load_checkpoint_bytes(blob: bytes) -> dict[str, np.ndarray]:
    if blob[:4] != MAGIC:
        raise FormatError("not a checkpoint: bad magic")
    version, count = struct.unpack_from("<II", blob, 4)
    if version != VERSION:
        raise FormatError(f"unsupported checkpoint version {version}")
    offset = 12
    arrays: dict[str, np.ndarray] = {}
    for _ in range(count):
        (name_len,) = struct.unpack_from("<I", blob, offset)
        offset += 4
        name = blob[offset : offset + name_len].decode("utf-8")
        offset += name_len
        (ndim,) = struct.unpack_from("<I", blob, offset)
        offset += 4
        dims = struct.unpack_from(f"<{ndim}I", blob, offset)
        offset += 4 * ndim
        size = int(np.prod(dims, dtype=np.int64)) if ndim else 1
        nbytes = 4 * size
        if offset + nbytes > len(blob):
            raise FormatError("checkpoint truncated")
        arr = np.frombuffer(blob, dtype="<f4", count=size, offset=offset).reshape(dims)
        arrays[name] = arr.astype(np.float32)
        offset += nbytes
    return arrays


def save_checkpoint(path: str | Path, arrays: dict[str, np.ndarray]) -> None:
    Path(path).write_bytes(save_checkpoint_bytes(arrays))


def load_checkpoint(path: str | Path) -> dict[str, np.ndarray]:
    return load_checkpoint_bytes(Path(path).read_bytes())
