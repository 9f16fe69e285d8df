"""Binary residual dataset format (GBSR) and the in-memory dataset type.

File layout, little-endian throughout:

    magic   4 bytes  b"GBSR"
    version u8       1
    N       u16      block size
    M       u32      block count
    samples M*N*N x i16, row-major per block
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import DatasetFormatError, EmptyDatasetError, InconsistentBlockSizeError

MAGIC = b"GBSR"
VERSION = 1
_HEADER = struct.Struct("<4sBHI")


@dataclass(frozen=True)
class ResidualDataset:
    """M residual blocks of size N x N."""

    blocks: np.ndarray  # (M, N, N), float64

    def __post_init__(self):
        self.blocks.setflags(write=False)

    @property
    def block_count(self) -> int:
        return self.blocks.shape[0]

    @property
    def block_size(self) -> int:
        return self.blocks.shape[1]


def make_dataset(blocks: np.ndarray) -> ResidualDataset:
    blocks = np.asarray(blocks, dtype=float)
    if blocks.ndim != 3 or blocks.shape[0] == 0:
        raise EmptyDatasetError(f"expected a nonempty (M, N, N) array, got shape {blocks.shape}")
    if blocks.shape[1] != blocks.shape[2]:
        raise InconsistentBlockSizeError(f"blocks must be square, got shape {blocks.shape}")
    return ResidualDataset(blocks=blocks)


def write_gbsr(path, dataset: ResidualDataset) -> None:
    samples = np.rint(dataset.blocks).astype(np.int64)
    if samples.min() < -32768 or samples.max() > 32767:
        raise DatasetFormatError("residual samples do not fit in i16")
    with open(path, "wb") as f:
        f.write(_HEADER.pack(MAGIC, VERSION, dataset.block_size, dataset.block_count))
        f.write(samples.astype("<i2").tobytes())


def read_gbsr(path) -> ResidualDataset:
    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) < _HEADER.size:
        raise DatasetFormatError("file shorter than the GBSR header")
    magic, version, n, m = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise DatasetFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise DatasetFormatError(f"unsupported format version {version}")
    if n < 2 or m < 1:
        raise DatasetFormatError(f"inadmissible header: N={n}, M={m}")
    expected = _HEADER.size + 2 * m * n * n
    if len(raw) != expected:
        raise DatasetFormatError(f"expected {expected} bytes, file has {len(raw)}")
    samples = np.frombuffer(raw, dtype="<i2", offset=_HEADER.size)
    return ResidualDataset(blocks=samples.astype(float).reshape(m, n, n))
