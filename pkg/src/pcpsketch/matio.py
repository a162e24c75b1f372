"""Matrix files: text CSV and the binary PCPM container.

CSV is one matrix row per line, '.' decimal, 17 significant digits (enough
for exact float64 round trips), with an optional leading ``# n d`` comment.
The binary format is the 4-byte magic "PCPM", a little-endian u32 version
(currently 1), u64 row and column counts, then row-major float64 data.
Loading sniffs the magic, so either format can sit behind any extension;
saving picks the binary format for paths ending in .pcpm.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import InvalidInputError, InvalidMatrixError
from .linalg import as_matrix

__all__ = ["MAGIC", "VERSION", "load_matrix", "save_matrix", "load_csv", "save_csv", "load_binary", "save_binary"]

MAGIC = b"PCPM"
VERSION = 1
_HEADER = struct.Struct("<4sIQQ")


def save_binary(path, a) -> None:
    a = as_matrix(a)
    n, d = a.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, n, d))
        fh.write(np.ascontiguousarray(a, dtype="<f8").tobytes())


def load_binary(path) -> np.ndarray:
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) != _HEADER.size:
            raise InvalidInputError(f"{path}: truncated header")
        magic, version, n, d = _HEADER.unpack(header)
        if magic != MAGIC:
            raise InvalidInputError(f"{path}: bad magic {magic!r}")
        if version != VERSION:
            raise InvalidInputError(f"{path}: unsupported version {version}")
        data = fh.read()
    expected = 8 * n * d
    if len(data) < expected:
        raise InvalidInputError(f"{path}: expected {expected} data bytes, got {len(data)}")
    a = np.frombuffer(data[:expected], dtype="<f8").reshape(n, d)
    return as_matrix(a, str(path))


def save_csv(path, a) -> None:
    a = as_matrix(a)
    n, d = a.shape
    with open(path, "w") as fh:
        fh.write(f"# {n} {d}\n")
        for row in a:
            fh.write(",".join(f"{x:.17g}" for x in row))
            fh.write("\n")


def load_csv(path) -> np.ndarray:
    rows = []
    width = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                row = [float(x) for x in line.split(",")]
            except ValueError:
                raise InvalidInputError(f"{path}:{lineno}: unparseable row") from None
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise InvalidInputError(
                    f"{path}:{lineno}: row has {len(row)} values, expected {width}"
                )
            rows.append(row)
    if not rows:
        raise InvalidMatrixError(f"{path}: no data rows")
    return as_matrix(np.array(rows), str(path))


def save_matrix(path, a) -> None:
    """Write ``a`` to ``path``; .pcpm selects the binary format, else CSV."""
    if str(path).endswith(".pcpm"):
        save_binary(path, a)
    else:
        save_csv(path, a)


def load_matrix(path) -> np.ndarray:
    """Read a matrix, sniffing the binary magic regardless of extension."""
    p = Path(path)
    if not p.exists():
        raise InvalidInputError(f"{path}: no such file")
    with open(p, "rb") as fh:
        head = fh.read(4)
    if head == MAGIC:
        return load_binary(p)
    return load_csv(p)
