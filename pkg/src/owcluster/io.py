"""Embedding file formats.

Binary layout (little-endian, exact):
    bytes 0-3   magic "OWCL"
    bytes 4-5   version (uint16, currently 1)
    bytes 6-7   flags (uint16; bit 0 = labels section present)
    bytes 8-15  n (uint64)
    bytes 16-23 d (uint64)
    payload     n*d float32 values, row-major
    labels      n uint32 values (only when flagged)

CSV files hold one instance per row; with embedded labels the final column
is an integer class id.
"""

from __future__ import annotations

import csv
import os
import struct
from pathlib import Path

import numpy as np

from .errors import BadMagic, CsvParse, TruncatedFile, VersionUnsupported
from .model import EmbeddingMatrix, LabelVector

MAGIC = b"OWCL"
VERSION = 1
_HEADER = struct.Struct("<4sHHQQ")
FLAG_LABELS = 0x1


def write_embedding_file(path, X: EmbeddingMatrix, labels: LabelVector | None = None) -> None:
    """Write the binary format atomically (temp file + rename)."""
    X.validate()
    path = Path(path)
    flags = FLAG_LABELS if labels is not None else 0
    if labels is not None and labels.n != X.n:
        raise ValueError(f"labels length {labels.n} != n {X.n}")
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, flags, X.n, X.d))
        fh.write(np.ascontiguousarray(X.values, dtype="<f4").tobytes())
        if labels is not None:
            fh.write(labels.labels.astype("<u4").tobytes())
    os.replace(tmp, path)


def read_embedding_file(
    path, fmt: str = "auto", labels_mode: str = "embedded"
) -> tuple[EmbeddingMatrix, LabelVector | None]:
    """Read a binary or CSV embedding file.

    ``fmt`` is "owcl", "csv", or "auto" (sniff the magic bytes / extension).
    ``labels_mode`` "embedded" reads the labels section (binary) or final
    integer column (CSV) when present; "none" ignores labels.
    """
    path = Path(path)
    if fmt == "auto":
        if path.suffix.lower() == ".csv":
            fmt = "csv"
        elif path.suffix.lower() in (".owcl", ".bin"):
            fmt = "owcl"
        else:
            with open(path, "rb") as fh:
                head = fh.read(4)
            fmt = "owcl" if head == MAGIC else "csv"
    if fmt == "csv":
        return _read_csv(path, labels_mode)
    return _read_binary(path, labels_mode)


def _read_binary(path: Path, labels_mode: str):
    blob = path.read_bytes()
    if len(blob) < _HEADER.size:
        raise TruncatedFile(f"{path}: {len(blob)} bytes is smaller than the 24-byte header")
    magic, version, flags, n, d = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise BadMagic(f"{path}: magic {magic!r} != {MAGIC!r}")
    if version != VERSION:
        raise VersionUnsupported(f"{path}: version {version} not supported")
    has_labels = bool(flags & FLAG_LABELS)
    expected = _HEADER.size + 4 * n * d + (4 * n if has_labels else 0)
    if len(blob) != expected:
        raise TruncatedFile(f"{path}: expected exactly {expected} bytes, found {len(blob)}")
    values = np.frombuffer(blob, dtype="<f4", count=n * d, offset=_HEADER.size)
    X = EmbeddingMatrix(values.reshape(n, d).copy())
    labels = None
    if has_labels and labels_mode != "none":
        raw = np.frombuffer(blob, dtype="<u4", count=n, offset=_HEADER.size + 4 * n * d)
        labels = LabelVector.from_array(raw.astype(np.int64))
    return X, labels


def _read_csv(path: Path, labels_mode: str):
    rows: list[list[float]] = []
    label_col: list[int] = []
    with_labels = labels_mode == "embedded"
    with open(path, newline="") as fh:
        for r, row in enumerate(csv.reader(fh)):
            if not row or all(not c.strip() for c in row):
                continue
            if rows and len(row) != len(rows[0]) + (1 if with_labels else 0):
                raise CsvParse(r, len(row) - 1, "inconsistent column count")
            cells = row[:-1] if with_labels else row
            parsed = []
            for c, cell in enumerate(cells):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise CsvParse(r, c, f"not a number: {cell!r}") from None
            if with_labels:
                try:
                    label_col.append(int(row[-1]))
                except ValueError:
                    raise CsvParse(r, len(row) - 1, f"not an integer label: {row[-1]!r}") from None
            rows.append(parsed)
    if not rows:
        raise TruncatedFile(f"{path}: no data rows")
    X = EmbeddingMatrix.from_array(np.array(rows, dtype=np.float64))
    labels = LabelVector.from_array(label_col) if with_labels else None
    return X, labels


def read_labels_file(path) -> LabelVector:
    """One non-negative integer class id per line."""
    values = []
    with open(path) as fh:
        for r, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            try:
                values.append(int(line))
            except ValueError:
                raise CsvParse(r, 0, f"not an integer label: {line!r}") from None
    return LabelVector.from_array(values)
