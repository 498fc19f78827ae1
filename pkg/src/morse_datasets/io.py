"""Dataset files and CSV export.

Binary layout, all integers little-endian::

    magic        8 bytes   b"MORSEDS1"
    n_features   u32
    n_classes    u32
    n_samples    u64
    per_class    u32       0 if the class counts are not uniform
    digest       32 bytes  SHA-256 of the generating config
    body         n_samples x (label u16, n_features x u16 thousandths)
    footer       ceil(n_samples/8) bytes, test-membership bitset (LSB first)

The generating config is written next to the file as ``<path>.config.json``
and checked against the digest on load.
"""

from __future__ import annotations

import csv
import os
import struct
from pathlib import Path

import numpy as np

from .generator import Dataset, GenerationConfig

MAGIC = b"MORSEDS1"
_HEADER = struct.Struct("<8sIIQI32s")
MAX_FEATURES = 65535


class DatasetFileError(ValueError):
    pass


class CorruptFileError(DatasetFileError):
    def __init__(self, section: str, detail: str = ""):
        self.section = section
        super().__init__(f"corrupt dataset file: {section} section " + (detail or "is truncated"))


class BadMagicError(DatasetFileError):
    pass


class BoundsViolationError(DatasetFileError):
    pass


def config_sidecar(path) -> Path:
    return Path(str(path) + ".config.json")


def _body_dtype(n_features: int) -> np.dtype:
    return np.dtype([("label", "<u2"), ("values", "<u2", (n_features,))])


def encode_dataset(dataset: Dataset) -> bytes:
    n = dataset.n_features
    if n > MAX_FEATURES:
        raise OverflowError(f"{n} features do not fit the u16 layout (max {MAX_FEATURES})")
    if dataset.n_classes > MAX_FEATURES + 1:
        raise OverflowError("too many classes for u16 labels")
    digest = dataset.config_digest or bytes(32)
    header = _HEADER.pack(MAGIC, n, dataset.n_classes, len(dataset), dataset.per_class or 0, digest)
    body = np.empty(len(dataset), dtype=_body_dtype(n))
    body["label"] = dataset.y
    body["values"] = dataset.thousandths()
    footer = np.packbits(dataset.is_test, bitorder="little")
    return header + body.tobytes() + footer.tobytes()


def decode_dataset(data: bytes, config: GenerationConfig | None = None) -> Dataset:
    if len(data) < 8:
        raise CorruptFileError("header")
    if data[:8] != MAGIC:
        raise BadMagicError(f"bad magic {data[:8]!r}, expected {MAGIC!r}")
    if len(data) < _HEADER.size:
        raise CorruptFileError("header")
    _, n_features, n_classes, n_samples, per_class, digest = _HEADER.unpack_from(data)
    dt = _body_dtype(n_features)
    body_end = _HEADER.size + n_samples * dt.itemsize
    footer_end = body_end + (n_samples + 7) // 8
    if len(data) < body_end:
        raise CorruptFileError("body", f"holds {len(data) - _HEADER.size} of {body_end - _HEADER.size} bytes")
    if len(data) < footer_end:
        raise CorruptFileError("footer")
    if len(data) > footer_end:
        raise CorruptFileError("footer", f"is followed by {len(data) - footer_end} unexpected bytes")
    body = np.frombuffer(data, dtype=dt, count=n_samples, offset=_HEADER.size)
    values = body["values"]
    if values.size and values.max() > 1000:
        raise BoundsViolationError(f"stored value {int(values.max())} exceeds 1000 thousandths")
    labels = body["label"].astype(np.int64)
    if labels.size and labels.max() >= n_classes:
        raise BoundsViolationError(f"label {int(labels.max())} out of range for {n_classes} classes")
    counts = np.bincount(labels, minlength=n_classes)
    if per_class and not (counts == per_class).all():
        raise CorruptFileError("header", "per-class count disagrees with the body")
    is_test = np.unpackbits(np.frombuffer(data, np.uint8, offset=body_end), count=n_samples,
                            bitorder="little").astype(bool)
    if config is not None and config.digest() != digest:
        raise DatasetFileError("config does not match the digest stored in the file")
    return Dataset(values / 1000.0, labels, is_test, config=config, n_classes=n_classes,
                   config_digest=digest)


def save_dataset(dataset: Dataset, path) -> None:
    path = Path(path)
    data = encode_dataset(dataset)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)
    side = config_sidecar(path)
    if dataset.config is not None:
        side.write_text(dataset.config.to_json() + "\n", encoding="utf-8")
    elif side.exists():
        side.unlink()


def load_dataset(path) -> Dataset:
    path = Path(path)
    side = config_sidecar(path)
    config = GenerationConfig.from_json(side.read_text("utf-8")) if side.exists() else None
    return decode_dataset(path.read_bytes(), config)


def export_csv(dataset: Dataset, path) -> None:
    """One row per sample: integer label, then values with three decimals."""
    n = dataset.n_features
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["label", *(f"f{i}" for i in range(n))])
        q = dataset.thousandths()
        for label, row in zip(dataset.y, q):
            w.writerow([int(label), *(f"{v // 1000}.{v % 1000:03d}" for v in row.tolist())])


def read_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`export_csv`: ``(X, y)``."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 1:], data[:, 0].astype(np.int64)
