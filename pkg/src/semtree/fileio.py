"""Binary and CSV file formats for the CLI surfaces.

All binary formats are little-endian, open with a four-byte magic plus
a u16 version, and are length-checked on read: a stream with trailing
or missing bytes is rejected rather than partially decoded. Class ids
on disk are 1-based with -1 as padding; every reader hands back the
0-based in-memory form.

Score and label files may also be CSV (picked by the ``.csv``
extension) for small batches; the binary formats have no size cap.
"""

import os
import struct
from typing import Union

import numpy as np

from .errors import FormatError, ShapeError
from .tree import PAD, TreeEncoding, deserialize, display_ids, from_display, serialize
from .transforms import NEG_INF, FlatTrainingSet, PartitionedScores, PathLabels

Pathish = Union[str, os.PathLike]

CSV_ELEMENT_CAP = 1_000_000

_SCORES = struct.Struct("<4sHII")  # magic, version, batch, classes
_LABELS = struct.Struct("<4sHI")  # magic, version, batch
_PATHS = struct.Struct("<4sHII")  # magic, version, batch, levels
_PART = struct.Struct("<4sHIIIBf")  # ..., batch, levels, classes, mode, fill
_FLAT = struct.Struct("<4sHIIBf")  # ..., rows, classes, mode, fill

_MODE_NEG_INF = 0
_MODE_NAN = 1
_MODE_SCALAR = 2


def _is_csv(path: Pathish) -> bool:
    return os.fspath(path).lower().endswith(".csv")


def _read_bytes(path: Pathish) -> bytes:
    with open(path, "rb") as f:
        return f.read()


def _unpack_header(header: struct.Struct, data: bytes, magic: bytes, path: Pathish):
    if len(data) < header.size:
        raise FormatError(f"{path}: truncated stream, missing header")
    fields = header.unpack_from(data)
    if fields[0] != magic:
        raise FormatError(f"{path}: expected magic {magic.decode()}")
    if fields[1] != 1:
        raise FormatError(f"{path}: unsupported format version {fields[1]}")
    return fields[2:]


def _check_length(data: bytes, expected: int, path: Pathish) -> None:
    if len(data) != expected:
        raise FormatError(
            f"{path}: stream holds {len(data)} bytes, expected {expected}"
        )


def _mask_mode(mask_value: float) -> tuple[int, float]:
    if mask_value == NEG_INF:
        return _MODE_NEG_INF, 0.0
    if np.isnan(mask_value):
        return _MODE_NAN, 0.0
    # Finite fills are stored as f32, matching the payload precision.
    return _MODE_SCALAR, float(np.float32(mask_value))


def _mask_value(mode: int, fill: float, path: Pathish) -> float:
    if mode == _MODE_NEG_INF:
        return NEG_INF
    if mode == _MODE_NAN:
        return float("nan")
    if mode == _MODE_SCALAR:
        return float(fill)
    raise FormatError(f"{path}: unknown mask mode {mode}")


# -- encodings ---------------------------------------------------------------


def write_encoding(enc: TreeEncoding, path: Pathish) -> None:
    with open(path, "wb") as f:
        f.write(serialize(enc))


def read_encoding(path: Pathish, check: bool = True) -> TreeEncoding:
    try:
        return deserialize(_read_bytes(path), check=check)
    except FormatError as e:
        raise FormatError(f"{path}: {e}") from None


# -- flat scores -------------------------------------------------------------


def write_scores(scores: np.ndarray, path: Pathish) -> None:
    scores = np.asarray(scores)
    if scores.ndim != 2:
        raise ShapeError(f"scores must be 2-d, got shape {scores.shape}")
    if _is_csv(path):
        if scores.size > CSV_ELEMENT_CAP:
            raise FormatError(
                f"CSV holds at most {CSV_ELEMENT_CAP} scores, "
                f"got {scores.size}; use the binary format"
            )
        np.savetxt(path, scores.astype(np.float32), fmt="%.9g", delimiter=",")
        return
    b, c = scores.shape
    with open(path, "wb") as f:
        f.write(_SCORES.pack(b"HTSB", 1, b, c))
        f.write(scores.astype("<f4").tobytes())


def read_scores(path: Pathish) -> np.ndarray:
    if _is_csv(path):
        try:
            scores = np.loadtxt(path, delimiter=",", dtype=np.float32, ndmin=2)
        except ValueError as e:
            raise FormatError(f"{path}: {e}") from None
        if scores.size > CSV_ELEMENT_CAP:
            raise FormatError(
                f"{path}: CSV holds at most {CSV_ELEMENT_CAP} scores, "
                f"got {scores.size}; use the binary format"
            )
        return scores
    data = _read_bytes(path)
    b, c = _unpack_header(_SCORES, data, b"HTSB", path)
    _check_length(data, _SCORES.size + b * c * 4, path)
    scores = np.frombuffer(data, dtype="<f4", count=b * c, offset=_SCORES.size)
    return scores.reshape(b, c).copy()


# -- flat labels -------------------------------------------------------------


def write_labels(labels: np.ndarray, path: Pathish) -> None:
    labels = np.asarray(labels)
    if labels.ndim != 1 or not np.issubdtype(labels.dtype, np.integer):
        raise ShapeError("labels must be a 1-d integer array")
    if (labels < 0).any():
        raise ShapeError("labels must be non-negative class ids")
    if _is_csv(path):
        np.savetxt(path, display_ids(labels), fmt="%d")
        return
    with open(path, "wb") as f:
        f.write(_LABELS.pack(b"HTLB", 1, labels.size))
        f.write(display_ids(labels).astype("<i8").tobytes())


def read_labels(path: Pathish) -> np.ndarray:
    if _is_csv(path):
        try:
            disk = np.loadtxt(path, dtype=np.int64, ndmin=1)
        except ValueError as e:
            raise FormatError(f"{path}: {e}") from None
    else:
        data = _read_bytes(path)
        (b,) = _unpack_header(_LABELS, data, b"HTLB", path)
        _check_length(data, _LABELS.size + b * 8, path)
        disk = np.frombuffer(data, dtype="<i8", count=b, offset=_LABELS.size)
    if (disk < 1).any():
        i = int(np.argmax(disk < 1))
        raise FormatError(
            f"{path}: label {int(disk[i])} at entry {i + 1} is not a "
            f"1-based class id"
        )
    return from_display(disk).astype(np.int64)


# -- path labels -------------------------------------------------------------


def write_path_labels(path_labels: PathLabels, path: Pathish) -> None:
    b, L = path_labels.data.shape
    with open(path, "wb") as f:
        f.write(_PATHS.pack(b"HTPL", 1, b, L))
        f.write(display_ids(path_labels.data).astype("<i8").tobytes())


def read_path_labels(path: Pathish) -> PathLabels:
    data = _read_bytes(path)
    b, L = _unpack_header(_PATHS, data, b"HTPL", path)
    _check_length(data, _PATHS.size + b * L * 8, path)
    disk = np.frombuffer(data, dtype="<i8", count=b * L, offset=_PATHS.size)
    disk = disk.reshape(b, L)
    bad = (disk < 1) & (disk != PAD)
    if bad.any():
        r, l = (int(x) for x in np.argwhere(bad)[0])
        raise FormatError(
            f"{path}: entry {int(disk[r, l])} at row {r + 1}, level {l + 1} "
            f"is neither a 1-based class id nor padding"
        )
    return PathLabels(data=from_display(disk).astype(np.int64))


# -- partitioned scores ------------------------------------------------------


def write_partitioned(parts: PartitionedScores, path: Pathish) -> None:
    b, L, c = parts.data.shape
    mode, fill = _mask_mode(parts.mask_value)
    with open(path, "wb") as f:
        f.write(_PART.pack(b"HTPT", 1, b, L, c, mode, fill))
        f.write(parts.data.astype("<f4").tobytes())


def read_partitioned(path: Pathish) -> PartitionedScores:
    data = _read_bytes(path)
    b, L, c, mode, fill = _unpack_header(_PART, data, b"HTPT", path)
    _check_length(data, _PART.size + b * L * c * 4, path)
    raw = np.frombuffer(data, dtype="<f4", count=b * L * c, offset=_PART.size)
    return PartitionedScores(
        data=raw.reshape(b, L, c).copy(),
        mask_value=_mask_value(mode, fill, path),
    )


# -- flat training sets ------------------------------------------------------


def write_flat(flat: FlatTrainingSet, path: Pathish) -> None:
    rows, c = flat.rows.shape
    mode, fill = _mask_mode(flat.mask_value)
    with open(path, "wb") as f:
        f.write(_FLAT.pack(b"HTFT", 1, rows, c, mode, fill))
        f.write(flat.rows.astype("<f4").tobytes())
        f.write(display_ids(flat.labels).astype("<i8").tobytes())
        f.write(flat.origin.astype("<i8").tobytes())


def read_flat(path: Pathish) -> FlatTrainingSet:
    data = _read_bytes(path)
    rows, c, mode, fill = _unpack_header(_FLAT, data, b"HTFT", path)
    expected = _FLAT.size + rows * c * 4 + rows * 8 + rows * 2 * 8
    _check_length(data, expected, path)
    off = _FLAT.size
    raw = np.frombuffer(data, dtype="<f4", count=rows * c, offset=off)
    off += rows * c * 4
    disk_labels = np.frombuffer(data, dtype="<i8", count=rows, offset=off)
    off += rows * 8
    origin = np.frombuffer(data, dtype="<i8", count=rows * 2, offset=off)
    bad = disk_labels < 1
    if bad.any():
        i = int(np.argmax(bad))
        raise FormatError(
            f"{path}: label {int(disk_labels[i])} at row {i + 1} is not a "
            f"1-based class id"
        )
    if (origin < 0).any():
        raise FormatError(f"{path}: negative origin index")
    return FlatTrainingSet(
        rows=raw.reshape(rows, c).copy(),
        labels=from_display(disk_labels).astype(np.int64),
        origin=origin.reshape(rows, 2).copy(),
        mask_value=_mask_value(mode, fill, path),
    )
