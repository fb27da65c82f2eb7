"""Batched transforms between flat classifier space and the level-partitioned one.

``partition_scores`` lifts a batch of flat score vectors ``(b, n)`` into a
``(b, L, n)`` tensor where slice ``l`` keeps exactly the scores of the
classes living at depth ``l`` and holds the mask value everywhere else.
``map_labels`` turns flat labels into ancestral path rows, and
``flatten_for_training`` collapses both into per-level training rows with
the padding rows dropped. ``cross_entropy`` then scores those rows
without the mask value ever poisoning the arithmetic.
"""

from dataclasses import dataclass
from typing import ClassVar, NamedTuple

import numpy as np

from .errors import (
    InconsistentRow,
    LabelError,
    ParameterError,
    ShapeError,
    UnsupportedMaskValue,
)
from .tree import PAD, TreeEncoding

NEG_INF = float("-inf")


def _check_mask_value(mask_value: float) -> float:
    mask_value = float(mask_value)
    if mask_value == float("inf"):
        raise UnsupportedMaskValue("+inf would dominate every masked softmax")
    return mask_value


@dataclass(frozen=True)
class PartitionedScores:
    """Scores arranged per depth level, shape (batch, num_levels, num_classes)."""

    data: np.ndarray
    mask_value: float = NEG_INF

    @property
    def batch_size(self) -> int:
        return self.data.shape[0]

    @property
    def num_levels(self) -> int:
        return self.data.shape[1]

    @property
    def num_classes(self) -> int:
        return self.data.shape[2]


@dataclass(frozen=True)
class PathLabels:
    """Ancestral path per sample, shape (batch, num_levels), PAD-terminated."""

    data: np.ndarray

    pad_value: ClassVar[int] = PAD

    @property
    def batch_size(self) -> int:
        return self.data.shape[0]

    @property
    def num_levels(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class FlatTrainingSet:
    """Per-level training rows with padding rows removed.

    ``origin[i] = (sample, level)`` records where row ``i`` came from,
    so losses can be traced back to the batch.
    """

    rows: np.ndarray  # (num_rows, num_classes)
    labels: np.ndarray  # (num_rows,) int64
    origin: np.ndarray  # (num_rows, 2) int64
    mask_value: float = NEG_INF

    @property
    def num_rows(self) -> int:
        return self.rows.shape[0]


class LossResult(NamedTuple):
    value: float
    per_row: np.ndarray


def partition_scores(
    enc: TreeEncoding, scores: np.ndarray, mask_value: float = NEG_INF
) -> PartitionedScores:
    """Expand flat scores (b, n) into per-level slices (b, L, n).

    Every score lands unchanged in the one slice owning its class; all
    other positions hold ``mask_value``. Integer input is promoted to
    float64, float input keeps its dtype.
    """
    mask_value = _check_mask_value(mask_value)
    scores = np.asarray(scores)
    if scores.ndim != 2:
        raise ShapeError(f"scores must be 2-d, got shape {scores.shape}")
    if scores.shape[1] != enc.num_classes:
        raise ShapeError(
            f"scores have {scores.shape[1]} columns, encoding has "
            f"{enc.num_classes} classes"
        )
    if not np.issubdtype(scores.dtype, np.floating):
        scores = scores.astype(np.float64)
    if not np.isfinite(scores).all():
        raise ParameterError("scores must be finite")
    data = np.where(enc.masks[None, :, :], mask_value, scores[:, None, :])
    return PartitionedScores(data=data, mask_value=mask_value)


def map_labels(enc: TreeEncoding, labels: np.ndarray) -> PathLabels:
    """Replace each flat label with its ancestral path row (b,) -> (b, L)."""
    labels = np.asarray(labels)
    if labels.ndim != 1:
        raise ShapeError(f"labels must be 1-d, got shape {labels.shape}")
    if not np.issubdtype(labels.dtype, np.integer):
        raise ShapeError(f"labels must be integers, got dtype {labels.dtype}")
    bad = (labels < 0) | (labels >= enc.num_classes)
    if bad.any():
        i = int(np.argmax(bad))
        raise LabelError(i, int(labels[i]), enc.num_classes)
    return PathLabels(data=enc.paths[labels].astype(np.int64))


def flatten_for_training(
    parts: PartitionedScores, path_labels: PathLabels
) -> FlatTrainingSet:
    """Collapse (b, L, n) scores and (b, L) path labels into training rows.

    Rows are laid out sample-major, level-minor; rows whose label is
    padding (the sample's path ended above that level) are dropped.
    """
    if parts.data.shape[:2] != path_labels.data.shape:
        raise ShapeError(
            f"partitioned scores {parts.data.shape[:2]} and path labels "
            f"{path_labels.data.shape} disagree on batch or levels"
        )
    b, L, n = parts.data.shape
    flat_rows = parts.data.reshape(b * L, n)
    flat_labels = path_labels.data.reshape(b * L)
    keep = np.nonzero(flat_labels != PathLabels.pad_value)[0]
    sample, level = np.divmod(keep, L)
    origin = np.column_stack((sample, level)).astype(np.int64)
    return FlatTrainingSet(
        rows=flat_rows[keep],
        labels=flat_labels[keep].astype(np.int64),
        origin=origin,
        mask_value=parts.mask_value,
    )


def cross_entropy(
    flat: FlatTrainingSet,
    mask_value: float = NEG_INF,
    reduction: str = "mean",
) -> LossResult:
    """Numerically stable cross entropy over the retained training rows.

    Only rows masked with ``-inf`` are supported: exp(-inf) is exactly
    zero, so excluded classes vanish from the normalizer with no special
    cases. The per-row losses and their mean (or sum) are returned.
    """
    mask_value = float(mask_value)
    if mask_value != NEG_INF:
        raise UnsupportedMaskValue(
            "loss requires -inf masking; NaN or finite fills would "
            "corrupt the normalizer"
        )
    if reduction not in ("mean", "sum"):
        raise ParameterError(f"unknown reduction {reduction!r}")
    if flat.num_rows == 0:
        raise ParameterError("cannot reduce a loss over zero rows")
    rows = flat.rows.astype(np.float64)
    labels = flat.labels
    if (labels < 0).any() or (labels >= rows.shape[1]).any():
        i = int(np.argmax((labels < 0) | (labels >= rows.shape[1])))
        raise LabelError(i, int(labels[i]), rows.shape[1])
    label_scores = rows[np.arange(rows.shape[0]), labels]
    if not np.isfinite(label_scores).all():
        i = int(np.argmax(~np.isfinite(label_scores)))
        raise InconsistentRow(
            f"row {i}: the labeled class {int(labels[i]) + 1} is masked out"
        )
    # Shift by the row max so exp never overflows; -inf entries drop out.
    m = rows.max(axis=1)
    lse = np.log(np.exp(rows - m[:, None]).sum(axis=1)) + m
    per_row = lse - label_scores
    if not np.isfinite(per_row).all():
        i = int(np.argmax(~np.isfinite(per_row)))
        raise InconsistentRow(f"row {i} produced a non-finite loss")
    value = per_row.mean() if reduction == "mean" else per_row.sum()
    return LossResult(value=float(value), per_row=per_row)
