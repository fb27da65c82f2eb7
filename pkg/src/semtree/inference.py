"""Decoding: per-level probabilities and path predictions over an encoded tree.

The per-level softmax treats each depth slice of a partitioned score
tensor as its own distribution; masked classes get probability exactly
zero. On top of that sit three decoders:

* ``naive_decode``: per-level argmax, ignores tree structure entirely,
  so the levels of one sample may disagree on the branch taken.
* ``beam_decode``: walks root to leaf keeping the ``k`` best partial
  paths; every visited node is a candidate endpoint, so shorter paths
  compete with full-depth ones. With ``k >= num_classes`` nothing is
  ever pruned and the result is the exhaustive ranking.
* ``levenshtein_decode``: repairs a naive sequence by ranking every
  valid ancestral path by edit distance to it.

Ties are broken in favor of the lexicographically smaller class
sequence throughout, so all decoders are deterministic.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    CorruptEncoding,
    LabelError,
    ParameterError,
    ShapeError,
    UnsupportedMaskValue,
)
from .tree import TreeEncoding, recover_parents
from .transforms import NEG_INF, PartitionedScores


@dataclass(frozen=True)
class LevelProbabilities:
    """Per-level distributions, shape (batch, num_levels, num_classes).

    Each (sample, level) slice sums to one over the classes of that
    level and is exactly zero elsewhere.
    """

    data: np.ndarray

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
class DecodedPath:
    """One ranked prediction: a root-to-node class sequence.

    ``score`` is the sum of per-level log probabilities (beam decoding),
    ``distance`` the edit distance to the naive sequence (levenshtein
    decoding); each decoder fills only its own field.
    """

    classes: tuple[int, ...]
    score: float | None = None
    distance: int | None = None


def softmax_levels(parts: PartitionedScores) -> LevelProbabilities:
    """Turn each depth slice into a probability distribution.

    Requires ``-inf`` or NaN masking: either drops out of the softmax
    exactly, whereas a finite fill would soak up probability mass.
    """
    mask_value = parts.mask_value
    if not (mask_value == NEG_INF or np.isnan(mask_value)):
        raise UnsupportedMaskValue(
            f"softmax needs -inf or NaN masking, got {mask_value!r}"
        )
    data = parts.data
    if np.isnan(mask_value):
        data = np.where(np.isnan(data), NEG_INF, data)
    live = (data > NEG_INF).any(axis=2)
    if not live.all():
        b, l = (int(x) for x in np.argwhere(~live)[0])
        raise CorruptEncoding(
            f"sample {b}, level {l + 1}: every class is masked out"
        )
    m = data.max(axis=2, keepdims=True)
    e = np.exp(data - m)
    probs = e / e.sum(axis=2, keepdims=True)
    return LevelProbabilities(data=probs)


def naive_decode(probs: LevelProbabilities) -> np.ndarray:
    """Most likely class per level, shape (batch, num_levels).

    The levels are decoded independently, so consecutive entries need
    not form a valid path. Ties go to the smaller class index.
    """
    return np.argmax(probs.data, axis=2).astype(np.int64)


def _children_lists(enc: TreeEncoding) -> list[list[int]]:
    parents = recover_parents(enc)
    children: list[list[int]] = [[] for _ in range(enc.num_classes)]
    for c in np.argsort(parents, kind="stable"):
        p = parents[c]
        if p >= 0:
            children[p].append(int(c))
    return children


def beam_decode(
    enc: TreeEncoding,
    probs: LevelProbabilities,
    k: int,
    *,
    length_normalize: bool = False,
) -> list[list[DecodedPath]]:
    """Top-k valid paths per sample by joint per-level log probability.

    A path's score is the sum of the log probabilities of its classes,
    each taken from the level slice of that class's depth; it is not
    normalized by length unless ``length_normalize`` is set. Every node
    reached by the beam counts as a candidate endpoint.
    """
    if k < 1:
        raise ParameterError(f"beam width must be at least 1, got {k}")
    if probs.data.ndim != 3 or probs.data.shape[1:] != (
        enc.num_levels,
        enc.num_classes,
    ):
        raise ShapeError(
            f"probabilities of shape {probs.data.shape} do not match an "
            f"encoding with {enc.num_classes} classes and "
            f"{enc.num_levels} levels"
        )
    children = _children_lists(enc)
    roots = [int(c) for c in np.nonzero(enc.level_of == 0)[0]]
    with np.errstate(divide="ignore"):
        logp = np.log(probs.data.astype(np.float64))

    results: list[list[DecodedPath]] = []
    for i in range(probs.batch_size):
        lp = logp[i]
        live = [(float(lp[0, r]), (r,)) for r in roots]
        pool = list(live)
        for level in range(1, enc.num_levels):
            if not live:
                break
            live.sort(key=lambda h: (-h[0], h[1]))
            del live[k:]
            grown = []
            for score, classes in live:
                for child in children[classes[-1]]:
                    grown.append((score + float(lp[level, child]), classes + (child,)))
            pool.extend(grown)
            live = grown
        if length_normalize:
            pool.sort(key=lambda h: (-h[0] / len(h[1]), h[1]))
        else:
            pool.sort(key=lambda h: (-h[0], h[1]))
        results.append(
            [DecodedPath(classes=classes, score=score) for score, classes in pool[:k]]
        )
    return results


def levenshtein(a, b) -> int:
    """Edit distance between two sequences, O(min(len)) memory."""
    a, b = list(a), list(b)
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        for j, y in enumerate(b, start=1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y))
        prev = cur
    return prev[len(b)]


def _distances_to_all_paths(
    seq: np.ndarray, paths: np.ndarray, widths: np.ndarray
) -> np.ndarray:
    """Edit distance from one sequence to every path row at once.

    Runs the standard DP with the candidate axis vectorized: each step
    is an elementwise minimum over all rows, and each row's distance is
    read off at its own width.
    """
    n, L = paths.shape
    m = seq.size
    table = np.tile(np.arange(L + 1, dtype=np.int32), (n, 1))
    for i in range(1, m + 1):
        prev = table
        table = np.empty_like(prev)
        table[:, 0] = i
        for j in range(1, L + 1):
            cost = (paths[:, j - 1] != seq[i - 1]).astype(np.int32)
            table[:, j] = np.minimum(
                np.minimum(prev[:, j] + 1, table[:, j - 1] + 1),
                prev[:, j - 1] + cost,
            )
    return table[np.arange(n), widths]


def levenshtein_decode(
    enc: TreeEncoding,
    naive: np.ndarray,
    k: int,
    *,
    probs: LevelProbabilities | None = None,
    exhaustive_limit: int = 1_000_000,
) -> list[list[DecodedPath]]:
    """Top-k valid paths per sample by edit distance to a naive sequence.

    Every ancestral path in the encoding is a candidate; ties on
    distance fall back to higher joint log probability when ``probs``
    is given, then to the lexicographically smaller sequence. The scan
    touches batch * num_classes candidate pairs and refuses batches
    beyond ``exhaustive_limit`` of them.
    """
    if k < 1:
        raise ParameterError(f"k must be at least 1, got {k}")
    naive = np.asarray(naive)
    if naive.ndim != 2 or naive.shape[1] != enc.num_levels:
        raise ShapeError(
            f"naive sequences of shape {naive.shape} do not match "
            f"{enc.num_levels} levels"
        )
    bad = (naive < 0) | (naive >= enc.num_classes)
    if bad.any():
        i = int(np.argwhere(bad)[0][0])
        raise LabelError(i, int(naive[i][np.argmax(bad[i])]), enc.num_classes)
    b = naive.shape[0]
    pairs = b * enc.num_classes
    if pairs > exhaustive_limit:
        raise ParameterError(
            f"{pairs} sequence pairs exceed the exhaustive scan limit of "
            f"{exhaustive_limit}"
        )
    if probs is not None and probs.data.shape != (b, enc.num_levels, enc.num_classes):
        raise ShapeError(
            f"probabilities of shape {probs.data.shape} do not match "
            f"{b} naive sequences over this encoding"
        )

    n, L = enc.num_classes, enc.num_levels
    widths = (enc.level_of + 1).astype(np.intp)
    real = np.arange(L)[None, :] < widths[:, None]
    if probs is not None:
        with np.errstate(divide="ignore"):
            logp = np.log(probs.data.astype(np.float64))

    results: list[list[DecodedPath]] = []
    for i in range(b):
        dist = _distances_to_all_paths(naive[i], enc.paths, widths)
        keys = [enc.paths[:, j] for j in range(L - 1, -1, -1)]
        if probs is not None:
            # Accumulate level by level so scores match beam decoding bit
            # for bit.
            score = np.zeros(n, dtype=np.float64)
            for d in range(L):
                on = real[:, d]
                score[on] += logp[i, d, enc.paths[on, d]]
            keys.append(-score)
        keys.append(dist)
        order = np.lexsort(keys)[:k]
        ranked = []
        for c in order:
            classes = tuple(int(x) for x in enc.paths[c, : widths[c]])
            ranked.append(
                DecodedPath(
                    classes=classes,
                    score=float(score[c]) if probs is not None else None,
                    distance=int(dist[c]),
                )
            )
        results.append(ranked)
    return results
