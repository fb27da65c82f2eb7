"""Throughput and footprint measurements for the batched transforms.

``run_bench`` times ``partition_scores`` and ``map_labels`` on random
inputs over a given encoding and reports the median of several repeats
(one warm-up run is discarded). Optionally it also times pure-Python
reference implementations on a reduced batch so the vectorized speedup
can be judged without waiting minutes for the references, and a chunked
multi-threaded partition whose output is checked against the
single-shot one.
"""

import os
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InsufficientMemory, ParameterError, SemtreeError
from .transforms import NEG_INF, partition_scores, map_labels
from .tree import PAD, TreeEncoding, measured_bytes, recover_parents, storage_bytes

# Keep the pure-Python references from touching more than this many
# tensor elements; they are hundreds of times slower than the real code.
BASELINE_ELEMENT_BUDGET = 2_000_000


def scores_bytes(batch: int, num_classes: int) -> int:
    """Bytes of a flat float32 score batch."""
    return batch * num_classes * 4


def partitioned_bytes(batch: int, num_levels: int, num_classes: int) -> int:
    """Bytes of a partitioned float32 score tensor."""
    return batch * num_levels * num_classes * 4


def labels_bytes(batch: int) -> int:
    """Bytes of a flat int64 label batch."""
    return batch * 8


def path_labels_bytes(batch: int, num_levels: int) -> int:
    """Bytes of an int64 path label batch."""
    return batch * num_levels * 8


def partition_scores_baseline(enc: TreeEncoding, scores, mask_value=NEG_INF):
    """Per-element reference partition. Slow on purpose; small batches only."""
    levels = enc.level_of.tolist()
    out = []
    for row in scores.tolist():
        sample = []
        for l in range(enc.num_levels):
            sample.append(
                [row[c] if levels[c] == l else mask_value for c in range(len(row))]
            )
        out.append(sample)
    return out


def map_labels_baseline(enc: TreeEncoding, labels):
    """Per-sample reference label mapping via parent walks."""
    parents = recover_parents(enc).tolist()
    out = []
    for label in labels.tolist():
        path = []
        node = label
        while node != -1:
            path.append(node)
            node = parents[node]
        path.reverse()
        out.append(path + [PAD] * (enc.num_levels - len(path)))
    return out


@dataclass
class BenchReport:
    """Every number produced by one ``run_bench`` call."""

    num_classes: int
    num_levels: int
    batch_size: int
    reps: int
    scores_bytes: int
    partitioned_bytes: int
    labels_bytes: int
    path_labels_bytes: int
    encoding_bytes: int  # closed form at 1-byte bools, 8-byte ints
    encoding_bytes_in_memory: int
    partition_ns: int
    map_labels_ns: int
    baseline_batch_size: int
    baseline_partition_ns: Optional[int] = None
    baseline_map_labels_ns: Optional[int] = None
    parallel_partition_ns: Optional[int] = None

    def _pairs(self) -> list[tuple[str, str]]:
        ms = lambda ns: f"{ns / 1e6:.3f} ms"
        pairs = [
            ("classes", str(self.num_classes)),
            ("levels", str(self.num_levels)),
            ("batch", str(self.batch_size)),
            ("reps", str(self.reps)),
            ("scores bytes", str(self.scores_bytes)),
            ("partitioned bytes", str(self.partitioned_bytes)),
            ("labels bytes", str(self.labels_bytes)),
            ("path label bytes", str(self.path_labels_bytes)),
            ("encoding bytes", str(self.encoding_bytes)),
            ("encoding bytes in memory", str(self.encoding_bytes_in_memory)),
            ("partition median", ms(self.partition_ns)),
            ("map labels median", ms(self.map_labels_ns)),
        ]
        if self.baseline_partition_ns is not None:
            pairs += [
                ("baseline batch", str(self.baseline_batch_size)),
                ("baseline partition median", ms(self.baseline_partition_ns)),
                ("baseline map labels median", ms(self.baseline_map_labels_ns)),
            ]
        if self.parallel_partition_ns is not None:
            pairs.append(("parallel partition median", ms(self.parallel_partition_ns)))
        return pairs

    def as_table(self) -> str:
        pairs = self._pairs()
        width = max(len(k) for k, _ in pairs)
        return "\n".join(f"{k.ljust(width)}  {v}" for k, v in pairs)

    def as_kv(self) -> str:
        return "\n".join(
            f"{k}={v}" for k, v in vars(self).items() if v is not None
        )


def _available_bytes() -> Optional[int]:
    try:
        return os.sysconf("SC_AVPHYS_PAGES") * os.sysconf("SC_PAGE_SIZE")
    except (AttributeError, ValueError, OSError):
        return None


def _median_ns(fn, reps: int) -> int:
    fn()  # warm-up, excluded from the median
    times = []
    for _ in range(reps):
        t0 = time.perf_counter_ns()
        out = fn()
        times.append(time.perf_counter_ns() - t0)
        del out
    return int(statistics.median(times))


def run_bench(
    enc: TreeEncoding,
    batch_size: int,
    reps: int,
    *,
    seed: int = 0,
    baseline_batch_size: Optional[int] = None,
    parallel: bool = False,
) -> BenchReport:
    """Measure the batched transforms over one encoding.

    ``baseline_batch_size`` controls the pure-Python references: None
    picks the largest batch within ``BASELINE_ELEMENT_BUDGET`` tensor
    elements, 0 skips them. Raises ``InsufficientMemory`` up front when
    the score tensors cannot fit in available memory.
    """
    if reps < 3:
        raise ParameterError(f"need at least 3 repetitions for a median, got {reps}")
    if batch_size < 1:
        raise ParameterError(f"batch size must be positive, got {batch_size}")
    n, L = enc.num_classes, enc.num_levels
    # Peak is two partitioned tensors: the one being timed plus the one
    # from the previous repetition, freed only after the new allocation.
    required = scores_bytes(batch_size, n) + 2 * partitioned_bytes(batch_size, L, n)
    available = _available_bytes()
    if available is not None and required > available:
        raise InsufficientMemory(
            f"benchmark needs about {required:,} bytes of score tensors "
            f"but only {available:,} are available"
        )

    rng = np.random.default_rng(seed)
    try:
        scores = rng.standard_normal((batch_size, n), dtype=np.float32)
        labels = rng.integers(0, n, size=batch_size, dtype=np.int64)

        partition_ns = _median_ns(lambda: partition_scores(enc, scores), reps)
        map_labels_ns = _median_ns(lambda: map_labels(enc, labels), reps)

        if baseline_batch_size is None:
            baseline_batch_size = min(
                batch_size, max(1, BASELINE_ELEMENT_BUDGET // (L * n))
            )
        baseline_partition_ns = None
        baseline_map_labels_ns = None
        if baseline_batch_size > 0:
            baseline_batch_size = min(baseline_batch_size, batch_size)
            small = scores[:baseline_batch_size]
            small_labels = labels[:baseline_batch_size]
            baseline_partition_ns = _median_ns(
                lambda: partition_scores_baseline(enc, small), reps
            )
            baseline_map_labels_ns = _median_ns(
                lambda: map_labels_baseline(enc, small_labels), reps
            )
            vec = partition_scores(enc, small)
            ref = np.array(partition_scores_baseline(enc, small), dtype=vec.data.dtype)
            if not np.array_equal(vec.data, ref):
                raise SemtreeError("reference partition disagrees with the real one")
            ref_paths = np.array(map_labels_baseline(enc, small_labels))
            if not np.array_equal(map_labels(enc, small_labels).data, ref_paths):
                raise SemtreeError("reference label mapping disagrees with the real one")
            del vec, ref

        parallel_partition_ns = None
        if parallel:
            workers = min(4, max(2, os.cpu_count() or 1))
            chunks = np.array_split(scores, workers)

            def chunked():
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    parts = list(
                        pool.map(lambda c: partition_scores(enc, c).data, chunks)
                    )
                return np.concatenate(parts, axis=0)

            parallel_partition_ns = _median_ns(chunked, reps)
            if not np.array_equal(chunked(), partition_scores(enc, scores).data):
                raise SemtreeError("chunked partition disagrees with the single-shot one")
    except MemoryError as e:
        raise InsufficientMemory(
            f"benchmark ran out of memory for batch {batch_size} over "
            f"{n} classes and {L} levels"
        ) from e

    return BenchReport(
        num_classes=n,
        num_levels=L,
        batch_size=batch_size,
        reps=reps,
        scores_bytes=scores_bytes(batch_size, n),
        partitioned_bytes=partitioned_bytes(batch_size, L, n),
        labels_bytes=labels_bytes(batch_size),
        path_labels_bytes=path_labels_bytes(batch_size, L),
        encoding_bytes=storage_bytes(enc, 1, 8),
        encoding_bytes_in_memory=measured_bytes(enc),
        partition_ns=partition_ns,
        map_labels_ns=map_labels_ns,
        baseline_batch_size=baseline_batch_size,
        baseline_partition_ns=baseline_partition_ns,
        baseline_map_labels_ns=baseline_map_labels_ns,
        parallel_partition_ns=parallel_partition_ns,
    )
