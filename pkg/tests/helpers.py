"""Shared test data: the nine-class worked example and random forests."""

import numpy as np

from semtree import Taxonomy

# Two roots (1 and 2); 3 and 4 under 1; 5 and 6 under 2; 7, 8, 9 under 4.
# Stored 0-based, as the library wants it.
TOY_PARENTS = np.array([-1, -1, 0, 0, 1, 1, 3, 3, 3], dtype=np.int32)

TOY_MASKS = np.array(
    [
        [0, 0, 1, 1, 1, 1, 1, 1, 1],
        [1, 1, 0, 0, 0, 0, 1, 1, 1],
        [1, 1, 1, 1, 1, 1, 0, 0, 0],
    ],
    dtype=bool,
)

# 1-based, the way files and the CLI show paths.
TOY_PATHS_DISPLAY = np.array(
    [
        [1, -1, -1],
        [2, -1, -1],
        [1, 3, -1],
        [1, 4, -1],
        [2, 5, -1],
        [2, 6, -1],
        [1, 4, 7],
        [1, 4, 8],
        [1, 4, 9],
    ],
    dtype=np.int32,
)

TOY_EDGE_LINES = [
    "1",
    "2",
    "3\t1",
    "4\t1",
    "5\t2",
    "6\t2",
    "7\t4",
    "8\t4",
    "9\t4",
]


def random_taxonomy(rng, max_classes=1000, max_depth=8, shuffle=True):
    """Random forest with at most max_depth levels.

    Built parent-before-child, then optionally relabeled with a random
    permutation so children may carry smaller ids than their parents.
    """
    n = int(rng.integers(1, max_classes + 1))
    parents = np.full(n, -1, dtype=np.int64)
    depth = np.zeros(n, dtype=np.int64)
    for c in range(1, n):
        if rng.random() < 0.1:
            continue  # extra root
        p = int(rng.integers(0, c))
        if depth[p] + 1 > max_depth - 1:
            shallow = np.nonzero(depth[:c] < max_depth - 1)[0]
            if shallow.size == 0:
                continue
            p = int(shallow[rng.integers(shallow.size)])
        parents[c] = p
        depth[c] = depth[p] + 1
    if shuffle:
        perm = rng.permutation(n)
        relabeled = np.full(n, -1, dtype=np.int64)
        has_parent = parents >= 0
        relabeled[perm[has_parent]] = perm[parents[has_parent]]
        return Taxonomy(parents=relabeled)
    return Taxonomy(parents=parents)
