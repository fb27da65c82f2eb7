"""Reading, writing and generating class forests.

The on-disk form is a plain text edge list with 1-based class ids: a
line with a single id declares a root, a line with ``child parent``
declares an edge, ``#`` starts a comment. Ids must be contiguous from 1
so they can double as array indices.

``generate_synthetic`` builds trees of a requested size and depth for
benchmarks: a spine guarantees one class per level, every other class
attaches uniformly (or depth-biased) below it.
"""

import math
import os
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Union

import numpy as np

from .errors import (
    DanglingEdge,
    EdgeListError,
    MultipleParents,
    ParameterError,
)
from .tree import NO_PARENT, Taxonomy, class_depths


class MultiParentResolution(NamedTuple):
    """One dropped parent assignment (0-based ids, NO_PARENT for a root line)."""

    child: int
    kept: int
    dropped: int


class ParsedTaxonomy(NamedTuple):
    taxonomy: Taxonomy
    resolutions: tuple[MultiParentResolution, ...]


def parse_edge_list(
    source: Union[str, os.PathLike, Iterable[str]],
    policy: str = "first",
) -> ParsedTaxonomy:
    """Parse an edge list into a taxonomy.

    ``policy`` decides what happens when a class is assigned more than
    one parent: ``"first"`` keeps the earliest assignment and records
    the others, ``"reject"`` raises ``MultipleParents``. Exact duplicate
    lines are an error under either policy.
    """
    if policy not in ("first", "reject"):
        raise ParameterError(f"unknown multi-parent policy {policy!r}")
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8") as f:
            lines = f.readlines()
    else:
        lines = list(source)

    assignment: dict[int, int] = {}  # child id -> parent id, -1 for root
    order: list[int] = []
    parents_seen: set[int] = set()
    resolutions: list[MultiParentResolution] = []

    def parse_id(token: str, lineno: int) -> int:
        try:
            value = int(token)
        except ValueError:
            raise EdgeListError(
                f"line {lineno}: {token!r} is not an integer class id"
            ) from None
        if value < 1:
            raise EdgeListError(f"line {lineno}: class ids start at 1, got {value}")
        return value

    for lineno, raw in enumerate(lines, start=1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        if len(tokens) > 2:
            raise EdgeListError(
                f"line {lineno}: expected 'child parent' or a bare root id, "
                f"got {len(tokens)} fields"
            )
        child = parse_id(tokens[0], lineno)
        parent = parse_id(tokens[1], lineno) if len(tokens) == 2 else None
        key = -1 if parent is None else parent
        if child in assignment:
            if assignment[child] == key:
                raise EdgeListError(
                    f"line {lineno}: duplicate declaration of class {child}"
                )
            if policy == "reject":
                raise MultipleParents(
                    f"line {lineno}: class {child} already has "
                    f"{'a parent' if assignment[child] != -1 else 'a root line'}, "
                    f"cannot also assign "
                    f"{'parent ' + str(parent) if parent is not None else 'root'}"
                )
            resolutions.append(
                MultiParentResolution(
                    child=child - 1,
                    kept=assignment[child] - 1 if assignment[child] != -1 else NO_PARENT,
                    dropped=key - 1 if key != -1 else NO_PARENT,
                )
            )
            continue
        assignment[child] = key
        order.append(child)
        if parent is not None:
            parents_seen.add(parent)

    if not assignment:
        raise EdgeListError("edge list declares no classes")
    undeclared = parents_seen - assignment.keys()
    if undeclared:
        p = min(undeclared)
        child = next(c for c in order if assignment[c] == p)
        raise DanglingEdge(
            f"parent {p} of class {child} is never declared as a class"
        )
    n = len(assignment)
    if set(assignment) != set(range(1, n + 1)):
        missing = min(set(range(1, n + 1)) - set(assignment))
        raise EdgeListError(
            f"class ids must be contiguous from 1: {n} classes declared "
            f"but id {missing} is missing"
        )

    parents = np.full(n, NO_PARENT, dtype=np.int32)
    for child, key in assignment.items():
        if key != -1:
            parents[child - 1] = key - 1
    class_depths(parents)  # raises CyclicTaxonomy on a loop
    return ParsedTaxonomy(
        taxonomy=Taxonomy(parents=parents),
        resolutions=tuple(resolutions),
    )


def write_edge_list(taxonomy: Taxonomy, path: Union[str, os.PathLike]) -> None:
    """Write a taxonomy back out as a 1-based edge list."""
    parents = taxonomy.parents
    with open(path, "w", encoding="utf-8") as f:
        for c in range(taxonomy.num_classes):
            p = int(parents[c])
            if p == NO_PARENT:
                f.write(f"{c + 1}\n")
            else:
                f.write(f"{c + 1}\t{p + 1}\n")


@dataclass(frozen=True)
class SyntheticTreeSpec:
    """Shape of a generated forest.

    ``depth_bias`` skews where new classes attach: positive values favor
    deep parents, negative ones shallow parents, zero weighs every
    existing eligible class equally.
    """

    num_classes: int
    num_levels: int
    seed: int = 0
    depth_bias: float = 0.0


def generate_synthetic(spec: SyntheticTreeSpec) -> Taxonomy:
    """Generate a deterministic random tree with the requested dimensions.

    Classes ``0..num_levels-1`` form a spine with one class per level,
    so the encoding of the result always has exactly ``num_levels``
    levels; the rest attach at random to classes above the deepest
    level. Identical specs yield identical taxonomies.
    """
    n, L = spec.num_classes, spec.num_levels
    if n < 1 or L < 1:
        raise ParameterError("a synthetic tree needs at least one class and level")
    if n < L:
        raise ParameterError(
            f"cannot reach depth {L} with only {n} classes"
        )
    parents = np.full(n, NO_PARENT, dtype=np.int32)
    if L == 1:
        return Taxonomy(parents=parents)  # a forest of roots
    for d in range(1, L):
        parents[d] = d - 1

    rng = np.random.default_rng(spec.seed)
    # pools[d] holds the classes at depth d that may still take children
    # (only depths up to L-2 may, so no child ever exceeds depth L-1).
    pools: list[list[int]] = [[d] for d in range(L - 1)]
    factors = [math.exp(spec.depth_bias * d) for d in range(L - 1)]
    for c in range(L, n):
        weights = [len(pool) * f for pool, f in zip(pools, factors)]
        r = rng.random() * sum(weights)
        acc = 0.0
        d = L - 2
        for cand, w in enumerate(weights):
            acc += w
            if r < acc:
                d = cand
                break
        pool = pools[d]
        parents[c] = pool[int(rng.integers(len(pool)))]
        if d + 1 <= L - 2:
            pools[d + 1].append(c)
    return Taxonomy(parents=parents)
