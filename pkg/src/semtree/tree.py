"""Dense two-matrix encoding of a class forest.

A forest of ``n`` classes whose longest root-to-class path touches ``L``
depth levels is stored as two matrices, built once and reused for every
batched transform:

* ``masks``, boolean ``(L, n)``: ``masks[l, c]`` is True when class ``c``
  is excluded from depth level ``l``. Each class is unmasked in exactly
  one level row, the row of its own depth.
* ``paths``, int32 ``(n, L)``: row ``c`` holds the classes on the path
  from a root down to ``c``, right-padded with ``PAD``.

Class ids are 0-based in memory. File formats and CLI output show them
1-based; ``display_ids`` / ``from_display`` convert between the two.
"""

import struct
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np

from .errors import CyclicTaxonomy, FormatError, ParameterError

PAD = -1
NO_PARENT = -1

MAGIC = b"HTRE"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sHII")  # magic, version, num_classes, num_levels


@dataclass(frozen=True, eq=False)
class Taxonomy:
    """Parent-pointer form of a class forest.

    ``parents[c]`` is the parent of class ``c``, or ``NO_PARENT`` for a
    root. Acyclicity is checked by ``encode``, not on construction.
    """

    parents: np.ndarray

    def __post_init__(self):
        parents = np.ascontiguousarray(self.parents, dtype=np.int32)
        if parents.ndim != 1:
            raise ParameterError("parents must be a 1-d integer array")
        n = parents.size
        if n == 0:
            raise ParameterError("taxonomy must declare at least one class")
        bad = (parents < NO_PARENT) | (parents >= n)
        if bad.any():
            c = int(np.argmax(bad))
            raise ParameterError(
                f"parent {int(parents[c])} of class {c + 1} is not a class id"
            )
        object.__setattr__(self, "parents", parents)
        parents.flags.writeable = False

    @property
    def num_classes(self) -> int:
        return self.parents.size

    def __eq__(self, other):
        if not isinstance(other, Taxonomy):
            return NotImplemented
        return np.array_equal(self.parents, other.parents)


@dataclass(frozen=True, eq=False)
class TreeEncoding:
    """Immutable encoded forest: the mask and path matrices plus metadata.

    Arrays are marked read-only so an encoding can be shared freely
    across threads.
    """

    num_classes: int
    num_levels: int
    masks: np.ndarray  # bool (num_levels, num_classes), True = excluded
    paths: np.ndarray  # int32 (num_classes, num_levels), PAD-terminated rows
    level_of: np.ndarray  # int32 (num_classes,), depth of each class

    pad_value: ClassVar[int] = PAD

    def __post_init__(self):
        masks = np.ascontiguousarray(self.masks, dtype=bool)
        paths = np.ascontiguousarray(self.paths, dtype=np.int32)
        level_of = np.ascontiguousarray(self.level_of, dtype=np.int32)
        n, L = self.num_classes, self.num_levels
        if masks.shape != (L, n) or paths.shape != (n, L) or level_of.shape != (n,):
            raise ParameterError(
                f"inconsistent encoding shapes: masks {masks.shape}, "
                f"paths {paths.shape}, level_of {level_of.shape} "
                f"for {n} classes and {L} levels"
            )
        for name, arr in (("masks", masks), ("paths", paths), ("level_of", level_of)):
            object.__setattr__(self, name, arr)
            arr.flags.writeable = False

    def __eq__(self, other):
        if not isinstance(other, TreeEncoding):
            return NotImplemented
        return (
            self.num_classes == other.num_classes
            and self.num_levels == other.num_levels
            and np.array_equal(self.masks, other.masks)
            and np.array_equal(self.paths, other.paths)
            and np.array_equal(self.level_of, other.level_of)
        )


@dataclass(frozen=True)
class Violation:
    """One broken invariant. Indices are 0-based; messages show 1-based ids."""

    kind: str
    where: tuple[int, ...]
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def lines(self) -> list[str]:
        return [v.message for v in self.violations]


def class_depths(parents: np.ndarray) -> np.ndarray:
    """Depth of every class (roots are depth 0).

    Raises ``CyclicTaxonomy`` if following parent pointers ever loops.
    """
    n = parents.size
    depth = np.full(n, -1, dtype=np.int32)
    par = parents.tolist()
    for start in range(n):
        if depth[start] != -1:
            continue
        chain = []
        node = start
        while node != NO_PARENT and depth[node] == -1:
            depth[node] = -2  # on the chain currently being walked
            chain.append(node)
            node = par[node]
        if node != NO_PARENT and depth[node] == -2:
            raise CyclicTaxonomy(f"cycle through class {node + 1}")
        d = 0 if node == NO_PARENT else int(depth[node]) + 1
        for c in reversed(chain):
            depth[c] = d
            d += 1
    return depth


def encode(taxonomy: Taxonomy) -> TreeEncoding:
    """Build the mask and path matrices for a forest.

    Deterministic: the same taxonomy always yields a bit-identical
    encoding, and class order is preserved from the input.
    """
    parents = taxonomy.parents
    n = parents.size
    level_of = class_depths(parents)
    num_levels = int(level_of.max()) + 1

    masks = np.ones((num_levels, n), dtype=bool)
    masks[level_of, np.arange(n)] = False

    # Each class's path row is its parent's row plus itself, so fill rows
    # in order of increasing depth and copy whole groups at a time.
    paths = np.full((n, num_levels), PAD, dtype=np.int32)
    for d in range(num_levels):
        group = np.nonzero(level_of == d)[0]
        if d > 0:
            paths[group] = paths[parents[group]]
        paths[group, d] = group

    return TreeEncoding(
        num_classes=n,
        num_levels=num_levels,
        masks=masks,
        paths=paths,
        level_of=level_of,
    )


def recover_parents(enc: TreeEncoding) -> np.ndarray:
    """Parent of each class as implied by the path matrix (NO_PARENT for roots)."""
    n = enc.num_classes
    parents = np.full(n, NO_PARENT, dtype=np.int32)
    deep = enc.level_of > 0
    rows = np.nonzero(deep)[0]
    parents[rows] = enc.paths[rows, enc.level_of[rows] - 1]
    return parents


def validate(enc: TreeEncoding) -> ValidationReport:
    """Check every structural invariant of an encoding.

    Returns a report listing one violation per offending index; an empty
    report means the encoding is valid. Never raises on bad content.
    """
    report = ValidationReport()
    add = report.violations.append
    n, L = enc.num_classes, enc.num_levels
    masks, paths, level_of = enc.masks, enc.paths, enc.level_of

    # Levels must be plausible before they can be used as indices below.
    level_ok = (level_of >= 0) & (level_of < L)
    for c in np.nonzero(~level_ok)[0]:
        add(
            Violation(
                "level-range",
                (int(c),),
                f"class {c + 1} has depth {int(level_of[c])}, outside [0, {L})",
            )
        )
    if not report.ok:
        return report

    # Each class unmasked in exactly one level row, the row of its depth.
    unmask_counts = (~masks).sum(axis=0)
    for c in np.nonzero(unmask_counts != 1)[0]:
        add(
            Violation(
                "unmask-count",
                (int(c),),
                f"class {c + 1} is unmasked in {int(unmask_counts[c])} "
                f"level rows, expected exactly 1",
            )
        )
    wrong_level = masks[level_of, np.arange(n)]
    for c in np.nonzero(wrong_level)[0]:
        add(
            Violation(
                "level-mismatch",
                (int(c),),
                f"class {c + 1} is masked at its own depth level "
                f"{int(level_of[c]) + 1}",
            )
        )

    # Path rows: real prefix of valid ids, PAD tail, class as last real entry.
    cols = np.arange(L)[None, :]
    real = cols <= level_of[:, None]
    in_range = (paths >= 0) & (paths < n)
    for c, l in zip(*np.nonzero(real & ~in_range)):
        add(
            Violation(
                "path-range",
                (int(c), int(l)),
                f"path row {c + 1} has non-class entry {int(paths[c, l])} "
                f"at level {l + 1}",
            )
        )
    for c, l in zip(*np.nonzero(~real & (paths != PAD))):
        add(
            Violation(
                "path-pad-tail",
                (int(c), int(l)),
                f"path row {c + 1} should be padding from level "
                f"{int(level_of[c]) + 2} on, found {int(paths[c, l])} "
                f"at level {l + 1}",
            )
        )
    endpoint = paths[np.arange(n), level_of]
    for c in np.nonzero(endpoint != np.arange(n))[0]:
        add(
            Violation(
                "path-endpoint",
                (int(c),),
                f"path row {c + 1} ends in {int(endpoint[c]) + 1} "
                f"instead of the class itself",
            )
        )

    # Prefix property: a path is its parent's path plus the class itself.
    deep = np.nonzero(level_of > 0)[0]
    prefix_ok = np.ones(n, dtype=bool)
    if deep.size:
        par = paths[deep, level_of[deep] - 1]
        par_valid = (par >= 0) & (par < n)
        for c in deep[~par_valid]:
            prefix_ok[c] = False  # already reported as path-range
        good = deep[par_valid]
        par = par[par_valid].astype(np.intp)
        depth_ok = level_of[par] == level_of[good] - 1
        # Compare the shared prefix of each (child, parent) row pair.
        shared = cols < level_of[good][:, None]
        rows_equal = np.all(~shared | (paths[good] == paths[par]), axis=1)
        for c, p in zip(good[~(depth_ok & rows_equal)], par[~(depth_ok & rows_equal)]):
            prefix_ok[c] = False
            add(
                Violation(
                    "prefix",
                    (int(c), int(p)),
                    f"path row {c + 1} does not extend the path of its "
                    f"parent {p + 1}",
                )
            )

    # Depth-partition validity: no two unmasked classes in one level row
    # may lie on the same ancestral path.
    for l in range(L):
        members = np.nonzero(~masks[l])[0]
        if members.size == 0:
            continue
        in_row = ~masks[l]
        sub = paths[members]
        strict = cols < level_of[members][:, None]
        entry_ok = strict & (sub >= 0) & (sub < n)
        hits = np.zeros_like(entry_ok)
        hits[entry_ok] = in_row[sub[entry_ok]]
        for i, j in zip(*np.nonzero(hits)):
            a, b = int(sub[i, j]), int(members[i])
            add(
                Violation(
                    "shared-path",
                    (l, a, b),
                    f"classes {a + 1} and {b + 1} lie on one ancestral "
                    f"path but are both unmasked at level {l + 1}",
                )
            )

    return report


def storage_bytes(enc: TreeEncoding, s_bool: int, s_int: int) -> int:
    """Closed-form byte count of the two matrices at the given element sizes."""
    if s_bool <= 0 or s_int <= 0:
        raise ParameterError("element sizes must be positive")
    return (s_bool + s_int) * enc.num_levels * enc.num_classes


def measured_bytes(enc: TreeEncoding) -> int:
    """Bytes actually owned by the encoding's buffers."""
    return enc.masks.nbytes + enc.paths.nbytes + enc.level_of.nbytes


def display_ids(a: np.ndarray, pad: int = PAD) -> np.ndarray:
    """Shift 0-based ids to the 1-based form used by files and the CLI."""
    a = np.asarray(a)
    return np.where(a == pad, pad, a + 1)


def from_display(a: np.ndarray, pad: int = PAD) -> np.ndarray:
    """Inverse of ``display_ids``."""
    a = np.asarray(a)
    return np.where(a == pad, pad, a - 1)


def serialize(enc: TreeEncoding) -> bytes:
    """Portable byte form: header, masks as 0/1 bytes, paths as 1-based i32."""
    header = _HEADER.pack(MAGIC, FORMAT_VERSION, enc.num_classes, enc.num_levels)
    masks = enc.masks.astype(np.uint8).tobytes()
    paths = display_ids(enc.paths).astype("<i4").tobytes()
    return header + masks + paths


def deserialize(data: bytes, check: bool = True) -> TreeEncoding:
    """Rebuild an encoding from its serialized form.

    With ``check`` (the default) the result must pass ``validate``;
    pass ``check=False`` to load a damaged encoding for inspection.
    """
    if len(data) < _HEADER.size:
        raise FormatError("truncated stream: missing header")
    magic, version, n, L = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"malformed header: expected magic {MAGIC!r}")
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported format version {version}")
    if n == 0 or L == 0:
        raise FormatError("malformed header: zero dimension")
    expected = _HEADER.size + L * n + n * L * 4
    if len(data) != expected:
        raise FormatError(
            f"stream holds {len(data)} bytes, expected {expected} "
            f"for {n} classes and {L} levels"
        )

    off = _HEADER.size
    raw_masks = np.frombuffer(data, dtype=np.uint8, count=L * n, offset=off)
    if (raw_masks > 1).any():
        raise FormatError("mask bytes must be 0 or 1")
    masks = raw_masks.reshape(L, n).astype(bool)
    off += L * n
    disk_paths = np.frombuffer(data, dtype="<i4", count=n * L, offset=off)
    disk_paths = disk_paths.reshape(n, L)
    bad = ~(((disk_paths >= 1) & (disk_paths <= n)) | (disk_paths == PAD))
    if bad.any():
        c, l = (int(x) for x in np.argwhere(bad)[0])
        raise FormatError(
            f"path entry {int(disk_paths[c, l])} at row {c + 1}, "
            f"level {l + 1} is neither a class id nor padding"
        )
    paths = from_display(disk_paths).astype(np.int32)
    # argmin over booleans finds each column's first unmasked row.
    level_of = np.argmin(masks, axis=0).astype(np.int32)

    enc = TreeEncoding(
        num_classes=int(n),
        num_levels=int(L),
        masks=masks,
        paths=paths,
        level_of=level_of,
    )
    if check:
        report = validate(enc)
        if not report.ok:
            raise FormatError(
                "stream decodes to an invalid encoding: "
                + report.violations[0].message
            )
    return enc
