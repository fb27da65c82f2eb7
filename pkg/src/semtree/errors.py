"""Exception types shared across the library."""


class SemtreeError(Exception):
    """Base class for every error raised by this library."""


class CyclicTaxonomy(SemtreeError):
    """The parent relation contains a cycle, so it is not a forest."""


class MultipleParents(SemtreeError):
    """A class was assigned more than one parent under the strict policy."""


class DanglingEdge(SemtreeError):
    """An edge references a parent id that was never declared."""


class EdgeListError(SemtreeError):
    """Malformed edge-list input: bad line, duplicate edge, or id gaps."""


class ShapeError(SemtreeError):
    """Array dimensions do not agree with the encoding or with each other."""


class LabelError(SemtreeError):
    """A label lies outside the class range."""

    def __init__(self, batch_index: int, value: int, num_classes: int):
        self.batch_index = batch_index
        self.value = value
        self.num_classes = num_classes
        super().__init__(
            f"label {value} at batch index {batch_index} is outside "
            f"[0, {num_classes})"
        )


class UnsupportedMaskValue(SemtreeError):
    """The requested operation is undefined for this masking value."""


class InconsistentRow(SemtreeError):
    """A training row disagrees with its own label."""


class CorruptEncoding(SemtreeError):
    """An encoding-derived tensor violates structural guarantees."""


class ParameterError(SemtreeError):
    """A parameter value is outside its documented domain."""


class FormatError(SemtreeError):
    """A serialized stream is malformed, truncated, or fails invariants."""


class InsufficientMemory(SemtreeError):
    """An operation would need more memory than is available."""
