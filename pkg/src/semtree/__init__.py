"""Two-matrix encoding of class trees and the batched transforms over it."""

from .errors import (
    CorruptEncoding,
    CyclicTaxonomy,
    DanglingEdge,
    EdgeListError,
    FormatError,
    InconsistentRow,
    InsufficientMemory,
    LabelError,
    MultipleParents,
    ParameterError,
    SemtreeError,
    ShapeError,
    UnsupportedMaskValue,
)
from .tree import (
    NO_PARENT,
    PAD,
    Taxonomy,
    TreeEncoding,
    ValidationReport,
    Violation,
    class_depths,
    deserialize,
    display_ids,
    encode,
    from_display,
    measured_bytes,
    recover_parents,
    serialize,
    storage_bytes,
    validate,
)
from .transforms import (
    NEG_INF,
    FlatTrainingSet,
    LossResult,
    PartitionedScores,
    PathLabels,
    cross_entropy,
    flatten_for_training,
    map_labels,
    partition_scores,
)
from .inference import (
    DecodedPath,
    LevelProbabilities,
    beam_decode,
    levenshtein,
    levenshtein_decode,
    naive_decode,
    softmax_levels,
)
from .ingestion import (
    MultiParentResolution,
    ParsedTaxonomy,
    SyntheticTreeSpec,
    generate_synthetic,
    parse_edge_list,
    write_edge_list,
)
from .bench import BenchReport, run_bench

__version__ = "0.1.0"

__all__ = [
    "BenchReport",
    "CorruptEncoding",
    "CyclicTaxonomy",
    "DanglingEdge",
    "DecodedPath",
    "EdgeListError",
    "FlatTrainingSet",
    "FormatError",
    "InconsistentRow",
    "InsufficientMemory",
    "LabelError",
    "LevelProbabilities",
    "LossResult",
    "MultiParentResolution",
    "MultipleParents",
    "NEG_INF",
    "NO_PARENT",
    "PAD",
    "ParameterError",
    "ParsedTaxonomy",
    "PartitionedScores",
    "PathLabels",
    "SemtreeError",
    "ShapeError",
    "SyntheticTreeSpec",
    "Taxonomy",
    "TreeEncoding",
    "UnsupportedMaskValue",
    "ValidationReport",
    "Violation",
    "beam_decode",
    "class_depths",
    "cross_entropy",
    "deserialize",
    "display_ids",
    "encode",
    "flatten_for_training",
    "from_display",
    "generate_synthetic",
    "levenshtein",
    "levenshtein_decode",
    "map_labels",
    "measured_bytes",
    "naive_decode",
    "parse_edge_list",
    "partition_scores",
    "recover_parents",
    "run_bench",
    "serialize",
    "softmax_levels",
    "storage_bytes",
    "validate",
    "write_edge_list",
]
