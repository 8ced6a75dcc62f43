"""Join-size estimation and uniform join sampling over dyadic gap boxes."""

from .core import (
    LAMBDA,
    AxisBox,
    DyadicBox,
    JoinSchema,
    SchemaError,
    TableSchema,
    dyadic_contains_box,
    dyadic_contains_point,
    dyadic_to_axis,
    enumerate_containing_dyadic,
    lift_to_global,
)
from .estimator import (
    EmptyJoinError,
    Estimate,
    EstimatorConfig,
    estimate_join_size,
    is_join_row,
    sample_budget,
    sample_join_rows,
)
from .gapbox import build_index, construct_gap_boxes
from .ingest import DomainEncoding, Relation, build_encoding, encode_relation, load_tables
from .klee import BACKEND, draw_uniform_uncovered, measure, sample
from .trie import GapBoxIndex

__all__ = [
    "LAMBDA", "AxisBox", "DyadicBox", "JoinSchema", "SchemaError", "TableSchema",
    "dyadic_contains_box", "dyadic_contains_point", "dyadic_to_axis",
    "enumerate_containing_dyadic", "lift_to_global",
    "EmptyJoinError", "Estimate", "EstimatorConfig", "estimate_join_size", "is_join_row",
    "sample_budget", "sample_join_rows",
    "build_index", "construct_gap_boxes",
    "DomainEncoding", "Relation", "build_encoding", "encode_relation", "load_tables",
    "BACKEND", "draw_uniform_uncovered", "measure", "sample",
    "GapBoxIndex",
]
