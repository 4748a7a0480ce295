"""Dependence-aware code change representations for commit message generation."""

from .differ import ChangeSet, align_versions, lcs_pairs
from .encoder import ContextEncodedRepresentation, encode_change, encode_surrounding, truncate
from .metrics import MetricReport, bleu4, meteor, rouge_l, tokenize_message
from .model import MethodUnit, SourceVersion, Statement
from .parser import build_version, parse_file, segment_statements
from .pdg import ProgramDependenceGraph, build_pdg
from .pipeline import analyze, represent
from .slicer import SliceConfig, slice, slice_distances

__all__ = [
    "ChangeSet", "ContextEncodedRepresentation", "MethodUnit", "MetricReport", "ProgramDependenceGraph",
    "SliceConfig", "SourceVersion", "Statement", "align_versions", "analyze", "bleu4", "build_pdg",
    "build_version", "encode_change", "encode_surrounding", "lcs_pairs", "meteor", "parse_file",
    "represent", "rouge_l", "segment_statements", "slice", "slice_distances", "tokenize_message", "truncate",
]
__version__ = "0.1.0"
