"""Translate OWL 2 ontologies (OWL/XML) into annotated proto3 schemas."""

from .check import check_text, compare_numbering, extract_ontology, parse_proto, validate
from .config import TranslateConfig, load_config
from .diagnostics import Diagnostic, Owx2ProtoError
from .emit import EmitConfig, emit, emit_options_file
from .numbering import FieldIdentity, assign_numbers_hash, assign_numbers_ledger, hash_number
from .owx import OntologyDocument, parse_owx, parse_owx_file
from .pipeline import generate
from .translate import translate
from .xxh32 import xxh32

__all__ = [
    "Diagnostic", "EmitConfig", "FieldIdentity", "OntologyDocument", "Owx2ProtoError",
    "TranslateConfig", "assign_numbers_hash", "assign_numbers_ledger", "check_text",
    "compare_numbering", "emit", "emit_options_file", "extract_ontology", "generate",
    "hash_number", "load_config", "parse_owx", "parse_owx_file", "parse_proto", "translate",
    "validate", "xxh32",
]
