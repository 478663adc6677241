"""OWX bytes in, proto text out."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

from .config import TranslateConfig
from .diagnostics import Diagnostic, Owx2ProtoError
from .emit import EmitConfig, emit
from .owx import OntologyDocument, parse_owx
from .proto_ast import ProtoFile
from .translate import translate


class PreviousOutputError(Owx2ProtoError):
    pass


@dataclass
class Generated:
    document: OntologyDocument
    ast: ProtoFile
    text: str
    diagnostics: List[Diagnostic]

    @property
    def class_count(self) -> int:
        return sum(1 for m in self.ast.messages if m.class_options is not None)

    @property
    def message_count(self) -> int:
        return len(self.ast.messages)

    @property
    def field_count(self) -> int:
        return sum(1 for m in self.ast.messages for _ in m.all_fields())

    @property
    def collisions(self) -> int:
        return sum(1 for d in self.diagnostics if d.code == "HASH_COLLISION")


def parse_previous(text: str) -> ProtoFile:
    from .check import check_text

    ast, diags = check_text(text)
    errors = [d for d in diags if d.is_error]
    if errors:
        raise PreviousOutputError(errors)
    return ast


def generate(
    source: bytes,
    config: Optional[TranslateConfig] = None,
    previous: Optional[str] = None,
    emit_config: EmitConfig = EmitConfig(),
) -> Generated:
    """Parse, translate, number and emit one ontology.

    ``previous`` is the text of the last generated file; only the ledger
    strategy reads it.
    """
    config = config or TranslateConfig()
    document, diags = parse_owx(source)
    prev_ast = parse_previous(previous) if previous is not None and config.strategy == "ledger" else None
    ast, notes = translate(document, config, prev_ast)
    return Generated(document, ast, emit(ast, emit_config), diags + notes)
