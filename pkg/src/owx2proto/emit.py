"""Canonical proto3 text for a :class:`ProtoFile`, plus the OWL options file."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

from .diagnostics import Owx2ProtoError
from .proto_ast import Field, Message, ProtoFile

HEADER = "// Generated by owx2proto from an OWL ontology. DO NOT EDIT."

OPTIONS_FILE = '''\
syntax = "proto3";

package owl;

import "google/protobuf/descriptor.proto";

message EntityEntry {
  string iri = 1;
  repeated string parent = 2;
}
message PropertyEntry {
  string iri = 1;
  repeated string parent = 2;
  string class_iri = 3;
}
message PrefixEntry {
  string prefix = 1;
  string iri = 2;
}
message Meta {
  repeated PrefixEntry prefixes = 1;
}
extend google.protobuf.MessageOptions {
  optional EntityEntry class = 50000;
}
extend google.protobuf.FieldOptions {
  optional PropertyEntry property = 50000;
}
extend google.protobuf.FileOptions {
  optional Meta meta = 50000;
}
'''


class EmitError(Owx2ProtoError):
    pass


@dataclass(frozen=True)
class EmitConfig:
    indent: int = 2
    header: bool = True

    def __post_init__(self):
        if self.indent not in (2, 4):
            raise ValueError("indent must be 2 or 4")


def quote(text: str) -> str:
    out = []
    for ch in text:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\x{ord(ch):02x}")
        else:
            out.append(ch)
    return '"' + "".join(out) + '"'


def emit_options_file() -> str:
    return OPTIONS_FILE


def _field(f: Field, pad: str, step: str) -> List[str]:
    label = f.label + " " if f.label else ""
    head = f"{pad}{label}{f.type} {f.name} = {f.number}"
    if f.options is None:
        return [head + ";"]
    entries = [f"(owl.property).iri = {quote(f.options.iri)}"]
    entries += [f"(owl.property).parent = {quote(p)}" for p in f.options.parents]
    entries.append(f"(owl.property).class_iri = {quote(f.options.class_iri)}")
    lines = [head + " ["]
    lines += [f"{pad}{step}{e}," for e in entries[:-1]]
    lines.append(f"{pad}{step}{entries[-1]}")
    lines.append(f"{pad}];")
    return lines


def _message(msg: Message, step: str) -> List[str]:
    lines = [f"message {msg.name} {{"]
    blocks: List[List[str]] = []
    if msg.class_options is not None:
        block = [f"{step}option (owl.class).iri = {quote(msg.class_options.iri)};"]
        block += [f"{step}option (owl.class).parent = {quote(p)};" for p in msg.class_options.parents]
        blocks.append(block)
    for f in msg.fields:
        blocks.append(_field(f, step, step))
    if msg.reserved:
        blocks.append([f"{step}reserved {', '.join(str(n) for n in msg.reserved)};"])
    for group in msg.oneofs:
        block = [f"{step}oneof {group.name} {{"]
        for f in group.fields:
            block += _field(f, step * 2, step)
        block.append(f"{step}}}")
        blocks.append(block)
    for i, block in enumerate(blocks):
        if i:
            lines.append("")
        lines += block
    lines.append("}")
    return lines


def emit(ast: ProtoFile, cfg: EmitConfig = EmitConfig(), check: bool = True) -> str:
    """Render ``ast`` as proto3 text (LF line endings, one trailing newline).

    Raises :class:`EmitError` when the AST does not validate.
    """
    if check:
        from .check import validate

        problems = [d for d in validate(ast) if d.is_error]
        if problems:
            raise EmitError(problems)
    step = " " * cfg.indent
    sections: List[List[str]] = []
    top = []
    if cfg.header:
        top.append(HEADER)
    top.append(f'syntax = "{ast.syntax}";')
    sections.append(top)
    if ast.package:
        sections.append([f"package {ast.package};"])
    if ast.imports:
        sections.append([f"import {quote(i)};" for i in sorted(ast.imports)])
    if ast.prefixes is not None:
        meta = ["option (owl.meta) = {"]
        if not ast.prefixes:
            meta.append(f"{step}prefixes: []")
        else:
            entries = [[f"{step * 2}prefix: {quote(p)}", f"{step * 2}iri: {quote(i)}"]
                       for p, i in sorted(ast.prefixes)]
            meta.append(f"{step}prefixes: [{{")
            for i, entry in enumerate(entries):
                if i:
                    meta.append(f"{step}}}, {{")
                meta += entry
            meta.append(f"{step}}}]")
        meta.append("};")
        sections.append(meta)
    for msg in sorted(ast.messages, key=lambda m: m.name):
        sections.append(_message(msg, step))
    for ext in ast.extends:
        block = [f"extend {ext.target} {{"]
        for f in ext.fields:
            block += _field(f, step, step)
        block.append("}")
        sections.append(block)
    return "\n\n".join("\n".join(s) for s in sections) + "\n"
