"""Reader and validator for generated proto files.

The parser accepts exactly the constructs the emitter writes (plus the
``extend`` blocks of the options file) and reports anything else as an
``UNSUPPORTED`` error.  It is the round-trip oracle for the generator:
``parse_proto(emit(ast))`` gives ``ast`` back.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set, Tuple

from .diagnostics import Diagnostic, Owx2ProtoError, error, warning
from .model import is_absolute, transitive_reduction
from .proto_ast import (
    MAX_FIELD_NUMBER,
    MIN_FIELD_NUMBER,
    RESERVED_RANGE,
    SCALAR_TYPES,
    ClassOptions,
    Extend,
    Field,
    Message,
    Oneof,
    PropertyOptions,
    ProtoFile,
)

PROTO_MAX_NUMBER = 536870911

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<line_comment>//[^\n]*)
  | (?P<block_comment>/\*.*?\*/)
  | (?P<string>"(?:[^"\\\n]|\\.)*"|'(?:[^'\\\n]|\\.)*')
  | (?P<number>-?(?:0[xX][0-9a-fA-F]+|\d+(?:\.\d*)?(?:[eE][+-]?\d+)?))
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[{}\[\]()<>;,=.:])
""", re.VERBOSE | re.DOTALL)

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "\\": "\\", '"': '"', "'": "'", "0": "\0"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int


class _Syntax(Exception):
    def __init__(self, message: str, line: int, code: str = "SYNTAX"):
        super().__init__(message)
        self.line = line
        self.code = code


def tokenize(text: str) -> Tuple[List[Token], List[Diagnostic]]:
    tokens, diags = [], []
    pos, line = 0, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            diags.append(error("SYNTAX", f"unexpected character {text[pos]!r}", line))
            pos += 1
            continue
        kind = m.lastgroup
        value = m.group()
        if kind in ("ident", "number", "string", "punct"):
            tokens.append(Token(kind, value, line))
        line += value.count("\n")
        pos = m.end()
    return tokens, diags


def unquote(literal: str) -> str:
    body = literal[1:-1]
    out, i = [], 0
    while i < len(body):
        ch = body[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        nxt = body[i + 1]
        if nxt in "xX":
            out.append(chr(int(body[i + 2:i + 4], 16)))
            i += 4
        elif nxt in _ESCAPES:
            out.append(_ESCAPES[nxt])
            i += 2
        else:
            out.append(nxt)
            i += 2
    return "".join(out)


class _Parser:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0
        self.diagnostics: List[Diagnostic] = []

    # token helpers
    def peek(self, offset=0) -> Optional[Token]:
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    @property
    def line(self) -> int:
        tok = self.peek() or (self.tokens[-1] if self.tokens else None)
        return tok.line if tok else 1

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise _Syntax("unexpected end of file", self.line)
        self.pos += 1
        return tok

    def accept(self, text: str) -> bool:
        tok = self.peek()
        if tok is not None and tok.text == text and tok.kind != "string":
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.text != text or tok.kind == "string":
            raise _Syntax(f"expected '{text}', found '{tok.text}'", tok.line)
        return tok

    def ident(self) -> str:
        tok = self.next()
        if tok.kind != "ident":
            raise _Syntax(f"expected identifier, found '{tok.text}'", tok.line)
        return tok.text

    def full_ident(self) -> str:
        parts = [self.ident()]
        while self.accept("."):
            parts.append(self.ident())
        return ".".join(parts)

    def string(self) -> str:
        tok = self.next()
        if tok.kind != "string":
            raise _Syntax(f"expected string, found '{tok.text}'", tok.line)
        return unquote(tok.text)

    def integer(self) -> int:
        tok = self.next()
        if tok.kind != "number":
            raise _Syntax(f"expected integer, found '{tok.text}'", tok.line)
        try:
            return int(tok.text, 0)
        except ValueError:
            raise _Syntax(f"expected integer, found '{tok.text}'", tok.line) from None

    def skip_statement(self, start: int) -> None:
        """Resume after the statement or block that began at ``start``."""
        self.pos = start
        depth = 0
        while self.pos < len(self.tokens):
            tok = self.tokens[self.pos]
            self.pos += 1
            if tok.kind != "punct":
                continue
            if tok.text == "{":
                depth += 1
            elif tok.text == "}":
                depth -= 1
                if depth <= 0:
                    return
            elif tok.text == ";" and depth == 0:
                return

    def report(self, exc: _Syntax) -> None:
        self.diagnostics.append(error(exc.code, str(exc), exc.line))

    # grammar
    def option_name(self) -> str:
        if self.accept("("):
            name = "(" + self.full_ident() + ")"
            self.expect(")")
        else:
            name = self.ident()
        while self.accept("."):
            name += "." + self.ident()
        return name

    def constant(self):
        tok = self.peek()
        if tok is None:
            raise _Syntax("unexpected end of file", self.line)
        if tok.kind == "string":
            return self.string()
        if tok.kind == "number":
            return self.integer()
        if tok.text == "{":
            return self.aggregate()
        if tok.kind == "ident":
            return self.full_ident()
        raise _Syntax(f"unexpected '{tok.text}' in option value", tok.line)

    def aggregate(self) -> Dict[str, list]:
        self.expect("{")
        out: Dict[str, list] = {}
        while not self.accept("}"):
            key = self.ident()
            self.accept(":")
            if self.accept("["):
                values = []
                while not self.accept("]"):
                    values.append(self.constant())
                    self.accept(",")
                out.setdefault(key, []).extend(values)
            else:
                out.setdefault(key, []).append(self.constant())
            if not self.accept(","):
                self.accept(";")
        return out

    def parse_file(self) -> ProtoFile:
        syntax = ""
        package = ""
        imports: List[str] = []
        prefixes = None
        messages: List[Message] = []
        extends: List[Extend] = []
        while self.peek() is not None:
            start = self.pos
            tok = self.peek()
            try:
                if tok.text == "syntax" and tok.kind == "ident":
                    self.next()
                    self.expect("=")
                    syntax = self.string()
                    self.expect(";")
                elif tok.text == "package":
                    self.next()
                    package = self.full_ident()
                    self.expect(";")
                elif tok.text == "import":
                    self.next()
                    imports.append(self.string())
                    self.expect(";")
                elif tok.text == "option":
                    self.next()
                    name = self.option_name()
                    self.expect("=")
                    value = self.constant()
                    self.expect(";")
                    if name != "(owl.meta)":
                        raise _Syntax(f"unsupported file option {name}", tok.line, "UNSUPPORTED")
                    prefixes = self._prefixes(value, tok.line)
                elif tok.text == "message":
                    messages.append(self.message())
                elif tok.text == "extend":
                    extends.append(self.extend())
                else:
                    raise _Syntax(f"unsupported construct: {tok.text}", tok.line, "UNSUPPORTED")
            except _Syntax as exc:
                self.report(exc)
                self.skip_statement(start)
        if not syntax:
            self.diagnostics.append(error("SYNTAX", "missing syntax declaration", 1))
        return ProtoFile(package, syntax or "proto3", tuple(imports), prefixes, tuple(messages), tuple(extends))

    def _prefixes(self, value, line) -> Tuple[Tuple[str, str], ...]:
        if not isinstance(value, dict) or set(value) - {"prefixes"}:
            raise _Syntax("(owl.meta) must only contain prefixes", line, "UNSUPPORTED")
        out = []
        for entry in value.get("prefixes", []):
            if not isinstance(entry, dict) or set(entry) != {"prefix", "iri"}:
                raise _Syntax("prefix entries need exactly 'prefix' and 'iri'", line)
            (prefix,), (iri,) = entry["prefix"], entry["iri"]
            out.append((prefix, iri))
        return tuple(out)

    def message(self) -> Message:
        line = self.expect("message").line
        name = self.ident()
        self.expect("{")
        class_iri = None
        parents: List[str] = []
        fields: List[Field] = []
        oneofs: List[Oneof] = []
        reserved: List[int] = []
        while not self.accept("}"):
            start = self.pos
            tok = self.peek()
            if tok is None:
                raise _Syntax(f"message {name} is not closed", line)
            try:
                if tok.text == "option":
                    self.next()
                    opt = self.option_name()
                    self.expect("=")
                    value = self.constant()
                    self.expect(";")
                    if opt == "(owl.class).iri":
                        if class_iri is not None:
                            raise _Syntax(f"message {name}: (owl.class).iri given twice", tok.line, "DUP_OPTION")
                        class_iri = value
                    elif opt == "(owl.class).parent":
                        parents.append(value)
                    else:
                        raise _Syntax(f"unsupported message option {opt}", tok.line, "UNSUPPORTED")
                elif tok.text == "reserved":
                    self.next()
                    reserved.append(self.integer())
                    while self.accept(","):
                        reserved.append(self.integer())
                    self.expect(";")
                elif tok.text == "oneof":
                    self.next()
                    group = self.ident()
                    self.expect("{")
                    members = []
                    while not self.accept("}"):
                        members.append(self.field(allow_label=False))
                    oneofs.append(Oneof(group, tuple(members), tok.line))
                elif tok.text in ("message", "enum", "map", "extensions", "extend", "service", "group"):
                    raise _Syntax(f"unsupported construct: {tok.text}", tok.line, "UNSUPPORTED")
                else:
                    fields.append(self.field())
            except _Syntax as exc:
                self.report(exc)
                self.skip_statement(start)
                if self.pos >= len(self.tokens):
                    raise _Syntax(f"message {name} is not closed", line) from None
        opts = None
        if class_iri is not None or parents:
            opts = ClassOptions(class_iri or "", tuple(parents))
        return Message(name, opts, tuple(fields), tuple(oneofs), tuple(reserved), line)

    def field(self, allow_label: bool = True) -> Field:
        tok = self.peek()
        line = tok.line if tok else self.line
        label = ""
        if allow_label and tok is not None and tok.text in ("repeated", "optional") and tok.kind == "ident":
            nxt = self.peek(1)
            if nxt is not None and nxt.kind == "ident":
                label = self.next().text
        type_ = self.full_ident()
        name = self.ident()
        self.expect("=")
        number = self.integer()
        options = None
        if self.accept("["):
            iri = class_iri = None
            parents: List[str] = []
            while True:
                opt_line = self.line
                opt = self.option_name()
                self.expect("=")
                value = self.constant()
                if opt == "(owl.property).iri":
                    iri = value
                elif opt == "(owl.property).parent":
                    parents.append(value)
                elif opt == "(owl.property).class_iri":
                    class_iri = value
                else:
                    raise _Syntax(f"unsupported field option {opt}", opt_line, "UNSUPPORTED")
                if not self.accept(","):
                    break
            self.expect("]")
            options = PropertyOptions(iri or "", tuple(parents), class_iri or "")
        self.expect(";")
        return Field(name, type_, number, label, options, line)

    def extend(self) -> Extend:
        line = self.expect("extend").line
        target = self.full_ident()
        self.expect("{")
        fields = []
        while not self.accept("}"):
            fields.append(self.field())
        return Extend(target, tuple(fields), line)


def parse_proto(text: str) -> Tuple[ProtoFile, List[Diagnostic]]:
    """Parse proto text into a :class:`ProtoFile` and syntax diagnostics."""
    tokens, diags = tokenize(text)
    parser = _Parser(tokens)
    try:
        ast = parser.parse_file()
    except _Syntax as exc:
        parser.report(exc)
        ast = ProtoFile()
    return ast, diags + parser.diagnostics


def _prefix_of(iri: str) -> Optional[str]:
    if not iri or is_absolute(iri) or ":" not in iri:
        return None
    return iri.split(":", 1)[0]


def validate(ast: ProtoFile) -> List[Diagnostic]:
    """Structural checks on a parsed or generated file; returns diagnostics only."""
    diags: List[Diagnostic] = []
    if ast.syntax != "proto3":
        diags.append(error("BAD_SYNTAX", f"syntax must be proto3, not {ast.syntax!r}", 1))

    annotated = ast.prefixes is not None
    known_prefixes: Set[str] = set()
    if annotated:
        for p, _ in ast.prefixes:
            if p in known_prefixes:
                diags.append(error("DUP_PREFIX", f"prefix '{p}' listed twice in (owl.meta)", 1))
            known_prefixes.add(p)

    def check_iri(iri, what, line):
        prefix = _prefix_of(iri)
        if annotated and prefix is not None and prefix not in known_prefixes:
            diags.append(error("UNKNOWN_PREFIX", f"{what}: prefix '{prefix}' of {iri} is not in (owl.meta)", line))

    defined = {m.name for m in ast.messages}
    seen_messages: Set[str] = set()
    for msg in ast.messages:
        if msg.name in seen_messages:
            diags.append(error("DUP_MESSAGE", f"message {msg.name} defined twice", msg.line))
        seen_messages.add(msg.name)

        if annotated and not msg.is_choice:
            opts = msg.class_options
            if opts is None or not opts.iri:
                diags.append(error("MISSING_OPTION", f"message {msg.name} lacks (owl.class).iri", msg.line))
            if opts is None or not opts.parents:
                diags.append(error("MISSING_OPTION", f"message {msg.name} lacks (owl.class).parent", msg.line))
            if opts is not None:
                for iri in (opts.iri, *opts.parents):
                    check_iri(iri, f"message {msg.name}", msg.line)

        names: Set[str] = set()
        numbers: Dict[int, str] = {}
        reserved = set(msg.reserved)
        for n in msg.reserved:
            if RESERVED_RANGE[0] <= n <= RESERVED_RANGE[1]:
                diags.append(error("RESERVED_RANGE", f"message {msg.name}: reserved {n} lies in 19000-19999", msg.line))
        for f in msg.all_fields():
            where = f"{msg.name}.{f.name}"
            if f.name in names:
                diags.append(error("DUP_FIELD", f"field name {where} used twice", f.line))
            names.add(f.name)
            if f.number in numbers:
                diags.append(error("DUP_NUMBER",
                                   f"{where} reuses number {f.number} of {msg.name}.{numbers[f.number]}", f.line))
            else:
                numbers[f.number] = f.name
            if RESERVED_RANGE[0] <= f.number <= RESERVED_RANGE[1]:
                diags.append(error("RESERVED_RANGE", f"{where} = {f.number} lies in 19000-19999", f.line))
            elif not MIN_FIELD_NUMBER <= f.number <= MAX_FIELD_NUMBER:
                diags.append(error("OUT_OF_RANGE", f"{where} = {f.number} is outside 1-{MAX_FIELD_NUMBER}", f.line))
            if f.number in reserved:
                diags.append(error("RESERVED_REUSE", f"{where} uses reserved number {f.number}", f.line))
            base = f.type.split(".")[-1] if f.type.startswith(ast.package + ".") and ast.package else f.type
            if f.type not in SCALAR_TYPES and base not in defined:
                diags.append(warning("UNKNOWN_TYPE", f"{where}: type {f.type} is not defined in this file", f.line))
            if annotated and not msg.is_choice:
                o = f.options
                if o is None or not o.iri:
                    diags.append(error("MISSING_OPTION", f"{where} lacks (owl.property).iri", f.line))
                if o is None or not o.parents:
                    diags.append(error("MISSING_OPTION", f"{where} lacks (owl.property).parent", f.line))
                if o is None or not o.class_iri:
                    diags.append(error("MISSING_OPTION", f"{where} lacks (owl.property).class_iri", f.line))
                if o is not None:
                    for iri in (o.iri, *o.parents, o.class_iri):
                        check_iri(iri, where, f.line)
    for ext in ast.extends:
        seen = set()
        for f in ext.fields:
            if f.number in seen:
                diags.append(error("DUP_NUMBER", f"extend {ext.target}: number {f.number} used twice", f.line))
            seen.add(f.number)
            if not MIN_FIELD_NUMBER <= f.number <= PROTO_MAX_NUMBER:
                diags.append(error("OUT_OF_RANGE", f"extend {ext.target}: number {f.number} out of range", f.line))
    return diags


def check_text(text: str) -> Tuple[ProtoFile, List[Diagnostic]]:
    """Parse and validate in one go (validation is skipped on syntax errors)."""
    ast, diags = parse_proto(text)
    if not any(d.is_error for d in diags):
        diags = diags + validate(ast)
    return ast, diags


class ExtractError(Owx2ProtoError):
    pass


@dataclass(frozen=True)
class ExtractedProperty:
    iri: str
    parents: Tuple[str, ...]
    class_iri: str
    type: str
    repeated: bool


@dataclass
class ExtractedOntology:
    prefixes: Tuple[Tuple[str, str], ...] = ()
    classes: Dict[str, Tuple[str, Tuple[str, ...]]] = field(default_factory=dict)
    properties: Dict[Tuple[str, str], ExtractedProperty] = field(default_factory=dict)

    def class_iris(self) -> Set[str]:
        return {iri for iri, _ in self.classes.values()}

    def direct_parents(self) -> Dict[str, Tuple[str, ...]]:
        """Parent edges recovered from the per-class ancestor lists."""
        ancestors = {iri: tuple(parents) for iri, parents in self.classes.values()}
        return transitive_reduction(ancestors)

    def declarations(self) -> Set[Tuple[str, str, Tuple[str, ...]]]:
        """(declaring class, property IRI, property parents) triples."""
        return {(p.class_iri, p.iri, p.parents) for p in self.properties.values()}


def extract_ontology(ast: ProtoFile) -> ExtractedOntology:
    """Recover the embedded ontology annotations; ``Choice`` wrappers are skipped."""
    out = ExtractedOntology(prefixes=tuple(sorted(ast.prefixes or ())))
    problems = []
    for msg in ast.messages:
        if msg.is_choice:
            continue
        if msg.class_options is None or not msg.class_options.iri:
            problems.append(error("MISSING_OPTION", f"message {msg.name} has no class annotation", msg.line))
            continue
        out.classes[msg.name] = (msg.class_options.iri, msg.class_options.parents)
        for f in msg.all_fields():
            o = f.options
            if o is None or not o.iri or not o.class_iri:
                problems.append(error("MISSING_OPTION", f"{msg.name}.{f.name} has no property annotation", f.line))
                continue
            out.properties[(msg.name, f.name)] = ExtractedProperty(o.iri, o.parents, o.class_iri, f.type, f.repeated)
    if problems:
        raise ExtractError(problems)
    return out


@dataclass
class StabilityReport:
    renumbered: List[Tuple[str, str, int, int]] = field(default_factory=list)
    reused: List[Tuple[str, str, int]] = field(default_factory=list)
    unreserved: List[Tuple[str, str, int]] = field(default_factory=list)
    kept: int = 0

    @property
    def stable(self) -> bool:
        return not self.renumbered and not self.reused


def compare_numbering(previous: ProtoFile, current: ProtoFile) -> StabilityReport:
    """Field-number drift between two versions of a generated file.

    ``renumbered``: a field in both versions with a different number.
    ``reused``: a retired number (removed field or previously reserved)
    now carried by another field.  ``unreserved``: a removed field whose
    number is missing from the message's ``reserved`` list.
    """
    report = StabilityReport()
    for old in previous.messages:
        new = current.message(old.name)
        if new is None:
            continue
        now = {f.name: f.number for f in new.all_fields()}
        by_number = {f.number: f.name for f in new.all_fields()}
        for f in old.all_fields():
            if f.name in now:
                if now[f.name] != f.number:
                    report.renumbered.append((old.name, f.name, f.number, now[f.name]))
                else:
                    report.kept += 1
                continue
            if f.number in by_number:
                report.reused.append((old.name, f.name, f.number))
            elif f.number not in new.reserved:
                report.unreserved.append((old.name, f.name, f.number))
        for n in old.reserved:
            if n in by_number:
                report.reused.append((old.name, by_number[n], n))
    return report
