"""Syntax tree for the proto3 subset the generator writes and the checker reads."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator, Optional, Tuple

MIN_FIELD_NUMBER = 1
MAX_FIELD_NUMBER = 18999
RESERVED_RANGE = (19000, 19999)

SCALAR_TYPES = frozenset({
    "double", "float", "int32", "int64", "uint32", "uint64", "sint32", "sint64",
    "fixed32", "fixed64", "sfixed32", "sfixed64", "bool", "string", "bytes",
})


@dataclass(frozen=True)
class ClassOptions:
    iri: str
    parents: Tuple[str, ...] = ()


@dataclass(frozen=True)
class PropertyOptions:
    iri: str
    parents: Tuple[str, ...] = ()
    class_iri: str = ""


@dataclass(frozen=True)
class Field:
    name: str
    type: str
    number: int = 0  # 0 while unassigned
    label: str = ""  # "", "repeated" or "optional"
    options: Optional[PropertyOptions] = None
    line: int = field(default=0, compare=False)

    @property
    def repeated(self) -> bool:
        return self.label == "repeated"


@dataclass(frozen=True)
class Oneof:
    name: str
    fields: Tuple[Field, ...] = ()
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Message:
    name: str
    class_options: Optional[ClassOptions] = None
    fields: Tuple[Field, ...] = ()
    oneofs: Tuple[Oneof, ...] = ()
    reserved: Tuple[int, ...] = ()
    line: int = field(default=0, compare=False)

    def all_fields(self) -> Iterator[Field]:
        yield from self.fields
        for group in self.oneofs:
            yield from group.fields

    @property
    def is_choice(self) -> bool:
        """Interface wrapper: no class options and nothing but a single oneof."""
        return self.class_options is None and not self.fields and len(self.oneofs) == 1

    def map_fields(self, fn) -> "Message":
        return replace(
            self,
            fields=tuple(fn(f) for f in self.fields),
            oneofs=tuple(replace(g, fields=tuple(fn(f) for f in g.fields)) for g in self.oneofs),
        )


@dataclass(frozen=True)
class Extend:
    target: str
    fields: Tuple[Field, ...] = ()
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ProtoFile:
    package: str = ""
    syntax: str = "proto3"
    imports: Tuple[str, ...] = ()
    prefixes: Optional[Tuple[Tuple[str, str], ...]] = None  # None: no (owl.meta) option
    messages: Tuple[Message, ...] = ()
    extends: Tuple[Extend, ...] = ()

    def message(self, name: str) -> Optional[Message]:
        for m in self.messages:
            if m.name == name:
                return m
        return None
