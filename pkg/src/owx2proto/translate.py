"""Ontology -> proto3 translation.

Every class becomes a message carrying all properties of its ancestors
(flattened), each annotated with the IRI of the property, its parent
properties and the class that declared it.  Non-leaf classes additionally get
a ``<Class>Choice`` message whose single ``oneof`` lists the leaf descendants.
"""

from __future__ import annotations

import re
from typing import Dict, List, Optional, Tuple

from .config import HASH, TranslateConfig
from .diagnostics import (
    Diagnostic,
    ModelError,
    NumberingError,
    TranslateError,
    error,
    has_errors,
    warning,
)
from .model import (
    EMBED,
    REFERENCE_PLURAL,
    REFERENCE_SINGULAR,
    XSD_NS,
    ClassGraph,
    FlatProperty,
    ObjectProp,
    OntClass,
    UnknownPrefixError,
    build_graph,
    flatten_properties,
    linearize_ancestors,
    local_name,
)
from .numbering import FieldIdentity, assign_numbers_hash, assign_numbers_ledger
from .owx import OntologyDocument
from .proto_ast import ClassOptions, Field, Message, Oneof, PropertyOptions, ProtoFile

CHOICE_SUFFIX = "Choice"
ONEOF_NAME = "type"

_CAPITAL_RUN = re.compile(r"([A-Z]+)([A-Z][a-z])")
_LOWER_UPPER = re.compile(r"([a-z0-9])([A-Z])")
_NON_ALNUM = re.compile(r"[^A-Za-z0-9]+")
_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_FIELD_NAME = re.compile(r"^[a-z][a-z0-9_]*$")

XSD_SCALARS = {
    XSD_NS + "string": "string",
    XSD_NS + "boolean": "bool",
    XSD_NS + "int": "int32",
    XSD_NS + "integer": "int32",
    XSD_NS + "long": "int64",
    XSD_NS + "float": "float",
    XSD_NS + "double": "double",
    XSD_NS + "dateTime": "string",
    XSD_NS + "date": "string",
    XSD_NS + "anyURI": "string",
}


class UnmappedDatatype(ValueError):
    pass


def to_snake_case(name: str) -> str:
    """``GeoLocation`` -> ``geo_location``; a run of capitals is one word (``VMHost`` -> ``vm_host``)."""
    s = _CAPITAL_RUN.sub(r"\1_\2", name)
    s = _LOWER_UPPER.sub(r"\1_\2", s)
    s = _NON_ALNUM.sub("_", s).strip("_").lower()
    s = re.sub(r"_+", "_", s)
    if not s:
        raise ValueError(f"{name!r} has no usable characters for a field name")
    if not s[0].isalpha():
        raise ValueError(f"{name!r} does not start with a letter")
    return s


def map_datatype(xsd_iri: str, table=None) -> str:
    absolute = table.resolve(xsd_iri) if table is not None else xsd_iri
    if absolute.startswith("xsd:"):
        absolute = XSD_NS + absolute[4:]
    try:
        return XSD_SCALARS[absolute]
    except KeyError:
        raise UnmappedDatatype(f"unmapped datatype {xsd_iri}") from None


def message_name(iri: str) -> str:
    name = local_name(iri)
    return name[:1].upper() + name[1:]


class Translator:
    """Holds one document, its class graph and the config for a translation run."""

    def __init__(self, document: OntologyDocument, config: Optional[TranslateConfig] = None):
        self.document = document
        self.config = config or TranslateConfig()
        self.table = document.prefix_table
        self.thing = document.thing
        self.diagnostics: List[Diagnostic] = []
        self.graph: ClassGraph = build_graph(document.classes, self.thing)
        self.modes = self._canonical_keys(self.config.property_modes, "property_modes")
        self.overrides = self._canonical_keys(self.config.field_name_overrides, "field_name_overrides")
        for key, name in sorted(self.overrides.items()):
            if not _FIELD_NAME.match(name):
                self.diagnostics.append(error("CONFIG", f"field_name_overrides: {name!r} is not a valid field name"))
        self.names: Dict[str, str] = {iri: message_name(iri) for iri in document.classes}

    def _canonical_keys(self, mapping, section) -> Dict[str, str]:
        out = {}
        props = set(self.document.data_properties) | set(self.document.object_properties)
        for key, value in sorted(mapping.items()):
            try:
                canon = self.table.canonical(key)
            except (UnknownPrefixError, ValueError) as exc:
                self.diagnostics.append(error("CONFIG", f"{section}: {key}: {exc}"))
                continue
            if canon not in props:
                self.diagnostics.append(warning("UNUSED_CONFIG", f"{section}: {key} is not a property of the ontology"))
            out[canon] = value
        return out

    def _where(self, entity):
        return getattr(entity, "line", None), getattr(entity, "column", None)

    def mode_of(self, prop: ObjectProp) -> str:
        return self.modes.get(prop.iri, prop.mode)

    def field_name(self, entry: FlatProperty) -> str:
        if entry.iri in self.overrides:
            return self.overrides[entry.iri]
        if entry.kind == "data":
            return to_snake_case(local_name(entry.iri))
        prop = self.document.object_properties[entry.iri]
        base = to_snake_case(self.names.get(prop.range) or local_name(prop.range))
        mode = self.mode_of(prop)
        if mode == REFERENCE_SINGULAR:
            return base + "_id"
        if mode == REFERENCE_PLURAL:
            return self.config.plural_exceptions.get(base, base) + "_ids"
        return base

    def data_prop_to_field(self, iri: str, declarer: str) -> Field:
        prop = self.document.data_properties[iri]
        scalar = map_datatype(prop.range or "xsd:string", self.table)
        return Field(self.field_name(FlatProperty(iri, "data", declarer)), scalar,
                     options=PropertyOptions(iri, prop.parent_props, declarer))

    def object_prop_to_field(self, prop: ObjectProp, declarer: str) -> Field:
        name = self.field_name(FlatProperty(prop.iri, "object", declarer))
        options = PropertyOptions(prop.iri, prop.parent_props, declarer)
        mode = self.mode_of(prop)
        if mode == EMBED:
            return Field(name, self.names[prop.range], options=options)
        label = "repeated" if mode == REFERENCE_PLURAL else ""
        return Field(name, "string", label=label, options=options)

    def ancestors(self, iri: str) -> List[str]:
        return linearize_ancestors(iri, self.graph)

    def class_to_message(self, iri: str) -> Message:
        cls: OntClass = self.document.classes[iri]
        try:
            flat = flatten_properties(iri, self.graph, self.field_name)
        except ValueError as exc:
            raise ModelError([error("BAD_NAME", f"class {iri}: {exc}", *self._where(cls))]) from None
        fields = []
        problems = []
        for entry in flat:
            try:
                if entry.kind == "data":
                    fields.append(self.data_prop_to_field(entry.iri, entry.declared_by))
                else:
                    fields.append(self.object_prop_to_field(self.document.object_properties[entry.iri],
                                                            entry.declared_by))
            except UnmappedDatatype as exc:
                problems.append(error("UNMAPPED_DATATYPE", f"{entry.iri}: {exc}",
                                      *self._where(self.document.data_properties[entry.iri])))
            except ValueError as exc:
                problems.append(error("BAD_NAME", f"{entry.iri}: {exc}", *self._where(cls)))
        if problems:
            raise ModelError(problems)
        parents = tuple(self.ancestors(iri)) + (self.thing,)
        return Message(self.names[iri], ClassOptions(iri, parents), tuple(fields))

    def is_instantiable(self, iri: str) -> bool:
        cls = self.document.classes[iri]
        return bool(cls.declared_data_props or cls.declared_object_props)

    def build_interface(self, iri: str) -> Optional[Message]:
        if self.graph.is_leaf(iri):
            return None
        members = list(self.graph.leaf_descendants(iri))
        if self.is_instantiable(iri):
            members.append(iri)
        fields = sorted((Field(to_snake_case(self.names[m]), self.names[m]) for m in members),
                        key=lambda f: f.name)
        seen: Dict[str, str] = {}
        for f in fields:
            if f.name in seen:
                raise ModelError([error("FIELD_COLLISION",
                                        f"{self.names[iri]}{CHOICE_SUFFIX}: {seen[f.name]} and {f.type} "
                                        f"both map to oneof member '{f.name}'",
                                        *self._where(self.document.classes[iri]))])
            seen[f.name] = f.type
        return Message(self.names[iri] + CHOICE_SUFFIX, None, (), (Oneof(ONEOF_NAME, tuple(fields)),))

    def _identities(self, message: Message, iri: Optional[str]) -> Dict[str, FieldIdentity]:
        ancestors = tuple(self.names[a] for a in self.ancestors(iri)) if iri else ()
        return {f.name: FieldIdentity(message.name, ancestors, f.name) for f in message.all_fields()}

    def translate(self, previous: Optional[ProtoFile] = None) -> Tuple[ProtoFile, List[Diagnostic]]:
        diags = self.diagnostics
        messages: List[Tuple[Message, Optional[str]]] = []
        owner: Dict[str, str] = {}

        def add(message, iri):
            if message.name in owner:
                where = self._where(self.document.classes[iri]) if iri else (None, None)
                diags.append(error("DUP_MESSAGE",
                                   f"message name {message.name} produced by both {owner[message.name]} "
                                   f"and {iri or message.name}", *where))
                return
            owner[message.name] = iri or message.name
            messages.append((message, iri))

        for iri in sorted(self.document.classes):
            cls = self.document.classes[iri]
            if not _IDENT.match(self.names[iri]):
                diags.append(error("BAD_NAME", f"class {iri} has no valid message name", *self._where(cls)))
                continue
            try:
                add(self.class_to_message(iri), iri)
                interface = self.build_interface(iri)
                if interface is not None:
                    add(interface, None)
            except ModelError as exc:
                diags.extend(exc.diagnostics)

        if has_errors(diags):
            raise TranslateError(diags)

        messages.sort(key=lambda pair: pair[0].name)
        try:
            if self.config.strategy == HASH:
                numbered = []
                for message, iri in messages:
                    msg, notes = assign_numbers_hash(message, self._identities(message, iri))
                    numbered.append(msg)
                    diags.extend(notes)
                ast = self._file(tuple(numbered))
            else:
                ast = assign_numbers_ledger(self._file(tuple(m for m, _ in messages)), previous,
                                            self.config.group_gap)
        except NumberingError as exc:
            raise TranslateError(diags + exc.diagnostics) from None
        return ast, diags

    def _file(self, messages) -> ProtoFile:
        return ProtoFile(
            package=self.config.package,
            syntax=self.config.syntax,
            imports=(self.config.options_import,),
            prefixes=self.table.entries,
            messages=messages,
        )


def translate(
    document: OntologyDocument,
    config: Optional[TranslateConfig] = None,
    previous: Optional[ProtoFile] = None,
) -> Tuple[ProtoFile, List[Diagnostic]]:
    """Translate ``document`` into a numbered :class:`ProtoFile`.

    ``previous`` is only consulted by the ledger strategy.  Raises
    :class:`TranslateError` with every diagnostic when anything is fatal.
    """
    try:
        translator = Translator(document, config)
    except ModelError as exc:
        raise TranslateError(exc.diagnostics) from None
    return translator.translate(previous)
