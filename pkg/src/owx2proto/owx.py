"""Reader for the OWL 2 XML serialization (OWX).

Only the axioms the translator understands are interpreted (see
:data:`SUPPORTED_KINDS`); everything else is kept in
``OntologyDocument.skipped`` and reported as a warning.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import BinaryIO, Dict, List, Mapping, Optional, Tuple, Union
from urllib.parse import urljoin
from xml.parsers import expat

from .diagnostics import Diagnostic, OwxError, error, has_errors, warning
from .model import (
    OWL_NS,
    THING,
    TOP_DATA_PROPERTY,
    TOP_OBJECT_PROPERTY,
    DataProp,
    ObjectProp,
    OntClass,
    PrefixTable,
    UnknownPrefixError,
    is_absolute,
)

XML_NS = "http://www.w3.org/XML/1998/namespace"

DECLARATION = "Declaration"
SUB_CLASS_OF = "SubClassOf"
SUB_OBJECT_PROPERTY_OF = "SubObjectPropertyOf"
SUB_DATA_PROPERTY_OF = "SubDataPropertyOf"
DATA_PROPERTY_DOMAIN = "DataPropertyDomain"
DATA_PROPERTY_RANGE = "DataPropertyRange"
OBJECT_PROPERTY_DOMAIN = "ObjectPropertyDomain"
OBJECT_PROPERTY_RANGE = "ObjectPropertyRange"
ANNOTATION_ASSERTION = "AnnotationAssertion"
OTHER = "Other"

SUPPORTED_KINDS = (
    DECLARATION, SUB_CLASS_OF, SUB_OBJECT_PROPERTY_OF, SUB_DATA_PROPERTY_OF,
    DATA_PROPERTY_DOMAIN, DATA_PROPERTY_RANGE, OBJECT_PROPERTY_DOMAIN,
    OBJECT_PROPERTY_RANGE, ANNOTATION_ASSERTION,
)

# entity element names that may appear inside a Declaration
_ENTITY_KINDS = {"Class", "DataProperty", "ObjectProperty"}
_OTHER_ENTITY_KINDS = {"Datatype", "NamedIndividual", "AnnotationProperty"}


@dataclass(frozen=True)
class RawAxiom:
    kind: str
    payload: Tuple[str, ...]
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)
    element: str = ""  # original element name, always set for kind=Other


@dataclass(frozen=True)
class OntologyDocument:
    prefix_table: PrefixTable
    classes: Mapping[str, OntClass]
    data_properties: Mapping[str, DataProp]
    object_properties: Mapping[str, ObjectProp]
    skipped: Tuple[RawAxiom, ...] = ()
    annotations: Tuple[RawAxiom, ...] = ()
    ontology_iri: Optional[str] = None

    @property
    def thing(self) -> str:
        return self.prefix_table.abbreviate(THING)


@dataclass
class _Node:
    ns: str
    tag: str
    attrs: Dict[str, str]
    line: int
    column: int
    children: List["_Node"] = field(default_factory=list)
    text: str = ""

    def elements(self) -> List["_Node"]:
        # axiom-level annotations never change the translation
        return [c for c in self.children if c.tag != "Annotation"]


def _read_tree(data: bytes) -> _Node:
    parser = expat.ParserCreate(namespace_separator=" ")
    stack: List[_Node] = []
    root: List[_Node] = []

    def split(name):
        ns, _, local = name.rpartition(" ")
        return ns, local

    def start(name, attrs):
        ns, tag = split(name)
        node = _Node(ns, tag, {split(k)[1] if split(k)[0] != XML_NS else "xml:" + split(k)[1]: v
                               for k, v in attrs.items()},
                     parser.CurrentLineNumber, parser.CurrentColumnNumber + 1)
        if stack:
            stack[-1].children.append(node)
        else:
            root.append(node)
        stack.append(node)

    def end(name):
        stack.pop()

    def chars(text):
        if stack:
            stack[-1].text += text

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    parser.CharacterDataHandler = chars
    try:
        parser.Parse(data, True)
    except expat.ExpatError as exc:
        raise OwxError([error("XML_SYNTAX", f"malformed XML: {expat.errors.messages[exc.code]}",
                              exc.lineno, exc.offset + 1)]) from None
    return root[0]


class _Reader:
    def __init__(self, root: _Node):
        self.root = root
        self.diagnostics: List[Diagnostic] = []
        attrs = root.attrs
        self.ontology_iri = attrs.get("ontologyIRI")
        self.base = attrs.get("xml:base") or self.ontology_iri
        pairs = []
        for child in root.children:
            if child.tag == "Prefix" and child.ns == OWL_NS:
                name = child.attrs.get("name", "")
                iri = child.attrs.get("IRI", "")
                if not iri:
                    self.diagnostics.append(error("BAD_PREFIX", f"prefix '{name}' has no IRI",
                                                  child.line, child.column))
                elif name in dict(pairs):
                    self.diagnostics.append(error("DUPLICATE_PREFIX", f"prefix '{name}' declared twice",
                                                  child.line, child.column))
                else:
                    pairs.append((name, iri))
        self.table = PrefixTable.from_pairs(pairs)

    def _fail(self, code, message, node):
        self.diagnostics.append(error(code, message, node.line, node.column))

    def _warn(self, code, message, node):
        self.diagnostics.append(warning(code, message, node.line, node.column))

    def _canonical(self, raw: str, abbreviated: bool, node: _Node) -> Optional[str]:
        if abbreviated:
            if ":" not in raw:
                raw = ":" + raw
            try:
                absolute = self.table.resolve(raw)
            except UnknownPrefixError as exc:
                self._fail("UNKNOWN_PREFIX", f"undeclared prefix '{exc.prefix}' in '{raw}'", node)
                return None
        elif is_absolute(raw):
            absolute = raw
        elif self.base:
            absolute = urljoin(self.base, raw)
        else:
            self._fail("RELATIVE_IRI", f"relative IRI '{raw}' without xml:base", node)
            return None
        return self.table.abbreviate(absolute)

    def entity_iri(self, node: _Node) -> Optional[str]:
        if "abbreviatedIRI" in node.attrs:
            return self._canonical(node.attrs["abbreviatedIRI"], True, node)
        if "IRI" in node.attrs:
            return self._canonical(node.attrs["IRI"], False, node)
        return None

    def value(self, node: _Node) -> Optional[str]:
        """IRI or literal carried by an entity, IRI or Literal element."""
        if node.tag == "IRI":
            return self._canonical(node.text.strip(), False, node)
        if node.tag == "AbbreviatedIRI":
            return self._canonical(node.text.strip(), True, node)
        if node.tag == "Literal":
            return node.text
        return self.entity_iri(node)

    def read_axioms(self) -> List[RawAxiom]:
        axioms = []
        for node in self.root.children:
            if node.ns != OWL_NS:
                axioms.append(self._other(node, f"element outside the OWL namespace: {node.ns} {node.tag}"))
            elif node.tag == "Prefix":
                continue
            elif node.tag in SUPPORTED_KINDS:
                axioms.append(self._supported(node))
            else:
                axioms.append(self._other(node, f"unsupported axiom {node.tag}"))
        return axioms

    def _other(self, node: _Node, reason: str, element: Optional[str] = None) -> RawAxiom:
        payload = []
        stack = [node]
        while stack:
            cur = stack.pop(0)
            raw = cur.attrs.get("abbreviatedIRI") or cur.attrs.get("IRI")
            if raw:
                payload.append(raw)
            elif cur.tag in ("IRI", "AbbreviatedIRI", "Literal") and cur.text.strip():
                payload.append(cur.text.strip())
            stack = cur.children + stack
        self._warn("SKIPPED_AXIOM", f"{reason}; skipped", node)
        return RawAxiom(OTHER, tuple(payload), node.line, node.column, element or node.tag)

    def _supported(self, node: _Node) -> RawAxiom:
        kids = node.elements()
        kind = node.tag
        if kind == DECLARATION:
            if len(kids) != 1:
                return self._other(node, "malformed Declaration")
            ent = kids[0]
            if ent.tag in _OTHER_ENTITY_KINDS:
                return self._other(node, f"declaration of {ent.tag} is not translated",
                                   f"Declaration/{ent.tag}")
            if ent.tag not in _ENTITY_KINDS:
                return self._other(node, f"unsupported declaration {ent.tag}")
            iri = self.entity_iri(ent)
            if iri is None:
                return RawAxiom(kind, (), node.line, node.column, ent.tag)
            return RawAxiom(kind, (ent.tag, iri), node.line, node.column, ent.tag)

        expected = {
            SUB_CLASS_OF: ("Class", "Class"),
            SUB_OBJECT_PROPERTY_OF: ("ObjectProperty", "ObjectProperty"),
            SUB_DATA_PROPERTY_OF: ("DataProperty", "DataProperty"),
            DATA_PROPERTY_DOMAIN: ("DataProperty", "Class"),
            DATA_PROPERTY_RANGE: ("DataProperty", "Datatype"),
            OBJECT_PROPERTY_DOMAIN: ("ObjectProperty", "Class"),
            OBJECT_PROPERTY_RANGE: ("ObjectProperty", "Class"),
        }
        if kind == ANNOTATION_ASSERTION:
            payload = [self.value(k) for k in kids]
            return RawAxiom(kind, tuple(p for p in payload if p), node.line, node.column)
        shape = expected[kind]
        if len(kids) != 2 or tuple(k.tag for k in kids) != shape:
            found = ", ".join(k.tag for k in kids)
            return self._other(node, f"{kind} with anonymous or unsupported expression ({found})")
        payload = [self.entity_iri(k) for k in kids]
        if None in payload:
            return RawAxiom(kind, (), node.line, node.column)
        return RawAxiom(kind, tuple(payload), node.line, node.column)


def _read_bytes(source: Union[bytes, bytearray, str, BinaryIO]) -> bytes:
    if isinstance(source, (bytes, bytearray)):
        return bytes(source)
    if isinstance(source, str):
        return source.encode("utf-8")
    return source.read()


def parse_owx(source: Union[bytes, BinaryIO]) -> Tuple[OntologyDocument, List[Diagnostic]]:
    """Parse OWX bytes into an :class:`OntologyDocument` plus warnings.

    Raises :class:`OwxError` carrying every accumulated diagnostic when the
    input is malformed, redeclares an entity or uses an undeclared prefix.
    """
    root = _read_tree(_read_bytes(source))
    if root.ns != OWL_NS or root.tag != "Ontology":
        raise OwxError([error("NOT_OWX", f"root element is {root.tag}, expected owl:Ontology",
                              root.line, root.column)])
    reader = _Reader(root)
    axioms = reader.read_axioms()
    doc = _build(reader, axioms)
    if has_errors(reader.diagnostics):
        raise OwxError(reader.diagnostics)
    return doc, reader.diagnostics


def parse_owx_file(path) -> Tuple[OntologyDocument, List[Diagnostic]]:
    with open(path, "rb") as fh:
        return parse_owx(fh)


def _build(reader: _Reader, axioms: List[RawAxiom]) -> OntologyDocument:
    diags = reader.diagnostics
    table = reader.table
    thing = table.abbreviate(THING)
    top_data = table.abbreviate(TOP_DATA_PROPERTY)
    top_object = table.abbreviate(TOP_OBJECT_PROPERTY)

    declared: Dict[str, Dict[str, RawAxiom]] = {k: {} for k in _ENTITY_KINDS}
    skipped = [a for a in axioms if a.kind == OTHER]
    for ax in axioms:
        if ax.kind != DECLARATION or not ax.payload:
            continue
        ent_kind, iri = ax.payload
        if ent_kind == "Class" and iri == thing:
            diags.append(warning("BUILTIN_DECLARATION", f"declaration of built-in {iri} ignored",
                                 ax.line, ax.column))
            skipped.append(RawAxiom(OTHER, ax.payload, ax.line, ax.column, "Declaration/owl:Thing"))
            continue
        if iri in declared[ent_kind]:
            first = declared[ent_kind][iri]
            diags.append(error("DUPLICATE_DECLARATION",
                               f"{ent_kind} {iri} declared twice (first at line {first.line})",
                               ax.line, ax.column))
            continue
        declared[ent_kind][iri] = ax

    classes = declared["Class"]
    data_props = declared["DataProperty"]
    object_props = declared["ObjectProperty"]

    parents: Dict[str, List[str]] = {iri: [] for iri in classes}
    prop_parents: Dict[str, List[str]] = {iri: [] for iri in list(data_props) + list(object_props)}
    domains: Dict[Tuple[str, str], List[str]] = {}
    ranges: Dict[Tuple[str, str], List[Tuple[str, RawAxiom]]] = {}

    def known(iri, pool, ax, builtin=None):
        if iri in pool or iri == builtin:
            return True
        diags.append(warning("UNDECLARED_ENTITY", f"{ax.kind} refers to undeclared {iri}; axiom ignored",
                             ax.line, ax.column))
        return False

    for ax in axioms:
        if ax.kind in (DECLARATION, OTHER, ANNOTATION_ASSERTION) or len(ax.payload) != 2:
            continue
        a, b = ax.payload
        if ax.kind == SUB_CLASS_OF:
            if known(a, classes, ax) and known(b, classes, ax, thing):
                if a == b:
                    diags.append(warning("SELF_PARENT", f"{a} declared as its own subclass; ignored",
                                         ax.line, ax.column))
                elif b not in parents[a]:
                    parents[a].append(b)
        elif ax.kind in (SUB_DATA_PROPERTY_OF, SUB_OBJECT_PROPERTY_OF):
            pool, top = (data_props, top_data) if ax.kind == SUB_DATA_PROPERTY_OF else (object_props, top_object)
            if known(a, pool, ax) and known(b, pool, ax, top) and a != b and b not in prop_parents[a]:
                prop_parents[a].append(b)
        elif ax.kind in (DATA_PROPERTY_DOMAIN, OBJECT_PROPERTY_DOMAIN):
            pool = data_props if ax.kind == DATA_PROPERTY_DOMAIN else object_props
            if known(a, pool, ax) and known(b, classes, ax):
                key = ("data" if pool is data_props else "object", a)
                if b not in domains.setdefault(key, []):
                    domains[key].append(b)
        elif ax.kind == DATA_PROPERTY_RANGE:
            if known(a, data_props, ax):
                ranges.setdefault(("data", a), []).append((b, ax))
        elif ax.kind == OBJECT_PROPERTY_RANGE:
            if known(a, object_props, ax) and known(b, classes, ax):
                ranges.setdefault(("object", a), []).append((b, ax))

    def pick_range(kind, iri):
        found = ranges.get((kind, iri), [])
        distinct = list(dict.fromkeys(r for r, _ in found))
        if len(distinct) > 1:
            ax = found[1][1]
            diags.append(warning("MULTIPLE_RANGES",
                                 f"{iri} has several ranges {distinct}; using {distinct[0]}",
                                 ax.line, ax.column))
        return distinct[0] if distinct else None

    declared_on: Dict[str, Dict[str, List[str]]] = {iri: {"data": [], "object": []} for iri in classes}
    data_out: Dict[str, DataProp] = {}
    for iri in sorted(data_props):
        decl = data_props[iri]
        doms = domains.get(("data", iri), [])
        rng = pick_range("data", iri)
        if not doms:
            diags.append(warning("NO_DOMAIN", f"data property {iri} has no domain; not translated",
                                 decl.line, decl.column))
        if rng is None:
            diags.append(warning("NO_RANGE", f"data property {iri} has no range; xsd:string assumed",
                                 decl.line, decl.column))
        for d in doms:
            declared_on[d]["data"].append(iri)
        data_out[iri] = DataProp(iri, tuple(sorted(prop_parents[iri])) or (top_data,),
                                 doms[0] if doms else None, rng, decl.line, decl.column)

    object_out: Dict[str, ObjectProp] = {}
    for iri in sorted(object_props):
        decl = object_props[iri]
        doms = domains.get(("object", iri), [])
        rng = pick_range("object", iri)
        if not doms:
            diags.append(warning("NO_DOMAIN", f"object property {iri} has no domain; not translated",
                                 decl.line, decl.column))
        if rng is None:
            diags.append(warning("NO_RANGE", f"object property {iri} has no named class range; not translated",
                                 decl.line, decl.column))
        else:
            for d in doms:
                declared_on[d]["object"].append(iri)
        object_out[iri] = ObjectProp(iri, tuple(sorted(prop_parents[iri])) or (top_object,),
                                     doms[0] if doms else None, rng,
                                     line=decl.line, column=decl.column)

    class_out: Dict[str, OntClass] = {}
    for iri in sorted(classes):
        decl = classes[iri]
        ps = parents[iri]
        if len(ps) > 1 and thing in ps:
            ps = [p for p in ps if p != thing]
        class_out[iri] = OntClass(iri, tuple(sorted(ps)) or (thing,),
                                  tuple(sorted(declared_on[iri]["data"])),
                                  tuple(sorted(declared_on[iri]["object"])),
                                  decl.line, decl.column)

    annotations = tuple(a for a in axioms if a.kind == ANNOTATION_ASSERTION)
    return OntologyDocument(table, class_out, data_out, object_out, tuple(skipped), annotations,
                            reader.ontology_iri)
