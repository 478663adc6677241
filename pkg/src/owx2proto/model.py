"""Resolved ontology model: prefixes, entities and the class inheritance graph.

Entity IRIs are carried in their canonical *key* form: abbreviated
(``ex:VirtualMachine``) whenever some prefix covers the IRI, absolute
otherwise.  :class:`PrefixTable` converts between the two forms.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .diagnostics import ModelError, error

OWL_NS = "http://www.w3.org/2002/07/owl#"
RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"

STANDARD_PREFIXES = {"owl": OWL_NS, "rdf": RDF_NS, "rdfs": RDFS_NS, "xsd": XSD_NS}

THING = OWL_NS + "Thing"
TOP_DATA_PROPERTY = OWL_NS + "topDataProperty"
TOP_OBJECT_PROPERTY = OWL_NS + "topObjectProperty"

_ABSOLUTE = re.compile(r"^(?:[A-Za-z][A-Za-z0-9+.\-]*://|urn:)")
_LOCAL_PART = re.compile(r"^[^\s/#:?]+$")


def is_absolute(iri: str) -> bool:
    return bool(_ABSOLUTE.match(iri))


def local_name(iri: str) -> str:
    """Short name of an entity key (``ex:Foo`` -> ``Foo``, ``http://a/b#Foo`` -> ``Foo``)."""
    if is_absolute(iri):
        cut = max(iri.rfind("#"), iri.rfind("/"))
        return iri[cut + 1:]
    return iri.split(":", 1)[1] if ":" in iri else iri


class UnknownPrefixError(ValueError):
    def __init__(self, prefix: str):
        self.prefix = prefix
        super().__init__(f"unknown prefix {prefix}")


@dataclass(frozen=True)
class PrefixTable:
    """Prefix -> namespace IRI mapping, kept sorted by prefix."""

    entries: Tuple[Tuple[str, str], ...] = ()

    def __post_init__(self):
        seen = set()
        for prefix, iri in self.entries:
            if prefix in seen:
                raise ValueError(f"duplicate prefix {prefix!r}")
            if not iri:
                raise ValueError(f"empty IRI for prefix {prefix!r}")
            seen.add(prefix)
        object.__setattr__(self, "entries", tuple(sorted(self.entries)))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[str, str]], with_standard: bool = True) -> "PrefixTable":
        table = dict(pairs)
        if with_standard:
            for prefix, iri in STANDARD_PREFIXES.items():
                table.setdefault(prefix, iri)
        return cls(tuple(table.items()))

    def __contains__(self, prefix: str) -> bool:
        return any(p == prefix for p, _ in self.entries)

    def namespace(self, prefix: str) -> str:
        for p, iri in self.entries:
            if p == prefix:
                return iri
        raise UnknownPrefixError(prefix)

    def resolve(self, iri: str) -> str:
        return resolve_iri(iri, self)

    def abbreviate(self, iri: str) -> str:
        """Shortest stable abbreviation of an absolute IRI, or the IRI itself."""
        if not is_absolute(iri):
            return iri
        best = None
        for prefix, ns in self.entries:
            if iri.startswith(ns) and _LOCAL_PART.match(iri[len(ns):]):
                # longest namespace wins, then named prefixes over the empty one
                rank = (-len(ns), prefix == "", prefix)
                if best is None or rank < best[0]:
                    best = (rank, prefix, iri[len(ns):])
        if best is None:
            return iri
        return f"{best[1]}:{best[2]}"

    def canonical(self, iri: str) -> str:
        return self.abbreviate(self.resolve(iri))


def resolve_iri(abbrev: str, table: PrefixTable) -> str:
    """Expand ``prefix:local`` against ``table``; absolute IRIs pass through unchanged."""
    if is_absolute(abbrev):
        return abbrev
    if ":" not in abbrev:
        raise ValueError(f"not an IRI: {abbrev!r}")
    prefix, local = abbrev.split(":", 1)
    return table.namespace(prefix) + local


def is_owl_builtin(iri: str, table: Optional[PrefixTable] = None) -> bool:
    if is_absolute(iri):
        return iri.startswith(OWL_NS)
    if table is not None:
        try:
            return table.resolve(iri).startswith(OWL_NS)
        except (UnknownPrefixError, ValueError):
            return False
    return iri.startswith("owl:")


@dataclass(frozen=True)
class OntClass:
    iri: str
    direct_parents: Tuple[str, ...] = ()
    declared_data_props: Tuple[str, ...] = ()
    declared_object_props: Tuple[str, ...] = ()
    line: Optional[int] = field(default=None, compare=False)
    column: Optional[int] = field(default=None, compare=False)

    @property
    def name(self) -> str:
        return local_name(self.iri)


@dataclass(frozen=True)
class DataProp:
    iri: str
    parent_props: Tuple[str, ...] = ()
    domain: Optional[str] = None
    range: Optional[str] = None
    line: Optional[int] = field(default=None, compare=False)
    column: Optional[int] = field(default=None, compare=False)

    @property
    def name(self) -> str:
        return local_name(self.iri)


EMBED = "embed"
REFERENCE_SINGULAR = "reference_singular"
REFERENCE_PLURAL = "reference_plural"
MODES = (EMBED, REFERENCE_SINGULAR, REFERENCE_PLURAL)


@dataclass(frozen=True)
class ObjectProp:
    iri: str
    parent_props: Tuple[str, ...] = ()
    domain: Optional[str] = None
    range: Optional[str] = None
    mode: str = EMBED
    line: Optional[int] = field(default=None, compare=False)
    column: Optional[int] = field(default=None, compare=False)

    @property
    def name(self) -> str:
        return local_name(self.iri)


@dataclass(frozen=True)
class FlatProperty:
    """One entry of a flattened class: the property and its root-most declarer."""

    iri: str
    kind: str  # "data" or "object"
    declared_by: str


class ClassGraph:
    """Acyclic child -> parent structure over class keys, rooted at ``root``.

    Built once and never mutated; all queries are pure.
    """

    def __init__(self, classes: Mapping[str, OntClass], root: str):
        self.root = root
        self.classes: Dict[str, OntClass] = dict(classes)
        self._parents: Dict[str, Tuple[str, ...]] = {}
        self._children: Dict[str, List[str]] = {iri: [] for iri in self.classes}
        for iri, cls in self.classes.items():
            parents = tuple(sorted(p for p in cls.direct_parents if p in self.classes))
            self._parents[iri] = parents
            for p in parents:
                self._children[p].append(iri)
        for kids in self._children.values():
            kids.sort()
        self._check_acyclic()

    @property
    def nodes(self) -> Tuple[str, ...]:
        return tuple(sorted(self.classes))

    @property
    def edges(self) -> Tuple[Tuple[str, str], ...]:
        return tuple((c, p) for c in self.nodes for p in self.classes[c].direct_parents)

    def parents(self, iri: str) -> Tuple[str, ...]:
        return self._parents[iri]

    def children(self, iri: str) -> Tuple[str, ...]:
        return tuple(self._children[iri])

    def is_leaf(self, iri: str) -> bool:
        return not self._children[iri]

    def descendants(self, iri: str) -> List[str]:
        seen, stack = set(), list(self._children[iri])
        while stack:
            node = stack.pop()
            if node not in seen:
                seen.add(node)
                stack.extend(self._children[node])
        return sorted(seen)

    def leaf_descendants(self, iri: str) -> List[str]:
        return [d for d in self.descendants(iri) if self.is_leaf(d)]

    def _check_acyclic(self) -> None:
        white, grey, black = 0, 1, 2
        color = {n: white for n in self.classes}
        for start in sorted(self.classes):
            if color[start] != white:
                continue
            stack = [(start, iter(self._parents[start]))]
            path = [start]
            color[start] = grey
            while stack:
                node, it = stack[-1]
                nxt = next(it, None)
                if nxt is None:
                    color[node] = black
                    stack.pop()
                    path.pop()
                elif color[nxt] == grey:
                    cycle = path[path.index(nxt):] + [nxt]
                    cls = self.classes[nxt]
                    raise ModelError([error(
                        "CYCLE", "class hierarchy contains a cycle: " + " -> ".join(cycle),
                        cls.line, cls.column)])
                elif color[nxt] == white:
                    color[nxt] = grey
                    stack.append((nxt, iter(self._parents[nxt])))
                    path.append(nxt)


def build_graph(classes: Mapping[str, OntClass], root: str = "owl:Thing") -> ClassGraph:
    return ClassGraph(classes, root)


def linearize_ancestors(cls: str, graph: ClassGraph) -> List[str]:
    """Breadth-first ancestors of ``cls``, nearest first, siblings in lexical order.

    Anything in the OWL namespace (``owl:Thing`` in particular) is left out.
    """
    if isinstance(cls, OntClass):
        cls = cls.iri
    order: List[str] = []
    seen = {cls}
    queue = deque(graph.parents(cls))
    while queue:
        node = queue.popleft()
        if node in seen:
            continue
        seen.add(node)
        order.append(node)
        queue.extend(graph.parents(node))
    return [n for n in order if not is_owl_builtin(n)]


def flatten_properties(
    cls: str,
    graph: ClassGraph,
    field_name: Optional[Callable[[FlatProperty], str]] = None,
) -> List[FlatProperty]:
    """Every property visible on ``cls``, root-most declaring class first.

    When ``field_name`` is given, two different properties that end up with
    the same field name raise :class:`ModelError`.
    """
    if isinstance(cls, OntClass):
        cls = cls.iri
    chain = [cls] + linearize_ancestors(cls, graph)
    seen: Dict[str, FlatProperty] = {}
    groups: List[List[FlatProperty]] = []
    for declarer in reversed(chain):
        owner = graph.classes[declarer]
        group = []
        for kind, props in (("data", owner.declared_data_props), ("object", owner.declared_object_props)):
            for prop in props:
                key = (kind, prop)
                if key in seen:
                    continue
                entry = FlatProperty(prop, kind, declarer)
                seen[key] = entry
                group.append(entry)
        group.sort(key=lambda e: (local_name(e.iri), e.iri, e.kind))
        groups.append(group)
    flat = [entry for group in groups for entry in group]

    if field_name is not None:
        by_name: Dict[str, FlatProperty] = {}
        problems = []
        for entry in flat:
            name = field_name(entry)
            other = by_name.get(name)
            if other is not None:
                owner = graph.classes[cls]
                problems.append(error(
                    "FIELD_COLLISION",
                    f"class {cls}: properties {other.iri} and {entry.iri} both map to field '{name}'",
                    owner.line, owner.column))
            else:
                by_name[name] = entry
        if problems:
            raise ModelError(problems)
    return flat


def transitive_reduction(parents: Mapping[str, Sequence[str]]) -> Dict[str, Tuple[str, ...]]:
    """Drop parent edges implied by another path; used to compare hierarchies."""
    closure: Dict[str, set] = {}

    def ancestors(node):
        if node in closure:
            return closure[node]
        acc = set()
        for p in parents.get(node, ()):
            acc.add(p)
            acc |= ancestors(p)
        closure[node] = acc
        return acc

    reduced = {}
    for node, ps in parents.items():
        direct = set(ps)
        implied = set()
        for p in direct:
            implied |= ancestors(p)
        reduced[node] = tuple(sorted(direct - implied))
    return reduced
