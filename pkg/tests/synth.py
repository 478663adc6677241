"""Random ontologies written out as OWX, for property and acceptance tests."""

from __future__ import annotations

import copy
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple
from xml.sax.saxutils import quoteattr

from owx2proto.config import TranslateConfig

NS = "http://example.org/synth#"
XSD_TYPES = ["xsd:string", "xsd:boolean", "xsd:int", "xsd:long", "xsd:double", "xsd:dateTime"]
MODES = ["embed", "reference_singular", "reference_plural"]
WORDS = ["Node", "Disk", "Host", "Zone", "Link", "Pod", "Key", "Log", "Vault", "Queue", "Gate", "Port"]


@dataclass
class Spec:
    classes: Dict[str, List[str]] = field(default_factory=dict)  # name -> parent names
    data_props: Dict[str, Tuple[str, str]] = field(default_factory=dict)  # name -> (domain, xsd)
    obj_props: Dict[str, Tuple[str, str, str]] = field(default_factory=dict)  # name -> (domain, range, mode)
    prop_parents: Dict[str, str] = field(default_factory=dict)
    counter: int = 0

    def fresh(self, stem: str) -> str:
        self.counter += 1
        return f"{stem}{self.counter}"

    def config(self) -> TranslateConfig:
        return TranslateConfig(property_modes={f"s:{n}": m for n, (_, _, m) in self.obj_props.items()})


def to_owx(spec: Spec) -> bytes:
    out = ['<?xml version="1.0"?>',
           f'<Ontology xmlns="http://www.w3.org/2002/07/owl#" ontologyIRI="{NS[:-1]}">',
           f'  <Prefix name="s" IRI="{NS}"/>',
           '  <Prefix name="xsd" IRI="http://www.w3.org/2001/XMLSchema#"/>']

    def ent(tag, name):
        return f"<{tag} abbreviatedIRI={quoteattr('s:' + name)}/>"

    for c in spec.classes:
        out.append(f"  <Declaration>{ent('Class', c)}</Declaration>")
    for p in spec.data_props:
        out.append(f"  <Declaration>{ent('DataProperty', p)}</Declaration>")
    for p in spec.obj_props:
        out.append(f"  <Declaration>{ent('ObjectProperty', p)}</Declaration>")
    for c, parents in spec.classes.items():
        for p in parents:
            out.append(f"  <SubClassOf>{ent('Class', c)}{ent('Class', p)}</SubClassOf>")
    for p, (dom, xsd) in spec.data_props.items():
        out.append(f"  <DataPropertyDomain>{ent('DataProperty', p)}{ent('Class', dom)}</DataPropertyDomain>")
        out.append(f'  <DataPropertyRange>{ent("DataProperty", p)}<Datatype abbreviatedIRI="{xsd}"/></DataPropertyRange>')
    for p, (dom, rng, _) in spec.obj_props.items():
        out.append(f"  <ObjectPropertyDomain>{ent('ObjectProperty', p)}{ent('Class', dom)}</ObjectPropertyDomain>")
        out.append(f"  <ObjectPropertyRange>{ent('ObjectProperty', p)}{ent('Class', rng)}</ObjectPropertyRange>")
    for child, parent in spec.prop_parents.items():
        tag = "DataProperty" if child in spec.data_props else "ObjectProperty"
        kind = "SubDataPropertyOf" if tag == "DataProperty" else "SubObjectPropertyOf"
        out.append(f"  <{kind}>{ent(tag, child)}{ent(tag, parent)}</{kind}>")
    out.append("</Ontology>")
    return ("\n".join(out) + "\n").encode("utf-8")


def add_class(rng: random.Random, spec: Spec) -> None:
    name = spec.fresh(rng.choice(WORDS))
    existing = list(spec.classes)
    k = rng.choice([0, 1, 1, 1, 2]) if existing else 0
    spec.classes[name] = rng.sample(existing, min(k, len(existing)))


def add_data_prop(rng: random.Random, spec: Spec) -> None:
    name = spec.fresh("attr")
    spec.data_props[name] = (rng.choice(list(spec.classes)), rng.choice(XSD_TYPES))
    siblings = [p for p in spec.data_props if p != name]
    if siblings and rng.random() < 0.3:
        spec.prop_parents[name] = rng.choice(siblings)


def add_obj_prop(rng: random.Random, spec: Spec) -> None:
    name = spec.fresh("link")
    classes = list(spec.classes)
    spec.obj_props[name] = (rng.choice(classes), rng.choice(classes), rng.choice(MODES))
    siblings = [p for p in spec.obj_props if p != name]
    if siblings and rng.random() < 0.3:
        spec.prop_parents[name] = rng.choice(siblings)


def remove_class(rng: random.Random, spec: Spec) -> None:
    if len(spec.classes) <= 1:
        return
    victim = rng.choice(list(spec.classes))
    parents = spec.classes.pop(victim)
    for c, ps in spec.classes.items():
        if victim in ps:
            spec.classes[c] = list(dict.fromkeys([p for p in ps if p != victim] + parents))
    for p in [p for p, (d, _) in spec.data_props.items() if d == victim]:
        _remove_prop(spec, p)
    for p in [p for p, (d, r, _) in spec.obj_props.items() if victim in (d, r)]:
        _remove_prop(spec, p)


def _remove_prop(spec: Spec, name: str) -> None:
    spec.data_props.pop(name, None)
    spec.obj_props.pop(name, None)
    spec.prop_parents.pop(name, None)
    for child, parent in list(spec.prop_parents.items()):
        if parent == name:
            del spec.prop_parents[child]


def remove_prop(rng: random.Random, spec: Spec) -> None:
    props = list(spec.data_props) + list(spec.obj_props)
    if props:
        _remove_prop(spec, rng.choice(props))


ADDS = [add_class, add_data_prop, add_data_prop, add_obj_prop]
EDITS = ADDS + [remove_class, remove_prop, remove_prop]


def translatable(spec: Spec) -> bool:
    from owx2proto import parse_owx, translate
    from owx2proto.diagnostics import Owx2ProtoError

    try:
        doc, _ = parse_owx(to_owx(spec))
        translate(doc, spec.config())
    except Owx2ProtoError:
        return False
    return True


def mutate(rng: random.Random, spec: Spec, ops=ADDS, attempts: int = 50) -> Spec:
    """A copy of ``spec`` with one random edit that still translates cleanly."""
    for _ in range(attempts):
        candidate = copy.deepcopy(spec)
        rng.choice(ops)(rng, candidate)
        if translatable(candidate):
            return candidate
    raise RuntimeError("could not find a translatable mutation")


def random_spec(rng: random.Random, n_classes: int, n_data: Optional[int] = None,
                n_obj: Optional[int] = None) -> Spec:
    spec = Spec()
    for _ in range(n_classes):
        add_class(rng, spec)
    n_data = rng.randint(0, 2 * n_classes) if n_data is None else n_data
    n_obj = rng.randint(0, n_classes) if n_obj is None else n_obj
    for _ in range(n_data):
        spec = mutate(rng, spec, [add_data_prop])
    for _ in range(n_obj):
        spec = mutate(rng, spec, [add_obj_prop])
    return spec
