"""Field-number assignment.

Two strategies keep numbers stable across regenerations:

* ``hash``: every field gets ``XXH32(identity) mod 18999 + 1`` where the
  identity is (message, ancestors..., field) joined by 0x1F.  No previous
  output is needed.
* ``ledger``: numbers are copied from the previously generated file; new
  fields take the lowest free number at or above the start of their
  declaring-class group, and vanished fields are reserved.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Dict, List, Mapping, Optional, Set, Tuple

from .diagnostics import Diagnostic, NumberingError, error, warning
from .proto_ast import MAX_FIELD_NUMBER, MIN_FIELD_NUMBER, RESERVED_RANGE, Field, Message, ProtoFile
from .xxh32 import xxh32

SEPARATOR = b"\x1f"
HASH_SEED = 0


@dataclass(frozen=True)
class FieldIdentity:
    class_name: str
    ancestor_names: Tuple[str, ...]
    field_name: str

    def encode(self) -> bytes:
        parts = (self.class_name, *self.ancestor_names, self.field_name)
        return SEPARATOR.join(p.encode("utf-8") for p in parts)


def hash_number(identity: FieldIdentity) -> int:
    if not identity.class_name or not identity.field_name or not all(identity.ancestor_names):
        raise ValueError(f"incomplete field identity {identity}")
    return xxh32(identity.encode(), HASH_SEED) % MAX_FIELD_NUMBER + 1


def _next(n: int) -> int:
    return n % MAX_FIELD_NUMBER + 1


def assign_numbers_hash(
    message: Message, identities: Mapping[str, FieldIdentity]
) -> Tuple[Message, List[Diagnostic]]:
    """Number every field (oneof members included) of ``message`` by hashing.

    A field whose hash is unique within the message always gets exactly that
    number.  Fields sharing a hash are then placed in lexical order of name,
    probing n -> n mod 18999 + 1 until a free number turns up.
    """
    names = [f.name for f in message.all_fields()]
    if len(names) > MAX_FIELD_NUMBER - len(message.reserved):
        raise NumberingError([error("TOO_MANY_FIELDS",
                                    f"message {message.name} has {len(names)} fields; cannot allocate numbers",
                                    message.line)])
    raw = {name: hash_number(identities[name]) for name in names}
    counts = Counter(raw.values())
    taken: Set[int] = set(message.reserved)
    assigned: Dict[str, int] = {}
    for name in names:
        n = raw[name]
        if counts[n] == 1 and n not in taken:
            assigned[name] = n
    taken |= set(assigned.values())

    diags = []
    for name in sorted(n for n in names if n not in assigned):
        n = raw[name]
        while n in taken:
            n = _next(n)
        taken.add(n)
        assigned[name] = n
        if n != raw[name]:
            diags.append(warning("HASH_COLLISION",
                                 f"{message.name}.{name}: hash number {raw[name]} taken, using {n}",
                                 message.line))
    return message.map_fields(lambda f: replace(f, number=assigned[f.name])), diags


@dataclass
class NumberLedger:
    """Numbers and groups recovered from a previously generated file."""

    assignments: Dict[Tuple[str, str], int] = field(default_factory=dict)
    groups: Dict[Tuple[str, str], str] = field(default_factory=dict)
    reserved: Dict[str, Set[int]] = field(default_factory=dict)

    @classmethod
    def from_proto(cls, ast: ProtoFile) -> "NumberLedger":
        ledger = cls()
        for msg in ast.messages:
            ledger.reserved[msg.name] = set(msg.reserved)
            for f in msg.all_fields():
                ledger.assignments[(msg.name, f.name)] = f.number
                ledger.groups[(msg.name, f.name)] = group_of(msg, f)
        return ledger

    def has_message(self, name: str) -> bool:
        return name in self.reserved


def group_of(message: Message, f: Field) -> str:
    """Declaring-class group used for ledger numbering."""
    if f.options is not None and f.options.class_iri:
        return f.options.class_iri
    return message.name


def _free(start: int, used: Set[int]) -> Optional[int]:
    for lo, hi in ((start, MAX_FIELD_NUMBER), (MIN_FIELD_NUMBER, start - 1)):
        n = lo
        while n <= hi:
            if RESERVED_RANGE[0] <= n <= RESERVED_RANGE[1]:
                n = RESERVED_RANGE[1] + 1
                continue
            if n not in used:
                return n
            n += 1
    return None


def _number_message(message: Message, ledger: Optional[NumberLedger], gap: int) -> Message:
    fields = list(message.all_fields())
    prev = ledger if ledger is not None and ledger.has_message(message.name) else None
    used: Set[int] = set()
    group_start: Dict[str, int] = {}
    reserved: Set[int] = set(message.reserved)
    assigned: Dict[str, int] = {}

    if prev is not None:
        reserved |= prev.reserved[message.name]
        current = {f.name for f in fields}
        for (msg, name), number in prev.assignments.items():
            if msg != message.name:
                continue
            group = prev.groups[(msg, name)]
            group_start[group] = min(group_start.get(group, number), number)
            if name in current:
                assigned[name] = number
            else:
                reserved.add(number)
        used = set(assigned.values()) | reserved

    last_group = None
    cursor = 0
    for f in fields:
        if f.name in assigned:
            continue
        group = group_of(message, f)
        start = group_start.get(group)
        if start is None:
            if prev is None:
                start = cursor + 1 + (gap if last_group is not None else 0)
            else:
                start = max(used, default=0) + 1 + (gap if used else 0)
            group_start[group] = start
        n = _free(start, used)
        if n is None:
            raise NumberingError([error("TOO_MANY_FIELDS",
                                        f"message {message.name}: no free field number left", message.line)])
        assigned[f.name] = n
        used.add(n)
        cursor = max(cursor, n)
        last_group = group

    numbered = message.map_fields(lambda f: replace(f, number=assigned[f.name]))
    return replace(numbered, reserved=tuple(sorted(reserved)))


def assign_numbers_ledger(ast: ProtoFile, previous: Optional[ProtoFile] = None, gap: int = 0) -> ProtoFile:
    """Number ``ast`` so every field already in ``previous`` keeps its number.

    Without ``previous`` the fields are numbered from 1 in flattening order,
    leaving ``gap`` unused numbers between declaring-class groups.
    """
    ledger = None
    if previous is not None:
        from .check import validate

        problems = [d for d in validate(previous) if d.is_error]
        if problems:
            raise NumberingError([error("BAD_PREVIOUS", "previous output violates numbering invariants")]
                                 + problems)
        ledger = NumberLedger.from_proto(previous)
    messages = tuple(_number_message(m, ledger, gap) for m in ast.messages)
    return replace(ast, messages=messages)
