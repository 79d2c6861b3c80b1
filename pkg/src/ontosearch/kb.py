"""Knowledge base: class hierarchy plus entity catalog with alias lookup.

The KB is loaded once from a line-oriented TSV file and is immutable
afterwards, so every operation here is a pure read and safe to share
across workers.

File format (UTF-8, ``#`` starts a comment line):

    CLASS<TAB>class_id<TAB>parent_id,parent_id,...<TAB>TOP|-
    ENTITY<TAB>entity_id<TAB>class_id<TAB>canonical_name<TAB>alias|alias|...

A ``-`` stands for "no parents" / "not top-level"; the alias field may be
empty or omitted. Top-level classes (``TOP``) act as hierarchy roots and
are excluded from every superclass closure.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path


class KBError(ValueError):
    """Malformed or internally inconsistent KB file."""


_WS_RUN = re.compile(r"\s+")


def normalize_name(surface: str) -> str:
    """Canonical surface form: case-folded, internal whitespace collapsed."""
    return _WS_RUN.sub(" ", surface.casefold()).strip()


@dataclass(frozen=True)
class ClassDef:
    class_id: str
    parent_ids: frozenset[str]
    is_top_level: bool


@dataclass(frozen=True)
class EntityDef:
    entity_id: str
    class_id: str
    canonical_name: str
    aliases: frozenset[str]


@dataclass(frozen=True)
class KnowledgeBase:
    """Validated ontology: declared classes, entities, and a surface-form index.

    ``name_index`` maps every normalized canonical name and alias to the set
    of entity ids carrying that surface form; it is exactly the lookup the
    recognizer consults, so annotation and KB share one normalization.
    """

    classes: dict[str, ClassDef]
    entities: dict[str, EntityDef]
    name_index: dict[str, frozenset[str]]


def parse_kb(text: str, origin: str = "<string>") -> KnowledgeBase:
    """Parse and validate KB TSV content; see the module docstring for format."""
    classes: dict[str, ClassDef] = {}
    entities: dict[str, EntityDef] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        tag = fields[0]
        if tag == "CLASS":
            if len(fields) != 4:
                raise KBError(f"{origin}:{lineno}: CLASS line needs 4 fields, got {len(fields)}")
            _, class_id, parents_field, top_field = fields
            if not class_id:
                raise KBError(f"{origin}:{lineno}: empty class id")
            if class_id in classes:
                raise KBError(f"{origin}:{lineno}: duplicate class id {class_id!r}")
            if top_field not in ("TOP", "-"):
                raise KBError(f"{origin}:{lineno}: top-level flag must be TOP or -, got {top_field!r}")
            parents = frozenset(p for p in parents_field.split(",") if p and p != "-")
            is_top = top_field == "TOP"
            if is_top and parents:
                raise KBError(f"{origin}:{lineno}: top-level class {class_id!r} must not have parents")
            classes[class_id] = ClassDef(class_id, parents, is_top)
        elif tag == "ENTITY":
            if len(fields) not in (4, 5):
                raise KBError(f"{origin}:{lineno}: ENTITY line needs 4 or 5 fields, got {len(fields)}")
            entity_id, class_id, canonical = fields[1], fields[2], fields[3]
            if not entity_id:
                raise KBError(f"{origin}:{lineno}: empty entity id")
            if not canonical:
                raise KBError(f"{origin}:{lineno}: empty canonical name for {entity_id!r}")
            if entity_id in entities:
                raise KBError(f"{origin}:{lineno}: duplicate entity id {entity_id!r}")
            alias_field = fields[4] if len(fields) == 5 else ""
            aliases = frozenset(
                a for a in alias_field.split("|") if a and a != "-" and a != canonical
            )
            entities[entity_id] = EntityDef(entity_id, class_id, canonical, aliases)
        else:
            raise KBError(f"{origin}:{lineno}: unknown record tag {tag!r}")

    # referential checks after the whole file is read, so declaration order is free
    for cdef in classes.values():
        for parent in cdef.parent_ids:
            if parent not in classes:
                raise KBError(f"{origin}: class {cdef.class_id!r} references undeclared parent {parent!r}")
    for edef in entities.values():
        if edef.class_id not in classes:
            raise KBError(f"{origin}: entity {edef.entity_id!r} references undeclared class {edef.class_id!r}")

    _check_acyclic(classes, origin)

    name_index: dict[str, set[str]] = {}
    for edef in entities.values():
        for surface in {edef.canonical_name, *edef.aliases}:
            name_index.setdefault(normalize_name(surface), set()).add(edef.entity_id)

    return KnowledgeBase(
        classes=classes,
        entities=entities,
        name_index={k: frozenset(v) for k, v in name_index.items()},
    )


def load_kb(path: str | Path) -> KnowledgeBase:
    """Load and validate a KB file."""
    p = Path(path)
    return parse_kb(p.read_text(encoding="utf-8"), origin=str(p))


def _check_acyclic(classes: dict[str, ClassDef], origin: str) -> None:
    # iterative three-color DFS over the parent relation
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {c: WHITE for c in classes}
    for root in classes:
        if color[root] != WHITE:
            continue
        stack: list[tuple[str, bool]] = [(root, False)]
        while stack:
            node, done = stack.pop()
            if done:
                color[node] = BLACK
                continue
            if color[node] == BLACK:
                continue
            color[node] = GRAY
            stack.append((node, True))
            for parent in classes[node].parent_ids:
                if color[parent] == GRAY:
                    raise KBError(f"{origin}: cycle in class hierarchy involving {parent!r}")
                if color[parent] == WHITE:
                    stack.append((parent, False))


def super_classes(kb: KnowledgeBase, class_id: str) -> frozenset[str]:
    """Transitive parent closure of ``class_id``, minus top-level classes and itself."""
    if class_id not in kb.classes:
        raise KeyError(f"unknown class id {class_id!r}")
    seen: set[str] = set()
    stack = list(kb.classes[class_id].parent_ids)
    while stack:
        current = stack.pop()
        if current in seen:
            continue
        seen.add(current)
        stack.extend(kb.classes[current].parent_ids)
    seen.discard(class_id)
    return frozenset(c for c in seen if not kb.classes[c].is_top_level)


def alias_set(kb: KnowledgeBase, entity_id: str) -> frozenset[str]:
    """All surface forms of the entity, canonical name included."""
    if entity_id not in kb.entities:
        raise KeyError(f"unknown entity id {entity_id!r}")
    edef = kb.entities[entity_id]
    return frozenset({edef.canonical_name, *edef.aliases})


def is_subclass_of(kb: KnowledgeBase, c1: str, c2: str) -> bool:
    """Reflexive subclass test: c2 is c1 itself or in its superclass closure."""
    if c2 not in kb.classes:
        raise KeyError(f"unknown class id {c2!r}")
    return c1 == c2 or c2 in super_classes(kb, c1)
