"""Per-space term bags: multi-vector and generalized expansions.

Documents are expanded aggressively: each entity occurrence contributes its
name plus every alias, its class plus every non-top-level superclass, all
name-class pairs, and its identifier (when known), with one count per
occurrence. Queries stay minimal: each annotation contributes exactly one
term, the most specific available (id, then name+class, then class or name
alone), with no alias or superclass closure; the document side of the match
carries the burden. Wh classes contribute one class-only term each; they are
configuration, not annotations, so they are not validated against the KB
(an unknown class simply never matches a posting).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum

from .annotate import AnnotatedText, EntityAnnotation
from .kb import KnowledgeBase, alias_set, normalize_name, super_classes


class Space(str, Enum):
    KW = "KW"
    N = "N"
    C = "C"
    NC = "NC"
    I = "I"
    G = "G"


class ExpansionModel(str, Enum):
    MULTIVECTOR = "multivector"
    GENERALIZED = "generalized"


@dataclass(frozen=True)
class Keyword:
    stem: str


@dataclass(frozen=True)
class Triple:
    """Entity term with optional name/class/id slots; at least one is set.

    Name slots are normalized like the KB name index, so two casings of one
    surface form are a single term.
    """

    name: str | None = None
    class_id: str | None = None
    entity_id: str | None = None

    def __post_init__(self) -> None:
        if self.name is None and self.class_id is None and self.entity_id is None:
            raise ValueError("a Triple needs at least one specified slot")
        if self.name is not None:
            object.__setattr__(self, "name", normalize_name(self.name))


GeneralizedTerm = Keyword | Triple

TermBag = Counter  # GeneralizedTerm -> positive count


@dataclass
class DocRepresentation:
    doc_id: str
    space_bags: dict[Space, TermBag]


def _empty_bags() -> dict[Space, TermBag]:
    return {space: Counter() for space in Space}


def _expansion_sets(ann: EntityAnnotation, kb: KnowledgeBase) -> tuple[set[str], set[str]]:
    """Document-side closure for one annotation: (normalized names, class ids)."""
    if ann.entity_id is not None:
        if ann.entity_id not in kb.entities:
            raise ValueError(f"annotation references unknown entity id {ann.entity_id!r}")
        names = {normalize_name(s) for s in alias_set(kb, ann.entity_id)}
        names.add(normalize_name(ann.name))
    elif ann.name is not None:
        names = {normalize_name(ann.name)}
    else:
        names = set()
    if ann.class_id is not None:
        if ann.class_id not in kb.classes:
            raise ValueError(f"annotation references unknown class id {ann.class_id!r}")
        classes = {ann.class_id, *super_classes(kb, ann.class_id)}
    else:
        classes = set()
    return names, classes


def expand_document(
    at: AnnotatedText,
    kb: KnowledgeBase,
    model: ExpansionModel,
    doc_id: str = "",
) -> DocRepresentation:
    """Document-side expansion; see the module docstring for the closure rules."""
    bags = _empty_bags()
    for token in at.keywords:
        bags[Space.KW][Keyword(token.stem)] += 1
        if model is ExpansionModel.GENERALIZED:
            bags[Space.G][Keyword(token.stem)] += 1
    for ann in at.entities:
        names, classes = _expansion_sets(ann, kb)
        if model is ExpansionModel.MULTIVECTOR:
            for n in names:
                bags[Space.N][Triple(name=n)] += 1
            for c in classes:
                bags[Space.C][Triple(class_id=c)] += 1
            for n in names:
                for c in classes:
                    bags[Space.NC][Triple(name=n, class_id=c)] += 1
            if ann.entity_id is not None:
                bags[Space.I][Triple(entity_id=ann.entity_id)] += 1
        else:
            for n in names:
                bags[Space.G][Triple(name=n)] += 1
            for c in classes:
                bags[Space.G][Triple(class_id=c)] += 1
            for n in names:
                for c in classes:
                    bags[Space.G][Triple(name=n, class_id=c)] += 1
            if ann.entity_id is not None:
                bags[Space.G][Triple(entity_id=ann.entity_id)] += 1
    return DocRepresentation(doc_id=doc_id, space_bags=bags)


def _most_specific_term(ann: EntityAnnotation, kb: KnowledgeBase) -> tuple[Space, Triple]:
    if ann.entity_id is not None:
        if ann.entity_id not in kb.entities:
            raise ValueError(f"annotation references unknown entity id {ann.entity_id!r}")
        return Space.I, Triple(entity_id=ann.entity_id)
    if ann.class_id is not None and ann.class_id not in kb.classes:
        raise ValueError(f"annotation references unknown class id {ann.class_id!r}")
    if ann.name is not None and ann.class_id is not None:
        return Space.NC, Triple(name=ann.name, class_id=ann.class_id)
    if ann.class_id is not None:
        return Space.C, Triple(class_id=ann.class_id)
    return Space.N, Triple(name=ann.name)


def expand_query(
    at: AnnotatedText,
    kb: KnowledgeBase,
    model: ExpansionModel,
    wh: bool,
) -> DocRepresentation:
    """Query-side expansion: one most-specific term per annotation, no closure."""
    bags = _empty_bags()
    for token in at.keywords:
        bags[Space.KW][Keyword(token.stem)] += 1
        if model is ExpansionModel.GENERALIZED:
            bags[Space.G][Keyword(token.stem)] += 1
    for ann in at.entities:
        space, term = _most_specific_term(ann, kb)
        if model is ExpansionModel.MULTIVECTOR:
            bags[space][term] += 1
        else:
            bags[Space.G][term] += 1
    if wh:
        for class_id in at.wh_classes:
            term = Triple(class_id=class_id)
            if model is ExpansionModel.MULTIVECTOR:
                bags[Space.C][term] += 1
            else:
                bags[Space.G][term] += 1
    return DocRepresentation(doc_id="", space_bags=bags)


# --- canonical term serialization --------------------------------------------

_ENCODE = (("%", "%25"), ("/", "%2F"), ("\t", "%09"), ("\n", "%0A"))


def _encode_slot(value: str) -> str:
    for raw, escaped in _ENCODE:
        value = value.replace(raw, escaped)
    if value == "*":
        return "%2A"
    return value


def _decode_slot(value: str) -> str:
    for raw, escaped in (("/", "%2F"), ("\t", "%09"), ("\n", "%0A"), ("*", "%2A")):
        value = value.replace(escaped, raw)
    return value.replace("%25", "%")


def serialize_term(term: GeneralizedTerm) -> str:
    """Canonical one-line form: `k:<stem>` or `t:<name>/<class>/<id>`."""
    if isinstance(term, Keyword):
        return f"k:{term.stem}"
    slots = (
        _encode_slot(term.name) if term.name is not None else "*",
        _encode_slot(term.class_id) if term.class_id is not None else "*",
        _encode_slot(term.entity_id) if term.entity_id is not None else "*",
    )
    return "t:" + "/".join(slots)


def parse_term(text: str) -> GeneralizedTerm:
    """Inverse of serialize_term."""
    if text.startswith("k:"):
        return Keyword(text[2:])
    if text.startswith("t:"):
        parts = text[2:].split("/")
        if len(parts) != 3:
            raise ValueError(f"malformed triple term {text!r}")
        name, class_id, entity_id = (
            None if p == "*" else _decode_slot(p) for p in parts
        )
        return Triple(name=name, class_id=class_id, entity_id=entity_id)
    raise ValueError(f"unknown term serialization {text!r}")


def display_term(term: GeneralizedTerm) -> str:
    """Debug notation: bare stem for keywords, (name/class/id) for triples."""
    if isinstance(term, Keyword):
        return term.stem
    return "({}/{}/{})".format(
        term.name if term.name is not None else "*",
        term.class_id if term.class_id is not None else "*",
        term.entity_id if term.entity_id is not None else "*",
    )
