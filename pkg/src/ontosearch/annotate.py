"""Text analysis: stemmed keyword tokens, gazetteer entity annotations,
and interrogative-word mapping.

Entity recognition runs on the raw text, before stop-word removal, so
multiword surface forms that contain stop-words still match. Recognition is
a deterministic leftmost-longest dictionary match against the KB's
normalized surface forms: a surface held by exactly one entity yields a
fully identified annotation; a surface shared by several entities of one
class yields name+class; mixed classes fall back to name only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .kb import KnowledgeBase, normalize_name
from .stem import stem

# alphanumeric runs, keeping internal hyphens ("co-chaired" stays one token)
_TOKEN = re.compile(r"[^\W_]+(?:-[^\W_]+)*", re.UNICODE)

DEFAULT_STOPWORDS = frozenset(
    """
    a about above after again against all am an and any are as at be because
    been before being below between both but by did do does doing down during
    each few for from further had has have having he her here hers herself him
    himself his how i if in into is it its itself just me more most my myself
    no nor not of off on once only or other our ours ourselves out over own
    s same several she should so some such t than that the their theirs them
    themselves then there these they this those through to too under until up
    very was we were what when where which while who whom why will with you
    your yours yourself
    """.split()
)

# most-general class per interrogative; "what" and "how" stay unmapped
DEFAULT_WH_MAPPING = {
    "who": "Person",
    "which": "Person",
    "where": "Location",
    "when": "DayTime",
}


@dataclass(frozen=True)
class Token:
    surface: str
    stem: str
    char_span: tuple[int, int]


@dataclass(frozen=True)
class EntityAnnotation:
    """A recognized mention; unspecified slots are None.

    At least one slot must be specified, and a known identifier implies the
    name and class are known too (they are derivable from it).
    """

    char_span: tuple[int, int]
    surface: str
    name: str | None = None
    class_id: str | None = None
    entity_id: str | None = None

    def __post_init__(self) -> None:
        if self.name is None and self.class_id is None and self.entity_id is None:
            raise ValueError("annotation must specify at least one of name/class/id")
        if self.entity_id is not None and (self.name is None or self.class_id is None):
            raise ValueError("an identified annotation must carry name and class")


@dataclass(frozen=True)
class AnnotatedText:
    source: str
    keywords: list[Token]
    entities: list[EntityAnnotation]
    wh_classes: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class AnnotationOptions:
    """Knobs for `annotate`.

    treat_names_as_keywords: True for the multi-vector models (entity-name
    tokens stay in the keyword list), False for the generalized-term models
    (tokens inside entity spans are dropped).
    wh_mapping: interrogative-word table; None disables wh-class extraction.
    wh_override: per-query class that replaces the leading-word lookup.
    """

    stopwords: frozenset[str] = DEFAULT_STOPWORDS
    treat_names_as_keywords: bool = True
    wh_mapping: dict[str, str] | None = None
    wh_override: str | None = None


def tokenize_keywords(text: str, stopwords: frozenset[str] | set[str]) -> list[Token]:
    """Split on non-alphanumeric boundaries, case-fold, drop stop-words, stem."""
    tokens = []
    for m in _TOKEN.finditer(text):
        folded = m.group().casefold()
        if folded in stopwords:
            continue
        tokens.append(Token(surface=m.group(), stem=stem(folded), char_span=m.span()))
    return tokens


def _gazetteer_pattern(kb: KnowledgeBase) -> re.Pattern | None:
    surfaces = sorted(kb.name_index, key=lambda s: (-len(s), s))
    if not surfaces:
        return None
    parts = []
    for surface in surfaces:
        words = [re.escape(w) for w in surface.split(" ")]
        parts.append(r"\s+".join(words))
    body = "|".join(parts)
    return re.compile(rf"(?<![^\W_])(?:{body})(?![^\W_])", re.IGNORECASE | re.UNICODE)


def recognize_entities(text: str, kb: KnowledgeBase) -> list[EntityAnnotation]:
    """Leftmost-longest non-overlapping gazetteer matches, in text order."""
    pattern = _gazetteer_pattern(kb)
    if pattern is None:
        return []
    annotations = []
    for m in pattern.finditer(text):
        surface = m.group()
        entity_ids = kb.name_index.get(normalize_name(surface))
        if not entity_ids:
            continue
        if len(entity_ids) == 1:
            entity = kb.entities[next(iter(entity_ids))]
            annotations.append(
                EntityAnnotation(
                    char_span=m.span(),
                    surface=surface,
                    name=entity.canonical_name,
                    class_id=entity.class_id,
                    entity_id=entity.entity_id,
                )
            )
            continue
        classes = {kb.entities[e].class_id for e in entity_ids}
        if len(classes) == 1:
            annotations.append(
                EntityAnnotation(
                    char_span=m.span(),
                    surface=surface,
                    name=surface,
                    class_id=next(iter(classes)),
                )
            )
        else:
            annotations.append(
                EntityAnnotation(char_span=m.span(), surface=surface, name=surface)
            )
    return annotations


def map_interrogative(word: str, mapping: dict[str, str]) -> str | None:
    """Configured class for an interrogative word, or None if unmapped."""
    return mapping.get(word.casefold())


def annotate(text: str, kb: KnowledgeBase, opts: AnnotationOptions) -> AnnotatedText:
    """Full analysis of one text: keywords, entity annotations, wh classes."""
    entities = recognize_entities(text, kb)
    keywords = tokenize_keywords(text, opts.stopwords)
    if not opts.treat_names_as_keywords and entities:
        spans = [e.char_span for e in entities]
        keywords = [
            t
            for t in keywords
            if not any(s <= t.char_span[0] and t.char_span[1] <= e for s, e in spans)
        ]
    wh_classes: list[str] = []
    if opts.wh_mapping is not None:
        if opts.wh_override is not None:
            wh_classes = [opts.wh_override]
        else:
            lead = _TOKEN.search(text)
            if lead:
                mapped = map_interrogative(lead.group(), opts.wh_mapping)
                if mapped is not None:
                    wh_classes = [mapped]
    return AnnotatedText(source=text, keywords=keywords, entities=entities, wh_classes=wh_classes)


def load_stopwords(path: str | Path) -> frozenset[str]:
    """One word per line, case-folded; blank lines ignored."""
    words = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        word = line.strip()
        if word:
            words.add(word.casefold())
    return frozenset(words)


def load_wh_mapping(path: str | Path) -> dict[str, str]:
    """TSV `word<TAB>class_id`; word keys are case-folded."""
    mapping: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2 or not fields[0] or not fields[1]:
            raise ValueError(f"{path}:{lineno}: expected `word<TAB>class_id`")
        mapping[fields[0].casefold()] = fields[1]
    return mapping
