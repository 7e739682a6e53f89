"""Turn structured clause records into abstracted events via lexicon tables.

The lexicon replaces live WordNet/VerbNet lookups: noun_map carries
precomputed grandparent-synset identifiers, verb_map carries verb-class
identifiers.  Named entities become PERSON<k> (numbered per story in
first-appearance order) and known locations become LOCATION.

Lexicon file: one mapping per line, "kind<TAB>key<TAB>value" with kind in
{noun, verb, entity, location}.  Entity/location rows ignore the value
column (use "-").  Clause file: one clause per line, "s | v | o | m" with
"-" for an absent slot, blank line between stories.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .events import (
    EMPTY,
    LOCATION,
    PERSON_PREFIX,
    Event,
    ParseError,
    Story,
    end_event,
)

_LEXICON_KINDS = ("noun", "verb", "entity", "location")
ABSENT = "-"


def stem(word: str) -> str:
    """Lowercase suffix-stripping stemmer.

    Rules, applied in order on the lowercased word: ies->y, ied->y (ie for
    very short stems), then the first matching of -ing/-ed/-es/-s is removed
    when at least three characters remain (collapsing a trailing doubled
    consonant after -ing/-ed), and finally a trailing "e" is dropped from
    stems of five or more characters.  The same function runs at lexicon
    build and lookup time, so only consistency matters, not linguistics.
    """
    w = word.lower()
    if len(w) <= 3:
        return w
    if w.endswith("ies") and len(w) >= 5:
        return w[:-3] + "y"
    if w.endswith("ied"):
        return w[:-3] + ("y" if len(w) >= 6 else "ie")
    for suffix in ("ing", "ed", "es", "s"):
        if w.endswith(suffix) and len(w) - len(suffix) >= 3:
            w = w[: -len(suffix)]
            if suffix in ("ing", "ed") and len(w) >= 4 and w[-1] == w[-2] and w[-1] not in "aeiou":
                w = w[:-1]
            break
    if w.endswith("e") and len(w) >= 5:
        w = w[:-1]
    return w


@dataclass(frozen=True)
class Lexicon:
    """Precomputed abstraction tables; keys of noun_map/verb_map are stemmed."""

    noun_map: dict[str, str]
    verb_map: dict[str, str]
    entities: frozenset[str]
    locations: frozenset[str]


@dataclass(frozen=True)
class ClauseRecord:
    """One post-split clause: raw words, None for an absent slot."""

    subject: str | None
    verb: str
    object: str | None = None
    modifier: str | None = None

    def __post_init__(self):
        if not self.verb or self.verb == ABSENT:
            raise ValueError("clause verb must be non-empty")


def load_lexicon(path) -> Lexicon:
    nouns: dict[str, str] = {}
    verbs: dict[str, str] = {}
    entities: set[str] = set()
    locations: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ParseError(f"expected 3 tab-separated fields, got {len(parts)}", line_no)
            kind, key, value = (p.strip() for p in parts)
            if kind not in _LEXICON_KINDS:
                raise ParseError(f"unknown lexicon kind {kind!r}", line_no)
            if not key:
                raise ParseError("empty lexicon key", line_no)
            if kind in ("noun", "verb"):
                if not value or "|" in value:
                    raise ParseError(f"bad lexicon value {value!r}", line_no)
                target = nouns if kind == "noun" else verbs
                target[stem(key)] = value
            elif kind == "entity":
                entities.add(key)
            else:
                locations.add(key)
    return Lexicon(nouns, verbs, frozenset(entities), frozenset(locations))


def abstract_noun(word: str, lexicon: Lexicon, entity_state: dict[str, int]) -> str:
    """Abstract one noun-slot word.

    Entities map to PERSON<k> with k assigned in first-appearance order
    (entity_state is the per-story counter), locations to LOCATION, known
    nouns to their synset identifier, everything else to its own stem.
    """
    if word in lexicon.entities:
        if word not in entity_state:
            entity_state[word] = len(entity_state)
        return f"{PERSON_PREFIX}{entity_state[word]}"
    if word in lexicon.locations:
        return LOCATION
    stemmed = stem(word)
    return lexicon.noun_map.get(stemmed, stemmed)


def abstract_verb(word: str, lexicon: Lexicon) -> str:
    stemmed = stem(word)
    return lexicon.verb_map.get(stemmed, stemmed)


def eventify_story(
    clauses: Sequence[ClauseRecord], lexicon: Lexicon, story_id: str = ""
) -> Story:
    """One event per clause, in order, with a terminal EOS event appended.

    Entity numbering restarts for every story.
    """
    if not clauses:
        raise ValueError("cannot eventify an empty clause list")
    entity_state: dict[str, int] = {}
    events = []
    for clause in clauses:
        slots = []
        for word in (clause.subject, clause.object, clause.modifier):
            slots.append(EMPTY if word is None else abstract_noun(word, lexicon, entity_state))
        subject, obj, mod = slots
        events.append(Event(subject, abstract_verb(clause.verb, lexicon), obj, mod))
    events.append(end_event())
    return Story(tuple(events), id=story_id)


def parse_clause_text(text: str) -> list[list[ClauseRecord]]:
    """Parse the clause file format into per-story clause lists."""
    stories: list[list[ClauseRecord]] = []
    current: list[ClauseRecord] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            if current:
                stories.append(current)
                current = []
            continue
        fields = [f.strip() for f in line.split("|")]
        if len(fields) != 4:
            raise ParseError(f"field count {len(fields)} != 4 in {line!r}", line_no)
        subject, verb, obj, mod = (None if f in ("", ABSENT) else f for f in fields)
        if verb is None:
            raise ParseError(f"missing verb in {line!r}", line_no)
        current.append(ClauseRecord(subject, verb, obj, mod))
    if current:
        stories.append(current)
    return stories


def load_clauses(path) -> list[list[ClauseRecord]]:
    with open(path, encoding="utf-8") as fh:
        stories = parse_clause_text(fh.read())
    if not stories:
        raise ParseError(f"no stories in {path}")
    return stories
