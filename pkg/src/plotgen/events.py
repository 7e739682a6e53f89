"""Event/story/corpus data model, text serialization, and corpus splitting.

An event is a 4-tuple of abstracted tokens (subject, verb, object, modifier).
Corpora are stored as UTF-8 text: one event per line with " | " between
fields, a blank line between stories.  The literal token "empty" marks an
absent slot and the literal token "<eos>" in the verb slot marks the
end-of-story sentinel event.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

EMPTY = "empty"
EOS = "<eos>"
LOCATION = "LOCATION"
PERSON_PREFIX = "PERSON"
FIELD_SEP = " | "

# Reserved vocabulary entries with fixed ids.
RESERVED_TOKENS = (EMPTY, EOS, LOCATION)


class ParseError(ValueError):
    """Malformed corpus, clause, or lexicon text."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


@dataclass(frozen=True)
class Event:
    """One abstracted plot event.  object/modifier may be EMPTY."""

    subject: str
    verb: str
    object: str = EMPTY
    modifier: str = EMPTY

    def __post_init__(self):
        for name, tok in zip(SLOT_NAMES, self.tokens()):
            if not tok:
                raise ValueError(f"{name} token must be non-empty")
            if "|" in tok:
                raise ValueError(f"{name} token {tok!r} contains the field separator")
        if self.verb == EMPTY:
            raise ValueError("verb slot cannot be empty")

    def tokens(self) -> tuple[str, str, str, str]:
        return (self.subject, self.verb, self.object, self.modifier)

    @property
    def is_end(self) -> bool:
        return self.verb == EOS


SLOT_NAMES = ("subject", "verb", "object", "modifier")


def end_event() -> Event:
    """The end-of-story sentinel event."""
    return Event(EMPTY, EOS, EMPTY, EMPTY)


def parse_event(line: str, line_no: int | None = None) -> Event:
    """Parse one " | "-separated event line."""
    fields = [f.strip() for f in line.split("|")]
    if len(fields) != 4:
        raise ParseError(f"field count {len(fields)} != 4 in {line!r}", line_no)
    if not fields[1] or fields[1] == EMPTY:
        raise ParseError(f"empty verb field in {line!r}", line_no)
    subject, verb, obj, mod = (f if f else EMPTY for f in fields)
    try:
        return Event(subject, verb, obj, mod)
    except ValueError as exc:
        raise ParseError(str(exc), line_no) from exc


def format_event(event: Event) -> str:
    """Inverse of parse_event: parse_event(format_event(e)) == e."""
    return FIELD_SEP.join(event.tokens())


@dataclass(frozen=True)
class Story:
    """An ordered event sequence.  At most one EOS event, and only at the end."""

    events: tuple[Event, ...]
    id: str = ""

    def __post_init__(self):
        if len(self.events) < 1:
            raise ValueError("story must contain at least one event")
        for e in self.events[:-1]:
            if e.is_end:
                raise ValueError("event after end-of-story sentinel")

    def __len__(self) -> int:
        return len(self.events)

    def content_events(self) -> tuple[Event, ...]:
        """Events without the trailing EOS sentinel, if present."""
        if self.events[-1].is_end:
            return self.events[:-1]
        return self.events

    def verbs(self) -> list[str]:
        return [e.verb for e in self.content_events()]


class VocabIndex:
    """Bidirectional token <-> dense id map with a verb-token subset.

    Ids are contiguous from 0; the sentinels "empty", "<eos>" and "LOCATION"
    hold the reserved ids 0, 1 and 2.
    """

    def __init__(self, tokens: Sequence[str], verb_tokens: Iterable[str]):
        if tuple(tokens[: len(RESERVED_TOKENS)]) != RESERVED_TOKENS:
            raise ValueError(f"vocabulary must start with the reserved tokens {RESERVED_TOKENS}")
        if len(set(tokens)) != len(tokens):
            raise ValueError("duplicate tokens in vocabulary")
        self._tokens = tuple(tokens)
        self._ids = {tok: i for i, tok in enumerate(self._tokens)}
        self._verbs = frozenset(verb_tokens)
        missing = self._verbs - set(self._tokens)
        if missing:
            raise ValueError(f"verb tokens outside vocabulary: {sorted(missing)}")

    def __len__(self) -> int:
        return len(self._tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._ids

    @property
    def tokens(self) -> tuple[str, ...]:
        return self._tokens

    @property
    def verb_tokens(self) -> frozenset[str]:
        return self._verbs

    def id_of(self, token: str) -> int:
        try:
            return self._ids[token]
        except KeyError:
            raise KeyError(f"token {token!r} not in vocabulary") from None

    def token_of(self, idx: int) -> str:
        return self._tokens[idx]

    def verb_ids(self) -> np.ndarray:
        return np.array(sorted(self._ids[v] for v in self._verbs), dtype=np.int64)

    def encode_event(self, event: Event) -> np.ndarray:
        return np.array([self._ids[t] for t in event.tokens()], dtype=np.int64)

    def decode_event(self, ids: Sequence[int]) -> Event:
        s, v, o, m = (self._tokens[int(i)] for i in ids)
        return Event(s, v, o, m)

    def encode_story(self, story: Story) -> np.ndarray:
        return np.stack([self.encode_event(e) for e in story.events])

    @classmethod
    def from_stories(cls, stories: Iterable[Story]) -> "VocabIndex":
        tokens = list(RESERVED_TOKENS)
        seen = set(tokens)
        verbs = set()
        for story in stories:
            for event in story.events:
                for tok in event.tokens():
                    if tok not in seen:
                        seen.add(tok)
                        tokens.append(tok)
                verbs.add(event.verb)
        return cls(tokens, verbs)


@dataclass(frozen=True)
class Corpus:
    """Stories plus vocabulary and a story-level train/test assignment."""

    stories: tuple[Story, ...]
    vocab: VocabIndex
    train_ids: tuple[int, ...] = field(default=())
    test_ids: tuple[int, ...] = field(default=())

    def __post_init__(self):
        n = len(self.stories)
        assigned = sorted(self.train_ids) + sorted(self.test_ids)
        if sorted(assigned) != list(range(n)):
            raise ValueError("train/test assignment must be a disjoint, exhaustive split")
        for story in self.stories:
            for event in story.events:
                for tok in event.tokens():
                    if tok not in self.vocab:
                        raise ValueError(f"token {tok!r} missing from vocabulary")

    @property
    def train_stories(self) -> list[Story]:
        return [self.stories[i] for i in self.train_ids]

    @property
    def test_stories(self) -> list[Story]:
        return [self.stories[i] for i in self.test_ids]

    def fingerprint(self) -> str:
        """Content digest covering stories and the split assignment."""
        h = hashlib.sha256()
        h.update(dump_corpus_text(self).encode("utf-8"))
        h.update(b"\x00train:" + ",".join(map(str, self.train_ids)).encode())
        h.update(b"\x00test:" + ",".join(map(str, self.test_ids)).encode())
        return h.hexdigest()


def corpus_from_stories(stories: Sequence[Story]) -> Corpus:
    """Build an unsplit corpus (everything in the train partition)."""
    stories = tuple(stories)
    vocab = VocabIndex.from_stories(stories)
    return Corpus(stories, vocab, train_ids=tuple(range(len(stories))))


def split_corpus(corpus: Corpus, test_fraction: float, seed: int) -> Corpus:
    """Reassign stories to train/test at story granularity, deterministically.

    The test share is round(test_fraction * story count), clamped so both
    partitions are non-empty.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    n = len(corpus.stories)
    if n < 2:
        raise ValueError("need at least 2 stories to split")
    n_test = int(round(test_fraction * n))
    n_test = min(max(n_test, 1), n - 1)
    rng = np.random.Generator(np.random.PCG64(seed))
    order = rng.permutation(n)
    test = tuple(sorted(int(i) for i in order[:n_test]))
    train = tuple(sorted(int(i) for i in order[n_test:]))
    return Corpus(corpus.stories, corpus.vocab, train_ids=train, test_ids=test)


def parse_corpus_text(text: str) -> list[Story]:
    """Parse the corpus text format: events per line, blank line between stories."""
    stories: list[Story] = []
    current: list[Event] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            if current:
                stories.append(Story(tuple(current), id=f"s{len(stories)}"))
                current = []
            continue
        event = parse_event(line, line_no)
        if current and current[-1].is_end:
            raise ParseError("event after end-of-story sentinel", line_no)
        current.append(event)
    if current:
        stories.append(Story(tuple(current), id=f"s{len(stories)}"))
    return stories


def dump_corpus_text(corpus_or_stories: Corpus | Sequence[Story]) -> str:
    stories = (
        corpus_or_stories.stories
        if isinstance(corpus_or_stories, Corpus)
        else corpus_or_stories
    )
    blocks = ["\n".join(format_event(e) for e in story.events) for story in stories]
    return "\n\n".join(blocks) + "\n"


def load_corpus(path) -> Corpus:
    with open(path, encoding="utf-8") as fh:
        stories = parse_corpus_text(fh.read())
    if not stories:
        raise ParseError(f"no stories in {path}")
    return corpus_from_stories(stories)


def save_corpus(corpus_or_stories, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_corpus_text(corpus_or_stories))
