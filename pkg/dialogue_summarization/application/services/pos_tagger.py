from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from loguru import logger

from dialogue_summarization.application.errors import ConfigError, TaggingError
from dialogue_summarization.application.schemas import BOS, EOS, Tag, TaggedSentence, TaggedToken
from dialogue_summarization.application.services.transcript_loader import ABBREVIATIONS

_RESOURCES = "dialogue_summarization.application.resources"

_EMOTICON = re.compile(r"^(?:[:;=8][-o^']?[)(\]\[/\\|DpPoO3*]+|<3|\^\^|[)(/\\]+[-o^']?[:;=])$")
_LEADING = "\"'([{«"
_TRAILING = re.compile(r"^(.*?)((?:\.\.\.|[.,!?;:\"')\]}»…])+)$")
_PUNCT_PIECE = re.compile(r"\.\.\.|.")
_DIGITS = re.compile(r"^[$£€]?\d+(?:[.,:/]\d+)*(?:st|nd|rd|th|s|am|pm|k|%)?$", re.IGNORECASE)

CLITICS = ("n't", "'ll", "'re", "'ve", "'m", "'s", "'d")
_NEGATIONS = {"can't": ("can", "n't"), "won't": ("will", "n't"), "shan't": ("shall", "n't"), "cannot": ("can", "not")}


def _split_clitics(word: str) -> list[str]:
    low = word.lower()
    if low in _NEGATIONS:
        head, tail = _NEGATIONS[low]
        return [word[: len(head)] if low.startswith(head) else head, tail]
    for clitic in CLITICS:
        if low.endswith(clitic) and len(low) > len(clitic):
            return [word[: -len(clitic)], word[-len(clitic):]]
    return [word]


def tokenize(sentence: str) -> list[str]:
    """
    Whitespace split, then peel leading/trailing punctuation and split English clitics.

    "I'll take my car." -> ["I", "'ll", "take", "my", "car", "."]
    Emoticons such as ":/" or ":)" stay whole.
    """
    tokens: list[str] = []
    for chunk in sentence.replace("’", "'").replace("‘", "'").split():
        if _EMOTICON.match(chunk) or chunk.lower() in ABBREVIATIONS:
            tokens.append(chunk)
            continue

        while len(chunk) > 1 and chunk[0] in _LEADING and chunk.lower() not in CLITICS:
            tokens.append(chunk[0])
            chunk = chunk[1:]

        trailing: list[str] = []
        m = _TRAILING.match(chunk)
        if m:
            if not m.group(1):
                # the whole chunk is punctuation ("--", "?!", "...")
                tokens.extend(_PUNCT_PIECE.findall(chunk))
                continue
            chunk = m.group(1)
            trailing = _PUNCT_PIECE.findall(m.group(2))

        tokens.extend(_split_clitics(chunk))
        tokens.extend(trailing)
    return tokens


def _read_lexicon(text: str) -> dict[str, tuple[Tag, str | None]]:
    entries: dict[str, tuple[Tag, str | None]] = {}
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.rstrip("\n").split("\t")
        word, tag = parts[0].lower(), Tag(parts[1])
        form = parts[2] if len(parts) > 2 else None
        entries.setdefault(word, (tag, form))
    return entries


def _resource_text(name: str) -> str:
    return resources.files(_RESOURCES).joinpath(name).read_text(encoding="utf-8")


@dataclass
class PosTagger:
    """Lexicon + suffix-rule tagger over the coarse tag set."""

    closed_class: dict[str, tuple[Tag, str | None]]
    open_class: dict[str, tuple[Tag, str | None]]
    _base_verbs: frozenset[str] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self._base_verbs = frozenset(
            w for w, (tag, form) in self.open_class.items() if tag is Tag.VERB and form == "base"
        )

    @classmethod
    def load(cls, closed_path: Path | None = None, lexicon_path: Path | None = None) -> "PosTagger":
        closed = _read_lexicon(closed_path.read_text(encoding="utf-8") if closed_path else _resource_text("closed_class.tsv"))
        open_ = _read_lexicon(lexicon_path.read_text(encoding="utf-8") if lexicon_path else _resource_text("lexicon.tsv"))
        logger.debug("Loaded tagger lexicon: {} closed-class, {} open-class entries", len(closed), len(open_))
        return cls(closed_class=closed, open_class=open_)

    def extended(self, path: Path) -> "PosTagger":
        """A copy whose open-class table also holds the entries of an external lexicon; bundled entries win."""
        if not path.is_file():
            raise ConfigError(f"lexicon not found: {path}")
        try:
            extra = _read_lexicon(path.read_text(encoding="utf-8"))
        except (ValueError, IndexError) as e:
            raise ConfigError(f"invalid lexicon {path}: {e}") from e
        merged = {**extra, **self.open_class}
        logger.info("Extended tagger lexicon with {} entries from {}", len(merged) - len(self.open_class), path)
        return PosTagger(closed_class=self.closed_class, open_class=merged)

    # ---------------- lookups ----------------

    def _third_person_base(self, low: str) -> str | None:
        """'needs' -> 'need', 'watches' -> 'watch', 'tries' -> 'try' when the base is a known verb."""
        candidates = []
        if low.endswith("ies"):
            candidates.append(low[:-3] + "y")
        if low.endswith("es"):
            candidates.append(low[:-2])
        if low.endswith("s"):
            candidates.append(low[:-1])
        return next((c for c in candidates if c in self._base_verbs), None)

    def is_base_verb(self, word: str) -> bool:
        return word.lower() in self._base_verbs

    def tag_word(self, surface: str) -> Tag:
        low = surface.lower()
        if _EMOTICON.match(surface):
            return Tag.X
        if not any(ch.isalnum() for ch in surface):
            return Tag.PUNCT

        # 1) closed class, 2) open class
        if low in self.closed_class:
            return self.closed_class[low][0]
        if low in self.open_class:
            return self.open_class[low][0]

        # 3) suffix rules
        if low.isalpha() and len(low) > 3:
            if low.endswith("s") and self._third_person_base(low):
                return Tag.VERB
            if low.endswith(("ing", "ed")):
                return Tag.VERB
            if low.endswith("ly"):
                return Tag.ADV
            if low.endswith(("tion", "sion", "ness", "ment", "ship", "ity")):
                return Tag.NOUN
            if low.endswith(("ful", "ous", "able", "ible", "ive", "less", "ical")):
                return Tag.ADJ

        # 4) digits
        if _DIGITS.match(low):
            return Tag.NUM

        return Tag.NOUN

    def tag(self, tokens: Sequence[str], sentence_id: int = 0, speaker: str = "") -> TaggedSentence:
        tagged = tuple(
            TaggedToken(surface=s, lower=s.lower(), tag=self.tag_word(s), position=i)
            for i, s in enumerate(tokens)
        )
        return TaggedSentence(tokens=tagged, sentence_id=sentence_id, speaker=speaker)


def from_pretagged(pairs: Iterable[tuple[str, Tag]], sentence_id: int = 0, speaker: str = "") -> TaggedSentence:
    """Build an unwrapped TaggedSentence from externally tagged (surface, tag) pairs."""
    tokens = []
    for i, (surface, tag) in enumerate(pairs):
        if tag is Tag.META:
            raise TaggingError(f"pre-tagged input may not use the META tag ({surface!r})")
        tokens.append(TaggedToken(surface=surface, lower=surface.lower(), tag=tag, position=i))
    return TaggedSentence(tokens=tuple(tokens), sentence_id=sentence_id, speaker=speaker)


def wrap_meta(ts: TaggedSentence) -> TaggedSentence:
    """Prepend <bos> and append <eos>; positions become bos=0, first word=1, ..."""
    if any(t.is_meta for t in ts.tokens):
        raise TaggingError(f"sentence {ts.sentence_id} is already wrapped")
    if not ts.tokens:
        raise TaggingError(f"sentence {ts.sentence_id} has no tokens")

    n = len(ts.tokens)
    tokens = (
        (TaggedToken(surface=BOS, lower=BOS, tag=Tag.META, position=0),)
        + tuple(
            TaggedToken(surface=t.surface, lower=t.lower, tag=t.tag, position=i + 1)
            for i, t in enumerate(ts.tokens)
        )
        + (TaggedToken(surface=EOS, lower=EOS, tag=Tag.META, position=n + 1),)
    )
    return TaggedSentence(
        tokens=tokens,
        sentence_id=ts.sentence_id,
        speaker=ts.speaker,
        utterance_index=ts.utterance_index,
        segment=ts.segment,
    )


@lru_cache
def get_tagger(lexicon_path: Path | None = None) -> PosTagger:
    tagger = PosTagger.load()
    return tagger.extended(Path(lexicon_path)) if lexicon_path else tagger


def tag(tokens: Sequence[str], sentence_id: int = 0, speaker: str = "") -> TaggedSentence:
    return get_tagger().tag(tokens, sentence_id=sentence_id, speaker=speaker)


def load_stopwords(path: Path | str | None = None) -> frozenset[str]:
    """One lowercase word per line; the bundled English list when no path is given."""
    if path is None:
        text = _resource_text("stopwords.txt")
    else:
        path = Path(path)
        if not path.is_file():
            raise TaggingError(f"stopword list not found: {path}")
        text = path.read_text(encoding="utf-8")
    words = frozenset(w.strip().lower() for w in text.splitlines() if w.strip() and not w.startswith("#"))
    logger.debug("Loaded {} stopwords", len(words))
    return words
