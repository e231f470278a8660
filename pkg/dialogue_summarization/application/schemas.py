from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field


class Tag(str, Enum):
    NOUN = "NOUN"
    VERB = "VERB"
    ADJ = "ADJ"
    ADV = "ADV"
    PRON = "PRON"
    DET = "DET"
    ADP = "ADP"
    NUM = "NUM"
    PART = "PART"
    CONJ = "CONJ"
    PUNCT = "PUNCT"
    META = "META"
    X = "X"


BOS = "<bos>"
EOS = "<eos>"
META_WORDS = frozenset({BOS, EOS})


# --- Transcript ---

class Utterance(BaseModel):
    model_config = ConfigDict(frozen=True)

    speaker: str = Field(min_length=1)
    text: str
    index: int = Field(ge=0)
    # pre-tagged input mode: [[surface, tag], ...] replaces tokenization + tagging
    tokens: tuple[tuple[str, Tag], ...] | None = None
    # pre-segmented input: topic block label
    segment: int | None = None


class Transcript(BaseModel):
    model_config = ConfigDict(frozen=True)

    doc_id: str
    utterances: tuple[Utterance, ...]
    # reference summary carried by document records (SAMSum / DialogSum style)
    summary: str | None = None

    def render(self) -> str:
        """The raw dialogue as "Speaker: text" lines."""
        return "\n".join(f"{u.speaker}: {u.text}" for u in self.utterances)

    @property
    def speakers(self) -> list[str]:
        """Speakers in order of first appearance."""
        seen: dict[str, None] = {}
        for u in self.utterances:
            seen.setdefault(u.speaker, None)
        return list(seen)


# --- Tagged text ---

@dataclass(frozen=True)
class TaggedToken:
    surface: str
    lower: str
    tag: Tag
    position: int

    @property
    def is_meta(self) -> bool:
        return self.tag is Tag.META


@dataclass(frozen=True)
class TaggedSentence:
    tokens: tuple[TaggedToken, ...]
    sentence_id: int
    speaker: str
    utterance_index: int = 0
    segment: int | None = None

    @property
    def is_wrapped(self) -> bool:
        return bool(self.tokens) and self.tokens[0].is_meta and self.tokens[-1].is_meta

    @property
    def words(self) -> list[str]:
        """Lowercased non-META words."""
        return [t.lower for t in self.tokens if not t.is_meta]

    @property
    def text(self) -> str:
        return " ".join(self.words)
