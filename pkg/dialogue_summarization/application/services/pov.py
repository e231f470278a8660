from __future__ import annotations

import re
from functools import lru_cache
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Sequence

from loguru import logger
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from dialogue_summarization.application.errors import ConfigError
from dialogue_summarization.application.schemas import Tag
from dialogue_summarization.application.services.pos_tagger import PosTagger, get_tagger, tokenize
from dialogue_summarization.application.services.transcript_loader import attribute_sentences

if TYPE_CHECKING:
    from dialogue_summarization.application.services.summarizer import SummaryPath

SPEAKER = "{speaker}"
_THIRD_PERSON = frozenset({"he", "she", "it", "they", "him", "her", "them", "his", "hers", "its", "their", "theirs"})
_SIBILANT = re.compile(r"(?:s|x|z|ch|sh|o)$")


class PovRuleSet(BaseModel):
    """
    Rewrite tables for first-person -> reported speech.

    "{speaker}" in pronoun_map values and question_template is replaced by the
    lowercased speaker name.
    """

    model_config = ConfigDict(frozen=True)

    pronoun_map: dict[str, str] = {
        "i": SPEAKER,
        "me": SPEAKER,
        "my": SPEAKER + "'s",
        "mine": SPEAKER + "'s",
        "we": "they",
        "our": "their",
        "ours": "theirs",
        "us": "them",
    }
    # first-person words that act as a singular subject for agreement
    singular_subjects: frozenset[str] = frozenset({"i"})
    possessives: frozenset[str] = frozenset({"my", "mine", "our", "ours"})
    modal_map: dict[str, str] = {"can": "could", "may": "might", "must": "had to"}
    question_template: str = SPEAKER + " asks {utterance}"
    agreement_fixups: dict[str, str] = {
        "am": "is",
        "'m": "'s",
        "are": "is",
        "have": "has",
        "'ve": "'s",
        "do": "does",
        "were": "was",
    }

    @field_validator("pronoun_map")
    @classmethod
    def _no_third_person_keys(cls, v: dict[str, str]) -> dict[str, str]:
        bad = sorted(set(v) & _THIRD_PERSON)
        if bad:
            raise ValueError(f"pronoun_map must not rewrite third-person forms: {bad}")
        return {k.lower(): val for k, val in v.items()}

    @field_validator("question_template")
    @classmethod
    def _template_has_utterance(cls, v: str) -> str:
        if "{utterance}" not in v:
            raise ValueError("question_template needs an {utterance} placeholder")
        return v

    @classmethod
    def from_json(cls, path: Path | str) -> "PovRuleSet":
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"POV rules file not found: {path}")
        try:
            rules = cls.model_validate_json(path.read_text(encoding="utf-8"))
        except ValidationError as e:
            raise ConfigError(f"invalid POV rules in {path}: {e}") from e
        logger.debug("Loaded POV rules from {}", path)
        return rules

    def question_prefix(self, speaker: str) -> str:
        return self.question_template.split("{utterance}")[0].replace(SPEAKER, speaker)


@lru_cache
def default_rules() -> PovRuleSet:
    return PovRuleSet()


def _inflect_third_person(verb: str) -> str:
    if verb.endswith("y") and len(verb) > 1 and verb[-2] not in "aeiou":
        return verb[:-1] + "ies"
    if _SIBILANT.search(verb):
        return verb + "es"
    return verb + "s"


def fix_agreement(
    tokens: Sequence[tuple[str, Tag]],
    singular_subjects: Iterable[int],
    rules: PovRuleSet | None = None,
    tagger: PosTagger | None = None,
) -> list[tuple[str, Tag]]:
    """
    Conjugate the word right after each substituted singular subject.

    Auxiliaries and clitics go through rules.agreement_fixups; any other known
    base-form verb gets the third-person -s / -es / -ies ending.
    """
    rules = rules or default_rules()
    tagger = tagger or get_tagger()
    out = list(tokens)
    for i in sorted(set(singular_subjects)):
        j = i + 1
        if j >= len(out):
            continue
        word, tag = out[j]
        if word in rules.agreement_fixups:
            out[j] = (rules.agreement_fixups[word], tag)
        elif tag is Tag.VERB and word not in rules.modal_map and tagger.is_base_verb(word):
            out[j] = (_inflect_third_person(word), tag)
    return out


@lru_cache(maxsize=256)
def _possessive_pattern(name: str) -> re.Pattern[str]:
    spaced = r"\s+".join(re.escape(part) for part in name.split())
    return re.compile(rf"(?<![\w']){spaced}'s(?![\w'])", re.IGNORECASE)


def _tagged_words(sentence: "SummaryPath | str", name: str, tagger: PosTagger) -> list[tuple[str, Tag]]:
    if not isinstance(sentence, str):
        return [(w.lower(), t) for w, t in zip(sentence.words, sentence.tags, strict=True)]

    words: list[tuple[str, Tag]] = []
    start = 0
    # a possessive written by an earlier conversion stays one token, even for "mary ann's"
    for m in _possessive_pattern(name).finditer(sentence) if name else ():
        words.extend((t.lower, t.tag) for t in tagger.tag(tokenize(sentence[start:m.start()])).tokens)
        words.append((f"{name}'s", Tag.NOUN))
        start = m.end()
    words.extend((t.lower, t.tag) for t in tagger.tag(tokenize(sentence[start:])).tokens)
    return words


def convert(
    sentence: "SummaryPath | str",
    speaker: str,
    rules: PovRuleSet | None = None,
    keep_possessives: bool = False,
    tagger: PosTagger | None = None,
) -> str:
    """
    Reported-speech rewrite of one summary sentence.

    Order: questions are wrapped in the template and left otherwise untouched;
    other sentences get pronoun, then modal, then agreement rewrites.
    Output is lowercase throughout.
    """
    rules = rules or default_rules()
    name = " ".join(speaker.split()).lower()
    tagger = tagger or get_tagger()
    words = _tagged_words(sentence, name, tagger)
    if not words:
        return ""
    text = " ".join(w for w, _ in words)

    if words[-1][0] == "?":
        prefix = rules.question_prefix(name)
        if text.startswith(prefix):
            return text
        return rules.question_template.replace(SPEAKER, name).replace("{utterance}", text)

    rewritten: list[tuple[str, Tag]] = []
    subjects: list[int] = []
    for word, tag in words:
        if word in rules.pronoun_map and not (keep_possessives and word in rules.possessives):
            if word in rules.singular_subjects:
                subjects.append(len(rewritten))
            target = rules.pronoun_map[word]
            rewritten.append((target.replace(SPEAKER, name), Tag.NOUN if SPEAKER in target else tag))
        elif tag is Tag.VERB and word in rules.modal_map:
            # "had to" expands to two tokens
            for piece in rules.modal_map[word].split():
                rewritten.append((piece, Tag.VERB))
        else:
            rewritten.append((word, tag))

    return " ".join(w for w, _ in fix_agreement(rewritten, subjects, rules, tagger))


def convert_summary(
    text: str,
    speaker: str | None = None,
    rules: PovRuleSet | None = None,
    keep_possessives: bool = False,
    tagger: PosTagger | None = None,
) -> list[str]:
    """
    Rewrite a finished summary (another system's output, a baseline) sentence by sentence.

    Speakers come from "Name:" prefixes, as in attribute_sentences; sentences
    with no known speaker are kept as they are.
    """
    out = []
    for owner, sentence in attribute_sentences(text, speaker):
        out.append(convert(sentence, owner, rules, keep_possessives, tagger) if owner else sentence)
    return out
