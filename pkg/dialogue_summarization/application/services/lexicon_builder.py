from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Collection, Iterable, TypeVar

from loguru import logger

from dialogue_summarization.application.errors import ConfigError
from dialogue_summarization.application.schemas import Tag

Coarse = tuple[Tag, str | None]
T = TypeVar("T")

# Brown tag stem -> (coarse tag, verb form); closed classes and proper nouns are left out
_BROWN_OPEN_CLASS: dict[str, Coarse] = {
    "VB": (Tag.VERB, "base"),
    "VBD": (Tag.VERB, "past"),
    "VBN": (Tag.VERB, "past"),
    "VBG": (Tag.VERB, None),
    "VBZ": (Tag.VERB, None),
    **{t: (Tag.NOUN, None) for t in ("NN", "NNS")},
    **{t: (Tag.ADJ, None) for t in ("JJ", "JJR", "JJS", "JJT")},
    **{t: (Tag.ADV, None) for t in ("RB", "RBR", "RBT")},
}


def coarse_brown_tag(raw: str) -> Coarse | None:
    """'VBD-HL' -> (VERB, 'past'); foreign words, contractions and closed classes -> None."""
    if raw.startswith("FW") or "+" in raw:
        return None
    return _BROWN_OPEN_CLASS.get(raw.split("-")[0].rstrip("*$"))


@dataclass(frozen=True)
class LexiconEntry:
    word: str
    tag: Tag
    form: str | None
    count: int

    def to_line(self) -> str:
        return "\t".join([self.word, self.tag.value] + ([self.form] if self.form else []))


def _most_frequent(counts: Counter[T], key: Callable[[T], str]) -> T:
    return min(counts, key=lambda item: (-counts[item], key(item)))


def build_lexicon(
    tagged_words: Iterable[tuple[str, str]],
    size: int = 20_000,
    min_count: int = 2,
    skip: Collection[str] = (),
) -> list[LexiconEntry]:
    """
    Majority coarse tag per word from a Brown-tagged word stream.

    Words are lowercased and must be alphabetic. The verb form is the majority
    form among that word's verb readings. Entries are ordered by frequency
    (ties by word) and cut at `size`.
    """
    counts: dict[str, Counter[Coarse]] = defaultdict(Counter)
    for word, raw in tagged_words:
        low = word.lower()
        if not low.isalpha() or low in skip:
            continue
        coarse = coarse_brown_tag(raw)
        if coarse is not None:
            counts[low][coarse] += 1

    entries: list[LexiconEntry] = []
    for word, readings in counts.items():
        total = sum(readings.values())
        if total < min_count:
            continue
        per_tag: Counter[Tag] = Counter()
        for (tag, _), n in readings.items():
            per_tag[tag] += n
        tag = _most_frequent(per_tag, lambda t: t.value)
        forms: Counter[str | None] = Counter({form: n for (t, form), n in readings.items() if t is tag})
        form = _most_frequent(forms, lambda f: f or "")
        entries.append(LexiconEntry(word=word, tag=tag, form=form, count=total))

    entries.sort(key=lambda e: (-e.count, e.word))
    logger.info("Lexicon: {} candidate words, keeping {}", len(entries), min(size, len(entries)))
    return entries[:size]


def write_lexicon(entries: Iterable[LexiconEntry], path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["# word<TAB>TAG[<TAB>form], majority tag from a tagged corpus"]
    lines.extend(e.to_line() for e in entries)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def brown_tagged_words() -> Iterable[tuple[str, str]]:
    """The nltk Brown corpus as (word, tag) pairs."""
    from nltk.corpus import brown

    try:
        return brown.tagged_words()
    except LookupError as e:
        raise ConfigError("nltk Brown corpus is not installed; run `python -m nltk.downloader brown`") from e
