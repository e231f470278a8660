from __future__ import annotations

from dialogue_summarization.application.schemas import Transcript
from dialogue_summarization.application.services.transcript_loader import split_sentences


def speaker_sentences(tr: Transcript) -> list[tuple[str, str]]:
    """(speaker, sentence) pairs of the raw dialogue in reading order."""
    return [(u.speaker, sentence) for u in tr.utterances for sentence in split_sentences(u)]


def document_sentences(tr: Transcript) -> list[str]:
    """
    Sentences of the raw dialogue in reading order. The first sentence of each
    utterance keeps its "Speaker:" prefix, as it appears in the document text.
    """
    out: list[str] = []
    for u in tr.utterances:
        for i, sentence in enumerate(split_sentences(u)):
            out.append(f"{u.speaker}: {sentence}" if i == 0 else sentence)
    return out


def lead3(tr: Transcript) -> str:
    """First three sentences of the document (all of them when there are fewer)."""
    return " ".join(document_sentences(tr)[:3])


def lead3_attributed(tr: Transcript) -> list[tuple[str, str]]:
    """The LEAD-3 sentences with their speakers, for reported-speech rewriting."""
    return speaker_sentences(tr)[:3]
