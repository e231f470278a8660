from __future__ import annotations

from typing import Iterable

import numpy as np
from pydantic import BaseModel

from dialogue_summarization.application.schemas import Transcript


class DatasetStats(BaseModel):
    files: int
    dialogue_chars: int
    dialogue_words: int
    # only when records carry a reference summary
    summary_files: int = 0
    summary_chars: int | None = None
    summary_words: int | None = None


def _rounded_mean(values: list[int]) -> int:
    # half-up, not banker's rounding
    return int(np.floor(np.mean(values) + 0.5))


def dataset_stats(transcripts: Iterable[Transcript]) -> DatasetStats:
    """File count and mean lengths, rounded to whole characters / words."""
    dialogue_chars: list[int] = []
    dialogue_words: list[int] = []
    summary_chars: list[int] = []
    summary_words: list[int] = []
    for tr in transcripts:
        text = tr.render()
        dialogue_chars.append(len(text))
        dialogue_words.append(len(text.split()))
        if tr.summary is not None:
            summary_chars.append(len(tr.summary))
            summary_words.append(len(tr.summary.split()))

    if not dialogue_chars:
        return DatasetStats(files=0, dialogue_chars=0, dialogue_words=0)
    return DatasetStats(
        files=len(dialogue_chars),
        dialogue_chars=_rounded_mean(dialogue_chars),
        dialogue_words=_rounded_mean(dialogue_words),
        summary_files=len(summary_chars),
        summary_chars=_rounded_mean(summary_chars) if summary_chars else None,
        summary_words=_rounded_mean(summary_words) if summary_words else None,
    )
