from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from dialogue_summarization.application.errors import GraphError
from dialogue_summarization.application.services.keywords import KeywordSet
from dialogue_summarization.application.services.word_graph import WordGraph


@dataclass(frozen=True)
class PathScore:
    path: tuple[int, ...]
    score: float
    covered: frozenset[int]


@dataclass(frozen=True)
class Threshold:
    t: float
    per_sentence_scores: dict[int, float]


def score_path(path: Sequence[int], kw: KeywordSet) -> PathScore:
    """Keyword coverage: |distinct path nodes ∩ KW| / |KW|."""
    if not kw.members:
        raise GraphError("cannot score against an empty keyword set")
    covered = frozenset(path) & kw.members
    return PathScore(path=tuple(path), score=len(covered) / len(kw.members), covered=covered)


def compute_threshold(g: WordGraph, kw: KeywordSet, sentence_ids: Iterable[int] | None = None) -> Threshold:
    """Mean coverage score over the original sentences of the scope (all of g by default)."""
    ids = sorted(g.sentence_paths) if sentence_ids is None else sorted(sentence_ids)
    if not ids:
        raise GraphError("threshold needs at least one sentence")

    scores = {sid: score_path(g.sentence_paths[sid], kw).score for sid in ids}
    values = np.fromiter(scores.values(), dtype=np.float64)
    # keep min <= t <= max exact under float rounding
    t = float(np.clip(values.mean(), values.min(), values.max()))
    return Threshold(t=t, per_sentence_scores=scores)
