from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence, TypeVar

import numpy as np

from dialogue_summarization.application.errors import SegmentationError
from dialogue_summarization.application.services.keywords import KeywordSet
from dialogue_summarization.application.services.word_graph import WordGraph

T = TypeVar("T")


@dataclass(frozen=True)
class TopicVector:
    bits: np.ndarray  # 0/1 per keyword column
    sentence_id: int

    def __len__(self) -> int:
        return int(self.bits.size)


@dataclass(frozen=True)
class Segmentation:
    boundaries: list[int]  # boundary after sentence index i
    p: int
    distances: list[float] = field(default_factory=list)  # d(i, i+1) for every gap


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    # zero vectors share no topic: similarity 0
    if a.size == 0 or b.size == 0:
        return 0.0
    denom = np.linalg.norm(a) * np.linalg.norm(b)
    if denom == 0.0:
        return 0.0
    return float(np.dot(a, b) / denom)


def topic_vectors(g: WordGraph, kw: KeywordSet, sentence_ids: Iterable[int] | None = None) -> list[TopicVector]:
    """One binary keyword-coverage vector per sentence, in document order."""
    columns = kw.ordered()
    ids = sorted(g.sentence_paths) if sentence_ids is None else list(sentence_ids)
    vectors = []
    for sid in ids:
        nodes = set(g.sentence_paths[sid])
        bits = np.fromiter((1 if nid in nodes else 0 for nid in columns), dtype=np.int8, count=len(columns))
        vectors.append(TopicVector(bits=bits, sentence_id=sid))
    return vectors


def topic_distance(c1: TopicVector, c2: TopicVector) -> float:
    """Negative cosine similarity, in [-1, 0]; 0 when either vector is all-zero."""
    if len(c1) != len(c2):
        raise SegmentationError(f"topic vector length mismatch: {len(c1)} != {len(c2)}")
    sim = _cosine(c1.bits.astype(np.float64), c2.bits.astype(np.float64))
    if sim == 0.0:
        return 0.0
    return float(np.clip(-sim, -1.0, 0.0))


def segment(
    vectors: Sequence[TopicVector],
    p: int,
    mode: Literal["top", "threshold"] = "top",
    similarity_cutoff: float = 0.2,
) -> Segmentation:
    """
    top: split at the p-1 gaps with the largest distance (earlier gap wins ties).
    threshold: split wherever d > -similarity_cutoff; p follows from the result.
    """
    n = len(vectors)
    if n == 0:
        raise SegmentationError("nothing to segment")
    distances = [topic_distance(vectors[i], vectors[i + 1]) for i in range(n - 1)]

    if mode == "threshold":
        boundaries = [i for i, d in enumerate(distances) if d > -similarity_cutoff]
        return Segmentation(boundaries=boundaries, p=len(boundaries) + 1, distances=distances)

    if p < 1:
        raise SegmentationError(f"p must be >= 1 (got {p})")
    if p > n:
        raise SegmentationError(f"p={p} exceeds the sentence count {n}")

    ranked = sorted(range(n - 1), key=lambda i: (-distances[i], i))
    boundaries = sorted(ranked[: p - 1])
    return Segmentation(boundaries=boundaries, p=p, distances=distances)


def split_by_boundaries(items: Sequence[T], boundaries: Sequence[int]) -> list[list[T]]:
    """Cut items after each boundary index; concatenating the blocks gives items back."""
    blocks: list[list[T]] = []
    start = 0
    for b in boundaries:
        blocks.append(list(items[start: b + 1]))
        start = b + 1
    blocks.append(list(items[start:]))
    return [blk for blk in blocks if blk]
