from __future__ import annotations

import csv
import json
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable, Literal, Mapping, NamedTuple, Sequence

import numpy as np
from loguru import logger

from dialogue_summarization.application.errors import DialsumError
from dialogue_summarization.application.settings import PipelineConfig
from dialogue_summarization.application.services.pos_tagger import load_stopwords
from dialogue_summarization.application.services.transcript_loader import split_sentences

METRICS = ("r1", "r2", "rl")
_WORD = re.compile(r"[^\W_]+")


class Prf(NamedTuple):
    p: float
    r: float
    f1: float


ZERO = Prf(0.0, 0.0, 0.0)


def _prf(overlap: int, sys_count: int, ref_count: int) -> Prf:
    if overlap == 0 or sys_count == 0 or ref_count == 0:
        return ZERO
    p, r = overlap / sys_count, overlap / ref_count
    return Prf(p, r, 2 * p * r / (p + r))


@dataclass(frozen=True)
class RougeScore:
    r1: Prf = ZERO
    r2: Prf = ZERO
    rl: Prf = ZERO

    def f1(self) -> dict[str, float]:
        return {m: getattr(self, m).f1 for m in METRICS}

    def to_dict(self) -> dict[str, dict[str, float]]:
        return {m: getattr(self, m)._asdict() for m in METRICS}


@dataclass(frozen=True)
class RougeOptions:
    stemming: bool = False
    remove_stopwords: bool = False
    l_mode: Literal["summary", "union"] = "summary"

    @classmethod
    def from_config(cls, cfg: PipelineConfig) -> "RougeOptions":
        return cls(stemming=cfg.rouge_stemming, remove_stopwords=cfg.rouge_remove_stopwords, l_mode=cfg.rouge_l_mode)


@lru_cache
def _stemmer() -> Callable[[str], str]:
    from nltk.stem.porter import PorterStemmer

    return PorterStemmer().stem


def rouge_tokens(text: str, options: RougeOptions = RougeOptions()) -> list[str]:
    """Lowercase, split on non-alphanumerics; optional stopword removal and Porter stemming."""
    tokens = _WORD.findall(text.lower())
    if options.remove_stopwords:
        stop = load_stopwords()
        tokens = [t for t in tokens if t not in stop]
    if options.stemming:
        stem = _stemmer()
        tokens = [stem(t) for t in tokens]
    return tokens


def _ngrams(tokens: Sequence[str], n: int) -> Counter[tuple[str, ...]]:
    return Counter(tuple(tokens[i: i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(system: str, reference: str, n: int, options: RougeOptions = RougeOptions()) -> Prf:
    if n not in (1, 2):
        raise DialsumError(f"ROUGE-N supports n in {{1, 2}} (got {n})")
    sys_ngrams = _ngrams(rouge_tokens(system, options), n)
    ref_ngrams = _ngrams(rouge_tokens(reference, options), n)
    overlap = sum((sys_ngrams & ref_ngrams).values())
    return _prf(overlap, sum(sys_ngrams.values()), sum(ref_ngrams.values()))


def _lcs_table(x: Sequence[str], y: Sequence[str]) -> np.ndarray:
    table = np.zeros((len(x) + 1, len(y) + 1), dtype=np.int32)
    for i, xi in enumerate(x, start=1):
        for j, yj in enumerate(y, start=1):
            table[i, j] = table[i - 1, j - 1] + 1 if xi == yj else max(table[i - 1, j], table[i, j - 1])
    return table


def lcs_length(x: Sequence[str], y: Sequence[str]) -> int:
    return int(_lcs_table(x, y)[len(x), len(y)])


def _lcs_hits(ref: Sequence[str], cand: Sequence[str]) -> set[int]:
    """Reference positions matched by one LCS of (ref, cand)."""
    table = _lcs_table(ref, cand)
    hits: set[int] = set()
    i, j = len(ref), len(cand)
    while i > 0 and j > 0:
        if ref[i - 1] == cand[j - 1]:
            hits.add(i - 1)
            i, j = i - 1, j - 1
        elif table[i - 1, j] >= table[i, j - 1]:
            i -= 1
        else:
            j -= 1
    return hits


def rouge_l(system: str, reference: str, options: RougeOptions = RougeOptions()) -> Prf:
    """
    summary: one LCS over the whole token sequences.
    union: for every reference sentence, the union of its LCS hits against each
    system sentence, summed over reference sentences.
    """
    if options.l_mode == "summary":
        sys_tokens = rouge_tokens(system, options)
        ref_tokens = rouge_tokens(reference, options)
        return _prf(lcs_length(sys_tokens, ref_tokens), len(sys_tokens), len(ref_tokens))

    sys_sents = [rouge_tokens(s, options) for s in split_sentences(system)]
    ref_sents = [rouge_tokens(s, options) for s in split_sentences(reference)]
    hits = 0
    for ref in ref_sents:
        union: set[int] = set()
        for cand in sys_sents:
            union |= _lcs_hits(ref, cand)
        hits += len(union)
    return _prf(hits, sum(map(len, sys_sents)), sum(map(len, ref_sents)))


def score(system: str, references: str | Sequence[str], options: RougeOptions = RougeOptions()) -> RougeScore:
    """Per metric, the (p, r, f1) of the reference giving the highest f1."""
    refs = [references] if isinstance(references, str) else list(references)
    if not refs:
        raise DialsumError("at least one reference summary is required")
    per_ref = [
        RougeScore(
            r1=rouge_n(system, ref, 1, options),
            r2=rouge_n(system, ref, 2, options),
            rl=rouge_l(system, ref, options),
        )
        for ref in refs
    ]
    return RougeScore(**{m: max((getattr(s, m) for s in per_ref), key=lambda prf: prf.f1) for m in METRICS})


def _mean_score(scores: Iterable[RougeScore]) -> RougeScore:
    scores = list(scores)
    return RougeScore(**{
        m: Prf(*np.mean(np.array([getattr(s, m) for s in scores], dtype=np.float64), axis=0).tolist())
        for m in METRICS
    })


def normalized_std(values: Sequence[float]) -> float:
    """sigma / mean with the population standard deviation; 0 when the mean is 0."""
    arr = np.asarray(values, dtype=np.float64)
    mean = arr.mean()
    return float(arr.std() / mean) if mean > 0 else 0.0


@dataclass
class CorpusReport:
    per_doc: dict[str, RougeScore]
    mean: RougeScore
    normalized_std: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "documents": len(self.per_doc),
            "mean": self.mean.to_dict(),
            "normalized_std": self.normalized_std,
        }


def evaluate_corpus(
    pairs: Sequence[tuple[str, str | Sequence[str]]],
    ids: Sequence[str] | None = None,
    options: RougeOptions = RougeOptions(),
) -> CorpusReport:
    """Score (system, references) pairs; means and sigma/mean are taken over per-document f1."""
    if not pairs:
        raise DialsumError("cannot evaluate an empty corpus")
    ids = list(ids) if ids is not None else [str(i) for i in range(len(pairs))]
    if len(ids) != len(pairs):
        raise DialsumError(f"{len(ids)} id(s) for {len(pairs)} pair(s)")

    per_doc = {doc_id: score(system, refs, options) for doc_id, (system, refs) in zip(ids, pairs)}
    mean = _mean_score(per_doc.values())
    spread = {m: normalized_std([s.f1()[m] for s in per_doc.values()]) for m in METRICS}
    logger.info(
        "ROUGE over {} document(s): R1={:.4f} R2={:.4f} RL={:.4f}",
        len(per_doc), mean.r1.f1, mean.r2.f1, mean.rl.f1,
    )
    return CorpusReport(per_doc=per_doc, mean=mean, normalized_std=spread)


def write_csv(report: CorpusReport, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["doc_id", *METRICS])
        for doc_id, s in report.per_doc.items():
            writer.writerow([doc_id, *(f"{v:.6f}" for v in s.f1().values())])
    return path


def write_json(report: CorpusReport, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def robustness(dataset_means: Mapping[str, Mapping[str, float]]) -> dict[str, float]:
    """sigma / mean of each metric's f1 across datasets (one mean f1 per dataset and metric)."""
    if not dataset_means:
        raise DialsumError("no dataset reports given")
    return {m: normalized_std([means[m] for means in dataset_means.values()]) for m in METRICS}
