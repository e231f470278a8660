from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from itertools import groupby, islice
from typing import Any, Iterator

import numpy as np
from loguru import logger

from dialogue_summarization.application.errors import DialsumError, NoKeywordsError
from dialogue_summarization.application.schemas import Tag, TaggedSentence, Transcript, Utterance
from dialogue_summarization.application.settings import PipelineConfig, SearchConfig, get_config
from dialogue_summarization.application.services.baselines import lead3, lead3_attributed
from dialogue_summarization.application.services.keywords import KeywordSet, core_decompose, extract_keywords
from dialogue_summarization.application.services.path_scoring import Threshold, PathScore, compute_threshold, score_path
from dialogue_summarization.application.services.path_search import Path, iter_shortest_paths
from dialogue_summarization.application.services.pos_tagger import (
    PosTagger,
    from_pretagged,
    get_tagger,
    load_stopwords,
    tokenize,
    wrap_meta,
)
from dialogue_summarization.application.services.pov import PovRuleSet, convert, convert_summary, default_rules
from dialogue_summarization.application.services.segmentation import (
    Segmentation,
    segment,
    split_by_boundaries,
    topic_vectors,
)
from dialogue_summarization.application.services.transcript_loader import split_sentences
from dialogue_summarization.application.services.word_graph import WordGraph, build_word_graph

_TERMINAL_TOKEN = re.compile(r"^[.!?]+$")


@dataclass(frozen=True)
class SummaryPath:
    nodes: Path
    text: str  # realized lowercase tokens
    words: tuple[str, ...]  # node words of text; a pre-tagged word may hold a space
    tags: tuple[Tag, ...]  # one per word
    score: PathScore
    total_weight: float
    speaker: str
    segment: int
    fallback: bool = False  # original sentence emitted because no candidate passed

    @classmethod
    def from_path(
        cls, g: WordGraph, path: Path, kw: KeywordSet, speaker: str, segment: int, fallback: bool = False,
        weight: float | None = None,
    ) -> "SummaryPath":
        return cls(
            nodes=tuple(path),
            text=g.realize(path),
            words=tuple(g.words(path)),
            tags=tuple(g.nodes[n].tag for n in path if not g.nodes[n].is_meta),
            score=score_path(path, kw),
            total_weight=g.path_weight(path) if weight is None else weight,
            speaker=speaker,
            segment=segment,
            fallback=fallback,
        )


@dataclass
class SegmentReport:
    index: int
    sentence_ids: list[int]
    keywords: list[str] = field(default_factory=list)
    threshold: float | None = None
    per_sentence_scores: dict[int, float] = field(default_factory=dict)
    speaker_thresholds: dict[str, float] = field(default_factory=dict)
    paths: list[SummaryPath] = field(default_factory=list)


@dataclass
class SummaryBundle:
    doc_id: str
    sentences: list[str]
    paths: list[SummaryPath] = field(default_factory=list)
    segments: list[SegmentReport] = field(default_factory=list)
    segmentation: Segmentation | None = None

    @property
    def summary(self) -> str:
        return " ".join(self.sentences)

    @property
    def keywords(self) -> list[str]:
        seen: dict[str, None] = {}
        for report in self.segments:
            for word in report.keywords:
                seen.setdefault(word, None)
        return list(seen)

    @property
    def segment_thresholds(self) -> list[float | None]:
        return [r.threshold for r in self.segments]

    @property
    def threshold(self) -> float | None:
        values = [t for t in self.segment_thresholds if t is not None]
        return float(np.mean(values)) if values else None

    def to_record(self) -> dict[str, Any]:
        return {
            "id": self.doc_id,
            "summary": self.summary,
            "sentences": self.sentences,
            "keywords": self.keywords,
            "threshold": self.threshold,
            "segment_thresholds": self.segment_thresholds,
            "segments": len(self.segments),
        }


def _candidate_stream(g: WordGraph, cfg: SearchConfig) -> Iterator[tuple[Path, float]]:
    """At most search_depth Yen candidates, pulled k_paths at a time."""
    paths = iter_shortest_paths(g)
    remaining = cfg.search_depth
    while remaining > 0:
        batch = list(islice(paths, min(cfg.k_paths, remaining)))
        if not batch:
            return
        remaining -= len(batch)
        yield from batch


def extract_summaries(
    g: WordGraph,
    kw: KeywordSet,
    threshold: Threshold,
    cfg: SearchConfig,
    speaker: str = "",
    segment: int = 0,
) -> list[SummaryPath]:
    """
    Walk shortest paths in weight order, keeping those with score >= t that pass the
    verb / length gates. Stops once accepted paths cover every keyword reachable in g,
    or after search_depth candidates.
    """
    reachable = kw.members & g.nodes.keys()
    covered: set[int] = set()
    accepted: list[SummaryPath] = []

    for examined, (path, weight) in enumerate(_candidate_stream(g, cfg), start=1):
        ps = score_path(path, kw)
        if ps.score < threshold.t:
            continue
        if len(path) - 2 < cfg.min_tokens:
            continue
        if cfg.require_verb and not any(g.nodes[n].tag is Tag.VERB for n in path):
            continue

        accepted.append(SummaryPath.from_path(g, path, kw, speaker, segment, weight=weight))
        covered |= ps.covered
        if covered >= reachable:
            logger.debug("Keywords covered after {} candidate(s) for speaker '{}'", examined, speaker)
            break

    if not accepted:
        logger.warning("No path passed t={:.3f} for speaker '{}' in segment {}", threshold.t, speaker, segment)
    return accepted


def _best_sentence(threshold: Threshold, sentence_ids: list[int]) -> int:
    # highest score, earliest sentence on ties
    return max(sentence_ids, key=lambda sid: (threshold.per_sentence_scores[sid], -sid))


@dataclass
class DialogueSummarizer:
    config: PipelineConfig
    tagger: PosTagger
    stopwords: frozenset[str]
    rules: PovRuleSet

    @classmethod
    def build(cls, config: PipelineConfig | None = None) -> "DialogueSummarizer":
        config = config or get_config()
        rules = PovRuleSet.from_json(config.pov_rules_path) if config.pov_rules_path else default_rules()
        logger.info(
            "Summarizer: edge weights={}, segmentation={}, pov={}",
            config.edge_weight_mode, config.segmentation, "on" if config.pov_enabled else "off",
        )
        return cls(
            config=config,
            tagger=get_tagger(config.lexicon_path),
            stopwords=load_stopwords(config.stopwords_path),
            rules=rules,
        )

    # ---------------- preparation ----------------

    def _utterance_sentences(self, u: Utterance) -> Iterator[TaggedSentence]:
        if u.tokens is not None:
            # pre-tagged input: sentence ends after a terminal punctuation token
            chunk: list[tuple[str, Tag]] = []
            for surface, tag in u.tokens:
                chunk.append((surface, tag))
                if _TERMINAL_TOKEN.match(surface):
                    yield from_pretagged(chunk, speaker=u.speaker)
                    chunk = []
            if chunk:
                yield from_pretagged(chunk, speaker=u.speaker)
            return

        for sentence in split_sentences(u):
            tokens = tokenize(sentence)
            if tokens:
                yield self.tagger.tag(tokens, speaker=u.speaker)

    def prepare(self, tr: Transcript) -> list[TaggedSentence]:
        """Tagged, <bos>/<eos>-wrapped sentences with document-wide ids."""
        sentences: list[TaggedSentence] = []
        for u in tr.utterances:
            for ts in self._utterance_sentences(u):
                ts = replace(ts, sentence_id=len(sentences), utterance_index=u.index, segment=u.segment)
                sentences.append(wrap_meta(ts))
        return sentences

    def build_graph(self, sentences: list[TaggedSentence]) -> WordGraph:
        return build_word_graph(sentences, self.stopwords, self.config.edge_weight_mode)

    # ---------------- segmentation ----------------

    def _wants_segmentation(self, tr: Transcript) -> bool:
        mode = self.config.segmentation
        if mode == "off":
            return False
        if mode == "always":
            return True
        return len(tr.render()) > self.config.segment_threshold_chars

    def split_segments(
        self, tr: Transcript, sentences: list[TaggedSentence]
    ) -> tuple[list[list[TaggedSentence]], Segmentation | None]:
        if any(s.segment is not None for s in sentences):
            # pre-segmented input: consecutive runs of one label form a block
            blocks = [list(run) for _, run in groupby(sentences, key=lambda s: s.segment)]
            logger.debug("Using {} pre-segmented block(s)", len(blocks))
            return blocks, None

        if len(sentences) < 2 or not self._wants_segmentation(tr):
            return [sentences], None

        g = self.build_graph(sentences)
        try:
            kw = extract_keywords(g, core_decompose(g))
        except NoKeywordsError:
            logger.warning("Document '{}': no keywords for topic vectors; not segmenting", tr.doc_id)
            return [sentences], None

        p = self.config.topics_p
        if p > len(sentences):
            logger.warning("topics p={} exceeds {} sentence(s); clamping", p, len(sentences))
            p = len(sentences)
        seg = segment(
            topic_vectors(g, kw),
            p,
            mode=self.config.segment_mode,
            similarity_cutoff=self.config.segment_similarity_cutoff,
        )
        logger.info("Document '{}': {} topic segment(s)", tr.doc_id, seg.p)
        return split_by_boundaries(sentences, seg.boundaries), seg

    # ---------------- summarization ----------------

    def _summarize_segment(self, index: int, sentences: list[TaggedSentence]) -> SegmentReport:
        report = SegmentReport(index=index, sentence_ids=[s.sentence_id for s in sentences])
        g = self.build_graph(sentences)
        try:
            kw = extract_keywords(g, core_decompose(g))
        except NoKeywordsError:
            logger.warning("Segment {} has no candidate keywords; skipping", index)
            return report

        threshold = compute_threshold(g, kw)
        report.keywords = [g.nodes[n].word for n in kw.ordered()]
        report.threshold = threshold.t
        report.per_sentence_scores = threshold.per_sentence_scores

        for speaker in g.speakers:
            sub = g.speaker_subgraph(speaker)
            sentence_ids = sorted(sub.sentence_paths)
            scope = threshold if self.config.threshold_scope == "segment" else compute_threshold(g, kw, sentence_ids)
            report.speaker_thresholds[speaker] = scope.t

            paths = extract_summaries(sub, kw, scope, self.config.search, speaker=speaker, segment=index)
            if not paths:
                best = _best_sentence(threshold, sentence_ids)
                if threshold.per_sentence_scores[best] >= scope.t:
                    paths = [SummaryPath.from_path(g, g.sentence_paths[best], kw, speaker, index, fallback=True)]
            report.paths.extend(paths)
        return report

    def _first_sentence(self, first: TaggedSentence) -> SummaryPath:
        g = self.build_graph([first])
        path = g.sentence_paths[first.sentence_id]
        return SummaryPath(
            nodes=path,
            text=g.realize(path),
            words=tuple(g.words(path)),
            tags=tuple(g.nodes[n].tag for n in path if not g.nodes[n].is_meta),
            score=PathScore(path=path, score=0.0, covered=frozenset()),
            total_weight=g.path_weight(path),
            speaker=first.speaker,
            segment=0,
            fallback=True,
        )

    def render(self, path: SummaryPath) -> str:
        if not self.config.pov_enabled:
            return path.text
        return convert(
            path, path.speaker, self.rules, keep_possessives=self.config.pov_keep_possessives, tagger=self.tagger
        )

    def summarize(self, tr: Transcript) -> SummaryBundle:
        try:
            sentences = self.prepare(tr)
            if not sentences:
                return SummaryBundle(doc_id=tr.doc_id, sentences=[])

            blocks, seg = self.split_segments(tr, sentences)
            reports = [self._summarize_segment(i, block) for i, block in enumerate(blocks)]
            paths = [p for r in reports for p in r.paths]

            if not paths:
                logger.warning("Document '{}': empty summary; using its first sentence", tr.doc_id)
                paths = [self._first_sentence(sentences[0])]

            return SummaryBundle(
                doc_id=tr.doc_id,
                sentences=[self.render(p) for p in paths],
                paths=paths,
                segments=reports,
                segmentation=seg,
            )
        except DialsumError as e:
            raise e.__class__(f"document '{tr.doc_id}': {e}") from e

    def lead3(self, tr: Transcript) -> SummaryBundle:
        if not (self.config.baseline_pov and self.config.pov_enabled):
            return SummaryBundle(doc_id=tr.doc_id, sentences=[lead3(tr)])
        keep = self.config.pov_keep_possessives
        sentences = [
            convert(sentence, speaker, self.rules, keep_possessives=keep, tagger=self.tagger)
            for speaker, sentence in lead3_attributed(tr)
        ]
        return SummaryBundle(doc_id=tr.doc_id, sentences=sentences)

    def rewrite_summary(self, text: str) -> list[str]:
        """Reported-speech rewrite of an existing system summary with "Speaker:" prefixes."""
        return convert_summary(
            text, rules=self.rules, keep_possessives=self.config.pov_keep_possessives, tagger=self.tagger
        )

    def run(self, tr: Transcript) -> SummaryBundle:
        """System summary for one document under the configured baseline."""
        if self.config.baseline == "lead3":
            return self.lead3(tr)
        return self.summarize(tr)


def summarize_document(tr: Transcript, cfg: PipelineConfig | None = None) -> SummaryBundle:
    return DialogueSummarizer.build(cfg).summarize(tr)
