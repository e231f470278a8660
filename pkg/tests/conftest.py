from __future__ import annotations

import json
from pathlib import Path
from typing import Callable, Sequence

import pytest

from dialogue_summarization.application.schemas import Tag, TaggedSentence
from dialogue_summarization.application.services.pos_tagger import get_tagger, load_stopwords, tokenize, wrap_meta
from dialogue_summarization.application.services.word_graph import Edge, WordGraph
from dialogue_summarization.application.settings import PipelineConfig

SAMSUM_DIALOGUES = {
    "13818513": (
        "Amanda: I baked cookies. Do you want some?\n"
        "Jerry: Sure!\n"
        "Amanda: I'll bring you tomorrow :-)",
        "Amanda baked cookies and will bring Jerry some tomorrow.",
    ),
    "13728867": (
        "Maya: Bring home the clothes that are hanging outside.\n"
        "Boris: I'll tell Brian to take care of that.\n"
        "Maya: The clothes are hanging outside, please bring them home.\n"
        "Boris: Brian will take care of the clothes.",
        "Boris will tell Brian to bring home the clothes hanging outside.",
    ),
    "13681000": (
        "Megan: Are we going to take a taxi to the opera?\n"
        "Joseph: No, I'll take my car.\n"
        "Megan: Great, the car is better than a taxi.\n"
        "Joseph: I need to find the car keys first.",
        "Joseph will take his car to the opera.",
    ),
}


@pytest.fixture(scope="session")
def tagger():
    return get_tagger()


@pytest.fixture(scope="session")
def stopwords() -> frozenset[str]:
    return load_stopwords()


@pytest.fixture
def make_sentence(tagger) -> Callable[..., TaggedSentence]:
    """Tokenize + tag + wrap one sentence."""

    def _make(text: str, sentence_id: int = 0, speaker: str = "A") -> TaggedSentence:
        return wrap_meta(tagger.tag(tokenize(text), sentence_id=sentence_id, speaker=speaker))

    return _make


@pytest.fixture
def make_sentences(make_sentence) -> Callable[..., list[TaggedSentence]]:
    """[(speaker, text), ...] -> wrapped sentences with ids 0..n-1."""

    def _make(turns: Sequence[tuple[str, str]]) -> list[TaggedSentence]:
        return [make_sentence(text, sentence_id=i, speaker=spk) for i, (spk, text) in enumerate(turns)]

    return _make


def weighted_graph(n_nodes: int, weights: dict[tuple[int, int], float]) -> WordGraph:
    """
    Frozen WordGraph with explicit topology: node 0 is <bos>, node 1 is <eos>,
    nodes 2.. are NOUN placeholders "w2", "w3", ...
    """
    g = WordGraph()
    for nid in range(2, n_nodes):
        g._new_node(f"w{nid}", Tag.NOUN)
    for (a, b), w in weights.items():
        g.edges[(a, b)] = Edge(source=a, target=b, weight=w)
        g._succ[a].add(b)
        g._pred[b].add(a)
    return g.freeze()


@pytest.fixture
def build_weighted_graph() -> Callable[[int, dict[tuple[int, int], float]], WordGraph]:
    return weighted_graph


@pytest.fixture
def samsum_file(tmp_path: Path) -> Path:
    path = tmp_path / "samsum.jsonl"
    with path.open("w", encoding="utf-8") as fh:
        for doc_id, (dialogue, summary) in SAMSUM_DIALOGUES.items():
            fh.write(json.dumps({"id": doc_id, "dialogue": dialogue, "summary": summary}) + "\n")
    return path


@pytest.fixture
def config() -> PipelineConfig:
    # explicit values so DIALSUM_* variables in the environment don't leak in
    return PipelineConfig(
        _env_file=None,
        debug=False,
        edge_weight_mode="paper",
        segmentation="auto",
        pov_enabled=True,
        jobs=1,
        stopwords_path=None,
        pov_rules_path=None,
    )
