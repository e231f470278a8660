from __future__ import annotations

from dataclasses import dataclass

import networkx as nx
from loguru import logger

from dialogue_summarization.application.errors import NoKeywordsError
from dialogue_summarization.application.schemas import Tag
from dialogue_summarization.application.services.word_graph import WordGraph


@dataclass(frozen=True)
class CoreDecomposition:
    core_number: dict[int, int]
    degeneracy: int

    def core(self, k: int) -> set[int]:
        return {v for v, c in self.core_number.items() if c >= k}


@dataclass(frozen=True)
class KeywordSet:
    members: frozenset[int]
    source_words: frozenset[tuple[str, Tag]]
    core_level: int

    def __len__(self) -> int:
        return len(self.members)

    def ordered(self) -> list[int]:
        """Canonical column order (by node id)."""
        return sorted(self.members)


def undirected_projection(g: WordGraph) -> nx.Graph:
    """Unweighted, undirected view of the word graph; antiparallel edges collapse."""
    u = nx.Graph()
    u.add_nodes_from(g.nodes)
    u.add_edges_from(g.edges)
    return u


def core_decompose(g: WordGraph) -> CoreDecomposition:
    core_number = nx.core_number(undirected_projection(g))
    degeneracy = max(core_number.values(), default=0)
    return CoreDecomposition(core_number=dict(core_number), degeneracy=degeneracy)


def extract_keywords(g: WordGraph, d: CoreDecomposition) -> KeywordSet:
    """
    Non-stopword, non-META nodes of the main core. When the main core holds only
    stopwords, descend to the largest k whose core has a candidate.
    """
    candidates = {
        nid: d.core_number[nid]
        for nid, node in g.nodes.items()
        if not node.is_meta and not g.is_stopword_node(nid) and nid in d.core_number
    }
    if not candidates:
        raise NoKeywordsError("no candidate keywords")

    level = max(candidates.values())
    if level < d.degeneracy:
        logger.debug("Main {}-core holds only stopwords; using the {}-core for keywords", d.degeneracy, level)

    members = frozenset(nid for nid, c in candidates.items() if c == level)
    return KeywordSet(
        members=members,
        source_words=frozenset((g.nodes[n].word, g.nodes[n].tag) for n in members),
        core_level=level,
    )
