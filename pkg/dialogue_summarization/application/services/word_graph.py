from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence

import networkx as nx
from loguru import logger

from dialogue_summarization.application.errors import GraphError
from dialogue_summarization.application.schemas import BOS, EOS, Tag, TaggedSentence

EdgeWeightMode = Literal["paper", "filippova"]


@dataclass(frozen=True)
class Occurrence:
    sentence_id: int
    position: int
    speaker: str


@dataclass
class Node:
    node_id: int
    word: str
    tag: Tag
    occurrences: list[Occurrence] = field(default_factory=list)

    @property
    def freq(self) -> int:
        return len(self.occurrences)

    @property
    def is_meta(self) -> bool:
        return self.tag is Tag.META


@dataclass
class Edge:
    source: int
    target: int
    weight: float = 1.0
    support: list[int] = field(default_factory=list)  # sentence ids traversing source -> target


class WordGraph:
    """
    Multi-sentence compression graph.

    Nodes are (lowercase word, tag) pairs merged across sentences; every added
    sentence stays recoverable as a <bos> -> <eos> path through sentence_paths.
    """

    def __init__(self, stopwords: Iterable[str] = (), edge_weight_mode: EdgeWeightMode = "paper"):
        self.stopwords = frozenset(stopwords)
        self.edge_weight_mode: EdgeWeightMode = edge_weight_mode
        self.nodes: dict[int, Node] = {}
        self.edges: dict[tuple[int, int], Edge] = {}
        self.sentence_paths: dict[int, tuple[int, ...]] = {}
        self.sentences: dict[int, TaggedSentence] = {}
        self.frozen = False

        self._by_key: dict[tuple[str, Tag], list[int]] = defaultdict(list)
        self._succ: dict[int, set[int]] = defaultdict(set)
        self._pred: dict[int, set[int]] = defaultdict(set)

        self.bos_id = self._new_node(BOS, Tag.META)
        self.eos_id = self._new_node(EOS, Tag.META)

    # ---------------- construction ----------------

    def _new_node(self, word: str, tag: Tag) -> int:
        node_id = len(self.nodes)
        self.nodes[node_id] = Node(node_id=node_id, word=word, tag=tag)
        self._by_key[(word, tag)].append(node_id)
        return node_id

    def _context_overlap(self, node_id: int, left: str, right: str) -> int:
        preds = {self.nodes[p].word for p in self._pred[node_id]}
        succs = {self.nodes[s].word for s in self._succ[node_id]}
        return int(left in preds) + int(right in succs)

    def _map_token(self, sentence: TaggedSentence, j: int, used: set[int]) -> int:
        tok = sentence.tokens[j]
        candidates = [nid for nid in self._by_key[(tok.lower, tok.tag)] if nid not in used]
        if not candidates:
            return self._new_node(tok.lower, tok.tag)
        if len(candidates) == 1:
            return candidates[0]

        left = sentence.tokens[j - 1].lower
        right = sentence.tokens[j + 1].lower
        # maximal overlapping context, then lowest node id
        return max(candidates, key=lambda nid: (self._context_overlap(nid, left, right), -nid))

    def add_sentence(self, sentence: TaggedSentence) -> "WordGraph":
        if self.frozen:
            raise GraphError("graph is frozen")
        if not sentence.is_wrapped:
            raise GraphError(f"sentence {sentence.sentence_id} must be wrapped with <bos>/<eos>")
        if sentence.sentence_id in self.sentences:
            raise GraphError(f"sentence {sentence.sentence_id} already added")

        tokens = sentence.tokens
        mapping: list[int | None] = [None] * len(tokens)
        content: list[int] = []
        stop: list[int] = []
        for j, tok in enumerate(tokens):
            if tok.is_meta:
                mapping[j] = self.bos_id if j == 0 else self.eos_id
            elif tok.lower in self.stopwords:
                stop.append(j)
            else:
                content.append(j)

        # non-stopwords first, then stopwords, each left to right
        for j in content + stop:
            used = {m for m in mapping if m is not None}
            mapping[j] = self._map_token(sentence, j, used)

        path = tuple(m for m in mapping if m is not None)
        for tok, node_id in zip(tokens, path):
            self.nodes[node_id].occurrences.append(
                Occurrence(sentence_id=sentence.sentence_id, position=tok.position, speaker=sentence.speaker)
            )
        for a, b in zip(path, path[1:]):
            edge = self.edges.get((a, b))
            if edge is None:
                edge = self.edges[(a, b)] = Edge(source=a, target=b)
                self._succ[a].add(b)
                self._pred[b].add(a)
            edge.support.append(sentence.sentence_id)

        self.sentence_paths[sentence.sentence_id] = path
        self.sentences[sentence.sentence_id] = sentence
        return self

    def compute_edge_weights(self) -> "WordGraph":
        """
        w' = (freq(v1) + freq(v2)) * D            (paper)
        w' = (freq(v1) + freq(v2)) / sum(1/diff)  (filippova)
        w  = w' / (freq(v1) * freq(v2))

        D sums |k - j| over sentences holding v1 at j and v2 at k with j < k.
        """
        positions = {
            nid: {occ.sentence_id: occ.position for occ in node.occurrences}
            for nid, node in self.nodes.items()
        }
        for (a, b), edge in self.edges.items():
            pa, pb = positions[a], positions[b]
            diffs = [pb[s] - pa[s] for s in sorted(pa.keys() & pb.keys()) if pa[s] < pb[s]]
            fa, fb = self.nodes[a].freq, self.nodes[b].freq
            if self.edge_weight_mode == "paper":
                w1 = (fa + fb) * math.fsum(diffs)
            else:
                w1 = (fa + fb) / math.fsum(1.0 / d for d in diffs)
            edge.weight = w1 / (fa * fb)
        return self

    def freeze(self) -> "WordGraph":
        self.frozen = True
        return self

    # ---------------- queries ----------------

    @property
    def speakers(self) -> list[str]:
        seen: dict[str, None] = {}
        for sid in sorted(self.sentences):
            seen.setdefault(self.sentences[sid].speaker, None)
        return list(seen)

    def successors(self, node_id: int) -> list[tuple[int, float]]:
        return [(s, self.edges[(node_id, s)].weight) for s in sorted(self._succ.get(node_id, ()))]

    def path_weight(self, path: Sequence[int]) -> float:
        return sum(self.edges[(a, b)].weight for a, b in zip(path, path[1:]))

    def words(self, path: Sequence[int]) -> list[str]:
        return [self.nodes[n].word for n in path if not self.nodes[n].is_meta]

    def realize(self, path: Sequence[int]) -> str:
        return " ".join(self.words(path))

    def is_stopword_node(self, node_id: int) -> bool:
        return self.nodes[node_id].word in self.stopwords

    # ---------------- derived graphs ----------------

    def subgraph(self, sentence_ids: Iterable[int]) -> "WordGraph":
        """Nodes and edges used by the given sentences; weights are kept as computed here."""
        keep = sorted(set(sentence_ids))
        missing = [sid for sid in keep if sid not in self.sentences]
        if missing:
            raise GraphError(f"unknown sentence ids: {missing}")

        sub = WordGraph.__new__(WordGraph)
        sub.stopwords = self.stopwords
        sub.edge_weight_mode = self.edge_weight_mode
        sub.bos_id, sub.eos_id = self.bos_id, self.eos_id
        sub.sentence_paths = {sid: self.sentence_paths[sid] for sid in keep}
        sub.sentences = {sid: self.sentences[sid] for sid in keep}
        sub._by_key = defaultdict(list)
        sub._succ = defaultdict(set)
        sub._pred = defaultdict(set)

        node_ids = {self.bos_id, self.eos_id}
        for path in sub.sentence_paths.values():
            node_ids.update(path)
        sub.nodes = {nid: self.nodes[nid] for nid in sorted(node_ids)}

        wanted = set(keep)
        sub.edges = {}
        for key, edge in self.edges.items():
            support = [sid for sid in edge.support if sid in wanted]
            if support:
                sub.edges[key] = Edge(source=edge.source, target=edge.target, weight=edge.weight, support=support)
                sub._succ[edge.source].add(edge.target)
                sub._pred[edge.target].add(edge.source)
        sub.frozen = True
        return sub

    def speaker_subgraph(self, speaker: str) -> "WordGraph":
        sentence_ids = [sid for sid, s in self.sentences.items() if s.speaker == speaker]
        if not sentence_ids:
            raise GraphError(f"unknown speaker '{speaker}'")
        return self.subgraph(sentence_ids)

    # ---------------- export ----------------

    def to_networkx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        for nid, node in self.nodes.items():
            g.add_node(
                nid,
                word=node.word,
                tag=node.tag.value,
                freq=node.freq,
                occurrences=[[o.sentence_id, o.position, o.speaker] for o in node.occurrences],
            )
        for (a, b), edge in self.edges.items():
            g.add_edge(a, b, weight=edge.weight, support=list(edge.support))
        return g

    def to_json(self) -> str:
        data = nx.node_link_data(self.to_networkx(), edges="edges")
        data["bos_id"], data["eos_id"] = self.bos_id, self.eos_id
        data["sentence_paths"] = {str(sid): list(p) for sid, p in self.sentence_paths.items()}
        return json.dumps(data, ensure_ascii=False, sort_keys=True)

    def export_dot(self) -> str:
        return export_dot(self)


def _dot_quote(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(g: WordGraph) -> str:
    """GraphViz digraph; node labels 'word/TAG', edge labels carry the weight."""
    lines = ["digraph wordgraph {", "  rankdir = LR;", ""]
    for nid, node in g.nodes.items():
        shape = "doublecircle" if node.is_meta else "ellipse"
        lines.append(f"  n{nid} [ label = {_dot_quote(f'{node.word}/{node.tag.value}')}, shape = \"{shape}\" ];")
    lines.append("")
    for (a, b), edge in g.edges.items():
        lines.append(f"  n{a} -> n{b} [ label = \"{edge.weight:.3f}\" ];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def build_word_graph(
    sentences: Iterable[TaggedSentence],
    stopwords: Iterable[str] = (),
    edge_weight_mode: EdgeWeightMode = "paper",
) -> WordGraph:
    """Add every (wrapped) sentence, compute weights and freeze."""
    g = WordGraph(stopwords=stopwords, edge_weight_mode=edge_weight_mode)
    for s in sentences:
        g.add_sentence(s)
    if not g.sentences:
        raise GraphError("cannot build a word graph without sentences")
    g.compute_edge_weights().freeze()
    logger.debug(
        "Built word graph: {} sentence(s), {} node(s), {} edge(s)",
        len(g.sentences), len(g.nodes), len(g.edges),
    )
    return g
