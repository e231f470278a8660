from __future__ import annotations

import heapq
from itertools import islice
from typing import Iterator

from dialogue_summarization.application.errors import GraphError
from dialogue_summarization.application.services.word_graph import WordGraph

Path = tuple[int, ...]


def _dijkstra(
    g: WordGraph,
    source: int,
    target: int,
    blocked_nodes: frozenset[int] = frozenset(),
    blocked_edges: frozenset[tuple[int, int]] = frozenset(),
) -> Path | None:
    """
    Shortest source -> target path avoiding the blocked nodes/edges.

    The heap carries (cost, path) so equal-cost paths pop in lexicographic
    node-id order; a node is settled on its first pop.
    """
    queue: list[tuple[float, Path]] = [(0.0, (source,))]
    settled: set[int] = set()
    while queue:
        cost, path = heapq.heappop(queue)
        node = path[-1]
        if node in settled:
            continue
        settled.add(node)
        if node == target:
            return path
        for nxt, weight in g.successors(node):
            if nxt in settled or nxt in blocked_nodes or (node, nxt) in blocked_edges:
                continue
            heapq.heappush(queue, (cost + weight, path + (nxt,)))
    return None


def iter_shortest_paths(g: WordGraph, source: int | None = None, target: int | None = None) -> Iterator[tuple[Path, float]]:
    """
    Lazy Yen: yields loopless source -> target paths in nondecreasing total weight,
    ties in lexicographic node-id order. Candidate i is the i-th shortest path.

    Raises GraphError("disconnected graph") on the first pull when target is unreachable.
    """
    source = g.bos_id if source is None else source
    target = g.eos_id if target is None else target

    first = _dijkstra(g, source, target)
    if first is None:
        raise GraphError("disconnected graph")

    accepted: list[Path] = [first]
    seen: set[Path] = {first}
    candidates: list[tuple[float, Path]] = []
    yield first, g.path_weight(first)

    while True:
        last = accepted[-1]
        for i in range(len(last) - 1):
            root = last[: i + 1]
            blocked_edges = frozenset(p[i: i + 2] for p in accepted if len(p) > i + 1 and p[: i + 1] == root)
            spur = _dijkstra(g, last[i], target, frozenset(root[:-1]), blocked_edges)
            if spur is None:
                continue
            total = root[:-1] + spur
            if total not in seen:
                seen.add(total)
                # weight recomputed along the full path so equal paths compare equal
                heapq.heappush(candidates, (g.path_weight(total), total))

        if not candidates:
            return
        weight, path = heapq.heappop(candidates)
        accepted.append(path)
        yield path, weight


def yen_k_shortest(g: WordGraph, k: int) -> list[tuple[Path, float]]:
    """Up to k loopless <bos> -> <eos> paths ordered by (total weight, node ids)."""
    if k < 1:
        raise GraphError(f"k must be >= 1 (got {k})")
    return list(islice(iter_shortest_paths(g), k))
