"""Knowledge-based similarity over a lexical graph (WordNet-style).

Word-pair score is the best path similarity 1 / (1 + d) over all synset
pairs of the two words, where d is the shortest undirected hypernym-path
length. Security jargon is mostly absent from general lexical graphs, so
out-of-vocabulary token pairs fall back to exact string equality.

Document pairs aggregate word scores by IDF-weighted bidirectional best
match. The quadratic token work makes this engine best suited to the small,
verbose corpora (DAST); it runs on anything, just slowly.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import EmptyCorpus, MalformedGraph
from .matrix import SimilarityMatrix, finalize_scores
from .preprocess import TokenizedDoc


@dataclass
class LexicalGraph:
    """Synset nodes, lemma index, and directed hypernym edges."""

    synsets: set[str]
    lemma_index: dict[str, frozenset[str]]
    hypernym_edges: dict[str, tuple[str, ...]]
    _adjacency: dict[str, tuple[str, ...]] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        for source, targets in self.hypernym_edges.items():
            if source not in self.synsets:
                raise MalformedGraph(f"edge source {source!r} is not a synset")
            for target in targets:
                if target not in self.synsets:
                    raise MalformedGraph(f"edge target {target!r} is not a synset")
        for lemma, ids in self.lemma_index.items():
            for synset_id in ids:
                if synset_id not in self.synsets:
                    raise MalformedGraph(f"lemma {lemma!r} references missing synset {synset_id!r}")
        undirected: dict[str, set[str]] = {s: set() for s in self.synsets}
        for source, targets in self.hypernym_edges.items():
            for target in targets:
                undirected[source].add(target)
                undirected[target].add(source)
        self._adjacency = {s: tuple(sorted(nbrs)) for s, nbrs in undirected.items()}

    def synsets_of(self, lemma: str) -> frozenset[str]:
        return self.lemma_index.get(lemma, frozenset())

    def shortest_distance(self, sources: frozenset[str], targets: frozenset[str]) -> int | None:
        """Shortest undirected hypernym-path length from any source to any target."""
        if sources & targets:
            return 0
        seen = set(sources)
        frontier = deque((s, 0) for s in sorted(sources))
        while frontier:
            node, dist = frontier.popleft()
            for neighbor in self._adjacency.get(node, ()):
                if neighbor in seen:
                    continue
                if neighbor in targets:
                    return dist + 1
                seen.add(neighbor)
                frontier.append((neighbor, dist + 1))
        return None


def word_similarity(graph: LexicalGraph, a: str, b: str) -> float:
    """max over synset pairs of 1/(1+d); identical tokens always score 1."""
    if a == b:
        return 1.0
    synsets_a = graph.synsets_of(a)
    synsets_b = graph.synsets_of(b)
    if not synsets_a or not synsets_b:
        return 0.0
    distance = graph.shortest_distance(synsets_a, synsets_b)
    if distance is None:
        return 0.0
    return 1.0 / (1.0 + distance)


def graph_similarity(
    corpus: list[TokenizedDoc],
    graph: LexicalGraph,
    idf: dict[str, float],
    corpus_kind: str = "",
) -> SimilarityMatrix:
    """IDF-weighted bidirectional best-match aggregation of word scores."""
    n = len(corpus)
    if n == 0:
        raise EmptyCorpus("graph_similarity needs at least one document")

    token_lists = [doc.tokens for doc in corpus]
    unique_tokens = [tuple(dict.fromkeys(tokens)) for tokens in token_lists]
    token_sets = [set(tokens) for tokens in token_lists]

    pair_cache: dict[tuple[str, str], float] = {}

    def cached_word_score(a: str, b: str) -> float:
        key = (a, b) if a <= b else (b, a)
        score = pair_cache.get(key)
        if score is None:
            score = word_similarity(graph, a, b)
            pair_cache[key] = score
        return score

    def best_match(token: str, other_index: int) -> float:
        if token in token_sets[other_index]:
            return 1.0
        best = 0.0
        for candidate in unique_tokens[other_index]:
            score = cached_word_score(token, candidate)
            if score > best:
                best = score
                if best == 1.0:
                    break
        return best

    def directed(source_index: int, target_index: int) -> float:
        tokens = token_lists[source_index]
        weights = [idf.get(t, 0.0) for t in tokens]
        total = sum(weights)
        if total <= 0.0:
            # every token weighs 0 (or idf unknown): fall back to a plain mean
            weights = [1.0] * len(tokens)
            total = float(len(tokens))
        return (
            sum(w * best_match(t, target_index) for t, w in zip(tokens, weights)) / total
        )

    scores = np.zeros((n, n))
    for i in range(n):
        scores[i, i] = 1.0
        for j in range(i + 1, n):
            if not token_lists[i] or not token_lists[j]:
                continue  # empty docs score 0 to everything
            scores[i, j] = scores[j, i] = 0.5 * (directed(i, j) + directed(j, i))

    return SimilarityMatrix(
        n=n, scores=finalize_scores(scores), engine_tag="graph", corpus_kind=corpus_kind
    )


# ---------------------------------------------------------------------------
# Loading: Princeton WordNet data files or a simplified TSV, auto-detected
# ---------------------------------------------------------------------------

_HYPERNYM_SYMBOLS = {"@", "@i"}
_WORDNET_POS = {"data.noun": "n", "data.verb": "v"}


def _parse_wordnet_data(path: Path, pos: str, lemma_index: dict[str, set[str]],
                        edges: dict[str, list[str]], synsets: set[str]) -> None:
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line or line.startswith("  "):  # license header
            continue
        head = line.split(" | ", 1)[0]
        fields = head.split(" ")
        try:
            offset = fields[0]
            word_count = int(fields[3], 16)
            synset_id = f"{offset}-{pos}"
            words = [fields[4 + 2 * i] for i in range(word_count)]
            pointer_base = 4 + 2 * word_count
            pointer_count = int(fields[pointer_base])
            hypernyms = []
            for i in range(pointer_count):
                symbol, target_offset, target_pos, _ = fields[
                    pointer_base + 1 + 4 * i : pointer_base + 5 + 4 * i
                ]
                if symbol in _HYPERNYM_SYMBOLS:
                    hypernyms.append(f"{target_offset}-{target_pos}")
        except (IndexError, ValueError) as exc:
            raise MalformedGraph(f"{path.name}: bad data line {line[:60]!r}") from exc
        synsets.add(synset_id)
        for word in words:
            lemma_index.setdefault(word.lower(), set()).add(synset_id)
        if hypernyms:
            edges[synset_id] = hypernyms


def _load_wordnet_dir(directory: Path) -> LexicalGraph:
    lemma_index: dict[str, set[str]] = {}
    edges: dict[str, list[str]] = {}
    synsets: set[str] = set()
    found = False
    for filename, pos in _WORDNET_POS.items():
        data_file = directory / filename
        if data_file.exists():
            found = True
            _parse_wordnet_data(data_file, pos, lemma_index, edges, synsets)
    if not found:
        raise MalformedGraph(f"{directory}: no data.noun or data.verb file")
    # cross-POS pointers may reference parts of speech we did not load
    pruned = {
        source: tuple(t for t in targets if t in synsets)
        for source, targets in edges.items()
    }
    return LexicalGraph(
        synsets=synsets,
        lemma_index={k: frozenset(v) for k, v in lemma_index.items()},
        hypernym_edges={s: t for s, t in pruned.items() if t},
    )


def _load_tsv(path: Path) -> LexicalGraph:
    lemma_index: dict[str, set[str]] = {}
    edges: dict[str, tuple[str, ...]] = {}
    synsets: set[str] = set()
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) not in (2, 3):
            raise MalformedGraph(f"{path.name}:{lineno}: expected 2-3 tab-separated columns")
        synset_id = parts[0].strip()
        if not synset_id:
            raise MalformedGraph(f"{path.name}:{lineno}: empty synset id")
        if synset_id in synsets:
            raise MalformedGraph(f"{path.name}:{lineno}: duplicate synset {synset_id!r}")
        synsets.add(synset_id)
        for lemma in parts[1].split(","):
            lemma = lemma.strip().lower()
            if lemma:
                lemma_index.setdefault(lemma, set()).add(synset_id)
        if len(parts) == 3 and parts[2].strip():
            edges[synset_id] = tuple(
                h.strip() for h in parts[2].split(",") if h.strip()
            )
    return LexicalGraph(
        synsets=synsets,
        lemma_index={k: frozenset(v) for k, v in lemma_index.items()},
        hypernym_edges=edges,
    )


def load_lexical_graph(path: str | Path) -> LexicalGraph:
    """Load a lexical graph, auto-detecting the format.

    A directory is treated as a WordNet 3.x dict/ directory (data.noun,
    data.verb); a file as the simplified TSV
    ``synset_id<TAB>lemma1,lemma2<TAB>hypernym_id1,hypernym_id2``.
    """
    source = Path(path)
    if source.is_dir():
        return _load_wordnet_dir(source)
    if not source.exists():
        raise MalformedGraph(f"{path}: no such file")
    return _load_tsv(source)
