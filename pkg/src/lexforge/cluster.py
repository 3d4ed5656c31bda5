"""Distributional word classification.

Bigram context vectors (offsets -2,-1,+1,+2), a pluggable similarity
measure over them, single-link hierarchical clustering, dendrogram cuts
into frequency-ordered word classes, and rank-frequency curve fitting.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from . import kernels
from .errors import FitError
from .model import AnnotatedCorpus, Lexicon

OFFSETS = (-2, -1, 1, 2)
BOUNDARY = "BOUNDARY"

MEASURES = ("spearman", "cosine")


@dataclass(frozen=True, eq=False)
class ContextVectorSet:
    """Context counts for target words: shape (n_words, 4, len(context_vocab)).

    The last context column is the reserved BOUNDARY symbol for positions
    beyond the sentence edge.
    """

    words: tuple[str, ...]
    context_vocab: tuple[str, ...]
    counts: np.ndarray
    totals: tuple[int, ...]

    def __eq__(self, other):
        return (
            isinstance(other, ContextVectorSet)
            and self.words == other.words
            and self.context_vocab == other.context_vocab
            and self.totals == other.totals
            and np.array_equal(self.counts, other.counts)
        )

    def matrix(self) -> np.ndarray:
        n = len(self.words)
        return self.counts.reshape(n, -1).astype(np.float64)

    def vector(self, word: str) -> np.ndarray:
        return self.matrix()[self.words.index(word)]


def _word_frequencies(corpus: AnnotatedCorpus, tagset) -> dict[str, int]:
    freqs: dict[str, int] = {}
    for doc in corpus.documents:
        for sent in doc.sentences:
            for tok in sent.tokens:
                if tagset.coarse(tok.pos) == "punct":
                    continue
                word = tok.surface.lower()
                freqs[word] = freqs.get(word, 0) + 1
    return freqs


def _top_words(freqs: dict[str, int], n: int) -> list[str]:
    return sorted(freqs, key=lambda w: (-freqs[w], w))[:n]


def build_context_vectors(
    corpus: AnnotatedCorpus,
    n_targets: int = 300,
    k_contexts: int = 150,
    target_words=None,
    context_words=None,
) -> ContextVectorSet:
    """Count context words at offsets +-1, +-2 around each target occurrence."""
    freqs = _word_frequencies(corpus, corpus.tagset)
    if target_words is None:
        targets = _top_words(freqs, n_targets)
    else:
        targets = []
        for word in target_words:
            if word.lower() in freqs:
                targets.append(word.lower())
            else:
                warnings.warn(f"target word {word!r} absent from corpus; excluded")
    if context_words is None:
        context_words = _top_words(freqs, k_contexts)
    vocab = tuple(context_words) + (BOUNDARY,)
    ctx_index = {w: i for i, w in enumerate(vocab)}
    tgt_index = {w: i for i, w in enumerate(targets)}
    counts = np.zeros((len(targets), len(OFFSETS), len(vocab)), dtype=np.int64)
    for doc in corpus.documents:
        for sent in doc.sentences:
            surfaces = [t.surface.lower() for t in sent.tokens]
            for i, word in enumerate(surfaces):
                ti = tgt_index.get(word)
                if ti is None:
                    continue
                for oi, offset in enumerate(OFFSETS):
                    j = i + offset
                    if 0 <= j < len(surfaces):
                        ci = ctx_index.get(surfaces[j])
                        if ci is not None:
                            counts[ti, oi, ci] += 1
                    else:
                        counts[ti, oi, ctx_index[BOUNDARY]] += 1
    totals = tuple(freqs.get(w, 0) for w in targets)
    return ContextVectorSet(tuple(targets), vocab, counts, totals)


# ---------------------------------------------------------------------------
# similarity


def similarity_matrix(mat: np.ndarray, measure: str = "spearman") -> np.ndarray:
    """Symmetric similarity in [-1, 1]; zero rows score 0 against everything."""
    if measure not in MEASURES:
        raise ValueError(f"unknown similarity measure {measure!r}")
    mat = np.asarray(mat, dtype=np.float64)
    if measure == "cosine":
        sim = kernels.pairwise_cosine(mat)
    else:
        sim = kernels.pairwise_corr(kernels.rank_rows(mat))
        # rank correlation is undefined for constant rows: identical non-zero
        # vectors still count as perfectly similar
        nonzero = np.abs(mat).sum(axis=1) > 0
        variety = np.array([len(np.unique(row)) > 1 for row in mat])
        for i in np.where(nonzero & ~variety)[0]:
            for j in np.where(nonzero & ~variety)[0]:
                sim[i, j] = 1.0
    # exactly equal non-zero vectors are perfectly similar, float error aside
    groups: dict[bytes, list[int]] = {}
    for i in range(len(mat)):
        if np.abs(mat[i]).sum() > 0:
            groups.setdefault(mat[i].tobytes(), []).append(i)
    for rows_equal in groups.values():
        for i in rows_equal:
            for j in rows_equal:
                sim[i, j] = 1.0
    for i in range(len(mat)):
        sim[i, i] = 1.0 if np.abs(mat[i]).sum() > 0 else 0.0
    return sim


def similarity(v1: np.ndarray, v2: np.ndarray, measure: str = "spearman") -> float:
    sim = similarity_matrix(np.vstack([v1, v2]), measure)
    return float(sim[0, 1])


# ---------------------------------------------------------------------------
# single-link clustering


@dataclass(frozen=True)
class Dendrogram:
    """Binary merge tree.  Node ids: leaf i, merge k -> len(leaves)+k.

    Merge similarities are non-increasing: single-link clustering is the
    maximum-spanning-tree construction over the pairwise similarity graph.
    """

    leaves: tuple[str, ...]
    freqs: tuple[int, ...]
    merges: tuple[tuple[int, int, float], ...]

    def components_at(self, level: float) -> list[list[int]]:
        """Leaf index components connected by merges with similarity >= level."""
        parent = list(range(len(self.leaves)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        node_leaves: dict[int, int] = {i: i for i in range(len(self.leaves))}
        for k, (left, right, sim) in enumerate(self.merges):
            node_id = len(self.leaves) + k
            l_rep = node_leaves[left]
            r_rep = node_leaves[right]
            node_leaves[node_id] = l_rep
            if sim >= level:
                parent[find(r_rep)] = find(l_rep)
        groups: dict[int, list[int]] = {}
        for i in range(len(self.leaves)):
            groups.setdefault(find(i), []).append(i)
        return sorted(groups.values(), key=lambda g: self.leaves[min(g)])


@dataclass(frozen=True)
class WordClassSet:
    """Disjoint classes cut from a dendrogram, ordered by total frequency."""

    classes: tuple[tuple[str, tuple[str, ...], int], ...]
    cut_level: float

    def lexicon(self, seed: Lexicon | None = None) -> Lexicon:
        """word -> class label map; seed entries win over class labels."""
        entries = {}
        for label, members, _ in self.classes:
            for word in members:
                entries[word] = label
        if seed is not None:
            for word, sem in seed.entries:
                entries[word] = sem
        aliases = seed.aliases if seed is not None else ()
        return Lexicon(entries=tuple(sorted(entries.items())), aliases=aliases)


def single_link_cluster(words, freqs, sim: np.ndarray) -> Dendrogram:
    """Maximum-spanning-tree construction: sort pairs by similarity descending
    (ties broken lexicographically on the word pair), union components."""
    n = len(words)
    if n < 2:
        raise ValueError("need at least 2 items to cluster")
    pairs = []
    for i in range(n):
        for j in range(i + 1, n):
            a, b = sorted((words[i], words[j]))
            pairs.append((-float(sim[i, j]), a, b, i, j))
    pairs.sort()
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    node_of_root: dict[int, int] = {i: i for i in range(n)}
    min_word: dict[int, str] = {i: words[i] for i in range(n)}
    merges = []
    for neg_sim, _, _, i, j in pairs:
        ri, rj = find(i), find(j)
        if ri == rj:
            continue
        left, right = node_of_root[ri], node_of_root[rj]
        if min_word[rj] < min_word[ri]:
            left, right = right, left
        merges.append((left, right, -neg_sim))
        parent[rj] = ri
        node_of_root[ri] = n + len(merges) - 1
        min_word[ri] = min(min_word[ri], min_word[rj])
        if len(merges) == n - 1:
            break
    return Dendrogram(tuple(words), tuple(int(f) for f in freqs), tuple(merges))


def cluster_vectors(vectors: ContextVectorSet, measure: str = "spearman") -> Dendrogram:
    sim = similarity_matrix(vectors.matrix(), measure)
    return single_link_cluster(vectors.words, vectors.totals, sim)


def cut_dendrogram(dendrogram: Dendrogram, level: float) -> WordClassSet:
    """Classes = components using only merges with similarity >= level,
    ordered by total corpus frequency descending."""
    components = dendrogram.components_at(level)
    classes = []
    for comp in components:
        members = tuple(dendrogram.leaves[i] for i in sorted(comp))
        freq = sum(dendrogram.freqs[i] for i in comp)
        classes.append((members, freq))
    classes.sort(key=lambda c: (-c[1], c[0][0]))
    labeled = tuple(
        (f"C{i + 1}", members, freq) for i, (members, freq) in enumerate(classes)
    )
    return WordClassSet(labeled, float(level))


def auto_cut_level(dendrogram: Dendrogram) -> float:
    """Cut level halfway across the largest gap between consecutive merge sims."""
    sims = [m[2] for m in dendrogram.merges]
    if len(sims) < 2:
        return sims[0] if sims else 0.0
    gaps = [(sims[k] - sims[k + 1], k) for k in range(len(sims) - 1)]
    best_gap, best_k = max(gaps, key=lambda g: (g[0], -g[1]))
    return (sims[best_k] + sims[best_k + 1]) / 2.0


def label_classes_by_seed(wcs: WordClassSet, seed: Lexicon) -> WordClassSet:
    """Name each class by the majority seed label among its members."""
    labeled = []
    for default_label, members, freq in wcs.classes:
        votes: dict[str, int] = {}
        for word in members:
            sem = seed.sem(word)
            if sem:
                votes[sem] = votes.get(sem, 0) + 1
        if votes:
            label = max(sorted(votes), key=lambda s: votes[s])
        else:
            label = default_label
        labeled.append((label, members, freq))
    return WordClassSet(tuple(labeled), wcs.cut_level)


def vectors_from_element(root) -> ContextVectorSet:
    """Rebuild a ContextVectorSet from its markup element."""
    vocab = tuple(root.attrib["CONTEXTS"].split())
    ctx_index = {w: i for i, w in enumerate(vocab)}
    off_index = {str(o): i for i, o in enumerate(OFFSETS)}
    words = []
    totals = []
    rows = []
    for vec in root:
        words.append(vec.attrib["WORD"])
        totals.append(int(vec.attrib["TOTAL"]))
        row = np.zeros((len(OFFSETS), len(vocab)), dtype=np.int64)
        for c in vec:
            row[off_index[c.attrib["POS"]], ctx_index[c.attrib["WORD"]]] = int(
                c.attrib["N"]
            )
        rows.append(row)
    counts = (
        np.stack(rows) if rows else np.zeros((0, len(OFFSETS), len(vocab)), dtype=np.int64)
    )
    return ContextVectorSet(tuple(words), vocab, counts, tuple(totals))


# ---------------------------------------------------------------------------
# rank-frequency fitting


@dataclass(frozen=True)
class ZipfFit:
    """f(n) = C / (n + b) ** a"""

    c: float
    a: float
    b: float

    def predict(self, rank: float) -> float:
        return self.c / (rank + self.b) ** self.a


def zipf_fit(rank_freq, b_max: float = 10.0, grid: int = 201) -> ZipfFit:
    """Least-squares fit of log f against log(n + b), with b scanned over a
    grid and then refined."""
    if len(rank_freq) < 3:
        raise FitError("need at least 3 rank/frequency points")
    ranks = np.array([float(r) for r, _ in rank_freq])
    freqs = np.array([float(f) for _, f in rank_freq])
    if np.any(freqs <= 0):
        raise FitError("frequencies must be positive")
    if np.any(np.diff(freqs) > 0):
        raise FitError("frequencies must be non-increasing in rank")
    if np.all(freqs == freqs[0]):
        raise FitError("constant frequencies: nothing to fit")
    log_f = np.log(freqs)

    def sse(b: float) -> float:
        x = np.log(ranks + b)
        coeffs, residuals, _, _ = np.linalg.lstsq(
            np.vstack([x, np.ones_like(x)]).T, log_f, rcond=None
        )
        pred = coeffs[0] * x + coeffs[1]
        return float(((pred - log_f) ** 2).sum())

    grid_points = np.linspace(0.0, b_max, grid)
    best_b = min(grid_points, key=sse)
    step = b_max / (grid - 1)
    lo = max(0.0, best_b - step)
    hi = min(b_max, best_b + step)
    result = minimize_scalar(sse, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    b = float(result.x)
    if sse(best_b) < sse(b):
        b = float(best_b)
    x = np.log(ranks + b)
    coeffs, _, _, _ = np.linalg.lstsq(np.vstack([x, np.ones_like(x)]).T, log_f, rcond=None)
    return ZipfFit(c=float(np.exp(coeffs[1])), a=float(-coeffs[0]), b=b)
