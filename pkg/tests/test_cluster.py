import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lexforge import kernels
from lexforge.annotate import TagLexicon, annotate_text
from lexforge.cluster import (
    BOUNDARY,
    Dendrogram,
    auto_cut_level,
    build_context_vectors,
    cluster_vectors,
    cut_dendrogram,
    label_classes_by_seed,
    similarity,
    similarity_matrix,
    single_link_cluster,
    zipf_fit,
)
from lexforge.errors import FitError
from lexforge.markup import artifact_from_text, artifact_to_text
from lexforge.model import Lexicon


def tiny_corpus(text):
    lex = TagLexicon()
    return annotate_text(text, lex)


def test_context_vectors_tiny_corpus():
    corpus = tiny_corpus("a b c")
    vectors = build_context_vectors(corpus, target_words=["b"], context_words=["a", "c"])
    assert vectors.words == ("b",)
    a, c, boundary = (vectors.context_vocab.index(w) for w in ("a", "c", BOUNDARY))
    counts = vectors.counts[0]
    offsets = {o: i for i, o in enumerate((-2, -1, 1, 2))}
    assert counts[offsets[-1], a] == 1
    assert counts[offsets[1], c] == 1
    assert counts[offsets[-2], boundary] == 1
    assert counts[offsets[2], boundary] == 1
    assert counts.sum() == 4


def test_context_vectors_double_occurrence():
    one = build_context_vectors(
        tiny_corpus("a b c"), target_words=["b"], context_words=["a", "c"]
    )
    two = build_context_vectors(
        tiny_corpus("a b c. a b c."), target_words=["b"], context_words=["a", "c"]
    )
    # punctuation is not counted as context vocabulary, only as position filler
    assert (two.counts[0][:, : one.counts.shape[2] - 1] >= one.counts[0][:, :-1]).all()
    assert two.totals[0] == 2 * one.totals[0]


def test_missing_target_warns():
    with pytest.warns(UserWarning):
        vectors = build_context_vectors(
            tiny_corpus("a b c"), target_words=["zzz"], context_words=["a"]
        )
    assert vectors.words == ()


def test_vectors_markup_round_trip():
    vectors = build_context_vectors(
        tiny_corpus("a b c. c b a."), target_words=["a", "b"], context_words=["a", "b", "c"]
    )
    assert artifact_from_text(artifact_to_text(vectors)) == vectors


# -- similarity -------------------------------------------------------------


def test_disjoint_support_cosine_is_zero():
    v1 = np.zeros(8)
    v1[0] = 3.0
    v2 = np.zeros(8)
    v2[1] = 5.0
    assert similarity(v1, v2, "cosine") == 0.0


def test_disjoint_support_spearman_matches_scipy_oracle():
    # frozen from scipy.stats.spearmanr on the same vectors: -1/7
    v1 = np.zeros(8)
    v1[0] = 3.0
    v2 = np.zeros(8)
    v2[1] = 5.0
    assert similarity(v1, v2, "spearman") == pytest.approx(-1 / 7)


@st.composite
def count_vectors(draw):
    d = draw(st.integers(min_value=2, max_value=12))
    v1 = draw(st.lists(st.integers(0, 9), min_size=d, max_size=d))
    v2 = draw(st.lists(st.integers(0, 9), min_size=d, max_size=d))
    return np.array(v1, float), np.array(v2, float)


@settings(max_examples=80, deadline=None)
@given(count_vectors(), st.sampled_from(["spearman", "cosine"]))
def test_similarity_properties(pair, measure):
    v1, v2 = pair
    s = similarity(v1, v2, measure)
    assert -1.0 <= s <= 1.0
    assert similarity(v2, v1, measure) == pytest.approx(s)
    if v1.any():
        assert similarity(v1, v1, measure) == 1.0
        assert similarity(3.0 * v1, v2, measure) == pytest.approx(s)
    else:
        assert s == 0.0


def test_kernel_backends_agree():
    rng = np.random.default_rng(0)
    mat = rng.integers(0, 6, size=(12, 20)).astype(float)
    assert np.allclose(kernels.rank_rows(mat), kernels._rank_rows_np(mat))
    ranks = kernels._rank_rows_np(mat)
    assert np.allclose(kernels.pairwise_corr(ranks), kernels._pairwise_corr_np(ranks))
    assert np.allclose(kernels.pairwise_cosine(mat), kernels._pairwise_cosine_np(mat))


# -- single-link clustering ---------------------------------------------------


def sim_from_pairs(words, values):
    n = len(words)
    sim = np.eye(n)
    for (a, b), value in values.items():
        i, j = words.index(a), words.index(b)
        sim[i, j] = sim[j, i] = value
    return sim


def test_three_word_merge_order():
    words = ["a", "b", "c"]
    sim = sim_from_pairs(words, {("a", "b"): 0.9, ("b", "c"): 0.5, ("a", "c"): 0.1})
    d = single_link_cluster(words, [3, 2, 1], sim)
    assert d.merges == ((0, 1, 0.9), (3, 2, 0.5))


def test_equal_similarities_merge_lexicographically():
    words = ["c", "a", "b"]
    sim = sim_from_pairs(words, {("a", "b"): 0.4, ("b", "c"): 0.4, ("a", "c"): 0.4})
    d = single_link_cluster(words, [1, 1, 1], sim)
    assert [m[2] for m in d.merges] == [0.4, 0.4]
    # first pair chosen is (a, b): leaf indices 1 and 2
    assert d.merges[0][:2] == (1, 2)


def threshold_components(n, sim, level):
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(n):
        for j in range(i + 1, n):
            if sim[i, j] >= level:
                parent[find(j)] = find(i)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), set()).add(i)
    return frozenset(frozenset(g) for g in groups.values())


def random_oracle_case(rng):
    n = rng.randint(2, 8)
    sim = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            sim[i, j] = sim[j, i] = round(rng.random(), 3)
    return n, sim


def test_dendrogram_matches_threshold_graph_oracle():
    rng = random.Random(11)
    for _ in range(30):
        n, sim = random_oracle_case(rng)
        words = [f"w{i}" for i in range(n)]
        d = single_link_cluster(words, [1] * n, sim)
        assert all(
            d.merges[k][2] >= d.merges[k + 1][2] for k in range(len(d.merges) - 1)
        )
        levels = {sim[i, j] for i in range(n) for j in range(i + 1, n)} | {0.0, 1.1}
        for level in levels:
            ours = frozenset(frozenset(c) for c in d.components_at(level))
            assert ours == threshold_components(n, sim, level)


def test_cut_boundaries():
    words = ["a", "b", "c"]
    sim = sim_from_pairs(words, {("a", "b"): 0.9, ("b", "c"): 0.5, ("a", "c"): 0.1})
    d = single_link_cluster(words, [3, 2, 1], sim)
    assert len(cut_dendrogram(d, 0.95).classes) == 3
    assert len(cut_dendrogram(d, 0.4).classes) == 1


def test_cut_orders_classes_by_frequency():
    words = ["a", "b", "c", "d"]
    sim = sim_from_pairs(
        words,
        {("a", "b"): 0.9, ("c", "d"): 0.8, ("b", "c"): 0.1, ("a", "c"): 0.1,
         ("a", "d"): 0.1, ("b", "d"): 0.1},
    )
    d = single_link_cluster(words, [1, 2, 10, 20], sim)
    cut = cut_dendrogram(d, 0.5)
    assert [c[1] for c in cut.classes] == [("c", "d"), ("a", "b")]
    assert [c[2] for c in cut.classes] == [30, 3]


def planted_corpus():
    rng = random.Random(3)
    drugs = ["aspirin", "nitrate", "statin", "heparin"]
    diseases = ["angina", "infarction", "stenosis", "failure"]
    sentences = []
    for _ in range(60):
        w = rng.choice(drugs)
        sentences.append(f"doctor gave {w} dose")
        w = rng.choice(diseases)
        sentences.append(f"patient developed {w} today")
    return tiny_corpus(". ".join(sentences) + "."), drugs, diseases


def test_planted_partition_recovered():
    corpus, drugs, diseases = planted_corpus()
    vectors = build_context_vectors(corpus, target_words=drugs + diseases, k_contexts=12)
    d = cluster_vectors(vectors, measure="spearman")
    cut = cut_dendrogram(d, auto_cut_level(d))
    families = {frozenset(members) for _, members, _ in cut.classes}
    assert frozenset(drugs) in families
    assert frozenset(diseases) in families


def test_label_classes_by_seed():
    cut = cut_dendrogram(
        single_link_cluster(
            ["aspirin", "statin", "angina"],
            [5, 4, 9],
            sim_from_pairs(
                ["aspirin", "statin", "angina"],
                {("aspirin", "statin"): 0.9, ("aspirin", "angina"): 0.1,
                 ("statin", "angina"): 0.1},
            ),
        ),
        0.5,
    )
    seed = Lexicon(entries=(("aspirin", "DRUG"), ("angina", "DISEASE")))
    labeled = label_classes_by_seed(cut, seed)
    labels = {members: label for label, members, _ in labeled.classes}
    assert labels[("aspirin", "statin")] == "DRUG"
    assert labels[("angina",)] == "DISEASE"
    lex = labeled.lexicon(seed)
    assert lex.sem("statin") == "DRUG"


def test_dendrogram_artifact_round_trip():
    words = ["a", "b", "c"]
    sim = sim_from_pairs(words, {("a", "b"): 0.9, ("b", "c"): 0.5, ("a", "c"): 0.1})
    d = single_link_cluster(words, [3, 2, 1], sim)
    assert artifact_from_text(artifact_to_text(d)) == d


# -- rank-frequency fitting ---------------------------------------------------


def test_zipf_exact_inverse_rank():
    pairs = [(n, 1000.0 / n) for n in range(1, 30)]
    fit = zipf_fit(pairs)
    assert abs(fit.a - 1.0) < 1e-6
    assert abs(fit.b) < 1e-6
    assert abs(fit.c - 1000.0) < 1e-6


def test_zipf_recovers_shifted_exponent():
    pairs = [(n, 500.0 / (n + 2.0) ** 1.2) for n in range(1, 40)]
    fit = zipf_fit(pairs)
    assert abs(fit.a - 1.2) < 1e-4
    assert abs(fit.b - 2.0) < 1e-3
    assert abs(fit.c - 500.0) < 1e-2


def test_zipf_plateau_is_error():
    with pytest.raises(FitError):
        zipf_fit([(1, 5.0), (2, 5.0), (3, 5.0)])


def test_zipf_needs_three_points():
    with pytest.raises(FitError):
        zipf_fit([(1, 5.0), (2, 4.0)])
