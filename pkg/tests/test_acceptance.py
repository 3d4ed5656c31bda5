"""Acceptance suite: every criterion checked at its stated tolerance, one
pass/fail line printed per criterion (see conftest)."""

import os
import random
import subprocess
import sys
import time

import numpy as np
import pytest

from lexforge import fixtures
from lexforge.cluster import cut_dendrogram, single_link_cluster, zipf_fit
from lexforge.collocate import number_and_include, inclusion_text
from lexforge.innerctx import (
    build_head_groups,
    cluster_modifiers,
    cooccurring_pairs,
    split_modifiers,
)
from lexforge.markup import corpus_to_text, read_corpus
from lexforge.matcher import (
    PatternAST,
    concordance,
    match_pattern,
    parse_pattern,
)

from corpusgen import random_corpus
from matcher_oracle import oracle_matches
from test_cluster import threshold_components
from test_matcher import random_case


def criterion(label):
    def mark(fn):
        fn._criterion = label
        return fn

    return mark


@criterion("Fig 3 reproduction: 5 matches, date bound in 4, absent in 1, < 1 s")
def test_fig3_reproduction():
    start = time.perf_counter()
    corpus = fixtures.fig3_corpus()
    store = fixtures.default_pattern_store()
    ast = parse_pattern(fixtures.FIG3_PATTERN, store)
    matches = match_pattern(ast, corpus, min_score=0.5, store=store)
    elapsed = time.perf_counter() - start
    assert len(matches) == 5
    dated = [m for m in matches if dict(m.bindings)[4] is not None]
    dateless = [m for m in matches if dict(m.bindings)[4] is None]
    assert len(dated) == 4
    assert len(dateless) == 1
    sent = next(
        s
        for s in corpus.documents[0].sentences
        if s.id == dateless[0].sentence_id
    )
    assert (
        dateless[0].surface(sent) == "She developed an extensive myocardial infarction"
    )
    assert elapsed < 1.0


@criterion("Group pattern {{[disease].<>[body-component]}}: exactly the three "
           "published surface forms, < 1 s")
def test_group_pattern_exact_surfaces():
    start = time.perf_counter()
    corpus = fixtures.matcher_corpus()
    ast = parse_pattern(fixtures.GROUP_PATTERN)
    matches = match_pattern(ast, corpus, min_score=0.5)
    elapsed = time.perf_counter() - start
    sent_of = {s.id: s for s in corpus.documents[0].sentences}
    surfaces = {m.surface(sent_of[m.sentence_id]) for m in matches}
    assert surfaces == {
        "myocardial infarction",
        "infarction of myocardium",
        "stenosis at the origin of left coronary artery",
    }
    assert elapsed < 1.0


FIG6_ROWS = [
    (("developed", "an", "anterior", "myocardial"), ("infarction",), ("from", "which")),
    (("an", "established", "inferior", "myocardial"), ("infarction",), (".", "The")),
    (("an", "acute", "inferior", "myocardial"), ("infarction",), ("with", "CHB")),
    (("subsequent", "episodes", "of", "unstable"), ("angina",), ("including", "an")),
    (("he", "has", "experienced", "unstable"), ("angina",), ("and", "was")),
]


@criterion("Fig 6 KWIC: type DISEASE at distances (4, 2) reproduces the five "
           "published rows, token-aligned, in order")
def test_fig6_kwic_rows():
    corpus = fixtures.pds_corpus()
    matches = match_pattern(parse_pattern("[DISEASE]"), corpus, min_score=1.0)
    rows = [
        (r.left, r.keyword, r.right) for r in concordance(matches, corpus, 4, 2)
    ]
    position = 0
    for want in FIG6_ROWS:
        while position < len(rows) and rows[position] != want:
            position += 1
        assert position < len(rows), f"row not found in order: {want}"
        position += 1


@criterion("Modifier clustering: clusters 1-5 exactly as published "
           "(old in cluster 2) with the five-word rest set")
def test_modifier_clusters_exact():
    bank = number_and_include(fixtures.infarction_bank())
    group = next(
        g for g in build_head_groups(bank) if g.head_display == "infarction"
    )
    thesaurus = fixtures.medical_thesaurus()
    pure, _ = split_modifiers(group, thesaurus)
    clustering = cluster_modifiers(pure, thesaurus, cooccurring_pairs(bank))
    got = {frozenset(c.poles) for c in clustering.clusters}
    assert got == {
        frozenset({frozenset({"chronic"}), frozenset({"acute"})}),
        frozenset(
            {
                frozenset({"major", "extensive", "significant", "large", "old"}),
                frozenset({"minor", "small", "limited"}),
            }
        ),
        frozenset({frozenset({"post"}), frozenset({"previous", "ensuing"})}),
        frozenset({frozenset({"anterior"}), frozenset({"posterior"})}),
        frozenset({frozenset({"inferior"}), frozenset({"superior"})}),
    }
    assert clustering.rest == ("further", "lateral", "recent", "repeated", "suspected")


@criterion("Term inclusion: $234 -> 'anterior $136' and $2574 -> "
           "'history of an $234' under longest-first replacement")
def test_fig4_inclusion_forms():
    bank = number_and_include(fixtures.fig4_bank())
    forms = {e.num: inclusion_text(e) for e in bank.entries}
    assert forms[234] == "anterior $136"
    assert forms[2574] == "history of an $234"


@criterion("Clustering oracle: 200 random instances (n <= 8), every threshold "
           "equals brute-force graph components, zero mismatches")
def test_clustering_matches_oracle_200():
    rng = random.Random(42)
    mismatches = 0
    for _ in range(200):
        n = rng.randint(2, 8)
        sim = np.eye(n)
        for i in range(n):
            for j in range(i + 1, n):
                sim[i, j] = sim[j, i] = round(rng.random(), 3)
        words = [f"w{i}" for i in range(n)]
        dendrogram = single_link_cluster(words, [1] * n, sim)
        levels = {sim[i, j] for i in range(n) for j in range(i + 1, n)}
        levels |= {0.0, 0.5, 1.01}
        for level in levels:
            ours = {
                frozenset(members)
                for _, members, _ in cut_dendrogram(dendrogram, level).classes
            }
            want = {
                frozenset(words[i] for i in comp)
                for comp in threshold_components(n, sim, level)
            }
            if ours != want:
                mismatches += 1
    assert mismatches == 0


@criterion("Rank-frequency fit: 20 synthetic parameter triples recovered "
           "within 5% relative error per parameter")
def test_zipf_recovery_20_triples():
    rng = random.Random(7)
    for _ in range(20):
        c = rng.uniform(50, 5000)
        a = rng.uniform(0.6, 2.0)
        b = rng.uniform(0.3, 5.0)
        pairs = [(n, c / (n + b) ** a) for n in range(1, 60)]
        fit = zipf_fit(pairs)
        assert abs(fit.c - c) / c < 0.05
        assert abs(fit.a - a) / a < 0.05
        assert abs(fit.b - b) / b < 0.05


@criterion("Matcher oracle: 500 random cases equal brute-force enumeration; "
           "score formula hand-checks hold")
def test_matcher_oracle_500():
    rng = random.Random(99)
    for _ in range(500):
        corpus, ast, min_score = random_case(rng)
        got = sorted(
            (m.doc_id, m.sentence_id, m.span, round(m.score, 9), m.level)
            for m in match_pattern(ast, corpus, min_score=min_score)
        )
        want = sorted(
            (d, s, span, round(score, 9), level)
            for d, s, span, score, level in oracle_matches(ast, corpus, min_score)
        )
        assert got == want
    # hand-checks of the score formula
    from test_matcher import toy_corpus

    full = match_pattern(parse_pattern('"alpha" "beta"'), toy_corpus(["alpha", "beta"]))
    assert full[0].score == 1.0
    absent = match_pattern(
        parse_pattern('"alpha" "beta" "gamma"?'),
        toy_corpus(["alpha", "beta"]),
        min_score=0.5,
    )
    assert absent[0].score == pytest.approx(2 / 2.5)
    gapped = match_pattern(
        parse_pattern('"alpha" .1 "beta"'),
        toy_corpus(["alpha", "x", "beta"]),
        min_score=0.2,
    )
    assert gapped[0].score == pytest.approx(0.5)


@criterion("Interchange: 1,000 randomized corpora round-trip structurally; "
           "re-serialization is byte-identical")
def test_interchange_round_trip_1000():
    rng = random.Random(123)
    for _ in range(1000):
        corpus = random_corpus(rng)
        text = corpus_to_text(corpus)
        again = read_corpus(text)
        assert again == corpus
        assert corpus_to_text(again) == text


@criterion("Pipeline: raw text to $$DISEASE paradigms through the CLI in "
           "under 30 s, containing the four published rows")
def test_pipeline_cli_end_to_end(tmp_path):
    env = dict(os.environ)
    start = time.perf_counter()

    def cli(*argv):
        result = subprocess.run(
            [sys.executable, "-m", "lexforge.cli", *argv],
            capture_output=True,
            text=True,
            env=env,
        )
        assert result.returncode == 0, result.stderr + result.stdout
        return result.stdout

    fx = fixtures.fixture_path
    corpus = str(tmp_path / "corpus.mkp")
    vectors = str(tmp_path / "vectors.mkp")
    tree = str(tmp_path / "tree.mkp")
    classes = str(tmp_path / "classes.mkp")
    bank = str(tmp_path / "bank.mkp")
    paradigms = str(tmp_path / "paradigms.mkp")
    folded = str(tmp_path / "folded.mkp")

    cli("annotate", "--in", fx("pds.txt"), "--lexicon", fx("lexicon.mkp"),
        "--suffix-rules", fx("suffix_rules.txt"), "--doc-id", "pds", "--out", corpus)
    cli("cluster", "vectors", "--corpus", corpus, "--targets", "60",
        "--contexts", "40", "--out", vectors)
    cli("cluster", "tree", "--vectors", vectors, "--out", tree)
    cli("cluster", "cut", "--tree", tree, "--seed-lexicon", fx("lexicon.mkp"),
        "--out", classes)
    cli("collocate", "--corpus", corpus, "--categories", classes,
        "--stoplist", fx("stoplist.txt"), "--threshold", "3", "--out", bank)
    cli("innerctx", "--bank", bank, "--thesaurus", fx("thesaurus.mkp"),
        "--head", "infarction", "--out", str(tmp_path / "mods.mkp"))
    cli("generalize", "abstract", "--bank", bank, "--corpus", corpus,
        "--out", paradigms)
    cli("generalize", "fold", "--paradigms", paradigms,
        "--sets", fx("paradigm_sets.mkp"), "--collect", "DISEASE", "--out", folded)
    elapsed = time.perf_counter() - start

    from lexforge.generalize import paradigm_to_text
    from lexforge.markup import artifact_from_text

    result = artifact_from_text((tmp_path / "folded.mkp").read_text())
    disease = result.set("DISEASE")
    assert disease.sigil == "$$DISEASE"
    texts = {paradigm_to_text(m) for m in disease.members}
    assert {
        "$BODY-PART DISEASE<noun/s>",
        'DISEASE<noun/s> "in" $DATE',
        '$BODY-PART DISEASE<noun/s> "in" $DATE',
        'DISEASE<noun/s> "of" $BODY-PART',
    } <= texts
    assert elapsed < 30.0
