import pytest

from lexforge.annotate import DEFAULT_TAGSET, TagLexicon, annotate_text
from lexforge.collocate import (
    CandidateSet,
    TermBank,
    TermEntry,
    TermRef,
    TermToken,
    annotated_text,
    apply_stop_list,
    expand_inclusion,
    harvest_candidates,
    inclusion_text,
    number_and_include,
    threshold_and_decompose,
)
from lexforge.markup import artifact_from_text, artifact_to_text


def lexicon():
    lex = TagLexicon()
    lex.tag_counts.update(
        {
            "the": {"DT": 9}, "an": {"DT": 9}, "a": {"DT": 9}, "of": {"IN": 9},
            "in": {"IN": 9}, "at": {"IN": 9},
            "myocardial": {"JJ": 5}, "ischaemic": {"JJ": 5}, "severe": {"JJ": 5},
            "infarction": {"NN": 9}, "history": {"NN": 9}, "heart": {"NN": 9},
            "disease": {"NN": 9}, "patient": {"NN": 9}, "artery": {"NN": 9},
            "had": {"VBD": 9}, "showed": {"VBD": 9}, "confirmed": {"VBD": 9},
            "he": {"PRON": 9}, "she": {"PRON": 9},
        }
    )
    lex.sems.update(
        {
            "myocardial": "BODY-PART",
            "infarction": "DISEASE",
            "history": "INFORMATION",
            "heart": "BODY-PART",
            "disease": "DISEASE",
            "artery": "BODY-PART",
        }
    )
    return lex


CATEGORIES = {"BODY-PART", "DISEASE", "INFORMATION"}


def harvest(text):
    corpus = annotate_text(text, lexicon())
    return harvest_candidates(corpus, CATEGORIES)


def surfaces(key):
    return " ".join(t.surface for t in key)


def test_chunk_counts():
    cands = harvest("He had a myocardial infarction. She had a myocardial infarction.")
    counts = {surfaces(k): c for k, c in cands.counts.items()}
    assert counts["myocardial infarction"] == 2


def test_determiner_stripped_at_front_only():
    cands = harvest("He had an acute myocardial infarction.")
    assert {surfaces(k) for k in cands.counts} == {"acute myocardial infarction"}


def test_chunk_without_category_not_harvested():
    cands = harvest("He had a severe headache.")
    assert all("headache" not in surfaces(k) for k in cands.counts)


def test_pp_attachment_harvested():
    cands = harvest("She had a history of ischaemic heart disease.")
    names = {surfaces(k) for k in cands.counts}
    assert "history of ischaemic heart disease" in names
    # the internal determiner survives in attachment position
    cands = harvest("She had a history of an infarction.")
    assert "history of an infarction" in {surfaces(k) for k in cands.counts}


def test_head_index_is_first_group_head():
    cands = harvest("She had a history of ischaemic heart disease.")
    key = next(k for k in cands.counts if surfaces(k) == "history of ischaemic heart disease")
    assert cands.heads[key] == 0


def tokens(*pairs):
    return tuple(TermToken(s, p, sem) for s, p, sem in pairs)


def candidate_set(counts):
    heads = {k: len(k) - 1 for k in counts}
    return CandidateSet(dict(counts), heads, DEFAULT_TAGSET)


def test_stop_list_removes_fully_stopped():
    key = tokens(("the", "DT", None), ("patient", "NN", None))
    out = apply_stop_list(candidate_set({key: 4}), {"the", "patient"})
    assert out.counts == {}


def test_stop_list_keeps_partly_stopped():
    key = tokens(("severe", "JJ", None), ("stenosis", "NN", "DISEASE"))
    out = apply_stop_list(candidate_set({key: 4}), {"patient"})
    assert key in out.counts


def test_stop_list_edge_trim_then_unigram_drop():
    key = tokens(("of", "IN", None), ("artery", "NN", "BODY-PART"))
    out = apply_stop_list(candidate_set({key: 4}), {"of"})
    assert out.counts == {}
    out = apply_stop_list(candidate_set({key: 4}), {"of"}, keep_unigrams=True)
    assert {surfaces(k) for k in out.counts} == {"artery"}


# -- Fig-style bank fixture ---------------------------------------------------

MI = tokens(("myocardial", "JJ", "BODY-PART"), ("infarction", "NN", "DISEASE"))
ANT_MI = tokens(("anterior", "JJ", None)) + MI
INF_MI = tokens(("inferior", "JJ", None)) + MI
EST_INF_MI = tokens(("established", "JJ", None)) + INF_MI
HISTORY_IHD = tokens(
    ("history", "NN", "INFORMATION"), ("of", "IN", None), ("ischaemic", "JJ", None),
    ("heart", "NN", "BODY-PART"), ("disease", "NN", "DISEASE"),
)
HISTORY_AMI = tokens(("history", "NN", "INFORMATION"), ("of", "IN", None), ("an", "DT", None)) + ANT_MI
MOD_SEV_STEN = tokens(
    ("moderately", "JJ", None), ("severe", "JJ", None), ("stenosis", "NN", "DISEASE")
)
AV_STEN = tokens(
    ("aortic", "JJ", "BODY-PART"), ("valve", "NN", "BODY-PART"), ("stenosis", "NN", "DISEASE")
)
STEN_RCA = tokens(
    ("stenosis", "NN", "DISEASE"), ("in", "IN", None), ("the", "DT", None),
    ("right", "JJ", None), ("coronary", "JJ", "BODY-PART"), ("artery", "NN", "BODY-PART"),
)

FIG_COUNTS = {
    MI: 373, ANT_MI: 475, INF_MI: 550, EST_INF_MI: 17, HISTORY_IHD: 48,
    HISTORY_AMI: 21, MOD_SEV_STEN: 23, AV_STEN: 46, STEN_RCA: 79,
}
FIG_NUMS = {
    MI: 136, ANT_MI: 234, INF_MI: 467, HISTORY_IHD: 1154,
    HISTORY_AMI: 2574, MOD_SEV_STEN: 2974, AV_STEN: 2980, STEN_RCA: 3004,
}


def fig_heads(key):
    if key in (HISTORY_IHD, HISTORY_AMI, STEN_RCA):
        return 0 if key is not HISTORY_AMI else 0
    return len(key) - 1


def fig_candidates():
    heads = {k: (0 if k in (HISTORY_IHD, HISTORY_AMI, STEN_RCA) else len(k) - 1)
             for k in FIG_COUNTS}
    return CandidateSet(dict(FIG_COUNTS), heads, DEFAULT_TAGSET)


def test_decomposition_transfers_to_maximal_subphrase():
    bank = threshold_and_decompose(fig_candidates(), threshold=20)
    by_text = {e.text(): e for e in bank.entries}
    assert "established inferior myocardial infarction" not in by_text
    assert by_text["inferior myocardial infarction"].freq == 550 + 17
    assert by_text["myocardial infarction"].freq == 373


def test_no_op_when_all_above_threshold():
    counts = {MI: 373, ANT_MI: 475}
    bank = threshold_and_decompose(candidate_set(counts), threshold=10)
    assert {e.text(): e.freq for e in bank.entries} == {
        "myocardial infarction": 373,
        "anterior myocardial infarction": 475,
    }


def test_chain_decomposition_only_maximal_receives():
    a = tokens(("x", "NN", "DISEASE"), ("y", "NN", None))
    b = tokens(("w", "NN", None)) + a
    c = tokens(("v", "NN", None)) + b
    bank = threshold_and_decompose(candidate_set({a: 50, b: 30, c: 1}), threshold=5)
    by_text = {e.text(): e.freq for e in bank.entries}
    assert by_text == {"x y": 50, "w x y": 31}


def test_decomposition_conserves_mass():
    cands = fig_candidates()
    total_before = sum(cands.counts.values())
    bank = threshold_and_decompose(cands, threshold=20)
    assert sum(e.freq for e in bank.entries) == total_before


def fig_bank():
    entries = []
    for key, freq in FIG_COUNTS.items():
        if key == EST_INF_MI:
            continue
        head = 0 if key in (HISTORY_IHD, HISTORY_AMI, STEN_RCA) else len(key) - 1
        entries.append(TermEntry(key, freq, head, num=FIG_NUMS[key]))
    return TermBank(tuple(entries))


def test_inclusion_uses_longest_embedded_term_first():
    bank = number_and_include(fig_bank())
    forms = {e.num: inclusion_text(e) for e in bank.entries}
    assert forms[234] == "anterior $136"
    assert forms[467] == "inferior $136"
    assert forms[2574] == "history of an $234"
    assert forms[2980] is None
    assert forms[3004] is None


def test_entry_without_includes_keeps_tokens():
    bank = number_and_include(fig_bank())
    entry = bank.by_num(2974)
    assert entry.inclusion == entry.tokens


def test_inclusion_expansion_reproduces_tokens():
    bank = number_and_include(fig_bank())
    for entry in bank.entries:
        assert expand_inclusion(entry, bank) == entry.tokens


def test_inclusion_graph_is_acyclic_by_length():
    bank = number_and_include(fig_bank())
    for entry in bank.entries:
        for item in entry.inclusion:
            if isinstance(item, TermRef):
                assert len(bank.by_num(item.num).tokens) < len(entry.tokens)


def test_fresh_numbering_descends_by_frequency():
    entries = (
        TermEntry(MI, 373, 1),
        TermEntry(ANT_MI, 475, 2),
        TermEntry(MOD_SEV_STEN, 23, 2),
    )
    bank = number_and_include(TermBank(entries))
    nums = {e.text(): e.num for e in bank.entries}
    assert nums["anterior myocardial infarction"] == 1
    assert nums["myocardial infarction"] == 2
    assert nums["moderately severe stenosis"] == 3


def test_annotated_text_notation():
    assert annotated_text(MI) == "myocardial//BODY-PART infarction//DISEASE"


def test_termbank_markup_round_trip():
    bank = number_and_include(fig_bank())
    again = artifact_from_text(artifact_to_text(bank))
    assert again == bank
