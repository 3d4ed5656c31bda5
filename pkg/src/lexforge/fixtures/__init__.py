"""Bundled demonstration data: a patient-discharge-style corpus with its
tagging lexicon, a hand-built medical thesaurus, term banks and paradigm
set declarations.  Everything the CLI examples and the acceptance suite
run on."""

from importlib import resources

from .. import annotate, markup
from ..matcher import PatternStore
from ..thesaurus import load_thesaurus


def read_fixture(name: str) -> str:
    return resources.files(__package__).joinpath(name).read_text("utf-8")


def fixture_path(name: str) -> str:
    return str(resources.files(__package__).joinpath(name))


def tag_lexicon() -> annotate.TagLexicon:
    return annotate.load_tag_lexicon(read_fixture("lexicon.mkp"))


def suffix_rules():
    return annotate.load_suffix_rules(read_fixture("suffix_rules.txt"))


def stop_list() -> set[str]:
    return {line.strip() for line in read_fixture("stoplist.txt").splitlines() if line.strip()}


def _annotate(name: str, doc_id: str):
    return annotate.annotate_text(
        read_fixture(name), tag_lexicon(), suffix_rules(), doc_id=doc_id
    )


def pds_corpus():
    return _annotate("pds.txt", "pds")


def fig3_corpus():
    return _annotate("fig3_corpus.txt", "fig3")


def matcher_corpus():
    return _annotate("matcher_corpus.txt", "m")


def medical_thesaurus():
    return load_thesaurus(read_fixture("thesaurus.mkp"))


def fig4_bank():
    return markup.artifact_from_text(read_fixture("fig4_bank.mkp"))


def infarction_bank():
    return markup.artifact_from_text(read_fixture("infarction_bank.mkp"))


def paradigm_sets():
    return markup.artifact_from_text(read_fixture("paradigm_sets.mkp")).sets


def default_pattern_store() -> PatternStore:
    store = PatternStore()
    store.add("PERSON", "[PERSON]")
    store.add("DATE", "<TIMEX>")
    return store


FIG3_PATTERN = (
    '$PERSON <V head = {suffer, have, sustain, develop}> '
    '<NC head = "infarction"> {"on", "in"} $DATE?'
)

GROUP_PATTERN = "{{[disease].<>[body-component]}}"
