"""Abstraction of terms and sentences into lexico-semantic paradigms.

Content words are replaced by their category (with part of speech), while
function words stay literal: "myocardial infarction" becomes
`BODY-PART<adj> DISEASE<noun/s>`.  Named paradigm sets fold recurring
shapes into `$NAME` references; folding sentence shapes and merging rows
that differ in one function word or a trailing optional suffix composes
`$$`-level patterns.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass, replace

from . import cluster, matcher
from .collocate import TermBank, TermEntry
from .errors import AbstractionError, MarkupError
from .model import AnnotatedCorpus, Sentence, Tagset, FUNCTION_CLASSES

_POS_DISPLAY = {"noun": "noun/s", "noun-plural": "noun/pl"}


# ---------------------------------------------------------------------------
# paradigm elements


@dataclass(frozen=True)
class CategoryLabel:
    category: str
    pos: str


@dataclass(frozen=True)
class FunctionWord:
    surface: str


@dataclass(frozen=True)
class FunctionAlt:
    words: frozenset[str]


@dataclass(frozen=True)
class SetRef:
    name: str
    level: int


@dataclass(frozen=True)
class VerbGroupAlt:
    lemmas: frozenset[str]


@dataclass(frozen=True)
class ChunkHead:
    kind: str
    head: str


@dataclass(frozen=True)
class TimexMark:
    pass


_FUNCTION_ELEMENTS = (FunctionWord, FunctionAlt)


@dataclass(frozen=True)
class Paradigm:
    elements: tuple
    optional: tuple[bool, ...]
    level: int
    freq: int

    def key(self):
        return (self.elements, self.optional)


def make_paradigm(elements, optional=None, freq: int = 1) -> Paradigm:
    elements = tuple(elements)
    if optional is None:
        optional = tuple(False for _ in elements)
    refs = [e.level for e in elements if isinstance(e, SetRef)]
    level = max(refs) + 1 if refs else 0
    return Paradigm(elements, tuple(optional), level, freq)


@dataclass(frozen=True)
class NamedParadigmSet:
    name: str
    level: int
    members: tuple[Paradigm, ...]

    @property
    def sigil(self) -> str:
        return "$" * self.level + self.name


@dataclass(frozen=True)
class ParadigmBank:
    sets: tuple[NamedParadigmSet, ...] = ()
    ranked: tuple[Paradigm, ...] = ()

    def set(self, name: str) -> NamedParadigmSet:
        for s in self.sets:
            if s.name == name:
                return s
        raise KeyError(name)


def named_set(name: str, members) -> NamedParadigmSet:
    members = tuple(members)
    level = max([1] + [p.level for p in members])
    return NamedParadigmSet(name, level, members)


# ---------------------------------------------------------------------------
# abstraction


def _pos_display(tag: str, tagset: Tagset) -> str:
    coarse = tagset.coarse(tag)
    return _POS_DISPLAY.get(coarse, tagset.display_class(tag))


def abstract_term(entry: TermEntry, tagset: Tagset) -> Paradigm:
    """Level-0 paradigm of a bank term: categories for content words,
    literal function words.  Fails if a content word has no category."""
    elements = []
    for tok in entry.tokens:
        coarse = tagset.coarse(tok.pos)
        if coarse in FUNCTION_CLASSES:
            elements.append(FunctionWord(tok.surface.lower()))
        elif coarse == "punct":
            continue
        elif tok.sem is None:
            raise AbstractionError(
                f"no category for content word {tok.surface!r} in {entry.text()!r}"
            )
        else:
            elements.append(CategoryLabel(tok.sem, _pos_display(tok.pos, tagset)))
    if not elements:
        raise AbstractionError(f"term {entry.text()!r} abstracts to nothing")
    return make_paradigm(elements, freq=entry.freq)


def abstract_bank(bank: TermBank, tagset: Tagset):
    """Abstract every entry; returns (paradigms, skipped) where skipped
    pairs each failing entry with the reason."""
    paradigms = []
    skipped = []
    for entry in bank.entries:
        try:
            paradigms.append(abstract_term(entry, tagset))
        except AbstractionError as exc:
            skipped.append((entry, str(exc)))
    return paradigms, skipped


def abstract_sentence(sentence: Sentence, tagset: Tagset) -> Paradigm:
    """Chunk-aware level-0 shape of a whole sentence: verb groups by head
    lemma, noun groups by head word, date chunks as TIMEX marks."""
    elements = []
    consumed: set[str] = set()
    for i, tok in enumerate(sentence.tokens):
        if tok.id in consumed:
            continue
        chunk = sentence.chunk_at(i)
        # a one-word noun group is just its word; other chunks abstract
        # to their head structure
        if chunk is not None and not (chunk.kind == "NG" and len(chunk.tokens) == 1):
            consumed.update(t.id for t in chunk.tokens)
            head = chunk.head
            if chunk.kind == "TIMEX":
                elements.append(TimexMark())
            elif chunk.kind == "VG":
                lemma = (head.lemma or head.surface).lower()
                elements.append(VerbGroupAlt(frozenset({lemma})))
            else:
                elements.append(ChunkHead("NG", head.surface.lower()))
            continue
        coarse = tagset.coarse(tok.pos)
        if coarse == "punct":
            continue
        if coarse in FUNCTION_CLASSES:
            elements.append(FunctionWord(tok.surface.lower()))
        elif tok.sem is None:
            raise AbstractionError(
                f"no category for content word {tok.surface!r} in sentence {sentence.id}"
            )
        else:
            elements.append(CategoryLabel(tok.sem, _pos_display(tok.pos, tagset)))
    if not elements:
        raise AbstractionError(f"sentence {sentence.id} abstracts to nothing")
    return make_paradigm(elements)


def rank_paradigms(paradigms) -> list[Paradigm]:
    """Merge identical element sequences, sum their frequencies, sort by
    descending frequency (ties lexicographic on the serialized form)."""
    merged: dict = {}
    for p in paradigms:
        if p.key() in merged:
            merged[p.key()] = replace(merged[p.key()], freq=merged[p.key()].freq + p.freq)
        else:
            merged[p.key()] = p
    return sorted(merged.values(), key=lambda p: (-p.freq, paradigm_to_text(p)))


# ---------------------------------------------------------------------------
# folding


def fold_paradigm(p: Paradigm, sets, verb_alternations=()) -> Paradigm:
    """Replace maximal subsequences matching a named-set member by a
    reference to that set (longest match wins, then leftmost), and widen
    declared verb alternations."""
    elements = list(p.elements)
    optional = list(p.optional)
    for alt in verb_alternations:
        alt = frozenset(alt)
        for i, el in enumerate(elements):
            if isinstance(el, VerbGroupAlt) and el.lemmas <= alt:
                elements[i] = VerbGroupAlt(alt)
    ordered_sets = sorted(sets, key=lambda s: s.name)
    out_elements = []
    out_optional = []
    i = 0
    while i < len(elements):
        best = None  # (length, set)
        for pset in ordered_sets:
            for member in pset.members:
                L = len(member.elements)
                if L == 0 or i + L > len(elements):
                    continue
                if any(optional[i : i + L]):
                    continue
                if tuple(elements[i : i + L]) == member.elements:
                    if best is None or L > best[0]:
                        best = (L, pset)
        if best is not None:
            L, pset = best
            out_elements.append(SetRef(pset.name, pset.level))
            out_optional.append(False)
            i += L
        else:
            out_elements.append(elements[i])
            out_optional.append(optional[i])
            i += 1
    return make_paradigm(out_elements, out_optional, freq=p.freq)


def fold_paradigms(paradigms, sets, verb_alternations=(), merge: bool = False):
    """Fold every paradigm; with merge=True also unify rows differing in a
    single function word and absorb prefix rows by marking the extra
    suffix optional."""
    folded = rank_paradigms(
        fold_paradigm(p, sets, verb_alternations) for p in paradigms
    )
    if merge:
        folded = merge_function_alts(folded)
        folded = merge_optional_suffix(folded)
    return folded


def merge_function_alts(paradigms) -> list[Paradigm]:
    """Rows identical except at one function-word position merge into a row
    with an alternation at that position.  Runs to a fixpoint."""
    rows = list(paradigms)
    changed = True
    while changed:
        changed = False
        for i in range(len(rows)):
            for j in range(i + 1, len(rows)):
                merged = _merge_one_alt(rows[i], rows[j])
                if merged is not None:
                    rows = [r for k, r in enumerate(rows) if k not in (i, j)]
                    rows.append(merged)
                    changed = True
                    break
            if changed:
                break
    return rank_paradigms(rows)


def _words_of(el) -> frozenset[str] | None:
    if isinstance(el, FunctionWord):
        return frozenset({el.surface})
    if isinstance(el, FunctionAlt):
        return el.words
    return None


def _merge_one_alt(a: Paradigm, b: Paradigm) -> Paradigm | None:
    if len(a.elements) != len(b.elements) or a.optional != b.optional:
        return None
    diff = [i for i, (x, y) in enumerate(zip(a.elements, b.elements)) if x != y]
    if len(diff) != 1:
        return None
    i = diff[0]
    wa, wb = _words_of(a.elements[i]), _words_of(b.elements[i])
    if wa is None or wb is None:
        return None
    elements = list(a.elements)
    elements[i] = FunctionAlt(wa | wb)
    return make_paradigm(elements, a.optional, freq=a.freq + b.freq)


def merge_optional_suffix(paradigms) -> list[Paradigm]:
    """A row that is a strict prefix of another merges into it: the extra
    suffix elements become optional, except function words directly before
    an optional element (the matcher treats those as connectors)."""
    rows = sorted(paradigms, key=lambda p: (len(p.elements), paradigm_to_text(p)))
    changed = True
    while changed:
        changed = False
        for i in range(len(rows)):
            for j in range(len(rows)):
                if i == j:
                    continue
                short, long_ = rows[i], rows[j]
                n = len(short.elements)
                if n >= len(long_.elements):
                    continue
                if short.elements != long_.elements[:n] or short.optional != long_.optional[:n]:
                    continue
                optional = list(long_.optional)
                for k in range(n, len(long_.elements)):
                    if not isinstance(long_.elements[k], _FUNCTION_ELEMENTS):
                        optional[k] = True
                merged = make_paradigm(
                    long_.elements, optional, freq=short.freq + long_.freq
                )
                rows = [r for k, r in enumerate(rows) if k not in (i, j)]
                rows.append(merged)
                changed = True
                break
            if changed:
                break
    return rank_paradigms(rows)


def collect_set(name: str, paradigms, category: str) -> NamedParadigmSet:
    """Gather folded rows mentioning a category into a named set (the
    engineer's grouping step for `$$`-level structures)."""
    members = [
        p
        for p in paradigms
        if any(isinstance(e, CategoryLabel) and e.category == category for e in p.elements)
    ]
    return named_set(name, members)


# ---------------------------------------------------------------------------
# serialization (Fig-style notation)


def element_to_text(el, optional: bool = False) -> str:
    if isinstance(el, CategoryLabel):
        text = f"{el.category}<{el.pos}>"
    elif isinstance(el, FunctionWord):
        text = f'"{el.surface}"'
    elif isinstance(el, FunctionAlt):
        text = "{" + ", ".join(f'"{w}"' for w in sorted(el.words)) + "}"
    elif isinstance(el, SetRef):
        text = "$" * el.level + el.name
    elif isinstance(el, VerbGroupAlt):
        if len(el.lemmas) == 1:
            text = f'<V head = "{next(iter(el.lemmas))}">'
        else:
            text = f"<V head = {{{', '.join(sorted(el.lemmas))}}}>"
    elif isinstance(el, ChunkHead):
        text = f'<NC head = "{el.head}">'
    elif isinstance(el, TimexMark):
        text = "<TIMEX>"
    else:
        raise TypeError(type(el))
    return text + "?" if optional else text


def paradigm_to_text(p: Paradigm) -> str:
    return " ".join(element_to_text(e, o) for e, o in zip(p.elements, p.optional))


_PIECE_RE = re.compile(
    r"""
    (?P<cat>[A-Z][A-Z0-9-]*)<(?P<pos>[^>]+)>
  | "(?P<word>[^"]*)"
  | \{(?P<alt>[^}]*)\}
  | (?P<dollars>\$+)(?P<set>[A-Za-z][A-Za-z0-9_-]*)
  | <(?P<chunk>[^>]*)>
    """,
    re.X,
)


def paradigm_from_text(text: str, level: int | None = None, freq: int = 1) -> Paradigm:
    elements = []
    optional = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _PIECE_RE.match(text, pos)
        if not m:
            raise MarkupError(f"cannot parse paradigm at {text[pos:]!r}")
        pos = m.end()
        if m.group("cat"):
            el = CategoryLabel(m.group("cat"), m.group("pos"))
        elif m.group("word") is not None:
            el = FunctionWord(m.group("word"))
        elif m.group("alt") is not None:
            words = frozenset(
                w.strip().strip('"') for w in m.group("alt").split(",") if w.strip()
            )
            el = FunctionAlt(words)
        elif m.group("dollars"):
            el = SetRef(m.group("set"), len(m.group("dollars")))
        else:
            el = _chunk_element(m.group("chunk"))
        opt = pos < len(text) and text[pos] == "?"
        if opt:
            pos += 1
        elements.append(el)
        optional.append(opt)
    p = make_paradigm(elements, optional, freq=freq)
    if level is not None and level != p.level:
        p = Paradigm(p.elements, p.optional, level, p.freq)
    return p


def _chunk_element(body: str):
    body = body.strip()
    if body.upper() == "TIMEX":
        return TimexMark()
    m = re.match(r"(V|NC|NG)\s+head\s*=\s*(.+)$", body)
    if not m:
        raise MarkupError(f"cannot parse chunk element <{body}>")
    kind, value = m.group(1), m.group(2).strip()
    if value.startswith("{"):
        words = frozenset(
            w.strip().strip('"') for w in value.strip("{}").split(",") if w.strip()
        )
    else:
        words = frozenset({value.strip('"')})
    if kind == "V":
        return VerbGroupAlt(words)
    return ChunkHead("NG", next(iter(sorted(words))))


# ---------------------------------------------------------------------------
# bridging to the matcher


def to_pattern(p: Paradigm) -> matcher.PatternAST:
    constituents = []
    for el, opt in zip(p.elements, p.optional):
        if isinstance(el, CategoryLabel):
            atom = matcher.TypeRef(el.category)
        elif isinstance(el, FunctionWord):
            atom = matcher.Lit(el.surface)
        elif isinstance(el, FunctionAlt):
            atom = matcher.AltSet(el.words)
        elif isinstance(el, SetRef):
            atom = matcher.PatRef(el.name)
        elif isinstance(el, VerbGroupAlt):
            atom = matcher.ChunkCon("VG", el.lemmas)
        elif isinstance(el, ChunkHead):
            atom = matcher.ChunkCon("NG", frozenset({el.head}))
        elif isinstance(el, TimexMark):
            atom = matcher.ChunkCon("TIMEX", None)
        else:
            raise TypeError(type(el))
        constituents.append(matcher.Constituent(atom, optional=opt))
    return matcher.PatternAST(tuple(constituents))


def register_sets(store: matcher.PatternStore, sets) -> None:
    """Expose named paradigm sets as pattern alternatives for `$NAME` refs."""
    for pset in sets:
        store.add_alternatives(pset.name, [to_pattern(m) for m in pset.members])


def cluster_paradigms(
    paradigms,
    corpus: AnnotatedCorpus,
    store: matcher.PatternStore | None = None,
    k_contexts: int = 150,
    measure: str = "spearman",
) -> cluster.Dendrogram:
    """Cluster paradigms by the contexts their corpus occurrences appear in
    (two tokens each side of the matched span)."""
    import numpy as np

    paradigms = list(paradigms)
    if store is None:
        store = matcher.PatternStore()
    spans_per = []
    kept = []
    for p in paradigms:
        pattern = to_pattern(p)
        occurrences = []
        for m in matcher.match_pattern(pattern, corpus, min_score=1.0, store=store):
            occurrences.append((m.doc_id, m.sentence_id, m.span))
        if not occurrences:
            warnings.warn(f"paradigm {paradigm_to_text(p)!r} has no corpus occurrences")
            continue
        kept.append(p)
        spans_per.append(occurrences)
    if len(kept) < 2:
        raise ValueError("need at least 2 paradigms with corpus occurrences")
    freqs = {}
    for doc in corpus.documents:
        for sent in doc.sentences:
            for tok in sent.tokens:
                w = tok.surface.lower()
                freqs[w] = freqs.get(w, 0) + 1
    vocab = tuple(sorted(freqs, key=lambda w: (-freqs[w], w))[:k_contexts]) + (
        cluster.BOUNDARY,
    )
    ctx_index = {w: i for i, w in enumerate(vocab)}
    counts = np.zeros((len(kept), len(cluster.OFFSETS), len(vocab)), dtype=np.int64)
    for pi, occurrences in enumerate(spans_per):
        for doc_id, sent_id, (s, e) in occurrences:
            sent = next(x for x in corpus.doc(doc_id).sentences if x.id == sent_id)
            surfaces = [t.surface.lower() for t in sent.tokens]
            for oi, offset in enumerate(cluster.OFFSETS):
                j = s + offset if offset < 0 else e + offset - 1
                if 0 <= j < len(surfaces):
                    ci = ctx_index.get(surfaces[j])
                    if ci is not None:
                        counts[pi, oi, ci] += 1
                else:
                    counts[pi, oi, ctx_index[cluster.BOUNDARY]] += 1
    names = [paradigm_to_text(p) for p in kept]
    totals = [len(s) for s in spans_per]
    vectors = cluster.ContextVectorSet(tuple(names), vocab, counts, tuple(totals))
    return cluster.cluster_vectors(vectors, measure)
