"""Multi-word term extraction from chunked corpora.

Noun/verb groups carrying domain categories are harvested with counts,
filtered through a stop list, thresholded against a fitted rank-frequency
curve, decomposed below the threshold, then numbered with term-inclusion
links.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from . import cluster
from .errors import MarkupError
from .model import AnnotatedCorpus, Lexicon, Tagset, WordToken

ATTACH_PREPS = frozenset({"of", "in", "at"})


@dataclass(frozen=True)
class TermToken:
    surface: str
    pos: str
    sem: str | None = None


@dataclass(frozen=True)
class TermRef:
    num: int


@dataclass(frozen=True)
class TermEntry:
    tokens: tuple[TermToken, ...]
    freq: int
    head_index: int
    num: int | None = None
    inclusion: tuple | None = None  # TermToken | TermRef items, set by numbering

    @property
    def head_sem(self) -> str | None:
        return self.tokens[self.head_index].sem

    def text(self) -> str:
        return " ".join(t.surface for t in self.tokens)


@dataclass(frozen=True)
class TermBank:
    entries: tuple[TermEntry, ...]
    stop_list: frozenset[str] = frozenset()
    threshold: float = 0.0

    def by_num(self, num: int) -> TermEntry:
        for entry in self.entries:
            if entry.num == num:
                return entry
        raise KeyError(num)


@dataclass
class CandidateSet:
    counts: dict
    heads: dict
    tagset: Tagset


def annotated_text(tokens) -> str:
    """Fig-style `surface//CATEGORY` rendering of an annotated phrase."""
    return " ".join(t.surface if t.sem is None else f"{t.surface}//{t.sem}" for t in tokens)


def inclusion_text(entry: TermEntry) -> str | None:
    if entry.inclusion is None or not any(isinstance(i, TermRef) for i in entry.inclusion):
        return None
    return " ".join(
        f"${item.num}" if isinstance(item, TermRef) else item.surface
        for item in entry.inclusion
    )


def enrich_sems(corpus: AnnotatedCorpus, lexicon: Lexicon) -> AnnotatedCorpus:
    """Fill missing token sems from a category lexicon (token sems win)."""
    docs = []
    for doc in corpus.documents:
        sentences = []
        for sent in doc.sentences:
            replace_map = {}
            for tok in sent.tokens:
                if tok.sem is None:
                    sem = lexicon.sem(tok.surface)
                    if sem:
                        replace_map[tok.id] = replace(tok, sem=sem)
            if not replace_map:
                sentences.append(sent)
                continue
            tokens = tuple(replace_map.get(t.id, t) for t in sent.tokens)
            chunks = tuple(
                replace(
                    c, tokens=tuple(replace_map.get(t.id, t) for t in c.tokens)
                )
                for c in sent.chunks
            )
            sentences.append(replace(sent, tokens=tokens, chunks=chunks))
        docs.append(replace(doc, sentences=tuple(sentences)))
    merged = dict(corpus.lexicon.entries)
    merged.update(dict(lexicon.entries))
    aliases = dict(corpus.lexicon.aliases)
    aliases.update(dict(lexicon.aliases))
    return AnnotatedCorpus(
        tuple(docs),
        corpus.tagset,
        Lexicon(tuple(sorted(merged.items())), tuple(sorted(aliases.items()))),
    )


def _term_tokens(tokens: tuple[WordToken, ...]) -> tuple[TermToken, ...]:
    return tuple(TermToken(t.surface.lower(), t.pos, t.sem) for t in tokens)


def harvest_candidates(corpus: AnnotatedCorpus, categories) -> CandidateSet:
    """Collect NG/VG chunks (and NG + of/in/at attachment chains) that contain
    at least one token from the given categories.  Leading determiners are
    stripped; everything after the first preposition is kept verbatim."""
    categories = set(categories)
    counts: dict = {}
    heads: dict = {}
    tagset = corpus.tagset

    def add(tokens, head_token):
        strip = 0
        while strip < len(tokens) and tagset.coarse(tokens[strip].pos) == "det":
            strip += 1
        tokens = tokens[strip:]
        if not tokens:
            return
        ids = [t.id for t in tokens]
        if head_token.id not in ids:
            return
        key = _term_tokens(tokens)
        counts[key] = counts.get(key, 0) + 1
        heads.setdefault(key, ids.index(head_token.id))

    for doc in corpus.documents:
        for sent in doc.sentences:
            spans = {}
            for chunk in sent.chunks:
                start, end = sent.chunk_span(chunk)
                spans[start] = (chunk, end)
            for chunk in sent.chunks:
                if chunk.kind not in ("NG", "VG"):
                    continue
                has_cat = any(t.sem in categories for t in chunk.tokens)
                if has_cat:
                    add(chunk.tokens, chunk.head)
                if chunk.kind != "NG":
                    continue
                # attachment chains: NG (of|in|at NG-or-TIMEX)+
                start, end = sent.chunk_span(chunk)
                chain = list(chunk.tokens)
                chain_has_cat = has_cat
                pos = end
                while (
                    pos < len(sent.tokens)
                    and sent.tokens[pos].surface.lower() in ATTACH_PREPS
                    and pos + 1 in spans
                    and spans[pos + 1][0].kind in ("NG", "TIMEX")
                ):
                    attached, attached_end = spans[pos + 1]
                    chain = chain + [sent.tokens[pos]] + list(attached.tokens)
                    chain_has_cat = chain_has_cat or any(
                        t.sem in categories for t in attached.tokens
                    )
                    if chain_has_cat:
                        add(tuple(chain), chunk.head)
                    pos = attached_end
    return CandidateSet(counts, heads, tagset)


def apply_stop_list(cands: CandidateSet, stop_list, keep_unigrams: bool = False) -> CandidateSet:
    """Trim stop tokens at candidate edges; drop candidates whose content
    words are all stopped; drop unigrams unless enabled."""
    stop = {w.lower() for w in stop_list}
    tagset = cands.tagset
    counts: dict = {}
    heads: dict = {}
    for key, count in cands.counts.items():
        head = cands.heads[key]
        lo, hi = 0, len(key)
        while lo < hi and key[lo].surface in stop:
            lo += 1
        while hi > lo and key[hi - 1].surface in stop:
            hi -= 1
        trimmed = key[lo:hi]
        if not trimmed:
            continue
        if head < lo or head >= hi:
            continue
        content = [
            t
            for t in trimmed
            if tagset.coarse(t.pos) not in ("det", "prep", "conj", "aux", "punct")
        ]
        if content and all(t.surface in stop for t in content):
            continue
        if len(trimmed) < 2 and not keep_unigrams:
            continue
        counts[trimmed] = counts.get(trimmed, 0) + count
        heads.setdefault(trimmed, head - lo)
    return CandidateSet(counts, heads, tagset)


def compute_threshold(
    counts: dict, quantile: float = 0.2, min_fallback: float = 3.0
) -> float:
    """Predicted frequency of the fitted rank-frequency curve at the given
    rank quantile; absolute fallback when the spectrum is too flat to fit."""
    freqs = sorted(counts.values(), reverse=True)
    if len(set(freqs)) < 3:
        return float(min_fallback)
    pairs = [(rank + 1, f) for rank, f in enumerate(freqs)]
    fit = cluster.zipf_fit(pairs)
    rank_q = max(1, round(quantile * len(freqs)))
    return float(fit.predict(rank_q))


def threshold_and_decompose(
    cands: CandidateSet,
    threshold: float | None = None,
    quantile: float = 0.2,
    min_fallback: float = 3.0,
) -> TermBank:
    """Keep candidates at or above the threshold; repeatedly decompose the
    longest failing phrase, adding its count to each maximal contiguous
    sub-phrase that is itself a live candidate, until a fixpoint."""
    if threshold is None:
        threshold = compute_threshold(cands.counts, quantile, min_fallback)
    alive = dict(cands.counts)
    while True:
        failed = [k for k, c in alive.items() if c < threshold]
        if not failed:
            break
        failed.sort(key=lambda k: (-len(k), tuple(t.surface for t in k)))
        key = failed[0]
        count = alive.pop(key)
        for sub in _maximal_subphrases(key, alive):
            alive[sub] += count
    entries = [
        TermEntry(tokens=k, freq=c, head_index=cands.heads[k]) for k, c in alive.items()
    ]
    entries.sort(key=lambda e: (-e.freq, len(e.tokens), e.text()))
    return TermBank(entries=tuple(entries), threshold=float(threshold))


def _maximal_subphrases(key, alive) -> set:
    n = len(key)
    spans = [
        (i, j)
        for i in range(n)
        for j in range(i + 1, n + 1)
        if (j - i) < n and key[i:j] in alive
    ]
    maximal = set()
    for i, j in spans:
        if not any((a <= i and j <= b and (a, b) != (i, j)) for a, b in spans):
            maximal.add(key[i:j])
    return maximal


def number_and_include(bank: TermBank) -> TermBank:
    """Assign `$n` numbers (descending frequency, then length) and replace
    embedded bank terms in each entry's inclusion form, longest first."""
    order = sorted(
        bank.entries, key=lambda e: (-e.freq, len(e.tokens), e.text())
    )
    used = {e.num for e in order if e.num is not None}
    next_num = max(used, default=0) + 1
    numbered = []
    for entry in order:
        if entry.num is None:
            entry = replace(entry, num=next_num)
            next_num += 1
        numbered.append(entry)
    by_len = sorted(numbered, key=lambda e: (-len(e.tokens), e.num))
    final = []
    for entry in numbered:
        includes = [
            other
            for other in by_len
            if len(other.tokens) < len(entry.tokens)
        ]
        final.append(replace(entry, inclusion=_inclusion_items(entry, includes)))
    final.sort(key=lambda e: e.num)
    return TermBank(entries=tuple(final), stop_list=bank.stop_list, threshold=bank.threshold)


def _inclusion_items(entry: TermEntry, includes) -> tuple:
    items: list = []
    i = 0
    n = len(entry.tokens)
    while i < n:
        placed = False
        for other in includes:  # longest first
            L = len(other.tokens)
            if i + L <= n and entry.tokens[i : i + L] == other.tokens:
                items.append(TermRef(other.num))
                i += L
                placed = True
                break
        if not placed:
            items.append(entry.tokens[i])
            i += 1
    return tuple(items)


def expand_inclusion(entry: TermEntry, bank: TermBank) -> tuple[TermToken, ...]:
    """Recursively substitute every `$n` reference back to its token list."""
    if entry.inclusion is None:
        return entry.tokens
    out: list[TermToken] = []
    for item in entry.inclusion:
        if isinstance(item, TermRef):
            out.extend(expand_inclusion(bank.by_num(item.num), bank))
        else:
            out.append(item)
    return tuple(out)


def termbank_from_element(root) -> TermBank:
    """Rebuild a TermBank from its markup element."""
    stop: frozenset[str] = frozenset()
    raw = []
    for child in root:
        if child.tag == "STOPLIST":
            stop = frozenset((child.text or "").split())
        elif child.tag == "TERM":
            raw.append(child)
        else:
            raise MarkupError(f"unknown element <{child.tag}> under <TERMBANK>")
    entries = []
    for el in raw:
        words = (el.text or "").split()
        poses = el.attrib.get("POS", "").split()
        if len(words) != len(poses):
            raise MarkupError(f"TERM POS list does not match phrase: {el.text!r}")
        tokens = []
        for word, pos in zip(words, poses):
            surface, _, sem = word.partition("//")
            tokens.append(TermToken(surface, pos, sem or None))
        entries.append(
            TermEntry(
                tokens=tuple(tokens),
                freq=int(el.attrib["FREQ"]),
                head_index=int(el.attrib.get("HEAD", len(tokens) - 1)),
                num=int(el.attrib["NUM"]) if "NUM" in el.attrib else None,
                inclusion=None,
            )
        )
    bank = TermBank(tuple(entries), stop, float(root.attrib.get("THRESHOLD", 0.0)))
    # second pass: rebuild inclusion forms recorded as INCL attributes
    by_num = {e.num: e for e in bank.entries if e.num is not None}
    rebuilt = []
    for el, entry in zip(raw, bank.entries):
        incl_text = el.attrib.get("INCL")
        if incl_text is None:
            if entry.num is not None:
                entry = replace(entry, inclusion=entry.tokens)
            rebuilt.append(entry)
            continue
        items: list = []
        i = 0
        for part in incl_text.split():
            if part.startswith("$") and part[1:].isdigit():
                ref = TermRef(int(part[1:]))
                if ref.num not in by_num:
                    raise MarkupError(f"INCL references unknown term ${ref.num}")
                items.append(ref)
                i += len(by_num[ref.num].tokens)
            else:
                if i >= len(entry.tokens) or entry.tokens[i].surface != part:
                    raise MarkupError(f"INCL does not align with phrase: {incl_text!r}")
                items.append(entry.tokens[i])
                i += 1
        rebuilt.append(replace(entry, inclusion=tuple(items)))
    return TermBank(tuple(rebuilt), stop, bank.threshold)
