"""Raw text to annotated corpus: tokenization, POS tagging, chunking, dates.

The tagger is a lexicon-plus-suffix-rule baseline; corpora tagged by an
external tagger can be loaded through the interchange format instead.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .model import (
    AnnotatedCorpus,
    Chunk,
    Document,
    Lexicon,
    Sentence,
    Tagset,
    WordToken,
)

DEFAULT_TAGSET = Tagset(
    tags=(
        ("NN", "noun"),
        ("NNS", "noun-plural"),
        ("NNP", "noun"),
        ("JJ", "adj"),
        ("VB", "verb"),
        ("VBD", "verb"),
        ("VBG", "verb"),
        ("VBN", "verb"),
        ("VBZ", "verb"),
        ("AUX", "aux"),
        ("DT", "det"),
        ("IN", "prep"),
        ("CC", "conj"),
        ("CD", "num"),
        ("ORD", "num"),
        ("PRON", "other"),
        ("PRP$", "det"),
        ("RP", "other"),
        ("RB", "other"),
        ("PUNCT", "punct"),
    ),
    display=(("PRON", "pron"), ("NNP", "noun/s")),
)

ABBREVIATIONS = ("Mr", "Mrs", "Ms", "Dr", "Prof", "St")

_TOKEN_RE = re.compile(
    r"(?:%s)\.[A-Z][A-Za-z]*"  # fused honorific + surname, e.g. Mr.Mcdool
    r"|(?:%s)\."
    r"|\d+(?:st|nd|rd|th)"
    r"|\d+(?:\.\d+)?"
    r"|[A-Za-z][A-Za-z0-9'-]*"
    r"|\.\.\."
    r"|[.,;:!?()\"]"
    % ("|".join(ABBREVIATIONS), "|".join(ABBREVIATIONS))
)

MONTHS = (
    "january february march april may june july august september october november december"
).split()

HAVE_FORMS = frozenset({"have", "has", "had", "having"})
BE_FORMS = frozenset({"be", "is", "are", "was", "were", "been", "being"})


@dataclass(frozen=True)
class RawToken:
    surface: str
    space_before: str = ""


def tokenize(text: str) -> list[list[RawToken]]:
    """Split text into sentences of raw tokens, preserving whitespace.

    Sentences end at . ? ! followed by whitespace and a capital letter,
    except when the period belongs to a known abbreviation.
    """
    tokens: list[RawToken] = []
    pos = 0
    for match in _TOKEN_RE.finditer(text):
        tokens.append(RawToken(match.group(), text[pos : match.start()]))
        pos = match.end()
    sentences: list[list[RawToken]] = []
    current: list[RawToken] = []
    for i, tok in enumerate(tokens):
        current.append(tok)
        if tok.surface in {".", "!", "?", "..."}:
            nxt = tokens[i + 1] if i + 1 < len(tokens) else None
            if nxt is None or (nxt.space_before and nxt.surface[:1].isupper()):
                sentences.append(current)
                current = []
    if current:
        sentences.append(current)
    return sentences


def detokenize(sentences: list[list[RawToken]]) -> str:
    return "".join(t.space_before + t.surface for sent in sentences for t in sent)


@dataclass
class TagLexicon:
    """Tagging lexicon: word -> tag counts, plus optional sem and lemma."""

    tag_counts: dict = field(default_factory=dict)
    sems: dict = field(default_factory=dict)
    lemmas: dict = field(default_factory=dict)
    aliases: tuple = ()

    def best_tag(self, word: str) -> str | None:
        counts = self.tag_counts.get(word.lower())
        if not counts:
            return None
        return max(sorted(counts), key=lambda t: counts[t])

    def has_tag(self, word: str, tag: str) -> bool:
        return tag in self.tag_counts.get(word.lower(), {})

    def category_lexicon(self) -> Lexicon:
        return Lexicon(
            entries=tuple(sorted(self.sems.items())), aliases=tuple(sorted(self.aliases))
        )


def load_tag_lexicon(text: str) -> TagLexicon:
    """Parse a standalone <LEXICON> markup file with TAGS/SEM/LEMMA entries."""
    import xml.etree.ElementTree as ET

    from .errors import MarkupError

    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        line, col = exc.position
        raise MarkupError("malformed lexicon", line, col) from exc
    if root.tag != "LEXICON":
        raise MarkupError(f"expected <LEXICON> root, got <{root.tag}>")
    lex = TagLexicon()
    aliases = []
    for child in root:
        if child.tag == "ENTRY":
            word = child.attrib["WORD"].lower()
            tags = child.attrib.get("TAGS", "")
            if tags:
                counts = {}
                for item in tags.split(","):
                    tag, _, n = item.partition(":")
                    counts[tag] = int(n) if n else 1
                lex.tag_counts[word] = counts
            if "SEM" in child.attrib:
                lex.sems[word] = child.attrib["SEM"]
            if "LEMMA" in child.attrib:
                lex.lemmas[word] = child.attrib["LEMMA"]
        elif child.tag == "ALIAS":
            aliases.append((child.attrib["NAME"], child.attrib["FOR"]))
        else:
            raise MarkupError(f"unknown element <{child.tag}> under <LEXICON>")
    lex.aliases = tuple(aliases)
    return lex


def load_suffix_rules(text: str) -> list[tuple[str, str]]:
    """One rule per line: SUFFIX<TAB>TAG, matched longest-suffix-first."""
    rules = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        suffix, _, tag = line.partition("\t")
        rules.append((suffix, tag.strip()))
    rules.sort(key=lambda r: -len(r[0]))
    return rules


def tag_tokens(
    sentence: list[RawToken], lexicon: TagLexicon, suffix_rules=()
) -> list[tuple[str, str]]:
    """Assign exactly one tag per token: lexicon, local rules, suffixes, default NN."""
    tags: list[str] = []
    surfaces = [t.surface for t in sentence]
    for i, surface in enumerate(surfaces):
        word = surface.lower()
        if re.fullmatch(r"\d+(?:st|nd|rd|th)", word):
            tags.append("ORD")
            continue
        if re.fullmatch(r"\d+(?:\.\d+)?", word):
            tags.append("CD")
            continue
        if re.fullmatch(r"[.,;:!?()\"]|\.\.\.", surface):
            tags.append("PUNCT")
            continue
        tag = lexicon.best_tag(word)
        if tag is None:
            for suffix, rule_tag in suffix_rules:
                if word.endswith(suffix) and len(word) > len(suffix):
                    tag = rule_tag
                    break
        if tag is None:
            tag = "NNP" if surface[:1].isupper() and i > 0 else "NN"
        tags.append(tag)
    # local rule: a have/be form followed by a participle-capable word is AUX,
    # and the following word takes its participle reading
    for i in range(len(surfaces) - 1):
        word = surfaces[i].lower()
        nxt = surfaces[i + 1].lower()
        if word in HAVE_FORMS or word in BE_FORMS:
            if lexicon.has_tag(nxt, "VBN") or (word in BE_FORMS and tags[i + 1] == "VBN"):
                tags[i] = "AUX"
                tags[i + 1] = "VBN"
    return list(zip(surfaces, tags))


# ---------------------------------------------------------------------------
# chunking

NG_PATTERN = ("det?", "num?", "(adj|noun)*", "noun!")  # head = last noun
VG_PATTERN = ("aux*", "verb!", "part?")


def _ng_match(classes: list[str], start: int) -> tuple[int, int] | None:
    """Longest DET? NUM? (ADJ|NOUN)* (NOUN|NOUN-PL) match; returns (end, head)."""
    i = start
    if i < len(classes) and classes[i] == "det":
        i += 1
    if i < len(classes) and classes[i] == "num":
        i += 1
    last_noun = None
    j = i
    while j < len(classes) and classes[j] in ("adj", "noun", "noun-plural"):
        if classes[j] in ("noun", "noun-plural"):
            last_noun = j
        j += 1
    if last_noun is None:
        return None
    return last_noun + 1, last_noun


def _vg_match(classes: list[str], start: int) -> tuple[int, int] | None:
    i = start
    while i < len(classes) and classes[i] == "aux":
        i += 1
    if i < len(classes) and classes[i] == "verb":
        end = i + 1
        return end, i
    return None


def chunk_spans(coarse: list[str], taken: list[bool]) -> list[tuple[str, int, int, int]]:
    """Longest-match left-to-right NG/VG spans over untaken positions."""
    spans = []
    i = 0
    n = len(coarse)
    while i < n:
        if taken[i]:
            i += 1
            continue
        best = None
        for kind, matcher_fn in (("NG", _ng_match), ("VG", _vg_match)):
            res = matcher_fn(coarse, i)
            if res is not None:
                end, head = res
                if all(not taken[k] for k in range(i, end)):
                    if best is None or end > best[2]:
                        best = (kind, i, end, head)
        if best is not None:
            spans.append(best)
            for k in range(best[1], best[2]):
                taken[k] = True
            i = best[2]
        else:
            i += 1
    return spans


def recognize_date_spans(tagged: list[tuple[str, str]]) -> list[tuple[int, int, int]]:
    """TIMEX spans: (start, end, head).  Longest-match, left-to-right."""
    surfaces = [s.lower() for s, _ in tagged]
    spans = []
    i = 0
    n = len(tagged)

    def is_year(idx):
        return re.fullmatch(r"19\d\d|20\d\d", surfaces[idx]) is not None

    def is_two_digit(idx):
        return re.fullmatch(r"\d\d", surfaces[idx]) is not None

    def is_month(idx):
        return surfaces[idx] in MONTHS

    def is_ordinal(idx):
        return re.fullmatch(r"\d+(?:st|nd|rd|th)", surfaces[idx]) is not None

    while i < n:
        end = None
        # Nth of Month [YYYY]
        if (
            is_ordinal(i)
            and i + 2 < n
            and surfaces[i + 1] == "of"
            and is_month(i + 2)
        ):
            end = i + 3
            if end < n and (is_year(end) or is_two_digit(end)):
                end += 1
        # Month YYYY / Month YY
        elif is_month(i):
            end = i + 1
            if end < n and (is_year(end) or is_two_digit(end)):
                end += 1
        # bare four-digit year
        elif is_year(i):
            end = i + 1
        if end is not None:
            spans.append((i, end, end - 1))
            i = end
        else:
            i += 1
    return spans


def annotate_text(
    text: str,
    lexicon: TagLexicon,
    suffix_rules=(),
    doc_id: str = "d1",
    tagset: Tagset = DEFAULT_TAGSET,
) -> AnnotatedCorpus:
    """Full pipeline: tokenize, tag, recognize dates, chunk, assemble corpus."""
    sentences = []
    token_n = 0
    chunk_n = 0
    for s_idx, raw in enumerate(tokenize(text), start=1):
        tagged = tag_tokens(raw, lexicon, suffix_rules)
        tokens = []
        for surface, tag in tagged:
            token_n += 1
            word = surface.lower()
            tokens.append(
                WordToken(
                    id=f"w{token_n}",
                    surface=surface,
                    pos=tag,
                    sem=lexicon.sems.get(word),
                    lemma=lexicon.lemmas.get(word),
                )
            )
        coarse = [tagset.coarse(t.pos) for t in tokens]
        taken = [False] * len(tokens)
        chunks = []
        for start, end, head in recognize_date_spans(tagged):
            chunk_n += 1
            span_tokens = []
            for k in range(start, end):
                tok = tokens[k]
                if tok.sem is None:
                    tok = WordToken(tok.id, tok.surface, tok.pos, "DATE", tok.lemma)
                    tokens[k] = tok
                span_tokens.append(tok)
                taken[k] = True
            chunks.append(
                Chunk(f"c{chunk_n}", "TIMEX", tokens[head].id, tuple(span_tokens))
            )
        for kind, start, end, head in chunk_spans(coarse, taken):
            chunk_n += 1
            chunks.append(
                Chunk(
                    f"c{chunk_n}",
                    kind,
                    tokens[head].id,
                    tuple(tokens[start:end]),
                )
            )
        chunks.sort(key=lambda c: [t.id for t in c.tokens][0].lstrip("w").zfill(8))
        sentences.append(Sentence(f"s{s_idx}", tuple(tokens), tuple(chunks)))
    doc = Document(doc_id, tuple(sentences))
    return AnnotatedCorpus((doc,), tagset, lexicon.category_lexicon())
