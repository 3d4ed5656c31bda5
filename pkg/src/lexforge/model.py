"""Data model for annotated corpora.

Corpus values are immutable after construction (frozen dataclasses over
tuples) and therefore safe to share across threads.  Structural equality
is plain dataclass equality.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import CorpusValidationError

SEM_RE = re.compile(r"[A-Z][A-Z0-9-]*$")
CHUNK_KINDS = ("NG", "VG", "TIMEX")

# Closed inventory of coarse part-of-speech classes.
COARSE_CLASSES = (
    "noun",
    "noun-plural",
    "adj",
    "verb",
    "aux",
    "det",
    "prep",
    "conj",
    "num",
    "punct",
    "other",
)

FUNCTION_CLASSES = frozenset({"det", "prep", "conj", "aux"})


@dataclass(frozen=True)
class WordToken:
    id: str
    surface: str
    pos: str
    sem: str | None = None
    lemma: str | None = None


@dataclass(frozen=True)
class Chunk:
    id: str
    kind: str
    head_id: str
    tokens: tuple[WordToken, ...]

    @property
    def head(self) -> WordToken:
        for tok in self.tokens:
            if tok.id == self.head_id:
                return tok
        raise CorpusValidationError(
            f"chunk {self.id}: head {self.head_id} not among chunk tokens",
            offender=self.id,
        )


@dataclass(frozen=True)
class Sentence:
    id: str
    tokens: tuple[WordToken, ...]
    chunks: tuple[Chunk, ...] = ()

    def chunk_span(self, chunk: Chunk) -> tuple[int, int]:
        """Token index range [start, end) the chunk covers in this sentence."""
        ids = [t.id for t in self.tokens]
        start = ids.index(chunk.tokens[0].id)
        return start, start + len(chunk.tokens)

    def chunk_at(self, index: int) -> Chunk | None:
        for chunk in self.chunks:
            start, end = self.chunk_span(chunk)
            if start <= index < end:
                return chunk
        return None


@dataclass(frozen=True)
class Document:
    id: str
    sentences: tuple[Sentence, ...]


@dataclass(frozen=True)
class Tagset:
    """Closed POS tag inventory; every tag maps to exactly one coarse class.

    `display` optionally overrides how a tag's class is shown in paradigm
    notation (e.g. PRON renders as "pron" although its coarse class is
    "other").
    """

    tags: tuple[tuple[str, str], ...]
    display: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "display", tuple(sorted(self.display)))
        seen = {}
        for tag, cls in self.tags:
            if cls not in COARSE_CLASSES:
                raise CorpusValidationError(
                    f"tag {tag}: unknown coarse class {cls!r}", offender=tag
                )
            if tag in seen and seen[tag] != cls:
                raise CorpusValidationError(
                    f"tag {tag} mapped to two classes", offender=tag
                )
            seen[tag] = cls

    def coarse(self, tag: str) -> str:
        for t, cls in self.tags:
            if t == tag:
                return cls
        raise KeyError(tag)

    def display_class(self, tag: str) -> str:
        for t, name in self.display:
            if t == tag:
                return name
        return self.coarse(tag)

    def __contains__(self, tag: str) -> bool:
        return any(t == tag for t, _ in self.tags)


@dataclass(frozen=True)
class Lexicon:
    """Category lexicon: word -> semantic label, plus label aliases."""

    entries: tuple[tuple[str, str], ...] = ()
    aliases: tuple[tuple[str, str], ...] = ()

    def sem(self, word: str) -> str | None:
        key = word.lower()
        for w, s in self.entries:
            if w == key:
                return s
        return None

    def resolve_category(self, name: str) -> str:
        key = name.upper()
        for alias, target in self.aliases:
            if alias == key:
                return target
        return key

    def categories(self) -> frozenset[str]:
        names = {s for _, s in self.entries}
        names.update(a for a, _ in self.aliases)
        names.update(t for _, t in self.aliases)
        return frozenset(names)


@dataclass(frozen=True)
class AnnotatedCorpus:
    documents: tuple[Document, ...]
    tagset: Tagset
    lexicon: Lexicon = field(default_factory=Lexicon)

    def doc(self, doc_id: str) -> Document:
        for d in self.documents:
            if d.id == doc_id:
                return d
        raise KeyError(doc_id)

    def sem_categories(self) -> frozenset[str]:
        """Every semantic label present on tokens or in the lexicon."""
        names = set(self.lexicon.categories())
        for d in self.documents:
            for s in d.sentences:
                for t in s.tokens:
                    if t.sem:
                        names.add(t.sem)
        return frozenset(names)


def validate_corpus(corpus: AnnotatedCorpus) -> None:
    """Check every corpus invariant; raise CorpusValidationError naming the offender."""
    doc_ids = set()
    for doc in corpus.documents:
        if doc.id in doc_ids:
            raise CorpusValidationError(f"duplicate document id {doc.id}", offender=doc.id)
        doc_ids.add(doc.id)
        token_ids = set()
        for sent in doc.sentences:
            for tok in sent.tokens:
                if not tok.surface:
                    raise CorpusValidationError(
                        f"token {tok.id}: empty surface", offender=tok.id
                    )
                if tok.pos not in corpus.tagset:
                    raise CorpusValidationError(
                        f"token {tok.id}: undeclared POS tag {tok.pos!r}",
                        offender=tok.pos,
                    )
                if tok.sem is not None and not SEM_RE.match(tok.sem):
                    raise CorpusValidationError(
                        f"token {tok.id}: bad semantic label {tok.sem!r}",
                        offender=tok.id,
                    )
                if tok.id in token_ids:
                    raise CorpusValidationError(
                        f"duplicate token id {tok.id} in document {doc.id}",
                        offender=tok.id,
                    )
                token_ids.add(tok.id)
            _validate_chunks(sent)


def _validate_chunks(sent: Sentence) -> None:
    ids = [t.id for t in sent.tokens]
    covered: set[str] = set()
    for chunk in sent.chunks:
        if chunk.kind not in CHUNK_KINDS:
            raise CorpusValidationError(
                f"chunk {chunk.id}: unknown kind {chunk.kind!r}", offender=chunk.id
            )
        if not chunk.tokens:
            raise CorpusValidationError(
                f"chunk {chunk.id}: no tokens", offender=chunk.id
            )
        if chunk.head_id not in {t.id for t in chunk.tokens}:
            raise CorpusValidationError(
                f"chunk {chunk.id}: head {chunk.head_id} outside chunk",
                offender=chunk.id,
            )
        try:
            start = ids.index(chunk.tokens[0].id)
        except ValueError:
            raise CorpusValidationError(
                f"chunk {chunk.id}: token {chunk.tokens[0].id} not in sentence {sent.id}",
                offender=chunk.id,
            ) from None
        for offset, tok in enumerate(chunk.tokens):
            pos = start + offset
            if pos >= len(ids) or ids[pos] != tok.id:
                raise CorpusValidationError(
                    f"chunk {chunk.id}: tokens not a contiguous run in sentence {sent.id}",
                    offender=chunk.id,
                )
            if tok.id in covered:
                raise CorpusValidationError(
                    f"chunk {chunk.id}: overlaps another chunk at token {tok.id}",
                    offender=chunk.id,
                )
            covered.add(tok.id)
