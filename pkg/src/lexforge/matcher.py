"""Fuzzy pattern language over annotated corpora.

A pattern is a sequence of constituents:

    "of"                  literal word (case-folded)
    [DISEASE]             token with that semantic category
    {"on", "in"}          one token out of an alternation set
    <NC head = "x">       chunk of a kind, head constrained to an alternation
    $NAME / $$NAME        reference to a stored pattern (matched exactly)
    {{a . b <> c}}        structural group: all atoms inside one chunk,
                          first atom binds the chunk head; `.` frees the
                          distance, `<>` frees the order, `.<>` frees both
    X?                    optional constituent
    X .2 Y                bounded gap: at most 2 tokens between X and Y

Constituents match in order and adjacently by default.  Every sequence gap
of g tokens multiplies the score by 1/(1+g); a missing optional removes
its weight from the numerator (required weight 1, optional 0.5).  An
alternation/literal directly before an optional constituent is treated as
its connector: it may be absent exactly when the optional is absent.
Matches at or above `min_score` are returned, best first.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import MatchError, PatternSyntaxError
from .model import AnnotatedCorpus, Sentence

# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Lit:
    text: str


@dataclass(frozen=True)
class TypeRef:
    name: str


@dataclass(frozen=True)
class AltSet:
    words: frozenset[str]


@dataclass(frozen=True)
class ChunkCon:
    kind: str
    heads: frozenset[str] | None = None


@dataclass(frozen=True)
class PatRef:
    name: str


@dataclass(frozen=True)
class Group:
    atoms: tuple
    ops: tuple  # between consecutive atoms: "." | "<>" | ".<>"


@dataclass(frozen=True)
class Constituent:
    atom: object
    optional: bool = False
    gap: int | None = None  # declared bound on the gap to the next constituent


@dataclass(frozen=True)
class PatternAST:
    constituents: tuple[Constituent, ...]


@dataclass(frozen=True)
class SavedPattern:
    """A stored pattern plus its free-text conceptual annotation."""

    name: str
    text: str
    concept: str | None = None


class PatternStore:
    """Named patterns resolvable from `$NAME` references.

    Registration order forbids cycles: a pattern may only reference names
    that are already stored."""

    def __init__(self):
        self._alternatives: dict[str, list[PatternAST]] = {}
        self._saved: dict[str, SavedPattern] = {}

    def add(self, name: str, text: str, concept: str | None = None) -> None:
        if name in self._alternatives:
            raise PatternSyntaxError(f"pattern {name!r} already stored", 0)
        ast = parse_pattern(text, self)
        self._alternatives[name] = [ast]
        self._saved[name] = SavedPattern(name, text, concept)

    def add_alternatives(self, name: str, asts) -> None:
        self._alternatives[name] = list(asts)

    def get(self, name: str) -> list[PatternAST]:
        return self._alternatives[name]

    def __contains__(self, name: str) -> bool:
        return name in self._alternatives

    def names(self):
        return sorted(self._alternatives)

    def saved(self, name: str) -> SavedPattern | None:
        return self._saved.get(name)


# ---------------------------------------------------------------------------
# parser

_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_-]*")
_INT_RE = re.compile(r"\d+")
_KIND_MAP = {"NC": "NG", "NG": "NG", "NP": "NG", "V": "VG", "VG": "VG", "TIMEX": "TIMEX"}

_SINGLE_TOKEN_ATOMS = (Lit, TypeRef, AltSet)


class _Parser:
    def __init__(self, text: str, store: PatternStore | None):
        self.text = text
        self.pos = 0
        self.store = store

    def error(self, message: str):
        raise PatternSyntaxError(message, self.pos)

    def ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, s: str) -> bool:
        return self.text.startswith(s, self.pos)

    def eat(self, s: str) -> None:
        if not self.peek(s):
            self.error(f"expected {s!r}")
        self.pos += len(s)

    def name(self) -> str:
        m = _NAME_RE.match(self.text, self.pos)
        if not m:
            self.error("expected a name")
        self.pos = m.end()
        return m.group()

    def string(self) -> str:
        self.eat('"')
        end = self.text.find('"', self.pos)
        if end < 0:
            self.error("unterminated string")
        value = self.text[self.pos : end]
        self.pos = end + 1
        return value

    def parse(self) -> PatternAST:
        constituents = []
        self.ws()
        while self.pos < len(self.text):
            atom = self.atom()
            optional = False
            gap = None
            self.ws()
            if self.peek("?"):
                self.eat("?")
                optional = True
                self.ws()
            if self.peek("."):
                m = _INT_RE.match(self.text, self.pos + 1)
                if m:
                    self.pos = m.end()
                    gap = int(m.group())
                    self.ws()
            constituents.append(Constituent(atom, optional, gap))
        if not constituents:
            self.error("empty pattern")
        return PatternAST(tuple(constituents))

    def atom(self):
        self.ws()
        if self.pos >= len(self.text):
            self.error("expected a constituent")
        if self.peek('"'):
            return Lit(self.string().lower())
        if self.peek("["):
            self.eat("[")
            self.ws()
            name = self.name()
            self.ws()
            self.eat("]")
            return TypeRef(name.upper())
        if self.peek("{{"):
            return self.group()
        if self.peek("{"):
            return self.altset()
        if self.peek("$$") or self.peek("$"):
            sigil = "$$" if self.peek("$$") else "$"
            self.pos += len(sigil)
            name = self.name()
            if self.store is None or name not in self.store:
                self.error(f"unknown pattern reference {sigil}{name}")
            return PatRef(name)
        if self.peek("<"):
            return self.chunk_con()
        self.error(f"unexpected character {self.text[self.pos]!r}")

    def altset(self) -> AltSet:
        self.eat("{")
        words = []
        while True:
            self.ws()
            if self.peek('"'):
                words.append(self.string().lower())
            else:
                words.append(self.name().lower())
            self.ws()
            if self.peek(","):
                self.eat(",")
                continue
            self.eat("}")
            break
        return AltSet(frozenset(words))

    def chunk_con(self) -> ChunkCon:
        self.eat("<")
        self.ws()
        kind = self.name().upper()
        if kind not in _KIND_MAP:
            self.error(f"unknown chunk kind {kind!r}")
        heads = None
        self.ws()
        while not self.peek(">"):
            attr = self.name()
            if attr != "head":
                self.error(f"unknown chunk attribute {attr!r}")
            self.ws()
            self.eat("=")
            self.ws()
            if self.peek('"'):
                heads = frozenset({self.string().lower()})
            elif self.peek("{"):
                heads = self.altset().words
            else:
                heads = frozenset({self.name().lower()})
            self.ws()
        self.eat(">")
        return ChunkCon(_KIND_MAP[kind], heads)

    def group(self) -> Group:
        self.eat("{{")
        atoms = [self._group_atom()]
        ops = []
        while True:
            self.ws()
            if self.peek("}}"):
                self.eat("}}")
                break
            if self.peek(".<>"):
                self.eat(".<>")
                ops.append(".<>")
            elif self.peek("."):
                self.eat(".")
                if self.peek("<>"):
                    self.eat("<>")
                    ops.append(".<>")
                else:
                    ops.append(".")
            elif self.peek("<>"):
                self.eat("<>")
                ops.append("<>")
            else:
                self.error("expected '.', '<>' or '}}' in group")
            atoms.append(self._group_atom())
        return Group(tuple(atoms), tuple(ops))

    def _group_atom(self):
        atom = self.atom()
        if not isinstance(atom, _SINGLE_TOKEN_ATOMS):
            self.error("only words, types and alternations may appear in a group")
        return atom


def parse_pattern(text: str, store: PatternStore | None = None) -> PatternAST:
    return _Parser(text, store).parse()


def pattern_to_text(ast: PatternAST) -> str:
    return " ".join(_constituent_text(c) for c in ast.constituents)


def _atom_text(atom) -> str:
    if isinstance(atom, Lit):
        return f'"{atom.text}"'
    if isinstance(atom, TypeRef):
        return f"[{atom.name}]"
    if isinstance(atom, AltSet):
        return "{" + ", ".join(f'"{w}"' for w in sorted(atom.words)) + "}"
    if isinstance(atom, ChunkCon):
        kind = {"NG": "NC", "VG": "V", "TIMEX": "TIMEX"}[atom.kind]
        if atom.heads is None:
            return f"<{kind}>"
        if len(atom.heads) == 1:
            return f'<{kind} head = "{next(iter(atom.heads))}">'
        return f"<{kind} head = {{{', '.join(sorted(atom.heads))}}}>"
    if isinstance(atom, PatRef):
        return f"${atom.name}"
    if isinstance(atom, Group):
        parts = [_atom_text(atom.atoms[0])]
        for op, a in zip(atom.ops, atom.atoms[1:]):
            parts.append(op)
            parts.append(_atom_text(a))
        return "{{" + "".join(parts) + "}}"
    raise TypeError(type(atom))


def _constituent_text(c: Constituent) -> str:
    text = _atom_text(c.atom)
    if c.optional:
        text += "?"
    if c.gap is not None:
        text += f" .{c.gap}"
    return text


# ---------------------------------------------------------------------------
# matching


@dataclass(frozen=True)
class Match:
    doc_id: str
    sentence_id: str
    span: tuple[int, int]
    bindings: tuple  # (constituent index, (start, end) or None)
    score: float
    level: int

    def surface(self, sentence: Sentence) -> str:
        return " ".join(t.surface for t in sentence.tokens[self.span[0] : self.span[1]])


def _collect_typerefs(ast: PatternAST, store: PatternStore | None, acc: set):
    for c in ast.constituents:
        _collect_atom_typerefs(c.atom, store, acc)


def _collect_atom_typerefs(atom, store, acc: set):
    if isinstance(atom, TypeRef):
        acc.add(atom.name)
    elif isinstance(atom, Group):
        for a in atom.atoms:
            _collect_atom_typerefs(a, store, acc)
    elif isinstance(atom, PatRef) and store is not None:
        for alt in store.get(atom.name):
            _collect_typerefs(alt, store, acc)


def _is_connector(constituents, i: int) -> bool:
    if i + 1 >= len(constituents):
        return False
    c = constituents[i]
    return (
        not c.optional
        and isinstance(c.atom, (Lit, AltSet))
        and constituents[i + 1].optional
    )


class _SentenceIndex:
    def __init__(self, sent: Sentence):
        self.sent = sent
        self.surfaces = [t.surface.lower() for t in sent.tokens]
        self.chunk_at_start: dict[int, tuple] = {}
        self.spans = {}
        for chunk in sent.chunks:
            start, end = sent.chunk_span(chunk)
            self.chunk_at_start[start] = (chunk, end)
            self.spans[chunk.id] = (start, end)


def _atom_spans(atom, idx: _SentenceIndex, i: int, corpus, store):
    """End positions for `atom` starting at token i (group atoms excluded)."""
    sent = idx.sent
    if i >= len(sent.tokens):
        return []
    tok = sent.tokens[i]
    if isinstance(atom, Lit):
        return [i + 1] if idx.surfaces[i] == atom.text else []
    if isinstance(atom, AltSet):
        return [i + 1] if idx.surfaces[i] in atom.words else []
    if isinstance(atom, TypeRef):
        want = corpus.lexicon.resolve_category(atom.name)
        return [i + 1] if tok.sem == want else []
    if isinstance(atom, ChunkCon):
        entry = idx.chunk_at_start.get(i)
        if entry is None:
            return []
        chunk, end = entry
        if chunk.kind != atom.kind:
            return []
        if atom.heads is not None:
            head = chunk.head
            names = {head.surface.lower()}
            if head.lemma:
                names.add(head.lemma.lower())
            if not (names & atom.heads):
                return []
        return [end]
    if isinstance(atom, PatRef):
        ends = set()
        for alt in store.get(atom.name):
            ends.update(_exact_spans(alt, idx, i, corpus, store))
        return sorted(ends)
    if isinstance(atom, Group):
        return sorted(
            {end for start, end, _ in _group_matches(atom, idx, corpus) if start == i}
        )
    raise TypeError(type(atom))


def _exact_spans(ast: PatternAST, idx, i: int, corpus, store):
    """Ends of exact (adjacent, all constituents bound) matches from i."""
    positions = {i}
    for c in ast.constituents:
        nxt = set()
        for p in positions:
            nxt.update(_atom_spans(c.atom, idx, p, corpus, store))
        if not nxt:
            return []
        positions = nxt
    return sorted(positions)


def _extended_span(idx: _SentenceIndex, chunk) -> tuple[int, int]:
    """Chunk span grown across of/in/at + NG/TIMEX attachment chains."""
    start, end = idx.sent.chunk_span(chunk)
    if chunk.kind != "NG":
        return start, end
    pos = end
    while (
        pos < len(idx.sent.tokens)
        and idx.surfaces[pos] in ("of", "in", "at")
        and pos + 1 in idx.chunk_at_start
        and idx.chunk_at_start[pos + 1][0].kind in ("NG", "TIMEX")
    ):
        pos = idx.chunk_at_start[pos + 1][1]
        end = pos
    return start, end


def _single_token_ok(atom, idx: _SentenceIndex, i: int, corpus) -> bool:
    tok = idx.sent.tokens[i]
    if isinstance(atom, Lit):
        return idx.surfaces[i] == atom.text
    if isinstance(atom, AltSet):
        return idx.surfaces[i] in atom.words
    if isinstance(atom, TypeRef):
        return tok.sem == corpus.lexicon.resolve_category(atom.name)
    return False


def _group_matches(group: Group, idx: _SentenceIndex, corpus):
    """All bindings of a group: the first atom on a chunk head, the rest
    inside the chunk's extended span under the declared operators.  Yields
    (hull_start, hull_end, bound_positions)."""
    results = []
    for chunk in idx.sent.chunks:
        if chunk.kind not in ("NG", "VG"):
            continue
        span_start, span_end = _extended_span(idx, chunk)
        tokens = idx.sent.tokens
        head_pos = next(
            k for k in range(span_start, span_end) if tokens[k].id == chunk.head_id
        )
        if not _single_token_ok(group.atoms[0], idx, head_pos, corpus):
            continue

        def assign(atom_i, bound):
            if atom_i == len(group.atoms):
                results.append((min(bound), max(bound) + 1, tuple(bound)))
                return
            op = group.ops[atom_i - 1]
            prev = bound[-1]
            for q in range(span_start, span_end):
                if q in bound:
                    continue
                if op == ".":
                    ok = q > prev
                elif op == "<>":
                    ok = abs(q - prev) == 1
                else:  # ".<>"
                    ok = True
                if ok and _single_token_ok(group.atoms[atom_i], idx, q, corpus):
                    assign(atom_i + 1, bound + [q])

        assign(1, [head_pos])
    return results


def match_pattern(
    ast: PatternAST,
    corpus: AnnotatedCorpus,
    min_score: float = 1.0,
    store: PatternStore | None = None,
) -> list[Match]:
    """All matches scoring at least `min_score`, best score first, then
    document order.  Per starting position only the best match is kept."""
    refs: set[str] = set()
    _collect_typerefs(ast, store, refs)
    known = corpus.sem_categories()
    for name in sorted(refs):
        if corpus.lexicon.resolve_category(name) not in known:
            raise MatchError(f"category {name} not present in corpus lexicon")

    constituents = ast.constituents
    total_weight = sum(0.5 if c.optional else 1.0 for c in constituents)
    matches = []
    for d_idx, doc in enumerate(corpus.documents):
        for s_idx, sent in enumerate(doc.sentences):
            idx = _SentenceIndex(sent)
            best: dict[int, tuple] = {}
            for start in range(len(sent.tokens)):
                for cand in _scan(
                    constituents, idx, start, corpus, store, min_score, total_weight
                ):
                    score, bindings, end, n_absent, level = cand
                    key = start
                    rank = (
                        -score,
                        n_absent,
                        end,
                        tuple(span if span else (-1, -1) for _, span in bindings),
                    )
                    if key not in best or rank < best[key][0]:
                        best[key] = (rank, cand)
            for start in sorted(best):
                score, bindings, end, n_absent, level = best[start][1]
                matches.append(
                    Match(
                        doc_id=doc.id,
                        sentence_id=sent.id,
                        span=(start, end),
                        bindings=bindings,
                        score=score,
                        level=level,
                        )
                )
    matches.sort(
        key=lambda m: (
            -m.score,
            _doc_index(corpus, m.doc_id),
            _sent_index(corpus, m.doc_id, m.sentence_id),
            m.span,
        )
    )
    return matches


def _doc_index(corpus, doc_id):
    return next(i for i, d in enumerate(corpus.documents) if d.id == doc_id)


def _sent_index(corpus, doc_id, sent_id):
    doc = corpus.doc(doc_id)
    return next(i for i, s in enumerate(doc.sentences) if s.id == sent_id)


def _scan(constituents, idx, start, corpus, store, min_score, total_weight):
    """Enumerate complete bindings anchored at `start`; yields
    (score, bindings, end, n_absent, level) tuples."""
    n = len(constituents)
    results = []

    def walk(ci, pos, first_bound, gap_product, weight, bindings, absent_opt, absent_conn, gap_limit):
        if gap_product * 1.0 < min_score - 1e-12:
            return
        if ci == n:
            if first_bound is None:
                return
            score = (weight / total_weight) * gap_product
            if score < min_score - 1e-12:
                return
            if score >= 1.0 - 1e-12:
                level = 0
            elif absent_conn:
                level = 3
            elif absent_opt:
                level = 2
            else:
                level = 1
            results.append((score, tuple(bindings), pos, absent_opt + absent_conn, level))
            return
        c = constituents[ci]
        # absent branches
        if c.optional:
            walk(
                ci + 1, pos, first_bound, gap_product, weight,
                bindings + [(ci, None)], absent_opt + 1, absent_conn, gap_limit,
            )
        elif _is_connector(constituents, ci):
            # connector may drop only together with its optional
            walk(
                ci + 2, pos, first_bound, gap_product, weight,
                bindings + [(ci, None), (ci + 1, None)],
                absent_opt + 1, absent_conn + 1, gap_limit,
            )
        # bound branch
        if first_bound is None:
            gaps = [0]
        else:
            limit = gap_limit if gap_limit is not None else len(idx.sent.tokens)
            gaps = range(0, limit + 1)
        for g in gaps:
            decay = gap_product if g == 0 else gap_product / (1.0 + g)
            if decay < min_score - 1e-12:
                break
            at = pos + g
            for end in _atom_spans(c.atom, idx, at, corpus, store):
                walk(
                    ci + 1,
                    end,
                    at if first_bound is None else first_bound,
                    decay,
                    weight + (0.5 if c.optional else 1.0),
                    bindings + [(ci, (at, end))],
                    absent_opt,
                    absent_conn,
                    c.gap,
                )

    # anchor: the first bound constituent sits exactly at `start`
    walk(0, start, None, 1.0, 0.0, [], 0, 0, None)
    return [r for r in results if r[1] and _first_span(r[1]) == start]


def _first_span(bindings):
    for _, span in bindings:
        if span is not None:
            return span[0]
    return None


# ---------------------------------------------------------------------------
# concordance


@dataclass(frozen=True)
class KwicRow:
    doc_id: str
    sentence_id: str
    left: tuple[str, ...]
    keyword: tuple[str, ...]
    right: tuple[str, ...]


def concordance(matches, corpus: AnnotatedCorpus, left: int, right: int) -> list[KwicRow]:
    """Keyword-in-context rows in document order.  Context is taken from the
    document token stream, so it may run across sentence boundaries."""
    streams = {}
    offsets = {}
    for doc in corpus.documents:
        stream = []
        for sent in doc.sentences:
            offsets[(doc.id, sent.id)] = len(stream)
            stream.extend(t.surface for t in sent.tokens)
        streams[doc.id] = stream
    ordered = sorted(
        matches,
        key=lambda m: (
            _doc_index(corpus, m.doc_id),
            offsets[(m.doc_id, m.sentence_id)] + m.span[0],
        ),
    )
    rows = []
    for m in ordered:
        stream = streams[m.doc_id]
        base = offsets[(m.doc_id, m.sentence_id)]
        s, e = base + m.span[0], base + m.span[1]
        rows.append(
            KwicRow(
                doc_id=m.doc_id,
                sentence_id=m.sentence_id,
                left=tuple(stream[max(0, s - left) : s]),
                keyword=tuple(stream[s:e]),
                right=tuple(stream[e : e + right]),
            )
        )
    return rows


def format_kwic(rows) -> str:
    """Aligned plain-text layout: right-justified left context | keyword | right."""
    if not rows:
        return ""
    left_texts = [" ".join(r.left) for r in rows]
    key_texts = [" ".join(r.keyword) for r in rows]
    width = max(len(t) for t in left_texts)
    key_width = max(len(t) for t in key_texts)
    lines = []
    for row, left_text, key_text in zip(rows, left_texts, key_texts):
        lines.append(
            f"{left_text:>{width}}  {key_text:<{key_width}}  {' '.join(row.right)}".rstrip()
        )
    return "\n".join(lines)
