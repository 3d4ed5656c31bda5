"""Canonical markup format exchanged between all workbench tools.

The format is the XML-compatible subset of SGML: every element is closed
and attributes are quoted, so one parser serves both reading and writing.
Output is canonical -- fixed attribute order, fixed whitespace, sorted
declaration sections -- so equal values serialize to identical bytes.
"""

from __future__ import annotations

import io
import xml.etree.ElementTree as ET

from .errors import MarkupError, CorpusValidationError
from .model import (
    AnnotatedCorpus,
    Chunk,
    Document,
    Lexicon,
    Sentence,
    Tagset,
    WordToken,
    CHUNK_KINDS,
    validate_corpus,
)

HEADER = '<?xml version="1.0" encoding="UTF-8"?>'


def esc(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _attrs(pairs) -> str:
    return "".join(f' {name}="{esc(value)}"' for name, value in pairs if value is not None)


# ---------------------------------------------------------------------------
# corpus writing


def corpus_to_text(corpus: AnnotatedCorpus) -> str:
    validate_corpus(corpus)
    lines = [HEADER]
    body = []
    body.extend(_tagset_lines(corpus.tagset))
    body.extend(_lexicon_lines(corpus.lexicon))
    for doc in corpus.documents:
        body.append(f'<DOC ID="{esc(doc.id)}">')
        for sent in doc.sentences:
            body.extend(_sentence_lines(sent))
        body.append("</DOC>")
    if body:
        lines.append("<CORPUS>")
        lines.extend(body)
        lines.append("</CORPUS>")
    else:
        lines.append("<CORPUS></CORPUS>")
    return "\n".join(lines) + "\n"


def write_corpus(corpus: AnnotatedCorpus, sink) -> None:
    """Serialize to a byte sink; equal corpora produce byte-identical output."""
    data = corpus_to_text(corpus).encode("utf-8")
    sink.write(data)


def _tagset_lines(tagset: Tagset):
    if not tagset.tags:
        return []
    display = dict(tagset.display)
    lines = ["<TAGSET>"]
    for tag, cls in tagset.tags:
        pairs = [("NAME", tag), ("CLASS", cls), ("DISPLAY", display.get(tag))]
        lines.append(f"<TAG{_attrs(pairs)}/>")
    lines.append("</TAGSET>")
    return lines


def _lexicon_lines(lexicon: Lexicon):
    if not lexicon.entries and not lexicon.aliases:
        return []
    lines = ["<LEXICON>"]
    for word, sem in lexicon.entries:
        lines.append(f'<ENTRY WORD="{esc(word)}" SEM="{esc(sem)}"/>')
    for alias, target in lexicon.aliases:
        lines.append(f'<ALIAS NAME="{esc(alias)}" FOR="{esc(target)}"/>')
    lines.append("</LEXICON>")
    return lines


def _token_line(tok: WordToken) -> str:
    pairs = [("ID", tok.id), ("POS", tok.pos), ("SEM", tok.sem), ("LEMMA", tok.lemma)]
    return f"<W{_attrs(pairs)}>{esc(tok.surface)}</W>"


def _sentence_lines(sent: Sentence):
    lines = [f'<S ID="{esc(sent.id)}">']
    spans = {}
    for chunk in sent.chunks:
        start, end = sent.chunk_span(chunk)
        spans[start] = (chunk, end)
    i = 0
    while i < len(sent.tokens):
        if i in spans:
            chunk, end = spans[i]
            pairs = [("ID", chunk.id), ("HEAD", chunk.head_id)]
            lines.append(f"<{chunk.kind}{_attrs(pairs)}>")
            for tok in chunk.tokens:
                lines.append(_token_line(tok))
            lines.append(f"</{chunk.kind}>")
            i = end
        else:
            lines.append(_token_line(sent.tokens[i]))
            i += 1
    lines.append("</S>")
    return lines


# ---------------------------------------------------------------------------
# corpus reading


def _parse_root(source) -> ET.Element:
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        return ET.fromstring(text)
    except ET.ParseError as exc:
        line, col = exc.position
        raise MarkupError(f"malformed markup: {exc.msg.split(':')[0]}", line, col) from exc


def _require_attrs(el: ET.Element, required, optional=()):
    allowed = set(required) | set(optional)
    for name in el.attrib:
        if name not in allowed:
            raise MarkupError(f"unknown attribute {name!r} on <{el.tag}>")
    for name in required:
        if name not in el.attrib:
            raise MarkupError(f"missing attribute {name!r} on <{el.tag}>")


def read_corpus(source) -> AnnotatedCorpus:
    """Parse and validate a corpus; rejects unknown elements and attributes."""
    root = _parse_root(source)
    return corpus_from_element(root)


def corpus_from_element(root: ET.Element) -> AnnotatedCorpus:
    if root.tag != "CORPUS":
        raise MarkupError(f"expected <CORPUS> root, got <{root.tag}>")
    tagset = Tagset(tags=())
    lexicon = Lexicon()
    documents = []
    for child in root:
        if child.tag == "TAGSET":
            tagset = _read_tagset(child)
        elif child.tag == "LEXICON":
            lexicon = _read_lexicon(child)
        elif child.tag == "DOC":
            _require_attrs(child, ["ID"])
            documents.append(_read_doc(child))
        else:
            raise MarkupError(f"unknown element <{child.tag}> under <CORPUS>")
    corpus = AnnotatedCorpus(tuple(documents), tagset, lexicon)
    validate_corpus(corpus)
    return corpus


def _read_tagset(el: ET.Element) -> Tagset:
    tags = []
    display = []
    for child in el:
        if child.tag != "TAG":
            raise MarkupError(f"unknown element <{child.tag}> under <TAGSET>")
        _require_attrs(child, ["NAME", "CLASS"], ["DISPLAY"])
        tags.append((child.attrib["NAME"], child.attrib["CLASS"]))
        if "DISPLAY" in child.attrib:
            display.append((child.attrib["NAME"], child.attrib["DISPLAY"]))
    return Tagset(tags=tuple(tags), display=tuple(display))


def _read_lexicon(el: ET.Element) -> Lexicon:
    entries = []
    aliases = []
    for child in el:
        if child.tag == "ENTRY":
            _require_attrs(child, ["WORD", "SEM"])
            entries.append((child.attrib["WORD"], child.attrib["SEM"]))
        elif child.tag == "ALIAS":
            _require_attrs(child, ["NAME", "FOR"])
            aliases.append((child.attrib["NAME"], child.attrib["FOR"]))
        else:
            raise MarkupError(f"unknown element <{child.tag}> under <LEXICON>")
    return Lexicon(entries=tuple(entries), aliases=tuple(aliases))


def _read_token(el: ET.Element) -> WordToken:
    _require_attrs(el, ["ID", "POS"], ["SEM", "LEMMA"])
    surface = el.text or ""
    if list(el):
        raise MarkupError(f"unexpected children under <W {el.attrib.get('ID')}>")
    return WordToken(
        id=el.attrib["ID"],
        surface=surface,
        pos=el.attrib["POS"],
        sem=el.attrib.get("SEM"),
        lemma=el.attrib.get("LEMMA"),
    )


def _read_doc(el: ET.Element) -> Document:
    sentences = []
    for child in el:
        if child.tag != "S":
            raise MarkupError(f"unknown element <{child.tag}> under <DOC>")
        _require_attrs(child, ["ID"])
        sentences.append(_read_sentence(child))
    return Document(id=el.attrib["ID"], sentences=tuple(sentences))


def _read_sentence(el: ET.Element) -> Sentence:
    tokens: list[WordToken] = []
    chunks: list[Chunk] = []
    for child in el:
        if child.tag == "W":
            tokens.append(_read_token(child))
        elif child.tag in CHUNK_KINDS:
            _require_attrs(child, ["ID", "HEAD"])
            chunk_tokens = []
            for grandchild in child:
                if grandchild.tag != "W":
                    raise MarkupError(
                        f"unknown element <{grandchild.tag}> under <{child.tag}>"
                    )
                chunk_tokens.append(_read_token(grandchild))
            chunk = Chunk(
                id=child.attrib["ID"],
                kind=child.tag,
                head_id=child.attrib["HEAD"],
                tokens=tuple(chunk_tokens),
            )
            tokens.extend(chunk_tokens)
            chunks.append(chunk)
        else:
            raise MarkupError(f"unknown element <{child.tag}> under <S>")
    return Sentence(id=el.attrib["ID"], tokens=tuple(tokens), chunks=tuple(chunks))


# ---------------------------------------------------------------------------
# artifact envelopes

# Serializers for the artifact types live here so the store and the CLI can
# treat every artifact uniformly.  Registered lazily to keep imports acyclic.


def artifact_to_text(obj, pretty: bool = True) -> str:
    lines = _artifact_lines(obj)
    if pretty:
        return HEADER + "\n" + "\n".join(lines) + "\n"
    return "".join(lines)


def artifact_from_text(text: str):
    root = _parse_root(text)
    return artifact_from_element(root)


def _artifact_lines(obj) -> list[str]:
    from . import cluster, collocate, innerctx, generalize, matcher

    if isinstance(obj, AnnotatedCorpus):
        # reuse the corpus format; an annotated corpus is itself an artifact
        return corpus_to_text(obj).splitlines()[1:]
    if isinstance(obj, cluster.Dendrogram):
        lines = ["<DENDROGRAM>"]
        for word, freq in zip(obj.leaves, obj.freqs):
            lines.append(f'<LEAF WORD="{esc(word)}" FREQ="{freq}"/>')
        for left, right, sim in obj.merges:
            lines.append(f'<MERGE LEFT="{left}" RIGHT="{right}" SIM="{sim!r}"/>')
        lines.append("</DENDROGRAM>")
        return lines
    if isinstance(obj, cluster.WordClassSet):
        lines = [f'<CLASSES CUT="{obj.cut_level!r}">']
        for label, members, freq in obj.classes:
            words = esc(" ".join(members))
            lines.append(f'<CLASS LABEL="{esc(label)}" FREQ="{freq}">{words}</CLASS>')
        lines.append("</CLASSES>")
        return lines
    if isinstance(obj, cluster.ContextVectorSet):
        ctx = esc(" ".join(obj.context_vocab))
        lines = [f'<VECTORS CONTEXTS="{ctx}">']
        for i, word in enumerate(obj.words):
            lines.append(f'<VEC WORD="{esc(word)}" TOTAL="{obj.totals[i]}">')
            for pos_idx, offset in enumerate(cluster.OFFSETS):
                for ctx_idx, ctx_word in enumerate(obj.context_vocab):
                    n = int(obj.counts[i, pos_idx, ctx_idx])
                    if n:
                        lines.append(
                            f'<C POS="{offset}" WORD="{esc(ctx_word)}" N="{n}"/>'
                        )
            lines.append("</VEC>")
        lines.append("</VECTORS>")
        return lines
    if isinstance(obj, collocate.TermBank):
        lines = [f'<TERMBANK THRESHOLD="{obj.threshold!r}">']
        if obj.stop_list:
            lines.append(f"<STOPLIST>{esc(' '.join(sorted(obj.stop_list)))}</STOPLIST>")
        for entry in obj.entries:
            pairs = [
                ("NUM", None if entry.num is None else str(entry.num)),
                ("FREQ", str(entry.freq)),
                ("POS", " ".join(t.pos for t in entry.tokens)),
                ("HEAD", str(entry.head_index)),
                ("INCL", collocate.inclusion_text(entry) if entry.inclusion else None),
            ]
            body = esc(collocate.annotated_text(entry.tokens))
            lines.append(f"<TERM{_attrs(pairs)}>{body}</TERM>")
        lines.append("</TERMBANK>")
        return lines
    if isinstance(obj, innerctx.ModifierClustering):
        lines = ["<MODCLUSTERS>"]
        for cl in obj.clusters:
            lines.append("<CLUSTER>")
            if cl.poles is not None:
                for pole in cl.poles:
                    lines.append(f"<POLE>{esc(' '.join(sorted(pole)))}</POLE>")
            else:
                lines.append(f"<MEMBERS>{esc(' '.join(cl.members))}</MEMBERS>")
            lines.append("</CLUSTER>")
        if obj.rest:
            lines.append(f"<REST>{esc(' '.join(obj.rest))}</REST>")
        lines.append("</MODCLUSTERS>")
        return lines
    if isinstance(obj, generalize.ParadigmBank):
        lines = ["<PARADIGMS>"]
        for pset in obj.sets:
            lines.append(f'<SET NAME="{esc(pset.name)}" LEVEL="{pset.level}">')
            for p in pset.members:
                lines.append(_paradigm_line(p))
            lines.append("</SET>")
        if obj.ranked:
            lines.append("<RANKED>")
            for p in obj.ranked:
                lines.append(_paradigm_line(p))
            lines.append("</RANKED>")
        lines.append("</PARADIGMS>")
        return lines
    if isinstance(obj, matcher.SavedPattern):
        lines = [f'<PATTERN NAME="{esc(obj.name)}">']
        lines.append(f"<TEXT>{esc(obj.text)}</TEXT>")
        if obj.concept:
            lines.append(f"<CONCEPT>{esc(obj.concept)}</CONCEPT>")
        lines.append("</PATTERN>")
        return lines
    raise MarkupError(f"no serializer for artifact type {type(obj).__name__}")


def _paradigm_line(p) -> str:
    from . import generalize

    return (
        f'<PARADIGM LEVEL="{p.level}" FREQ="{p.freq}">'
        f"{esc(generalize.paradigm_to_text(p))}</PARADIGM>"
    )


def artifact_from_element(root: ET.Element):
    from . import cluster, collocate, innerctx, generalize, matcher

    if root.tag == "CORPUS":
        return corpus_from_element(root)
    if root.tag == "DENDROGRAM":
        leaves, freqs, merges = [], [], []
        for child in root:
            if child.tag == "LEAF":
                leaves.append(child.attrib["WORD"])
                freqs.append(int(child.attrib["FREQ"]))
            elif child.tag == "MERGE":
                merges.append(
                    (
                        int(child.attrib["LEFT"]),
                        int(child.attrib["RIGHT"]),
                        float(child.attrib["SIM"]),
                    )
                )
            else:
                raise MarkupError(f"unknown element <{child.tag}> under <DENDROGRAM>")
        return cluster.Dendrogram(tuple(leaves), tuple(freqs), tuple(merges))
    if root.tag == "CLASSES":
        classes = []
        for child in root:
            if child.tag != "CLASS":
                raise MarkupError(f"unknown element <{child.tag}> under <CLASSES>")
            members = tuple((child.text or "").split())
            classes.append((child.attrib["LABEL"], members, int(child.attrib["FREQ"])))
        return cluster.WordClassSet(tuple(classes), float(root.attrib["CUT"]))
    if root.tag == "VECTORS":
        return cluster.vectors_from_element(root)
    if root.tag == "TERMBANK":
        return collocate.termbank_from_element(root)
    if root.tag == "MODCLUSTERS":
        clusters = []
        rest: tuple[str, ...] = ()
        for child in root:
            if child.tag == "CLUSTER":
                poles = []
                members: tuple[str, ...] = ()
                for sub in child:
                    if sub.tag == "POLE":
                        poles.append(frozenset((sub.text or "").split()))
                    elif sub.tag == "MEMBERS":
                        members = tuple((sub.text or "").split())
                    else:
                        raise MarkupError(f"unknown element <{sub.tag}> under <CLUSTER>")
                if poles:
                    pole_pair = (poles[0], poles[1])
                    members = tuple(sorted(poles[0] | poles[1]))
                    clusters.append(innerctx.ModifierCluster(members, pole_pair))
                else:
                    clusters.append(innerctx.ModifierCluster(members, None))
            elif child.tag == "REST":
                rest = tuple((child.text or "").split())
            else:
                raise MarkupError(f"unknown element <{child.tag}> under <MODCLUSTERS>")
        return innerctx.ModifierClustering(tuple(clusters), rest)
    if root.tag == "PARADIGMS":
        sets = []
        ranked = []
        for child in root:
            if child.tag == "SET":
                members = tuple(
                    generalize.paradigm_from_text(
                        sub.text or "", int(sub.attrib["LEVEL"]), int(sub.attrib["FREQ"])
                    )
                    for sub in child
                )
                sets.append(
                    generalize.NamedParadigmSet(
                        child.attrib["NAME"], int(child.attrib["LEVEL"]), members
                    )
                )
            elif child.tag == "RANKED":
                ranked = [
                    generalize.paradigm_from_text(
                        sub.text or "", int(sub.attrib["LEVEL"]), int(sub.attrib["FREQ"])
                    )
                    for sub in child
                ]
            else:
                raise MarkupError(f"unknown element <{child.tag}> under <PARADIGMS>")
        return generalize.ParadigmBank(tuple(sets), tuple(ranked))
    if root.tag == "PATTERN":
        text = ""
        concept = None
        for child in root:
            if child.tag == "TEXT":
                text = child.text or ""
            elif child.tag == "CONCEPT":
                concept = child.text or ""
            else:
                raise MarkupError(f"unknown element <{child.tag}> under <PATTERN>")
        return matcher.SavedPattern(root.attrib["NAME"], text, concept)
    raise MarkupError(f"unknown artifact element <{root.tag}>")


# ---------------------------------------------------------------------------
# decision log records


def decision_line(ts: str, kind: str, attrs=(), payload=None) -> str:
    """One self-contained record per line; payload is nested compact markup."""
    pairs = [("TS", ts), ("KIND", kind)] + list(attrs)
    if payload is None:
        return f"<DECISION{_attrs(pairs)}/>"
    if isinstance(payload, str):
        body = esc(payload)
    else:
        body = artifact_to_text(payload, pretty=False)
    if "\n" in body:
        raise MarkupError("decision payload must be single-line")
    return f"<DECISION{_attrs(pairs)}>{body}</DECISION>"


def parse_decision_line(line: str):
    root = _parse_root(line)
    if root.tag != "DECISION":
        raise MarkupError(f"expected <DECISION>, got <{root.tag}>")
    attrs = dict(root.attrib)
    children = list(root)
    payload = None
    if children:
        payload = artifact_from_element(children[0])
    elif root.text:
        payload = root.text
    return attrs, payload


def lexicon_from_sidecar(text: str) -> Lexicon:
    """Import `word//CATEGORY` plain-text notation into a category lexicon."""
    entries = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        for item in line.split():
            if "//" not in item:
                continue
            word, _, sem = item.partition("//")
            if not word or not sem:
                raise MarkupError(f"bad sidecar entry {item!r}", lineno, 0)
            entries.append((word.lower(), sem))
    return Lexicon(entries=tuple(sorted(set(entries))))
