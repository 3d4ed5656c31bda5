"""Uniform adapter over external lexical sources.

Converters turn a source into the markup format below; the workbench only
ever sees synonym/antonym/gloss lookups through this interface.

    <THESAURUS>
    <LEMMA WORD="acute" POS="adj">
    <SENSE><SYN>critical</SYN><ANT>chronic</ANT><GLOSS>short duration</GLOSS></SENSE>
    </LEMMA>
    </THESAURUS>
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass

from .errors import MarkupError


@dataclass(frozen=True)
class Sense:
    synonyms: frozenset[str]
    antonyms: frozenset[str]
    gloss_words: frozenset[str]


@dataclass(frozen=True)
class ThesaurusRecord:
    lemma: str
    pos: str
    senses: tuple[Sense, ...]

    def entry_words(self) -> frozenset[str]:
        words: set[str] = set()
        for sense in self.senses:
            words |= sense.synonyms | sense.antonyms | sense.gloss_words
        return frozenset(words)


class Thesaurus:
    def __init__(self, records=()):
        self._records: dict[tuple[str, str], ThesaurusRecord] = {}
        for record in records:
            self.add(record)

    def add(self, record: ThesaurusRecord) -> None:
        for sense in record.senses:
            if record.lemma in sense.synonyms:
                raise MarkupError(f"lemma {record.lemma!r} listed among its own synonyms")
            if sense.synonyms & sense.antonyms:
                raise MarkupError(
                    f"lemma {record.lemma!r}: a word is both synonym and antonym"
                )
        key = (record.lemma, record.pos)
        if key in self._records:
            merged = _merge_senses(self._records[key].senses + record.senses)
            record = ThesaurusRecord(record.lemma, record.pos, merged)
        self._records[key] = record

    def records(self, lemma: str):
        return [r for (lm, _), r in sorted(self._records.items()) if lm == lemma]

    def has(self, lemma: str, pos: str | None = None) -> bool:
        if pos is not None:
            return (lemma, pos) in self._records
        return any(lm == lemma for lm, _ in self._records)

    def entry_words(self, lemma: str, pos: str | None = None) -> frozenset[str]:
        """Union over senses of synonyms + antonyms + gloss content words.
        Empty for an absent lemma; use has() to distinguish that case."""
        words: set[str] = set()
        for record in self.records(lemma):
            if pos is None or record.pos == pos:
                words |= record.entry_words()
        return frozenset(words)

    def antonyms(self, lemma: str) -> frozenset[str]:
        words: set[str] = set()
        for record in self.records(lemma):
            for sense in record.senses:
                words |= sense.antonyms
        return frozenset(words)

    def __len__(self):
        return len(self._records)


def _merge_senses(senses) -> tuple[Sense, ...]:
    seen = []
    for sense in senses:
        if sense not in seen:
            seen.append(sense)
    return tuple(seen)


def load_thesaurus(text: str) -> Thesaurus:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        line, col = exc.position
        raise MarkupError("malformed thesaurus", line, col) from exc
    if root.tag != "THESAURUS":
        raise MarkupError(f"expected <THESAURUS> root, got <{root.tag}>")
    thesaurus = Thesaurus()
    for rec_el in root:
        if rec_el.tag != "LEMMA":
            raise MarkupError(f"unknown element <{rec_el.tag}> under <THESAURUS>")
        lemma = rec_el.attrib.get("WORD")
        if not lemma:
            raise MarkupError("<LEMMA> without WORD attribute")
        senses = []
        for sense_el in rec_el:
            if sense_el.tag != "SENSE":
                raise MarkupError(f"unknown element <{sense_el.tag}> under {lemma!r}")
            parts = {"SYN": set(), "ANT": set(), "GLOSS": set()}
            for part in sense_el:
                if part.tag not in parts:
                    raise MarkupError(f"unknown element <{part.tag}> in sense of {lemma!r}")
                parts[part.tag].update((part.text or "").split())
            senses.append(
                Sense(
                    frozenset(parts["SYN"]),
                    frozenset(parts["ANT"]),
                    frozenset(parts["GLOSS"]),
                )
            )
        if not senses:
            raise MarkupError(f"lemma {lemma!r} has no senses")
        thesaurus.add(ThesaurusRecord(lemma, rec_el.attrib.get("POS", "adj"), tuple(senses)))
    return thesaurus


def thesaurus_to_text(thesaurus: Thesaurus) -> str:
    from .markup import HEADER, esc

    lines = [HEADER, "<THESAURUS>"]
    for (lemma, pos), record in sorted(thesaurus._records.items()):
        lines.append(f'<LEMMA WORD="{esc(lemma)}" POS="{esc(pos)}">')
        for sense in record.senses:
            lines.append("<SENSE>")
            for tag, words in (
                ("SYN", sense.synonyms),
                ("ANT", sense.antonyms),
                ("GLOSS", sense.gloss_words),
            ):
                if words:
                    lines.append(f"<{tag}>{esc(' '.join(sorted(words)))}</{tag}>")
            lines.append("</SENSE>")
        lines.append("</LEMMA>")
    lines.append("</THESAURUS>")
    return "\n".join(lines) + "\n"
