"""Inner-context categorization of terms sharing a head.

Terms are grouped per head (a head word, or a bank term that longer terms
extend), sorted by length, their immediate modifiers split into pure
adjectives versus adjectivized nouns, and the pure adjectives clustered by
thesaurus-entry overlap with a co-occurrence veto.
"""

from __future__ import annotations

from dataclasses import dataclass

from .collocate import TermBank, TermEntry, TermToken
from .thesaurus import Thesaurus

_NOUN_CLASSES = ("noun", "noun-plural")


def _default_tagset():
    from .annotate import DEFAULT_TAGSET

    return DEFAULT_TAGSET


@dataclass(frozen=True)
class HeadGroup:
    head_tokens: tuple[TermToken, ...]
    terms_by_length: tuple[tuple[int, tuple[TermEntry, ...]], ...]
    modifiers: tuple[TermToken, ...]  # immediate modifiers, one per direct extension

    @property
    def head_display(self) -> str:
        return " ".join(t.surface for t in self.head_tokens)

    def terms(self) -> list[TermEntry]:
        return [t for _, terms in self.terms_by_length for t in terms]


@dataclass(frozen=True)
class ModifierCluster:
    members: tuple[str, ...]
    poles: tuple[frozenset, frozenset] | None = None


@dataclass(frozen=True)
class ModifierClustering:
    clusters: tuple[ModifierCluster, ...]
    rest: tuple[str, ...]


def _head_token(entry: TermEntry) -> TermToken:
    return entry.tokens[entry.head_index]


def _ends_with_head(entry: TermEntry, head: tuple[TermToken, ...], head_index: int) -> bool:
    L = len(head)
    if len(entry.tokens) <= L or entry.tokens[-L:] != head:
        return False
    return entry.head_index == len(entry.tokens) - L + head_index


def build_head_groups(bank: TermBank) -> list[HeadGroup]:
    """One group per distinct head word, plus one per bank term that other
    terms extend.  Terms are listed shortest first, then by frequency."""
    groups: list[HeadGroup] = []
    seen_heads: set[tuple[TermToken, ...]] = set()

    def order(terms):
        by_len: dict[int, list[TermEntry]] = {}
        for t in sorted(terms, key=lambda e: (len(e.tokens), -e.freq, e.text())):
            by_len.setdefault(len(t.tokens), []).append(t)
        return tuple((length, tuple(ts)) for length, ts in sorted(by_len.items()))

    # word heads
    head_words = []
    for entry in bank.entries:
        word = _head_token(entry).surface
        if word not in head_words:
            head_words.append(word)
    for word in head_words:
        members = [e for e in bank.entries if _head_token(e).surface == word]
        immediates = [
            e.tokens[0]
            for e in members
            if len(e.tokens) == 2 and e.head_index == 1
        ]
        key = (TermToken(word, _head_token(members[0]).pos, _head_token(members[0]).sem),)
        seen_heads.add((word,))
        groups.append(HeadGroup(key, order(members), tuple(immediates)))

    # term heads: bank entries that longer entries end with
    for head_entry in bank.entries:
        head = head_entry.tokens
        members = [
            e for e in bank.entries if _ends_with_head(e, head, head_entry.head_index)
        ]
        if not members:
            continue
        immediates = [
            e.tokens[0] for e in members if len(e.tokens) == len(head) + 1
        ]
        groups.append(HeadGroup(head, order(members), tuple(immediates)))
    groups.sort(key=lambda g: (len(g.head_tokens), g.head_display))
    return groups


def split_modifiers(group: HeadGroup, thesaurus: Thesaurus | None = None, tagset=None):
    """Separate pure adjectival modifiers from adjectivized nouns.

    A modifier counts as an adjectivized noun when it carries a semantic
    category, has noun part of speech, or the thesaurus knows it as a noun;
    anything else defaults to pure adjective."""
    tagset = tagset or _default_tagset()
    pure: list[str] = []
    nounish: list[str] = []
    for tok in group.modifiers:
        is_noun = (
            tok.sem is not None
            or tagset.coarse(tok.pos) in _NOUN_CLASSES
            or (thesaurus is not None and thesaurus.has(tok.surface, "noun"))
        )
        target = nounish if is_noun else pure
        if tok.surface not in target:
            target.append(tok.surface)
    return tuple(pure), tuple(nounish)


def cooccurring_pairs(bank: TermBank, tagset=None) -> frozenset:
    """Unordered pairs of adjectives appearing together in one phrase."""
    tagset = tagset or _default_tagset()
    pairs: set[frozenset] = set()
    for entry in bank.entries:
        adjs = [
            t.surface
            for t in entry.tokens
            if tagset.coarse(t.pos) == "adj" and t.sem is None
        ]
        for i in range(len(adjs)):
            for j in range(i + 1, len(adjs)):
                if adjs[i] != adjs[j]:
                    pairs.add(frozenset((adjs[i], adjs[j])))
    return frozenset(pairs)


def cluster_modifiers(adjs, thesaurus: Thesaurus, cooccur=frozenset()) -> ModifierClustering:
    """Link two adjectives when their thesaurus entries share a word, unless
    they co-occur in one phrase (then the link is vetoed - they may still end
    up connected through other adjectives).  Connected components of size two
    or more become clusters; antonym edges two-color a cluster into poles."""
    adjs = sorted(set(adjs))
    vetoed = {frozenset(p) for p in cooccur}
    known = [a for a in adjs if thesaurus.has(a)]
    rest = [a for a in adjs if not thesaurus.has(a)]
    words = {a: thesaurus.entry_words(a) for a in known}
    neighbors: dict[str, set[str]] = {a: set() for a in known}
    for i, a in enumerate(known):
        for b in known[i + 1 :]:
            if frozenset((a, b)) in vetoed:
                continue
            if words[a] & words[b]:
                neighbors[a].add(b)
                neighbors[b].add(a)
    unvisited = set(known)
    clusters = []
    for a in known:
        if a not in unvisited:
            continue
        component = {a}
        queue = [a]
        unvisited.discard(a)
        while queue:
            cur = queue.pop()
            for nxt in neighbors[cur]:
                if nxt in unvisited:
                    unvisited.discard(nxt)
                    component.add(nxt)
                    queue.append(nxt)
        if len(component) < 2:
            rest.append(a)
            continue
        clusters.append(
            ModifierCluster(tuple(sorted(component)), _poles(component, thesaurus, vetoed))
        )
    clusters.sort(key=lambda c: c.members[0])
    return ModifierClustering(tuple(clusters), tuple(sorted(rest)))


def _poles(component, thesaurus: Thesaurus, vetoed) -> tuple[frozenset, frozenset] | None:
    """Two-coloring induced by antonym edges; emitted only when the antonym
    subgraph spans the whole component consistently."""
    members = sorted(component)
    ant_edges: dict[str, set[str]] = {m: set() for m in members}
    for i, a in enumerate(members):
        for b in members[i + 1 :]:
            if frozenset((a, b)) in vetoed:
                continue
            if b in thesaurus.antonyms(a) or a in thesaurus.antonyms(b):
                ant_edges[a].add(b)
                ant_edges[b].add(a)
    color: dict[str, int] = {}
    start = members[0]
    color[start] = 0
    queue = [start]
    while queue:
        cur = queue.pop()
        for nxt in ant_edges[cur]:
            if nxt not in color:
                color[nxt] = 1 - color[cur]
                queue.append(nxt)
            elif color[nxt] == color[cur]:
                return None  # odd cycle: not bipartite
    if len(color) != len(members):
        return None  # antonym edges do not span the cluster
    pole_a = frozenset(m for m in members if color[m] == 0)
    pole_b = frozenset(m for m in members if color[m] == 1)
    if min(pole_b) < min(pole_a):
        pole_a, pole_b = pole_b, pole_a
    return (pole_a, pole_b)
