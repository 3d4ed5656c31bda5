"""Seeded random corpus builder shared by round-trip tests."""

import random

from lexforge.annotate import DEFAULT_TAGSET
from lexforge.model import (
    AnnotatedCorpus,
    Chunk,
    Document,
    Lexicon,
    Sentence,
    WordToken,
)

SURFACES = [
    "infarction",
    "myocardial",
    "the",
    "a<b",
    'quo"te',
    "x&y",
    "café",
    "word-1",
    "suffered",
    "1992",
    ".",
    "artery",
]
SEMS = [None, None, "DISEASE", "BODY-PART", "X9-Y"]
TAGS = [t for t, _ in DEFAULT_TAGSET.tags]


def random_corpus(rng: random.Random) -> AnnotatedCorpus:
    docs = []
    for d in range(rng.randint(1, 3)):
        token_n = 0
        chunk_n = 0
        sentences = []
        for s in range(rng.randint(0, 3)):
            tokens = []
            for _ in range(rng.randint(1, 10)):
                token_n += 1
                tokens.append(
                    WordToken(
                        id=f"w{token_n}",
                        surface=rng.choice(SURFACES),
                        pos=rng.choice(TAGS),
                        sem=rng.choice(SEMS),
                        lemma=rng.choice([None, None, "suffer"]),
                    )
                )
            chunks = []
            i = 0
            while i < len(tokens):
                if rng.random() < 0.35:
                    length = rng.randint(1, min(3, len(tokens) - i))
                    span = tokens[i : i + length]
                    chunk_n += 1
                    chunks.append(
                        Chunk(
                            id=f"c{chunk_n}",
                            kind=rng.choice(["NG", "VG", "TIMEX"]),
                            head_id=rng.choice(span).id,
                            tokens=tuple(span),
                        )
                    )
                    i += length
                else:
                    i += 1
            sentences.append(Sentence(f"s{s + 1}", tuple(tokens), tuple(chunks)))
        docs.append(Document(f"d{d + 1}", tuple(sentences)))
    entries = tuple(
        sorted({(rng.choice(SURFACES).lower(), rng.choice(["DISEASE", "BODY-PART"]))
                for _ in range(rng.randint(0, 4))})
    )
    aliases = (("BODY-COMPONENT", "BODY-PART"),) if rng.random() < 0.5 else ()
    return AnnotatedCorpus(tuple(docs), DEFAULT_TAGSET, Lexicon(entries, aliases))
