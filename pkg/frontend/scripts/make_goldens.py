#!/usr/bin/env python3
"""Record golden fixtures from the backend's external interfaces.

Cut goldens: random dendrogram artifact files are written in the documented
DENDROGRAM format, cut through `lexforge cluster cut --level`, and the
resulting CLASSES artifacts recorded.  Parse-error goldens: malformed
patterns posted to the service's /parse endpoint, positions recorded.

Output: fixtures/goldens.json (checked in; rerun to regenerate).
"""

import json
import random
import subprocess
import sys
import tempfile
import xml.etree.ElementTree as ET
from pathlib import Path

HERE = Path(__file__).resolve().parent
OUT = HERE.parent / "fixtures" / "goldens.json"

MALFORMED = [
    '"of" {{',
    "[",
    "<NC head = ",
    '{ "on", ',
    "$NOPE",
    '"unterminated',
    "{{[a] [b]}}",
    '<NC head = "x"',
    "?",
    '"a" <ZZ>',
]


def random_dendrogram(rng):
    n = rng.randint(3, 10)
    leaves = [f"w{i}" for i in range(n)]
    freqs = [rng.randint(1, 50) for _ in range(n)]
    components = list(range(n))
    node_of = {i: i for i in range(n)}
    merges = []
    sim = 0.95
    while len(components) > 1:
        a, b = rng.sample(components, 2)
        merges.append((node_of[a], node_of[b], round(sim, 4)))
        components.remove(b)
        node_of[a] = n + len(merges) - 1
        sim -= rng.uniform(0.01, 0.12)
    return leaves, freqs, merges


def write_dendrogram(path, leaves, freqs, merges):
    lines = ['<?xml version="1.0" encoding="UTF-8"?>', "<DENDROGRAM>"]
    for word, freq in zip(leaves, freqs):
        lines.append(f'<LEAF WORD="{word}" FREQ="{freq}"/>')
    for left, right, sim in merges:
        lines.append(f'<MERGE LEFT="{left}" RIGHT="{right}" SIM="{sim!r}"/>')
    lines.append("</DENDROGRAM>")
    path.write_text("\n".join(lines) + "\n")


def read_classes(path):
    root = ET.fromstring(path.read_text())
    return [
        {
            "label": el.attrib["LABEL"],
            "members": (el.text or "").split(),
            "freq": int(el.attrib["FREQ"]),
        }
        for el in root
    ]


def cut_goldens(rng, count_trees=10, levels_per=5):
    goldens = []
    with tempfile.TemporaryDirectory() as tmp:
        tmp = Path(tmp)
        for t in range(count_trees):
            leaves, freqs, merges = random_dendrogram(rng)
            tree_path = tmp / f"tree{t}.mkp"
            write_dendrogram(tree_path, leaves, freqs, merges)
            sims = [m[2] for m in merges]
            level_pool = sims + [min(sims) - 0.05, max(sims) + 0.05, 0.5]
            for li in range(levels_per):
                level = round(rng.choice(level_pool), 4)
                out_path = tmp / f"cut{t}-{li}.mkp"
                subprocess.run(
                    [
                        sys.executable, "-m", "lexforge.cli", "cluster", "cut",
                        "--tree", str(tree_path), "--level", str(level),
                        "--out", str(out_path),
                    ],
                    check=True,
                    capture_output=True,
                )
                goldens.append(
                    {
                        "dendrogram": {
                            "leaves": leaves,
                            "freqs": freqs,
                            "merges": [list(m) for m in merges],
                        },
                        "level": level,
                        "classes": read_classes(out_path),
                    }
                )
    return goldens


def parse_error_goldens():
    from fastapi.testclient import TestClient

    from lexforge.service import create_app

    with tempfile.TemporaryDirectory() as tmp:
        app = create_app(Path(tmp) / "ws")
        with TestClient(app) as client:
            client.post("/projects", json={"id": "goldens"})
            records = []
            for text in MALFORMED:
                body = client.post("/projects/goldens/parse", json={"text": text}).json()
                assert body["ok"] is False, text
                records.append(
                    {"text": text, "position": body["position"], "error": body["error"]}
                )
    return records


def main():
    rng = random.Random(20260810)
    goldens = {
        "cuts": cut_goldens(rng),
        "parse_errors": parse_error_goldens(),
    }
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(goldens, indent=1) + "\n")
    print(f"wrote {OUT} ({len(goldens['cuts'])} cuts, "
          f"{len(goldens['parse_errors'])} parse errors)")


if __name__ == "__main__":
    main()
