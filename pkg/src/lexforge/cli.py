"""Command-line surface for every workbench tool.

    lexforge annotate    --in raw.txt --lexicon lex.mkp --out corpus.mkp
    lexforge cluster     vectors|tree|cut|zipf ...
    lexforge collocate   --corpus corpus.mkp --stoplist stop.txt --out bank.mkp
    lexforge innerctx    --bank bank.mkp --thesaurus thes.mkp --head infarction
    lexforge generalize  abstract|rank|fold|cluster ...
    lexforge match       --corpus corpus.mkp --pattern '...' --kwic 4,2
    lexforge import-lexicon --in sidecar.txt --out lexicon.mkp
    lexforge project     create|run|review|query|artifacts ... (UI-less service)
    lexforge serve       --workspace DIR --port 8000
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import cluster, collocate, generalize, innerctx, markup, matcher
from .annotate import annotate_text, load_suffix_rules, load_tag_lexicon
from .errors import LexforgeError
from .model import Lexicon
from .project import Project
from .thesaurus import load_thesaurus


def _read(path: str) -> str:
    return Path(path).read_text("utf-8")


def _write_artifact(path: str, obj) -> None:
    Path(path).write_text(markup.artifact_to_text(obj), "utf-8")


def _load_artifact(path: str):
    return markup.artifact_from_text(_read(path))


def _load_corpus(path: str):
    return markup.read_corpus(Path(path).read_bytes())


# -- subcommand implementations ----------------------------------------------


def cmd_annotate(args):
    lexicon = load_tag_lexicon(_read(args.lexicon))
    rules = load_suffix_rules(_read(args.suffix_rules)) if args.suffix_rules else ()
    corpus = annotate_text(
        _read(args.infile), lexicon, rules, doc_id=args.doc_id
    )
    with open(args.out, "wb") as sink:
        markup.write_corpus(corpus, sink)
    print(f"wrote {args.out}")


def cmd_import_lexicon(args):
    lexicon = markup.lexicon_from_sidecar(_read(args.infile))
    lines = ["<LEXICON>"]
    for word, sem in lexicon.entries:
        lines.append(f'<ENTRY WORD="{markup.esc(word)}" SEM="{markup.esc(sem)}"/>')
    lines.append("</LEXICON>")
    Path(args.out).write_text(markup.HEADER + "\n" + "\n".join(lines) + "\n", "utf-8")
    print(f"wrote {args.out} ({len(lexicon.entries)} entries)")


def cmd_cluster_vectors(args):
    corpus = _load_corpus(args.corpus)
    vectors = cluster.build_context_vectors(
        corpus, n_targets=args.targets, k_contexts=args.contexts
    )
    _write_artifact(args.out, vectors)
    print(f"wrote {args.out} ({len(vectors.words)} target words)")


def cmd_cluster_tree(args):
    vectors = _load_artifact(args.vectors)
    dendrogram = cluster.cluster_vectors(vectors, measure=args.measure)
    _write_artifact(args.out, dendrogram)
    if args.text:
        Path(args.text).write_text(render_tree(dendrogram), "utf-8")
    print(f"wrote {args.out} ({len(dendrogram.merges)} merges)")


def render_tree(dendrogram: cluster.Dendrogram) -> str:
    """Indented text rendering of the merge tree for terminal inspection."""
    n = len(dendrogram.leaves)
    children: dict[int, tuple[int, int, float]] = {}
    for k, (left, right, sim) in enumerate(dendrogram.merges):
        children[n + k] = (left, right, sim)
    root = n + len(dendrogram.merges) - 1 if dendrogram.merges else 0
    lines: list[str] = []

    def walk(node, depth):
        if node in children:
            left, right, sim = children[node]
            lines.append(f"{'  ' * depth}+- [{sim:.3f}]")
            walk(left, depth + 1)
            walk(right, depth + 1)
        else:
            lines.append(f"{'  ' * depth}{dendrogram.leaves[node]}")

    walk(root, 0)
    return "\n".join(lines) + "\n"


def cmd_cluster_cut(args):
    dendrogram = _load_artifact(args.tree)
    level = args.level if args.level is not None else cluster.auto_cut_level(dendrogram)
    cut = cluster.cut_dendrogram(dendrogram, level)
    if args.seed_lexicon:
        seed = load_tag_lexicon(_read(args.seed_lexicon)).category_lexicon()
        cut = cluster.label_classes_by_seed(cut, seed)
    _write_artifact(args.out, cut)
    for label, members, freq in cut.classes:
        print(f"{label}\t{freq}\t{' '.join(members)}")


def cmd_cluster_zipf(args):
    pairs = []
    for line in _read(args.freqs).splitlines():
        line = line.strip()
        if line:
            rank, freq = line.split()
            pairs.append((float(rank), float(freq)))
    fit = cluster.zipf_fit(pairs)
    print(f"C={fit.c:.6g} a={fit.a:.6g} b={fit.b:.6g}")


def cmd_collocate(args):
    corpus = _load_corpus(args.corpus)
    lexicon = corpus.lexicon
    if args.categories:
        classes = _load_artifact(args.categories)
        lexicon = classes.lexicon(corpus.lexicon)
        corpus = collocate.enrich_sems(corpus, lexicon)
    stop = set()
    if args.stoplist:
        stop = {w.strip() for w in _read(args.stoplist).splitlines() if w.strip()}
    categories = (
        set(args.category_names.split(",")) if args.category_names else lexicon.categories()
    )
    cands = collocate.harvest_candidates(corpus, categories)
    cands = collocate.apply_stop_list(cands, stop, keep_unigrams=args.unigrams)
    bank = collocate.threshold_and_decompose(
        cands, threshold=args.threshold, quantile=args.quantile
    )
    bank = collocate.number_and_include(
        collocate.TermBank(bank.entries, frozenset(stop), bank.threshold)
    )
    _write_artifact(args.out, bank)
    print(f"wrote {args.out} ({len(bank.entries)} terms, threshold {bank.threshold:g})")


def cmd_innerctx(args):
    bank = _load_artifact(args.bank)
    if not any(e.num is not None for e in bank.entries):
        bank = collocate.number_and_include(bank)
    thesaurus = load_thesaurus(_read(args.thesaurus))
    groups = {g.head_display: g for g in innerctx.build_head_groups(bank)}
    if args.head not in groups:
        raise LexforgeError(f"no head group {args.head!r} in the term bank")
    group = groups[args.head]
    for length, terms in group.terms_by_length:
        print(f"[{length} tokens] " + ", ".join(t.text() for t in terms))
    pure, nounish = innerctx.split_modifiers(group, thesaurus)
    print(f"{args.head} : {', '.join(pure)} // {', '.join(nounish)}")
    clustering = innerctx.cluster_modifiers(
        pure, thesaurus, innerctx.cooccurring_pairs(bank)
    )
    for i, c in enumerate(clustering.clusters, start=1):
        if c.poles:
            print(f"cluster {i}: {', '.join(sorted(c.poles[0]))} vs. {', '.join(sorted(c.poles[1]))}")
        else:
            print(f"cluster {i}: {', '.join(c.members)}")
    print(f"rest: {'; '.join(clustering.rest)}")
    if args.out:
        _write_artifact(args.out, clustering)


def cmd_generalize_abstract(args):
    bank = _load_artifact(args.bank)
    corpus = _load_corpus(args.corpus)
    paradigms, skipped = generalize.abstract_bank(bank, corpus.tagset)
    for entry, reason in skipped:
        print(f"skipped: {entry.text()} ({reason})", file=sys.stderr)
    ranked = generalize.rank_paradigms(paradigms)
    _write_artifact(args.out, generalize.ParadigmBank((), tuple(ranked)))
    print(f"wrote {args.out} ({len(ranked)} paradigms, {len(skipped)} skipped)")


def cmd_generalize_rank(args):
    bank = _load_artifact(args.paradigms)
    for p in generalize.rank_paradigms(bank.ranked):
        print(f"{p.freq}\t{generalize.paradigm_to_text(p)}")


def cmd_generalize_fold(args):
    bank = _load_artifact(args.paradigms)
    sets = _load_artifact(args.sets).sets if args.sets else ()
    folded = generalize.fold_paradigms(bank.ranked, sets, merge=args.merge)
    out_sets = list(sets)
    if args.collect:
        out_sets.append(generalize.collect_set(args.collect, folded, args.collect))
    result = generalize.ParadigmBank(tuple(out_sets), tuple(folded))
    _write_artifact(args.out, result)
    for p in folded:
        print(f"{p.freq}\t{generalize.paradigm_to_text(p)}")


def cmd_generalize_cluster(args):
    bank = _load_artifact(args.paradigms)
    corpus = _load_corpus(args.corpus)
    store = matcher.PatternStore()
    if args.sets:
        generalize.register_sets(store, _load_artifact(args.sets).sets)
    dendrogram = generalize.cluster_paradigms(bank.ranked, corpus, store=store)
    _write_artifact(args.out, dendrogram)
    print(f"wrote {args.out}")


def _pattern_store(defines, sets_path=None) -> matcher.PatternStore:
    store = matcher.PatternStore()
    if sets_path:
        generalize.register_sets(store, _load_artifact(sets_path).sets)
    for item in defines or ():
        name, _, text = item.partition("=")
        store.add(name, text)
    return store


def cmd_match(args):
    corpus = _load_corpus(args.corpus)
    store = _pattern_store(args.define, args.sets)
    ast = matcher.parse_pattern(args.pattern, store)
    matches = matcher.match_pattern(ast, corpus, min_score=args.min_score, store=store)
    sent_of = {(d.id, s.id): s for d in corpus.documents for s in d.sentences}
    if args.kwic:
        left, right = (int(x) for x in args.kwic.split(","))
        rows = matcher.concordance(matches, corpus, left, right)
        if args.markup:
            print("<KWIC>")
            for r in rows:
                print(
                    f'<ROW DOC="{markup.esc(r.doc_id)}" S="{markup.esc(r.sentence_id)}"'
                    f' LEFT="{markup.esc(" ".join(r.left))}"'
                    f' KEY="{markup.esc(" ".join(r.keyword))}"'
                    f' RIGHT="{markup.esc(" ".join(r.right))}"/>'
                )
            print("</KWIC>")
        else:
            print(matcher.format_kwic(rows))
    elif args.markup:
        print("<MATCHES>")
        for m in matches:
            surface = m.surface(sent_of[(m.doc_id, m.sentence_id)])
            print(
                f'<M DOC="{markup.esc(m.doc_id)}" S="{markup.esc(m.sentence_id)}"'
                f' START="{m.span[0]}" END="{m.span[1]}" SCORE="{m.score!r}"'
                f' LEVEL="{m.level}">{markup.esc(surface)}</M>'
            )
        print("</MATCHES>")
    else:
        for m in matches:
            surface = m.surface(sent_of[(m.doc_id, m.sentence_id)])
            print(f"{m.score:.3f}\tL{m.level}\t{m.doc_id}/{m.sentence_id}\t{surface}")
    print(f"{len(matches)} matches", file=sys.stderr)


# -- project commands: the service surface without HTTP ------------------------


def _session(args):
    from .service import Session

    return Session(Project.open(Path(args.workspace) / args.id))


def cmd_project_create(args):
    Project.open(Path(args.workspace) / args.id, corpus_ref=args.corpus or "")
    print(args.id)


def cmd_project_run(args):
    from .service import _REVIEW_KIND, _run_stage

    session = _session(args)
    params = dict(item.split("=", 1) for item in args.param or ())
    artifact, proposal = _run_stage(session, args.stage, params)
    item_id = f"r-{artifact}"
    if item_id not in session.reviewed and item_id not in session.pending:
        session.project.log_decision(
            "enqueue-review",
            [
                ("ITEM", item_id),
                ("REVIEW", _REVIEW_KIND[args.stage]),
                ("ARTIFACT", artifact),
                ("STAGE", args.stage),
            ],
            json.dumps(proposal),
        )
    print(json.dumps({"artifact": artifact, "review": item_id, "proposal": proposal}))


def cmd_project_review(args):
    from .service import apply_review

    session = _session(args)
    payload = json.loads(args.payload) if args.payload else {}
    result = apply_review(session, args.item, args.verdict, payload)
    print(json.dumps(result))


def cmd_project_query(args):
    from .service import run_query

    session = _session(args)
    kwic = [int(x) for x in args.kwic.split(",")] if args.kwic else None
    result = run_query(session, args.pattern, args.min_score, kwic)
    if "kwic_text" in result:
        print(result.pop("kwic_text"))
    print(json.dumps(result, indent=2))


def cmd_project_artifacts(args):
    session = _session(args)
    if args.name:
        print(markup.artifact_to_text(session.project.get_artifact(args.name)), end="")
    else:
        for name in session.project.list_artifacts():
            print(name)


def cmd_serve(args):
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(args.workspace), host=args.host, port=args.port)


# -- argument wiring -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lexforge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("annotate", help="tokenize, tag and chunk raw text")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--suffix-rules", dest="suffix_rules")
    p.add_argument("--doc-id", dest="doc_id", default="d1")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("import-lexicon", help="import word//CATEGORY sidecar notation")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_import_lexicon)

    pc = sub.add_parser("cluster", help="distributional word classification")
    csub = pc.add_subparsers(dest="subcommand", required=True)

    p = csub.add_parser("vectors")
    p.add_argument("--corpus", required=True)
    p.add_argument("--targets", type=int, default=300)
    p.add_argument("--contexts", type=int, default=150)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cluster_vectors)

    p = csub.add_parser("tree")
    p.add_argument("--vectors", required=True)
    p.add_argument("--measure", default="spearman", choices=cluster.MEASURES)
    p.add_argument("--text", help="also write an indented text rendering")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cluster_tree)

    p = csub.add_parser("cut")
    p.add_argument("--tree", required=True)
    p.add_argument("--level", type=float)
    p.add_argument("--seed-lexicon", dest="seed_lexicon")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cluster_cut)

    p = csub.add_parser("zipf")
    p.add_argument("--freqs", required=True, help="file of `rank frequency` lines")
    p.set_defaults(func=cmd_cluster_zipf)

    p = sub.add_parser("collocate", help="extract multi-word terms")
    p.add_argument("--corpus", required=True)
    p.add_argument("--categories", help="word class artifact from `cluster cut`")
    p.add_argument("--category-names", dest="category_names")
    p.add_argument("--stoplist")
    p.add_argument("--threshold", type=float)
    p.add_argument("--quantile", type=float, default=0.2)
    p.add_argument("--unigrams", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_collocate)

    p = sub.add_parser("innerctx", help="modifier structure of terms sharing a head")
    p.add_argument("--bank", required=True)
    p.add_argument("--thesaurus", required=True)
    p.add_argument("--head", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_innerctx)

    pg = sub.add_parser("generalize", help="abstract terms into paradigms")
    gsub = pg.add_subparsers(dest="subcommand", required=True)

    p = gsub.add_parser("abstract")
    p.add_argument("--bank", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generalize_abstract)

    p = gsub.add_parser("rank")
    p.add_argument("--paradigms", required=True)
    p.set_defaults(func=cmd_generalize_rank)

    p = gsub.add_parser("fold")
    p.add_argument("--paradigms", required=True)
    p.add_argument("--sets")
    p.add_argument("--collect")
    p.add_argument("--merge", action="store_true",
                   help="merge alternations and optional suffixes")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generalize_fold)

    p = gsub.add_parser("cluster")
    p.add_argument("--paradigms", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--sets")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generalize_cluster)

    p = sub.add_parser("match", help="run a pattern over an annotated corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--pattern", required=True)
    p.add_argument("--min-score", dest="min_score", type=float, default=1.0)
    p.add_argument("--kwic", help="LEFT,RIGHT context window")
    p.add_argument("--markup", action="store_true", help="emit markup rows")
    p.add_argument("--define", action="append", metavar="NAME=PATTERN")
    p.add_argument("--sets", help="paradigm sets usable as $NAME references")
    p.set_defaults(func=cmd_match)

    pp = sub.add_parser("project", help="project store operations (service without HTTP)")
    psub = pp.add_subparsers(dest="subcommand", required=True)
    for name, func, extra in (
        ("create", cmd_project_create, ("corpus",)),
        ("run", cmd_project_run, ("stage", "param")),
        ("review", cmd_project_review, ("item", "verdict", "payload")),
        ("query", cmd_project_query, ("pattern", "min_score", "kwic")),
        ("artifacts", cmd_project_artifacts, ("name",)),
    ):
        p = psub.add_parser(name)
        p.add_argument("--workspace", required=True)
        p.add_argument("--id", required=True)
        if "corpus" in extra:
            p.add_argument("--corpus")
        if "stage" in extra:
            p.add_argument("--stage", required=True)
            p.add_argument("--param", action="append", metavar="KEY=VALUE")
        if "item" in extra:
            p.add_argument("--item", required=True)
            p.add_argument("--verdict", required=True)
            p.add_argument("--payload")
        if "pattern" in extra:
            p.add_argument("--pattern", required=True)
            p.add_argument("--min-score", dest="min_score", type=float, default=1.0)
            p.add_argument("--kwic")
        if "name" in extra:
            p.add_argument("--name")
        p.set_defaults(func=func)

    p = sub.add_parser("serve", help="run the workbench HTTP service")
    p.add_argument("--workspace", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except LexforgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
