"""HTTP facade over the workbench: project lifecycle, pipeline stages with
review queues, artifact browsing, and fuzzy-pattern queries.

Stage runs are asynchronous: POST to a stage returns a job id to poll at
/jobs/{id}; one job per project at a time.  Responses default to the
interchange markup; `Accept: application/json` selects a JSON projection
for the browser frontend.  Every state mutation goes through the decision
log, so replaying the log reconstructs the session."""

from __future__ import annotations

import hashlib
import json
import threading
import uuid
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from . import cluster, collocate, generalize, innerctx, markup, matcher
from .annotate import annotate_text, load_suffix_rules, load_tag_lexicon
from .errors import LexforgeError, MatchError, PatternSyntaxError, StoreError
from .model import AnnotatedCorpus
from .project import Project
from .thesaurus import load_thesaurus

STAGES = ("annotate", "vectors", "cluster", "collocate", "innerctx", "generalize")

class DependencyError(LexforgeError):
    pass


class Session:
    """In-memory view of one project, reconstructable from its log."""

    def __init__(self, project: Project):
        self.project = project
        self.pending: dict[str, dict] = {}
        self.approved: dict[str, str] = {}
        self.reviewed: set[str] = set()
        self.lock = threading.Lock()
        self.running_job: str | None = None
        self._replay_state()

    def _replay_state(self):
        for attrs, payload in self.project.decisions():
            kind = attrs.get("KIND")
            if kind == "enqueue-review":
                self.pending[attrs["ITEM"]] = {
                    "id": attrs["ITEM"],
                    "kind": attrs["REVIEW"],
                    "artifact": attrs["ARTIFACT"],
                    "stage": attrs.get("STAGE", ""),
                    "proposal": json.loads(payload) if payload else {},
                }
            elif kind == "review":
                self.reviewed.add(attrs["ITEM"])
                item = self.pending.pop(attrs["ITEM"], None)
                if item and attrs["VERDICT"] in ("accept", "edit"):
                    self.approved[item["kind"]] = attrs.get("RESULT", item["artifact"])

    def corpus(self) -> AnnotatedCorpus:
        if "corpus" in self.approved:
            return self.project.get_artifact(self.approved["corpus"])
        ref = self.project.corpus_ref
        if ref and ref.endswith(".mkp"):
            return markup.read_corpus(Path(ref).read_bytes())
        raise DependencyError("no annotated corpus: run the annotate stage first")

    def pattern_store(self) -> matcher.PatternStore:
        store = matcher.PatternStore()
        if "paradigms" in self.approved:
            bank = self.project.get_artifact(self.approved["paradigms"])
            generalize.register_sets(store, bank.sets)
        for name in self.project.list_artifacts():
            if name.startswith("pattern-"):
                saved = self.project.get_artifact(name)
                if isinstance(saved, matcher.SavedPattern) and saved.name not in store:
                    store.add(saved.name, saved.text, saved.concept)
        return store


def _params_id(stage: str, params: dict) -> str:
    digest = hashlib.sha1(
        json.dumps({"stage": stage, "params": params}, sort_keys=True).encode()
    ).hexdigest()[:10]
    return f"{stage}-{digest}"


def _run_stage(session: Session, stage: str, params: dict) -> tuple[str, dict]:
    """Execute one pipeline stage; returns (artifact name, review proposal).
    Identical parameters return the already-stored artifact."""
    project = session.project
    existing = _params_id(stage, params)
    if existing in project.list_artifacts():
        proposal = {}
        if stage == "cluster":
            dendrogram = project.get_artifact(existing)
            proposal = {
                "cut_level": float(params.get("level", cluster.auto_cut_level(dendrogram)))
            }
        return existing, proposal
    if stage == "annotate":
        text = Path(params["text"]).read_text("utf-8")
        lexicon = load_tag_lexicon(Path(params["lexicon"]).read_text("utf-8"))
        rules = ()
        if params.get("suffix_rules"):
            rules = load_suffix_rules(Path(params["suffix_rules"]).read_text("utf-8"))
        corpus = annotate_text(text, lexicon, rules, doc_id=params.get("doc_id", "d1"))
        return project.save_artifact(_params_id(stage, params), corpus), {}
    if stage == "vectors":
        corpus = session.corpus()
        vectors = cluster.build_context_vectors(
            corpus,
            n_targets=int(params.get("targets", 300)),
            k_contexts=int(params.get("contexts", 150)),
        )
        return project.save_artifact(_params_id(stage, params), vectors), {}
    if stage == "cluster":
        vectors_name = session.approved.get("vectors")
        if vectors_name is None:
            raise DependencyError("cluster requires an accepted vectors artifact")
        vectors = project.get_artifact(vectors_name)
        dendrogram = cluster.cluster_vectors(
            vectors, measure=params.get("measure", "spearman")
        )
        level = float(params.get("level", cluster.auto_cut_level(dendrogram)))
        name = project.save_artifact(_params_id(stage, params), dendrogram)
        return name, {"cut_level": level}
    if stage == "collocate":
        corpus = session.corpus()
        categories_name = session.approved.get("categories")
        if categories_name is None:
            raise DependencyError("collocate requires an accepted category cut")
        classes = project.get_artifact(categories_name)
        lexicon = classes.lexicon(corpus.lexicon)
        corpus = collocate.enrich_sems(corpus, lexicon)
        stop = set()
        if params.get("stoplist"):
            stop = {
                line.strip()
                for line in Path(params["stoplist"]).read_text("utf-8").splitlines()
                if line.strip()
            }
        cands = collocate.harvest_candidates(
            corpus, params.get("categories") or lexicon.categories()
        )
        cands = collocate.apply_stop_list(cands, stop)
        threshold = params.get("threshold")
        bank = collocate.threshold_and_decompose(
            cands,
            threshold=float(threshold) if threshold is not None else None,
            quantile=float(params.get("quantile", 0.2)),
        )
        bank = collocate.number_and_include(
            collocate.TermBank(bank.entries, frozenset(stop), bank.threshold)
        )
        return project.save_artifact(_params_id(stage, params), bank), {}
    if stage == "innerctx":
        bank_name = session.approved.get("bank")
        if bank_name is None:
            raise DependencyError("innerctx requires an accepted term bank")
        bank = project.get_artifact(bank_name)
        thesaurus = load_thesaurus(Path(params["thesaurus"]).read_text("utf-8"))
        groups = {g.head_display: g for g in innerctx.build_head_groups(bank)}
        head = params["head"]
        if head not in groups:
            raise DependencyError(f"no head group {head!r} in the term bank")
        pure, _ = innerctx.split_modifiers(groups[head], thesaurus)
        clustering = innerctx.cluster_modifiers(
            pure, thesaurus, innerctx.cooccurring_pairs(bank)
        )
        return project.save_artifact(_params_id(stage, params), clustering), {}
    if stage == "generalize":
        bank_name = session.approved.get("bank")
        if bank_name is None:
            raise DependencyError("generalize requires an accepted term bank")
        bank = project.get_artifact(bank_name)
        corpus = session.corpus()
        sets = ()
        if params.get("sets"):
            sets = markup.artifact_from_text(Path(params["sets"]).read_text("utf-8")).sets
        paradigms, _skipped = generalize.abstract_bank(bank, corpus.tagset)
        folded = generalize.fold_paradigms(paradigms, sets)
        out_sets = list(sets)
        if params.get("collect"):
            out_sets.append(
                generalize.collect_set(params["collect"], folded, params["collect"])
            )
        result = generalize.ParadigmBank(tuple(out_sets), tuple(folded))
        return project.save_artifact(_params_id(stage, params), result), {}
    raise DependencyError(f"unknown stage {stage!r}")


_REVIEW_KIND = {
    "annotate": "corpus",
    "vectors": "vectors",
    "cluster": "cut",
    "collocate": "bank",
    "innerctx": "modifiers",
    "generalize": "paradigms",
}


def _json_artifact(obj):
    if isinstance(obj, AnnotatedCorpus):
        return {
            "documents": [
                {
                    "id": d.id,
                    "sentences": [
                        {
                            "id": s.id,
                            "tokens": [
                                {"id": t.id, "surface": t.surface, "pos": t.pos, "sem": t.sem}
                                for t in s.tokens
                            ],
                            "chunks": [
                                {
                                    "id": c.id,
                                    "kind": c.kind,
                                    "head": c.head_id,
                                    "tokens": [t.id for t in c.tokens],
                                }
                                for c in s.chunks
                            ],
                        }
                        for s in d.sentences
                    ],
                }
                for d in obj.documents
            ]
        }
    if isinstance(obj, cluster.Dendrogram):
        return {
            "leaves": list(obj.leaves),
            "freqs": list(obj.freqs),
            "merges": [[l, r, s] for l, r, s in obj.merges],
        }
    if isinstance(obj, cluster.WordClassSet):
        return {
            "cut": obj.cut_level,
            "classes": [
                {"label": label, "members": list(members), "freq": freq}
                for label, members, freq in obj.classes
            ],
        }
    if isinstance(obj, cluster.ContextVectorSet):
        return {"words": list(obj.words), "contexts": list(obj.context_vocab)}
    if isinstance(obj, collocate.TermBank):
        return {
            "threshold": obj.threshold,
            "entries": [
                {
                    "num": e.num,
                    "freq": e.freq,
                    "phrase": collocate.annotated_text(e.tokens),
                    "inclusion": collocate.inclusion_text(e),
                }
                for e in obj.entries
            ],
        }
    if isinstance(obj, innerctx.ModifierClustering):
        return {
            "clusters": [
                {
                    "members": list(c.members),
                    "poles": [sorted(p) for p in c.poles] if c.poles else None,
                }
                for c in obj.clusters
            ],
            "rest": list(obj.rest),
        }
    if isinstance(obj, generalize.ParadigmBank):
        return {
            "sets": [
                {
                    "name": s.name,
                    "sigil": s.sigil,
                    "members": [generalize.paradigm_to_text(m) for m in s.members],
                }
                for s in obj.sets
            ],
            "ranked": [
                {"freq": p.freq, "level": p.level, "text": generalize.paradigm_to_text(p)}
                for p in obj.ranked
            ],
        }
    if isinstance(obj, matcher.SavedPattern):
        return {"name": obj.name, "text": obj.text, "concept": obj.concept}
    raise TypeError(type(obj))


def apply_review(s: Session, item: str, verdict, payload: dict) -> dict:
    """Apply an engineer verdict to a pending review item.  Accepting or
    editing a cut proposal materializes the labeled category set; editing a
    modifier clustering moves words to the rest list.  Every verdict is
    appended to the decision log before session state changes."""
    if item not in s.pending:
        raise StoreError(f"unknown or already reviewed item {item!r}")
    if verdict not in ("accept", "reject", "edit"):
        raise LexforgeError("verdict must be accept|reject|edit")
    pending = s.pending[item]
    result_artifact = pending["artifact"]
    if verdict in ("accept", "edit") and pending["kind"] == "cut":
        dendrogram = s.project.get_artifact(pending["artifact"])
        level = float(payload.get("cut_level", pending["proposal"].get("cut_level", 0.0)))
        cut = cluster.cut_dendrogram(dendrogram, level)
        cut = cluster.label_classes_by_seed(cut, s.corpus().lexicon)
        overrides = payload.get("labels", {})
        if overrides:
            cut = cluster.WordClassSet(
                tuple(
                    (overrides.get(label, label), members, freq)
                    for label, members, freq in cut.classes
                ),
                cut.cut_level,
            )
        result_artifact = s.project.save_artifact("categories", cut)
    elif verdict == "edit" and pending["kind"] == "modifiers":
        clustering = s.project.get_artifact(pending["artifact"])
        to_rest = set(payload.get("to_rest", ()))
        clusters = []
        rest = set(clustering.rest) | to_rest
        for c in clustering.clusters:
            members = tuple(m for m in c.members if m not in to_rest)
            if len(members) >= 2:
                poles = c.poles
                if poles and to_rest & (poles[0] | poles[1]):
                    poles = (poles[0] - to_rest, poles[1] - to_rest)
                    if not poles[0] or not poles[1]:
                        poles = None
                clusters.append(innerctx.ModifierCluster(members, poles))
            else:
                rest.update(members)
        edited = innerctx.ModifierClustering(tuple(clusters), tuple(sorted(rest)))
        result_artifact = s.project.save_artifact(
            pending["artifact"].split("@")[0] + "-edited", edited
        )
    s.project.log_decision(
        "review",
        [("ITEM", item), ("VERDICT", verdict), ("RESULT", result_artifact)],
        json.dumps(payload),
    )
    del s.pending[item]
    s.reviewed.add(item)
    if verdict in ("accept", "edit"):
        kind = pending["kind"]
        s.approved[kind] = result_artifact
        if kind == "cut":
            s.approved["categories"] = result_artifact
    return {"item": item, "verdict": verdict, "artifact": result_artifact}


def run_query(s: Session, pattern: str, min_score: float = 1.0, kwic=None) -> dict:
    """Match a pattern over the project corpus; group results by matched
    surface form and optionally attach keyword-in-context rows."""
    corpus = s.corpus()
    store = s.pattern_store()
    ast = matcher.parse_pattern(pattern, store)
    matches = matcher.match_pattern(ast, corpus, min_score=min_score, store=store)
    groups: dict[str, dict] = {}
    sent_of = {(d.id, s2.id): s2 for d in corpus.documents for s2 in d.sentences}
    for m in matches:
        surface = m.surface(sent_of[(m.doc_id, m.sentence_id)])
        entry = groups.setdefault(surface, {"surface": surface, "count": 0, "best": m.score})
        entry["count"] += 1
        entry["best"] = max(entry["best"], m.score)
    result = {
        "groups": sorted(groups.values(), key=lambda g: (-g["count"], g["surface"])),
        "matches": [
            {
                "doc": m.doc_id,
                "sentence": m.sentence_id,
                "span": list(m.span),
                "score": m.score,
                "level": m.level,
            }
            for m in matches
        ],
    }
    if kwic:
        left, right = int(kwic[0]), int(kwic[1])
        rows = matcher.concordance(matches, corpus, left, right)
        result["kwic"] = [
            {"left": list(r.left), "keyword": list(r.keyword), "right": list(r.right)}
            for r in rows
        ]
        result["kwic_text"] = matcher.format_kwic(rows)
    return result


def _wants_json(request: Request) -> bool:
    return "application/json" in request.headers.get("accept", "")


def create_app(workspace) -> FastAPI:
    workspace = Path(workspace)
    workspace.mkdir(parents=True, exist_ok=True)
    app = FastAPI(title="lexforge workbench")
    sessions: dict[str, Session] = {}
    jobs: dict[str, dict] = {}

    def session(pid: str) -> Session:
        if pid not in sessions:
            root = workspace / pid
            if not (root / "project.meta").exists():
                raise StoreError(f"unknown project {pid!r}")
            sessions[pid] = Session(Project.open(root))
        return sessions[pid]

    @app.exception_handler(LexforgeError)
    async def _domain_error(request, exc):
        status = 409 if isinstance(exc, StoreError) else 400
        if isinstance(exc, DependencyError):
            status = 424
        body = {"error": str(exc)}
        if isinstance(exc, PatternSyntaxError):
            body["position"] = exc.position
        return JSONResponse(body, status_code=status)

    @app.post("/projects")
    async def create_project(body: dict):
        pid = body.get("id") or uuid.uuid4().hex[:8]
        project = Project.open(workspace / pid, corpus_ref=body.get("corpus", ""))
        sessions[pid] = Session(project)
        return {"id": pid}

    @app.get("/projects/{pid}")
    async def project_info(pid: str):
        s = session(pid)
        return {
            "id": pid,
            "corpus": s.project.corpus_ref,
            "artifacts": s.project.list_artifacts(),
            "pending": list(s.pending.values()),
            "approved": dict(s.approved),
        }

    @app.post("/projects/{pid}/stages/{stage}")
    async def run_stage(pid: str, stage: str, body: dict | None = None):
        if stage not in STAGES:
            return JSONResponse({"error": f"unknown stage {stage!r}"}, status_code=404)
        s = session(pid)
        params = body or {}
        with s.lock:
            if s.running_job and jobs[s.running_job]["status"] == "running":
                return JSONResponse(
                    {"error": "a job is already running for this project"},
                    status_code=409,
                )
            jid = uuid.uuid4().hex[:8]
            jobs[jid] = {"id": jid, "project": pid, "status": "running"}
            s.running_job = jid

        def work():
            try:
                artifact, proposal = _run_stage(s, stage, params)
                item_id = f"r-{artifact}"
                if item_id in s.reviewed or item_id in s.pending:
                    jobs[jid].update(status="done", artifact=artifact, review=item_id)
                    return
                s.project.log_decision(
                    "enqueue-review",
                    [
                        ("ITEM", item_id),
                        ("REVIEW", _REVIEW_KIND[stage]),
                        ("ARTIFACT", artifact),
                        ("STAGE", stage),
                    ],
                    json.dumps(proposal),
                )
                s.pending[item_id] = {
                    "id": item_id,
                    "kind": _REVIEW_KIND[stage],
                    "artifact": artifact,
                    "stage": stage,
                    "proposal": proposal,
                }
                jobs[jid].update(status="done", artifact=artifact, review=item_id)
            except Exception as exc:  # surfaced through the job, not the log
                jobs[jid].update(status="failed", error=str(exc))

        thread = threading.Thread(target=work, daemon=True)
        thread.start()
        jobs[jid]["thread"] = thread
        return {"job": jid}

    @app.get("/jobs/{jid}")
    async def job_status(jid: str):
        if jid not in jobs:
            return JSONResponse({"error": "unknown job"}, status_code=404)
        return {k: v for k, v in jobs[jid].items() if k != "thread"}

    @app.get("/projects/{pid}/artifacts/{name}")
    async def get_artifact(pid: str, name: str, request: Request):
        s = session(pid)
        artifact = s.project.get_artifact(name)
        if _wants_json(request):
            return {"name": name, "artifact": _json_artifact(artifact)}
        if isinstance(artifact, AnnotatedCorpus):
            return Response(markup.corpus_to_text(artifact), media_type="application/xml")
        return Response(markup.artifact_to_text(artifact), media_type="application/xml")

    @app.post("/projects/{pid}/reviews/{item}")
    async def review(pid: str, item: str, body: dict):
        s = session(pid)
        result = apply_review(s, item, body.get("verdict"), body.get("payload") or {})
        return result

    @app.post("/projects/{pid}/patterns")
    async def save_pattern(pid: str, body: dict):
        s = session(pid)
        store = s.pattern_store()
        saved = matcher.SavedPattern(
            body["name"], body["text"], body.get("concept")
        )
        matcher.parse_pattern(saved.text, store)  # validate before storing
        name = s.project.save_artifact(f"pattern-{saved.name}", saved)
        return {"artifact": name}

    @app.post("/projects/{pid}/parse")
    async def parse_only(pid: str, body: dict):
        s = session(pid)
        try:
            matcher.parse_pattern(body.get("text", ""), s.pattern_store())
        except PatternSyntaxError as exc:
            return {"ok": False, "error": str(exc), "position": exc.position}
        return {"ok": True}

    @app.post("/projects/{pid}/query")
    async def query(pid: str, body: dict):
        s = session(pid)
        try:
            return run_query(
                s,
                body["pattern"],
                float(body.get("min_score", 1.0)),
                body.get("kwic"),
            )
        except (PatternSyntaxError, MatchError) as exc:
            payload = {"error": str(exc)}
            if isinstance(exc, PatternSyntaxError):
                payload["position"] = exc.position
            return JSONResponse(payload, status_code=400)

    return app
