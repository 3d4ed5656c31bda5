import time

import pytest
from fastapi.testclient import TestClient

from lexforge import fixtures
from lexforge.service import Session, create_app
from lexforge.project import Project


@pytest.fixture()
def client(tmp_path):
    app = create_app(tmp_path / "workspace")
    with TestClient(app) as c:
        c.workspace = tmp_path / "workspace"
        yield c


def wait(client, jid):
    for _ in range(500):
        r = client.get(f"/jobs/{jid}").json()
        if r["status"] != "running":
            return r
        time.sleep(0.02)
    raise AssertionError("job did not finish")


def run_stage(client, pid, stage, params=None, expect="done"):
    r = client.post(f"/projects/{pid}/stages/{stage}", json=params or {})
    assert r.status_code == 200, r.text
    job = wait(client, r.json()["job"])
    assert job["status"] == expect, job
    return job


def review(client, pid, item, verdict="accept", payload=None):
    r = client.post(
        f"/projects/{pid}/reviews/{item}",
        json={"verdict": verdict, "payload": payload or {}},
    )
    assert r.status_code == 200, r.text
    return r.json()


def make_project(client):
    r = client.post("/projects", json={"id": "demo"})
    assert r.json()["id"] == "demo"
    return "demo"


def annotate_params():
    return {
        "text": fixtures.fixture_path("pds.txt"),
        "lexicon": fixtures.fixture_path("lexicon.mkp"),
        "suffix_rules": fixtures.fixture_path("suffix_rules.txt"),
        "doc_id": "pds",
    }


def test_stage_before_prerequisite_fails_with_dependency_error(client):
    pid = make_project(client)
    job = run_stage(client, pid, "cluster", expect="failed")
    assert "vectors" in job["error"]


def test_full_pipeline_with_reviews(client):
    pid = make_project(client)

    job = run_stage(client, pid, "annotate", annotate_params())
    review(client, pid, job["review"])

    job = run_stage(client, pid, "vectors", {"targets": 60, "contexts": 40})
    review(client, pid, job["review"])

    job = run_stage(client, pid, "cluster", {})
    accepted = review(client, pid, job["review"])
    assert accepted["artifact"].startswith("categories")

    job = run_stage(
        client,
        pid,
        "collocate",
        {"stoplist": fixtures.fixture_path("stoplist.txt"), "threshold": 3},
    )
    review(client, pid, job["review"])

    job = run_stage(
        client,
        pid,
        "innerctx",
        {"thesaurus": fixtures.fixture_path("thesaurus.mkp"), "head": "infarction"},
    )
    review(client, pid, job["review"])

    job = run_stage(
        client,
        pid,
        "generalize",
        {"sets": fixtures.fixture_path("paradigm_sets.mkp"), "collect": "DISEASE"},
    )
    review(client, pid, job["review"])

    info = client.get(f"/projects/{pid}").json()
    assert len(info["artifacts"]) >= 6
    assert info["pending"] == []

    r = client.get(
        f"/projects/{pid}/artifacts/{job['artifact']}",
        headers={"accept": "application/json"},
    )
    sets = {s["sigil"]: s["members"] for s in r.json()["artifact"]["sets"]}
    assert "$BODY-PART DISEASE<noun/s>" in sets["$$DISEASE"]


def test_identical_params_return_same_artifact(client):
    pid = make_project(client)
    first = run_stage(client, pid, "annotate", annotate_params())
    second = run_stage(client, pid, "annotate", annotate_params())
    assert first["artifact"] == second["artifact"]


def test_double_review_conflicts(client):
    pid = make_project(client)
    job = run_stage(client, pid, "annotate", annotate_params())
    review(client, pid, job["review"])
    r = client.post(
        f"/projects/{pid}/reviews/{job['review']}", json={"verdict": "accept"}
    )
    assert r.status_code == 409


def test_artifact_served_as_markup_by_default(client):
    pid = make_project(client)
    job = run_stage(client, pid, "annotate", annotate_params())
    r = client.get(f"/projects/{pid}/artifacts/{job['artifact']}")
    assert r.headers["content-type"].startswith("application/xml")
    assert "<CORPUS>" in r.text


def test_query_with_saved_patterns_and_kwic(client):
    pid = make_project(client)
    job = run_stage(
        client,
        pid,
        "annotate",
        {
            "text": fixtures.fixture_path("fig3_corpus.txt"),
            "lexicon": fixtures.fixture_path("lexicon.mkp"),
            "suffix_rules": fixtures.fixture_path("suffix_rules.txt"),
            "doc_id": "fig3",
        },
    )
    review(client, pid, job["review"])
    assert client.post(
        f"/projects/{pid}/patterns", json={"name": "PERSON", "text": "[PERSON]"}
    ).status_code == 200
    assert client.post(
        f"/projects/{pid}/patterns",
        json={"name": "DATE", "text": "<TIMEX>", "concept": "a point in time"},
    ).status_code == 200
    r = client.post(
        f"/projects/{pid}/query",
        json={"pattern": fixtures.FIG3_PATTERN, "min_score": 0.5, "kwic": [4, 2]},
    )
    body = r.json()
    assert len(body["matches"]) == 5
    assert len(body["kwic"]) == 5
    assert sum(g["count"] for g in body["groups"]) == 5


def test_query_parse_error_carries_position(client):
    pid = make_project(client)
    job = run_stage(client, pid, "annotate", annotate_params())
    review(client, pid, job["review"])
    r = client.post(f"/projects/{pid}/query", json={"pattern": '"of" {{'})
    assert r.status_code == 400
    assert "position" in r.json()


def test_session_replay_reconstructs_state(client):
    pid = make_project(client)
    job = run_stage(client, pid, "annotate", annotate_params())
    review(client, pid, job["review"])
    job = run_stage(client, pid, "vectors", {"targets": 30, "contexts": 20})
    # leave the vectors review pending on purpose
    fresh = Session(Project.open(client.workspace / pid))
    assert fresh.approved["corpus"].startswith("annotate-")
    assert list(fresh.pending) == [job["review"]]
    original = Session(Project.open(client.workspace / pid))
    assert original.approved == fresh.approved
    assert original.pending == fresh.pending


def test_modifier_review_edit_moves_word_to_rest(client):
    pid = make_project(client)
    job = run_stage(client, pid, "annotate", annotate_params())
    review(client, pid, job["review"])
    job = run_stage(client, pid, "vectors", {"targets": 60, "contexts": 40})
    review(client, pid, job["review"])
    job = run_stage(client, pid, "cluster", {})
    review(client, pid, job["review"])
    job = run_stage(
        client,
        pid,
        "collocate",
        {"stoplist": fixtures.fixture_path("stoplist.txt"), "threshold": 3},
    )
    review(client, pid, job["review"])
    job = run_stage(
        client,
        pid,
        "innerctx",
        {"thesaurus": fixtures.fixture_path("thesaurus.mkp"), "head": "infarction"},
    )
    edited = review(client, pid, job["review"], verdict="edit", payload={"to_rest": ["old"]})
    r = client.get(
        f"/projects/{pid}/artifacts/{edited['artifact']}",
        headers={"accept": "application/json"},
    ).json()
    clusters = r["artifact"]["clusters"]
    assert all("old" not in c["members"] for c in clusters)
    assert "old" in r["artifact"]["rest"]
