/** Every artifact mutation the UI can make must travel through a
 * review/edit call (or a pattern save) so the server's decision log covers
 * it.  These tests drive the app against a recording stub and assert no
 * other write path exists. */

import { describe, expect, it } from "vitest";

import type { Api } from "../src/api.js";
import { StaleArtifactError, WorkbenchApp } from "../src/app.js";
import { ClusterReviewView } from "../src/clusters.js";
import type { ProjectInfo } from "../src/types.js";

function recordingApi(pending: ProjectInfo["pending"]) {
  const calls: { method: string; args: unknown[] }[] = [];
  const info: ProjectInfo = {
    id: "p",
    corpus: "",
    artifacts: [],
    pending,
    approved: {},
  };
  const api = {
    projectInfo: async () => {
      calls.push({ method: "projectInfo", args: [] });
      return info;
    },
    artifact: async (_p: string, name: string) => {
      calls.push({ method: "artifact", args: [name] });
      return { name, artifact: { leaves: ["a", "b"], freqs: [1, 2], merges: [[0, 1, 0.5]] } };
    },
    review: async (...args: unknown[]) => {
      calls.push({ method: "review", args });
      return { item: String(args[1]), verdict: String(args[2]), artifact: "x" };
    },
    savePattern: async (...args: unknown[]) => {
      calls.push({ method: "savePattern", args });
      return { artifact: "pattern-x" };
    },
    runStage: async () => {
      calls.push({ method: "runStage", args: [] });
      return { job: "j" };
    },
    job: async () => ({ status: "done" }),
    parse: async () => ({ ok: true }),
    query: async () => ({ groups: [], matches: [] }),
  };
  return { api: api as unknown as Api, calls };
}

const MUTATING = new Set(["review", "savePattern"]);

function mutations(calls: { method: string; args: unknown[] }[]) {
  return calls.filter((c) => MUTATING.has(c.method));
}

const cutItem = {
  id: "r-1",
  kind: "cut",
  artifact: "cluster-abc",
  stage: "cluster",
  proposal: { cut_level: 0.4 },
};

describe("mutation auditing", () => {
  it("confirming a cut issues exactly one review edit", async () => {
    const { api, calls } = recordingApi([cutItem]);
    const app = new WorkbenchApp(api, "p");
    await app.refresh();
    await app.confirmCut("r-1", 0.4, { C1: "DISEASE" });
    const writes = mutations(calls);
    expect(writes.length).toBe(1);
    expect(writes[0].method).toBe("review");
    expect(writes[0].args[2]).toBe("edit");
  });

  it("accept and reject each issue exactly one review call", async () => {
    const { api, calls } = recordingApi([cutItem, { ...cutItem, id: "r-2" }]);
    const app = new WorkbenchApp(api, "p");
    await app.refresh();
    await app.acceptReview("r-1");
    await app.rejectReview("r-2");
    expect(mutations(calls).map((c) => c.args[2])).toEqual(["accept", "reject"]);
  });

  it("modifier edits issue one review edit carrying the rest payload", async () => {
    const item = { ...cutItem, id: "r-3", kind: "modifiers" };
    const { api, calls } = recordingApi([item]);
    const app = new WorkbenchApp(api, "p");
    await app.refresh();
    const view = new ClusterReviewView({
      clusters: [{ members: ["major", "old"], poles: null }],
      rest: [],
    });
    view.markForRest("old");
    await app.editModifiers("r-3", view.editPayload().to_rest);
    const writes = mutations(calls);
    expect(writes.length).toBe(1);
    expect(writes[0].args[3]).toEqual({ to_rest: ["old"] });
  });

  it("saving a pattern is the only other write path", async () => {
    const { api, calls } = recordingApi([]);
    const app = new WorkbenchApp(api, "p");
    await app.refresh();
    await app.savePattern("DISEASE-EVENT", "[DISEASE]");
    const writes = mutations(calls);
    expect(writes.length).toBe(1);
    expect(writes[0].method).toBe("savePattern");
  });

  it("a stale review item aborts before any write", async () => {
    const { api, calls } = recordingApi([]);
    const app = new WorkbenchApp(api, "p");
    await app.refresh();
    await expect(app.confirmCut("gone", 0.4)).rejects.toThrow(StaleArtifactError);
    expect(mutations(calls).length).toBe(0);
  });

  it("reading views never mutates", async () => {
    const { api, calls } = recordingApi([cutItem]);
    const app = new WorkbenchApp(api, "p");
    await app.refresh();
    const view = await app.openDendrogram(cutItem);
    view.setLevel(0.9);
    view.renderTree();
    view.renderPreview();
    expect(mutations(calls).length).toBe(0);
  });
});
