import { describe, expect, it } from "vitest";

import { ClusterReviewView } from "../src/clusters.js";
import { alignRows } from "../src/concordance.js";
import { DendrogramView } from "../src/dendrogram.js";
import { renderTermBank } from "../src/termbank.js";

const dendrogram = {
  leaves: ["angina", "infarction", "aspirin"],
  freqs: [5, 9, 2],
  merges: [
    [0, 1, 0.8],
    [3, 2, 0.3],
  ] as [number, number, number][],
};

describe("dendrogram view", () => {
  it("renders an indented collapsible list with merge similarities", () => {
    const view = new DendrogramView(dendrogram, 0.5);
    const html = view.renderTree();
    expect(html).toContain("<details");
    expect(html).toContain("[0.800]");
    expect(html).toContain("angina");
  });

  it("preview follows the slider", () => {
    const view = new DendrogramView(dendrogram, 0.9);
    expect(view.preview().length).toBe(3);
    expect(view.setLevel(0.5).length).toBe(2);
    expect(view.setLevel(0.1).length).toBe(1);
    expect(view.renderPreview()).toContain('data-level="0.1"');
  });
});

describe("term bank view", () => {
  it("renders number, frequency, phrase and inclusion columns", () => {
    const html = renderTermBank({
      threshold: 3,
      entries: [
        {
          num: 234,
          freq: 475,
          phrase: "anterior myocardial//BODY-PART infarction//DISEASE",
          inclusion: "anterior $136",
        },
      ],
    });
    expect(html).toContain("$234");
    expect(html).toContain("475");
    expect(html).toContain("anterior $136");
    expect(html).toContain("myocardial//BODY-PART");
  });
});

describe("cluster review view", () => {
  it("shows poles as A vs. B and tracks drag-to-rest edits", () => {
    const view = new ClusterReviewView({
      clusters: [
        { members: ["acute", "chronic"], poles: [["chronic"], ["acute"]] },
      ],
      rest: ["lateral"],
    });
    const html = view.render();
    expect(html).toContain("chronic vs. acute");
    expect(html).toContain("rest: lateral");
    view.markForRest("acute");
    view.markForRest("not-a-member");
    expect(view.editPayload()).toEqual({ to_rest: ["acute"] });
    view.unmark("acute");
    expect(view.editPayload()).toEqual({ to_rest: [] });
  });
});

describe("concordance alignment", () => {
  it("right-aligns left context on the keyword column", () => {
    const text = alignRows([
      { left: ["developed", "an", "anterior", "myocardial"], keyword: ["infarction"], right: ["from", "which"] },
      { left: ["unstable"], keyword: ["angina"], right: ["and", "was"] },
    ]);
    const lines = text.split("\n");
    expect(lines[0]).toBe("developed an anterior myocardial  infarction  from which");
    expect(lines[1]).toBe("                        unstable  angina      and was");
  });

  it("is empty for no rows", () => {
    expect(alignRows([])).toBe("");
  });
});
