import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import type { Api } from "../src/api.js";
import { PatternEditorView } from "../src/patterns.js";
import type { ParseResult } from "../src/types.js";

interface ParseGolden {
  text: string;
  position: number;
  error: string;
}

const goldens = JSON.parse(
  readFileSync(new URL("../fixtures/goldens.json", import.meta.url), "utf-8"),
) as { parse_errors: ParseGolden[] };

function apiReturning(result: ParseResult): Api {
  return { parse: async () => result } as unknown as Api;
}

describe("pattern editor error surfacing", () => {
  it("ships 10 recorded malformed patterns", () => {
    expect(goldens.parse_errors.length).toBe(10);
  });

  it("marks the recorded error position for every malformed pattern", async () => {
    for (const golden of goldens.parse_errors) {
      const editor = new PatternEditorView(
        apiReturning({ ok: false, error: golden.error, position: golden.position }),
        "p",
      );
      const status = await editor.edit(golden.text);
      expect(status.ok).toBe(false);
      const html = editor.renderStatus();
      const marked = Math.min(golden.position, golden.text.length);
      expect(html).toContain(`data-position="${marked}"`);
      // the caret line points at exactly that offset
      const caretLine = html.split("\n")[1];
      expect(caretLine).toBe(" ".repeat(marked) + "^");
    }
  });

  it("renders a clean state for a valid pattern", async () => {
    const editor = new PatternEditorView(apiReturning({ ok: true }), "p");
    await editor.edit('"of"');
    expect(editor.renderStatus()).toContain('class="pattern ok"');
  });
});
