/** Pattern editor: every edit is validated by the service parser and the
 * error position rendered as a caret marker under the text; running a
 * pattern shows grouped matches; saving stores it as a named `$NAME`
 * reference for later patterns. */

import type { Api } from "./api.js";
import type { ParseResult, QueryResult } from "./types.js";
import { escapeHtml } from "./html.js";

export class PatternEditorView {
  text = "";
  status: ParseResult = { ok: true };
  result: QueryResult | null = null;

  constructor(private readonly api: Api, private readonly project: string) {}

  async edit(text: string): Promise<ParseResult> {
    this.text = text;
    this.status = text.trim() ? await this.api.parse(this.project, text) : { ok: true };
    return this.status;
  }

  async run(minScore: number, kwic?: [number, number]): Promise<QueryResult> {
    this.result = await this.api.query(this.project, this.text, minScore, kwic);
    return this.result;
  }

  save(name: string, concept?: string) {
    return this.api.savePattern(this.project, name, this.text, concept);
  }

  /** One line of text, one line with a caret under the error offset. */
  renderStatus(): string {
    if (this.status.ok) {
      return `<pre class="pattern ok">${escapeHtml(this.text)}</pre>`;
    }
    const position = Math.min(this.status.position ?? 0, this.text.length);
    const caret = " ".repeat(position) + "^";
    return (
      `<pre class="pattern error" data-position="${position}">` +
      `${escapeHtml(this.text)}\n${caret}\n` +
      `${escapeHtml(this.status.error ?? "syntax error")}</pre>`
    );
  }

  renderGroups(): string {
    if (!this.result) return "";
    const rows = this.result.groups
      .map(
        (g) =>
          `<tr><td>${g.count}</td><td>${escapeHtml(g.surface)}</td>` +
          `<td>${g.best.toFixed(3)}</td></tr>`,
      )
      .join("");
    return (
      `<table class="match-groups"><thead><tr><th>Count</th><th>Surface</th>` +
      `<th>Best</th></tr></thead><tbody>${rows}</tbody></table>`
    );
  }
}
