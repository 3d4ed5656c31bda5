/** Keyword-in-context browser with adjustable left/right distances; rows
 * right-align the left context on the keyword column. */

import type { Api } from "./api.js";
import type { KwicRowData } from "./types.js";
import { escapeHtml } from "./html.js";

export class ConcordanceView {
  left = 4;
  right = 2;
  rows: KwicRowData[] = [];

  constructor(private readonly api: Api, private readonly project: string) {}

  setDistances(left: number, right: number): void {
    this.left = left;
    this.right = right;
  }

  async search(pattern: string, minScore = 1.0): Promise<KwicRowData[]> {
    const result = await this.api.query(this.project, pattern, minScore, [
      this.left,
      this.right,
    ]);
    this.rows = result.kwic ?? [];
    return this.rows;
  }

  render(): string {
    const body = this.rows
      .map(
        (r) =>
          `<tr><td class="ctx-left">${escapeHtml(r.left.join(" "))}</td>` +
          `<td class="kw">${escapeHtml(r.keyword.join(" "))}</td>` +
          `<td class="ctx-right">${escapeHtml(r.right.join(" "))}</td></tr>`,
      )
      .join("");
    return (
      `<table class="kwic" data-left="${this.left}" data-right="${this.right}">` +
      `<tbody>${body}</tbody></table>`
    );
  }
}

/** Plain-text alignment, same layout as the CLI output. */
export function alignRows(rows: KwicRowData[]): string {
  if (!rows.length) return "";
  const lefts = rows.map((r) => r.left.join(" "));
  const keys = rows.map((r) => r.keyword.join(" "));
  const width = Math.max(...lefts.map((t) => t.length));
  const keyWidth = Math.max(...keys.map((t) => t.length));
  return rows
    .map((r, i) =>
      `${lefts[i].padStart(width)}  ${keys[i].padEnd(keyWidth)}  ${r.right.join(" ")}`.trimEnd(),
    )
    .join("\n");
}
