/** Term bank table: number, frequency, annotated phrase, inclusion form. */

import type { TermBankData } from "./types.js";
import { escapeHtml } from "./html.js";

export function renderTermBank(bank: TermBankData): string {
  const rows = bank.entries
    .map((e) => {
      const num = e.num === null ? "" : `$${e.num}`;
      const inclusion = e.inclusion ?? "";
      return (
        `<tr><td>${num}</td><td>${e.freq}</td>` +
        `<td>${escapeHtml(e.phrase)}</td><td>${escapeHtml(inclusion)}</td></tr>`
      );
    })
    .join("");
  return (
    `<table class="termbank" data-threshold="${bank.threshold}">` +
    `<thead><tr><th>Num</th><th>Freq</th><th>Annotated Phrase</th>` +
    `<th>Inclusion</th></tr></thead><tbody>${rows}</tbody></table>`
  );
}
