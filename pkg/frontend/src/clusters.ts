/** Modifier cluster review: shows each cluster's poles as "A vs. B", lets
 * the engineer drag members out to the rest list, and turns the edits into
 * one review payload.  Nothing is mutated locally: confirming dispatches
 * the edit and the view re-renders from whatever the server stored. */

import type { ModifierClusteringData } from "./types.js";
import { escapeHtml } from "./html.js";

export class ClusterReviewView {
  private toRest = new Set<string>();

  constructor(readonly data: ModifierClusteringData) {}

  markForRest(word: string): void {
    if (this.data.clusters.some((c) => c.members.includes(word))) {
      this.toRest.add(word);
    }
  }

  unmark(word: string): void {
    this.toRest.delete(word);
  }

  /** Payload for a review `edit` verdict. */
  editPayload(): { to_rest: string[] } {
    return { to_rest: [...this.toRest].sort() };
  }

  render(): string {
    const clusters = this.data.clusters
      .map((c, i) => {
        const body = c.poles
          ? `${poleText(c.poles[0])} vs. ${poleText(c.poles[1])}`
          : c.members.map(escapeHtml).join(", ");
        const marks = c.members
          .map(
            (m) =>
              `<button class="to-rest" data-word="${escapeHtml(m)}"` +
              `${this.toRest.has(m) ? " data-marked=\"1\"" : ""}>${escapeHtml(m)}</button>`,
          )
          .join("");
        return `<li>cluster ${i + 1}: ${body}<div class="members">${marks}</div></li>`;
      })
      .join("");
    const rest = this.data.rest.map(escapeHtml).join("; ");
    return `<ol class="modifier-clusters">${clusters}</ol><p class="rest">rest: ${rest}</p>`;
  }
}

function poleText(pole: string[]): string {
  return [...pole].sort().map(escapeHtml).join(", ");
}
