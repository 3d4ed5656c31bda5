/** Dendrogram view: an indented collapsible list (merge nodes annotated
 * with their similarity) plus a cut slider whose preview is computed
 * client-side and submitted as a review edit on confirm. */

import { cutLevels, cutPreview } from "./cut.js";
import type { DendrogramData, WordClass } from "./types.js";
import { escapeHtml } from "./html.js";

export class DendrogramView {
  level: number;

  constructor(readonly data: DendrogramData, initialLevel?: number) {
    const levels = cutLevels(data);
    this.level = initialLevel ?? (levels.length ? levels[Math.floor(levels.length / 2)] : 0);
  }

  preview(): WordClass[] {
    return cutPreview(this.data, this.level);
  }

  setLevel(level: number): WordClass[] {
    this.level = level;
    return this.preview();
  }

  renderTree(): string {
    const n = this.data.leaves.length;
    const children = new Map<number, [number, number, number]>();
    this.data.merges.forEach((merge, k) => children.set(n + k, merge));
    const root = this.data.merges.length ? n + this.data.merges.length - 1 : 0;
    const walk = (node: number): string => {
      const merge = children.get(node);
      if (!merge) {
        return `<li class="leaf">${escapeHtml(this.data.leaves[node] ?? "")}</li>`;
      }
      const [left, right, sim] = merge;
      const open = sim >= this.level ? " open" : "";
      return (
        `<li><details${open}><summary>[${sim.toFixed(3)}]</summary>` +
        `<ul>${walk(left)}${walk(right)}</ul></details></li>`
      );
    };
    return `<ul class="dendrogram">${walk(root)}</ul>`;
  }

  renderPreview(): string {
    const rows = this.preview()
      .map(
        (c) =>
          `<li><b>${escapeHtml(c.label)}</b> (${c.freq}) ` +
          `${escapeHtml(c.members.join(" "))}</li>`,
      )
      .join("");
    return (
      `<div class="cut-preview" data-level="${this.level}">` +
      `<input type="range" class="cut-slider" value="${this.level}" ` +
      `min="0" max="1" step="0.001"/><ul>${rows}</ul></div>`
    );
  }
}
