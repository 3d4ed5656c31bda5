/** Client-side dendrogram cut.
 *
 * Must stay computationally identical to the server's cut so the preview a
 * knowledge engineer sees while dragging the slider is exactly what
 * confirming the review will produce: components connected by merges with
 * similarity >= level, members listed by leaf index, classes ordered by
 * total frequency descending (ties by first member), labeled C1..Cn.
 * The golden test compares it against recorded server output. */

import type { DendrogramData, WordClass } from "./types.js";

export function cutPreview(dendrogram: DendrogramData, level: number): WordClass[] {
  const n = dendrogram.leaves.length;
  const parent = Array.from({ length: n }, (_, i) => i);
  const find = (x: number): number => {
    while (parent[x] !== x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  const nodeLeaf = new Map<number, number>();
  for (let i = 0; i < n; i++) nodeLeaf.set(i, i);
  dendrogram.merges.forEach(([left, right, sim], k) => {
    const leafL = nodeLeaf.get(left)!;
    const leafR = nodeLeaf.get(right)!;
    nodeLeaf.set(n + k, leafL);
    if (sim >= level) parent[find(leafR)] = find(leafL);
  });
  const groups = new Map<number, number[]>();
  for (let i = 0; i < n; i++) {
    const root = find(i);
    const group = groups.get(root);
    if (group) group.push(i);
    else groups.set(root, [i]);
  }
  const classes = [...groups.values()].map((indexes) => {
    indexes.sort((a, b) => a - b);
    return {
      members: indexes.map((i) => dendrogram.leaves[i]),
      freq: indexes.reduce((sum, i) => sum + dendrogram.freqs[i], 0),
    };
  });
  classes.sort(
    (a, b) => b.freq - a.freq || (a.members[0] < b.members[0] ? -1 : 1),
  );
  return classes.map((c, i) => ({ label: `C${i + 1}`, ...c }));
}

/** Distinct merge similarities, descending: the slider's useful stops. */
export function cutLevels(dendrogram: DendrogramData): number[] {
  const sims = new Set(dendrogram.merges.map(([, , sim]) => sim));
  return [...sims].sort((a, b) => b - a);
}
