/** DTOs of the service's JSON projection. */

export interface DendrogramData {
  leaves: string[];
  freqs: number[];
  /** [leftNode, rightNode, similarity]; node ids: leaf i, merge k -> leaves.length + k */
  merges: [number, number, number][];
}

export interface WordClass {
  label: string;
  members: string[];
  freq: number;
}

export interface WordClassSetData {
  cut: number;
  classes: WordClass[];
}

export interface TermRow {
  num: number | null;
  freq: number;
  phrase: string;
  inclusion: string | null;
}

export interface TermBankData {
  threshold: number;
  entries: TermRow[];
}

export interface ModifierClusterData {
  members: string[];
  poles: [string[], string[]] | null;
}

export interface ModifierClusteringData {
  clusters: ModifierClusterData[];
  rest: string[];
}

export interface ParadigmSetData {
  name: string;
  sigil: string;
  members: string[];
}

export interface ParadigmBankData {
  sets: ParadigmSetData[];
  ranked: { freq: number; level: number; text: string }[];
}

export interface ReviewItem {
  id: string;
  kind: string;
  artifact: string;
  stage: string;
  proposal: Record<string, unknown>;
}

export interface ProjectInfo {
  id: string;
  corpus: string;
  artifacts: string[];
  pending: ReviewItem[];
  approved: Record<string, string>;
}

export interface ParseResult {
  ok: boolean;
  error?: string;
  position?: number;
}

export interface KwicRowData {
  left: string[];
  keyword: string[];
  right: string[];
}

export interface QueryResult {
  groups: { surface: string; count: number; best: number }[];
  matches: { doc: string; sentence: string; span: [number, number]; score: number; level: number }[];
  kwic?: KwicRowData[];
  kwic_text?: string;
}
