/** Thin typed client over the workbench service endpoints.
 *
 * Every artifact mutation available to the UI goes through `review` or
 * `savePattern`; there is deliberately no other write path, so the server's
 * decision log covers every change made from the browser. */

import type { ParseResult, ProjectInfo, QueryResult } from "./types.js";

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(message: string, readonly status: number, readonly position?: number) {
    super(message);
  }
}

export class Api {
  constructor(
    private readonly base: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchFn(this.base + path, {
      method,
      headers: { "content-type": "application/json", accept: "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json();
    if (!response.ok) {
      throw new ApiError(payload.error ?? response.statusText, response.status, payload.position);
    }
    return payload as T;
  }

  createProject(id: string, corpus = ""): Promise<{ id: string }> {
    return this.request("POST", "/projects", { id, corpus });
  }

  projectInfo(id: string): Promise<ProjectInfo> {
    return this.request("GET", `/projects/${id}`);
  }

  runStage(id: string, stage: string, params: Record<string, unknown>): Promise<{ job: string }> {
    return this.request("POST", `/projects/${id}/stages/${stage}`, params);
  }

  job(id: string): Promise<{ status: string; artifact?: string; review?: string; error?: string }> {
    return this.request("GET", `/jobs/${id}`);
  }

  artifact<T>(project: string, name: string): Promise<{ name: string; artifact: T }> {
    return this.request("GET", `/projects/${project}/artifacts/${name}`);
  }

  review(
    project: string,
    item: string,
    verdict: "accept" | "reject" | "edit",
    payload: Record<string, unknown> = {},
  ): Promise<{ item: string; verdict: string; artifact: string }> {
    return this.request("POST", `/projects/${project}/reviews/${item}`, { verdict, payload });
  }

  parse(project: string, text: string): Promise<ParseResult> {
    return this.request("POST", `/projects/${project}/parse`, { text });
  }

  savePattern(
    project: string,
    name: string,
    text: string,
    concept?: string,
  ): Promise<{ artifact: string }> {
    return this.request("POST", `/projects/${project}/patterns`, { name, text, concept });
  }

  query(
    project: string,
    pattern: string,
    minScore: number,
    kwic?: [number, number],
  ): Promise<QueryResult> {
    return this.request("POST", `/projects/${project}/query`, {
      pattern,
      min_score: minScore,
      kwic,
    });
  }
}
