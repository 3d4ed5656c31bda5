/** Workbench application state.
 *
 * The one rule enforced here: the client never owns the truth.  Every
 * mutation is a review/edit (or a pattern save) posted to the service, and
 * the app re-renders from the server's project state afterwards.  Cut
 * previews are computed locally for responsiveness but only become real
 * through a review. */

import { Api, ApiError } from "./api.js";
import { DendrogramView } from "./dendrogram.js";
import type { DendrogramData, ProjectInfo, ReviewItem } from "./types.js";

export class StaleArtifactError extends Error {
  constructor(readonly item: string) {
    super(`review item ${item} is no longer pending; reload the project`);
  }
}

export class WorkbenchApp {
  info: ProjectInfo | null = null;

  constructor(readonly api: Api, readonly project: string) {}

  async refresh(): Promise<ProjectInfo> {
    this.info = await this.api.projectInfo(this.project);
    return this.info;
  }

  pendingOfKind(kind: string): ReviewItem[] {
    return (this.info?.pending ?? []).filter((item) => item.kind === kind);
  }

  private async ensurePending(item: string): Promise<ReviewItem> {
    await this.refresh();
    const found = this.info!.pending.find((p) => p.id === item);
    if (!found) throw new StaleArtifactError(item);
    return found;
  }

  async openDendrogram(item: ReviewItem): Promise<DendrogramView> {
    const { artifact } = await this.api.artifact<DendrogramData>(
      this.project,
      item.artifact,
    );
    const proposed = item.proposal["cut_level"];
    return new DendrogramView(
      artifact,
      typeof proposed === "number" ? proposed : undefined,
    );
  }

  /** Confirm a cut at the slider level, optionally renaming classes. */
  async confirmCut(
    item: string,
    level: number,
    labels: Record<string, string> = {},
  ) {
    await this.ensurePending(item);
    const result = await this.api.review(this.project, item, "edit", {
      cut_level: level,
      labels,
    });
    await this.refresh();
    return result;
  }

  async acceptReview(item: string) {
    await this.ensurePending(item);
    const result = await this.api.review(this.project, item, "accept");
    await this.refresh();
    return result;
  }

  async rejectReview(item: string) {
    await this.ensurePending(item);
    const result = await this.api.review(this.project, item, "reject");
    await this.refresh();
    return result;
  }

  /** Move modifier words out of their clusters into the rest list. */
  async editModifiers(item: string, toRest: string[]) {
    await this.ensurePending(item);
    const result = await this.api.review(this.project, item, "edit", {
      to_rest: toRest,
    });
    await this.refresh();
    return result;
  }

  async savePattern(name: string, text: string, concept?: string) {
    const result = await this.api.savePattern(this.project, name, text, concept);
    await this.refresh();
    return result;
  }

  async runStageAndWait(stage: string, params: Record<string, unknown>) {
    const { job } = await this.api.runStage(this.project, stage, params);
    for (;;) {
      const status = await this.api.job(job);
      if (status.status === "done") {
        await this.refresh();
        return status;
      }
      if (status.status === "failed") {
        throw new ApiError(status.error ?? "stage failed", 500);
      }
      await new Promise((resolve) => setTimeout(resolve, 150));
    }
  }
}
