/** View-state container for the annotator.
 *
 * Every mutation goes through the API and is followed by a refetch, so the
 * rendered state is always something the server confirmed. Nothing here
 * patches clusters or review items optimistically. Requests the server would
 * reject on sight (empty selection, empty reasons, blank names) are blocked
 * before any call is made and reported through the banner.
 */

import {
  AnnotationApi,
  ApiError,
  type ClusterSetPayload,
  type FindingView,
  type Reason,
  type ReviewItemView,
  type ReviewSummary,
  type SessionSummary,
} from "./api.js";

export const VERDICTS = ["incorrect", "correct_annotation_error"] as const;

export interface ViewState {
  sessionId: string | null;
  testingType: string;
  findingCount: number;
  findings: FindingView[];
  unassigned: FindingView[];
  clusters: Record<string, number[]>;
  reasons: Reason[];
  reviewItems: ReviewItemView[];
  reviewIndex: number;
  reviewSummary: ReviewSummary | null;
  banner: string | null;
}

function initialState(): ViewState {
  return {
    sessionId: null,
    testingType: "",
    findingCount: 0,
    findings: [],
    unassigned: [],
    clusters: {},
    reasons: [],
    reviewItems: [],
    reviewIndex: -1,
    reviewSummary: null,
    banner: null,
  };
}

function firstPending(items: ReviewItemView[]): number {
  return items.findIndex((item) => item.verdict === "pending");
}

export class AnnotatorStore {
  private state: ViewState = initialState();
  private listeners: Array<() => void> = [];
  private inflight = 0;
  private idleWaiters: Array<() => void> = [];

  constructor(private readonly api: AnnotationApi) {}

  getState(): ViewState {
    return this.state;
  }

  subscribe(listener: () => void): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((fn) => fn !== listener);
    };
  }

  /** Resolves once no store-initiated request is in flight. Test hook. */
  idle(): Promise<void> {
    if (this.inflight === 0) {
      return Promise.resolve();
    }
    return new Promise((resolve) => this.idleWaiters.push(resolve));
  }

  private set(patch: Partial<ViewState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of [...this.listeners]) {
      listener();
    }
  }

  private fail(error: unknown): false {
    if (error instanceof ApiError) {
      const detail = error.detail === null ? "" : ` ${JSON.stringify(error.detail)}`;
      this.set({ banner: `${error.code}:${detail || " request rejected"}` });
    } else {
      this.set({ banner: String(error) });
    }
    return false;
  }

  private async track<T>(work: () => Promise<T>): Promise<T> {
    this.inflight += 1;
    try {
      return await work();
    } finally {
      this.inflight -= 1;
      if (this.inflight === 0) {
        const waiters = this.idleWaiters;
        this.idleWaiters = [];
        for (const resolve of waiters) {
          resolve();
        }
      }
    }
  }

  findingText(id: number): string {
    const finding = this.state.findings.find((f) => f.id === id);
    return finding ? `[${finding.tool}] ${finding.text}` : `finding ${id}`;
  }

  currentItem(): ReviewItemView | null {
    const { reviewItems, reviewIndex } = this.state;
    return reviewIndex >= 0 ? reviewItems[reviewIndex] : null;
  }

  loadReasons(): Promise<boolean> {
    return this.track(async () => {
      try {
        this.set({ reasons: await this.api.listReasons() });
        return true;
      } catch (error) {
        return this.fail(error);
      }
    });
  }

  createSession(rawDataset: string): Promise<boolean> {
    let dataset: unknown;
    try {
      dataset = JSON.parse(rawDataset);
    } catch {
      this.set({ banner: "dataset is not valid JSON" });
      return Promise.resolve(false);
    }
    return this.track(async () => {
      try {
        const summary = await this.api.createSession(dataset);
        this.set({ sessionId: summary.session_id, banner: null });
        await this.pull();
        return true;
      } catch (error) {
        return this.fail(error);
      }
    });
  }

  refresh(): Promise<boolean> {
    return this.track(async () => {
      try {
        await this.pull();
        return true;
      } catch (error) {
        return this.fail(error);
      }
    });
  }

  /** Refetch everything the view shows from the server. */
  private async pull(): Promise<void> {
    const sessionId = this.state.sessionId;
    if (sessionId === null) {
      return;
    }
    const [summary, findings] = await Promise.all([
      this.api.summary(sessionId),
      this.api.findings(sessionId),
    ]);
    let reviewItems: ReviewItemView[] = [];
    if (summary.review_item_count > 0) {
      reviewItems = await this.api.reviewItems(sessionId);
    }
    this.applyServerState(summary, findings, reviewItems);
  }

  private applyServerState(
    summary: SessionSummary,
    findings: FindingView[],
    reviewItems: ReviewItemView[],
  ): void {
    this.set({
      testingType: summary.testing_type,
      findingCount: summary.finding_count,
      findings,
      unassigned: findings.filter((f) => f.cluster === null),
      clusters: summary.clusters,
      reviewItems,
      reviewIndex: firstPending(reviewItems),
    });
  }

  assignSelection(findingIds: number[], clusterName: string): Promise<boolean> {
    if (this.state.sessionId === null) {
      this.set({ banner: "no active session" });
      return Promise.resolve(false);
    }
    if (findingIds.length === 0) {
      this.set({ banner: "select at least one finding" });
      return Promise.resolve(false);
    }
    const name = clusterName.trim();
    if (name === "") {
      this.set({ banner: "cluster name must not be empty" });
      return Promise.resolve(false);
    }
    return this.track(async () => {
      try {
        await this.api.assign(this.state.sessionId as string, name, findingIds);
        this.set({ banner: null });
        await this.pull();
        return true;
      } catch (error) {
        return this.fail(error);
      }
    });
  }

  exportGroundTruth(): Promise<ClusterSetPayload | null> {
    if (this.state.sessionId === null) {
      this.set({ banner: "no active session" });
      return Promise.resolve(null);
    }
    return this.track(async () => {
      try {
        const payload = await this.api.exportGroundTruth(this.state.sessionId as string);
        this.set({ banner: null });
        return payload;
      } catch (error) {
        this.fail(error);
        return null;
      }
    });
  }

  openReview(rawPredicted: string): Promise<boolean> {
    if (this.state.sessionId === null) {
      this.set({ banner: "no active session" });
      return Promise.resolve(false);
    }
    let predicted: ClusterSetPayload;
    try {
      predicted = JSON.parse(rawPredicted) as ClusterSetPayload;
    } catch {
      this.set({ banner: "predicted clusters are not valid JSON" });
      return Promise.resolve(false);
    }
    return this.track(async () => {
      try {
        const items = await this.api.openReview(this.state.sessionId as string, predicted);
        this.set({
          reviewItems: items,
          reviewIndex: firstPending(items),
          reviewSummary: null,
          banner: null,
        });
        if (firstPending(items) === -1) {
          await this.pullReviewSummary();
        }
        return true;
      } catch (error) {
        return this.fail(error);
      }
    });
  }

  /** Tag the current pending item, then advance the queue. */
  tagCurrent(verdict: string, reasons: number[]): Promise<boolean> {
    const index = this.state.reviewIndex;
    if (this.state.sessionId === null || index < 0) {
      this.set({ banner: "no pending review item" });
      return Promise.resolve(false);
    }
    if (!(VERDICTS as readonly string[]).includes(verdict)) {
      this.set({ banner: "pick a verdict before tagging" });
      return Promise.resolve(false);
    }
    if (reasons.length === 0) {
      this.set({ banner: "pick at least one reason" });
      return Promise.resolve(false);
    }
    return this.track(async () => {
      try {
        const sessionId = this.state.sessionId as string;
        await this.api.tagItem(sessionId, index, verdict, reasons);
        const items = await this.api.reviewItems(sessionId);
        const nextIndex = firstPending(items);
        this.set({ reviewItems: items, reviewIndex: nextIndex, banner: null });
        if (nextIndex === -1) {
          await this.pullReviewSummary();
        }
        return true;
      } catch (error) {
        return this.fail(error);
      }
    });
  }

  private async pullReviewSummary(): Promise<void> {
    const summary = await this.api.reviewSummary(this.state.sessionId as string);
    this.set({ reviewSummary: summary });
  }
}
