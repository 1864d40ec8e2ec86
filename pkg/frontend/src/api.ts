/** Typed client for the annotation service REST API.
 *
 * Every non-2xx response carries `{"error": code, "detail": ...}`; that is
 * surfaced as an ApiError so callers can branch on the code instead of
 * parsing response bodies themselves.
 */

export class ApiError extends Error {
  constructor(
    readonly code: string,
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(`${code} (status ${status})`);
    this.name = "ApiError";
  }
}

/** The slice of the fetch Response the client actually uses. Test stubs
 *  implement this with plain objects instead of constructing Responses. */
export interface HttpResponse {
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<HttpResponse>;

export interface Reason {
  reason_id: number;
  text: string;
  builtin: boolean;
}

export interface FindingView {
  id: number;
  tool: string;
  text: string;
  cluster: string | null;
}

export interface SessionSummary {
  session_id: string;
  testing_type: string;
  finding_count: number;
  clusters: Record<string, number[]>;
  unassigned_count: number;
  review_item_count: number;
  created_at: string;
  updated_at: string;
}

export interface ClusterSetPayload {
  origin: string;
  clusters: number[][];
  threshold?: number;
}

export interface ReviewItemView {
  predicted_cluster: number[];
  matched_truth: number[] | null;
  verdict: string;
  reasons: number[];
}

export interface ReasonCount {
  reason_id: number;
  text: string;
  count: number;
}

export interface ReviewSummary {
  total_items: number;
  tagged: number;
  pending: number;
  reasons: ReasonCount[];
}

export class AnnotationApi {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    // wrap the global so browsers do not lose the window binding
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
      init.headers = { "content-type": "application/json" };
    }
    const response = await this.fetchFn(this.base + path, init);
    if (!response.ok) {
      let code = "HttpError";
      let detail: unknown = null;
      try {
        const payload = (await response.json()) as { error?: unknown; detail?: unknown };
        if (payload && typeof payload.error === "string") {
          code = payload.error;
        }
        detail = payload?.detail ?? null;
      } catch {
        // body was not JSON; keep the generic code
      }
      throw new ApiError(code, response.status, detail);
    }
    return (await response.json()) as T;
  }

  health(): Promise<{ status: string }> {
    return this.request("GET", "/health");
  }

  async listReasons(): Promise<Reason[]> {
    const payload = await this.request<{ reasons: Reason[] }>("GET", "/reasons");
    return payload.reasons;
  }

  async addReason(text: string): Promise<number> {
    const payload = await this.request<{ reason_id: number }>("POST", "/reasons", { text });
    return payload.reason_id;
  }

  createSession(dataset: unknown): Promise<SessionSummary> {
    return this.request("POST", "/sessions", dataset);
  }

  summary(sessionId: string): Promise<SessionSummary> {
    return this.request("GET", `/sessions/${sessionId}`);
  }

  async findings(sessionId: string): Promise<FindingView[]> {
    const payload = await this.request<{ findings: FindingView[] }>(
      "GET", `/sessions/${sessionId}/findings`,
    );
    return payload.findings;
  }

  assign(sessionId: string, clusterName: string, findingIds: number[]): Promise<SessionSummary> {
    return this.request("POST", `/sessions/${sessionId}/assign`, {
      cluster_name: clusterName,
      finding_ids: findingIds,
    });
  }

  async unassigned(sessionId: string): Promise<number[]> {
    const payload = await this.request<{ unassigned: number[] }>(
      "GET", `/sessions/${sessionId}/unassigned`,
    );
    return payload.unassigned;
  }

  exportGroundTruth(sessionId: string): Promise<ClusterSetPayload> {
    return this.request("GET", `/sessions/${sessionId}/export`);
  }

  async openReview(sessionId: string, predicted: ClusterSetPayload): Promise<ReviewItemView[]> {
    const payload = await this.request<{ items: ReviewItemView[] }>(
      "POST", `/sessions/${sessionId}/review`, predicted,
    );
    return payload.items;
  }

  async reviewItems(sessionId: string): Promise<ReviewItemView[]> {
    const payload = await this.request<{ items: ReviewItemView[] }>(
      "GET", `/sessions/${sessionId}/review`,
    );
    return payload.items;
  }

  tagItem(
    sessionId: string,
    index: number,
    verdict: string,
    reasons: number[],
  ): Promise<ReviewItemView> {
    return this.request("POST", `/sessions/${sessionId}/review/${index}/tag`, {
      verdict,
      reasons,
    });
  }

  reviewSummary(sessionId: string): Promise<ReviewSummary> {
    return this.request("GET", `/sessions/${sessionId}/review/summary`);
  }
}
