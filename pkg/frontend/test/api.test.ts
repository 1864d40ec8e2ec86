import { describe, expect, it } from "vitest";

import { AnnotationApi, ApiError } from "../src/api.js";
import { makeResponse, stubFetch, summaryPayload } from "./helpers.js";

describe("AnnotationApi", () => {
  it("joins the base url without doubling slashes", async () => {
    const seen: string[] = [];
    const api = new AnnotationApi("http://host:1234/", async (url) => {
      seen.push(url);
      return makeResponse(200, { status: "ok" });
    });
    await api.health();
    expect(seen).toEqual(["http://host:1234/health"]);
  });

  it("sends JSON bodies with the content-type header", async () => {
    let captured: RequestInit | undefined;
    const api = new AnnotationApi("http://host", async (_url, init) => {
      captured = init;
      return makeResponse(200, summaryPayload());
    });
    await api.assign("s1", "alpha", [1, 2]);
    expect(captured?.method).toBe("POST");
    expect(captured?.headers).toEqual({ "content-type": "application/json" });
    expect(JSON.parse(String(captured?.body))).toEqual({
      cluster_name: "alpha",
      finding_ids: [1, 2],
    });
  });

  it("unwraps list envelopes", async () => {
    const { fetch } = stubFetch({
      "GET /reasons": () => ({
        body: { reasons: [{ reason_id: 1, text: "a", builtin: true }] },
      }),
      "GET /sessions/s1/unassigned": () => ({ body: { unassigned: [3, 4] } }),
    });
    const api = new AnnotationApi("http://host", fetch);
    expect(await api.listReasons()).toEqual([{ reason_id: 1, text: "a", builtin: true }]);
    expect(await api.unassigned("s1")).toEqual([3, 4]);
  });

  it("maps error envelopes to ApiError", async () => {
    const api = new AnnotationApi("http://host", async () =>
      makeResponse(409, { error: "IncompleteAnnotation", detail: { unassigned: [3] } }),
    );
    const error = await api.exportGroundTruth("s1").catch((e: unknown) => e);
    expect(error).toBeInstanceOf(ApiError);
    const apiError = error as ApiError;
    expect(apiError.code).toBe("IncompleteAnnotation");
    expect(apiError.status).toBe(409);
    expect(apiError.detail).toEqual({ unassigned: [3] });
  });

  it("falls back to a generic code when the error body is not JSON", async () => {
    const api = new AnnotationApi("http://host", async () => ({
      ok: false,
      status: 502,
      json: async () => {
        throw new Error("not json");
      },
    }));
    const error = (await api.health().catch((e: unknown) => e)) as ApiError;
    expect(error.code).toBe("HttpError");
    expect(error.status).toBe(502);
  });
});
