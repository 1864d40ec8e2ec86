import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import net from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";

import type { FetchLike, HttpResponse } from "../src/api.js";

// ---------------------------------------------------------------------------
// scripted fetch for unit tests
// ---------------------------------------------------------------------------

export interface StubResult {
  status?: number;
  body: unknown;
}

export type StubRoutes = Record<string, (body: unknown) => StubResult>;

export interface StubbedFetch {
  fetch: FetchLike;
  calls: string[];
}

/** Route table keyed by "METHOD /path"; handlers may close over test state. */
export function stubFetch(routes: StubRoutes): StubbedFetch {
  const calls: string[] = [];
  const fetchFn: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const key = `${method} ${new URL(url).pathname}`;
    calls.push(key);
    const route = routes[key];
    if (!route) {
      throw new Error(`no stub route for ${key}`);
    }
    const requestBody = init?.body ? JSON.parse(String(init.body)) : undefined;
    const { status = 200, body } = route(requestBody);
    return makeResponse(status, body);
  };
  return { fetch: fetchFn, calls };
}

export function makeResponse(status: number, body: unknown): HttpResponse {
  return {
    ok: status >= 200 && status < 300,
    status,
    json: async () => body,
  };
}

export function summaryPayload(overrides: Record<string, unknown> = {}): Record<string, unknown> {
  return {
    session_id: "s1",
    testing_type: "SAST",
    finding_count: 0,
    clusters: {},
    unassigned_count: 0,
    review_item_count: 0,
    created_at: "2026-01-01T00:00:00+00:00",
    updated_at: "2026-01-01T00:00:00+00:00",
    ...overrides,
  };
}

export const BUILTIN_REASONS_STUB = [
  { reason_id: 2, text: "Tools phrase the same issue differently", builtin: true },
  { reason_id: 7, text: "Finding text over-specifies the exact location of occurrence", builtin: true },
];

// ---------------------------------------------------------------------------
// real service process for the end-to-end test
// ---------------------------------------------------------------------------

export interface ServiceHandle {
  base: string;
  stop: () => void;
}

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const server = net.createServer();
    server.once("error", reject);
    server.listen(0, "127.0.0.1", () => {
      const address = server.address();
      if (address === null || typeof address === "string") {
        reject(new Error("no port assigned"));
        return;
      }
      server.close(() => resolve(address.port));
    });
  });
}

async function waitForHealth(base: string, deadlineMs: number): Promise<void> {
  const start = Date.now();
  while (Date.now() - start < deadlineMs) {
    try {
      const response = await fetch(`${base}/health`);
      if (response.ok) {
        return;
      }
    } catch {
      // not listening yet
    }
    await new Promise((resolve) => setTimeout(resolve, 100));
  }
  throw new Error(`annotation service at ${base} did not come up`);
}

export async function startService(): Promise<ServiceHandle> {
  const port = await freePort();
  const dataDir = mkdtempSync(join(tmpdir(), "annotator-e2e-"));
  const child: ChildProcess = spawn(
    "secdedup",
    ["serve", "--serve-addr", `127.0.0.1:${port}`, "--data-dir", dataDir],
    { stdio: "ignore" },
  );
  const base = `http://127.0.0.1:${port}`;
  try {
    await waitForHealth(base, 15_000);
  } catch (error) {
    child.kill();
    throw error;
  }
  return { base, stop: () => child.kill() };
}
