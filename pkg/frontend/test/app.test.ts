import { beforeEach, describe, expect, it } from "vitest";

import { AnnotationApi } from "../src/api.js";
import { mountApp, type AppHandles } from "../src/app.js";
import {
  BUILTIN_REASONS_STUB,
  stubFetch,
  summaryPayload,
  type StubRoutes,
} from "./helpers.js";

const DATASET_TEXT = JSON.stringify({ testing_type: "SAST", findings: [] });

function mountWith(routes: StubRoutes): { handles: AppHandles; calls: string[] } {
  document.body.innerHTML = '<div id="app"></div>';
  const { fetch, calls } = stubFetch({
    "GET /reasons": () => ({ body: { reasons: BUILTIN_REASONS_STUB } }),
    ...routes,
  });
  const root = document.getElementById("app") as HTMLElement;
  const handles = mountApp(root, new AnnotationApi("http://host", fetch));
  return { handles, calls };
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function twoFindingServer(): StubRoutes {
  const clusters: Record<string, number[]> = {};
  const placed = new Map<number, string>();
  return {
    "POST /sessions": () => ({ body: summaryPayload({ finding_count: 2, unassigned_count: 2 }) }),
    "GET /sessions/s1": () => ({
      body: summaryPayload({
        finding_count: 2,
        clusters: structuredClone(clusters),
        unassigned_count: 2 - placed.size,
      }),
    }),
    "GET /sessions/s1/findings": () => ({
      body: {
        findings: [1, 2].map((id) => ({
          id,
          tool: "semgrep",
          text: `Finding number ${id}.`,
          cluster: placed.get(id) ?? null,
        })),
      },
    }),
    "POST /sessions/s1/assign": (body) => {
      const { cluster_name, finding_ids } = body as {
        cluster_name: string;
        finding_ids: number[];
      };
      clusters[cluster_name] = [...(clusters[cluster_name] ?? []), ...finding_ids];
      for (const id of finding_ids) placed.set(id, cluster_name);
      return { body: summaryPayload({ finding_count: 2, clusters: structuredClone(clusters) }) };
    },
  };
}

async function createSessionThroughDom(handles: AppHandles): Promise<void> {
  el<HTMLTextAreaElement>("dataset-input").value = DATASET_TEXT;
  el<HTMLButtonElement>("create-session").click();
  await handles.store.idle();
}

describe("mounted app", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
  });

  it("renders unassigned findings with tool-prefixed text after session start", async () => {
    const { handles } = mountWith(twoFindingServer());
    await createSessionThroughDom(handles);

    const items = [...document.querySelectorAll("#unassigned-list li")];
    expect(items).toHaveLength(2);
    expect(items[0].textContent).toContain("[semgrep] Finding number 1.");
    expect(el("session-info").textContent).toContain("2 findings, 2 unassigned");
  });

  it("assigns the checked findings when Enter is pressed in the name input", async () => {
    const { handles } = mountWith(twoFindingServer());
    await createSessionThroughDom(handles);

    for (const box of document.querySelectorAll<HTMLInputElement>("#unassigned-list input")) {
      box.checked = true;
    }
    const nameInput = el<HTMLInputElement>("cluster-name");
    nameInput.value = "alpha";
    nameInput.dispatchEvent(new window.KeyboardEvent("keydown", { key: "Enter" }));
    await handles.store.idle();

    expect(handles.store.getState().clusters).toEqual({ alpha: [1, 2] });
    const panel = el("clusters-panel");
    expect(panel.textContent).toContain("alpha (2)");
    expect(panel.textContent).toContain("[semgrep] Finding number 1.");
    expect(document.querySelectorAll("#unassigned-list li")).toHaveLength(0);
    expect(document.querySelectorAll("#cluster-names option")).toHaveLength(1);
  });

  it("keeps the banner hidden until a request fails, then shows the code", async () => {
    const routes = twoFindingServer();
    routes["POST /sessions/s1/assign"] = () => ({
      status: 404,
      body: { error: "UnknownFinding", detail: [7] },
    });
    const { handles } = mountWith(routes);
    await createSessionThroughDom(handles);

    const banner = el<HTMLDivElement>("banner");
    expect(banner.hidden).toBe(true);

    const box = document.querySelector<HTMLInputElement>("#unassigned-list input");
    (box as HTMLInputElement).checked = true;
    el<HTMLInputElement>("cluster-name").value = "alpha";
    el<HTMLButtonElement>("assign-button").click();
    await handles.store.idle();

    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toContain("UnknownFinding");
    expect(el("clusters-panel").textContent).not.toContain("alpha");
  });

  it("blocks an empty selection client side without calling the server", async () => {
    const { handles, calls } = mountWith(twoFindingServer());
    await createSessionThroughDom(handles);
    calls.length = 0;

    el<HTMLInputElement>("cluster-name").value = "alpha";
    el<HTMLButtonElement>("assign-button").click();
    await handles.store.idle();

    expect(el("banner").textContent).toBe("select at least one finding");
    expect(calls).toEqual([]);
  });

  it("shows the reason picker from the catalog and blocks tagging with none picked", async () => {
    const routes = twoFindingServer();
    routes["POST /sessions/s1/review"] = () => ({
      body: {
        items: [
          { predicted_cluster: [1], matched_truth: [1, 2], verdict: "pending", reasons: [] },
        ],
      },
    });
    const { handles, calls } = mountWith(routes);
    await createSessionThroughDom(handles);

    el<HTMLTextAreaElement>("predicted-input").value =
      '{"origin": "predicted", "clusters": [[1], [2]]}';
    el<HTMLButtonElement>("open-review").click();
    await handles.store.idle();

    expect(document.querySelectorAll("#reason-picker input")).toHaveLength(
      BUILTIN_REASONS_STUB.length,
    );
    expect(el("review-item").textContent).toContain("item 1 of 1");
    expect(el("review-item").textContent).toContain("[semgrep] Finding number 1.");

    calls.length = 0;
    el<HTMLSelectElement>("verdict-select").value = "incorrect";
    el<HTMLButtonElement>("tag-button").click();
    await handles.store.idle();

    expect(el("banner").textContent).toBe("pick at least one reason");
    expect(calls).toEqual([]);
  });
});
