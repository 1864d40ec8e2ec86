/** DOM wiring for the annotator.
 *
 * The static skeleton is created once; dynamic regions (lists, panels,
 * banner) are rebuilt from the store on every state change. User text is
 * always inserted through textContent, never through markup.
 *
 * Assignment is keyboard-first: tick findings, type a cluster name in the
 * type-ahead input (existing names are offered through a datalist) and press
 * Enter. The input keeps focus so consecutive assigns need no mouse.
 */

import type { AnnotationApi } from "./api.js";
import { reasonCountsCsv } from "./csv.js";
import { AnnotatorStore, VERDICTS, type ViewState } from "./state.js";

export interface AppHandles {
  store: AnnotatorStore;
  root: HTMLElement;
}

const SKELETON = `
<header>
  <h1>secdedup annotator</h1>
  <div id="session-info">no session</div>
  <div id="banner" role="alert" hidden></div>
</header>
<section id="create-section">
  <h2>Session</h2>
  <textarea id="dataset-input" rows="6"
    placeholder='paste dataset JSON: {"testing_type": "SAST", "findings": [...]}'></textarea>
  <button id="create-session" type="button">Start session</button>
</section>
<section id="assign-section">
  <div class="columns">
    <div class="column">
      <h2>Unassigned findings</h2>
      <ul id="unassigned-list"></ul>
      <input id="cluster-name" list="cluster-names" autocomplete="off"
        placeholder="cluster name (Enter assigns)">
      <datalist id="cluster-names"></datalist>
      <button id="assign-button" type="button">Assign selected</button>
    </div>
    <div class="column">
      <h2>Named clusters</h2>
      <ul id="clusters-panel"></ul>
      <button id="export-button" type="button">Export ground truth</button>
      <pre id="export-output" hidden></pre>
    </div>
  </div>
</section>
<section id="review-section">
  <h2>Review</h2>
  <textarea id="predicted-input" rows="4"
    placeholder='predicted cluster set JSON: {"origin": "predicted", "clusters": [[...]]}'></textarea>
  <button id="open-review" type="button">Open review</button>
  <div id="review-item"></div>
  <div id="review-controls" hidden>
    <select id="verdict-select">
      <option value="">choose a verdict</option>
      <option value="incorrect">incorrect prediction</option>
      <option value="correct_annotation_error">correct, annotation error</option>
    </select>
    <div id="reason-picker"></div>
    <button id="tag-button" type="button">Tag and advance</button>
  </div>
  <div id="review-summary"></div>
  <pre id="csv-output" hidden></pre>
  <a id="csv-download" download="reason_counts.csv" hidden>Download reason counts CSV</a>
</section>
`;

function byId<T extends HTMLElement>(root: HTMLElement, id: string): T {
  const node = root.querySelector(`#${id}`);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function listItem(text: string): HTMLLIElement {
  const li = document.createElement("li");
  li.textContent = text;
  return li;
}

export function mountApp(root: HTMLElement, api: AnnotationApi): AppHandles {
  root.innerHTML = SKELETON;
  const store = new AnnotatorStore(api);

  const banner = byId<HTMLDivElement>(root, "banner");
  const sessionInfo = byId<HTMLDivElement>(root, "session-info");
  const datasetInput = byId<HTMLTextAreaElement>(root, "dataset-input");
  const unassignedList = byId<HTMLUListElement>(root, "unassigned-list");
  const clusterNameInput = byId<HTMLInputElement>(root, "cluster-name");
  const clusterNames = byId<HTMLDataListElement>(root, "cluster-names");
  const clustersPanel = byId<HTMLUListElement>(root, "clusters-panel");
  const exportOutput = byId<HTMLPreElement>(root, "export-output");
  const predictedInput = byId<HTMLTextAreaElement>(root, "predicted-input");
  const reviewItem = byId<HTMLDivElement>(root, "review-item");
  const reviewControls = byId<HTMLDivElement>(root, "review-controls");
  const verdictSelect = byId<HTMLSelectElement>(root, "verdict-select");
  const reasonPicker = byId<HTMLDivElement>(root, "reason-picker");
  const reviewSummary = byId<HTMLDivElement>(root, "review-summary");
  const csvOutput = byId<HTMLPreElement>(root, "csv-output");
  const csvDownload = byId<HTMLAnchorElement>(root, "csv-download");

  function selectedFindingIds(): number[] {
    const boxes = unassignedList.querySelectorAll<HTMLInputElement>("input:checked");
    return [...boxes].map((box) => Number(box.dataset.id));
  }

  function renderSessionInfo(state: ViewState): void {
    if (state.sessionId === null) {
      sessionInfo.textContent = "no session";
      return;
    }
    sessionInfo.textContent =
      `session ${state.sessionId} / ${state.testingType} / ` +
      `${state.findingCount} findings, ${state.unassigned.length} unassigned`;
  }

  function renderUnassigned(state: ViewState): void {
    unassignedList.replaceChildren();
    for (const finding of state.unassigned) {
      const li = document.createElement("li");
      const label = document.createElement("label");
      const box = document.createElement("input");
      box.type = "checkbox";
      box.dataset.id = String(finding.id);
      label.append(box, ` [${finding.tool}] ${finding.text}`);
      li.append(label);
      unassignedList.append(li);
    }
  }

  function renderClusters(state: ViewState): void {
    clusterNames.replaceChildren();
    clustersPanel.replaceChildren();
    for (const name of Object.keys(state.clusters).sort()) {
      const option = document.createElement("option");
      option.value = name;
      clusterNames.append(option);

      const members = state.clusters[name];
      const li = document.createElement("li");
      const heading = document.createElement("strong");
      heading.textContent = `${name} (${members.length})`;
      const memberList = document.createElement("ul");
      for (const id of members) {
        memberList.append(listItem(store.findingText(id)));
      }
      li.append(heading, memberList);
      clustersPanel.append(li);
    }
  }

  function renderReview(state: ViewState): void {
    reviewItem.replaceChildren();
    const item = store.currentItem();
    if (item === null) {
      reviewControls.hidden = true;
      if (state.reviewItems.length > 0) {
        reviewItem.append(listItem(`all ${state.reviewItems.length} items tagged`));
      }
      return;
    }
    reviewControls.hidden = false;

    const counter = document.createElement("p");
    counter.textContent = `item ${state.reviewIndex + 1} of ${state.reviewItems.length}`;
    const columns = document.createElement("div");
    columns.className = "columns";
    const predicted = document.createElement("div");
    predicted.className = "column";
    const predictedHeading = document.createElement("h3");
    predictedHeading.textContent = "predicted cluster";
    const predictedList = document.createElement("ul");
    for (const id of item.predicted_cluster) {
      predictedList.append(listItem(store.findingText(id)));
    }
    predicted.append(predictedHeading, predictedList);

    const matched = document.createElement("div");
    matched.className = "column";
    const matchedHeading = document.createElement("h3");
    matchedHeading.textContent = "closest ground-truth cluster";
    matched.append(matchedHeading);
    if (item.matched_truth === null) {
      matched.append(listItem("no overlapping ground-truth cluster"));
    } else {
      const matchedList = document.createElement("ul");
      for (const id of item.matched_truth) {
        matchedList.append(listItem(store.findingText(id)));
      }
      matched.append(matchedList);
    }
    columns.append(predicted, matched);
    reviewItem.append(counter, columns);
  }

  function renderReasons(state: ViewState): void {
    reasonPicker.replaceChildren();
    for (const reason of state.reasons) {
      const label = document.createElement("label");
      const box = document.createElement("input");
      box.type = "checkbox";
      box.dataset.reasonId = String(reason.reason_id);
      label.append(box, ` ${reason.reason_id}. ${reason.text}`);
      reasonPicker.append(label);
    }
  }

  function renderSummary(state: ViewState): void {
    reviewSummary.replaceChildren();
    const summary = state.reviewSummary;
    if (summary === null) {
      csvOutput.hidden = true;
      csvDownload.hidden = true;
      return;
    }
    const heading = document.createElement("p");
    heading.textContent =
      `review complete: ${summary.tagged} tagged, ${summary.pending} pending ` +
      `of ${summary.total_items}`;
    const counts = document.createElement("ul");
    for (const row of summary.reasons) {
      counts.append(listItem(`${row.reason_id}. ${row.text}: ${row.count}`));
    }
    reviewSummary.append(heading, counts);

    const csv = reasonCountsCsv(summary);
    csvOutput.textContent = csv;
    csvOutput.hidden = false;
    csvDownload.href = "data:text/csv;charset=utf-8," + encodeURIComponent(csv);
    csvDownload.hidden = false;
  }

  function render(): void {
    const state = store.getState();
    banner.hidden = state.banner === null;
    banner.textContent = state.banner ?? "";
    renderSessionInfo(state);
    renderUnassigned(state);
    renderClusters(state);
    renderReview(state);
    renderReasons(state);
    renderSummary(state);
  }

  function doAssign(): void {
    void store
      .assignSelection(selectedFindingIds(), clusterNameInput.value)
      .then((ok) => {
        if (ok) {
          clusterNameInput.select();
        }
      });
  }

  byId<HTMLButtonElement>(root, "create-session").addEventListener("click", () => {
    void store.createSession(datasetInput.value);
  });
  byId<HTMLButtonElement>(root, "assign-button").addEventListener("click", doAssign);
  clusterNameInput.addEventListener("keydown", (event) => {
    if (event.key === "Enter") {
      event.preventDefault();
      doAssign();
    }
  });
  byId<HTMLButtonElement>(root, "export-button").addEventListener("click", () => {
    void store.exportGroundTruth().then((payload) => {
      if (payload !== null) {
        exportOutput.textContent = JSON.stringify(payload, null, 1);
        exportOutput.hidden = false;
      }
    });
  });
  byId<HTMLButtonElement>(root, "open-review").addEventListener("click", () => {
    void store.openReview(predictedInput.value);
  });
  byId<HTMLButtonElement>(root, "tag-button").addEventListener("click", () => {
    const boxes = reasonPicker.querySelectorAll<HTMLInputElement>("input:checked");
    const reasons = [...boxes].map((box) => Number(box.dataset.reasonId));
    void store.tagCurrent(verdictSelect.value, reasons).then((ok) => {
      if (ok) {
        verdictSelect.value = "";
      }
    });
  });

  store.subscribe(render);
  void store.loadReasons();
  render();
  return { store, root };
}

export { VERDICTS };
