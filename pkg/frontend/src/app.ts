/** Explorer wiring: run picker, sliders, views, query/evaluate flow. */

import { ApiError, ExplorerClient, FrontPoint, QueryResponse, RunSummary } from "./api.js";
import { PreferenceControls } from "./controls.js";
import { HistoryPanel, HistoryEntry } from "./history.js";
import { ParallelView } from "./parallel.js";
import { viewModeFor } from "./projection.js";
import { ScatterView, Overlay } from "./scatter.js";

const ERROR_BAR_SAMPLES = 8;

function toast(message: string): void {
  const el = document.getElementById("toast")!;
  el.textContent = message;
  el.classList.add("visible");
  window.setTimeout(() => el.classList.remove("visible"), 4000);
}

class ExplorerApp {
  private client: ExplorerClient;
  private runs: RunSummary[] = [];
  private runId: string | null = null;
  private m = 0;
  private front: FrontPoint[] = [];
  private controls: PreferenceControls | null = null;
  private scatter: ScatterView | null = null;
  private parallel: ParallelView | null = null;
  private history: HistoryPanel;
  private lastQuery: { w: number[]; response: QueryResponse; index: number } | null = null;
  private inflight: AbortController | null = null;

  constructor() {
    const base =
      new URLSearchParams(window.location.search).get("api") ??
      (window.location.pathname.startsWith("/ui") ? "" : "http://127.0.0.1:8000");
    this.client = new ExplorerClient(base);
    this.history = new HistoryPanel(
      document.getElementById("history")!,
      (entry) => this.restore(entry)
    );
    document
      .getElementById("query-btn")!
      .addEventListener("click", () => void this.submitQuery());
    document
      .getElementById("evaluate-btn")!
      .addEventListener("click", () => void this.evaluateLast());
    for (const id of ["yaw", "pitch"]) {
      document.getElementById(id)!.addEventListener("input", () => this.updateAngles());
    }
  }

  async start(): Promise<void> {
    try {
      this.runs = await this.client.listRuns();
    } catch (err) {
      toast(`cannot reach service: ${String(err)}`);
      return;
    }
    const select = document.getElementById("run-select") as HTMLSelectElement;
    select.textContent = "";
    for (const run of this.runs.filter((r) => r.status === "ok")) {
      const option = document.createElement("option");
      option.value = run.id;
      option.textContent = `${run.id} (${run.variant ?? "?"})`;
      select.appendChild(option);
    }
    select.addEventListener("change", () => void this.loadRun(select.value));
    if (select.options.length > 0) {
      await this.loadRun(select.options[0].value);
    } else {
      toast("no finished runs under the service root");
    }
  }

  private async loadRun(runId: string): Promise<void> {
    this.runId = runId;
    try {
      this.front = await this.client.front(runId);
    } catch (err) {
      toast(String(err));
      return;
    }
    this.m = this.front.length ? this.front[0].f.length : 0;
    this.lastQuery = null;

    this.controls = new PreferenceControls(
      document.getElementById("sliders")!,
      this.m,
      () => this.controls?.clearErrors()
    );

    const viewHost = document.getElementById("view")!;
    viewHost.textContent = "";
    const modeTag = document.getElementById("view-mode")!;
    const mode = viewModeFor(this.m);
    if (mode === "parallel") {
      this.parallel = new ParallelView(viewHost);
      this.scatter = null;
      this.parallel.setFront(this.front.map((p) => p.f));
      modeTag.textContent = "parallel coordinates";
    } else {
      this.scatter = new ScatterView(viewHost);
      this.parallel = null;
      this.scatter.setFront(this.front.map((p) => p.f));
      modeTag.textContent = mode === "scatter3d" ? "3-D scatter" : "2-D scatter";
      this.updateAngles();
    }
    document.getElementById("angle-controls")!.style.display =
      mode === "scatter3d" ? "block" : "none";
  }

  private updateAngles(): void {
    if (!this.scatter) return;
    const yaw = Number((document.getElementById("yaw") as HTMLInputElement).value);
    const pitch = Number((document.getElementById("pitch") as HTMLInputElement).value);
    this.scatter.setAngles(yaw, pitch);
  }

  private async submitQuery(): Promise<void> {
    if (!this.runId || !this.controls) return;
    const w = this.controls.current();
    this.inflight?.abort();
    this.inflight = new AbortController();
    let response: QueryResponse;
    try {
      response = await this.client.query(this.runId, w, this.inflight.signal);
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") return;
      if (err instanceof ApiError && err.status === 422) {
        this.controls.showError(err.detail);
      } else {
        toast(String(err));
      }
      return;
    }
    this.controls.clearErrors();
    this.renderPrediction(response);
    this.history.add({ w, response });
    this.lastQuery = { w, response, index: this.history.length - 1 };
    await this.overlayPrediction(response);
  }

  private renderPrediction(response: QueryResponse): void {
    const host = document.getElementById("prediction")!;
    host.textContent = "";
    const table = document.createElement("table");
    table.className = "prediction-table";
    const head = table.insertRow();
    ["variable", "mean", "± std", "clamped"].forEach((text) => {
      const th = document.createElement("th");
      th.textContent = text;
      head.appendChild(th);
    });
    response.x_mean.forEach((mean, i) => {
      const row = table.insertRow();
      row.insertCell().textContent = `x${i + 1}`;
      row.insertCell().textContent = mean.toFixed(4);
      row.insertCell().textContent = `± ${response.x_std[i].toFixed(4)}`;
      row.insertCell().textContent = response.clamped_flags[i] ? "yes" : "";
    });
    host.appendChild(table);
  }

  /**
   * Error bars: sample the returned per-variable distribution and push the
   * samples through the evaluate endpoint; fall back to decision-space
   * bars when the problem is not evaluable server-side.
   */
  private async overlayPrediction(response: QueryResponse): Promise<void> {
    if (!this.runId) return;
    const overlays: Overlay[] = [];
    try {
      const center = await this.client.evaluate(this.runId, response.x_mean);
      const samples: number[][] = [];
      for (let s = 0; s < ERROR_BAR_SAMPLES; s++) {
        const x = response.x_mean.map((mean, i) => {
          const u1 = Math.random();
          const u2 = Math.random();
          const gauss =
            Math.sqrt(-2 * Math.log(Math.max(u1, 1e-12))) * Math.cos(2 * Math.PI * u2);
          return Math.min(1, Math.max(0, mean + response.x_std[i] * gauss));
        });
        samples.push(await this.client.evaluate(this.runId, x));
      }
      const m = center.length;
      const lo = center.slice();
      const hi = center.slice();
      for (const f of samples) {
        for (let i = 0; i < m; i++) {
          lo[i] = Math.min(lo[i], f[i]);
          hi[i] = Math.max(hi[i], f[i]);
        }
      }
      overlays.push({ f: center, kind: "predicted", errLow: lo, errHigh: hi });
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        this.renderDecisionBars(response);
        return;
      }
      toast(String(err));
      return;
    }
    this.applyOverlays(overlays);
  }

  private renderDecisionBars(response: QueryResponse): void {
    const host = document.getElementById("prediction")!;
    const note = document.createElement("p");
    note.className = "placeholder";
    note.textContent =
      "problem not evaluable here; uncertainty shown per decision variable above";
    host.appendChild(note);
  }

  private applyOverlays(overlays: Overlay[]): void {
    this.scatter?.setOverlays(overlays);
    this.parallel?.setOverlays(overlays);
  }

  private async evaluateLast(): Promise<void> {
    if (!this.runId || !this.lastQuery) {
      toast("run a query first");
      return;
    }
    try {
      const f = await this.client.evaluate(this.runId, this.lastQuery.response.x_mean);
      this.history.attachEvaluation(this.lastQuery.index, f);
      this.applyOverlays([{ f, kind: "evaluated" }]);
    } catch (err) {
      toast(String(err));
    }
  }

  private restore(entry: HistoryEntry): void {
    this.controls?.set(entry.w);
    this.renderPrediction(entry.response);
  }
}

const app = new ExplorerApp();
void app.start();
