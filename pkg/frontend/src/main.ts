/**
 * Single-page wizard over the simulation REST API.
 *
 * Routes: #/wizard (default) and #/history.  All validation messages come
 * from backend responses; the UI only tracks which milestones are reached.
 */

import { ApiClient, ApiError } from "./api.js";
import type { SimulationParameters, SimulationStatus } from "./api.js";
import { ResultCharts } from "./charts.js";
import {
  PLOT_FACTORS,
  emptyGrid,
  fillInterval,
  gridToCsv,
  parseResultCsv,
} from "./csv.js";
import { buildScene, windowCount } from "./geometry.js";
import { PollAborted, pollUntil } from "./polling.js";
import { RoomViewer } from "./viewer3d.js";
import { WIZARD_STEPS, WizardState, prefillFromHistory } from "./wizard.js";
import type { WizardStep } from "./wizard.js";

declare global {
  interface Window {
    ROOMSIM_API?: string;
  }
}

const apiBase =
  new URLSearchParams(location.search).get("api") ??
  window.ROOMSIM_API ??
  "http://127.0.0.1:8000";
const api = new ApiClient(apiBase);
const wizard = new WizardState();

const STEP_LABELS: Record<WizardStep, string> = {
  upload: "Upload",
  time: "Time",
  occupancy: "Occupancy",
  room: "Room",
  simulation: "Simulation",
  results: "Results",
};

const app = document.getElementById("app")!;
let viewer: RoomViewer | null = null;
let charts: ResultCharts | null = null;
let pollController: AbortController | null = null;

// form state carried between steps until POSTed as parameters
const draft = {
  begin: "2021-05-02",
  end: "2021-05-02",
  stepMinutes: 10,
  room: { width: 4, depth: 5, height: 3, orientation: 0, infiltration_ach: 0.5 },
  engine: "surrogate" as SimulationParameters["engine"],
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

function notice(kind: "error" | "info", message: string): HTMLElement {
  return el("div", { class: `notice ${kind}` }, message);
}

function describeError(error: unknown): string {
  if (error instanceof ApiError) return `${error.message} (${error.code})`;
  if (error instanceof Error) return error.message;
  return String(error);
}

function cancelBackgroundWork(): void {
  pollController?.abort();
  pollController = null;
  viewer?.dispose();
  viewer = null;
  charts?.clear();
  charts = null;
}

// -- navigation --------------------------------------------------------------

function renderNav(): HTMLElement {
  const bar = el("nav", { class: "steps" });
  for (const step of WIZARD_STEPS) {
    const button = el("button", {}, STEP_LABELS[step]);
    button.classList.toggle("active", wizard.current === step);
    button.classList.toggle("complete", wizard.isComplete(step));
    button.disabled = !wizard.canEnter(step);
    button.onclick = () => {
      if (wizard.goTo(step)) renderWizard();
    };
    bar.append(button);
  }
  const history = el("button", { class: "history-link" }, "History");
  history.onclick = () => {
    location.hash = "#/history";
  };
  bar.append(history);
  return bar;
}

// -- steps -------------------------------------------------------------------

async function ensureSimulation(): Promise<string> {
  if (!wizard.simulationId) {
    const record = await api.createSimulation();
    wizard.simulationId = record.id;
  }
  return wizard.simulationId;
}

function renderUploadStep(panel: HTMLElement): void {
  panel.append(
    el("h2", {}, "Upload the base model and weather"),
    el("p", {}, "The initial IDF defines constructions and the original window size."),
  );
  const status = el("div", {});
  const makeRow = (kind: "idf" | "weather", label: string, accept: string) => {
    const input = el("input", { type: "file", accept }) as HTMLInputElement;
    const button = el("button", {}, `Upload ${label}`);
    const state = el("span", { class: "upload-state" }, "not uploaded");
    button.onclick = async () => {
      const file = input.files?.[0];
      if (!file) return;
      status.replaceChildren();
      try {
        const id = await ensureSimulation();
        await api.uploadInput(id, kind, file);
        state.textContent = `uploaded: ${file.name}`;
        state.classList.add("ok");
        const record = await api.getSimulation(id);
        if (record.inputs.idf && record.inputs.weather) {
          wizard.markComplete("upload");
        }
        renderWizard();
      } catch (error) {
        status.replaceChildren(notice("error", describeError(error)));
      }
    };
    return el("div", { class: "upload-row" }, el("label", {}, label), input, button, state);
  };
  panel.append(
    makeRow("idf", "room model (IDF)", ".idf"),
    makeRow("weather", "weather file (EPW)", ".epw"),
    status,
  );
}

function renderTimeStep(panel: HTMLElement): void {
  panel.append(el("h2", {}, "Simulated time range"));
  const begin = el("input", { type: "date", value: draft.begin }) as HTMLInputElement;
  const end = el("input", { type: "date", value: draft.end }) as HTMLInputElement;
  const step = el("select", {}) as HTMLSelectElement;
  for (const minutes of [1, 5, 10, 15, 20, 30, 60]) {
    const option = el("option", { value: String(minutes) }, `${minutes} min`);
    if (minutes === draft.stepMinutes) option.setAttribute("selected", "");
    step.append(option);
  }
  const status = el("div", {});
  const apply = el("button", {}, "Set time range");
  apply.onclick = () => {
    if (!begin.value || !end.value || begin.value > end.value) {
      status.replaceChildren(notice("error", "begin must not be after end"));
      return;
    }
    draft.begin = begin.value;
    draft.end = end.value;
    draft.stepMinutes = Number(step.value);
    wizard.markComplete("time");
    renderWizard();
  };
  panel.append(
    el("div", { class: "form-row" }, el("label", {}, "Begin"), begin),
    el("div", { class: "form-row" }, el("label", {}, "End"), end),
    el("div", { class: "form-row" }, el("label", {}, "Step"), step),
    apply,
    status,
  );
}

function renderOccupancyStep(panel: HTMLElement): void {
  panel.append(
    el("h2", {}, "Occupancy and window state"),
    el("p", {}, "Upload a CSV (timestamp,occupancy[,window]) or define one interval manually."),
  );
  const status = el("div", {});

  const file = el("input", { type: "file", accept: ".csv" }) as HTMLInputElement;
  const uploadButton = el("button", {}, "Upload CSV");
  uploadButton.onclick = async () => {
    const chosen = file.files?.[0];
    if (!chosen) return;
    status.replaceChildren();
    try {
      const id = await ensureSimulation();
      await api.uploadInput(id, "occupancy", chosen);
      wizard.markComplete("occupancy");
      renderWizard();
    } catch (error) {
      status.replaceChildren(notice("error", describeError(error)));
    }
  };

  const occupants = el("input", { type: "number", value: "2", min: "0" }) as HTMLInputElement;
  const from = el("input", { type: "time", value: "08:00" }) as HTMLInputElement;
  const to = el("input", { type: "time", value: "17:00" }) as HTMLInputElement;
  const windowOpen = el("input", { type: "checkbox" }) as HTMLInputElement;
  const gridButton = el("button", {}, "Generate and upload");
  gridButton.onclick = async () => {
    status.replaceChildren();
    try {
      const days =
        (Date.parse(draft.end) - Date.parse(draft.begin)) / 86_400_000 + 1;
      const grid = emptyGrid(draft.begin, draft.stepMinutes, days);
      const [fh, fm] = from.value.split(":").map(Number);
      const [th, tm] = to.value.split(":").map(Number);
      for (let day = 0; day < days; day++) {
        fillInterval(
          grid,
          day,
          fh * 60 + fm,
          th * 60 + tm,
          Number(occupants.value),
          windowOpen.checked ? 1 : 0,
        );
      }
      const id = await ensureSimulation();
      await api.uploadInput(id, "occupancy", gridToCsv(grid));
      wizard.markComplete("occupancy");
      renderWizard();
    } catch (error) {
      status.replaceChildren(notice("error", describeError(error)));
    }
  };

  panel.append(
    el("div", { class: "upload-row" }, el("label", {}, "CSV file"), file, uploadButton),
    el("h3", {}, "or define manually"),
    el("div", { class: "form-row" }, el("label", {}, "Occupants"), occupants),
    el("div", { class: "form-row" }, el("label", {}, "From"), from),
    el("div", { class: "form-row" }, el("label", {}, "Until"), to),
    el("div", { class: "form-row" }, el("label", {}, "Window open"), windowOpen),
    gridButton,
    status,
  );
}

function numberInput(value: number, step = "0.1"): HTMLInputElement {
  return el("input", { type: "number", value: String(value), step }) as HTMLInputElement;
}

function renderRoomStep(panel: HTMLElement): void {
  panel.append(el("h2", {}, "Room parameters"));
  if (wizard.prefill.room) {
    Object.assign(draft.room, wizard.prefill.room);
    if (wizard.prefill.engine) draft.engine = wizard.prefill.engine;
    wizard.prefill = {};
    panel.append(notice("info", "Parameters pre-filled from the selected run."));
  }
  const width = numberInput(draft.room.width);
  const depth = numberInput(draft.room.depth);
  const height = numberInput(draft.room.height);
  const orientation = numberInput(draft.room.orientation, "1");
  const infiltration = numberInput(draft.room.infiltration_ach, "0.05");
  const engine = el("select", {}) as HTMLSelectElement;
  for (const name of ["surrogate", "energyplus"]) {
    const option = el("option", { value: name }, name);
    if (name === draft.engine) option.setAttribute("selected", "");
    engine.append(option);
  }
  const status = el("div", {});
  const windowInfo = el("div", { class: "window-info" });
  const viewerBox = el("div", { class: "viewer" });

  const apply = el("button", {}, "Apply parameters");
  apply.onclick = async () => {
    status.replaceChildren();
    draft.room = {
      width: Number(width.value),
      depth: Number(depth.value),
      height: Number(height.value),
      orientation: Number(orientation.value),
      infiltration_ach: Number(infiltration.value),
    };
    draft.engine = engine.value as SimulationParameters["engine"];
    try {
      const id = await ensureSimulation();
      await api.configure(id, {
        room: draft.room,
        run_period: { begin: draft.begin, end: draft.end },
        step_minutes: draft.stepMinutes,
        engine: draft.engine,
      });
      wizard.markComplete("room");
      wizard.setRunStatus(null);
      const view = await api.geometry(id);
      windowInfo.textContent =
        `${view.surfaces.length} surfaces, ${windowCount(view)} window(s), ` +
        `north axis ${view.north_axis}°`;
      if (!viewer) viewer = new RoomViewer(viewerBox);
      viewer.setScene(buildScene(view));
      renderNavOnly();
    } catch (error) {
      status.replaceChildren(notice("error", describeError(error)));
    }
  };

  panel.append(
    el("div", { class: "form-row" }, el("label", {}, "Width (m, facade)"), width),
    el("div", { class: "form-row" }, el("label", {}, "Depth (m)"), depth),
    el("div", { class: "form-row" }, el("label", {}, "Height (m)"), height),
    el("div", { class: "form-row" }, el("label", {}, "Orientation (° from north)"), orientation),
    el("div", { class: "form-row" }, el("label", {}, "Infiltration (ACH)"), infiltration),
    el("div", { class: "form-row" }, el("label", {}, "Engine"), engine),
    apply,
    status,
    windowInfo,
    viewerBox,
  );
}

function renderSimulationStep(panel: HTMLElement): void {
  panel.append(el("h2", {}, "Run the simulation"));
  const status = el("div", { class: "run-status" }, `status: ${wizard.status ?? "ready"}`);
  const log = el("pre", { class: "error-log" });
  const run = el("button", {}, "Start simulation");
  run.onclick = async () => {
    const id = wizard.simulationId;
    if (!id) return;
    log.textContent = "";
    run.disabled = true;
    pollController?.abort();
    pollController = new AbortController();
    try {
      await api.run(id);
      wizard.setRunStatus("running");
      status.textContent = "status: running";
      const final = await pollUntil(
        () => api.status(id),
        (s) => s.status === "done" || s.status === "failed",
        { intervalMs: 1000, signal: pollController.signal },
      );
      wizard.setRunStatus(final.status as SimulationStatus);
      status.textContent = `status: ${final.status}`;
      if (final.status === "failed" && final.error) log.textContent = final.error;
      renderNavOnly();
    } catch (error) {
      if (!(error instanceof PollAborted)) {
        status.textContent = "status: request failed";
        log.textContent = describeError(error);
      }
    } finally {
      run.disabled = false;
    }
  };
  panel.append(run, status, log);
}

async function renderResultsStep(panel: HTMLElement): Promise<void> {
  panel.append(el("h2", {}, "Results"));
  const id = wizard.simulationId;
  if (!id) return;
  const downloads = el(
    "div",
    { class: "downloads" },
    el("a", { href: api.resultUrl(id, "csv"), download: "result.csv" }, "Download CSV"),
    " ",
    el("a", { href: api.resultUrl(id, "eso"), download: "result.eso" }, "Download ESO"),
  );
  const picker = el("div", { class: "factor-picker" });
  const chartBox = el("div", { class: "charts" });
  panel.append(downloads, picker, chartBox);
  try {
    const series = parseResultCsv(await api.resultCsv(id));
    charts = new ResultCharts(chartBox);
    const selected = new Set(PLOT_FACTORS.slice(0, 3).map((f) => f.column));
    const redraw = () => charts!.render(series, PLOT_FACTORS
      .map((f) => f.column)
      .filter((c) => selected.has(c)));
    for (const factor of PLOT_FACTORS) {
      const checkbox = el("input", { type: "checkbox" }) as HTMLInputElement;
      checkbox.checked = selected.has(factor.column);
      checkbox.onchange = () => {
        if (checkbox.checked) selected.add(factor.column);
        else selected.delete(factor.column);
        redraw();
      };
      picker.append(el("label", { class: "factor" }, checkbox, factor.label));
    }
    redraw();
  } catch (error) {
    panel.append(notice("error", describeError(error)));
  }
}

// -- history -----------------------------------------------------------------

async function renderHistory(): Promise<void> {
  cancelBackgroundWork();
  app.replaceChildren(el("h1", {}, "Simulation history"));
  const back = el("button", {}, "Back to wizard");
  back.onclick = () => {
    location.hash = "#/wizard";
  };
  app.append(back);
  try {
    const entries = await api.history();
    if (entries.length === 0) {
      app.append(el("p", {}, "No simulations yet."));
      return;
    }
    const table = el("table", { class: "history" });
    table.append(
      el(
        "tr",
        {},
        ...["Created", "Id", "Status", "Engine", "Room", "Actions"].map((h) =>
          el("th", {}, h),
        ),
      ),
    );
    for (const entry of entries.slice().reverse()) {
      const room = entry.room
        ? `${entry.room.width}×${entry.room.depth}×${entry.room.height} m, ` +
          `${entry.room.orientation}°, ${entry.room.infiltration_ach} ACH`
        : "—";
      const actions = el("td", {});
      const rerunButton = el("button", {}, "Re-run with modifications");
      rerunButton.disabled = !(entry.status === "done" || entry.status === "failed");
      rerunButton.onclick = async () => {
        try {
          const record = await api.getSimulation(entry.id);
          wizard.reset();
          wizard.simulationId = null;
          wizard.prefill = prefillFromHistory(entry, record.parameters);
          if (record.parameters) {
            draft.begin = record.parameters.run_period.begin;
            draft.end = record.parameters.run_period.end;
            draft.stepMinutes = record.parameters.step_minutes;
          }
          location.hash = "#/wizard";
        } catch (error) {
          alert(describeError(error));
        }
      };
      actions.append(rerunButton);
      if (entry.status === "done") {
        actions.append(
          " ",
          el("a", { href: api.resultUrl(entry.id, "csv"), download: "result.csv" }, "CSV"),
        );
      }
      table.append(
        el(
          "tr",
          {},
          el("td", {}, entry.created_at.slice(0, 19)),
          el("td", { class: "mono" }, entry.id),
          el("td", { class: `status-${entry.status}` }, entry.status),
          el("td", {}, entry.engine ?? "—"),
          el("td", {}, room),
          actions,
        ),
      );
    }
    app.append(table);
  } catch (error) {
    app.append(notice("error", describeError(error)));
  }
}

// -- wiring ------------------------------------------------------------------

function renderNavOnly(): void {
  const nav = app.querySelector("nav.steps");
  if (nav) nav.replaceWith(renderNav());
}

function renderWizard(): void {
  cancelBackgroundWork();
  app.replaceChildren(el("h1", {}, "Room Simulator"), renderNav());
  const panel = el("section", { class: "panel" });
  app.append(panel);
  switch (wizard.current) {
    case "upload":
      renderUploadStep(panel);
      break;
    case "time":
      renderTimeStep(panel);
      break;
    case "occupancy":
      renderOccupancyStep(panel);
      break;
    case "room":
      renderRoomStep(panel);
      break;
    case "simulation":
      renderSimulationStep(panel);
      break;
    case "results":
      void renderResultsStep(panel);
      break;
  }
}

function route(): void {
  if (location.hash.startsWith("#/history")) {
    void renderHistory();
  } else {
    renderWizard();
  }
}

window.addEventListener("hashchange", route);
route();
