import { describe, expect, it } from "vitest";

import type { HistoryEntry, SimulationParameters } from "../src/api.js";
import { WIZARD_STEPS, WizardState, prefillFromHistory } from "../src/wizard.js";

function completedThrough(state: WizardState, step: string): void {
  for (const s of WIZARD_STEPS) {
    state.markComplete(s);
    if (s === step) break;
  }
}

describe("WizardState", () => {
  it("starts at upload with everything later locked", () => {
    const state = new WizardState();
    expect(state.current).toBe("upload");
    expect(state.canEnter("upload")).toBe(true);
    for (const step of WIZARD_STEPS.slice(1)) {
      expect(state.canEnter(step)).toBe(false);
    }
  });

  it("unlocks a step only when all prior steps are complete", () => {
    const state = new WizardState();
    state.markComplete("upload");
    expect(state.canEnter("time")).toBe(true);
    expect(state.canEnter("occupancy")).toBe(false);
    state.markComplete("time");
    expect(state.canEnter("occupancy")).toBe(true);
    expect(state.canEnter("room")).toBe(false);
  });

  it("goTo refuses locked steps", () => {
    const state = new WizardState();
    expect(state.goTo("room")).toBe(false);
    expect(state.current).toBe("upload");
    state.markComplete("upload");
    expect(state.goTo("time")).toBe(true);
    expect(state.current).toBe("time");
  });

  it("results requires a finished run, not just prior completion", () => {
    const state = new WizardState();
    completedThrough(state, "simulation");
    expect(state.canEnter("results")).toBe(false);
    state.setRunStatus("running");
    expect(state.canEnter("results")).toBe(false);
    state.setRunStatus("done");
    expect(state.canEnter("results")).toBe(true);
  });

  it("a failed run locks results again", () => {
    const state = new WizardState();
    completedThrough(state, "simulation");
    state.setRunStatus("done");
    expect(state.canEnter("results")).toBe(true);
    state.setRunStatus("failed");
    expect(state.canEnter("results")).toBe(false);
  });

  it("invalidating an early step cascades to later steps", () => {
    const state = new WizardState();
    completedThrough(state, "room");
    state.goTo("room");
    state.markIncomplete("time");
    expect(state.isComplete("time")).toBe(false);
    expect(state.isComplete("occupancy")).toBe(false);
    expect(state.isComplete("room")).toBe(false);
    expect(state.current).toBe("time");
  });

  it("nextStep walks the bar in order", () => {
    const state = new WizardState();
    expect(state.nextStep()).toBeNull();
    state.markComplete("upload");
    expect(state.nextStep()).toBe("time");
  });

  it("reset returns to a blank wizard", () => {
    const state = new WizardState();
    completedThrough(state, "simulation");
    state.simulationId = "abc";
    state.setRunStatus("done");
    state.reset();
    expect(state.simulationId).toBeNull();
    expect(state.current).toBe("upload");
    expect(state.canEnter("time")).toBe(false);
  });
});

describe("prefillFromHistory", () => {
  const entry: HistoryEntry = {
    id: "parent1",
    created_at: "2024-01-01T00:00:00Z",
    status: "done",
    engine: "surrogate",
    room: { width: 4, depth: 5, height: 3, orientation: 90, infiltration_ach: 0.5 },
    parent_id: null,
    error: null,
  };

  it("copies full parameters when available", () => {
    const parameters: SimulationParameters = {
      room: { width: 6, depth: 4, height: 2.8, orientation: 180, infiltration_ach: 1 },
      run_period: { begin: "2021-05-02", end: "2021-05-03" },
      step_minutes: 15,
      engine: "surrogate",
    };
    const prefill = prefillFromHistory(entry, parameters);
    expect(prefill.parentId).toBe("parent1");
    expect(prefill.room).toEqual(parameters.room);
    expect(prefill.runPeriod).toEqual(parameters.run_period);
    expect(prefill.stepMinutes).toBe(15);
  });

  it("falls back to the summary room", () => {
    const prefill = prefillFromHistory(entry, null);
    expect(prefill.room?.orientation).toBe(90);
    expect(prefill.runPeriod).toBeUndefined();
  });
});
