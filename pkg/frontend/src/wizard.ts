/**
 * Wizard navigation state: six steps shown as a navigation bar, where a step
 * is reachable only once every earlier step is complete and Results opens
 * only after a run has finished.  The machine holds no business logic; it
 * just records which backend milestones have been reached.
 */

import type { HistoryEntry, SimulationParameters, SimulationStatus } from "./api.js";

export const WIZARD_STEPS = [
  "upload",
  "time",
  "occupancy",
  "room",
  "simulation",
  "results",
] as const;

export type WizardStep = (typeof WIZARD_STEPS)[number];

export interface WizardPrefill {
  room?: SimulationParameters["room"];
  runPeriod?: SimulationParameters["run_period"];
  stepMinutes?: number;
  engine?: SimulationParameters["engine"];
  parentId?: string;
}

export class WizardState {
  simulationId: string | null = null;
  current: WizardStep = "upload";
  prefill: WizardPrefill = {};
  private done = new Set<WizardStep>();
  private runStatus: SimulationStatus | null = null;

  /** Completion milestones, fed by backend responses. */
  markComplete(step: WizardStep): void {
    this.done.add(step);
  }

  markIncomplete(step: WizardStep): void {
    // invalidating a step invalidates everything after it too
    const index = WIZARD_STEPS.indexOf(step);
    for (const affected of WIZARD_STEPS.slice(index)) {
      this.done.delete(affected);
    }
    if (!this.canEnter(this.current)) this.current = step;
  }

  isComplete(step: WizardStep): boolean {
    return this.done.has(step);
  }

  setRunStatus(status: SimulationStatus | null): void {
    this.runStatus = status;
    if (status === "done") {
      this.done.add("simulation");
    } else {
      this.done.delete("simulation");
      this.done.delete("results");
    }
  }

  get status(): SimulationStatus | null {
    return this.runStatus;
  }

  canEnter(step: WizardStep): boolean {
    const index = WIZARD_STEPS.indexOf(step);
    for (const earlier of WIZARD_STEPS.slice(0, index)) {
      if (!this.done.has(earlier)) return false;
    }
    if (step === "results") return this.runStatus === "done";
    return true;
  }

  goTo(step: WizardStep): boolean {
    if (!this.canEnter(step)) return false;
    this.current = step;
    return true;
  }

  nextStep(): WizardStep | null {
    const index = WIZARD_STEPS.indexOf(this.current);
    const next = WIZARD_STEPS[index + 1];
    return next && this.canEnter(next) ? next : null;
  }

  reset(): void {
    this.simulationId = null;
    this.current = "upload";
    this.prefill = {};
    this.done.clear();
    this.runStatus = null;
  }
}

/** Pre-fill the wizard from a history entry for the re-run flow. */
export function prefillFromHistory(
  entry: HistoryEntry,
  parameters: SimulationParameters | null,
): WizardPrefill {
  const prefill: WizardPrefill = { parentId: entry.id };
  if (parameters) {
    prefill.room = { ...parameters.room };
    prefill.runPeriod = { ...parameters.run_period };
    prefill.stepMinutes = parameters.step_minutes;
    prefill.engine = parameters.engine;
  } else if (entry.room) {
    prefill.room = { ...entry.room };
  }
  return prefill;
}
