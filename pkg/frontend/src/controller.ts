/**
 * Planner state machine: edits to the hourly goal plan trigger a debounced
 * simulate/step round-trip, and only the latest response generation may
 * render.  Every number shown on screen comes from a service response; the
 * controller itself never integrates the model.
 */

import type { PlannerApi } from "./api.js";
import { cumulativeGoals, editPlan, meanIncrement } from "./plan.js";
import type { PlanDraft, SimulateResponse, StepResponse, ViewModel } from "./types.js";

export const DEBOUNCE_MS = 250;

export type RenderFn = (view: ViewModel) => void;

export interface PlanEdit {
  hour: number;
  increment: number;
}

interface CycleOutcome {
  simulate: SimulateResponse | null;
  step: StepResponse | null;
  banner: string | null;
}

/** First instant the trajectory reaches the level, by linear interpolation. */
export function attainmentHour(
  t: number[],
  y: number[],
  level: number,
): number | null {
  for (let k = 0; k < y.length; k++) {
    const yk = y[k]!;
    if (yk >= level) {
      if (k === 0) return t[0]!;
      const y0 = y[k - 1]!;
      const t0 = t[k - 1]!;
      const frac = yk > y0 ? (level - y0) / (yk - y0) : 1;
      return t0 + frac * (t[k]! - t0);
    }
  }
  return null;
}

/** Depth gained over the final sampling interval, in meters per hour. */
export function tailSlope(t: number[], y: number[]): number | null {
  const n = y.length;
  if (n < 2) return null;
  const dt = t[n - 1]! - t[n - 2]!;
  if (dt <= 0) return null;
  return (y[n - 1]! - y[n - 2]!) / dt;
}

export class PlannerController {
  private draft: PlanDraft;
  private seq = 0;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private inFlight: Promise<void> = Promise.resolve();
  private lastOutcome: CycleOutcome = { simulate: null, step: null, banner: null };
  private validation: string | null = null;

  constructor(
    private readonly api: PlannerApi,
    private readonly render: RenderFn,
    draft: PlanDraft,
    private readonly debounceMs: number = DEBOUNCE_MS,
  ) {
    this.draft = draft;
  }

  get plan(): PlanDraft {
    return this.draft;
  }

  /** Apply one edit; a changed plan schedules a debounced refresh. */
  editIncrement(hour: number, increment: number): void {
    const result = editPlan(this.draft, hour, increment);
    this.validation = result.error;
    if (!result.changed) {
      this.renderNow();
      return;
    }
    this.draft = result.draft;
    this.schedule();
  }

  setTarget(depth: number, hour: number): void {
    this.draft = { ...this.draft, targetDepth: depth, targetHour: hour };
    this.renderNow();
  }

  selectModel(model: PlanDraft["model"]): void {
    this.draft = { ...this.draft, model };
    this.schedule();
  }

  /** Replay a recorded edit script and resolve with the final screen state. */
  async applyScript(edits: PlanEdit[]): Promise<ViewModel> {
    for (const edit of edits) {
      this.editIncrement(edit.hour, edit.increment);
    }
    return this.flush();
  }

  /** Run any pending refresh immediately and wait for it to render. */
  async flush(): Promise<ViewModel> {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
      this.runCycle();
    }
    await this.inFlight;
    return this.buildView();
  }

  private schedule(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
    }
    this.timer = setTimeout(() => {
      this.timer = null;
      this.runCycle();
    }, this.debounceMs);
  }

  private runCycle(): void {
    const mySeq = ++this.seq;
    const { increments, model } = this.draft;
    if (model === null || increments.length === 0) {
      this.lastOutcome = { simulate: null, step: null, banner: null };
      this.renderNow();
      return;
    }
    const plan = { t0: 0, period_h: 1, goals: increments.slice() };
    const amplitude = meanIncrement(increments);
    const horizon = Math.max(increments.length, 1);

    const cycle = (async (): Promise<CycleOutcome> => {
      try {
        const [simulate, step] = await Promise.all([
          this.api.simulate(model, plan),
          amplitude > 0
            ? this.api.step(model, amplitude, horizon)
            : Promise.resolve(null),
        ]);
        return { simulate, step, banner: null };
      } catch (err) {
        const message = err instanceof Error ? err.message : String(err);
        return { simulate: null, step: null, banner: `service unreachable: ${message}` };
      }
    })();

    this.inFlight = cycle.then((outcome) => {
      if (mySeq !== this.seq) {
        return; // a newer edit superseded this response: discard it
      }
      this.lastOutcome = outcome;
      this.renderNow();
    });
  }

  private buildView(): ViewModel {
    const { simulate, step, banner } = this.lastOutcome;
    const trajectory = simulate ? { t: simulate.t, y: simulate.y } : null;
    return {
      increments: this.draft.increments.slice(),
      cumulativeGoals: cumulativeGoals(this.draft.increments),
      trajectory,
      attainmentHour: trajectory
        ? attainmentHour(trajectory.t, trajectory.y, this.draft.targetDepth)
        : null,
      attainmentSlope: trajectory ? tailSlope(trajectory.t, trajectory.y) : null,
      stepCard: step ? step.metrics : null,
      banner,
      validation: this.validation,
    };
  }

  private renderNow(): void {
    this.render(this.buildView());
  }
}
