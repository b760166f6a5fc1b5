/** Pure plan-editing helpers. The edit unit is "meters to drill this hour". */

import type { PlanDraft } from "./types.js";

export interface EditResult {
  draft: PlanDraft;
  changed: boolean;
  error: string | null;
}

/** Replace one hourly increment; negative input is rejected unchanged. */
export function editPlan(draft: PlanDraft, hour: number, increment: number): EditResult {
  if (hour < 0 || hour >= draft.increments.length) {
    return { draft, changed: false, error: `hour ${hour} out of range` };
  }
  if (!Number.isFinite(increment) || increment < 0) {
    return { draft, changed: false, error: "increment must be a non-negative number" };
  }
  if (draft.increments[hour] === increment) {
    return { draft, changed: false, error: null };
  }
  const increments = draft.increments.slice();
  increments[hour] = increment;
  return { draft: { ...draft, increments }, changed: true, error: null };
}

/** Cumulative goal levels implied by the increments (starting at zero). */
export function cumulativeGoals(increments: number[]): number[] {
  const out = new Array<number>(increments.length + 1);
  out[0] = 0;
  for (let i = 0; i < increments.length; i++) {
    out[i + 1] = out[i]! + increments[i]!;
  }
  return out;
}

export function meanIncrement(increments: number[]): number {
  if (increments.length === 0) return 0;
  return increments.reduce((a, b) => a + b, 0) / increments.length;
}

export function constantPlan(hours: number, rate: number): number[] {
  return new Array(hours).fill(rate);
}
