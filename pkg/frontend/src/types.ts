/** Wire types mirroring the /v1 service schemas, plus view-model types. */

export interface ModelSpec {
  num: number[];
  den: number[];
  order?: number;
  offset_u?: number;
  offset_y?: number;
  period_h?: number;
}

export type ModelRef = { id: string };

export interface PlanBody {
  t0: number;
  period_h: number;
  goals: number[];
}

export interface StepMetricsDto {
  dc_gain: number | null;
  time_constant_h: number | null;
  settling_time_h: number | null;
  peak_value_m: number;
  peak_time_h: number;
  steady_state_m: number | null;
  state: "transient" | "steady" | "unsteady";
}

export interface SimulateResponse {
  t: number[];
  y: number[];
  step_metrics: StepMetricsDto | null;
}

export interface StepResponse {
  metrics: StepMetricsDto;
  t: number[];
  y: number[];
}

export interface ApiProblem {
  code: string;
  message: string;
  field?: string | null;
}

/** The editable plan: per-hour goal increments plus the target. */
export interface PlanDraft {
  increments: number[];
  targetDepth: number;
  targetHour: number;
  model: ModelSpec | ModelRef | null;
}

/** Everything the screen shows; serializable so replays can be compared. */
export interface ViewModel {
  increments: number[];
  cumulativeGoals: number[];
  trajectory: { t: number[]; y: number[] } | null;
  attainmentHour: number | null;
  attainmentSlope: number | null;
  stepCard: StepMetricsDto | null;
  banner: string | null;
  validation: string | null;
}
