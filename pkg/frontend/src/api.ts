/** Thin typed client for the /v1 planning service. */

import type {
  ApiProblem,
  ModelRef,
  ModelSpec,
  PlanBody,
  SimulateResponse,
  StepResponse,
} from "./types.js";

export type FetchLike = (url: string, init: RequestInit) => Promise<Response>;

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly problem: ApiProblem | null,
  ) {
    super(problem?.message ?? `service error ${status}`);
  }
}

export class PlannerApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) {
      let problem: ApiProblem | null = null;
      try {
        problem = (await response.json()) as ApiProblem;
      } catch {
        problem = null;
      }
      throw new ServiceError(response.status, problem);
    }
    return (await response.json()) as T;
  }

  simulate(
    model: ModelSpec | ModelRef,
    plan: PlanBody,
    absolute = false,
  ): Promise<SimulateResponse> {
    return this.post<SimulateResponse>("/v1/simulate", { model, plan, absolute });
  }

  step(
    model: ModelSpec | ModelRef,
    amplitude: number,
    horizonH: number,
  ): Promise<StepResponse> {
    return this.post<StepResponse>("/v1/step", {
      model,
      amplitude,
      horizon_h: horizonH,
    });
  }
}
