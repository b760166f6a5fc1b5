/** DOM bootstrap: wires the plan table, chart and step card together. */

import { PlannerApi } from "./api.js";
import { renderChart } from "./chart.js";
import { PlannerController } from "./controller.js";
import { constantPlan } from "./plan.js";
import type { ModelSpec, ViewModel } from "./types.js";

const SERVICE_URL = "http://127.0.0.1:8787";

const PUBLISHED_MODEL: ModelSpec = {
  num: [0.6646],
  den: [0.6687, 1.0],
  order: 1,
  offset_u: 0,
  offset_y: 0,
  period_h: 1,
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function fmt(v: number | null, digits = 2): string {
  return v === null ? "-" : v.toFixed(digits);
}

function renderStepCard(view: ViewModel): string {
  const card = view.stepCard;
  if (!card) return "";
  const badge =
    card.state === "unsteady"
      ? `<span class="badge unsteady">unsteady</span>`
      : `<span class="badge">${card.state}</span>`;
  return `
    <h3>Step metrics ${badge}</h3>
    <dl>
      <dt>dc gain</dt><dd>${fmt(card.dc_gain, 5)}</dd>
      <dt>time constant</dt><dd>${fmt(card.time_constant_h)} h</dd>
      <dt>settling time</dt><dd>${fmt(card.settling_time_h)} h</dd>
      <dt>final level</dt><dd>${fmt(card.steady_state_m, 4)} m/h</dd>
    </dl>`;
}

function main(): void {
  const planTable = el<HTMLDivElement>("plan");
  const chartBox = el<HTMLDivElement>("chart");
  const stepBox = el<HTMLDivElement>("step-card");
  const statusBox = el<HTMLDivElement>("status");
  const targetDepthInput = el<HTMLInputElement>("target-depth");
  const targetHourInput = el<HTMLInputElement>("target-hour");

  const render = (view: ViewModel): void => {
    chartBox.innerHTML = renderChart(view);
    stepBox.innerHTML = renderStepCard(view);
    stepBox.hidden = view.stepCard === null;
    const notes: string[] = [];
    if (view.banner) notes.push(view.banner);
    if (view.validation) notes.push(view.validation);
    if (view.attainmentHour !== null) {
      notes.push(`target depth reached at ${view.attainmentHour.toFixed(2)} h`);
    }
    if (view.attainmentSlope !== null) {
      notes.push(`attainment slope ${view.attainmentSlope.toFixed(4)} m/h`);
    }
    statusBox.textContent = notes.join(" | ");
  };

  const controller = new PlannerController(
    new PlannerApi(SERVICE_URL),
    render,
    {
      increments: constantPlan(24, 2.06),
      targetDepth: Number(targetDepthInput.value) || 40,
      targetHour: Number(targetHourInput.value) || 24,
      model: PUBLISHED_MODEL,
    },
  );

  const rebuildInputs = (): void => {
    planTable.innerHTML = "";
    controller.plan.increments.forEach((inc, hour) => {
      const row = document.createElement("label");
      row.className = "plan-row";
      row.textContent = `h${hour}`;
      const input = document.createElement("input");
      input.type = "number";
      input.min = "0";
      input.step = "0.1";
      input.value = String(inc);
      input.addEventListener("input", () => {
        controller.editIncrement(hour, Number(input.value));
      });
      row.appendChild(input);
      planTable.appendChild(row);
    });
  };

  targetDepthInput.addEventListener("input", () => {
    controller.setTarget(
      Number(targetDepthInput.value),
      Number(targetHourInput.value),
    );
  });
  targetHourInput.addEventListener("input", () => {
    controller.setTarget(
      Number(targetDepthInput.value),
      Number(targetHourInput.value),
    );
  });

  rebuildInputs();
  void controller.flush();
}

main();
