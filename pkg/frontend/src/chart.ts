/** Dependency-free SVG chart: goal staircase and simulated depth overlay. */

import type { ViewModel } from "./types.js";

const WIDTH = 720;
const HEIGHT = 360;
const PAD = 40;

function scale(
  values: number[],
  lo: number,
  hi: number,
  outLo: number,
  outHi: number,
): (v: number) => number {
  const span = hi - lo || 1;
  return (v) => outLo + ((v - lo) / span) * (outHi - outLo);
}

function polyline(xs: number[], ys: number[], cls: string): string {
  const pts = xs.map((x, i) => `${x.toFixed(1)},${ys[i]!.toFixed(1)}`).join(" ");
  return `<polyline class="${cls}" fill="none" points="${pts}"/>`;
}

export function renderChart(view: ViewModel): string {
  const goals = view.cumulativeGoals;
  const hours = goals.map((_, i) => i);
  const traj = view.trajectory;
  const yMax = Math.max(
    ...goals,
    ...(traj ? traj.y : [0]),
    view.trajectory ? 1 : 1,
  );
  const tMax = Math.max(hours[hours.length - 1] ?? 1, ...(traj ? traj.t : [1]));
  const sx = scale([], 0, tMax, PAD, WIDTH - PAD);
  const sy = scale([], 0, yMax, HEIGHT - PAD, PAD);

  const parts: string[] = [
    `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" xmlns="http://www.w3.org/2000/svg">`,
    `<line class="axis" x1="${PAD}" y1="${HEIGHT - PAD}" x2="${WIDTH - PAD}" y2="${HEIGHT - PAD}"/>`,
    `<line class="axis" x1="${PAD}" y1="${PAD}" x2="${PAD}" y2="${HEIGHT - PAD}"/>`,
  ];
  if (goals.length > 1) {
    parts.push(polyline(hours.map(sx), goals.map(sy), "goal"));
  }
  if (traj && traj.t.length > 1) {
    parts.push(polyline(traj.t.map(sx), traj.y.map(sy), "depth"));
  }
  if (view.attainmentHour !== null) {
    const x = sx(view.attainmentHour);
    parts.push(
      `<line class="attain" x1="${x.toFixed(1)}" y1="${PAD}" x2="${x.toFixed(1)}" y2="${HEIGHT - PAD}"/>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}
