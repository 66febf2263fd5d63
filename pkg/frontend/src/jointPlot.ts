/**
 * Joint-angle time series panel: one line per joint, solid for the
 * right arm (first four joints), dashed for the left arm (last four),
 * with a vertical cursor at the playback frame. Values are plotted
 * exactly as delivered by the service.
 */

const JOINT_COLORS = [
  "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
  "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
];

export interface PlotRange {
  low: number;
  high: number;
}

export function valueRange(trajectory: number[][]): PlotRange {
  let low = Infinity;
  let high = -Infinity;
  for (const frame of trajectory) {
    for (const v of frame) {
      if (v < low) low = v;
      if (v > high) high = v;
    }
  }
  if (!isFinite(low)) return { low: -1, high: 1 };
  const pad = 0.05 * Math.max(high - low, 1e-6);
  return { low: low - pad, high: high + pad };
}

export function drawJointPlot(
  canvas: HTMLCanvasElement,
  trajectory: number[][],
  cursor: number,
  range?: PlotRange,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  if (trajectory.length === 0) return;
  const frames = trajectory.length;
  const dims = trajectory[0].length;
  const { low, high } = range ?? valueRange(trajectory);
  const sx = (t: number) => (frames === 1 ? 0 : (t / (frames - 1)) * (width - 1));
  const sy = (v: number) => height - 1 - ((v - low) / (high - low)) * (height - 1);

  ctx.strokeStyle = "#ddd";
  ctx.beginPath();
  ctx.moveTo(0, sy(0));
  ctx.lineTo(width, sy(0));
  ctx.stroke();

  for (let d = 0; d < dims; d++) {
    ctx.strokeStyle = JOINT_COLORS[d % JOINT_COLORS.length];
    ctx.setLineDash(d >= dims / 2 ? [5, 3] : []);
    ctx.beginPath();
    ctx.moveTo(sx(0), sy(trajectory[0][d]));
    for (let t = 1; t < frames; t++) {
      ctx.lineTo(sx(t), sy(trajectory[t][d]));
    }
    ctx.stroke();
  }
  ctx.setLineDash([]);

  ctx.strokeStyle = "rgba(0,0,0,0.55)";
  ctx.beginPath();
  ctx.moveTo(sx(cursor), 0);
  ctx.lineTo(sx(cursor), height);
  ctx.stroke();
}
