/** Map rendering: cells, learned-pattern markers, and the selection dot. */

import { cellColor } from "./colors";
import { pbToCanvas } from "./coords";
import type { MapPayload, PatternInfo } from "./types";

export function drawMap(
  canvas: HTMLCanvasElement,
  payload: MapPayload,
  labels: string[],
  learnedThreshold: number,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const res = payload.resolution;
  const image = ctx.createImageData(res, res);
  for (let iy = 0; iy < res; iy++) {
    for (let ix = 0; ix < res; ix++) {
      const cell = payload.cells[iy * res + ix];
      const [r, g, b] = cellColor(cell, labels, learnedThreshold);
      // canvas row 0 is the top: latent y axis points up
      const offset = ((res - 1 - iy) * res + ix) * 4;
      image.data[offset] = r;
      image.data[offset + 1] = g;
      image.data[offset + 2] = b;
      image.data[offset + 3] = 255;
    }
  }
  const scratch = document.createElement("canvas");
  scratch.width = res;
  scratch.height = res;
  scratch.getContext("2d")!.putImageData(image, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.drawImage(scratch, 0, 0, canvas.width, canvas.height);
}

export function drawPatternMarkers(
  canvas: HTMLCanvasElement,
  patterns: PatternInfo[],
  resolution: number,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.font = "11px sans-serif";
  for (const pattern of patterns) {
    const [x, y] = pbToCanvas(pattern.pb, canvas.width, canvas.height, resolution);
    ctx.fillStyle = "#ffffff";
    ctx.strokeStyle = "#000000";
    ctx.beginPath();
    ctx.arc(x, y, 3, 0, 2 * Math.PI);
    ctx.fill();
    ctx.stroke();
    ctx.fillStyle = "#ffffff";
    ctx.strokeStyle = "rgba(0,0,0,0.7)";
    ctx.lineWidth = 2.5;
    ctx.strokeText(pattern.label, x + 5, y - 4);
    ctx.fillText(pattern.label, x + 5, y - 4);
    ctx.lineWidth = 1;
  }
}

/** Yellow dot at the currently selected latent point. */
export function drawSelection(
  canvas: HTMLCanvasElement,
  pb: [number, number],
  resolution: number,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const [x, y] = pbToCanvas(pb, canvas.width, canvas.height, resolution);
  ctx.fillStyle = "#ffe01a";
  ctx.strokeStyle = "#000000";
  ctx.beginPath();
  ctx.arc(x, y, 5, 0, 2 * Math.PI);
  ctx.fill();
  ctx.stroke();
}

/** Small hollow circles along the visited-point breadcrumb trail. */
export function drawBreadcrumbs(
  canvas: HTMLCanvasElement,
  points: [number, number][],
  resolution: number,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  ctx.strokeStyle = "rgba(255,224,26,0.8)";
  for (const pb of points) {
    const [x, y] = pbToCanvas(pb, canvas.width, canvas.height, resolution);
    ctx.beginPath();
    ctx.arc(x, y, 2.5, 0, 2 * Math.PI);
    ctx.stroke();
  }
}
