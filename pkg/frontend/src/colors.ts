/** Colors matching the python map renderer's legend. */

import type { CellClass, MapCell } from "./types";

export const PATTERN_COLORS: [number, number, number][] = [
  [31, 119, 180],
  [255, 127, 14],
  [44, 160, 44],
  [214, 39, 40],
  [140, 86, 75],
  [23, 190, 207],
];

export const FLUCTUATING_COLOR: [number, number, number] = [128, 0, 160];
export const NON_MOVING_COLOR: [number, number, number] = [255, 150, 200];

export function patternColor(labels: string[], label: string): [number, number, number] {
  const index = labels.indexOf(label);
  return PATTERN_COLORS[(index >= 0 ? index : 0) % PATTERN_COLORS.length];
}

/** Cell fill color: hue by nearest pattern, brightness by similarity. */
export function cellColor(
  cell: MapCell,
  labels: string[],
  learnedThreshold: number,
): [number, number, number] {
  const kind: CellClass = cell.class;
  if (kind === "fluctuating") return FLUCTUATING_COLOR;
  if (kind === "non-moving") return NON_MOVING_COLOR;
  const base = patternColor(labels, cell.nearest ?? "");
  const clip = 4 * learnedThreshold;
  const sim = 1 - Math.min(cell.min_dtw ?? clip, clip) / clip;
  const scale = 0.3 + 0.7 * sim;
  return [
    Math.round(base[0] * scale),
    Math.round(base[1] * scale),
    Math.round(base[2] * scale),
  ];
}

export function rgb(color: [number, number, number]): string {
  return `rgb(${color[0]},${color[1]},${color[2]})`;
}
