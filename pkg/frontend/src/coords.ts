/**
 * Canvas <-> grid <-> latent coordinate mapping.
 *
 * The service lists map cells in row-major order, index iy * resolution
 * + ix, with both latent axes ascending and endpoints at -1 and +1. On
 * the canvas, x grows rightward (latent dim 1 ascending) and y grows
 * DOWNWARD, so canvas row 0 shows iy = resolution - 1 (latent dim 2
 * points up). These functions are exact inverses of that layout up to
 * half-cell quantization.
 */

export interface Cell {
  ix: number;
  iy: number;
}

function clampIndex(i: number, resolution: number): number {
  return Math.min(Math.max(i, 0), resolution - 1);
}

/** Grid index of the cell under a canvas pixel. */
export function canvasToCell(
  px: number,
  py: number,
  width: number,
  height: number,
  resolution: number,
): Cell {
  const ix = clampIndex(Math.floor((px / width) * resolution), resolution);
  const rowFromTop = clampIndex(Math.floor((py / height) * resolution), resolution);
  return { ix, iy: resolution - 1 - rowFromTop };
}

/** Latent coordinate of a grid index (axis endpoints included). */
export function cellToPb(cell: Cell, resolution: number): [number, number] {
  const axis = (i: number) => -1 + (2 * i) / (resolution - 1);
  return [axis(cell.ix), axis(cell.iy)];
}

/** Latent point under a canvas pixel: nearest grid cell's coordinates. */
export function canvasToPb(
  px: number,
  py: number,
  width: number,
  height: number,
  resolution: number,
): [number, number] {
  return cellToPb(canvasToCell(px, py, width, height, resolution), resolution);
}

/** Nearest grid cell for a latent point. */
export function pbToCell(pb: [number, number], resolution: number): Cell {
  const index = (p: number) => clampIndex(Math.round(((p + 1) / 2) * (resolution - 1)), resolution);
  return { ix: index(pb[0]), iy: index(pb[1]) };
}

/** Canvas pixel at the center of a latent point's cell. */
export function pbToCanvas(
  pb: [number, number],
  width: number,
  height: number,
  resolution: number,
): [number, number] {
  const cell = pbToCell(pb, resolution);
  const x = ((cell.ix + 0.5) / resolution) * width;
  const y = ((resolution - 1 - cell.iy + 0.5) / resolution) * height;
  return [x, y];
}

/** Width of one grid cell in latent units. */
export function cellSize(resolution: number): number {
  return 2 / (resolution - 1);
}
