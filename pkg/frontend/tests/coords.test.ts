import { describe, expect, it } from "vitest";

import { canvasToCell, canvasToPb, cellSize, cellToPb, pbToCanvas, pbToCell } from "../src/coords";

const W = 400;
const H = 400;

describe("canvas corner and center clicks (acceptance: coordinate fidelity)", () => {
  const res = 200;
  // the canvas center sits exactly on a cell boundary at even
  // resolutions, so allow one ulp of slack on the half-cell bound
  const half = cellSize(res) / 2 + 1e-12;

  it("maps the four corners to (±1, ±1) within half a cell", () => {
    const cases: [number, number, number, number][] = [
      [0, 0, -1, 1], // top-left: latent y points up
      [W - 1e-9, 0, 1, 1],
      [0, H - 1e-9, -1, -1],
      [W - 1e-9, H - 1e-9, 1, -1],
    ];
    for (const [px, py, ex, ey] of cases) {
      const [x, y] = canvasToPb(px, py, W, H, res);
      expect(Math.abs(x - ex)).toBeLessThanOrEqual(half);
      expect(Math.abs(y - ey)).toBeLessThanOrEqual(half);
    }
  });

  it("maps the center to (0, 0) within half a cell", () => {
    const [x, y] = canvasToPb(W / 2, H / 2, W, H, res);
    expect(Math.abs(x)).toBeLessThanOrEqual(half);
    expect(Math.abs(y)).toBeLessThanOrEqual(half);
  });

  it("holds for odd resolutions too", () => {
    const [x, y] = canvasToPb(W / 2, H / 2, W, H, 9);
    expect(Math.abs(x)).toBeLessThanOrEqual(cellSize(9) / 2);
    expect(Math.abs(y)).toBeLessThanOrEqual(cellSize(9) / 2);
  });
});

describe("grid layout inversion", () => {
  it("cellToPb includes the endpoints", () => {
    expect(cellToPb({ ix: 0, iy: 0 }, 5)).toEqual([-1, -1]);
    expect(cellToPb({ ix: 4, iy: 4 }, 5)).toEqual([1, 1]);
  });

  it("pbToCell inverts cellToPb exactly", () => {
    for (const res of [2, 5, 50, 200]) {
      for (let ix = 0; ix < res; ix += Math.max(1, Math.floor(res / 7))) {
        for (let iy = 0; iy < res; iy += Math.max(1, Math.floor(res / 7))) {
          const pb = cellToPb({ ix, iy }, res);
          expect(pbToCell(pb, res)).toEqual({ ix, iy });
        }
      }
    }
  });

  it("clicking a cell's canvas center recovers the cell", () => {
    const res = 50;
    for (const cell of [
      { ix: 0, iy: 0 },
      { ix: 49, iy: 0 },
      { ix: 12, iy: 31 },
      { ix: 49, iy: 49 },
    ]) {
      const pb = cellToPb(cell, res);
      const [px, py] = pbToCanvas(pb, W, H, res);
      expect(canvasToCell(px, py, W, H, res)).toEqual(cell);
    }
  });

  it("clamps clicks on the outer border", () => {
    const res = 10;
    expect(canvasToCell(W, H, W, H, res)).toEqual({ ix: 9, iy: 0 });
    expect(canvasToCell(-5, -5, W, H, res)).toEqual({ ix: 0, iy: 9 });
  });
});
