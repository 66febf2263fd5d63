/**
 * End-to-end against a real service process serving the committed
 * desk-scale fixture checkpoint: click a learned-pattern cluster cell,
 * verify the rendered values equal the service response verbatim and
 * that playback spans exactly the requested frame count.
 */

import { spawn, ChildProcess } from "node:child_process";
import { existsSync } from "node:fs";
import { fileURLToPath } from "node:url";
import path from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { canvasToPb, pbToCanvas, pbToCell } from "../src/coords";
import { attachResult, frameCount, initialState, selectPoint, setCursor } from "../src/state";
import type { ApiInfo, MapPayload } from "../src/types";

const here = path.dirname(fileURLToPath(import.meta.url));
const fixtures = path.join(here, "..", "fixtures");
const ckpt = path.join(fixtures, "ckpt.json");
const record = path.join(fixtures, "record.jsonl");
const PORT = 8931;
const BASE = `http://127.0.0.1:${PORT}`;

const available = existsSync(ckpt) && existsSync(record);
let server: ChildProcess | null = null;

async function waitForService(timeoutMs = 90000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/api/info`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 300));
  }
  throw new Error("service did not come up in time");
}

describe.runIf(available)("end-to-end against a served checkpoint", () => {
  const client = new ApiClient(BASE);
  let info: ApiInfo;
  let map: MapPayload;

  beforeAll(async () => {
    server = spawn(
      "python3",
      ["-m", "novact.cli", "serve", "--ckpt", ckpt, "--record", record,
       "--port", String(PORT)],
      { stdio: "ignore" },
    );
    await waitForService();
    info = await client.info();
    map = await client.map();
  }, 120000);

  afterAll(() => {
    server?.kill();
  });

  it("serves the trained patterns and the sweep map", () => {
    expect(info.patterns.length).toBe(6);
    expect(map.cells.length).toBe(map.resolution * map.resolution);
  });

  it("clicking a learned cluster cell renders the response verbatim", async () => {
    // find a trained pattern whose cell in the sweep map carries its label
    const res = map.resolution;
    const target = info.patterns.find((p) => {
      const cell = pbToCell(p.pb, res);
      const rec = map.cells[cell.iy * res + cell.ix];
      return rec.class.startsWith("appropriate") && rec.nearest === p.label;
    });
    expect(target, "no learned cluster visible in the sweep map").toBeDefined();

    // simulate the click at that cell's canvas pixel
    const [px, py] = pbToCanvas(target!.pb, 400, 400, res);
    const pb = canvasToPb(px, py, 400, 400, res);

    let state = initialState();
    state = selectPoint(state, pb);
    const result = await client.generate(pb, info.default_steps);
    expect(result).not.toBeNull();
    state = attachResult(state, pb, result!);

    // raw second request: the service is deterministic, so the bytes match
    const raw = await fetch(`${BASE}/api/generate`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ pb, steps: info.default_steps }),
    });
    const rawDoc = await raw.json();
    expect(state.trajectory!.trajectory).toEqual(rawDoc.trajectory);
    expect(state.trajectory!.nearest).toBe(target!.label);

    // playback cursor spans exactly T frames
    expect(frameCount(state)).toBe(info.default_steps);
    state = setCursor(state, info.default_steps + 50);
    expect(state.cursor).toBe(info.default_steps - 1);
    state = setCursor(state, 0);
    expect(state.cursor).toBe(0);
  });

  it("rejects out-of-range points with a machine-readable code", async () => {
    const response = await fetch(`${BASE}/api/generate`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ pb: [2, 0] }),
    });
    expect(response.status).toBe(400);
    expect((await response.json()).error).toBe("pb_out_of_range");
  });
});

describe.runIf(!available)("end-to-end fixtures missing", () => {
  it.skip("generate fixtures with scripts/make_frontend_fixture.py", () => {});
});
