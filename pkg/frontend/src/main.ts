import { ApiClient, ServiceError } from "./api";
import { FLUCTUATING_COLOR, NON_MOVING_COLOR, PATTERN_COLORS, rgb } from "./colors";
import { canvasToPb } from "./coords";
import { drawBreadcrumbs, drawMap, drawPatternMarkers, drawSelection } from "./heatmap";
import { drawJointPlot, valueRange } from "./jointPlot";
import { drawArms } from "./armView";
import {
  advanceCursor,
  attachResult,
  canCompare,
  clearHistory,
  compareVisits,
  frameCount,
  initialState,
  selectPoint,
  setCursor,
  UiState,
} from "./state";
import type { ApiInfo, MapPayload } from "./types";

const client = new ApiClient();
let state: UiState = initialState();
let info: ApiInfo | null = null;
let mapPayload: MapPayload | null = null;

const el = <T extends HTMLElement>(id: string) => document.getElementById(id) as T;
const mapCanvas = el<HTMLCanvasElement>("map");
const jointCanvas = el<HTMLCanvasElement>("joints");
const armCanvas = el<HTMLCanvasElement>("arms");
const slider = el<HTMLInputElement>("frame-slider");

function showBanner(message: string): void {
  el("banner").style.display = "block";
  el("banner-text").textContent = message;
}

function hideBanner(): void {
  el("banner").style.display = "none";
}

function toast(message: string): void {
  const node = document.createElement("div");
  node.className = "toast";
  node.textContent = message;
  document.body.appendChild(node);
  setTimeout(() => node.remove(), 4000);
}

function renderLegend(): void {
  if (!info) return;
  const legend = el("legend");
  legend.innerHTML = "";
  const chip = (color: [number, number, number], label: string) => {
    const span = document.createElement("span");
    span.className = "chip";
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.background = rgb(color);
    span.appendChild(swatch);
    span.appendChild(document.createTextNode(label));
    legend.appendChild(span);
  };
  info.patterns.forEach((p, i) => chip(PATTERN_COLORS[i % PATTERN_COLORS.length], p.label));
  chip(FLUCTUATING_COLOR, "fluctuating");
  chip(NON_MOVING_COLOR, "non-moving");
}

function renderMap(): void {
  if (!info) return;
  if (!mapPayload) return;
  const labels = info.patterns.map((p) => p.label);
  drawMap(mapCanvas, mapPayload, labels, info.learned_threshold);
  drawPatternMarkers(mapCanvas, info.patterns, mapPayload.resolution);
  drawBreadcrumbs(
    mapCanvas,
    state.history.map((v) => v.pb),
    mapPayload.resolution,
  );
  if (state.selected) drawSelection(mapCanvas, state.selected, mapPayload.resolution);
}

function renderTrajectory(): void {
  const frames = frameCount(state);
  slider.max = String(Math.max(frames - 1, 0));
  slider.value = String(state.cursor);
  el("frame-label").textContent = frames === 0 ? "0 / 0" : `${state.cursor + 1} / ${frames}`;
  if (state.trajectory) {
    drawJointPlot(jointCanvas, state.trajectory.trajectory, state.cursor);
    drawArms(armCanvas, state.trajectory.trajectory[state.cursor]);
    const meta = state.trajectory;
    const near = meta.nearest
      ? ` - nearest: ${meta.nearest} (DTW ${meta.min_dtw?.toFixed(2)})`
      : "";
    el("status").textContent = `class: ${meta.class}${near}`;
  }
  el<HTMLButtonElement>("compare-btn").disabled = !canCompare(state);
  el("history-count").textContent = `${state.history.length} visited`;
}

function renderCompare(): void {
  const panel = el("compare-panel");
  if (!state.compare) {
    panel.classList.remove("active");
    return;
  }
  panel.classList.add("active");
  const [ia, ib] = state.compare;
  const a = state.history[ia];
  const b = state.history[ib];
  if (!a?.result || !b?.result) return;
  // shared value range and a shared cursor keep playback synchronized
  const range = valueRange([...a.result.trajectory, ...b.result.trajectory]);
  const clamp = (traj: number[][]) => Math.min(state.cursor, traj.length - 1);
  el("cmp-a-label").textContent = `(${a.pb[0].toFixed(2)}, ${a.pb[1].toFixed(2)}) ${a.result.class}`;
  el("cmp-b-label").textContent = `(${b.pb[0].toFixed(2)}, ${b.pb[1].toFixed(2)}) ${b.result.class}`;
  drawJointPlot(el<HTMLCanvasElement>("cmp-a"), a.result.trajectory, clamp(a.result.trajectory), range);
  drawJointPlot(el<HTMLCanvasElement>("cmp-b"), b.result.trajectory, clamp(b.result.trajectory), range);
}

function renderAll(): void {
  renderMap();
  renderTrajectory();
  renderCompare();
}

async function loadMap(): Promise<void> {
  try {
    mapPayload = await client.map();
    el("map-note").textContent = "";
  } catch (err) {
    mapPayload = null;
    if (err instanceof ServiceError && err.code === "no_sweep") {
      el("map-note").textContent =
        "No sweep record is configured - run a sweep first to see the memory map. " +
        "Clicking the empty map still generates actions.";
    } else {
      throw err;
    }
  }
}

async function boot(): Promise<void> {
  hideBanner();
  try {
    info = await client.info();
    await loadMap();
  } catch (err) {
    showBanner(`Cannot reach the service: ${err instanceof Error ? err.message : err}`);
    return;
  }
  renderLegend();
  renderAll();
}

mapCanvas.addEventListener("click", async (event) => {
  if (!info) return;
  const rect = mapCanvas.getBoundingClientRect();
  const resolution = mapPayload?.resolution ?? 200;
  const pb = canvasToPb(
    event.clientX - rect.left,
    event.clientY - rect.top,
    rect.width,
    rect.height,
    resolution,
  );
  state = selectPoint(state, pb);
  renderAll();
  try {
    const result = await client.generate(pb, info.default_steps);
    if (result === null) return; // superseded by a newer click
    state = attachResult(state, pb, result);
    renderAll();
  } catch (err) {
    toast(err instanceof ServiceError ? `${err.code}: ${err.message}` : String(err));
  }
});

slider.addEventListener("input", () => {
  state = setCursor({ ...state, playing: false }, Number(slider.value));
  el<HTMLButtonElement>("play-btn").textContent = "Play";
  renderTrajectory();
  renderCompare();
});

el<HTMLButtonElement>("play-btn").addEventListener("click", () => {
  state = { ...state, playing: !state.playing };
  el<HTMLButtonElement>("play-btn").textContent = state.playing ? "Pause" : "Play";
});

el<HTMLButtonElement>("compare-btn").addEventListener("click", () => {
  state = compareVisits(state);
  renderCompare();
});

el<HTMLButtonElement>("clear-btn").addEventListener("click", () => {
  state = clearHistory(state);
  renderAll();
});

el<HTMLButtonElement>("retry").addEventListener("click", () => void boot());

let lastTick = 0;
function tick(now: number): void {
  if (state.playing && frameCount(state) > 0 && now - lastTick > 80) {
    lastTick = now;
    state = advanceCursor(state);
    renderTrajectory();
    renderCompare();
  }
  requestAnimationFrame(tick);
}

void boot();
requestAnimationFrame(tick);
