/** Payload shapes of the explorer service API. */

export interface PatternInfo {
  label: string;
  pb: [number, number];
}

export interface ApiInfo {
  spec: {
    d: number;
    j: number;
    pb_dim: number;
    layers: { fast: number; mid: number; slow: number };
    time_constants: { fast: number; mid: number; slow: number };
  };
  gamma: number;
  patterns: PatternInfo[];
  joint_names: string[];
  max_steps: number;
  default_steps: number;
  learned_threshold: number;
}

export type CellClass =
  | "appropriate-learned"
  | "appropriate-unlearned"
  | "fluctuating"
  | "non-moving";

export interface MapCell {
  class: CellClass;
  nearest: string | null;
  min_dtw: number | null;
}

export interface MapPayload {
  resolution: number;
  cells: MapCell[];
  legend: Record<string, unknown>;
}

export interface GeneratePayload {
  trajectory: number[][];
  class: CellClass;
  nearest: string | null;
  min_dtw: number | null;
}

export interface ApiError {
  error: string;
  message: string;
}
