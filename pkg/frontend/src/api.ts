/**
 * Typed client for the explorer service. At most one generate request is
 * in flight: issuing a new one aborts the previous request.
 */

import type { ApiError, ApiInfo, GeneratePayload, MapPayload } from "./types";

export class ServiceError extends Error {
  code: string;

  constructor(code: string, message: string) {
    super(message);
    this.code = code;
  }
}

async function parseError(response: Response): Promise<ServiceError> {
  try {
    const doc = (await response.json()) as ApiError;
    return new ServiceError(doc.error, doc.message);
  } catch {
    return new ServiceError("http_" + response.status, response.statusText);
  }
}

export class ApiClient {
  private base: string;
  private inflight: AbortController | null = null;

  constructor(base = "") {
    this.base = base;
  }

  async info(): Promise<ApiInfo> {
    const response = await fetch(this.base + "/api/info");
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as ApiInfo;
  }

  async map(resolution?: number): Promise<MapPayload> {
    const query = resolution === undefined ? "" : `?resolution=${resolution}`;
    const response = await fetch(this.base + "/api/map" + query);
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as MapPayload;
  }

  /**
   * Generate an action; a newer call aborts the previous one. Returns
   * null when this request was superseded.
   */
  async generate(pb: [number, number], steps?: number): Promise<GeneratePayload | null> {
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    const body: Record<string, unknown> = { pb };
    if (steps !== undefined) body.steps = steps;
    let response: Response;
    try {
      response = await fetch(this.base + "/api/generate", {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
        signal: controller.signal,
      });
    } catch (err) {
      if (controller.signal.aborted) return null;
      throw err;
    } finally {
      if (this.inflight === controller) this.inflight = null;
    }
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as GeneratePayload;
  }
}
