/**
 * The UI must not transform trajectory values: what the panels receive
 * is exactly what the service returned. Verified against a mocked fetch
 * with awkward high-precision values.
 */

import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api";
import { attachResult, frameCount, initialState, selectPoint } from "../src/state";
import type { GeneratePayload } from "../src/types";

const awkward: GeneratePayload = {
  trajectory: [
    [0.1234567890123456, -0.0000000001234, 1e-300, 0.3, -0.25, 0.125, 0.7071067811865476, -0.1],
    [-0.9999999999999999, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7],
    [5e-324, 1.7976931348623157e308, -0.0, 0.0, 1.1, -1.1, 2.2, -2.2],
  ],
  class: "appropriate-learned",
  nearest: "right_hook",
  min_dtw: 0.4999999999999999,
};

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("trajectory values pass through verbatim", () => {
  it("client delivers the payload and state stores it unchanged", async () => {
    const body = JSON.stringify(awkward);
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => new Response(body, { status: 200 })),
    );
    const client = new ApiClient();
    const result = await client.generate([0.25, -0.5], 3);
    expect(result).not.toBeNull();
    // identical to an independent parse of the same bytes
    expect(result).toEqual(JSON.parse(body));

    let s = initialState();
    s = selectPoint(s, [0.25, -0.5]);
    s = attachResult(s, [0.25, -0.5], result!);
    expect(s.trajectory!.trajectory).toBe(result!.trajectory); // same object, no copies
    expect(s.trajectory!.trajectory).toEqual(JSON.parse(body).trajectory);
    expect(frameCount(s)).toBe(3);
  });

  it("newer clicks abort older generate requests", async () => {
    let calls = 0;
    vi.stubGlobal(
      "fetch",
      vi.fn(async (_url: unknown, init?: RequestInit) => {
        calls += 1;
        const mine = calls;
        return await new Promise<Response>((resolve, reject) => {
          init?.signal?.addEventListener("abort", () =>
            reject(new DOMException("aborted", "AbortError")),
          );
          setTimeout(
            () => resolve(new Response(JSON.stringify({ ...awkward, min_dtw: mine }), { status: 200 })),
            mine === 1 ? 50 : 5,
          );
        });
      }),
    );
    const client = new ApiClient();
    const first = client.generate([0, 0]);
    const second = client.generate([0.5, 0.5]);
    const [a, b] = await Promise.all([first, second]);
    expect(a).toBeNull(); // superseded
    expect(b).not.toBeNull();
    expect(b!.min_dtw).toBe(2);
  });
});
