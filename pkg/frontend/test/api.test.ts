import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiError, ExplorerClient } from "../src/api";

function mockFetch(status: number, body: unknown) {
  return vi.fn(async () => ({
    ok: status >= 200 && status < 300,
    status,
    statusText: `status ${status}`,
    json: async () => body,
  })) as unknown as typeof fetch;
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("ExplorerClient", () => {
  it("lists runs from the configured base url", async () => {
    const fetchMock = mockFetch(200, [{ id: "r1", status: "ok" }]);
    vi.stubGlobal("fetch", fetchMock);
    const client = new ExplorerClient("http://localhost:9999/");
    const runs = await client.listRuns();
    expect(runs[0].id).toBe("r1");
    expect(fetchMock).toHaveBeenCalledWith("http://localhost:9999/runs");
  });

  it("unwraps front points", async () => {
    vi.stubGlobal(
      "fetch",
      mockFetch(200, { points: [{ x: [0.1], f: [1, 0], w: [0.5, 0.5] }] })
    );
    const client = new ExplorerClient("");
    const points = await client.front("demo");
    expect(points).toHaveLength(1);
    expect(points[0].f).toEqual([1, 0]);
  });

  it("posts the preference body on query", async () => {
    const fetchMock = mockFetch(200, {
      x_mean: [0.5],
      x_std: [0.1],
      x_noise_std: [0.01],
      clamped_flags: [false],
    });
    vi.stubGlobal("fetch", fetchMock);
    const client = new ExplorerClient("");
    await client.query("demo", [0.4, 0.6]);
    const [, init] = (fetchMock as any).mock.calls[0];
    expect(JSON.parse(init.body)).toEqual({ w: [0.4, 0.6] });
  });

  it("raises ApiError with the server detail on 422", async () => {
    vi.stubGlobal("fetch", mockFetch(422, { detail: "w must sum to 1" }));
    const client = new ExplorerClient("");
    await expect(client.query("demo", [2, 0])).rejects.toMatchObject({
      status: 422,
      detail: "w must sum to 1",
    });
    await expect(client.query("demo", [2, 0])).rejects.toBeInstanceOf(ApiError);
  });
});
