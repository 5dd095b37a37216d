import { describe, expect, it } from "vitest";

import { bounds, normalizePoint, project3, viewModeFor } from "../src/projection";

describe("viewModeFor", () => {
  it("scatters up to three objectives, parallel coordinates beyond", () => {
    expect(viewModeFor(2)).toBe("scatter2d");
    expect(viewModeFor(3)).toBe("scatter3d");
    expect(viewModeFor(5)).toBe("parallel");
    expect(viewModeFor(8)).toBe("parallel");
  });
});

describe("bounds", () => {
  it("covers every point and widens degenerate axes", () => {
    const b = bounds([
      [0, 5, 2],
      [1, 5, -2],
    ]);
    expect(b.min[0]).toBe(0);
    expect(b.max[0]).toBe(1);
    expect(b.max[1]).toBeGreaterThan(b.min[1]);
  });
});

describe("normalizePoint", () => {
  it("maps the extremes onto the unit cube", () => {
    const b = bounds([
      [0, -2],
      [4, 2],
    ]);
    expect(normalizePoint([0, -2], b)).toEqual([0, 0]);
    expect(normalizePoint([4, 2], b)).toEqual([1, 1]);
  });
});

describe("project3", () => {
  it("is the identity-ish at zero angles", () => {
    const [px, py] = project3([1, 0.5, 0.5], 0, 0);
    expect(px).toBeCloseTo(0.5, 12);
    expect(py).toBeCloseTo(0, 12);
  });

  it("preserves distances from the cube center", () => {
    const p = [0.9, 0.1, 0.4];
    const centered = p.map((v) => v - 0.5);
    const radius = Math.hypot(...centered);
    const [px, py, depth] = project3(p, 0.8, -0.3);
    expect(Math.hypot(px, py, depth)).toBeCloseTo(radius, 12);
  });
});
