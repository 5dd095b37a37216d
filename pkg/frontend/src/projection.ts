/** Orthographic 3-D projection and axis scaling for the scatter views. */

export type ViewMode = "scatter2d" | "scatter3d" | "parallel";

/** Scatter for two or three objectives, parallel coordinates beyond. */
export function viewModeFor(m: number): ViewMode {
  if (m <= 2) return "scatter2d";
  if (m === 3) return "scatter3d";
  return "parallel";
}

export interface Bounds {
  min: number[];
  max: number[];
}

export function bounds(points: number[][]): Bounds {
  const m = points[0].length;
  const min = new Array(m).fill(Infinity);
  const max = new Array(m).fill(-Infinity);
  for (const p of points) {
    for (let i = 0; i < m; i++) {
      if (p[i] < min[i]) min[i] = p[i];
      if (p[i] > max[i]) max[i] = p[i];
    }
  }
  for (let i = 0; i < m; i++) {
    if (max[i] - min[i] < 1e-12) {
      min[i] -= 0.5;
      max[i] += 0.5;
    }
  }
  return { min, max };
}

export function normalizePoint(p: number[], b: Bounds): number[] {
  return p.map((v, i) => (v - b.min[i]) / (b.max[i] - b.min[i]));
}

/**
 * Rotate a unit-cube point by yaw (around the vertical axis) then pitch,
 * and drop the depth coordinate.  Returns [px, py, depth] in roughly
 * [-1, 1] ranges, y pointing up.
 */
export function project3(
  unit: number[],
  yaw: number,
  pitch: number
): [number, number, number] {
  const [x, y, z] = unit.map((v) => v - 0.5);
  const cy = Math.cos(yaw);
  const sy = Math.sin(yaw);
  const x1 = cy * x + sy * y;
  const y1 = -sy * x + cy * y;
  const cp = Math.cos(pitch);
  const sp = Math.sin(pitch);
  const y2 = cp * y1 + sp * z;
  const z2 = -sp * y1 + cp * z;
  return [x1, z2, y2];
}
