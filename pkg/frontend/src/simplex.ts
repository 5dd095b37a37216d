/**
 * Preference-vector editing logic.
 *
 * Components always renormalize onto the probability simplex. When one
 * slider moves, locked components keep their values and the remaining
 * mass is redistributed proportionally among the other unlocked ones.
 */

export interface SimplexEdit {
  values: number[];
  locked: boolean[];
}

const EPS = 1e-12;

export function renormalize(
  values: number[],
  locked: boolean[],
  changed: number,
  newValue: number
): number[] {
  const m = values.length;
  const out = values.slice();
  const lockedSum = values.reduce(
    (acc, v, i) => acc + (locked[i] && i !== changed ? v : 0),
    0
  );
  // the changed slider can only take what the locked ones leave over
  const available = Math.max(0, 1 - lockedSum);
  out[changed] = Math.min(Math.max(newValue, 0), available);

  const others: number[] = [];
  for (let i = 0; i < m; i++) {
    if (i !== changed && !locked[i]) others.push(i);
  }
  const residual = available - out[changed];
  const otherSum = others.reduce((acc, i) => acc + values[i], 0);
  for (const i of others) {
    out[i] = otherSum > EPS ? (values[i] / otherSum) * residual : residual / others.length;
  }
  return out;
}

export function snapToVertex(m: number, axis: number): number[] {
  const out = new Array(m).fill(0);
  out[axis] = 1;
  return out;
}

export function isValidSimplex(values: number[], tol = 1e-6): boolean {
  if (values.some((v) => v < -tol || !Number.isFinite(v))) return false;
  const sum = values.reduce((a, b) => a + b, 0);
  return Math.abs(sum - 1) <= tol;
}

/** Exact cleanup before submitting to the service. */
export function finalize(values: number[]): number[] {
  const clipped = values.map((v) => Math.max(v, 0));
  const sum = clipped.reduce((a, b) => a + b, 0);
  if (sum <= EPS) {
    return clipped.map(() => 1 / clipped.length);
  }
  return clipped.map((v) => v / sum);
}
