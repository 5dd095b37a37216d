/** Typed client for the explorer service. */

export interface RunSummary {
  id: string;
  status: "ok" | "invalid";
  problem?: { kind: string; m?: number; d?: number; [key: string]: unknown };
  variant?: string;
  seed?: number;
  budget?: number;
  final_igd?: number | null;
  final_rmse?: number | null;
  error?: string;
}

export interface FrontPoint {
  x: number[];
  f: number[];
  w: number[];
}

export interface QueryResponse {
  x_mean: number[];
  x_std: number[];
  x_noise_std: number[];
  clamped_flags: boolean[];
}

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function parse<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      if (typeof body.detail === "string") detail = body.detail;
    } catch {
      /* non-JSON error body */
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class ExplorerClient {
  constructor(public baseUrl: string = "") {}

  private url(path: string): string {
    return `${this.baseUrl.replace(/\/$/, "")}${path}`;
  }

  async listRuns(): Promise<RunSummary[]> {
    return parse(await fetch(this.url("/runs")));
  }

  async front(runId: string): Promise<FrontPoint[]> {
    const body = await parse<{ points: FrontPoint[] }>(
      await fetch(this.url(`/runs/${encodeURIComponent(runId)}/front`))
    );
    return body.points;
  }

  async query(
    runId: string,
    w: number[],
    signal?: AbortSignal
  ): Promise<QueryResponse> {
    return parse(
      await fetch(this.url(`/runs/${encodeURIComponent(runId)}/query`), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ w }),
        signal,
      })
    );
  }

  async evaluate(runId: string, x: number[]): Promise<number[]> {
    const body = await parse<{ f: number[] }>(
      await fetch(this.url(`/runs/${encodeURIComponent(runId)}/evaluate`), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ x }),
      })
    );
    return body.f;
  }
}
