/**
 * Typed client for the simulation REST API.
 *
 * The fetch implementation is injectable so the client can be exercised in
 * tests without a network; all validation errors surface as ApiError with the
 * backend's machine-readable code.
 */

export interface RoomParameters {
  width: number;
  depth: number;
  height: number;
  orientation: number;
  infiltration_ach: number;
}

export interface RunPeriodParameters {
  begin: string; // YYYY-MM-DD
  end: string;
}

export interface SimulationParameters {
  room: RoomParameters;
  run_period: RunPeriodParameters;
  step_minutes: number;
  engine: "surrogate" | "energyplus";
  surrogate?: Record<string, number>;
  window_layout?: { margin?: number; gap?: number };
}

export type SimulationStatus =
  | "created"
  | "configured"
  | "running"
  | "done"
  | "failed";

export interface SimulationRecord {
  id: string;
  created_at: string;
  status: SimulationStatus;
  inputs: { idf: boolean; weather: boolean; occupancy: boolean };
  parameters: SimulationParameters | null;
  results: string[];
  error: string | null;
  parent_id: string | null;
}

export interface HistoryEntry {
  id: string;
  created_at: string;
  status: SimulationStatus;
  engine: string | null;
  room: RoomParameters | null;
  parent_id: string | null;
  error: string | null;
}

export interface GeometrySurface {
  name: string;
  type: string;
  boundary: string;
  vertices: [number, number, number][];
}

export interface GeometryWindow {
  name: string;
  host_surface: string;
  vertices: [number, number, number][];
}

export interface GeometryView {
  north_axis: number;
  surfaces: GeometrySurface[];
  windows: GeometryWindow[];
}

export interface SeriesChild {
  id: string;
  status: SimulationStatus;
  error: string | null;
  room: RoomParameters | null;
}

export interface SeriesState {
  id: string;
  created_at: string;
  base_id: string;
  status: "running" | "done";
  children: SeriesChild[];
}

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
    readonly code: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

export type InputKind = "idf" | "weather" | "occupancy";

export class ApiClient {
  private readonly fetchImpl: FetchLike;

  constructor(
    readonly baseUrl: string,
    fetchImpl?: FetchLike,
  ) {
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(
    path: string,
    init?: RequestInit & { parse?: "json" | "text" | "none" },
  ): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      let code = "http_error";
      let message = `${response.status} ${response.statusText}`;
      try {
        const body = (await response.json()) as { code?: string; message?: string };
        if (body.code) code = body.code;
        if (body.message) message = body.message;
      } catch {
        // non-JSON error body: keep the status line
      }
      throw new ApiError(message, response.status, code);
    }
    const mode = init?.parse ?? "json";
    if (mode === "none") return undefined as T;
    if (mode === "text") return (await response.text()) as T;
    return (await response.json()) as T;
  }

  createSimulation(): Promise<SimulationRecord> {
    return this.request("/simulations", { method: "POST" });
  }

  getSimulation(id: string): Promise<SimulationRecord> {
    return this.request(`/simulations/${id}`);
  }

  history(): Promise<HistoryEntry[]> {
    return this.request("/simulations");
  }

  uploadInput(id: string, kind: InputKind, body: Blob | string): Promise<void> {
    return this.request(`/simulations/${id}/input/${kind}`, {
      method: "PUT",
      body,
      parse: "none",
    });
  }

  configure(
    id: string,
    parameters: SimulationParameters,
  ): Promise<SimulationRecord> {
    return this.request(`/simulations/${id}/parameters`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(parameters),
    });
  }

  run(id: string): Promise<{ id: string; status: SimulationStatus }> {
    return this.request(`/simulations/${id}/run`, { method: "POST" });
  }

  status(id: string): Promise<{ id: string; status: SimulationStatus; error: string | null }> {
    return this.request(`/simulations/${id}/status`);
  }

  geometry(id: string): Promise<GeometryView> {
    return this.request(`/simulations/${id}/geometry`);
  }

  resultCsv(id: string): Promise<string> {
    return this.request(`/simulations/${id}/results/csv`, { parse: "text" });
  }

  resultUrl(id: string, kind: "csv" | "eso"): string {
    return `${this.baseUrl}/simulations/${id}/results/${kind}`;
  }

  rerun(id: string, overrides: Partial<SimulationParameters>): Promise<SimulationRecord> {
    return this.request(`/simulations/${id}/rerun`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(overrides),
    });
  }

  createSeries(spec: {
    base_id: string;
    widths: number[];
    depths: number[];
    orientations: number[];
    infiltrations: number[];
  }): Promise<SeriesState> {
    return this.request("/series", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(spec),
    });
  }

  series(id: string): Promise<SeriesState> {
    return this.request(`/series/${id}`);
  }
}
