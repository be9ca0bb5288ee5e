/**
 * CSV helpers: build occupancy CSV text from the manual grid editor, and turn
 * a downloaded result CSV into plottable series.
 */

export interface OccupancyGrid {
  /** first day of the grid, YYYY-MM-DD */
  startDate: string;
  stepMinutes: number;
  /** one entry per step per day, day-major */
  occupants: number[];
  windowOpen: (0 | 1)[];
}

export function slotsPerDay(stepMinutes: number): number {
  if (stepMinutes < 1 || stepMinutes > 60 || 60 % stepMinutes !== 0) {
    throw new Error(`step must divide an hour, got ${stepMinutes}`);
  }
  return (24 * 60) / stepMinutes;
}

export function emptyGrid(
  startDate: string,
  stepMinutes: number,
  days: number,
): OccupancyGrid {
  const slots = slotsPerDay(stepMinutes) * days;
  return {
    startDate,
    stepMinutes,
    occupants: new Array(slots).fill(0),
    windowOpen: new Array(slots).fill(0),
  };
}

/** Fill [fromMinute, toMinute) of one day with an occupant count. */
export function fillInterval(
  grid: OccupancyGrid,
  day: number,
  fromMinute: number,
  toMinute: number,
  occupants: number,
  windowOpen?: 0 | 1,
): void {
  const perDay = slotsPerDay(grid.stepMinutes);
  const first = day * perDay + Math.floor(fromMinute / grid.stepMinutes);
  const last = day * perDay + Math.ceil(toMinute / grid.stepMinutes);
  for (let i = first; i < last && i < grid.occupants.length; i++) {
    grid.occupants[i] = occupants;
    if (windowOpen !== undefined) grid.windowOpen[i] = windowOpen;
  }
}

function pad(value: number): string {
  return String(value).padStart(2, "0");
}

/** Serialize the grid to the backend's occupancy CSV format. */
export function gridToCsv(grid: OccupancyGrid): string {
  const [year, month, day] = grid.startDate.split("-").map(Number);
  if (!year || !month || !day) {
    throw new Error(`bad start date ${grid.startDate}`);
  }
  const start = Date.UTC(year, month - 1, day);
  const lines = ["timestamp,occupancy,window"];
  for (let i = 0; i < grid.occupants.length; i++) {
    const at = new Date(start + i * grid.stepMinutes * 60_000);
    const stamp =
      `${at.getUTCFullYear()}-${pad(at.getUTCMonth() + 1)}-${pad(at.getUTCDate())}` +
      `T${pad(at.getUTCHours())}:${pad(at.getUTCMinutes())}`;
    lines.push(`${stamp},${grid.occupants[i]},${grid.windowOpen[i]}`);
  }
  return lines.join("\n") + "\n";
}

/** The seven plottable factors, keyed by result CSV column name. */
export const PLOT_FACTORS: { column: string; label: string; unit: string }[] = [
  { column: "zone_air_temperature_C", label: "Zone air temperature", unit: "°C" },
  { column: "zone_co2_ppm", label: "Zone CO₂ concentration", unit: "ppm" },
  { column: "zone_relative_humidity_percent", label: "Zone relative humidity", unit: "%" },
  { column: "outdoor_temperature_C", label: "Outdoor temperature", unit: "°C" },
  { column: "outdoor_pressure_Pa", label: "Outdoor air pressure", unit: "Pa" },
  { column: "occupancy_state", label: "Occupancy state", unit: "persons" },
  { column: "window_state", label: "Window state", unit: "open" },
];

export interface ResultSeries {
  /** epoch seconds, for time axes */
  timestamps: number[];
  columns: Map<string, number[]>;
}

export function parseResultCsv(text: string): ResultSeries {
  const lines = text.trim().split(/\r?\n/);
  if (lines.length === 0) throw new Error("empty result CSV");
  const header = lines[0].split(",");
  const timestampIndex = header.indexOf("timestamp");
  if (timestampIndex < 0) throw new Error("result CSV has no timestamp column");
  const columns = new Map<string, number[]>();
  for (const name of header) {
    if (name !== "timestamp") columns.set(name, []);
  }
  const timestamps: number[] = [];
  for (const line of lines.slice(1)) {
    if (!line) continue;
    const cells = line.split(",");
    timestamps.push(Date.parse(cells[timestampIndex] + "Z") / 1000);
    header.forEach((name, i) => {
      if (name !== "timestamp") columns.get(name)!.push(Number(cells[i]));
    });
  }
  return { timestamps, columns };
}
