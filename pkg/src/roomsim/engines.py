"""Simulation backends: a built-in first-order surrogate and an adapter that
drives an external EnergyPlus executable.

Both produce the same shape of output: ESO text plus the joined result table.
The surrogate integrates well-mixed CO2, temperature and humidity-ratio
balances with explicit Euler substeps of at most 60 s, which keeps runs
deterministic and bit-reproducible.  It is a pipeline stand-in, not a
building-physics competitor: solar gains and wall mass beyond a single
envelope time constant are ignored.
"""

from __future__ import annotations

import math
import shutil
import subprocess
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

from .errors import RoomSimError
from .eso import (
    DATA_TERMINATOR,
    DEFAULT_VARIABLE_MAP,
    DICTIONARY_TERMINATOR,
    ResultTable,
    parse_eso,
    to_result_table,
)
from .idf import IdfDocument, IdfObject, serialize_idf
from .room import ensure_constant_schedule, zone_volume
from .schedules import WEEKDAY_NAMES, OccupancyTimeSeries, RunPeriod
from .weather import WeatherSeries, slice_resample

RHO_AIR = 1.2  # kg/m3
MAX_SUBSTEP_S = 60.0


class EngineError(RoomSimError):
    code = "engine_error"


class ExecutableNotFoundError(EngineError):
    code = "executable_not_found"


class ProcessFailedError(EngineError):
    code = "process_failed"

    def __init__(self, message: str, log: str = ""):
        super().__init__(message)
        self.log = log


class EsoMissingError(EngineError):
    code = "eso_missing"


class MissingInfiltrationObjectError(EngineError):
    code = "missing_infiltration_object"


@dataclass(frozen=True)
class SurrogateParams:
    """Physical constants of the surrogate balances (SI units throughout)."""

    co2_gen_per_person: float = 5.0e-6  # m3/s of pure CO2
    outdoor_co2: float = 400.0  # ppm
    heat_gain_per_person: float = 100.0  # W
    air_heat_capacity: float = 1206.0  # J/(m3*K)
    envelope_time_constant: float = 7200.0  # s, windows closed
    window_open_ach: float = 5.0  # 1/h
    moisture_gen_per_person: float = 1.5e-5  # kg/s

    def __post_init__(self):
        if self.outdoor_co2 < 0:
            raise EngineError("outdoor CO2 must be >= 0")
        for label in (
            "co2_gen_per_person",
            "heat_gain_per_person",
            "air_heat_capacity",
            "envelope_time_constant",
            "window_open_ach",
            "moisture_gen_per_person",
        ):
            if not getattr(self, label) > 0:
                raise EngineError(f"{label} must be positive")


@dataclass(frozen=True)
class SimulationJob:
    """A fully prepared run: model, weather, time range and driving series."""

    model: IdfDocument
    weather: WeatherSeries
    epw_text: str
    run_period: RunPeriod
    step_minutes: int
    occupancy: OccupancyTimeSeries
    engine: str = "surrogate"

    def __post_init__(self):
        if not (1 <= self.step_minutes <= 60) or 60 % self.step_minutes != 0:
            raise EngineError(f"step must divide an hour, got {self.step_minutes}")
        if not self.occupancy.covers(self.run_period):
            raise EngineError("occupancy series does not cover the run period")

    @property
    def expected_rows(self) -> int:
        days = (self.run_period.end - self.run_period.begin).days + 1
        return days * 24 * 60 // self.step_minutes


@dataclass(frozen=True)
class EngineResult:
    eso_text: str
    result_table: ResultTable
    status: str
    log: str = ""


def exchange_rate(
    infiltration_ach: float, window_open: int, params: SurrogateParams
) -> float:
    """Air-exchange rate in 1/s; an open window adds its ACH on top."""
    ach = infiltration_ach + (params.window_open_ach if window_open else 0.0)
    return ach / 3600.0


def _substeps(dt: float) -> tuple[int, float]:
    count = max(1, math.ceil(dt / MAX_SUBSTEP_S))
    return count, dt / count


def co2_step(
    c_ppm: float,
    occupants: int,
    lam: float,
    params: SurrogateParams,
    volume: float,
    dt: float,
) -> float:
    """Explicit-Euler update of dC/dt = 1e6*G_p*N/V + lam*(C_out - C)."""
    count, h = _substeps(dt)
    source = 1e6 * params.co2_gen_per_person * occupants / volume
    c = c_ppm
    for _ in range(count):
        c += h * (source + lam * (params.outdoor_co2 - c))
    return c


def temp_step(
    t_zone: float,
    t_out: float,
    occupants: int,
    lam: float,
    params: SurrogateParams,
    volume: float,
    dt: float,
) -> float:
    """dT/dt = (T_out - T)/tau_eff + N*q_p/(c_air*V); exchange rates add as
    1/tau terms on top of the envelope time constant."""
    count, h = _substeps(dt)
    inv_tau = 1.0 / params.envelope_time_constant + lam
    gain = occupants * params.heat_gain_per_person / (params.air_heat_capacity * volume)
    t = t_zone
    for _ in range(count):
        t += h * ((t_out - t) * inv_tau + gain)
    return t


def humidity_step(
    w_zone: float,
    w_out: float,
    occupants: int,
    lam: float,
    params: SurrogateParams,
    volume: float,
    dt: float,
) -> float:
    """dw/dt = lam*(w_out - w) + N*m_p/(rho_air*V) on the humidity ratio."""
    count, h = _substeps(dt)
    source = occupants * params.moisture_gen_per_person / (RHO_AIR * volume)
    w = w_zone
    for _ in range(count):
        w += h * (lam * (w_out - w) + source)
    return w


def saturation_pressure(t_celsius: float) -> float:
    """Magnus formula, Pa."""
    return 610.94 * math.exp(17.625 * t_celsius / (t_celsius + 243.04))


def humidity_ratio(t_celsius: float, relative_humidity: float, pressure: float) -> float:
    vapor = relative_humidity / 100.0 * saturation_pressure(t_celsius)
    return 0.622 * vapor / (pressure - vapor)


def relative_humidity_from_ratio(w: float, t_celsius: float, pressure: float) -> float:
    vapor = w * pressure / (0.622 + w)
    rh = 100.0 * vapor / saturation_pressure(t_celsius)
    return min(max(rh, 0.0), 100.0)


def infiltration_ach_of(model: IdfDocument) -> float:
    """Read the ACH value of the model's design infiltration object."""
    for obj in model.find_objects("ZoneInfiltration:DesignFlowRate"):
        if obj.field(3).lower() != "airchanges/hour":
            continue
        try:
            return float(obj.field(7))
        except ValueError:
            break
    raise MissingInfiltrationObjectError(
        "model has no ZoneInfiltration:DesignFlowRate object in AirChanges/Hour mode"
    )


def _zone_name(model: IdfDocument) -> str:
    zones = model.find_objects("Zone")
    if not zones:
        raise EngineError("model has no zone")
    return zones[0].name


_ESO_CODES = {
    "zone_air_temperature": 7,
    "zone_co2": 8,
    "zone_relative_humidity": 9,
    "outdoor_temperature": 10,
    "outdoor_pressure": 11,
}

_ESO_UNITS = {
    "zone_air_temperature": "C",
    "zone_co2": "ppm",
    "zone_relative_humidity": "%",
    "outdoor_temperature": "C",
    "outdoor_pressure": "Pa",
}


def _emit_eso(
    zone_name: str,
    run_period: RunPeriod,
    step_minutes: int,
    times: tuple[datetime, ...],
    columns: dict[str, list[float]],
) -> str:
    lines = ["Program Version,Surrogate Room Engine"]
    lines.append(
        "1,5,Environment Title[],Latitude[deg],Longitude[deg],Time Zone[],Elevation[m]"
    )
    lines.append(
        "2,8,Day of Simulation[],Month[],Day of Month[],DST Indicator[1=yes 0=no],"
        "Hour[],StartMinute[],EndMinute[],DayType"
    )
    zone_key = zone_name.upper()
    for column, code in _ESO_CODES.items():
        key = zone_key if column.startswith("zone_") else "Environment"
        variable = DEFAULT_VARIABLE_MAP[column]
        units = _ESO_UNITS[column]
        lines.append(f"{code},2,{key},{variable} [{units}] !TimeStep")
    lines.append(DICTIONARY_TERMINATOR)
    lines.append("1,SURROGATE RUN,0.0,0.0,0.0,0.0")
    for i, t in enumerate(times):
        day_of_sim = (t.date() - run_period.begin).days + 1
        minute_of_day = t.hour * 60 + t.minute
        hour = minute_of_day // 60 + 1
        start_minute = minute_of_day % 60
        day_type = WEEKDAY_NAMES[(t.weekday() + 1) % 7]
        lines.append(
            f"2,{day_of_sim},{t.month},{t.day},0,{hour},"
            f"{start_minute}.00,{start_minute + step_minutes}.00,{day_type}"
        )
        for column, code in _ESO_CODES.items():
            lines.append(f"{code},{columns[column][i]!r}")
    lines.append(DATA_TERMINATOR)
    return "\n".join(lines) + "\n"


def run_surrogate(job: SimulationJob, params: SurrogateParams | None = None) -> EngineResult:
    """Integrate the three balances over the run period at the job step.

    Initial state is the first outdoor sample (temperature and humidity) and
    outdoor CO2.  Emits conformant ESO text alongside the in-memory table.
    """
    params = params or SurrogateParams()
    volume = zone_volume(job.model)
    infiltration = infiltration_ach_of(job.model)
    zone = _zone_name(job.model)
    outdoor = slice_resample(job.weather, job.run_period, job.step_minutes)

    temperature = outdoor.dry_bulb[0]
    co2 = params.outdoor_co2
    w = humidity_ratio(
        outdoor.dry_bulb[0], outdoor.relative_humidity[0], outdoor.pressure[0]
    )
    dt = job.step_minutes * 60.0

    columns: dict[str, list[float]] = {name: [] for name in _ESO_CODES}
    occupants_column: list[int] = []
    window_column: list[int] = []
    for i, t in enumerate(outdoor.times):
        sample = job.occupancy.sample_at(t)
        lam = exchange_rate(infiltration, sample.window, params)
        w_out = humidity_ratio(
            outdoor.dry_bulb[i], outdoor.relative_humidity[i], outdoor.pressure[i]
        )
        co2 = co2_step(co2, sample.occupants, lam, params, volume, dt)
        temperature = temp_step(
            temperature, outdoor.dry_bulb[i], sample.occupants, lam, params, volume, dt
        )
        w = humidity_step(w, w_out, sample.occupants, lam, params, volume, dt)

        columns["zone_air_temperature"].append(temperature)
        columns["zone_co2"].append(co2)
        columns["zone_relative_humidity"].append(
            relative_humidity_from_ratio(w, temperature, outdoor.pressure[i])
        )
        columns["outdoor_temperature"].append(outdoor.dry_bulb[i])
        columns["outdoor_pressure"].append(outdoor.pressure[i])
        occupants_column.append(sample.occupants)
        window_column.append(sample.window)

    table = ResultTable(
        timestamps=outdoor.times,
        zone_air_temperature=tuple(columns["zone_air_temperature"]),
        zone_co2=tuple(columns["zone_co2"]),
        zone_relative_humidity=tuple(columns["zone_relative_humidity"]),
        outdoor_temperature=tuple(columns["outdoor_temperature"]),
        outdoor_pressure=tuple(columns["outdoor_pressure"]),
        occupancy_state=tuple(occupants_column),
        window_state=tuple(window_column),
    )
    if len(table) != job.expected_rows:
        raise EngineError(
            f"surrogate produced {len(table)} rows, expected {job.expected_rows}"
        )
    eso_text = _emit_eso(zone, job.run_period, job.step_minutes, outdoor.times, columns)
    return EngineResult(eso_text=eso_text, result_table=table, status="success")


DEFAULT_ARGS_TEMPLATE = ("-w", "{epw}", "-d", "{workdir}", "{idf}")


def _inject_output_requests(
    model: IdfDocument, params: SurrogateParams, step_minutes: int
) -> IdfDocument:
    """Add the Output:Variable requests and CO2-balance prerequisites the
    result table relies on, when the source file does not already have them."""
    requested = {
        obj.field(1).lower() for obj in model.find_objects("Output:Variable")
    }
    additions = [
        IdfObject("Output:Variable", ("*", variable, "Timestep"))
        for variable in DEFAULT_VARIABLE_MAP.values()
        if variable.lower() not in requested
    ]
    model = model.append_objects(additions)

    model = ensure_constant_schedule(model, "outdoor_co2", params.outdoor_co2)
    # singleton classes: replace whatever is there rather than keying on a field
    model = model.remove_objects("ZoneAirContaminantBalance").append_objects(
        [IdfObject("ZoneAirContaminantBalance", ("Yes", "outdoor_co2"))]
    )
    model = model.remove_objects("Timestep").append_objects(
        [IdfObject("Timestep", (str(60 // step_minutes),))]
    )
    return model


def run_energyplus(
    job: SimulationJob,
    executable: str | Path,
    workdir: str | Path,
    params: SurrogateParams | None = None,
    variable_map: dict[str, str] | None = None,
    args_template: tuple[str, ...] = DEFAULT_ARGS_TEMPLATE,
    timeout: float | None = None,
) -> EngineResult:
    """Run the external EnergyPlus executable in a private working directory.

    The model is serialized to ``in.idf`` and the uploaded EPW written
    verbatim; missing output requests are injected first.  A nonzero exit or
    a severe entry in ``eplusout.err`` raises ProcessFailedError with the log.
    """
    exe = shutil.which(str(executable))
    if exe is None:
        raise ExecutableNotFoundError(f"EnergyPlus executable not found: {executable}")
    params = params or SurrogateParams()
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)

    model = _inject_output_requests(job.model, params, job.step_minutes)
    idf_path = workdir / "in.idf"
    epw_path = workdir / "in.epw"
    idf_path.write_text(serialize_idf(model), encoding="utf-8")
    epw_path.write_text(job.epw_text, encoding="utf-8")

    substitutions = {"epw": str(epw_path), "workdir": str(workdir), "idf": str(idf_path)}
    argv = [exe] + [arg.format(**substitutions) for arg in args_template]
    process = subprocess.run(
        argv, capture_output=True, text=True, cwd=workdir, timeout=timeout
    )
    err_path = workdir / "eplusout.err"
    err_text = err_path.read_text(encoding="utf-8", errors="replace") if err_path.exists() else ""
    log = "\n".join(part for part in (process.stdout, process.stderr, err_text) if part)
    if process.returncode != 0 or "** Severe" in err_text:
        raise ProcessFailedError(
            f"EnergyPlus exited with {process.returncode}", log=log
        )
    eso_path = workdir / "eplusout.eso"
    if not eso_path.exists():
        raise EsoMissingError(f"EnergyPlus produced no {eso_path.name}")
    eso = parse_eso(eso_path.read_text(encoding="utf-8", errors="replace"))
    table = to_result_table(eso, job.occupancy, job.weather, variable_map)
    return EngineResult(
        eso_text=eso_path.read_text(encoding="utf-8", errors="replace"),
        result_table=table,
        status="success",
        log=log,
    )
