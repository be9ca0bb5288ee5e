"""EnergyPlus Standard Output (ESO) parsing and the tabular result view.

An ESO stream has a data dictionary terminated by ``End of Data Dictionary``
and a data section terminated by ``End of Data``.  Dictionary lines declare
report codes; in the data section, code-2 records carry interval timestamps
and ``code,value`` lines attach to the current timestamp.  Only timestep and
hourly records are turned into rows; daily/monthly/run-period records are
skipped with a warning.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field
from datetime import datetime, timedelta

from .errors import RoomSimError
from .schedules import OccupancyTimeSeries
from .weather import WeatherSeries, interpolate_at

DICTIONARY_TERMINATOR = "End of Data Dictionary"
DATA_TERMINATOR = "End of Data"

# ESO variable names for each result-table column; configurable because the
# names drift across EnergyPlus versions.
DEFAULT_VARIABLE_MAP = {
    "zone_air_temperature": "Zone Mean Air Temperature",
    "zone_co2": "Zone Air CO2 Concentration",
    "zone_relative_humidity": "Zone Air Relative Humidity",
    "outdoor_temperature": "Site Outdoor Air Drybulb Temperature",
    "outdoor_pressure": "Site Outdoor Air Barometric Pressure",
}

_ZONE_COLUMNS = ("zone_air_temperature", "zone_co2", "zone_relative_humidity")
_SITE_COLUMNS = ("outdoor_temperature", "outdoor_pressure")

RESULT_COLUMNS = (
    "timestamp",
    "zone_air_temperature_C",
    "zone_co2_ppm",
    "zone_relative_humidity_percent",
    "outdoor_temperature_C",
    "outdoor_pressure_Pa",
    "occupancy_state",
    "window_state",
)


class EsoError(RoomSimError):
    code = "invalid_eso"


class MissingDictionaryTerminatorError(EsoError):
    code = "missing_dictionary_terminator"


class MissingDataTerminatorError(EsoError):
    code = "missing_data_terminator"


class UnknownReportCodeError(EsoError):
    code = "unknown_report_code"


class VariableNotReportedError(EsoError):
    code = "variable_not_reported"

    def __init__(self, variable: str):
        super().__init__(f"variable not reported: {variable}")
        self.variable = variable


@dataclass(frozen=True)
class EsoDictionaryEntry:
    report_code: int
    key: str
    variable: str
    units: str
    frequency: str


@dataclass
class EsoRow:
    day_of_simulation: int
    month: int
    day: int
    dst: int
    hour: int
    start_minute: int
    end_minute: int
    day_type: str
    values: dict[int, float] = field(default_factory=dict)

    @property
    def start_of_step(self) -> tuple[int, int, int, int]:
        """(month, day, hour0..23, minute) of the interval start."""
        return (self.month, self.day, self.hour - 1, self.start_minute)


@dataclass
class EsoData:
    entries: dict[int, EsoDictionaryEntry]
    rows: list[EsoRow]
    warnings: list[str]

    def find_code(self, variable: str) -> int | None:
        want = variable.lower()
        for code, entry in self.entries.items():
            if entry.variable.lower() == want:
                return code
        return None


_DICT_LINE = re.compile(r"^(\d+),(\d+),(.*)$")
_UNITS = re.compile(r"\[([^\]]*)\]\s*$")


def _parse_dictionary_line(line: str, entries: dict[int, EsoDictionaryEntry]) -> None:
    match = _DICT_LINE.match(line)
    if match is None:
        return  # program-version banner or similar
    code = int(match.group(1))
    if code <= 6:
        return  # structural entries (environment, timestamp formats)
    rest = match.group(3)
    frequency = ""
    if "!" in rest:
        rest, frequency_part = rest.split("!", 1)
        frequency = frequency_part.strip().split(" ")[0].split(",")[0].split("[")[0]
    parts = rest.split(",", 1)
    key = parts[0].strip()
    variable_text = parts[1].strip() if len(parts) > 1 else ""
    units = ""
    units_match = _UNITS.search(variable_text)
    if units_match:
        units = units_match.group(1).strip()
        variable_text = variable_text[: units_match.start()].strip()
    if code in entries:
        raise EsoError(f"duplicate report code {code} in data dictionary")
    entries[code] = EsoDictionaryEntry(
        report_code=code, key=key, variable=variable_text, units=units, frequency=frequency
    )


def parse_eso(text: str) -> EsoData:
    """Parse ESO text into dictionary entries and timestamped rows."""
    entries: dict[int, EsoDictionaryEntry] = {}
    rows: list[EsoRow] = []
    warnings: list[str] = []
    skipped_frequencies: set[str] = set()

    lines = iter(enumerate(text.splitlines(), 1))
    dictionary_done = False
    for _, line in lines:
        if line.strip() == DICTIONARY_TERMINATOR:
            dictionary_done = True
            break
        _parse_dictionary_line(line.strip(), entries)
    if not dictionary_done:
        raise MissingDictionaryTerminatorError("no 'End of Data Dictionary' line")

    data_done = False
    interval_context = False
    for line_number, line in lines:
        stripped = line.strip()
        if stripped == DATA_TERMINATOR:
            data_done = True
            break
        if not stripped:
            continue
        fields = stripped.split(",")
        try:
            code = int(fields[0])
        except ValueError:
            raise EsoError(f"line {line_number}: malformed data record") from None
        if code == 1:
            interval_context = False  # environment header
            continue
        if code == 2:
            if len(fields) < 9:
                raise EsoError(f"line {line_number}: short timestamp record")
            rows.append(
                EsoRow(
                    day_of_simulation=int(float(fields[1])),
                    month=int(float(fields[2])),
                    day=int(float(fields[3])),
                    dst=int(float(fields[4])),
                    hour=int(float(fields[5])),
                    start_minute=int(float(fields[6])),
                    end_minute=int(float(fields[7])),
                    day_type=fields[8].strip(),
                )
            )
            interval_context = True
            continue
        if code in (3, 4, 5, 6):
            label = {3: "daily", 4: "monthly", 5: "run-period", 6: "annual"}[code]
            if label not in skipped_frequencies:
                skipped_frequencies.add(label)
                warnings.append(f"skipping {label} records: only timestep/hourly supported")
            interval_context = False
            continue
        if code not in entries:
            raise UnknownReportCodeError(
                f"line {line_number}: data record cites undeclared code {code}"
            )
        if not interval_context:
            continue  # value belongs to a skipped frequency block
        if not rows:
            raise EsoError(f"line {line_number}: value record before any timestamp")
        rows[-1].values[code] = float(fields[1])
    if not data_done:
        raise MissingDataTerminatorError("no 'End of Data' line")
    return EsoData(entries=entries, rows=rows, warnings=warnings)


@dataclass(frozen=True)
class ResultTable:
    """One row per reporting interval with the seven plottable factors."""

    timestamps: tuple[datetime, ...]
    zone_air_temperature: tuple[float, ...]
    zone_co2: tuple[float, ...]
    zone_relative_humidity: tuple[float, ...]
    outdoor_temperature: tuple[float, ...]
    outdoor_pressure: tuple[float, ...]
    occupancy_state: tuple[int, ...]
    window_state: tuple[int, ...]

    def __post_init__(self):
        n = len(self.timestamps)
        for column in (
            self.zone_air_temperature,
            self.zone_co2,
            self.zone_relative_humidity,
            self.outdoor_temperature,
            self.outdoor_pressure,
            self.occupancy_state,
            self.window_state,
        ):
            if len(column) != n:
                raise EsoError("result table columns have unequal lengths")
        if any(b <= a for a, b in zip(self.timestamps, self.timestamps[1:])):
            raise EsoError("result table timestamps are not strictly increasing")

    def __len__(self) -> int:
        return len(self.timestamps)


def _year_lookup(series: OccupancyTimeSeries) -> dict[tuple[int, int], int]:
    lookup: dict[tuple[int, int], int] = {}
    day = series.start.date()
    last = (series.end - timedelta(minutes=1)).date()
    while day <= last:
        lookup.setdefault((day.month, day.day), day.year)
        day += timedelta(days=1)
    return lookup


def to_result_table(
    eso: EsoData,
    occupancy: OccupancyTimeSeries,
    weather: WeatherSeries,
    variable_map: dict[str, str] | None = None,
) -> ResultTable:
    """Join ESO zone variables with the input series and outdoor weather.

    Zone variables must be reported (VariableNotReportedError otherwise); the
    two site variables are taken from the ESO when present and interpolated
    from the weather file when not.
    """
    names = DEFAULT_VARIABLE_MAP | (variable_map or {})
    codes: dict[str, int | None] = {}
    for column in _ZONE_COLUMNS:
        code = eso.find_code(names[column])
        if code is None:
            raise VariableNotReportedError(names[column])
        codes[column] = code
    for column in _SITE_COLUMNS:
        codes[column] = eso.find_code(names[column])

    years = _year_lookup(occupancy)
    timestamps: list[datetime] = []
    columns: dict[str, list[float]] = {name: [] for name in codes}
    occupants: list[int] = []
    windows: list[int] = []
    for row in eso.rows:
        month, day, hour, minute = row.start_of_step
        year = years.get((month, day))
        if year is None:
            raise EsoError(
                f"row {month:02d}-{day:02d} is outside the occupancy series range"
            )
        t = datetime(year, month, day, hour, minute)
        timestamps.append(t)
        for column, code in codes.items():
            if code is not None:
                try:
                    columns[column].append(row.values[code])
                except KeyError:
                    raise EsoError(
                        f"{names[column]} missing at {t.isoformat()}"
                    ) from None
            else:
                record = interpolate_at(weather, t)
                value = (
                    record.dry_bulb
                    if column == "outdoor_temperature"
                    else record.pressure
                )
                columns[column].append(value)
        sample = occupancy.sample_at(t)
        occupants.append(sample.occupants)
        windows.append(sample.window)

    return ResultTable(
        timestamps=tuple(timestamps),
        zone_air_temperature=tuple(columns["zone_air_temperature"]),
        zone_co2=tuple(columns["zone_co2"]),
        zone_relative_humidity=tuple(columns["zone_relative_humidity"]),
        outdoor_temperature=tuple(columns["outdoor_temperature"]),
        outdoor_pressure=tuple(columns["outdoor_pressure"]),
        occupancy_state=tuple(occupants),
        window_state=tuple(windows),
    )


def write_csv(table: ResultTable) -> str:
    """RFC-4180-style CSV: header row, ISO-8601 timestamps, '.' decimals."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(RESULT_COLUMNS)
    for i, t in enumerate(table.timestamps):
        writer.writerow(
            (
                t.isoformat(),
                repr(table.zone_air_temperature[i]),
                repr(table.zone_co2[i]),
                repr(table.zone_relative_humidity[i]),
                repr(table.outdoor_temperature[i]),
                repr(table.outdoor_pressure[i]),
                str(table.occupancy_state[i]),
                str(table.window_state[i]),
            )
        )
    return buffer.getvalue()
