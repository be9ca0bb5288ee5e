"""EPW weather file parsing and per-step outdoor conditions.

Only the three columns the simulator needs (dry bulb, relative humidity,
station pressure) are parsed eagerly; the uploaded file itself is kept
verbatim for the external-engine run, so the remaining columns pass through
untouched.  EPW hours run 1..24 and are anchored at minute 0 of the hour.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date, datetime, time, timedelta

from .errors import RoomSimError
from .schedules import RunPeriod

_HEADER_KEYWORDS = (
    "LOCATION",
    "DESIGN CONDITIONS",
    "TYPICAL/EXTREME PERIODS",
    "GROUND TEMPERATURES",
    "HOLIDAYS/DAYLIGHT SAVINGS",
    "COMMENTS 1",
    "COMMENTS 2",
    "DATA PERIODS",
)

HOURS_PER_YEAR = 8760
HOURS_PER_LEAP_YEAR = 8784


class WeatherError(RoomSimError):
    code = "invalid_weather"


class BadHeaderError(WeatherError):
    code = "bad_header"


class ShortFileError(WeatherError):
    code = "short_file"


class NonNumericFieldError(WeatherError):
    code = "non_numeric_field"


class OutsideWeatherYearError(WeatherError):
    code = "outside_weather_year"


@dataclass(frozen=True)
class Location:
    name: str
    latitude: float
    longitude: float
    timezone: float
    elevation: float


@dataclass(frozen=True)
class WeatherRecord:
    dry_bulb: float
    relative_humidity: float
    pressure: float


@dataclass(frozen=True)
class WeatherSeries:
    location: Location
    records: tuple[WeatherRecord, ...]

    def __post_init__(self):
        count = len(self.records)
        if count < HOURS_PER_YEAR:
            raise ShortFileError(f"expected at least {HOURS_PER_YEAR} records, got {count}")
        if count not in (HOURS_PER_YEAR, HOURS_PER_LEAP_YEAR):
            raise ShortFileError(f"record count {count} is not a whole weather year")
        for i, record in enumerate(self.records):
            if not 0 <= record.relative_humidity <= 100:
                raise WeatherError(
                    f"record {i}: relative humidity {record.relative_humidity} outside [0, 100]"
                )
            if record.pressure <= 0:
                raise WeatherError(f"record {i}: pressure {record.pressure} must be > 0")

    @property
    def leap(self) -> bool:
        return len(self.records) == HOURS_PER_LEAP_YEAR


def parse_epw(text: str) -> WeatherSeries:
    """Parse EPW text: 8 named header lines, then one CSV row per hour."""
    lines = [line for line in text.splitlines() if line.strip()]
    if len(lines) < len(_HEADER_KEYWORDS):
        raise BadHeaderError("EPW file shorter than its 8 header lines")
    for expected, line in zip(_HEADER_KEYWORDS, lines):
        if not line.upper().startswith(expected):
            raise BadHeaderError(f"expected header line starting {expected!r}")

    location_fields = lines[0].split(",")
    if len(location_fields) < 10:
        raise BadHeaderError("LOCATION header has too few fields")
    try:
        location = Location(
            name=location_fields[1].strip(),
            latitude=float(location_fields[6]),
            longitude=float(location_fields[7]),
            timezone=float(location_fields[8]),
            elevation=float(location_fields[9]),
        )
    except ValueError:
        raise NonNumericFieldError("LOCATION header has non-numeric coordinates") from None

    records: list[WeatherRecord] = []
    for line_number, line in enumerate(lines[8:], 9):
        columns = line.split(",")
        if len(columns) < 10:
            raise ShortFileError(f"line {line_number}: data row has too few columns")
        try:
            records.append(
                WeatherRecord(
                    dry_bulb=float(columns[6]),
                    relative_humidity=float(columns[8]),
                    pressure=float(columns[9]),
                )
            )
        except ValueError:
            raise NonNumericFieldError(
                f"line {line_number}: non-numeric weather value"
            ) from None
    return WeatherSeries(location=location, records=tuple(records))


@dataclass(frozen=True)
class OutdoorConditions:
    """Outdoor state resampled onto the simulation step grid."""

    times: tuple[datetime, ...]
    dry_bulb: tuple[float, ...]
    relative_humidity: tuple[float, ...]
    pressure: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.times)


def _hour_position(series: WeatherSeries, t: datetime) -> float:
    """Fractional hour index of ``t`` within the weather year."""
    reference_year = 2020 if series.leap else 2021
    try:
        day_of_year = date(reference_year, t.month, t.day).timetuple().tm_yday
    except ValueError:
        raise OutsideWeatherYearError(
            f"{t.month:02d}-{t.day:02d} does not exist in the weather year"
        ) from None
    return (day_of_year - 1) * 24 + t.hour + t.minute / 60


def interpolate_at(series: WeatherSeries, t: datetime) -> WeatherRecord:
    """Linear interpolation between the two bracketing hourly records."""
    position = _hour_position(series, t)
    lower = int(position)
    fraction = position - lower
    upper = min(lower + 1, len(series.records) - 1)
    a, b = series.records[lower], series.records[upper]
    return WeatherRecord(
        dry_bulb=a.dry_bulb * (1 - fraction) + b.dry_bulb * fraction,
        relative_humidity=a.relative_humidity * (1 - fraction)
        + b.relative_humidity * fraction,
        pressure=a.pressure * (1 - fraction) + b.pressure * fraction,
    )


def slice_resample(
    series: WeatherSeries, run_period: RunPeriod, step_minutes: int
) -> OutdoorConditions:
    """Outdoor conditions at every simulation step of the run period.

    Values are linearly interpolated between hourly records; a 60-minute step
    reproduces the hourly data exactly.
    """
    if not (1 <= step_minutes <= 60) or 60 % step_minutes != 0:
        raise WeatherError(f"step must divide an hour, got {step_minutes} minutes")
    begin_pos = _hour_position(series, datetime.combine(run_period.begin, time()))
    end_pos = _hour_position(series, datetime.combine(run_period.end, time()))
    if begin_pos > end_pos:
        raise OutsideWeatherYearError("run period wraps around the weather year end")

    start = datetime.combine(run_period.begin, time())
    total_minutes = ((run_period.end - run_period.begin).days + 1) * 24 * 60
    times = tuple(
        start + timedelta(minutes=m) for m in range(0, total_minutes, step_minutes)
    )
    values = [interpolate_at(series, t) for t in times]
    return OutdoorConditions(
        times=times,
        dry_bulb=tuple(v.dry_bulb for v in values),
        relative_humidity=tuple(v.relative_humidity for v in values),
        pressure=tuple(v.pressure for v in values),
    )
