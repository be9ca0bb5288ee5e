"""Compilation of tabular occupancy/window time series into the EnergyPlus
year/week/day schedule hierarchy, plus the inverse evaluator used to verify it.

Input is a uniform-step series of (occupant count, window state) samples whose
timestamps label the *start* of each step.  Occupancy is emitted as a fraction
of the series' peak count so it can drive a People object; window state is
emitted as 0/1.  ``Until: t`` in a compiled day covers times up to and
including t in the EnergyPlus reporting convention, which labels step *ends*;
the evaluator therefore answers start-labeled queries with the first interval
whose boundary lies strictly after the query time.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import date, datetime, time, timedelta
from enum import Enum
from typing import NamedTuple

from .errors import RoomSimError, ZoneCountMismatchError
from .idf import IdfDocument, IdfObject
from .room import ensure_constant_schedule, ensure_schedule_type_limits

WEEKDAY_NAMES = (
    "Sunday",
    "Monday",
    "Tuesday",
    "Wednesday",
    "Thursday",
    "Friday",
    "Saturday",
)

MINUTES_PER_DAY = 24 * 60


class ScheduleError(RoomSimError):
    code = "invalid_schedule"


class BadHeaderError(ScheduleError):
    code = "bad_header"


class IrregularStepError(ScheduleError):
    code = "irregular_step"


class NonMonotonicTimestampsError(ScheduleError):
    code = "non_monotonic_timestamps"


class NegativeOccupancyError(ScheduleError):
    code = "negative_occupancy"


class BadValueError(ScheduleError):
    code = "bad_value"


class DateNotCoveredError(ScheduleError):
    code = "date_not_covered"


class OutsideRunPeriodError(ScheduleError):
    code = "outside_run_period"


class Quantity(str, Enum):
    OCCUPANCY = "occupancy"
    WINDOW = "window"

    @property
    def prefix(self) -> str:
        return "occ" if self is Quantity.OCCUPANCY else "win"


class Sample(NamedTuple):
    occupants: int
    window: int


def _weekday_name(d: date) -> str:
    return WEEKDAY_NAMES[(d.weekday() + 1) % 7]


def _sunday_of(d: date) -> date:
    return d - timedelta(days=(d.weekday() + 1) % 7)


@dataclass(frozen=True)
class RunPeriod:
    """Simulated calendar range; the start weekday must match the begin date."""

    begin: date
    end: date
    start_weekday: str

    def __post_init__(self):
        if self.begin > self.end:
            raise ScheduleError(f"run period begin {self.begin} after end {self.end}")
        actual = _weekday_name(self.begin)
        if self.start_weekday != actual:
            raise ScheduleError(
                f"start weekday {self.start_weekday!r} does not match "
                f"{self.begin} ({actual})"
            )

    @classmethod
    def of(cls, begin: date, end: date) -> "RunPeriod":
        return cls(begin=begin, end=end, start_weekday=_weekday_name(begin))

    def dates(self) -> list[date]:
        count = (self.end - self.begin).days + 1
        return [self.begin + timedelta(days=i) for i in range(count)]


@dataclass(frozen=True)
class OccupancyTimeSeries:
    """Uniform-step samples of occupant count and window state."""

    start: datetime
    step_minutes: int
    samples: tuple[Sample, ...]

    def __post_init__(self):
        if not (1 <= self.step_minutes <= 60) or 60 % self.step_minutes != 0:
            raise IrregularStepError(
                f"step must divide an hour, got {self.step_minutes} minutes"
            )
        if not self.samples:
            raise ScheduleError("series has no samples")
        if self.start.tzinfo is not None:
            raise BadValueError("series start must be a naive local timestamp")
        if self.start.second or self.start.microsecond:
            raise BadValueError("series start must have minute resolution")
        samples = tuple(Sample(int(o), int(w)) for o, w in self.samples)
        for sample in samples:
            if sample.occupants < 0:
                raise NegativeOccupancyError(
                    f"occupant count must be >= 0, got {sample.occupants}"
                )
            if sample.window not in (0, 1):
                raise BadValueError(f"window state must be 0 or 1, got {sample.window}")
        object.__setattr__(self, "samples", samples)

    @property
    def n_max(self) -> int:
        return max(s.occupants for s in self.samples)

    @property
    def end(self) -> datetime:
        """First instant no longer covered by the series."""
        return self.start + timedelta(minutes=self.step_minutes * len(self.samples))

    def index_of(self, t: datetime) -> int | None:
        """Index of the sample starting exactly at ``t``, if any."""
        delta = (t - self.start).total_seconds()
        step = self.step_minutes * 60
        if delta < 0 or delta % step != 0:
            return None
        index = int(delta // step)
        return index if index < len(self.samples) else None

    def sample_at(self, t: datetime) -> Sample:
        """Sample covering instant ``t`` (floor to the step grid)."""
        delta = (t - self.start).total_seconds()
        step = self.step_minutes * 60
        index = int(delta // step)
        if delta < 0 or index >= len(self.samples):
            raise DateNotCoveredError(f"{t.isoformat()} not covered by series")
        return self.samples[index]

    def covers(self, run_period: RunPeriod) -> bool:
        begin = datetime.combine(run_period.begin, time())
        end = datetime.combine(run_period.end + timedelta(days=1), time())
        aligned = (begin - self.start).total_seconds() % (self.step_minutes * 60) == 0
        return self.start <= begin and end <= self.end and aligned


def parse_occupancy_csv(text: str) -> OccupancyTimeSeries:
    """Parse ``timestamp,occupancy[,window]`` CSV into a series.

    Timestamps must be ISO-8601, strictly increasing and uniformly spaced; a
    missing window column defaults to closed (0).
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip().lower() for h in next(reader)]
    except StopIteration:
        raise BadHeaderError("occupancy CSV is empty") from None
    if header not in (["timestamp", "occupancy"], ["timestamp", "occupancy", "window"]):
        raise BadHeaderError(
            "header must be 'timestamp,occupancy' or 'timestamp,occupancy,window', "
            f"got {','.join(header)!r}"
        )
    has_window = len(header) == 3

    timestamps: list[datetime] = []
    samples: list[Sample] = []
    for row_number, row in enumerate(reader, 2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise BadValueError(f"row {row_number}: expected {len(header)} columns")
        try:
            stamp = datetime.fromisoformat(row[0].strip())
        except ValueError:
            raise BadValueError(
                f"row {row_number}: bad timestamp {row[0].strip()!r}"
            ) from None
        if stamp.tzinfo is not None:
            raise BadValueError(f"row {row_number}: timezone-aware timestamps unsupported")
        if stamp.second or stamp.microsecond:
            raise BadValueError(f"row {row_number}: timestamps must be minute-resolution")
        occupants = _int_cell(row[1], row_number, "occupancy")
        if occupants < 0:
            raise NegativeOccupancyError(f"row {row_number}: occupancy {occupants} < 0")
        window = _int_cell(row[2], row_number, "window") if has_window else 0
        if window not in (0, 1):
            raise BadValueError(f"row {row_number}: window state must be 0 or 1")
        timestamps.append(stamp)
        samples.append(Sample(occupants, window))

    if len(timestamps) < 2:
        raise IrregularStepError("need at least two rows to infer the sampling step")
    first_delta = timestamps[1] - timestamps[0]
    for i in range(1, len(timestamps)):
        delta = timestamps[i] - timestamps[i - 1]
        if delta <= timedelta(0):
            raise NonMonotonicTimestampsError(
                f"row {i + 2}: timestamp {timestamps[i]} not after {timestamps[i - 1]}"
            )
        if delta != first_delta:
            raise IrregularStepError(
                f"row {i + 2}: step {delta} differs from {first_delta}"
            )
    step_seconds = first_delta.total_seconds()
    if step_seconds % 60 != 0:
        raise IrregularStepError(f"step {first_delta} is not a whole number of minutes")
    step_minutes = int(step_seconds // 60)
    if not (1 <= step_minutes <= 60) or 60 % step_minutes != 0:
        raise IrregularStepError(f"step must divide an hour, got {step_minutes} minutes")
    return OccupancyTimeSeries(
        start=timestamps[0], step_minutes=step_minutes, samples=tuple(samples)
    )


def _int_cell(cell: str, row_number: int, label: str) -> int:
    try:
        value = float(cell.strip())
    except ValueError:
        raise BadValueError(f"row {row_number}: bad {label} value {cell.strip()!r}") from None
    if not value.is_integer():
        raise BadValueError(f"row {row_number}: {label} must be an integer, got {cell.strip()}")
    return int(value)


@dataclass(frozen=True)
class DaySchedule:
    """Run-length-encoded values for one day as (until-minute, value) pairs."""

    name: str
    day: date | None
    intervals: tuple[tuple[int, float], ...]

    def __post_init__(self):
        untils = [u for u, _ in self.intervals]
        if not untils or untils[-1] != MINUTES_PER_DAY:
            raise ScheduleError(f"day schedule {self.name!r} must end at 24:00")
        if any(b <= a for a, b in zip(untils, untils[1:])):
            raise ScheduleError(f"day schedule {self.name!r} intervals not increasing")
        values = [v for _, v in self.intervals]
        if any(a == b for a, b in zip(values, values[1:])):
            raise ScheduleError(f"day schedule {self.name!r} has mergeable intervals")

    def value_after(self, minute_of_day: int) -> float:
        """Value covering the step that starts at ``minute_of_day``."""
        for until, value in self.intervals:
            if until > minute_of_day:
                return value
        raise ScheduleError(f"minute {minute_of_day} beyond 24:00")


@dataclass(frozen=True)
class WeekSchedule:
    name: str
    weekday_day_names: tuple[str, ...]  # Sunday..Saturday

    def __post_init__(self):
        if len(self.weekday_day_names) != 7:
            raise ScheduleError("week schedule needs 7 weekday entries")


@dataclass(frozen=True)
class YearSpan:
    week_name: str
    from_date: date
    to_date: date


@dataclass(frozen=True)
class CompiledSchedules:
    """The full day/week/year hierarchy for one quantity over a run period."""

    quantity: Quantity
    run_period: RunPeriod
    day_schedules: dict[date, DaySchedule]
    zero_day: DaySchedule
    week_schedules: dict[date, WeekSchedule]  # keyed by each week's Sunday
    year_spans: tuple[YearSpan, ...]
    n_max: int | None = None

    @property
    def year_name(self) -> str:
        return f"{self.quantity.prefix}_year"

    def day_by_name(self, name: str) -> DaySchedule:
        if name == self.zero_day.name:
            return self.zero_day
        for schedule in self.day_schedules.values():
            if schedule.name == name:
                return schedule
        raise ScheduleError(f"unknown day schedule {name!r}")


def compile_day(
    series: OccupancyTimeSeries, day: date, quantity: Quantity, name: str
) -> DaySchedule:
    """Run-length encode one date of the series into until-intervals.

    Occupancy is scaled to fractions of the series-wide peak count; a peak of
    zero yields an all-zero schedule.
    """
    n_max = series.n_max
    values: list[float] = []
    for minute in range(0, MINUTES_PER_DAY, series.step_minutes):
        t = datetime.combine(day, time(minute // 60, minute % 60))
        index = series.index_of(t)
        if index is None:
            raise DateNotCoveredError(f"series does not cover {t.isoformat()}")
        sample = series.samples[index]
        if quantity is Quantity.OCCUPANCY:
            values.append(sample.occupants / n_max if n_max else 0.0)
        else:
            values.append(float(sample.window))

    intervals: list[tuple[int, float]] = []
    current = values[0]
    for position, value in enumerate(values[1:], 1):
        if value != current:
            intervals.append((position * series.step_minutes, current))
            current = value
    intervals.append((MINUTES_PER_DAY, current))
    return DaySchedule(name=name, day=day, intervals=tuple(intervals))


def compile_schedules(
    series: OccupancyTimeSeries, run_period: RunPeriod, quantity: Quantity
) -> CompiledSchedules:
    """Build the day/week/year hierarchy covering ``run_period``.

    Weeks are Sunday-started; dates outside the run period and the special
    day types fall back to a shared all-zero day schedule.
    """
    prefix = quantity.prefix
    zero_day = DaySchedule(
        name=f"{prefix}_d_zero", day=None, intervals=((MINUTES_PER_DAY, 0.0),)
    )
    day_schedules: dict[date, DaySchedule] = {}
    for day in run_period.dates():
        day_schedules[day] = compile_day(
            series, day, quantity, f"{prefix}_d_{day:%Y%m%d}"
        )

    week_schedules: dict[date, WeekSchedule] = {}
    spans: list[YearSpan] = []
    sunday = _sunday_of(run_period.begin)
    while sunday <= run_period.end:
        names = []
        for offset in range(7):
            day = sunday + timedelta(days=offset)
            schedule = day_schedules.get(day)
            names.append(schedule.name if schedule else zero_day.name)
        week = WeekSchedule(
            name=f"{prefix}_w_{sunday:%Y%m%d}", weekday_day_names=tuple(names)
        )
        week_schedules[sunday] = week
        spans.append(
            YearSpan(
                week_name=week.name,
                from_date=max(sunday, run_period.begin),
                to_date=min(sunday + timedelta(days=6), run_period.end),
            )
        )
        sunday += timedelta(days=7)

    return CompiledSchedules(
        quantity=quantity,
        run_period=run_period,
        day_schedules=day_schedules,
        zero_day=zero_day,
        week_schedules=week_schedules,
        year_spans=tuple(spans),
        n_max=series.n_max if quantity is Quantity.OCCUPANCY else None,
    )


def evaluate_schedules(compiled: CompiledSchedules, timestamp: datetime) -> float:
    """Resolve year -> week -> day -> interval for a start-labeled timestamp."""
    day = timestamp.date()
    span = next(
        (s for s in compiled.year_spans if s.from_date <= day <= s.to_date), None
    )
    if span is None:
        raise OutsideRunPeriodError(f"{timestamp.isoformat()} outside the run period")
    week = compiled.week_schedules[_sunday_of(day)]
    day_name = week.weekday_day_names[(day.weekday() + 1) % 7]
    schedule = compiled.day_by_name(day_name)
    return schedule.value_after(timestamp.hour * 60 + timestamp.minute)


def _until_text(minute: int) -> str:
    return f"{minute // 60:02d}:{minute % 60:02d}"


def _value_text(value: float) -> str:
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def _day_object(schedule: DaySchedule) -> IdfObject:
    fields = [schedule.name, "fraction_limits", "No"]
    for until, value in schedule.intervals:
        fields.append(_until_text(until))
        fields.append(_value_text(value))
    return IdfObject("Schedule:Day:Interval", tuple(fields))


def _week_object(week: WeekSchedule, zero_name: str) -> IdfObject:
    # Sunday..Saturday, then Holiday, SummerDesignDay, WinterDesignDay,
    # CustomDay1, CustomDay2
    fields = (week.name, *week.weekday_day_names, *([zero_name] * 5))
    return IdfObject("Schedule:Week:Daily", fields)


def _year_object(compiled: CompiledSchedules) -> IdfObject:
    fields = [compiled.year_name, "fraction_limits"]
    for span in compiled.year_spans:
        fields.extend(
            (
                span.week_name,
                str(span.from_date.month),
                str(span.from_date.day),
                str(span.to_date.month),
                str(span.to_date.day),
            )
        )
    return IdfObject("Schedule:Year", tuple(fields))


def _generated_schedule(obj: IdfObject) -> bool:
    name = obj.name.lower()
    return name.startswith("occ_") or name.startswith("win_")


def attach_schedules(
    doc: IdfDocument,
    occupancy: CompiledSchedules,
    window: CompiledSchedules,
    run_period: RunPeriod,
    window_open_ach: float = 5.0,
) -> IdfDocument:
    """Write both schedule hierarchies into the model and wire them up.

    Upserts a People object driven by the occupancy year schedule, a natural
    ventilation object driven by the window-state year schedule, and rewrites
    the RunPeriod object.  Generated names are deterministic, so re-attaching
    replaces rather than duplicates.
    """
    zones = doc.find_objects("Zone")
    if len(zones) != 1:
        raise ZoneCountMismatchError(f"expected exactly 1 zone, found {len(zones)}")
    zone_name = zones[0].name

    doc = ensure_schedule_type_limits(doc, "fraction_limits", "0", "1", "Continuous")
    doc = ensure_constant_schedule(doc, "always_on", 1)
    doc = ensure_constant_schedule(doc, "activity_level", 120)

    for class_name in ("Schedule:Day:Interval", "Schedule:Week:Daily", "Schedule:Year"):
        doc = doc.remove_objects(class_name, _generated_schedule)

    objects: list[IdfObject] = []
    for compiled in (occupancy, window):
        objects.append(_day_object(compiled.zero_day))
        objects.extend(_day_object(s) for s in compiled.day_schedules.values())
        objects.extend(
            _week_object(w, compiled.zero_day.name)
            for w in compiled.week_schedules.values()
        )
        objects.append(_year_object(compiled))
    doc = doc.append_objects(objects)

    people = IdfObject(
        "People",
        (
            "room_people",
            zone_name,
            occupancy.year_name,
            "People",
            str(occupancy.n_max or 0),
            "",
            "",
            "0.3",
            "autocalculate",
            "activity_level",
            "3.82e-08",
        ),
    )
    doc = doc.upsert_object("People", 0, people)

    ventilation = IdfObject(
        "ZoneVentilation:DesignFlowRate",
        (
            "room_window_ventilation",
            zone_name,
            window.year_name,
            "AirChanges/Hour",
            "",
            "",
            "",
            _value_text(window_open_ach),
            "Natural",
            "0",
            "1",
            "1",
            "0",
            "0",
            "0",
        ),
    )
    doc = doc.upsert_object("ZoneVentilation:DesignFlowRate", 0, ventilation)

    run = IdfObject(
        "RunPeriod",
        (
            "room_run_period",
            str(run_period.begin.month),
            str(run_period.begin.day),
            str(run_period.begin.year),
            str(run_period.end.month),
            str(run_period.end.day),
            str(run_period.end.year),
            run_period.start_weekday,
            "No",
            "No",
            "No",
            "Yes",
            "Yes",
        ),
    )
    doc = doc.remove_objects("RunPeriod")
    return doc.append_objects([run])
