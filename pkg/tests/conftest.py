"""Shared fixtures and builders for the test suite."""

from __future__ import annotations

import math
from datetime import datetime, timedelta
from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"
CORPUS_DIR = DATA_DIR / "corpus"

EPW_HEADER = """\
LOCATION,Test City,BY,DEU,Synthetic,108660,48.25,11.55,1.0,484.0
DESIGN CONDITIONS,0
TYPICAL/EXTREME PERIODS,0
GROUND TEMPERATURES,0
HOLIDAYS/DAYLIGHT SAVINGS,No,0,0,0
COMMENTS 1,synthetic weather for tests
COMMENTS 2,
DATA PERIODS,1,1,Data,Sunday, 1/ 1,12/31
"""


def make_epw(
    hours: int = 8760,
    dry_bulb=20.0,
    relative_humidity=50.0,
    pressure=101325.0,
) -> str:
    """Synthesize EPW text; scalar values may be callables of the hour index."""
    lines = [EPW_HEADER.rstrip("\n")]
    hour_of_year = 0
    day = datetime(2021, 1, 1)
    while hour_of_year < hours:
        for hour in range(1, 25):
            if hour_of_year >= hours:
                break
            t = dry_bulb(hour_of_year) if callable(dry_bulb) else dry_bulb
            rh = (
                relative_humidity(hour_of_year)
                if callable(relative_humidity)
                else relative_humidity
            )
            p = pressure(hour_of_year) if callable(pressure) else pressure
            lines.append(
                f"2021,{day.month},{day.day},{hour},0,?,"
                f"{t:.2f},10.0,{rh:.2f},{p:.1f},9999,9999"
            )
            hour_of_year += 1
        day += timedelta(days=1)
    return "\n".join(lines) + "\n"


def make_occupancy_csv(
    start: datetime,
    step_minutes: int,
    count: int,
    occupancy=0,
    window=0,
    include_window: bool = True,
) -> str:
    """Occupancy CSV text; occupancy/window may be callables of the sample index."""
    header = "timestamp,occupancy,window" if include_window else "timestamp,occupancy"
    rows = [header]
    for i in range(count):
        stamp = start + timedelta(minutes=step_minutes * i)
        occ = occupancy(i) if callable(occupancy) else occupancy
        win = window(i) if callable(window) else window
        if include_window:
            rows.append(f"{stamp.isoformat()},{occ},{win}")
        else:
            rows.append(f"{stamp.isoformat()},{occ}")
    return "\n".join(rows) + "\n"


def office_occupancy_csv(days: int = 1, step_minutes: int = 10) -> str:
    """Workday pattern: two people 08:00-12:00, window open 10:00-11:00."""
    per_day = 24 * 60 // step_minutes

    def occupancy(i: int) -> int:
        minute = (i % per_day) * step_minutes
        return 2 if 8 * 60 <= minute < 12 * 60 else 0

    def window(i: int) -> int:
        minute = (i % per_day) * step_minutes
        return 1 if 10 * 60 <= minute < 11 * 60 else 0

    return make_occupancy_csv(
        datetime(2021, 5, 2), step_minutes, per_day * days, occupancy, window
    )


@pytest.fixture(scope="session")
def room_idf_text() -> str:
    return (DATA_DIR / "room.idf").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def corpus_files() -> list[Path]:
    files = sorted(CORPUS_DIR.glob("*.idf"))
    assert len(files) >= 10, "corpus must hold at least 10 hand-written files"
    return files


@pytest.fixture(scope="session")
def epw_text() -> str:
    return make_epw()


@pytest.fixture(scope="session")
def sine_epw_text() -> str:
    return make_epw(
        dry_bulb=lambda h: 15.0 + 10.0 * math.sin(2 * math.pi * (h % 24) / 24),
        relative_humidity=lambda h: 50.0 + 20.0 * math.sin(2 * math.pi * h / 8760),
    )
