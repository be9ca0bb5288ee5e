"""Tests for ESO parsing, the result-table join and CSV output."""

import csv
import io
from datetime import date, datetime

import pytest

from conftest import make_epw, office_occupancy_csv
from roomsim.eso import (
    RESULT_COLUMNS,
    MissingDataTerminatorError,
    MissingDictionaryTerminatorError,
    UnknownReportCodeError,
    VariableNotReportedError,
    parse_eso,
    to_result_table,
    write_csv,
)
from roomsim.schedules import parse_occupancy_csv
from roomsim.weather import parse_epw

MINIMAL_ESO = """\
Program Version,Test Engine
1,5,Environment Title[],Latitude[deg],Longitude[deg],Time Zone[],Elevation[m]
2,8,Day of Simulation[],Month[],Day of Month[],DST Indicator[1=yes 0=no],Hour[],StartMinute[],EndMinute[],DayType
7,2,MAIN ROOM,Zone Mean Air Temperature [C] !TimeStep
End of Data Dictionary
1,TEST RUN,48.25,11.55,1.0,484.0
2,1,5,2,0,1,0.00,10.00,Sunday
7,21.5
End of Data
"""


class TestParseEso:
    def test_minimal_file(self):
        data = parse_eso(MINIMAL_ESO)
        assert list(data.entries) == [7]
        entry = data.entries[7]
        assert entry.key == "MAIN ROOM"
        assert entry.variable == "Zone Mean Air Temperature"
        assert entry.units == "C"
        assert entry.frequency == "TimeStep"
        assert len(data.rows) == 1
        assert data.rows[0].values == {7: 21.5}
        assert data.rows[0].start_of_step == (5, 2, 0, 0)

    def test_missing_dictionary_terminator(self):
        with pytest.raises(MissingDictionaryTerminatorError):
            parse_eso(MINIMAL_ESO.replace("End of Data Dictionary\n", ""))

    def test_missing_data_terminator(self):
        with pytest.raises(MissingDataTerminatorError):
            parse_eso(MINIMAL_ESO.replace("End of Data\n", ""))

    def test_unknown_report_code(self):
        with pytest.raises(UnknownReportCodeError):
            parse_eso(MINIMAL_ESO.replace("7,21.5", "99,21.5"))

    def test_daily_records_skipped_with_warning(self):
        text = MINIMAL_ESO.replace(
            "End of Data Dictionary",
            "3,5,Cumulative Day of Simulation[],Month[],Day[],DST[],DayType\n"
            "8,1,MAIN ROOM,Zone Mean Air Temperature [C] !Daily [Value,Min,Hour,Minute,Max,Hour,Minute]\n"
            "End of Data Dictionary",
        ).replace(
            "End of Data",
            "3,1,5,2,0,Sunday\n8,20.0,18.0,1,0,22.0,14,0\nEnd of Data",
        )
        data = parse_eso(text)
        assert len(data.rows) == 1  # the daily record did not become a row
        assert 8 not in data.rows[0].values
        assert any("daily" in w for w in data.warnings)

    def test_value_total_matches_rows_times_variables(self):
        body = []
        for step in range(6):
            body.append(f"2,1,5,2,0,1,{step * 10}.00,{step * 10 + 10}.00,Sunday")
            body.append(f"7,{20 + step}.0")
        text = MINIMAL_ESO.replace(
            "2,1,5,2,0,1,0.00,10.00,Sunday\n7,21.5", "\n".join(body)
        )
        data = parse_eso(text)
        assert len(data.rows) == 6
        assert sum(len(r.values) for r in data.rows) == 6 * len(data.entries)


def _surrogate_result(days=1, step=10):
    from datetime import timedelta

    from roomsim.engines import SimulationJob, run_surrogate
    from roomsim.idf import parse_idf
    from roomsim.room import RoomSpec, apply_room_geometry, extract_window_template
    from roomsim.room import set_infiltration, set_orientation
    from roomsim.schedules import Quantity, RunPeriod, attach_schedules, compile_schedules

    room_text = (
        __import__("pathlib").Path(__file__).parent / "data" / "room.idf"
    ).read_text(encoding="utf-8")
    doc = parse_idf(room_text)
    template = extract_window_template(doc)
    model = apply_room_geometry(doc, RoomSpec(4, 4, 3), template)
    model = set_orientation(model, 0)
    model = set_infiltration(model, 0.5)
    occupancy = parse_occupancy_csv(office_occupancy_csv(days=days, step_minutes=step))
    run = RunPeriod.of(date(2021, 5, 2), date(2021, 5, 2) + timedelta(days=days - 1))
    occ = compile_schedules(occupancy, run, Quantity.OCCUPANCY)
    win = compile_schedules(occupancy, run, Quantity.WINDOW)
    model = attach_schedules(model, occ, win, run)
    weather = parse_epw(make_epw())
    job = SimulationJob(
        model=model,
        weather=weather,
        epw_text="",
        run_period=run,
        step_minutes=step,
        occupancy=occupancy,
    )
    return job, run_surrogate(job)


class TestToResultTable:
    def test_row_count_and_columns(self):
        job, result = _surrogate_result()
        data = parse_eso(result.eso_text)
        table = to_result_table(data, job.occupancy, job.weather)
        assert len(table) == 24 * 60 // 10  # run minutes / step
        assert len(RESULT_COLUMNS) == 8  # timestamp + seven factors

    def test_surrogate_round_trip_bit_identical(self):
        job, result = _surrogate_result()
        data = parse_eso(result.eso_text)
        assert data.warnings == []
        table = to_result_table(data, job.occupancy, job.weather)
        assert table == result.result_table

    def test_missing_co2_named_in_error(self):
        job, result = _surrogate_result()
        text = "\n".join(
            line
            for line in result.eso_text.splitlines()
            if not line.startswith("8,")
        ) + "\n"
        data = parse_eso(text)
        with pytest.raises(VariableNotReportedError) as info:
            to_result_table(data, job.occupancy, job.weather)
        assert "Zone Air CO2 Concentration" in str(info.value)

    def test_occupancy_column_equals_input(self):
        job, result = _surrogate_result()
        table = result.result_table
        for i, t in enumerate(table.timestamps):
            sample = job.occupancy.sample_at(t)
            assert table.occupancy_state[i] == sample.occupants
            assert table.window_state[i] == sample.window

    def test_site_values_fall_back_to_weather(self):
        job, result = _surrogate_result()
        text = "\n".join(
            line
            for line in result.eso_text.splitlines()
            if not (line.startswith("10,") or line.startswith("11,"))
        ) + "\n"
        table = to_result_table(parse_eso(text), job.occupancy, job.weather)
        assert table.outdoor_temperature == result.result_table.outdoor_temperature
        assert table.outdoor_pressure == result.result_table.outdoor_pressure


class TestWriteCsv:
    def test_header_names_seven_factors(self):
        _, result = _surrogate_result()
        text = write_csv(result.result_table)
        header = text.splitlines()[0]
        assert header == ",".join(RESULT_COLUMNS)

    def test_row_count(self):
        _, result = _surrogate_result()
        text = write_csv(result.result_table)
        assert len(text.strip().splitlines()) == len(result.result_table) + 1

    def test_round_trip_values_exact(self):
        _, result = _surrogate_result()
        table = result.result_table
        rows = list(csv.DictReader(io.StringIO(write_csv(table))))
        for i, row in enumerate(rows):
            assert datetime.fromisoformat(row["timestamp"]) == table.timestamps[i]
            assert float(row["zone_co2_ppm"]) == table.zone_co2[i]
            assert float(row["zone_air_temperature_C"]) == table.zone_air_temperature[i]
            assert int(row["occupancy_state"]) == table.occupancy_state[i]
