"""Command line interface: one-shot runs, parameter sweeps and the service.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import sys
import tempfile
from pathlib import Path

import click

from .errors import RoomSimError
from .orchestrator import Orchestrator, SeriesSpec
from .store import FileStore


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _room_options(function):
    options = [
        click.option("--width", type=float, required=True, help="Room width in m (facade axis)."),
        click.option("--depth", type=float, required=True, help="Room depth in m."),
        click.option("--height", type=float, required=True, help="Room height in m."),
        click.option("--orientation", type=float, default=0.0, show_default=True,
                      help="Facade azimuth, degrees clockwise from north."),
        click.option("--ach", type=float, default=0.0, show_default=True,
                      help="Infiltration rate in air changes per hour."),
        click.option("--begin", type=click.DateTime(formats=["%Y-%m-%d"]), required=True,
                      help="First simulated day (YYYY-MM-DD)."),
        click.option("--end", type=click.DateTime(formats=["%Y-%m-%d"]), required=True,
                      help="Last simulated day (YYYY-MM-DD)."),
        click.option("--step", type=int, default=10, show_default=True,
                      help="Simulation step in minutes (must divide 60)."),
        click.option("--engine", type=click.Choice(["surrogate", "energyplus"]),
                      default="surrogate", show_default=True),
        click.option("--eplus-exe", type=str, default=None,
                      help="EnergyPlus executable (required for --engine energyplus)."),
    ]
    for option in reversed(options):
        function = option(function)
    return function


def _input_options(function):
    options = [
        click.option("--idf", "idf_path", type=click.Path(exists=True, dir_okay=False),
                      required=True, help="Initial room model (IDF)."),
        click.option("--epw", "epw_path", type=click.Path(exists=True, dir_okay=False),
                      required=True, help="Weather file (EPW)."),
        click.option("--occupancy", "occupancy_path", type=click.Path(exists=True, dir_okay=False),
                      required=True, help="Occupancy CSV (timestamp,occupancy[,window])."),
    ]
    for option in reversed(options):
        function = option(function)
    return function


def _parameters(width, depth, height, orientation, ach, begin, end, step, engine) -> dict:
    return {
        "room": {
            "width": width,
            "depth": depth,
            "height": height,
            "orientation": orientation,
            "infiltration_ach": ach,
        },
        "run_period": {"begin": begin.date().isoformat(), "end": end.date().isoformat()},
        "step_minutes": step,
        "engine": engine,
    }


def _prepare(orchestrator: Orchestrator, idf_path, epw_path, occupancy_path, parameters):
    record = orchestrator.create_simulation()
    orchestrator.upload_input(record.id, "idf", Path(idf_path).read_bytes())
    orchestrator.upload_input(record.id, "weather", Path(epw_path).read_bytes())
    orchestrator.upload_input(record.id, "occupancy", Path(occupancy_path).read_bytes())
    orchestrator.configure(record.id, parameters)
    return record


def _write_results(orchestrator: Orchestrator, record_id: str, out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for kind in ("csv", "eso"):
        path = out_dir / f"result.{kind}"
        path.write_bytes(orchestrator.result_artifact(record_id, kind))
        written.append(path)
    return written


@click.group()
def main():
    """Room-scale building simulation toolkit."""


@main.command()
@_input_options
@_room_options
@click.option("--out-dir", type=click.Path(file_okay=False), default=".", show_default=True,
              help="Where result.csv and result.eso are written.")
def simulate(idf_path, epw_path, occupancy_path, width, depth, height, orientation,
             ach, begin, end, step, engine, eplus_exe, out_dir):
    """Run one simulation and write result.csv / result.eso."""
    parameters = _parameters(width, depth, height, orientation, ach, begin, end, step, engine)
    with tempfile.TemporaryDirectory(prefix="roomsim-") as state_dir:
        orchestrator = Orchestrator(FileStore(state_dir), eplus_executable=eplus_exe)
        try:
            record = _prepare(orchestrator, idf_path, epw_path, occupancy_path, parameters)
            orchestrator.start(record.id)
            record = orchestrator.wait(record.id, timeout=3600)
            if record.status != "done":
                _fail(record.error or "simulation failed")
            for path in _write_results(orchestrator, record.id, Path(out_dir)):
                click.echo(str(path))
        except RoomSimError as exc:
            _fail(str(exc))
        finally:
            orchestrator.close()


@main.command()
@_input_options
@_room_options
@click.option("--widths", type=float, multiple=True, help="Sweep values for room width.")
@click.option("--depths", type=float, multiple=True, help="Sweep values for room depth.")
@click.option("--orientations", type=float, multiple=True, help="Sweep values for azimuth.")
@click.option("--achs", type=float, multiple=True, help="Sweep values for infiltration ACH.")
@click.option("--out-dir", type=click.Path(file_okay=False), default=".", show_default=True,
              help="One subdirectory per parameter combination is written here.")
@click.option("--workers", type=int, default=2, show_default=True,
              help="Concurrent simulation runs.")
def series(idf_path, epw_path, occupancy_path, width, depth, height, orientation, ach,
           begin, end, step, engine, eplus_exe, widths, depths, orientations, achs,
           out_dir, workers):
    """Run a parameter sweep; axes default to the base value when not given."""
    parameters = _parameters(width, depth, height, orientation, ach, begin, end, step, engine)
    with tempfile.TemporaryDirectory(prefix="roomsim-") as state_dir:
        orchestrator = Orchestrator(
            FileStore(state_dir), eplus_executable=eplus_exe, max_workers=workers
        )
        try:
            base = _prepare(orchestrator, idf_path, epw_path, occupancy_path, parameters)
            spec = SeriesSpec(
                base_id=base.id,
                widths=tuple(widths) or (width,),
                depths=tuple(depths) or (depth,),
                orientations=tuple(orientations) or (orientation,),
                infiltrations=tuple(achs) or (ach,),
            )
            series_state = orchestrator.run_series(spec)
            series_state = orchestrator.wait_series(series_state["id"], timeout=3600)
            failures = 0
            for child in series_state["children"]:
                room = child["room"]
                name = (
                    f"w{room['width']:g}_d{room['depth']:g}"
                    f"_o{room['orientation']:g}_a{room['infiltration_ach']:g}"
                )
                if child["status"] == "done":
                    _write_results(orchestrator, child["id"], Path(out_dir) / name)
                    click.echo(f"{name}: done")
                else:
                    failures += 1
                    click.echo(f"{name}: failed ({child['error']})", err=True)
            if failures:
                _fail(f"{failures} of {len(series_state['children'])} runs failed")
        except RoomSimError as exc:
            _fail(str(exc))
        finally:
            orchestrator.close()


@main.command()
@click.option("--listen", default="127.0.0.1:8000", show_default=True,
              help="host:port to bind.")
@click.option("--data-root", type=click.Path(file_okay=False), default="./roomsim-data",
              show_default=True, help="Directory for simulation records and artifacts.")
@click.option("--eplus-exe", type=str, default=None, help="EnergyPlus executable path.")
@click.option("--workers", type=int, default=2, show_default=True,
              help="Concurrent simulation runs.")
@click.option("--cors-origin", "cors_origins", multiple=True,
              help="Allowed CORS origin (repeatable); defaults to all.")
def serve(listen, data_root, eplus_exe, workers, cors_origins):
    """Run the REST service until interrupted."""
    import uvicorn

    from .api import create_app

    host, _, port_text = listen.partition(":")
    try:
        port = int(port_text or "8000")
    except ValueError:
        raise click.BadParameter(f"bad --listen value {listen!r}")
    app = create_app(
        data_root=data_root,
        eplus_executable=eplus_exe,
        max_workers=workers,
        cors_origins=tuple(cors_origins) or ("*",),
    )
    try:
        uvicorn.run(app, host=host or "127.0.0.1", port=port, log_level="warning")
    except (OSError, SystemExit) as exc:
        if isinstance(exc, SystemExit) and not exc.code:
            return
        _fail(f"server failed to start: {exc}")


if __name__ == "__main__":
    main()
