"""HTTP interface over the orchestrator.

Uploads are raw-body PUTs (simpler for script clients than multipart), runs
are asynchronous with status polling, and every orchestrator error maps to
exactly one (status, code) pair.  The machine-readable API description is
served under /openapi.
"""

from __future__ import annotations

from contextlib import asynccontextmanager
from datetime import date
from typing import Literal

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from .engines import EngineError
from .errors import RoomSimError, ZoneCountMismatchError
from .eso import EsoError
from .idf import IdfError, parse_idf
from .orchestrator import (
    AlreadyRunningError,
    CurrentlyRunningError,
    EmptyAxisError,
    NotConfiguredError,
    NotFinishedError,
    NotFoundError,
    Orchestrator,
    SeriesSpec,
    SourceNotFinishedError,
    ValidationFailedError,
)
from .room import RoomError, extract_geometry
from .schedules import ScheduleError
from .store import FileStore, StoreUnavailableError
from .weather import WeatherError

_STATUS_FOR = (
    (NotFoundError, 404),
    (
        (
            CurrentlyRunningError,
            AlreadyRunningError,
            NotFinishedError,
            SourceNotFinishedError,
        ),
        409,
    ),
    (
        (
            NotConfiguredError,
            ValidationFailedError,
            EmptyAxisError,
            IdfError,
            ScheduleError,
            WeatherError,
            EsoError,
            RoomError,
            EngineError,
            ZoneCountMismatchError,
        ),
        422,
    ),
    (StoreUnavailableError, 503),
)


def _http_status(error: RoomSimError) -> int:
    for types, status in _STATUS_FOR:
        if isinstance(error, types):
            return status
    return 500


class RoomBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    width: float = Field(gt=0)
    depth: float = Field(gt=0)
    height: float = Field(gt=0)
    orientation: float = 0.0
    infiltration_ach: float = Field(default=0.0, ge=0)


class RunPeriodBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    begin: date
    end: date


class SurrogateBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    co2_gen_per_person: float | None = Field(default=None, gt=0)
    outdoor_co2: float | None = Field(default=None, ge=0)
    heat_gain_per_person: float | None = Field(default=None, gt=0)
    air_heat_capacity: float | None = Field(default=None, gt=0)
    envelope_time_constant: float | None = Field(default=None, gt=0)
    window_open_ach: float | None = Field(default=None, gt=0)
    moisture_gen_per_person: float | None = Field(default=None, gt=0)


class WindowLayoutBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    margin: float | None = Field(default=None, ge=0)
    gap: float | None = Field(default=None, ge=0)


class ParametersBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    room: RoomBody
    run_period: RunPeriodBody
    step_minutes: int = 10
    engine: Literal["surrogate", "energyplus"] = "surrogate"
    surrogate: SurrogateBody | None = None
    window_layout: WindowLayoutBody | None = None

    def to_parameters(self) -> dict:
        data = {
            "room": self.room.model_dump(),
            "run_period": {
                "begin": self.run_period.begin.isoformat(),
                "end": self.run_period.end.isoformat(),
            },
            "step_minutes": self.step_minutes,
            "engine": self.engine,
        }
        if self.surrogate is not None:
            data["surrogate"] = self.surrogate.model_dump(exclude_none=True)
        if self.window_layout is not None:
            layout = self.window_layout.model_dump(exclude_none=True)
            if layout:
                data["window_layout"] = layout
        return data


class RerunRoomBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    width: float | None = Field(default=None, gt=0)
    depth: float | None = Field(default=None, gt=0)
    height: float | None = Field(default=None, gt=0)
    orientation: float | None = None
    infiltration_ach: float | None = Field(default=None, ge=0)


class RerunBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    room: RerunRoomBody | None = None
    run_period: RunPeriodBody | None = None
    step_minutes: int | None = None
    engine: Literal["surrogate", "energyplus"] | None = None
    surrogate: SurrogateBody | None = None
    window_layout: WindowLayoutBody | None = None

    def to_overrides(self) -> dict:
        overrides: dict = {}
        if self.room is not None:
            overrides["room"] = self.room.model_dump(exclude_none=True)
        if self.run_period is not None:
            overrides["run_period"] = {
                "begin": self.run_period.begin.isoformat(),
                "end": self.run_period.end.isoformat(),
            }
        if self.step_minutes is not None:
            overrides["step_minutes"] = self.step_minutes
        if self.engine is not None:
            overrides["engine"] = self.engine
        if self.surrogate is not None:
            overrides["surrogate"] = self.surrogate.model_dump(exclude_none=True)
        if self.window_layout is not None:
            overrides["window_layout"] = self.window_layout.model_dump(exclude_none=True)
        return overrides


class SeriesBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    base_id: str
    widths: list[float] = Field(default_factory=list)
    depths: list[float] = Field(default_factory=list)
    orientations: list[float] = Field(default_factory=list)
    infiltrations: list[float] = Field(default_factory=list)


def create_app(
    orchestrator: Orchestrator | None = None,
    *,
    data_root: str | None = None,
    eplus_executable: str | None = None,
    max_workers: int = 2,
    cors_origins: tuple[str, ...] = ("*",),
) -> FastAPI:
    """Build the service; pass an orchestrator or let one be created over
    ``data_root``."""
    owns_orchestrator = orchestrator is None
    if orchestrator is None:
        if data_root is None:
            raise ValueError("either an orchestrator or a data_root is required")
        orchestrator = Orchestrator(
            FileStore(data_root),
            eplus_executable=eplus_executable,
            max_workers=max_workers,
        )

    @asynccontextmanager
    async def lifespan(_: FastAPI):
        yield
        if owns_orchestrator:
            orchestrator.close()

    app = FastAPI(
        title="Room Simulation Service",
        version="0.1.0",
        openapi_url="/openapi",
        lifespan=lifespan,
    )
    app.state.orchestrator = orchestrator
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RoomSimError)
    async def roomsim_error_handler(_: Request, exc: RoomSimError):
        return JSONResponse(
            status_code=_http_status(exc),
            content={"code": exc.code, "message": str(exc)},
        )

    @app.exception_handler(RequestValidationError)
    async def request_error_handler(_: Request, exc: RequestValidationError):
        first = exc.errors()[0] if exc.errors() else {}
        location = ".".join(str(part) for part in first.get("loc", ()))
        message = first.get("msg", "invalid request")
        return JSONResponse(
            status_code=422,
            content={"code": "invalid_request", "message": f"{location}: {message}"},
        )

    @app.post("/simulations", status_code=201)
    def create_simulation():
        return orchestrator.create_simulation().to_public()

    @app.get("/simulations")
    def list_simulations():
        return orchestrator.history()

    @app.get("/simulations/{sim_id}")
    def get_simulation(sim_id: str):
        return orchestrator.get(sim_id).to_public()

    @app.put("/simulations/{sim_id}/input/{kind}", status_code=204)
    async def upload_input(
        sim_id: str, kind: Literal["idf", "weather", "occupancy"], request: Request
    ):
        body = await request.body()
        orchestrator.upload_input(sim_id, kind, body)
        return Response(status_code=204)

    @app.post("/simulations/{sim_id}/parameters")
    def set_parameters(sim_id: str, body: ParametersBody):
        return orchestrator.configure(sim_id, body.to_parameters()).to_public()

    @app.post("/simulations/{sim_id}/run", status_code=202)
    def run_simulation(sim_id: str):
        record = orchestrator.start(sim_id)
        return {"id": record.id, "status": record.status}

    @app.get("/simulations/{sim_id}/status")
    def simulation_status(sim_id: str):
        record = orchestrator.get(sim_id)
        return {"id": record.id, "status": record.status, "error": record.error}

    @app.get("/simulations/{sim_id}/results/{kind}")
    def download_result(sim_id: str, kind: Literal["csv", "eso"]):
        data = orchestrator.result_artifact(sim_id, kind)
        media = "text/csv" if kind == "csv" else "text/plain"
        return Response(
            content=data,
            media_type=media,
            headers={"Content-Disposition": f'attachment; filename="result.{kind}"'},
        )

    @app.get("/simulations/{sim_id}/geometry")
    def simulation_geometry(sim_id: str):
        view = extract_geometry(parse_idf(orchestrator.model_text(sim_id)))
        return {
            "north_axis": view.north_axis,
            "surfaces": [
                {
                    "name": s.name,
                    "type": s.surface_type,
                    "boundary": s.boundary,
                    "vertices": [list(v) for v in s.vertices],
                }
                for s in view.surfaces
            ],
            "windows": [
                {
                    "name": w.name,
                    "host_surface": w.boundary,
                    "vertices": [list(v) for v in w.vertices],
                }
                for w in view.windows
            ],
        }

    @app.post("/simulations/{sim_id}/rerun", status_code=201)
    def rerun_simulation(sim_id: str, body: RerunBody):
        return orchestrator.rerun_with(sim_id, body.to_overrides()).to_public()

    @app.post("/series", status_code=202)
    def create_series(body: SeriesBody):
        spec = SeriesSpec(
            base_id=body.base_id,
            widths=tuple(body.widths),
            depths=tuple(body.depths),
            orientations=tuple(body.orientations),
            infiltrations=tuple(body.infiltrations),
        )
        return orchestrator.run_series(spec)

    @app.get("/series/{series_id}")
    def get_series(series_id: str):
        return orchestrator.series_status(series_id)

    return app
