"""Simulation lifecycle management: records, background execution, re-runs
and parameter sweeps.

A record moves along created -> configured -> running -> done | failed, and
may be re-configured from done/failed.  Configuration builds the model
eagerly so validation problems surface before anything runs.  Execution
happens on a bounded worker pool; status is observed by polling.  Artifacts
are immutable once written, so re-runs clone inputs by reference.
"""

from __future__ import annotations

import tempfile
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import date, datetime, timezone
from itertools import product
from time import monotonic, sleep

from . import engines
from .errors import RoomSimError
from .eso import write_csv
from .idf import parse_idf, serialize_idf
from .room import (
    DEFAULT_GAP,
    DEFAULT_MARGIN,
    RoomSpec,
    apply_room_geometry,
    extract_window_template,
    set_infiltration,
    set_orientation,
)
from .schedules import (
    Quantity,
    RunPeriod,
    attach_schedules,
    compile_schedules,
    parse_occupancy_csv,
)
from .store import DocumentStore
from .weather import parse_epw, slice_resample

INPUT_ARTIFACTS = {"idf": "input.idf", "weather": "weather.epw", "occupancy": "occupancy.csv"}
RESULT_ARTIFACTS = {"eso": "result.eso", "csv": "result.csv"}

STATUSES = ("created", "configured", "running", "done", "failed")


class NotFoundError(RoomSimError):
    code = "not_found"


class CurrentlyRunningError(RoomSimError):
    code = "currently_running"


class AlreadyRunningError(RoomSimError):
    code = "already_running"


class NotConfiguredError(RoomSimError):
    code = "not_configured"


class NotFinishedError(RoomSimError):
    code = "not_finished"


class SourceNotFinishedError(RoomSimError):
    code = "source_not_finished"


class ValidationFailedError(RoomSimError):
    code = "validation_failed"


class EmptyAxisError(RoomSimError):
    code = "empty_axis"


@dataclass(frozen=True)
class SimulationParameters:
    """Validated parameter bundle; ``from_dict`` is the single entry point."""

    room: RoomSpec
    run_period: RunPeriod
    step_minutes: int = 10
    engine: str = "surrogate"
    surrogate: engines.SurrogateParams = field(default_factory=engines.SurrogateParams)
    window_margin: float = DEFAULT_MARGIN
    window_gap: float = DEFAULT_GAP

    @classmethod
    def from_dict(cls, data: dict) -> "SimulationParameters":
        if not isinstance(data, dict):
            raise ValidationFailedError("parameters must be a JSON object")
        known = {"room", "run_period", "step_minutes", "engine", "surrogate", "window_layout"}
        unknown = set(data) - known
        if unknown:
            raise ValidationFailedError(f"unknown parameter fields: {sorted(unknown)}")
        try:
            room_data = dict(data["room"])
            run_data = dict(data["run_period"])
        except (KeyError, TypeError):
            raise ValidationFailedError("parameters need 'room' and 'run_period' objects") from None
        try:
            room = RoomSpec(
                width=float(room_data.pop("width")),
                depth=float(room_data.pop("depth")),
                height=float(room_data.pop("height")),
                orientation_azimuth=float(room_data.pop("orientation", 0.0)),
                infiltration_ach=float(room_data.pop("infiltration_ach", 0.0)),
            )
        except (KeyError, TypeError, ValueError, RoomSimError) as exc:
            raise ValidationFailedError(f"bad room parameters: {exc}") from exc
        if room_data:
            raise ValidationFailedError(f"unknown room fields: {sorted(room_data)}")
        try:
            begin = date.fromisoformat(str(run_data.pop("begin")))
            end = date.fromisoformat(str(run_data.pop("end")))
            run_period = RunPeriod.of(begin, end)
        except (KeyError, ValueError, RoomSimError) as exc:
            raise ValidationFailedError(f"bad run period: {exc}") from exc
        if run_data:
            raise ValidationFailedError(f"unknown run_period fields: {sorted(run_data)}")
        step = int(data.get("step_minutes", 10))
        if not (1 <= step <= 60) or 60 % step != 0:
            raise ValidationFailedError(f"step_minutes must divide 60, got {step}")
        engine = str(data.get("engine", "surrogate"))
        if engine not in ("surrogate", "energyplus"):
            raise ValidationFailedError(f"unknown engine {engine!r}")
        surrogate_data = dict(data.get("surrogate") or {})
        try:
            surrogate = engines.SurrogateParams(**surrogate_data)
        except (TypeError, engines.EngineError) as exc:
            raise ValidationFailedError(f"bad surrogate parameters: {exc}") from exc
        layout = dict(data.get("window_layout") or {})
        margin = float(layout.pop("margin", DEFAULT_MARGIN))
        gap = float(layout.pop("gap", DEFAULT_GAP))
        if layout:
            raise ValidationFailedError(f"unknown window_layout fields: {sorted(layout)}")
        if margin < 0 or gap < 0:
            raise ValidationFailedError("window margin and gap must be >= 0")
        return cls(
            room=room,
            run_period=run_period,
            step_minutes=step,
            engine=engine,
            surrogate=surrogate,
            window_margin=margin,
            window_gap=gap,
        )

    def to_dict(self) -> dict:
        return {
            "room": {
                "width": self.room.width,
                "depth": self.room.depth,
                "height": self.room.height,
                "orientation": self.room.orientation_azimuth,
                "infiltration_ach": self.room.infiltration_ach,
            },
            "run_period": {
                "begin": self.run_period.begin.isoformat(),
                "end": self.run_period.end.isoformat(),
            },
            "step_minutes": self.step_minutes,
            "engine": self.engine,
            "surrogate": asdict(self.surrogate),
            "window_layout": {"margin": self.window_margin, "gap": self.window_gap},
        }


def deep_merge(base: dict, overrides: dict) -> dict:
    """Nested dict merge: override scalars, recurse into objects."""
    merged = dict(base)
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


@dataclass
class SimulationRecord:
    """Persistent lifecycle state of one simulation."""

    id: str
    created_at: str
    status: str = "created"
    inputs: dict = field(default_factory=dict)  # kind -> {"sim": id, "name": artifact}
    parameters: dict | None = None
    results: dict = field(default_factory=dict)  # "eso"/"csv" -> artifact name
    error: str | None = None
    parent_id: str | None = None

    def to_meta(self) -> dict:
        return {
            "kind": "simulation",
            "id": self.id,
            "created_at": self.created_at,
            "status": self.status,
            "inputs": self.inputs,
            "parameters": self.parameters,
            "results": self.results,
            "error": self.error,
            "parent_id": self.parent_id,
        }

    @classmethod
    def from_meta(cls, meta: dict) -> "SimulationRecord":
        return cls(
            id=meta["id"],
            created_at=meta["created_at"],
            status=meta["status"],
            inputs=meta.get("inputs") or {},
            parameters=meta.get("parameters"),
            results=meta.get("results") or {},
            error=meta.get("error"),
            parent_id=meta.get("parent_id"),
        )

    def to_public(self) -> dict:
        return {
            "id": self.id,
            "created_at": self.created_at,
            "status": self.status,
            "inputs": {kind: kind in self.inputs for kind in INPUT_ARTIFACTS},
            "parameters": self.parameters,
            "results": sorted(self.results.values()),
            "error": self.error,
            "parent_id": self.parent_id,
        }

    def summary(self) -> dict:
        room = (self.parameters or {}).get("room")
        return {
            "id": self.id,
            "created_at": self.created_at,
            "status": self.status,
            "engine": (self.parameters or {}).get("engine"),
            "room": room,
            "parent_id": self.parent_id,
            "error": self.error,
        }


@dataclass(frozen=True)
class SeriesSpec:
    """Cartesian sweep over room axes, cloned from a base simulation."""

    base_id: str
    widths: tuple[float, ...]
    depths: tuple[float, ...]
    orientations: tuple[float, ...]
    infiltrations: tuple[float, ...]

    def __post_init__(self):
        for label, values in (
            ("widths", self.widths),
            ("depths", self.depths),
            ("orientations", self.orientations),
            ("infiltrations", self.infiltrations),
        ):
            if not values:
                raise EmptyAxisError(f"series axis {label!r} is empty")

    def combinations(self) -> list[dict]:
        return [
            {
                "width": w,
                "depth": d,
                "orientation": o,
                "infiltration_ach": a,
            }
            for w, d, o, a in product(
                self.widths, self.depths, self.orientations, self.infiltrations
            )
        ]


class Orchestrator:
    """Owns the store, the worker pool and all status transitions."""

    def __init__(
        self,
        store: DocumentStore,
        eplus_executable: str | None = None,
        max_workers: int = 2,
        runners: dict | None = None,
    ):
        self._store = store
        self._eplus_executable = eplus_executable
        self._pool = ThreadPoolExecutor(max_workers=max_workers)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        self._runners = {
            "surrogate": self._run_surrogate_job,
            "energyplus": self._run_energyplus_job,
        }
        if runners:
            self._runners.update(runners)
        self._recover_interrupted()

    def close(self) -> None:
        self._pool.shutdown(wait=True)

    def _recover_interrupted(self) -> None:
        for doc_id in self._store.list_ids():
            meta = self._store.get(doc_id)
            if meta and meta.get("kind") == "simulation" and meta.get("status") == "running":
                record = SimulationRecord.from_meta(meta)
                record.status = "failed"
                record.error = "interrupted: process restarted while running"
                self._store.put(record.id, record.to_meta())

    def _lock_for(self, record_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(record_id, threading.Lock())

    def _get_record(self, record_id: str) -> SimulationRecord:
        meta = self._store.get(record_id)
        if meta is None or meta.get("kind") != "simulation":
            raise NotFoundError(f"no simulation {record_id!r}")
        return SimulationRecord.from_meta(meta)

    def _save(self, record: SimulationRecord) -> None:
        self._store.put(record.id, record.to_meta())

    def _input_text(self, record: SimulationRecord, kind: str) -> str:
        ref = record.inputs.get(kind)
        if ref is None:
            raise ValidationFailedError(f"missing input: {kind}")
        data = self._store.get_artifact(ref["sim"], ref["name"])
        if data is None:
            raise ValidationFailedError(f"stored input {kind} is gone")
        return data.decode("utf-8")

    # -- lifecycle ---------------------------------------------------------

    def create_simulation(self) -> SimulationRecord:
        record = SimulationRecord(
            id=uuid.uuid4().hex[:12],
            created_at=datetime.now(timezone.utc).isoformat(),
        )
        self._save(record)
        return record

    def get(self, record_id: str) -> SimulationRecord:
        return self._get_record(record_id)

    def upload_input(self, record_id: str, kind: str, data: bytes) -> SimulationRecord:
        if kind not in INPUT_ARTIFACTS:
            raise NotFoundError(f"unknown input kind {kind!r}")
        with self._lock_for(record_id):
            record = self._get_record(record_id)
            if record.status == "running":
                raise CurrentlyRunningError("cannot replace inputs while running")
            text = data.decode("utf-8")
            if kind == "idf":
                parse_idf(text)
            elif kind == "weather":
                parse_epw(text)
            else:
                parse_occupancy_csv(text)
            name = INPUT_ARTIFACTS[kind]
            self._store.put_artifact(record_id, name, data)
            record.inputs[kind] = {"sim": record_id, "name": name}
            self._save(record)
            return record

    def _build_model(self, record: SimulationRecord, params: SimulationParameters) -> str:
        """Apply room edits and schedules to the initial file; returns IDF text."""
        source = parse_idf(self._input_text(record, "idf"))
        weather = parse_epw(self._input_text(record, "weather"))
        occupancy = parse_occupancy_csv(self._input_text(record, "occupancy"))
        if not occupancy.covers(params.run_period):
            raise ValidationFailedError(
                "occupancy series does not cover the run period at its step grid"
            )
        slice_resample(weather, params.run_period, params.step_minutes)
        template = extract_window_template(source)
        model = apply_room_geometry(
            source, params.room, template, params.window_margin, params.window_gap
        )
        model = set_orientation(model, params.room.orientation_azimuth)
        model = set_infiltration(model, params.room.infiltration_ach)
        occ = compile_schedules(occupancy, params.run_period, Quantity.OCCUPANCY)
        win = compile_schedules(occupancy, params.run_period, Quantity.WINDOW)
        model = attach_schedules(
            model, occ, win, params.run_period,
            window_open_ach=params.surrogate.window_open_ach,
        )
        return serialize_idf(model)

    def configure(self, record_id: str, parameters: dict) -> SimulationRecord:
        with self._lock_for(record_id):
            record = self._get_record(record_id)
            if record.status == "running":
                raise CurrentlyRunningError("cannot configure while running")
            params = SimulationParameters.from_dict(parameters)
            try:
                model_text = self._build_model(record, params)
            except ValidationFailedError:
                raise
            except RoomSimError as exc:
                raise ValidationFailedError(str(exc)) from exc
            self._store.put_artifact(record_id, "model.idf", model_text.encode("utf-8"))
            record.parameters = params.to_dict()
            record.status = "configured"
            record.results = {}
            record.error = None
            self._save(record)
            return record

    def start(self, record_id: str) -> SimulationRecord:
        with self._lock_for(record_id):
            record = self._get_record(record_id)
            if record.status == "running":
                raise AlreadyRunningError(f"simulation {record_id} is already running")
            if record.status != "configured":
                raise NotConfiguredError(
                    f"simulation {record_id} is {record.status}, not configured"
                )
            record.status = "running"
            record.error = None
            self._save(record)
        self._pool.submit(self._execute, record_id)
        return record

    def _load_job(self, record: SimulationRecord) -> engines.SimulationJob:
        params = SimulationParameters.from_dict(record.parameters or {})
        model_data = self._store.get_artifact(record.id, "model.idf")
        if model_data is None:
            raise NotConfiguredError("no built model stored")
        epw_text = self._input_text(record, "weather")
        return engines.SimulationJob(
            model=parse_idf(model_data.decode("utf-8")),
            weather=parse_epw(epw_text),
            epw_text=epw_text,
            run_period=params.run_period,
            step_minutes=params.step_minutes,
            occupancy=parse_occupancy_csv(self._input_text(record, "occupancy")),
            engine=params.engine,
        )

    def _run_surrogate_job(
        self, job: engines.SimulationJob, params: SimulationParameters
    ) -> engines.EngineResult:
        return engines.run_surrogate(job, params.surrogate)

    def _run_energyplus_job(
        self, job: engines.SimulationJob, params: SimulationParameters
    ) -> engines.EngineResult:
        if not self._eplus_executable:
            raise engines.ExecutableNotFoundError("no EnergyPlus executable configured")
        workdir = tempfile.mkdtemp(prefix="eplus-run-")
        return engines.run_energyplus(
            job, self._eplus_executable, workdir, params=params.surrogate
        )

    def _execute(self, record_id: str) -> None:
        try:
            record = self._get_record(record_id)
            params = SimulationParameters.from_dict(record.parameters or {})
            job = self._load_job(record)
            runner = self._runners[params.engine]
            result = runner(job, params)
            csv_text = write_csv(result.result_table)
            self._store.put_artifact(record_id, RESULT_ARTIFACTS["eso"], result.eso_text.encode("utf-8"))
            self._store.put_artifact(record_id, RESULT_ARTIFACTS["csv"], csv_text.encode("utf-8"))
            with self._lock_for(record_id):
                record = self._get_record(record_id)
                record.status = "done"
                record.results = dict(RESULT_ARTIFACTS)
                record.error = None
                self._save(record)
        except Exception as exc:  # any failure must land in the record
            with self._lock_for(record_id):
                try:
                    record = self._get_record(record_id)
                except RoomSimError:
                    return
                record.status = "failed"
                record.error = str(exc) or type(exc).__name__
                self._save(record)

    def wait(self, record_id: str, timeout: float = 120.0) -> SimulationRecord:
        """Poll until the record reaches done or failed."""
        deadline = monotonic() + timeout
        while True:
            record = self._get_record(record_id)
            if record.status in ("done", "failed"):
                return record
            if monotonic() > deadline:
                raise TimeoutError(f"simulation {record_id} still {record.status}")
            sleep(0.05)

    def result_artifact(self, record_id: str, kind: str) -> bytes:
        record = self._get_record(record_id)
        if kind not in RESULT_ARTIFACTS:
            raise NotFoundError(f"unknown result kind {kind!r}")
        if record.status != "done":
            raise NotFinishedError(f"simulation {record_id} is {record.status}")
        data = self._store.get_artifact(record_id, RESULT_ARTIFACTS[kind])
        if data is None:
            raise NotFinishedError("result artifact missing")
        return data

    def model_text(self, record_id: str) -> str:
        record = self._get_record(record_id)
        data = self._store.get_artifact(record_id, "model.idf")
        if record.status == "created" or data is None:
            raise NotConfiguredError(f"simulation {record_id} has no built model")
        return data.decode("utf-8")

    # -- re-runs and series -------------------------------------------------

    def rerun_with(self, record_id: str, overrides: dict | None) -> SimulationRecord:
        source = self._get_record(record_id)
        if source.status not in ("done", "failed"):
            raise SourceNotFinishedError(
                f"source {record_id} is {source.status}; wait for done or failed"
            )
        return self._clone_configured(source, overrides or {}, strict=True)

    def _clone_configured(
        self, source: SimulationRecord, overrides: dict, strict: bool
    ) -> SimulationRecord:
        """New configured record cloning the source's inputs by reference.

        With ``strict`` a validation problem raises; otherwise the clone is
        persisted as failed so sweep siblings are not affected.
        """
        merged = deep_merge(source.parameters or {}, overrides)
        record = SimulationRecord(
            id=uuid.uuid4().hex[:12],
            created_at=datetime.now(timezone.utc).isoformat(),
            inputs=dict(source.inputs),
            parent_id=source.id,
        )
        try:
            params = SimulationParameters.from_dict(merged)
            model_text = self._build_model(record, params)
        except RoomSimError as exc:
            if strict:
                if isinstance(exc, ValidationFailedError):
                    raise
                raise ValidationFailedError(str(exc)) from exc
            record.parameters = merged
            record.status = "failed"
            record.error = str(exc)
            self._save(record)
            return record
        self._save(record)
        self._store.put_artifact(record.id, "model.idf", model_text.encode("utf-8"))
        record.parameters = params.to_dict()
        record.status = "configured"
        self._save(record)
        return record

    def run_series(self, spec: SeriesSpec) -> dict:
        base = self._get_record(spec.base_id)
        if base.status == "running":
            raise CurrentlyRunningError("base simulation is still running")
        if base.status == "created" or not base.parameters:
            raise NotConfiguredError("base simulation has never been configured")
        children: list[str] = []
        for combo in spec.combinations():
            child = self._clone_configured(base, {"room": combo}, strict=False)
            children.append(child.id)
            if child.status == "configured":
                self.start(child.id)
        series_id = uuid.uuid4().hex[:12]
        series_meta = {
            "kind": "series",
            "id": series_id,
            "created_at": datetime.now(timezone.utc).isoformat(),
            "base_id": spec.base_id,
            "children": children,
        }
        self._store.put(series_id, series_meta)
        return self.series_status(series_id)

    def series_status(self, series_id: str) -> dict:
        meta = self._store.get(series_id)
        if meta is None or meta.get("kind") != "series":
            raise NotFoundError(f"no series {series_id!r}")
        children = []
        finished = True
        for child_id in meta["children"]:
            child = self._get_record(child_id)
            if child.status not in ("done", "failed"):
                finished = False
            children.append(
                {
                    "id": child.id,
                    "status": child.status,
                    "error": child.error,
                    "room": (child.parameters or {}).get("room"),
                }
            )
        return {
            "id": meta["id"],
            "created_at": meta["created_at"],
            "base_id": meta["base_id"],
            "status": "done" if finished else "running",
            "children": children,
        }

    def wait_series(self, series_id: str, timeout: float = 300.0) -> dict:
        deadline = monotonic() + timeout
        while True:
            status = self.series_status(series_id)
            if status["status"] == "done":
                return status
            if monotonic() > deadline:
                raise TimeoutError(f"series {series_id} still running")
            sleep(0.05)

    def history(self) -> list[dict]:
        """Creation-ordered summaries of all simulation records."""
        summaries = []
        for doc_id in self._store.list_ids():
            meta = self._store.get(doc_id)
            if meta and meta.get("kind") == "simulation":
                summaries.append(SimulationRecord.from_meta(meta).summary())
        return summaries
