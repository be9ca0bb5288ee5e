"""Room-scale building simulation toolkit.

Parses and edits EnergyPlus room models, compiles tabular occupancy data into
schedule hierarchies, runs simulations through a pluggable engine layer
(external EnergyPlus or a built-in surrogate), and exposes the lifecycle via a
REST API and CLI.
"""

from .idf import IdfDocument, IdfObject, parse_idf, serialize_idf
from .room import RoomSpec, WallLayout, WindowTemplate, pack_windows
from .schedules import OccupancyTimeSeries, RunPeriod, parse_occupancy_csv
from .weather import WeatherSeries, parse_epw
from .eso import ResultTable, parse_eso, write_csv
from .engines import EngineResult, SimulationJob, SurrogateParams, run_surrogate
from .orchestrator import Orchestrator, SeriesSpec, SimulationParameters
from .store import FileStore

__version__ = "0.1.0"

__all__ = [
    "EngineResult",
    "FileStore",
    "IdfDocument",
    "IdfObject",
    "OccupancyTimeSeries",
    "Orchestrator",
    "ResultTable",
    "RoomSpec",
    "RunPeriod",
    "SeriesSpec",
    "SimulationJob",
    "SimulationParameters",
    "SurrogateParams",
    "WallLayout",
    "WeatherSeries",
    "WindowTemplate",
    "pack_windows",
    "parse_epw",
    "parse_eso",
    "parse_idf",
    "parse_occupancy_csv",
    "run_surrogate",
    "serialize_idf",
    "write_csv",
]
