"""Rectangular-room rewriting: geometry, orientation, infiltration and windows.

The room is an axis-aligned box with the exterior wall (facade) in the y=0
plane, width along x, depth along y.  All other surfaces are adiabatic.
Orientation is expressed through the Building object's North Axis field so
vertices stay axis-aligned.  Windows keep the dimensions of the first window
found in the source file and are packed onto the facade, as many as fit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import RoomSimError, ZoneCountMismatchError
from .idf import IdfDocument, IdfObject

DEFAULT_MARGIN = 0.5
DEFAULT_GAP = 0.5

_FIT_EPS = 1e-9
_RECT_TOL = 1e-3  # vertical extents may disagree by at most 1 mm


class RoomError(RoomSimError):
    code = "invalid_room"


class NoWindowFoundError(RoomError):
    code = "no_window_found"


class NonRectangularWindowError(RoomError):
    code = "non_rectangular_window"


class WindowTallerThanWallError(RoomError):
    code = "window_taller_than_wall"


class MissingBuildingObjectError(RoomError):
    code = "missing_building_object"


class NegativeAchError(RoomError):
    code = "negative_ach"


class ZoneVolumeUnavailableError(RoomError):
    code = "zone_volume_unavailable"


@dataclass(frozen=True)
class RoomSpec:
    """User-facing room parameters; azimuth is normalized into [0, 360)."""

    width: float
    depth: float
    height: float
    orientation_azimuth: float = 0.0
    infiltration_ach: float = 0.0

    def __post_init__(self):
        for label, value in (
            ("width", self.width),
            ("depth", self.depth),
            ("height", self.height),
        ):
            if not value > 0:
                raise RoomError(f"room {label} must be positive, got {value}")
        if self.infiltration_ach < 0:
            raise NegativeAchError(
                f"infiltration rate must be >= 0, got {self.infiltration_ach}"
            )
        object.__setattr__(
            self, "orientation_azimuth", float(self.orientation_azimuth) % 360.0
        )


@dataclass(frozen=True)
class WindowTemplate:
    width: float
    height: float
    sill_height: float

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise RoomError("window template dimensions must be positive")
        if self.sill_height < 0:
            raise RoomError("window sill height must be >= 0")


@dataclass(frozen=True)
class WallLayout:
    """Placement of identical windows along a wall, centered as a group."""

    window_count: int
    x_offsets: tuple[float, ...]
    sill_height: float
    window_width: float
    window_height: float


def _as_float(value: str) -> float | None:
    try:
        return float(value)
    except ValueError:
        return None


def _trailing_vertices(fields: tuple[str, ...]) -> list[tuple[float, float, float]]:
    """Extract the (x, y, z) vertex list from the tail of a surface object.

    Uses the "Number of Vertices" field as a marker when present; otherwise
    takes the longest trailing run of numeric fields that is a multiple of 3.
    """
    run: list[float] = []
    for value in reversed(fields):
        number = _as_float(value)
        if number is None:
            break
        run.append(number)
    run.reverse()
    length = len(run)

    def triplets(values: list[float]) -> list[tuple[float, float, float]]:
        return [
            (values[i], values[i + 1], values[i + 2]) for i in range(0, len(values), 3)
        ]

    for count in range(length // 3, 0, -1):
        marker = length - 3 * count - 1
        if marker >= 0 and run[marker].is_integer() and int(run[marker]) == count:
            return triplets(run[length - 3 * count :])
    usable = length - (length % 3)
    return triplets(run[length - usable :]) if usable else []


def _surface_vertices(doc: IdfDocument, surface_name: str) -> list[tuple[float, float, float]]:
    for obj in doc.find_objects("BuildingSurface:Detailed"):
        if obj.name.lower() == surface_name.lower():
            return _trailing_vertices(obj.fields)
    return []


def extract_window_template(doc: IdfDocument) -> WindowTemplate:
    """Read width/height/sill of the first window in document order.

    Width is the horizontal extent of the vertices, height the vertical one,
    sill the lowest vertex z minus the base z of the host wall.
    """
    first: IdfObject | None = None
    for obj in doc.objects:
        if obj.class_name.lower() in ("fenestrationsurface:detailed", "window"):
            first = obj
            break
    if first is None:
        raise NoWindowFoundError("document contains no window surface")

    if first.class_name.lower() == "window":
        run = [v for v in (_as_float(f) for f in first.fields) if v is not None]
        if len(run) < 4:
            raise NonRectangularWindowError(
                f"window {first.name!r} lacks position/size data"
            )
        _x0, z0, length, height = run[-4:]
        return WindowTemplate(width=length, height=height, sill_height=z0)

    vertices = _trailing_vertices(first.fields)
    if len(vertices) != 4:
        raise NonRectangularWindowError(
            f"window {first.name!r} has {len(vertices)} vertices, expected 4"
        )
    zs = [v[2] for v in vertices]
    z_min, z_max = min(zs), max(zs)
    for z in zs:
        if min(abs(z - z_min), abs(z - z_max)) > _RECT_TOL:
            raise NonRectangularWindowError(
                f"window {first.name!r} vertical extents are inconsistent"
            )
    xs = [v[0] for v in vertices]
    ys = [v[1] for v in vertices]
    width = math.hypot(max(xs) - min(xs), max(ys) - min(ys))
    height = z_max - z_min
    host = first.field(3)
    wall = _surface_vertices(doc, host) if host else []
    base_z = min((v[2] for v in wall), default=0.0)
    return WindowTemplate(width=width, height=height, sill_height=z_min - base_z)


def pack_windows(
    wall_width: float,
    template: WindowTemplate,
    margin: float = DEFAULT_MARGIN,
    gap: float = DEFAULT_GAP,
) -> WallLayout:
    """Fit as many template windows as possible on a wall of ``wall_width``.

    Windows are separated by ``gap``, inset at least ``margin`` from both wall
    edges, and the group is centered.  A count of zero is a valid layout.
    """
    if wall_width <= 0:
        raise RoomError(f"wall width must be positive, got {wall_width}")
    if margin < 0 or gap < 0:
        raise RoomError("margin and gap must be >= 0")
    available = wall_width - 2 * margin
    if available + _FIT_EPS < template.width:
        count = 0
    else:
        count = int(
            (available + gap + _FIT_EPS) // (template.width + gap)
        )
    group_width = count * template.width + max(count - 1, 0) * gap
    left = (wall_width - group_width) / 2
    offsets = tuple(left + i * (template.width + gap) for i in range(count))
    return WallLayout(
        window_count=count,
        x_offsets=offsets,
        sill_height=template.sill_height,
        window_width=template.width,
        window_height=template.height,
    )


def _fmt(value: float) -> str:
    if float(value).is_integer():
        return str(int(value))
    return str(float(value))


def _single_zone(doc: IdfDocument) -> IdfObject:
    zones = doc.find_objects("Zone")
    if len(zones) != 1:
        raise ZoneCountMismatchError(f"expected exactly 1 zone, found {len(zones)}")
    return zones[0]


def _existing_constructions(doc: IdfDocument) -> dict[str, str]:
    """Construction names keyed by surface role, taken from the source file."""
    by_role: dict[str, str] = {}
    for surface in doc.find_objects("BuildingSurface:Detailed"):
        role = surface.field(1).lower()
        if role in ("ceiling", "roof"):
            role = "ceiling"
        if role in ("wall", "floor", "ceiling") and role not in by_role:
            by_role[role] = surface.field(2)
    for window in doc.find_objects("FenestrationSurface:Detailed"):
        by_role.setdefault("window", window.field(2))
        break
    for window in doc.find_objects("Window"):
        by_role.setdefault("window", window.field(1))
        break
    return by_role


def _clamp_template(template: WindowTemplate, wall_height: float) -> WindowTemplate:
    """Lower the sill first, then cap the height, so the window fits the wall."""
    sill, height = template.sill_height, template.height
    if sill + height > wall_height - 0.1:
        sill = max(0.1, wall_height - 0.1 - height)
        if sill + height > wall_height - 0.1:
            height = wall_height - 0.2
            sill = 0.1
            if height <= 0:
                raise WindowTallerThanWallError(
                    f"no window fits a wall of height {wall_height} m"
                )
    return WindowTemplate(width=template.width, height=height, sill_height=sill)


def _surface(
    name: str,
    surface_type: str,
    construction: str,
    zone: str,
    boundary: str,
    vertices: list[tuple[float, float, float]],
) -> IdfObject:
    outdoors = boundary.lower() == "outdoors"
    fields = [
        name,
        surface_type,
        construction,
        zone,
        "",  # space name
        boundary,
        "",  # boundary condition object
        "SunExposed" if outdoors else "NoSun",
        "WindExposed" if outdoors else "NoWind",
        "",  # view factor to ground
        str(len(vertices)),
    ]
    for x, y, z in vertices:
        fields.extend((_fmt(x), _fmt(y), _fmt(z)))
    return IdfObject("BuildingSurface:Detailed", tuple(fields))


def _window_surface(
    name: str,
    construction: str,
    wall_name: str,
    x0: float,
    sill: float,
    width: float,
    height: float,
) -> IdfObject:
    # facade lies in the y=0 plane; upper-left first, counter-clockwise
    # as seen from outside (negative y)
    vertices = [
        (x0, 0.0, sill + height),
        (x0, 0.0, sill),
        (x0 + width, 0.0, sill),
        (x0 + width, 0.0, sill + height),
    ]
    fields = [
        name,
        "Window",
        construction,
        wall_name,
        "",  # outside boundary condition object
        "",  # view factor to ground
        "",  # frame and divider
        "1",  # multiplier
        str(len(vertices)),
    ]
    for x, y, z in vertices:
        fields.extend((_fmt(x), _fmt(y), _fmt(z)))
    return IdfObject("FenestrationSurface:Detailed", tuple(fields))


def apply_room_geometry(
    doc: IdfDocument,
    spec: RoomSpec,
    template: WindowTemplate,
    margin: float = DEFAULT_MARGIN,
    gap: float = DEFAULT_GAP,
) -> IdfDocument:
    """Replace all surfaces with a closed box and re-pack facade windows.

    The facade (Outdoors boundary) has width ``spec.width``; floor, ceiling
    and the three remaining walls are adiabatic.  Prior fenestration is
    removed.  Idempotent for fixed inputs.
    """
    zone = _single_zone(doc)
    zone_name = zone.name
    constructions = _existing_constructions(doc)
    wall_c = constructions.get("wall", "")
    floor_c = constructions.get("floor", wall_c)
    ceiling_c = constructions.get("ceiling", wall_c)
    window_c = constructions.get("window", "")

    clamped = _clamp_template(template, spec.height)
    layout = pack_windows(spec.width, clamped, margin, gap)

    w, d, h = spec.width, spec.depth, spec.height
    surfaces = [
        _surface(
            "room_floor", "Floor", floor_c, zone_name, "Adiabatic",
            [(0, 0, 0), (0, d, 0), (w, d, 0), (w, 0, 0)],
        ),
        _surface(
            "room_ceiling", "Ceiling", ceiling_c, zone_name, "Adiabatic",
            [(0, d, h), (0, 0, h), (w, 0, h), (w, d, h)],
        ),
        _surface(
            "room_wall_facade", "Wall", wall_c, zone_name, "Outdoors",
            [(0, 0, h), (0, 0, 0), (w, 0, 0), (w, 0, h)],
        ),
        _surface(
            "room_wall_right", "Wall", wall_c, zone_name, "Adiabatic",
            [(w, 0, h), (w, 0, 0), (w, d, 0), (w, d, h)],
        ),
        _surface(
            "room_wall_back", "Wall", wall_c, zone_name, "Adiabatic",
            [(w, d, h), (w, d, 0), (0, d, 0), (0, d, h)],
        ),
        _surface(
            "room_wall_left", "Wall", wall_c, zone_name, "Adiabatic",
            [(0, d, h), (0, d, 0), (0, 0, 0), (0, 0, h)],
        ),
    ]
    windows = [
        _window_surface(
            f"room_window_{i + 1}",
            window_c,
            "room_wall_facade",
            x0,
            layout.sill_height,
            layout.window_width,
            layout.window_height,
        )
        for i, x0 in enumerate(layout.x_offsets)
    ]

    rules = IdfObject(
        "GlobalGeometryRules",
        ("UpperLeftCorner", "Counterclockwise", "Relative"),
    )
    result = doc.remove_objects("GlobalGeometryRules")
    result = result.remove_objects("BuildingSurface:Detailed")
    result = result.remove_objects("FenestrationSurface:Detailed")
    result = result.remove_objects("Window")
    return result.append_objects([rules, *surfaces, *windows])


def set_orientation(doc: IdfDocument, azimuth: float) -> IdfDocument:
    """Set the Building object's North Axis to ``azimuth`` (normalized mod 360)."""
    normalized = float(azimuth) % 360.0
    for index, obj in enumerate(doc.objects):
        if obj.matches_class("Building"):
            return doc.replace_at(index, obj.with_field(1, _fmt(normalized)))
    raise MissingBuildingObjectError("document has no Building object")


def ensure_schedule_type_limits(doc: IdfDocument, name: str, *fields: str) -> IdfDocument:
    return doc.upsert_object(
        "ScheduleTypeLimits", 0, IdfObject("ScheduleTypeLimits", (name, *fields))
    )


def ensure_constant_schedule(doc: IdfDocument, name: str, value: float) -> IdfDocument:
    doc = ensure_schedule_type_limits(doc, "any_number", "", "", "Continuous")
    return doc.upsert_object(
        "Schedule:Constant",
        0,
        IdfObject("Schedule:Constant", (name, "any_number", _fmt(value))),
    )


def set_infiltration(doc: IdfDocument, ach: float) -> IdfDocument:
    """Upsert the room's design infiltration object with the given ACH value.

    A zero rate still writes the object (explicit zero, not absence).
    """
    if ach < 0:
        raise NegativeAchError(f"infiltration rate must be >= 0, got {ach}")
    zone = _single_zone(doc)
    doc = ensure_constant_schedule(doc, "always_on", 1)
    infiltration = IdfObject(
        "ZoneInfiltration:DesignFlowRate",
        (
            "room_infiltration",
            zone.name,
            "always_on",
            "AirChanges/Hour",
            "",
            "",
            "",
            _fmt(ach),
            "1",
            "0",
            "0",
            "0",
        ),
    )
    return doc.upsert_object("ZoneInfiltration:DesignFlowRate", 0, infiltration)


def _polygon_area(points: list[tuple[float, float]]) -> float:
    total = 0.0
    for i, (x0, y0) in enumerate(points):
        x1, y1 = points[(i + 1) % len(points)]
        total += x0 * y1 - x1 * y0
    return abs(total) / 2


def zone_volume(doc: IdfDocument) -> float:
    """Zone volume from the floor polygon area and the surface height span."""
    floor = None
    z_values: list[float] = []
    for surface in doc.find_objects("BuildingSurface:Detailed"):
        vertices = _trailing_vertices(surface.fields)
        z_values.extend(v[2] for v in vertices)
        if surface.field(1).lower() == "floor" and floor is None:
            floor = vertices
    if floor is None or not z_values:
        raise ZoneVolumeUnavailableError(
            "cannot derive zone volume: no floor surface with vertices"
        )
    area = _polygon_area([(x, y) for x, y, _ in floor])
    height = max(z_values) - min(z_values)
    if area <= 0 or height <= 0:
        raise ZoneVolumeUnavailableError("degenerate zone geometry")
    return area * height


@dataclass(frozen=True)
class SurfaceGeometry:
    name: str
    surface_type: str
    boundary: str
    vertices: tuple[tuple[float, float, float], ...]


@dataclass(frozen=True)
class GeometryView:
    """Everything a 3D viewer needs: surfaces, window rectangles, north axis."""

    surfaces: tuple[SurfaceGeometry, ...]
    windows: tuple[SurfaceGeometry, ...]
    north_axis: float


def extract_geometry(doc: IdfDocument) -> GeometryView:
    surfaces = tuple(
        SurfaceGeometry(
            name=obj.name,
            surface_type=obj.field(1),
            boundary=obj.field(5),
            vertices=tuple(_trailing_vertices(obj.fields)),
        )
        for obj in doc.find_objects("BuildingSurface:Detailed")
    )
    windows = tuple(
        SurfaceGeometry(
            name=obj.name,
            surface_type="Window",
            boundary=obj.field(3),
            vertices=tuple(_trailing_vertices(obj.fields)),
        )
        for obj in doc.find_objects("FenestrationSurface:Detailed")
    )
    building = doc.find_first("Building")
    north = 0.0
    if building is not None:
        parsed = _as_float(building.field(1))
        north = parsed if parsed is not None else 0.0
    return GeometryView(surfaces=surfaces, windows=windows, north_axis=north)
