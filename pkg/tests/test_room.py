"""Tests for room geometry rewriting, window packing and related edits."""

import math
import random

import pytest

from roomsim.errors import ZoneCountMismatchError
from roomsim.idf import parse_idf, serialize_idf
from roomsim.room import (
    MissingBuildingObjectError,
    NegativeAchError,
    NoWindowFoundError,
    NonRectangularWindowError,
    RoomSpec,
    WindowTallerThanWallError,
    WindowTemplate,
    apply_room_geometry,
    extract_geometry,
    extract_window_template,
    pack_windows,
    set_infiltration,
    set_orientation,
    zone_volume,
)


def brute_force_count(wall_width, window_width, margin, gap):
    """Independent packing oracle: grow n until the group no longer fits."""
    available = wall_width - 2 * margin
    n = 0
    while True:
        group = (n + 1) * window_width + n * gap
        if group <= available + 1e-9:
            n += 1
        else:
            return n


class TestPackWindows:
    def test_reference_case(self):
        layout = pack_windows(10.0, WindowTemplate(1.5, 1.2, 0.9), 0.5, 0.5)
        assert layout.window_count == 4  # 4*1.5 + 3*0.5 = 7.5 <= 9.0, 5 needs 9.5
        assert layout.x_offsets == (1.25, 3.25, 5.25, 7.25)

    def test_exact_boundary_single_window(self):
        layout = pack_windows(2.5, WindowTemplate(1.5, 1.2, 0.9), 0.5, 0.5)
        assert layout.window_count == 1
        assert layout.x_offsets[0] == pytest.approx(0.5)

    def test_wall_narrower_than_window(self):
        layout = pack_windows(1.0, WindowTemplate(1.5, 1.2, 0.9), 0.5, 0.5)
        assert layout.window_count == 0
        assert layout.x_offsets == ()

    def test_matches_brute_force_oracle(self):
        rng = random.Random(4242)
        for _ in range(2000):
            wall = rng.uniform(0.5, 30.0)
            window = rng.uniform(0.2, 5.0)
            margin = rng.uniform(0.0, 2.0)
            gap = rng.uniform(0.0, 2.0)
            layout = pack_windows(wall, WindowTemplate(window, 1.0, 0.5), margin, gap)
            assert layout.window_count == brute_force_count(wall, window, margin, gap)

    def test_group_centered_and_inside_margins(self):
        rng = random.Random(77)
        for _ in range(300):
            wall = rng.uniform(2.0, 30.0)
            window = rng.uniform(0.2, 4.0)
            margin = rng.uniform(0.0, 1.5)
            gap = rng.uniform(0.0, 1.5)
            layout = pack_windows(wall, WindowTemplate(window, 1.0, 0.5), margin, gap)
            if layout.window_count == 0:
                continue
            left = layout.x_offsets[0]
            right = layout.x_offsets[-1] + window
            assert left >= margin - 1e-9
            assert right <= wall - margin + 1e-9
            assert left == pytest.approx(wall - right, abs=1e-9)  # centered
            for a, b in zip(layout.x_offsets, layout.x_offsets[1:]):
                assert b - a == pytest.approx(window + gap)


class TestExtractWindowTemplate:
    def test_reference_room(self, room_idf_text):
        template = extract_window_template(parse_idf(room_idf_text))
        assert template.width == pytest.approx(1.5)
        assert template.height == pytest.approx(1.2)
        assert template.sill_height == pytest.approx(0.9)

    def test_no_window(self):
        with pytest.raises(NoWindowFoundError):
            extract_window_template(parse_idf("Version,23.1;"))

    def test_first_window_wins(self):
        doc = parse_idf((__import__("pathlib").Path(__file__).parent / "data" / "corpus" / "09_window_wall.idf").read_text())
        template = extract_window_template(doc)
        assert template.width == pytest.approx(1.5)
        assert template.sill_height == pytest.approx(0.9)

    def test_non_rectangular_rejected(self):
        text = (
            "FenestrationSurface:Detailed, W, Window, C, Wall, , , , 1, 4,"
            "0,0,1, 0,0,0, 1,0,0, 1,0,1.5;"
        )
        with pytest.raises(NonRectangularWindowError):
            extract_window_template(parse_idf(text))

    def test_simple_window_class(self):
        text = "Window, Simple, Glazing, Hosting Wall, , 1, 0.5, 0.8, 1.4, 1.1;"
        template = extract_window_template(parse_idf(text))
        assert template.width == pytest.approx(1.4)
        assert template.height == pytest.approx(1.1)
        assert template.sill_height == pytest.approx(0.8)


def surface_area(vertices):
    """Polygon area from 3D vertices via the cross-product shoelace."""
    total = (0.0, 0.0, 0.0)
    for i in range(len(vertices)):
        ax, ay, az = vertices[i]
        bx, by, bz = vertices[(i + 1) % len(vertices)]
        total = (
            total[0] + ay * bz - az * by,
            total[1] + az * bx - ax * bz,
            total[2] + ax * by - ay * bx,
        )
    return math.sqrt(total[0] ** 2 + total[1] ** 2 + total[2] ** 2) / 2


class TestApplyRoomGeometry:
    def _build(self, room_idf_text, spec):
        doc = parse_idf(room_idf_text)
        template = extract_window_template(doc)
        return apply_room_geometry(doc, spec, template)

    def test_floor_and_facade_dimensions(self, room_idf_text):
        out = self._build(room_idf_text, RoomSpec(4, 5, 3))
        view = extract_geometry(out)
        floor = next(s for s in view.surfaces if s.surface_type == "Floor")
        assert surface_area(floor.vertices) == pytest.approx(20.0)
        facade = [s for s in view.surfaces if s.boundary == "Outdoors"]
        assert len(facade) == 1
        assert surface_area(facade[0].vertices) == pytest.approx(12.0)

    def test_six_surfaces_tile_closed_box(self, room_idf_text):
        rng = random.Random(11)
        for _ in range(25):
            w, d, h = (rng.uniform(2, 12) for _ in range(3))
            out = self._build(room_idf_text, RoomSpec(w, d, h))
            view = extract_geometry(out)
            assert len(view.surfaces) == 6
            walls = [s for s in view.surfaces if s.surface_type == "Wall"]
            wall_area = sum(surface_area(s.vertices) for s in walls)
            assert wall_area == pytest.approx(2 * h * (w + d))
            floor = next(s for s in view.surfaces if s.surface_type == "Floor")
            assert surface_area(floor.vertices) == pytest.approx(w * d)

    def test_window_count_matches_oracle(self, room_idf_text):
        out = self._build(room_idf_text, RoomSpec(10, 5, 3))
        view = extract_geometry(out)
        assert len(view.windows) == brute_force_count(10, 1.5, 0.5, 0.5) == 4

    def test_windows_inside_facade_with_margin(self, room_idf_text):
        rng = random.Random(23)
        for _ in range(25):
            w = rng.uniform(1.5, 20)
            out = self._build(room_idf_text, RoomSpec(w, 4, rng.uniform(1.5, 4)))
            view = extract_geometry(out)
            facade_height = max(v[2] for s in view.surfaces for v in s.vertices)
            for window in view.windows:
                xs = [v[0] for v in window.vertices]
                zs = [v[2] for v in window.vertices]
                assert min(xs) >= 0.5 - 1e-9
                assert max(xs) <= w - 0.5 + 1e-9
                assert min(zs) > 0
                assert max(zs) < facade_height

    def test_idempotent(self, room_idf_text):
        doc = parse_idf(room_idf_text)
        template = extract_window_template(doc)
        spec = RoomSpec(6, 4, 2.8, 45, 0.3)
        once = apply_room_geometry(doc, spec, template)
        twice = apply_room_geometry(once, spec, template)
        assert serialize_idf(once) == serialize_idf(twice)

    def test_prior_fenestration_removed(self, room_idf_text):
        out = self._build(room_idf_text, RoomSpec(2.5, 5, 3))
        names = [w.name for w in extract_geometry(out).windows]
        assert names == ["room_window_1"]  # original "South Window" is gone

    def test_zone_count_mismatch(self, room_idf_text):
        doc = parse_idf(room_idf_text + "\nZone, Second, 0, 0, 0, 0;")
        with pytest.raises(ZoneCountMismatchError):
            apply_room_geometry(doc, RoomSpec(4, 5, 3), WindowTemplate(1.5, 1.2, 0.9))

    def test_sill_lowered_when_room_shrinks(self, room_idf_text):
        # wall 1.6 m: sill drops toward 0.1 first and the 1.2 m window still fits
        out = self._build(room_idf_text, RoomSpec(4, 5, 1.6))
        window = extract_geometry(out).windows[0]
        zs = [v[2] for v in window.vertices]
        assert min(zs) == pytest.approx(0.3)
        assert max(zs) == pytest.approx(1.5)

    def test_height_capped_for_very_low_wall(self, room_idf_text):
        out = self._build(room_idf_text, RoomSpec(4, 5, 1.0))
        window = extract_geometry(out).windows[0]
        zs = [v[2] for v in window.vertices]
        assert min(zs) == pytest.approx(0.1)
        assert max(zs) == pytest.approx(0.9)

    def test_wall_too_low_for_any_window(self, room_idf_text):
        doc = parse_idf(room_idf_text)
        template = extract_window_template(doc)
        with pytest.raises(WindowTallerThanWallError):
            apply_room_geometry(doc, RoomSpec(4, 5, 0.15), template)

    def test_constructions_taken_from_source(self, room_idf_text):
        out = self._build(room_idf_text, RoomSpec(4, 5, 3))
        facade = next(
            o for o in out.find_objects("BuildingSurface:Detailed")
            if o.field(5) == "Outdoors"
        )
        assert facade.field(2) == "Exterior Wall"
        window = out.find_objects("FenestrationSurface:Detailed")[0]
        assert window.field(2) == "Window Construction"


class TestSetOrientation:
    def test_sets_north_axis(self, room_idf_text):
        out = set_orientation(parse_idf(room_idf_text), 0)
        assert out.find_first("Building").field(1) == "0"

    def test_normalizes_over_360(self, room_idf_text):
        out = set_orientation(parse_idf(room_idf_text), 450)
        assert out.find_first("Building").field(1) == "90"

    def test_last_write_wins(self, room_idf_text):
        out = set_orientation(parse_idf(room_idf_text), 90)
        out = set_orientation(out, 180)
        assert out.find_first("Building").field(1) == "180"
        assert len(out.find_objects("Building")) == 1

    def test_missing_building(self):
        with pytest.raises(MissingBuildingObjectError):
            set_orientation(parse_idf("Version,23.1;"), 90)

    def test_vertices_unchanged(self, room_idf_text):
        doc = parse_idf(room_idf_text)
        out = set_orientation(doc, 135)
        assert extract_geometry(out).surfaces == extract_geometry(doc).surfaces


class TestSetInfiltration:
    def test_creates_object(self, room_idf_text):
        out = set_infiltration(parse_idf(room_idf_text), 0.5)
        objs = out.find_objects("ZoneInfiltration:DesignFlowRate")
        assert len(objs) == 1
        assert objs[0].field(3) == "AirChanges/Hour"
        assert objs[0].field(7) == "0.5"
        assert objs[0].field(1) == "Main Room"

    def test_explicit_zero(self, room_idf_text):
        out = set_infiltration(parse_idf(room_idf_text), 0)
        assert out.find_objects("ZoneInfiltration:DesignFlowRate")[0].field(7) == "0"

    def test_upsert_replaces(self, room_idf_text):
        out = set_infiltration(parse_idf(room_idf_text), 0.5)
        out = set_infiltration(out, 1.0)
        objs = out.find_objects("ZoneInfiltration:DesignFlowRate")
        assert len(objs) == 1
        assert objs[0].field(7) == "1"

    def test_negative_rejected(self, room_idf_text):
        with pytest.raises(NegativeAchError):
            set_infiltration(parse_idf(room_idf_text), -0.1)

    def test_always_on_schedule_added(self, room_idf_text):
        out = set_infiltration(parse_idf(room_idf_text), 0.5)
        schedules = out.find_objects("Schedule:Constant")
        assert any(s.name == "always_on" for s in schedules)


class TestZoneVolume:
    def test_reference_room(self, room_idf_text):
        assert zone_volume(parse_idf(room_idf_text)) == pytest.approx(60.0)

    def test_after_rebuild(self, room_idf_text):
        doc = parse_idf(room_idf_text)
        template = extract_window_template(doc)
        out = apply_room_geometry(doc, RoomSpec(4, 4, 3), template)
        assert zone_volume(out) == pytest.approx(48.0)
