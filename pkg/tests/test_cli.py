"""Tests for the command line interface."""

import os
import signal
import socket
import subprocess
import sys
import time

import pytest
from click.testing import CliRunner

from conftest import DATA_DIR, make_epw, office_occupancy_csv
from roomsim.cli import main


@pytest.fixture()
def inputs(tmp_path):
    idf = tmp_path / "room.idf"
    idf.write_bytes((DATA_DIR / "room.idf").read_bytes())
    epw = tmp_path / "weather.epw"
    epw.write_text(make_epw())
    occupancy = tmp_path / "occupancy.csv"
    occupancy.write_text(office_occupancy_csv(days=1))
    return {"idf": idf, "epw": epw, "occupancy": occupancy}


BASE_ARGS = [
    "--width", "4", "--depth", "4", "--height", "3",
    "--orientation", "0", "--ach", "1.0",
    "--begin", "2021-05-02", "--end", "2021-05-02",
    "--step", "10", "--engine", "surrogate",
]


def simulate_args(inputs, out_dir):
    return [
        "simulate",
        "--idf", str(inputs["idf"]),
        "--epw", str(inputs["epw"]),
        "--occupancy", str(inputs["occupancy"]),
        *BASE_ARGS,
        "--out-dir", str(out_dir),
    ]


class TestSimulate:
    def test_surrogate_run_writes_artifacts(self, inputs, tmp_path):
        out_dir = tmp_path / "out"
        result = CliRunner().invoke(main, simulate_args(inputs, out_dir))
        assert result.exit_code == 0, result.output
        csv_path = out_dir / "result.csv"
        eso_path = out_dir / "result.eso"
        assert csv_path.exists() and eso_path.exists()
        assert len(csv_path.read_text().strip().splitlines()) == 145

    def test_missing_idf_flag_is_usage_error(self, inputs, tmp_path):
        args = simulate_args(inputs, tmp_path / "out")
        index = args.index("--idf")
        del args[index : index + 2]
        result = CliRunner().invoke(main, args)
        assert result.exit_code == 2
        assert "--idf" in result.output

    def test_bad_occupancy_exits_one_with_parser_error(self, inputs, tmp_path):
        inputs["occupancy"].write_text(
            "timestamp,occupancy\n"
            "2021-05-02T00:00,0\n"
            "2021-05-02T00:10,0\n"
            "2021-05-02T00:30,0\n"
        )
        result = CliRunner().invoke(main, simulate_args(inputs, tmp_path / "out"))
        assert result.exit_code == 1
        assert "step" in result.stderr

    def test_matches_rest_artifacts_byte_for_byte(self, inputs, tmp_path):
        out_dir = tmp_path / "out"
        result = CliRunner().invoke(main, simulate_args(inputs, out_dir))
        assert result.exit_code == 0, result.output

        from fastapi.testclient import TestClient

        from roomsim.api import create_app
        from roomsim.orchestrator import Orchestrator
        from roomsim.store import FileStore

        orchestrator = Orchestrator(FileStore(tmp_path / "rest-data"))
        with TestClient(create_app(orchestrator)) as client:
            sim_id = client.post("/simulations").json()["id"]
            client.put(f"/simulations/{sim_id}/input/idf", content=inputs["idf"].read_bytes())
            client.put(f"/simulations/{sim_id}/input/weather", content=inputs["epw"].read_bytes())
            client.put(
                f"/simulations/{sim_id}/input/occupancy",
                content=inputs["occupancy"].read_bytes(),
            )
            client.post(
                f"/simulations/{sim_id}/parameters",
                json={
                    "room": {"width": 4, "depth": 4, "height": 3,
                             "orientation": 0, "infiltration_ach": 1.0},
                    "run_period": {"begin": "2021-05-02", "end": "2021-05-02"},
                    "step_minutes": 10,
                    "engine": "surrogate",
                },
            )
            client.post(f"/simulations/{sim_id}/run")
            deadline = time.monotonic() + 60
            while time.monotonic() < deadline:
                if client.get(f"/simulations/{sim_id}/status").json()["status"] == "done":
                    break
                time.sleep(0.05)
            rest_csv = client.get(f"/simulations/{sim_id}/results/csv").content
            rest_eso = client.get(f"/simulations/{sim_id}/results/eso").content
        orchestrator.close()

        assert (out_dir / "result.csv").read_bytes() == rest_csv
        assert (out_dir / "result.eso").read_bytes() == rest_eso


class TestSeries:
    def test_two_by_two_sweep(self, inputs, tmp_path):
        out_dir = tmp_path / "sweep"
        args = [
            "series",
            "--idf", str(inputs["idf"]),
            "--epw", str(inputs["epw"]),
            "--occupancy", str(inputs["occupancy"]),
            *BASE_ARGS,
            "--widths", "3", "--widths", "5",
            "--orientations", "0", "--orientations", "90",
            "--out-dir", str(out_dir),
        ]
        result = CliRunner().invoke(main, args)
        assert result.exit_code == 0, result.output
        subdirs = sorted(p.name for p in out_dir.iterdir() if p.is_dir())
        assert subdirs == ["w3_d4_o0_a1", "w3_d4_o90_a1", "w5_d4_o0_a1", "w5_d4_o90_a1"]
        for sub in subdirs:
            assert (out_dir / sub / "result.csv").exists()
            assert (out_dir / sub / "result.eso").exists()

    def test_child_failure_nonzero_exit_others_written(self, inputs, tmp_path):
        out_dir = tmp_path / "sweep"
        args = [
            "series",
            "--idf", str(inputs["idf"]),
            "--epw", str(inputs["epw"]),
            "--occupancy", str(inputs["occupancy"]),
            *BASE_ARGS,
            # a negative infiltration combination cannot validate: child fails
            "--achs", "1.0", "--achs=-1.0",
            "--out-dir", str(out_dir),
        ]
        result = CliRunner().invoke(main, args)
        assert result.exit_code == 1
        assert (out_dir / "w4_d4_o0_a1" / "result.csv").exists()


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


@pytest.mark.slow
class TestServe:
    def test_serves_and_shuts_down_cleanly(self, tmp_path):
        port = free_port()
        data_root = tmp_path / "data"
        process = subprocess.Popen(
            [sys.executable, "-m", "roomsim.cli", "serve",
             "--listen", f"127.0.0.1:{port}", "--data-root", str(data_root)],
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
        )
        try:
            import httpx

            deadline = time.monotonic() + 15
            response = None
            while time.monotonic() < deadline:
                try:
                    response = httpx.get(f"http://127.0.0.1:{port}/simulations", timeout=1.0)
                    break
                except httpx.TransportError:
                    time.sleep(0.2)
            assert response is not None, "server never came up"
            assert response.status_code == 200
            assert response.json() == []
            httpx.post(f"http://127.0.0.1:{port}/simulations", timeout=5.0)
            process.send_signal(signal.SIGINT)
            process.wait(timeout=10)
            assert (data_root / ".index").exists()  # store intact after shutdown
        finally:
            if process.poll() is None:
                process.kill()

    def test_occupied_port_exits_one(self, tmp_path):
        with socket.socket() as sock:
            sock.bind(("127.0.0.1", 0))
            sock.listen(1)
            port = sock.getsockname()[1]
            result = subprocess.run(
                [sys.executable, "-m", "roomsim.cli", "serve",
                 "--listen", f"127.0.0.1:{port}", "--data-root", str(tmp_path / "d")],
                capture_output=True,
                timeout=30,
            )
        assert result.returncode == 1
