"""End-to-end tests of the command-line interface."""

import json
import subprocess
import sys

import numpy as np
import pytest

from sigkernels import Dataset, Sequence, save_jsonl
from sigkernels.cli import main
from sigkernels.gram import load_gram_binary, load_gram_csv

from conftest import random_sequence, random_walk


def write_dataset(path, sequences, ids=None):
    ds = Dataset(tuple(sequences), tuple(ids) if ids else ())
    save_jsonl(ds, path)
    return path


@pytest.fixture
def unit_segment(tmp_path):
    return write_dataset(tmp_path / "unit.jsonl", [Sequence([[0.0], [1.0]])], ["u"])


@pytest.fixture
def small_dataset(tmp_path, rng):
    seqs = [random_sequence(rng, int(rng.integers(2, 6)), 2) for _ in range(8)]
    return write_dataset(tmp_path / "ds.jsonl", seqs)


class TestKernelCommand:
    def test_level_zero_prints_one(self, unit_segment, capsys):
        assert main(["kernel", "--x", str(unit_segment), "--y", str(unit_segment), "--level", "0"]) == 0
        assert capsys.readouterr().out.strip() == "1.0"

    def test_report_contents(self, unit_segment, tmp_path, capsys):
        out = tmp_path / "report.json"
        code = main(
            ["kernel", "--x", str(unit_segment), "--y", str(unit_segment), "--level", "2", "--json", str(out)]
        )
        assert code == 0
        report = json.loads(out.read_text())
        assert report["value"] == pytest.approx(2.25)
        assert report["levels"] == pytest.approx([1.0, 1.0, 0.25])
        assert report["method"] == "dp"
        assert report["config"]["kernel"]["level"] == 2
        assert float(capsys.readouterr().out.strip()) == pytest.approx(2.25)

    def test_dp_and_pde_agree_on_bessel_fixture(self, unit_segment, tmp_path):
        dp_out = tmp_path / "dp.json"
        pde_out = tmp_path / "pde.json"
        main(["kernel", "--x", str(unit_segment), "--y", str(unit_segment), "--level", "12", "--json", str(dp_out)])
        main(
            [
                "kernel",
                "--x",
                str(unit_segment),
                "--y",
                str(unit_segment),
                "--method",
                "pde",
                "--dyadic-order",
                "6",
                "--json",
                str(pde_out),
            ]
        )
        dp = json.loads(dp_out.read_text())["value"]
        pde = json.loads(pde_out.read_text())["value"]
        assert abs(dp - pde) < 1e-3

    def test_malformed_config_exits_2_without_output(self, unit_segment, tmp_path, capsys):
        out = tmp_path / "report.json"
        code = main(
            ["kernel", "--x", str(unit_segment), "--y", str(unit_segment), "--level", "-3", "--json", str(out)]
        )
        assert code == 2
        assert not out.exists()
        assert "config error" in capsys.readouterr().err

    def test_missing_data_exits_3(self, unit_segment, tmp_path):
        assert main(["kernel", "--x", str(tmp_path / "nope.jsonl"), "--y", str(unit_segment)]) == 3

    def test_guard_exits_4(self, unit_segment):
        code = main(
            [
                "kernel",
                "--x",
                str(unit_segment),
                "--y",
                str(unit_segment),
                "--method",
                "pde",
                "--dyadic-order",
                "28",
            ]
        )
        assert code == 4

    def test_multi_sequence_input_rejected(self, small_dataset, unit_segment):
        assert main(["kernel", "--x", str(small_dataset), "--y", str(unit_segment)]) == 3

    def test_config_file_with_flag_override(self, unit_segment, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("[kernel]\nfamily = \"linear\"\nlevel = 0\n\n[run]\nseed = 7\n")
        main(["kernel", "--x", str(unit_segment), "--y", str(unit_segment), "--config", str(cfg)])
        assert capsys.readouterr().out.strip() == "1.0"
        main(
            ["kernel", "--x", str(unit_segment), "--y", str(unit_segment), "--config", str(cfg), "--level", "2"]
        )
        assert float(capsys.readouterr().out.strip()) == pytest.approx(2.25)


class TestGramCommand:
    def test_singleton_csv(self, tmp_path, rng, capsys):
        ds = write_dataset(tmp_path / "one.jsonl", [random_sequence(rng, 3, 2)], ["only"])
        out = tmp_path / "g.csv"
        assert main(["gram", "--data", str(ds), "--out", str(out), "--level", "3"]) == 0
        values, ids = load_gram_csv(out)
        assert values.shape == (1, 1) and ids == ("only",)

    def test_nystrom_full_rank_matches_exact(self, small_dataset, tmp_path):
        exact = tmp_path / "exact.csv"
        approx = tmp_path / "approx.csv"
        main(["gram", "--data", str(small_dataset), "--out", str(exact), "--level", "3"])
        main(
            [
                "gram",
                "--data",
                str(small_dataset),
                "--out",
                str(approx),
                "--level",
                "3",
                "--nystrom-rank",
                "8",
            ]
        )
        G, _ = load_gram_csv(exact)
        A, _ = load_gram_csv(approx)
        assert np.linalg.norm(A - G) <= 1e-8 * np.linalg.norm(G)

    def test_byte_identical_across_workers_and_runs(self, small_dataset, tmp_path):
        blobs = []
        for run, workers in [(0, "1"), (1, "4"), (2, "1")]:
            csv_path = tmp_path / f"g{run}.csv"
            bin_path = tmp_path / f"g{run}.bin"
            for out in (csv_path, bin_path):
                code = main(
                    [
                        "gram",
                        "--data",
                        str(small_dataset),
                        "--out",
                        str(out),
                        "--level",
                        "4",
                        "--normalize",
                        "--workers",
                        workers,
                        "--seed",
                        "11",
                    ]
                )
                assert code == 0
            blobs.append((csv_path.read_bytes(), bin_path.read_bytes()))
        assert blobs[0] == blobs[1] == blobs[2]

    def test_binary_round_trip(self, small_dataset, tmp_path):
        out = tmp_path / "g.bin"
        main(["gram", "--data", str(small_dataset), "--out", str(out), "--level", "3"])
        values = load_gram_binary(out)
        assert values.shape == (8, 8)
        np.testing.assert_array_equal(values, values.T)

    def test_bad_extension_exits_2(self, small_dataset, tmp_path):
        assert main(["gram", "--data", str(small_dataset), "--out", str(tmp_path / "g.txt")]) == 2

    def test_report_embeds_config_and_landmarks(self, small_dataset, tmp_path):
        out = tmp_path / "g.csv"
        report = tmp_path / "report.json"
        main(
            [
                "gram",
                "--data",
                str(small_dataset),
                "--out",
                str(out),
                "--nystrom-rank",
                "3",
                "--seed",
                "5",
                "--json",
                str(report),
            ]
        )
        rep = json.loads(report.read_text())
        assert rep["config"]["seed"] == 5
        assert len(rep["nystrom"]["landmarks"]) == 3


class TestTest2Command:
    def test_identical_datasets_do_not_reject(self, small_dataset, capsys):
        code = main(
            [
                "test2",
                "--x",
                str(small_dataset),
                "--y",
                str(small_dataset),
                "--permutations",
                "50",
                "--level",
                "3",
            ]
        )
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["result"]["reject"] is False
        assert 1.0 / 51.0 <= report["result"]["p_value"] <= 1.0

    def test_drift_fixture_rejects(self, tmp_path, rng, capsys):
        X = write_dataset(tmp_path / "x.jsonl", [random_walk(rng, 8, step=0.3) for _ in range(20)])
        Y = write_dataset(
            tmp_path / "y.jsonl", [random_walk(rng, 8, step=0.3, drift=0.3) for _ in range(20)]
        )
        code = main(
            ["test2", "--x", str(X), "--y", str(Y), "--permutations", "100", "--alpha", "0.05", "--level", "3"]
        )
        assert code == 0
        assert json.loads(capsys.readouterr().out)["result"]["reject"] is True

    def test_byte_identical_reports(self, small_dataset, tmp_path, rng):
        other = write_dataset(
            tmp_path / "y.jsonl", [random_sequence(rng, int(rng.integers(2, 6)), 2) for _ in range(6)]
        )
        reports = []
        for run, workers in [(0, "1"), (1, "4")]:
            out = tmp_path / f"t{run}.json"
            code = main(
                [
                    "test2",
                    "--x",
                    str(small_dataset),
                    "--y",
                    str(other),
                    "--permutations",
                    "40",
                    "--seed",
                    "21",
                    "--level",
                    "3",
                    "--workers",
                    workers,
                    "--json",
                    str(out),
                ]
            )
            assert code == 0
            reports.append(out.read_bytes())
        assert reports[0] == reports[1]

    def test_grid_supremum(self, small_dataset, tmp_path, rng, capsys):
        other = write_dataset(
            tmp_path / "y.jsonl", [random_sequence(rng, int(rng.integers(2, 6)), 2) for _ in range(6)]
        )
        grid = tmp_path / "grid.jsonl"
        grid.write_text('{"family": "rbf", "bandwidth": 1.0}\n{"family": "rbf", "bandwidth": 4.0}\n')
        code = main(
            [
                "test2",
                "--x",
                str(small_dataset),
                "--y",
                str(other),
                "--permutations",
                "20",
                "--level",
                "3",
                "--grid",
                str(grid),
            ]
        )
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert len(report["grid"]) == 2


class TestSweepCommand:
    def test_emits_one_line_per_config(self, small_dataset, tmp_path, rng, capsys):
        other = write_dataset(
            tmp_path / "y.jsonl", [random_sequence(rng, int(rng.integers(2, 6)), 2) for _ in range(5)]
        )
        grid = tmp_path / "grid.jsonl"
        grid.write_text(
            '{"level": 2}\n{"level": 4}\n{"family": "rbf", "bandwidth": 2.0}\n'
        )
        code = main(["sweep", "--x", str(small_dataset), "--y", str(other), "--grid", str(grid)])
        assert code == 0
        lines = [json.loads(ln) for ln in capsys.readouterr().out.strip().splitlines()]
        assert len(lines) == 3
        assert lines[0]["config"]["level"] == 2
        assert all("mmd2" in ln and "fingerprint" in ln for ln in lines)


class TestEntryPoint:
    def test_module_invocation(self, tmp_path):
        ds = tmp_path / "one.jsonl"
        ds.write_text('{"id": "u", "points": [[0.0], [1.0]]}\n')
        proc = subprocess.run(
            [sys.executable, "-m", "sigkernels", "kernel", "--x", str(ds), "--y", str(ds), "--level", "2"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert float(proc.stdout.strip()) == pytest.approx(2.25)

    def test_unknown_subcommand_exits_2(self):
        proc = subprocess.run(
            [sys.executable, "-m", "sigkernels", "frobnicate"], capture_output=True, text=True
        )
        assert proc.returncode == 2
