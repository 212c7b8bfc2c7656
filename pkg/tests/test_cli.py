"""Tests for the command-line surface and its file outputs."""

import csv
import io
import json
import math
import os

import pytest

from harqsdo import CodeParams, estimate, exhaustive_search, optimize
from harqsdo.cli import build_config, main, parse_int_range, parse_float_range


def run_cli(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def read_csv(text):
    lines = text.splitlines()
    assert lines[0].startswith("# harq-sdo 0.1.0 ")
    reader = csv.DictReader(io.StringIO("\n".join(lines[1:])))
    return list(reader)


class TestParsing:
    def test_int_ranges(self):
        assert parse_int_range("32") == [32]
        assert parse_int_range("4:8") == [4, 5, 6, 7, 8]
        assert parse_int_range("4:10:3") == [4, 7, 10]
        assert parse_int_range("88,104") == [88, 104]
        assert parse_int_range([3, 5]) == [3, 5]

    def test_float_ranges(self):
        assert parse_float_range("0.5") == [0.5]
        assert parse_float_range("0.3,0.5") == [0.3, 0.5]

    def test_bad_range(self):
        with pytest.raises(ValueError):
            parse_int_range("9:4")

    def test_unknown_command(self):
        with pytest.raises(SystemExit):
            build_config(["frobnicate"])


class TestConstantsCommand:
    def test_digits(self, capsys):
        code, out = run_cli(["constants"], capsys)
        assert code == 0
        rows = {r["name"]: r["value"] for r in read_csv(out)}
        assert rows["erdos_borwein"].startswith("1.6066951524")
        assert rows["digital_search_tree"].startswith("1.1373387363")
        assert float(rows["overhead_moment_2"]) == pytest.approx(5.3255032015, abs=1e-9)


class TestValidateCommand:
    def test_passes_and_exit_zero(self, capsys):
        code, out = run_cli(["validate"], capsys)
        assert code == 0
        rows = read_csv(out)
        assert rows and all(r["verdict"] == "pass" for r in rows)
        names = {r["name"] for r in rows}
        # capacity and monotonicity are enforced here
        assert "throughput_below_capacity" in names
        assert "ack_monotone_in_t" in names


class TestOptimizeCommand:
    def test_methods_and_values(self, capsys):
        code, out = run_cli(
            ["optimize", "--k", "8", "--n", "24", "--m", "3", "--eps", "0.5",
             "--model", "all"],
            capsys,
        )
        assert code == 0
        rows = read_csv(out)
        assert [r["method"] for r in rows] == ["es", "na", "lna"]
        es = exhaustive_search(CodeParams(8, 24, 0.5), 3)
        got = rows[0]
        assert [got["n1"], got["n2"], got["n3"]] == [str(b) for b in es.schedule.boundaries]
        assert float(got["expected_symbols"]) == pytest.approx(es.objective, rel=1e-11)

    def test_csv_json_numeric_equality(self, capsys):
        argv = ["optimize", "--k", "8", "--n", "20", "--m", "2", "--eps", "0.3",
                "--model", "na"]
        _, out_csv = run_cli(argv + ["--format", "csv"], capsys)
        _, out_json = run_cli(argv + ["--format", "json"], capsys)
        row_csv = read_csv(out_csv)[0]
        payload = json.loads(out_json)
        row_json = payload["rows"][0]
        assert float(row_csv["expected_symbols"]) == row_json["expected_symbols"]
        assert float(row_csv["throughput"]) == row_json["throughput"]
        assert [int(row_csv["n1"]), int(row_csv["n2"])] == row_json["schedule"]


class TestSweepKCommand:
    def test_single_point_degenerates_to_optimize(self, capsys):
        _, sweep = run_cli(
            ["sweep-k", "--k", "8", "--n", "24", "--m", "3", "--eps", "0.5",
             "--model", "na"],
            capsys,
        )
        _, single = run_cli(
            ["optimize", "--k", "8", "--n", "24", "--m", "3", "--eps", "0.5",
             "--model", "na"],
            capsys,
        )
        assert read_csv(sweep) == read_csv(single)

    def test_infeasible_rows_marked_skipped(self, capsys):
        _, out = run_cli(
            ["sweep-k", "--k", "22,23,26", "--n", "24", "--m", "3", "--eps", "0.5",
             "--model", "na"],
            capsys,
        )
        rows = read_csv(out)
        by_k = {r["k"]: r for r in rows}
        assert by_k["22"]["method"] == "na"
        assert by_k["23"]["method"] == "skipped"  # k + m - 1 > n
        assert by_k["26"]["method"] == "skipped"  # k > n
        assert by_k["23"]["throughput"] == ""

    def test_es_guard_row(self, capsys):
        # comb(n - k, m - 1) blows past the guard: marked, not attempted
        _, out = run_cli(
            ["sweep-k", "--k", "1", "--n", "200", "--m", "8", "--eps", "0.5",
             "--model", "es"],
            capsys,
        )
        rows = read_csv(out)
        assert rows[0]["method"] == "es:skipped"
        assert rows[0]["expected_symbols"] == ""


class TestSweepNCommand:
    def test_m1_throughput_formula(self, capsys):
        from harqsdo import ack_prob

        _, out = run_cli(
            ["sweep-n", "--k", "8", "--n", "20,24", "--m", "1", "--eps", "0.5",
             "--model", "na"],
            capsys,
        )
        for row in read_csv(out):
            n = int(row["n"])
            want = 8 * ack_prob(CodeParams(8, n, 0.5), n) / n
            assert float(row["throughput"]) == pytest.approx(want, rel=1e-11)

    def test_model_all_takes_best(self, capsys):
        _, out = run_cli(
            ["sweep-n", "--k", "8", "--n", "24", "--m", "3", "--eps", "0.5",
             "--model", "all"],
            capsys,
        )
        row = read_csv(out)[0]
        na = optimize(CodeParams(8, 24, 0.5), 3, "normal").throughput
        lna = optimize(CodeParams(8, 24, 0.5), 3, "lognormal").throughput
        assert float(row["throughput"]) == pytest.approx(max(na, lna), rel=1e-11)


class TestSimulateCommand:
    def test_byte_identical_across_worker_counts(self, tmp_path):
        base = ["simulate", "--k", "8", "--n", "24", "--m", "3", "--eps", "0.5",
                "--trials", "3000", "--seed", "42", "--model", "es",
                "--format", "json"]
        f1 = tmp_path / "w1.json"
        f2 = tmp_path / "w4.json"
        assert main(base + ["--workers", "1", "--out", str(f1)]) == 0
        assert main(base + ["--workers", "4", "--out", str(f2)]) == 0
        assert f1.read_bytes() == f2.read_bytes()

    def test_report_contents(self, capsys):
        code, out = run_cli(
            ["simulate", "--k", "8", "--n", "24", "--m", "3", "--eps", "0.5",
             "--trials", "2000", "--seed", "7", "--model", "na"],
            capsys,
        )
        assert code == 0
        row = read_csv(out)[0]
        assert row["generator"].startswith("philox4x64")
        assert int(row["trials"]) == 2000
        rates = [float(row[f"ack_rate_block{i}"]) for i in (1, 2, 3)]
        assert rates == sorted(rates)
        assert float(row["success_rate"]) == rates[-1]


class TestOutputPlumbing:
    def test_identical_runs_are_byte_identical(self, tmp_path):
        argv = ["sweep-k", "--k", "6:10", "--n", "24", "--m", "2", "--eps", "0.5",
                "--model", "all", "--format", "csv"]
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_config_file(self, tmp_path, capsys):
        cfg = {"command": "optimize", "k": 8, "n": 24, "m": 2, "epsilon": 0.5,
               "model": "na", "format": "csv"}
        path = tmp_path / "run.json"
        path.write_text(json.dumps(cfg))
        code, out = run_cli(["--config", str(path)], capsys)
        assert code == 0
        rows = read_csv(out)
        assert rows[0]["method"] == "na"

    def test_cli_flags_override_config(self, tmp_path, capsys):
        cfg = {"command": "optimize", "k": 8, "n": 24, "m": 2, "epsilon": 0.5,
               "model": "na"}
        path = tmp_path / "run.json"
        path.write_text(json.dumps(cfg))
        code, out = run_cli(["optimize", "--config", str(path), "--m", "3"], capsys)
        assert code == 0
        assert read_csv(out)[0]["m"] == "3"

    def test_unknown_config_field_rejected(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"command": "constants", "frobs": 3}))
        with pytest.raises(SystemExit):
            build_config(["--config", str(path)])

    def test_env_var_output_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HARQ_SDO_OUT", str(tmp_path))
        assert main(["constants"]) == 0
        assert (tmp_path / "constants.csv").exists()

    def test_gnuplot_script(self, tmp_path):
        out = tmp_path / "fig.csv"
        argv = ["sweep-n", "--k", "8", "--n", "20:24:2", "--m", "2", "--eps", "0.5",
                "--model", "na", "--out", str(out), "--gnuplot"]
        assert main(argv) == 0
        script = (tmp_path / "fig.csv.gp").read_text()
        assert "fig.csv" in script and "plot" in script

    def test_schedule_rows_satisfy_invariants(self, capsys):
        _, out = run_cli(
            ["sweep-k", "--k", "4:10", "--n", "20", "--m", "3", "--eps", "0.3",
             "--model", "all"],
            capsys,
        )
        for row in read_csv(out):
            if row["method"] in ("skipped", "es:skipped"):
                continue
            bounds = [int(row[f"n{i}"]) for i in (1, 2, 3)]
            assert bounds[-1] == 20
            assert bounds[0] >= int(row["k"])
            assert all(a < b for a, b in zip(bounds, bounds[1:]))
