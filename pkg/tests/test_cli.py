import io
import logging
import random

import pytest

import cli
from core.exceptions import CountTimeout, OracleBoundExceeded
from services.counter import BceMode


def _lines(buffer):
    return buffer.getvalue().splitlines()


def _huge_instance(path, num_vars=90, num_clauses=220, seed=11):
    rng = random.Random(seed)
    lines = ["p cnf %d %d" % (num_vars, num_clauses)]
    for _ in range(num_clauses):
        lits = [v if rng.random() < 0.5 else -v for v in rng.sample(range(1, num_vars + 1), 3)]
        lines.append(" ".join(map(str, lits)) + " 0")
    path.write_text("\n".join(lines) + "\n")
    return path


class TestRun:

    @staticmethod
    @pytest.mark.parametrize("mode", list(BceMode))
    def test_counts_the_running_example(example_file, mode):
        out = io.StringIO()
        assert cli.run(cli.RunConfig(input_path=example_file, mode=mode), out) == cli.EXIT_OK
        assert _lines(out) == ["c s type pmc", "c s exact arb int 4"]

    @staticmethod
    def test_repeated_runs_are_identical(example_file):
        outputs = set()
        for _ in range(3):
            out = io.StringIO()
            cli.run(cli.RunConfig(input_path=example_file, stats=True), out)
            outputs.add(out.getvalue())
        assert len(outputs) == 1

    @staticmethod
    def test_stats_lines(example_file):
        out = io.StringIO()
        cli.run(cli.RunConfig(input_path=example_file, mode="off", stats=True), out)
        lines = _lines(out)
        assert lines[0] == "c s type pmc"
        assert lines[-1] == "c s exact arb int 4"
        stats = dict(line.split()[2:4] for line in lines if line.startswith("c stat "))
        assert set(stats) == {"decisions", "blocked_removed", "cache_hits", "cache_stores",
                              "max_depth", "sat_leaf_calls"}
        assert stats["blocked_removed"] == "0"

    @staticmethod
    def test_missing_file(tmp_path, caplog):
        out = io.StringIO()
        with caplog.at_level(logging.ERROR, logger="ProjCount"):
            status = cli.run(cli.RunConfig(input_path=tmp_path / "missing.cnf"), out)
        assert status == cli.EXIT_INPUT_ERROR
        assert out.getvalue() == ""
        assert "missing.cnf" in caplog.text

    @staticmethod
    def test_malformed_file(tmp_path, caplog):
        path = tmp_path / "bad.cnf"
        path.write_text("p cnf 2 1\n1 5 0\n")
        with caplog.at_level(logging.ERROR, logger="ProjCount"):
            assert cli.run(cli.RunConfig(input_path=path), io.StringIO()) == cli.EXIT_INPUT_ERROR
        assert "line 2" in caplog.text

    @staticmethod
    def test_timeout_has_its_own_status(example_file, monkeypatch):
        def slow(*args, **kwargs):
            raise CountTimeout(0.5)

        monkeypatch.setattr(cli, "count", slow)
        out = io.StringIO()
        assert cli.run(cli.RunConfig(input_path=example_file, timeout_seconds=0.5), out) == cli.EXIT_TIMEOUT
        assert out.getvalue() == ""

    @staticmethod
    def test_oracle_check_passes(example_file):
        out = io.StringIO()
        assert cli.run(cli.RunConfig(input_path=example_file, oracle_check=True), out) == cli.EXIT_OK
        assert _lines(out)[-1] == "c s exact arb int 4"

    @staticmethod
    def test_oracle_mismatch_fails_loudly(example_file, monkeypatch, caplog):
        monkeypatch.setattr(cli, "brute_force_projected_count", lambda formula: 5)
        out = io.StringIO()
        with caplog.at_level(logging.ERROR, logger="ProjCount"):
            status = cli.run(cli.RunConfig(input_path=example_file, oracle_check=True), out)
        assert status == cli.EXIT_ORACLE_MISMATCH
        assert out.getvalue() == ""
        assert "oracle counted 5" in caplog.text

    @staticmethod
    def test_oracle_check_skipped_beyond_bound(example_file, monkeypatch):
        def refuse(formula):
            raise OracleBoundExceeded("too large")

        monkeypatch.setattr(cli, "brute_force_projected_count", refuse)
        out = io.StringIO()
        assert cli.run(cli.RunConfig(input_path=example_file, oracle_check=True), out) == cli.EXIT_OK
        assert _lines(out)[-1] == "c s exact arb int 4"


class TestBenchmark:

    @staticmethod
    def test_running_example_off_and_dyn(tmp_path, example_file):
        out = io.StringIO()
        cli.benchmark(example_file.parent, [BceMode.OFF, BceMode.DYN], out=out)
        header, *rows = [line.split(",") for line in _lines(out)]
        assert header == cli.CSV_HEADER
        assert len(rows) == 2
        by_mode = {row[1]: dict(zip(header, row)) for row in rows}
        assert by_mode["off"]["count"] == by_mode["dyn"]["count"] == "4"
        assert by_mode["off"]["status"] == by_mode["dyn"]["status"] == "OK"
        assert by_mode["off"]["blocked_removed"] == "0"
        assert int(by_mode["dyn"]["blocked_removed"]) >= 4

    @staticmethod
    def test_empty_directory(tmp_path):
        out = io.StringIO()
        cli.benchmark(tmp_path, list(BceMode), out=out)
        assert _lines(out) == [",".join(cli.CSV_HEADER)]

    @staticmethod
    def test_bad_instance_does_not_stop_the_run(tmp_path, example_file):
        (tmp_path / "broken.cnf").write_text("p cnf 1 1\n2 0\n")
        out = io.StringIO()
        cli.benchmark(tmp_path, [BceMode.DYN], out=out)
        rows = [line.split(",") for line in _lines(out)[1:]]
        assert [(row[0], row[2]) for row in rows] == [("broken.cnf", "ERROR"), ("example.cnf", "OK")]

    @staticmethod
    def test_timeout_row(tmp_path):
        _huge_instance(tmp_path / "huge.cnf")
        out = io.StringIO()
        cli.benchmark(tmp_path, [BceMode.OFF], timeout=1e-6, out=out)
        row = _lines(out)[1].split(",")
        assert row[:4] == ["huge.cnf", "off", "TIMEOUT", "TIMEOUT"]

    @staticmethod
    def test_blocked_per_decision_guards_zero_decisions(tmp_path):
        (tmp_path / "unit.cnf").write_text("p cnf 1 1\n1 0\n")
        out = io.StringIO()
        cli.benchmark(tmp_path, [BceMode.DYN], out=out)
        row = dict(zip(cli.CSV_HEADER, _lines(out)[1].split(",")))
        assert row["decisions"] == "0"
        assert row["blocked_per_decision"] == "0.0000"


class TestMain:

    @staticmethod
    def test_single_instance(example_file, capsys):
        assert cli.main([str(example_file), "--bce", "pre"]) == cli.EXIT_OK
        assert capsys.readouterr().out.splitlines()[-1] == "c s exact arb int 4"

    @staticmethod
    def test_bench(example_file, capsys):
        assert cli.main(["--bench", str(example_file.parent), "--modes", "off,dyn"]) == cli.EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == ",".join(cli.CSV_HEADER)
        assert len(lines) == 3

    @staticmethod
    def test_bench_needs_a_directory(example_file):
        assert cli.main(["--bench", str(example_file)]) == cli.EXIT_INPUT_ERROR

    @staticmethod
    def test_invalid_cache_cap(example_file):
        assert cli.main([str(example_file), "--cache-cap", "0"]) == cli.EXIT_INPUT_ERROR

    @staticmethod
    @pytest.mark.parametrize("argv", [[], ["x.cnf", "--bce", "sometimes"], ["--bench", ".", "--modes", "off,fast"]])
    def test_usage_errors(argv):
        with pytest.raises(SystemExit) as exc:
            cli.main(argv)
        assert exc.value.code == 2

    @staticmethod
    def test_parse_modes():
        assert cli._parse_modes("off, DYN") == [BceMode.OFF, BceMode.DYN]
