import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from apm_bridge.channels import acc_closed_rayleigh
from apm_bridge.cli import (
    EXIT_INVALID,
    EXIT_NUMERICAL,
    EXIT_OK,
    RunConfig,
    build_parser,
    config_from_args,
    format_float,
    main,
    read_config_header,
    run,
)
from apm_bridge.empirical import read_set


def table(text):
    rows = [line for line in text.splitlines() if line and not line.startswith("#")]
    return np.array([[float(v) for v in row.split(",")] for row in rows])


def invoke(capsys, *argv):
    status = main(list(argv))
    out = capsys.readouterr()
    return status, out.out, out.err


class TestFormatting:
    @pytest.mark.parametrize("value, text", [(1.0, "1.0"), (0.1, "0.10000000000000001"), (-20.0, "-20.0"), (1e300, "1.0000000000000001e+300")])
    def test_format_float(self, value, text):
        assert format_float(value) == text

    def test_round_trips_exactly(self):
        for v in np.random.default_rng(1).normal(size=50) * 1e5:
            assert float(format_float(v)) == v


class TestConfig:
    def test_json_round_trip(self):
        args = build_parser().parse_args(["acc2op", "--model", "cascaded", "--hops", "1:1,2:0.5", "--snr-db", "5"])
        config = config_from_args(args)
        assert RunConfig.from_json(config.to_json()) == config

    def test_header_round_trip(self, tmp_path):
        out = tmp_path / "op.csv"
        assert main(["acc2op", "--snr-db", "3", "--gamma-th-db", "0,3", "--out", str(out)]) == EXIT_OK
        config = read_config_header(out)
        assert config.snr_db == [3.0]
        assert config.gamma_th_db == [0.0, 3.0]
        assert config.output == str(out)

    def test_unknown_keys_rejected(self):
        with pytest.raises(ValueError):
            RunConfig.from_json(json.dumps({"subcommand": "acc2op", "bogus": 1}))


class TestCommands:
    def test_aber2acc_model(self, capsys):
        status, out, _ = invoke(capsys, "aber2acc", "--snr-db", "0,10")
        assert status == EXIT_OK
        rows = table(out)
        assert np.allclose(rows[:, 1], [acc_closed_rayleigh(1.0), acc_closed_rayleigh(10.0)], rtol=1e-7)

    def test_units_bits(self, capsys):
        _, nats, _ = invoke(capsys, "aber2acc", "--snr-db", "10")
        _, bits, _ = invoke(capsys, "aber2acc", "--snr-db", "10", "--units", "bits")
        assert table(bits)[0, 1] == pytest.approx(table(nats)[0, 1] / math.log(2), rel=1e-15)

    def test_simulate_then_ibp(self, tmp_path, capsys):
        path = tmp_path / "set.csv"
        assert main(["simulate-aber", "--grid-n", "41", "--grid-db", "40", "--bits", "20000", "--out", str(path)]) == EXIT_OK
        mset = read_set(path)
        assert len(mset) == 41 and mset.stderr is not None
        assert read_config_header(path).bits == 20000
        status, out, _ = invoke(capsys, "aber2acc", "--in", str(path), "--snr-db", "-5,0")
        assert status == EXIT_OK
        assert table(out)[1, 1] == pytest.approx(acc_closed_rayleigh(1.0), rel=0.05)

    def test_acc2op_default_thresholds(self, capsys):
        status, out, _ = invoke(capsys, "acc2op", "--snr-db", "10", "--grid-n", "3", "--grid-db", "10", "--eps", "0")
        rows = table(out)
        assert status == EXIT_OK
        assert np.array_equal(rows[:, 0], [0.0, 10.0, 20.0])
        assert np.allclose(rows[:, 1], -np.expm1(-(10 ** (rows[:, 0] / 10)) / 10.0), rtol=1e-12)

    def test_acc2oc(self, capsys):
        status, out, _ = invoke(capsys, "acc2oc", "--model", "nakagami", "--m", "2")
        rows = table(out)
        assert status == EXIT_OK and rows.shape == (20, 2)
        assert np.all(np.diff(rows[:, 1]) >= 0)
        assert 0.0 < rows[0, 1] < rows[-1, 1] <= 1.0

    def test_acc2pdf(self, capsys):
        status, out, _ = invoke(capsys, "acc2pdf", "--r", "0.5,1,2")
        assert status == EXIT_OK
        assert np.allclose(table(out)[:, 1], np.exp(-np.array([0.5, 1, 2])), rtol=1e-6)

    @pytest.mark.parametrize("measure", ["capacity", "ber", "reliability"])
    def test_acc2apm_matches_oracle(self, capsys, measure):
        common = ["--model", "gnm", "--m", "2", "--xi", "1.5", "--measure", measure, "--snr-db", "0,10"]
        _, via_acc, _ = invoke(capsys, "acc2apm", *common)
        _, direct, _ = invoke(capsys, "oracle", *common)
        assert np.allclose(table(via_acc)[:, 1], table(direct)[:, 1], rtol=1e-6, atol=1e-10)

    def test_acc2apm_outage(self, capsys):
        status, out, _ = invoke(capsys, "acc2apm", "--measure", "outage", "--gamma-th-db", "0", "--snr-db", "0", "--eps", "0")
        assert status == EXIT_OK
        assert table(out)[0, 1] == pytest.approx(-math.expm1(-1.0), rel=1e-12)

    def test_oracle_mc_has_stderr(self, capsys):
        status, out, _ = invoke(capsys, "oracle", "--method", "mc", "--samples", "5000", "--snr-db", "0,5")
        rows = table(out)
        assert status == EXIT_OK and rows.shape == (2, 3)
        assert np.all(np.abs(rows[:, 1] - [acc_closed_rayleigh(1.0), acc_closed_rayleigh(10 ** 0.5)]) < 5 * rows[:, 2])

    def test_mc_reproducible(self, capsys):
        argv = ["oracle", "--method", "mc", "--samples", "3000", "--snr-db", "0", "--seed", "9"]
        assert invoke(capsys, *argv)[1] == invoke(capsys, *argv)[1]

    def test_gcq_table(self, capsys):
        status, out, _ = invoke(capsys, "gcq-table", "--n", "8")
        rows = table(out)
        assert status == EXIT_OK and rows.shape == (8, 2)
        assert np.all(np.diff(rows[:, 0]) > 0)

    def test_lf_line_endings(self, tmp_path):
        out = tmp_path / "t.csv"
        main(["gcq-table", "--n", "3", "--out", str(out)])
        assert b"\r" not in out.read_bytes()


class TestExitCodes:
    @pytest.mark.parametrize(
        "argv",
        [
            ["acc2op", "--m", "-1"],
            ["acc2op", "--model", "cascaded"],
            ["acc2op", "--model", "cascaded", "--hops", "1:1,2:1"],
            ["simulate-aber"],
            ["aber2acc", "--in", "/nonexistent/file.csv"],
            ["acc2apm", "--measure", "outage"],
            ["acc2oc", "--c-th", "-1"],
            ["nonsense"],
            ["acc2op", "--snr-db", "x"],
        ],
    )
    def test_invalid_input(self, capsys, argv):
        status, _, err = invoke(capsys, *argv)
        assert status == EXIT_INVALID
        assert err

    def test_set_without_modulation_uses_flags(self, tmp_path, capsys):
        path = tmp_path / "nomod.csv"
        path.write_text("snr_db,value\n0,0.1\n10,0.01\n")
        config = RunConfig("aber2acc", input=str(path), snr_db=[-40.0])
        assert run(config, io.StringIO()) == EXIT_OK
        assert "safety margin" in capsys.readouterr().err

    def test_numerical_failure(self, capsys, monkeypatch):
        from apm_bridge import cli
        from apm_bridge.errors import IntegrationError

        def boom(config, stream):
            raise IntegrationError("no convergence")

        monkeypatch.setitem(cli.COMMANDS, "acc2op", boom)
        status, _, err = invoke(capsys, "acc2op")
        assert status == EXIT_NUMERICAL
        assert "numerical failure" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "apm_bridge", "gcq-table", "--n", "2"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("# apm-bridge")


def test_help_exits_cleanly(capsys):
    assert main(["--help"]) == EXIT_OK
