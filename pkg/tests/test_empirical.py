import json
import logging
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from apm_bridge.channels import Nakagami, Rayleigh, aber_closed_rayleigh_wojnar, acc_closed_rayleigh
from apm_bridge.empirical import (
    THREADS_ENV,
    MeasurementSet,
    SafetyMarginWarning,
    ibp_acc,
    interpolate_set,
    make_grid,
    measure_aber_campaign,
    read_set,
    worker_count,
    write_set,
)
from apm_bridge.errors import CapabilityError, DomainError, SetParseError
from apm_bridge.relationships import ModulationParams


def exact_set(n=81, bound=40.0, a=1.0, b=0.5):
    grid = make_grid(n, bound)
    values = aber_closed_rayleigh_wojnar(10 ** (grid / 10), a, b)
    return MeasurementSet(grid, values, modulation=ModulationParams(a, b), label="exact")


class TestGrid:
    def test_symmetric_uniform(self):
        grid = make_grid(5, 20.0)
        assert np.array_equal(grid, [-20.0, -10.0, 0.0, 10.0, 20.0])

    @pytest.mark.parametrize("n, bound", [(1, 10.0), (2.5, 10.0), (5, 0.0), (5, math.inf)])
    def test_invalid(self, n, bound):
        with pytest.raises(DomainError):
            make_grid(n, bound)


class TestMeasurementSet:
    def test_validation(self):
        with pytest.raises(DomainError):
            MeasurementSet([0.0, 0.0], [0.1, 0.1])
        with pytest.raises(DomainError):
            MeasurementSet([0.0, 1.0], [0.1, 0.7])
        with pytest.raises(DomainError):
            MeasurementSet([0.0, 1.0], [0.1])
        with pytest.raises(DomainError):
            MeasurementSet([0.0, 1.0], [0.1, 0.1], stderr=[-1.0, 0.0])

    def test_censoring_defaults_to_zero_values(self):
        mset = MeasurementSet([0.0, 10.0, 20.0], [0.1, 0.01, 0.0])
        assert list(mset.censored) == [False, False, True]

    def test_equality(self):
        assert exact_set() == exact_set()
        assert exact_set() != exact_set(n=41)

    def test_modulation_tuple_coerced(self):
        mset = MeasurementSet([0.0, 1.0], [0.1, 0.05], modulation=(1.0, 0.5))
        assert mset.modulation == ModulationParams(1.0, 0.5)


class TestInterpolation:
    def test_exact_at_nodes(self):
        mset = exact_set()
        assert np.allclose(interpolate_set(mset, mset.mean_snr), mset.values, rtol=1e-12)

    @given(st.floats(-39.9, 39.9))
    def test_close_to_truth_between_nodes(self, db):
        mset = exact_set()
        g = 10 ** (db / 10)
        assert interpolate_set(mset, g) == pytest.approx(aber_closed_rayleigh_wojnar(g, 1.0, 0.5), rel=1e-5)

    @given(st.floats(1e-8, 1e8))
    def test_in_range(self, g):
        value = interpolate_set(exact_set(n=21), g)
        assert 0.0 <= value <= 0.5

    def test_extrapolation_above_is_non_increasing(self):
        mset = exact_set(n=21)
        g = np.logspace(4, 8, 9)
        values = interpolate_set(mset, g)
        assert np.all(np.diff(values) <= 0)

    def test_zero_snr_is_dead_channel(self):
        assert interpolate_set(exact_set(), 0.0) == pytest.approx(0.5, abs=1e-3)

    def test_censored_points_are_skipped(self):
        mset = MeasurementSet([0.0, 10.0, 20.0, 30.0], [0.2, 0.05, 0.004, 0.0])
        assert interpolate_set(mset, 10 ** 2.5) < 0.004

    def test_negative_snr_rejected(self):
        with pytest.raises(DomainError):
            interpolate_set(exact_set(), -1.0)


class TestIbp:
    @pytest.mark.parametrize("a, b", [(0.5, 0.5), (1.0, 1.0)])
    def test_exact_set_recovers_acc(self, a, b):
        mset = exact_set(n=161, bound=80.0, a=a, b=b)
        g = 10 ** (5 / 10)
        assert ibp_acc(mset, g) == pytest.approx(acc_closed_rayleigh(g), rel=1e-4)

    def test_needs_modulation(self):
        mset = MeasurementSet([0.0, 10.0], [0.1, 0.01])
        with pytest.raises(CapabilityError):
            ibp_acc(mset, 1.0)

    def test_warns_outside_safety_margin(self):
        with pytest.warns(SafetyMarginWarning):
            ibp_acc(exact_set(n=21, bound=20.0), 1e3)

    def test_coarse_noisy_set_converges(self):
        mset = measure_aber_campaign(Rayleigh(), make_grid(5, 20.0), (1.0, 0.5), 10000, 1)
        with pytest.warns(SafetyMarginWarning):
            value = ibp_acc(mset, 1.0)
        assert value == pytest.approx(acc_closed_rayleigh(1.0), rel=0.3)


class TestCampaign:
    def test_reproducible_and_thread_independent(self):
        grid = make_grid(7, 10.0)
        one = measure_aber_campaign(Nakagami(2.0), grid, (1.0, 0.5), 5000, 4, threads=1)
        three = measure_aber_campaign(Nakagami(2.0), grid, (1.0, 0.5), 5000, 4, threads=3)
        assert one == three

    def test_env_caps_workers(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV, "2")
        assert worker_count() == 2
        monkeypatch.setenv(THREADS_ENV, "zero")
        with pytest.raises(DomainError):
            worker_count()

    def test_values_clipped_to_half(self):
        mset = measure_aber_campaign(Rayleigh(), [-60.0, -50.0], (1.0, 0.5), 200, 3)
        assert np.all(mset.values <= 0.5)

    @pytest.mark.slow
    def test_statistically_consistent(self):
        grid = make_grid(5, 10.0)
        mset = measure_aber_campaign(Rayleigh(), grid, (1.0, 0.5), 200000, 2)
        want = aber_closed_rayleigh_wojnar(mset.mean_snr, 1.0, 0.5)
        assert np.all(np.abs(mset.values - want) < 4.5 * mset.stderr)


class TestFiles:
    @pytest.mark.parametrize("suffix", [".csv", ".json"])
    def test_round_trip(self, tmp_path, suffix):
        mset = measure_aber_campaign(Rayleigh(), make_grid(9, 30.0), (0.5, 1.0), 2000, 5, label="bench A")
        path = tmp_path / f"set{suffix}"
        write_set(mset, path, comments=["run 1"])
        assert read_set(path) == mset

    def test_round_trip_without_stderr_or_modulation(self, tmp_path):
        mset = MeasurementSet([-3.0, 0.1, 7.25], [0.3, 0.1 + 1e-17, 1 / 3])
        path = tmp_path / "plain.csv"
        write_set(mset, path)
        back = read_set(path)
        assert back == mset
        assert back.modulation is None

    def test_csv_layout(self, tmp_path):
        path = tmp_path / "set.csv"
        write_set(exact_set(n=3, bound=10.0), path, comments=["hello"])
        text = path.read_bytes().decode()
        assert "\r" not in text
        lines = text.splitlines()
        assert lines[0] == "# hello"
        assert "# modulation_a=1.0" in lines
        assert "snr_db,value" in lines

    def test_unsorted_input_is_sorted_with_notice(self, tmp_path, caplog):
        path = tmp_path / "unsorted.csv"
        path.write_text("snr_db,value\n10,0.01\n0,0.1\n")
        with caplog.at_level(logging.WARNING):
            mset = read_set(path)
        assert list(mset.snr_db) == [0.0, 10.0]
        assert "sorted" in caplog.text

    @pytest.mark.parametrize(
        "body, line, field",
        [
            ("snr_db,value\n0,0.7\n", 2, "value"),
            ("snr_db,value\n0,abc\n", 2, "value"),
            ("snr_db,value\n0,0.1,3\n", 2, None),
            ("snr_db,val\n0,0.1\n", 1, None),
            ("snr_db,value,stderr\n0,0.1,-1\n", 2, "stderr"),
        ],
    )
    def test_csv_errors_locate_the_problem(self, tmp_path, body, line, field):
        path = tmp_path / "bad.csv"
        path.write_text(body)
        with pytest.raises(SetParseError) as info:
            read_set(path)
        assert info.value.line == line
        if field:
            assert info.value.field == field

    def test_duplicate_snr(self, tmp_path):
        path = tmp_path / "dup.csv"
        path.write_text("snr_db,value\n0,0.1\n0,0.2\n")
        with pytest.raises(SetParseError):
            read_set(path)

    def test_json_errors(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"points": [{"snr_db": 0}]}))
        with pytest.raises(SetParseError) as info:
            read_set(path)
        assert info.value.field == "points[0]"
        path.write_text("{not json")
        with pytest.raises(SetParseError):
            read_set(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(SetParseError):
            read_set(tmp_path / "absent.csv")
