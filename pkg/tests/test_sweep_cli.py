"""Sweep configuration, figure presets, serialization and the CLI surface."""

from __future__ import annotations

import json
import math
import subprocess
import sys

import numpy as np
import pytest

from dampdisc.strategies import (
    ChannelPair,
    adaptive_forward_optimal,
    one_shot_psucc,
    two_shot_product_optimal,
)
from dampdisc.sweep import (
    POLAR_CURVE_ANGLES,
    PRESETS,
    STRATEGIES,
    CurveFamily,
    SweepConfig,
    SweepGrid,
    emit,
    format_csv,
    format_json,
    grid_from_json,
    run_mc,
    run_point,
    run_sweep,
)

HALF_PI = math.pi / 2
CLI = [sys.executable, "-m", "dampdisc"]


def run_cli(*args: str, **kwargs):
    return subprocess.run(
        CLI + list(args), capture_output=True, text=True, timeout=120, **kwargs
    )


class TestSweepConfig:
    def test_rejects_unknown_strategy(self):
        with pytest.raises(ValueError, match="unknown strategy"):
            SweepConfig(strategy="helstrom")

    def test_rejects_small_grid(self):
        with pytest.raises(ValueError, match="grid_n"):
            SweepConfig(strategy="one-shot", grid_n=1)

    def test_rejects_range_outside_quarter_turn(self):
        with pytest.raises(ValueError, match="eta0_range"):
            SweepConfig(strategy="one-shot", eta0_range=(0.0, 2.0))
        with pytest.raises(ValueError, match="eta1_range"):
            SweepConfig(strategy="one-shot", eta1_range=(1.0, 0.5))

    def test_rejects_bad_format_and_trials(self):
        with pytest.raises(ValueError, match="format"):
            SweepConfig(strategy="one-shot", format="xml")
        with pytest.raises(ValueError, match="trials"):
            SweepConfig(strategy="one-shot", trials=0)

    def test_rejects_bad_fixed_parameters(self):
        with pytest.raises(ValueError, match="unknown fixed"):
            SweepConfig(strategy="one-shot", fixed={"z": 1.0})
        with pytest.raises(ValueError, match="x must lie"):
            SweepConfig(strategy="one-shot", fixed={"x": 1.5})
        with pytest.raises(ValueError, match="variant"):
            SweepConfig(strategy="two-shot-entangled", fixed={"variant": "both"})

    def test_rejects_out_of_range_angles(self):
        with pytest.raises(ValueError, match="eta0"):
            SweepConfig(strategy="one-shot", eta0=3.2, eta1=0.1)

    def test_pair_requires_both_angles(self):
        with pytest.raises(ValueError, match="eta0"):
            SweepConfig(strategy="one-shot", eta0=0.3).pair()


class TestRunPoint:
    def test_feedback_extreme_pair_is_certain(self):
        report = run_point(SweepConfig(strategy="feedback", eta0=HALF_PI, eta1=0.0))
        assert report.value == pytest.approx(1.0, abs=1e-12)
        assert report.params["x"] == pytest.approx(1.0)
        assert report.params["alpha"] == pytest.approx(math.pi / 4)

    def test_identical_channels_are_a_coin_flip(self):
        report = run_point(SweepConfig(strategy="one-shot", eta0=0.3, eta1=0.3))
        assert report.value == pytest.approx(0.5, abs=1e-12)

    def test_two_copy_feedback_point(self):
        report = run_point(SweepConfig(strategy="adaptive-fb", eta0=math.pi / 4, eta1=0.0))
        assert report.value == pytest.approx(0.933013, abs=1e-6)

    def test_one_shot_reports_interior_optimum(self):
        report = run_point(SweepConfig(strategy="one-shot", eta0=HALF_PI, eta1=math.pi / 3))
        assert report.params["x"] == pytest.approx(2.0 / 3.0, abs=1e-9)
        assert report.value == pytest.approx(0.6443375672974064, abs=1e-9)

    def test_one_shot_fixed_probe_weight(self):
        pair = ChannelPair(1.2, 0.4)
        report = run_point(SweepConfig(strategy="one-shot", eta0=1.2, eta1=0.4, fixed={"x": 0.7}))
        assert report.value == pytest.approx(one_shot_psucc(pair, 0.7), abs=1e-12)
        assert report.params == {"x": 0.7}

    def test_polar_point_matches_closed_radius(self):
        eta1 = 0.9
        x = 0.37
        report = run_point(SweepConfig(strategy="polar-curve", eta1=eta1, fixed={"x": x}))
        expected = 2.0 * math.cos(eta1) * math.sqrt(x * (1.0 - x * math.sin(eta1) ** 2))
        assert report.label == "radius"
        assert report.value == pytest.approx(expected, abs=1e-9)
        assert report.params["theta"] == pytest.approx(math.asin(math.sqrt(x)))

    def test_polar_point_needs_eta1(self):
        with pytest.raises(ValueError, match="eta1"):
            run_point(SweepConfig(strategy="polar-curve"))

    def test_backward_point_runs_its_dominance_check(self):
        report = run_point(
            SweepConfig(strategy="backward", eta0=1.1, eta1=0.5, fixed={"x": 0.6})
        )
        assert report.label == "psucc"
        assert 0.5 <= report.value <= 1.0

    def test_forward_backward_difference_label_and_sign(self):
        report = run_point(SweepConfig(strategy="fwd-bwd-diff", eta0=1.2, eta1=0.4))
        assert report.label == "difference"
        assert report.value <= 1e-9

    def test_product_point_reports_measurement_locality(self):
        report = run_point(SweepConfig(strategy="two-shot-product", eta0=0.9, eta1=0.3))
        lines = report.lines()
        assert any("measurement local" in line for line in lines)

    def test_lines_use_twelve_significant_digits(self):
        report = run_point(SweepConfig(strategy="feedback", eta0=HALF_PI, eta1=math.pi / 6))
        value = (1.0 + math.sin(HALF_PI - math.pi / 6)) / 2.0
        assert report.lines()[0] == f"psucc = {value:.12g}"


class TestRunSweep:
    def test_two_by_two_one_shot_corners(self):
        grid = run_sweep(SweepConfig(strategy="one-shot", grid_n=2))
        assert grid.values[0, 0] == pytest.approx(0.5, abs=1e-12)
        assert grid.values[1, 1] == pytest.approx(0.5, abs=1e-12)
        assert grid.values[0, 1] == pytest.approx(1.0, abs=1e-12)
        assert grid.values[1, 0] == pytest.approx(1.0, abs=1e-12)

    def test_axes_are_inclusive_linspace(self):
        cfg = SweepConfig(strategy="one-shot", grid_n=3, eta0_range=(0.2, 0.8), eta1_range=(0.1, 0.3))
        grid = run_sweep(cfg)
        assert grid.eta0_values[0] == pytest.approx(0.2)
        assert grid.eta0_values[-1] == pytest.approx(0.8)
        assert grid.eta1_values[-1] == pytest.approx(0.3)

    def test_fixed_parameters_respected(self):
        cfg = SweepConfig(
            strategy="one-shot",
            grid_n=2,
            eta0_range=(1.0, 1.5),
            eta1_range=(0.2, 0.6),
            fixed={"x": 1.0},
        )
        grid = run_sweep(cfg)
        for i, e0 in enumerate(grid.eta0_values):
            for j, e1 in enumerate(grid.eta1_values):
                expected = one_shot_psucc(ChannelPair(float(e0), float(e1)), 1.0)
                assert grid.values[i, j] == pytest.approx(expected, abs=1e-12)

    def test_worker_count_does_not_change_results(self):
        cfg = SweepConfig(strategy="one-shot", grid_n=5)
        serial = run_sweep(cfg, workers=1)
        parallel = run_sweep(cfg, workers=4)
        assert np.array_equal(serial.values, parallel.values)
        assert format_csv(serial) == format_csv(parallel)

    def test_reruns_are_byte_identical(self):
        cfg = SweepConfig(strategy="adaptive", grid_n=3)
        assert format_csv(run_sweep(cfg)) == format_csv(run_sweep(cfg))
        assert format_json(run_sweep(cfg)) == format_json(run_sweep(cfg))

    def test_metadata_records_strategy_and_version(self):
        grid = run_sweep(SweepConfig(strategy="sequential", grid_n=2, fixed={"x": 0.5}))
        assert grid.metadata["strategy"] == "sequential"
        assert grid.metadata["fixed"] == {"x": 0.5}
        assert "version" in grid.metadata


class TestPresets:
    def test_preset_ids(self):
        assert set(PRESETS) == {
            "fig2new", "fig3", "fig4new", "fig4", "fig6", "fig7",
            "fig8", "fig10", "fig11", "fig13", "fig15",
        }
        for name, preset in PRESETS.items():
            assert preset.id == name
            assert preset.strategy in STRATEGIES

    def test_feedback_gain_nonnegative_and_zero_on_diagonal(self):
        grid = run_sweep(PRESETS["fig6"].config(grid_n=5))
        assert grid.values.min() >= -1e-9
        assert np.abs(np.diagonal(grid.values)).max() <= 1e-9

    def test_collective_gain_nonnegative(self):
        grid = run_sweep(PRESETS["fig7"].config(grid_n=5))
        assert grid.values.min() >= -1e-9

    def test_collective_probe_weight_range_and_projective_region(self):
        grid = run_sweep(PRESETS["fig8"].config(grid_n=5))
        assert grid.values.min() >= 0.5 - 1e-9
        assert grid.values.max() <= 1.0 + 1e-12
        # interior optima (x* < 1) appear even at gamma ~ 1.3 for lopsided
        # pairs, so only the strongly damping region is pinned to x* = 1
        for i, e0 in enumerate(grid.eta0_values):
            for j, e1 in enumerate(grid.eta1_values):
                gamma = math.cos(float(e0)) + math.cos(float(e1))
                if gamma >= 1.5:
                    assert grid.values[i, j] == pytest.approx(1.0, abs=1e-9)

    def test_collective_vs_adaptive_gap_small_and_nonnegative(self):
        grid = run_sweep(PRESETS["fig10"].config(grid_n=4))
        assert grid.values.min() >= -1e-9
        assert grid.values.max() <= 0.01 + 1e-9

    def test_adaptive_gain_nonnegative(self):
        grid = run_sweep(PRESETS["fig11"].config(grid_n=4))
        assert grid.values.min() >= -1e-9

    def test_second_copy_feedback_gain_nonnegative_zero_diagonal(self):
        grid = run_sweep(PRESETS["fig13"].config(grid_n=4))
        assert grid.values.min() >= -1e-9
        assert np.abs(np.diagonal(grid.values)).max() <= 1e-9

    def test_reference_weight_zero_iff_strong_damping(self):
        grid = run_sweep(PRESETS["fig4"].config(grid_n=5))
        for i, e0 in enumerate(grid.eta0_values):
            for j, e1 in enumerate(grid.eta1_values):
                gamma = math.cos(float(e0)) + math.cos(float(e1))
                if gamma >= 1.0:
                    assert grid.values[i, j] == 0.0
                else:
                    # approaches 1/2 only in the fully damping corner gamma -> 0
                    assert 0.0 < grid.values[i, j] <= 0.5
                    if gamma > 1e-12:
                        assert grid.values[i, j] < 0.5

    def test_side_gain_and_optimum_presets(self):
        gain = run_sweep(PRESETS["fig3"].config(grid_n=4))
        best = run_sweep(PRESETS["fig4new"].config(grid_n=4))
        assert gain.values.min() >= -1e-9
        assert best.values.min() >= 0.5 - 1e-9
        assert best.values.max() <= 1.0 + 1e-9

    def test_forward_backward_preset_cell_matches_sign_convention(self):
        value = PRESETS["fig15"].cell(ChannelPair(1.1, 0.5))
        assert value <= 1e-9

    def test_polar_preset_family(self):
        family = run_sweep(PRESETS["fig2new"].config(grid_n=7))
        assert isinstance(family, CurveFamily)
        assert tuple(family.eta1_values) == POLAR_CURVE_ANGLES
        assert family.theta_values[0] == 0.0
        assert family.theta_values[-1] == pytest.approx(HALF_PI)
        # theta = pi/2 sends the probe weight to 1: radius = 2 cos^2(eta1)
        for row, eta1 in zip(family.values, family.eta1_values):
            assert row[0] == pytest.approx(0.0, abs=1e-12)
            assert row[-1] == pytest.approx(2.0 * math.cos(eta1) ** 2, abs=1e-9)

    def test_polar_sweep_for_single_angle_needs_eta1(self):
        with pytest.raises(ValueError, match="eta1"):
            run_sweep(SweepConfig(strategy="polar-curve", grid_n=5))
        family = run_sweep(SweepConfig(strategy="polar-curve", grid_n=5, eta1=0.4))
        assert family.values.shape == (1, 5)


class TestEmit:
    def small_grid(self) -> SweepGrid:
        return run_sweep(SweepConfig(strategy="one-shot", grid_n=2))

    def test_csv_two_by_two_has_five_lines(self):
        text = format_csv(self.small_grid())
        lines = text.splitlines()
        assert len(lines) == 5
        assert lines[0] == "eta0,eta1,value"
        assert text.endswith("\n")
        assert "\r" not in text

    def test_csv_is_row_major_in_first_angle(self):
        text = format_csv(self.small_grid())
        rows = [line.split(",") for line in text.splitlines()[1:]]
        assert [r[0] for r in rows] == ["0", "0", "1.57079632679", "1.57079632679"]
        assert rows[1][1] == "1.57079632679"

    def test_csv_uses_twelve_significant_digits(self):
        grid = run_sweep(
            SweepConfig(strategy="one-shot", grid_n=2, eta0_range=(0.0, HALF_PI))
        )
        assert f"{HALF_PI:.12g}" in format_csv(grid)

    def test_json_round_trip(self):
        grid = run_sweep(SweepConfig(strategy="adaptive", grid_n=3))
        back = grid_from_json(format_json(grid))
        assert np.array_equal(back.values, grid.values)
        assert np.array_equal(back.eta0_values, grid.eta0_values)
        assert back.metadata == grid.metadata
        assert format_json(back) == format_json(grid)

    def test_curve_csv_header(self):
        family = run_sweep(PRESETS["fig2new"].config(grid_n=3))
        text = format_csv(family)
        assert text.splitlines()[0] == "eta1,theta,value"
        assert len(text.splitlines()) == 1 + 3 * 3

    def test_curve_json_round_trip(self):
        family = run_sweep(PRESETS["fig2new"].config(grid_n=4))
        back = grid_from_json(format_json(family))
        assert isinstance(back, CurveFamily)
        assert np.array_equal(back.values, family.values)

    def test_emit_writes_lf_only(self, tmp_path):
        path = tmp_path / "grid.csv"
        text = emit(self.small_grid(), "csv", str(path))
        raw = path.read_bytes()
        assert raw == text.encode()
        assert b"\r" not in raw

    def test_emit_rejects_unknown_format(self):
        with pytest.raises(ValueError, match="format"):
            emit(self.small_grid(), "yaml")

    def test_feedback_gain_json_diagonal_zero(self):
        grid = run_sweep(PRESETS["fig6"].config(grid_n=4))
        payload = json.loads(format_json(grid))
        values = np.asarray(payload["values"]).reshape(4, 4)
        assert np.abs(np.diagonal(values)).max() <= 1e-9


class TestRunMc:
    def test_certain_discrimination_has_zero_spread(self):
        cfg = SweepConfig(
            strategy="one-shot", eta0=HALF_PI, eta1=0.0, fixed={"x": 1.0},
            trials=1000, seed=11,
        )
        report = run_mc(cfg)
        assert report.analytic == pytest.approx(1.0, abs=1e-12)
        assert report.estimate == 1.0
        assert report.stderr == 0.0
        assert report.z == 0.0
        assert report.ok

    def test_identical_channels_within_four_sigma(self):
        cfg = SweepConfig(strategy="one-shot", eta0=0.4, eta1=0.4, trials=100_000, seed=5)
        report = run_mc(cfg)
        assert report.analytic == pytest.approx(0.5, abs=1e-12)
        assert report.ok

    def test_feedback_estimate_tracks_analytic(self):
        cfg = SweepConfig(
            strategy="feedback", eta0=HALF_PI, eta1=math.pi / 4,
            fixed={"x": 1.0, "alpha": math.pi / 4}, trials=100_000, seed=9,
        )
        report = run_mc(cfg)
        expected = (1.0 + math.sin(HALF_PI - math.pi / 4)) / 2.0
        assert report.analytic == pytest.approx(expected, abs=1e-12)
        assert abs(report.estimate - expected) <= 3.0 * report.stderr + 1e-12

    def test_seed_reproducibility(self):
        cfg = SweepConfig(strategy="adaptive", eta0=1.2, eta1=0.4, trials=20_000, seed=21)
        assert run_mc(cfg).estimate == run_mc(cfg).estimate

    def test_requires_trials_and_simulable_strategy(self):
        with pytest.raises(ValueError, match="trials"):
            run_mc(SweepConfig(strategy="one-shot", eta0=0.4, eta1=0.2))
        with pytest.raises(ValueError, match="cannot be simulated"):
            run_mc(SweepConfig(strategy="fwd-bwd-diff", eta0=0.4, eta1=0.2, trials=10))


class TestCli:
    def test_point_example_feedback(self):
        proc = run_cli("feedback", "--eta0", str(HALF_PI), "--eta1", "0")
        assert proc.returncode == 0
        assert proc.stdout.splitlines()[0] == "psucc = 1"

    def test_point_requires_both_angles(self):
        proc = run_cli("one-shot", "--eta0", "0.4")
        assert proc.returncode == 1
        assert "eta1" in proc.stderr

    def test_unknown_target_is_usage_error(self):
        proc = run_cli("bogus")
        assert proc.returncode == 1
        assert "unknown strategy or preset" in proc.stderr

    def test_bad_flag_value_is_usage_error(self):
        proc = run_cli("one-shot", "--x", "abc", "--eta0", "0.4", "--eta1", "0.2")
        assert proc.returncode == 1

    def test_sweep_to_file_and_byte_identical_rerun(self, tmp_path):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        for out in (out1, out2):
            proc = run_cli("one-shot", "--grid", "2", "--out", str(out))
            assert proc.returncode == 0
        assert out1.read_bytes() == out2.read_bytes()
        assert len(out1.read_text().splitlines()) == 5

    def test_sweep_json_to_stdout(self):
        proc = run_cli("one-shot", "--grid", "2", "--format", "json")
        assert proc.returncode == 0
        payload = json.loads(proc.stdout)
        assert payload["metadata"]["strategy"] == "one-shot"
        assert len(payload["values"]) == 4

    def test_polar_preset_stdout_header(self):
        proc = run_cli("fig2new", "--grid", "5")
        assert proc.returncode == 0
        assert proc.stdout.splitlines()[0] == "eta1,theta,value"

    def test_unwritable_output_path_is_io_error(self, tmp_path):
        proc = run_cli("one-shot", "--grid", "2", "--out", str(tmp_path / "no" / "f.csv"))
        assert proc.returncode == 3
        assert "i/o error" in proc.stderr

    def test_mc_mode_exit_zero(self):
        proc = run_cli(
            "one-shot", "--eta0", str(HALF_PI), "--eta1", "0", "--x", "1",
            "--trials", "1000", "--seed", "3",
        )
        assert proc.returncode == 0
        assert "ok = yes" in proc.stdout

    def test_config_file_with_flag_override(self, tmp_path):
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({"eta0": HALF_PI, "eta1": math.pi / 3, "fixed": {"x": 1.0}}))
        base = run_cli("one-shot", "--config", str(config))
        assert base.returncode == 0
        assert base.stdout.splitlines()[0] == "psucc = 0.625"
        override = run_cli("one-shot", "--config", str(config), "--x", "0.5")
        expected = one_shot_psucc(ChannelPair(HALF_PI, math.pi / 3), 0.5)
        assert override.stdout.splitlines()[0] == f"psucc = {expected:.12g}"

    def test_unknown_config_field_is_usage_error(self, tmp_path):
        config = tmp_path / "cfg.json"
        config.write_text(json.dumps({"etaX": 1.0}))
        proc = run_cli("one-shot", "--config", str(config))
        assert proc.returncode == 1
        assert "unknown config fields" in proc.stderr

    def test_missing_config_file_is_io_error(self):
        proc = run_cli("one-shot", "--config", "/nope/cfg.json")
        assert proc.returncode == 3


class TestFlatObjectiveConventions:
    def test_collective_probe_weight_pinned_for_identical_channels(self):
        res = two_shot_product_optimal(ChannelPair(0.7, 0.7))
        assert res.psucc == pytest.approx(0.5, abs=1e-12)
        assert res.params["x"] == 1.0

    def test_adaptive_optimum_still_half_for_identical_channels(self):
        res = adaptive_forward_optimal(ChannelPair(0.7, 0.7))
        assert res.psucc == pytest.approx(0.5, abs=1e-12)
