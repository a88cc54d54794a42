"""Experiment configs, runners, and their on-disk reproducibility."""

import numpy as np
import pytest

from spechom import (
    ConfigError,
    ExperimentConfig,
    build_coefficient,
    config_from_mapping,
    load_config,
    parse_config_text,
    percent_to_cutoff,
    run_kernel_sweep,
    run_panels_2d,
    run_sweep_1d,
    run_sweep_2d,
)
from spechom.experiments import (
    DEFAULT_SCHEDULE_1D,
    DEFAULT_SCHEDULE_2D,
    with_overrides,
)


def test_percent_to_cutoff_rounds_half_up():
    assert percent_to_cutoff(0.0, 128) == 0
    assert percent_to_cutoff(5.0, 128) == 3
    assert percent_to_cutoff(10.0, 128) == 6
    assert percent_to_cutoff(25.0, 128) == 16
    assert percent_to_cutoff(5.0, 256) == 6
    # 50% of the one-sided band, n = 20: 20 * 50 / 200 = 5 exactly
    assert percent_to_cutoff(50.0, 20) == 5
    # x.5 rounds up
    assert percent_to_cutoff(35.0, 30) == 5


def test_config_defaults_and_schedules():
    cfg = ExperimentConfig(kind="sweep1d", n_x=128, generator="filtered_random")
    assert cfg.bandwidths == tuple(float(p) for p in DEFAULT_SCHEDULE_1D)
    cfg2 = ExperimentConfig(
        kind="sweep2d", n_x=32, n_y=32, generator="filtered_random"
    )
    assert cfg2.bandwidths == tuple(float(p) for p in DEFAULT_SCHEDULE_2D)


def test_config_sorts_and_dedups_bandwidths():
    cfg = ExperimentConfig(
        kind="sweep1d",
        n_x=64,
        generator="periodic",
        bandwidths=(30.0, 10.0, 30.0, 0.0),
    )
    assert cfg.bandwidths == (0.0, 10.0, 30.0)


def test_config_rejects_bad_shapes():
    with pytest.raises(ConfigError):
        ExperimentConfig(kind="nope", n_x=64, generator="periodic")
    with pytest.raises(ConfigError):
        ExperimentConfig(kind="sweep1d", n_x=64, generator="mystery")
    with pytest.raises(ConfigError):
        ExperimentConfig(kind="sweep1d", n_x=64, n_y=64, generator="periodic")
    with pytest.raises(ConfigError):
        ExperimentConfig(kind="sweep2d", n_x=64, generator="periodic")
    with pytest.raises(ConfigError):
        ExperimentConfig(kind="sweep1d", n_x=64, generator="periodic", tol=0.0)


def test_config_rejects_cutoffs_past_the_dealiased_band():
    with pytest.raises(ConfigError):
        ExperimentConfig(
            kind="sweep1d", n_x=16, generator="periodic", bandwidths=(70.0,)
        )
    # the same percentage is fine on a finer grid axis
    ExperimentConfig(kind="sweep1d", n_x=64, generator="periodic", bandwidths=(60.0,))


def test_panels_need_exactly_one_bandwidth():
    with pytest.raises(ConfigError):
        ExperimentConfig(
            kind="panels2d", n_x=32, n_y=32, generator="filtered_random"
        )
    with pytest.raises(ConfigError):
        ExperimentConfig(
            kind="panels2d",
            n_x=32,
            n_y=32,
            generator="filtered_random",
            bandwidths=(10.0, 20.0),
        )


def test_parse_config_text():
    text = """
    # comment line
    kind = sweep1d
    nx = 64

    generator = filtered_random   # trailing comment
    seed = 3
    """
    mapping = parse_config_text(text)
    assert mapping["kind"] == "sweep1d"
    assert mapping["nx"] == "64"
    assert mapping["seed"] == "3"


def test_parse_rejects_duplicates_and_garbage():
    with pytest.raises(ConfigError):
        parse_config_text("kind = sweep1d\nkind = kernel\n")
    with pytest.raises(ConfigError):
        parse_config_text("kind sweep1d\n")


def test_mapping_to_config():
    cfg = config_from_mapping(
        {
            "kind": "sweep2d",
            "nx": "32",
            "ny": "32",
            "generator": "sparse_annulus",
            "k_min": "4",
            "k_max": "8",
            "bandwidths": "0, 10, 20",
        }
    )
    assert cfg.n_x == 32 and cfg.n_y == 32
    assert cfg.k_min == 4
    assert cfg.bandwidths == (0.0, 10.0, 20.0)


def test_mapping_rejects_unknown_and_missing_keys():
    with pytest.raises(ConfigError):
        config_from_mapping({"kind": "sweep1d", "nx": "64", "waat": "1"})
    with pytest.raises(ConfigError):
        config_from_mapping({"kind": "sweep1d", "nx": "64"})
    with pytest.raises(ConfigError):
        config_from_mapping(
            {"kind": "sweep1d", "nx": "sixty", "generator": "periodic"}
        )


def test_load_config_from_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("kind = kernel\nnx = 64\ngenerator = filtered_random\n")
    cfg = load_config(path)
    assert cfg.kind == "kernel"
    assert cfg.n_x == 64


def test_build_coefficient_dispatch():
    periodic = build_coefficient(
        ExperimentConfig(kind="sweep1d", n_x=32, generator="periodic", high=9.0)
    )
    assert periodic.max_value == 9.0
    random = build_coefficient(
        ExperimentConfig(kind="sweep1d", n_x=32, generator="filtered_random")
    )
    assert random.provenance["generator"] == "filtered_random"
    ring = build_coefficient(
        ExperimentConfig(
            kind="sweep2d",
            n_x=64,
            n_y=64,
            generator="sparse_annulus",
            bandwidths=(0.0,),
        )
    )
    assert ring.provenance["k_min"] == 8


def test_with_overrides():
    cfg = ExperimentConfig(kind="sweep1d", n_x=64, generator="periodic")
    changed = with_overrides(cfg, seed=9, grid=(128, 1), tol=1e-8, out="somewhere")
    assert changed.seed == 9
    assert changed.n_x == 128
    assert changed.tol == 1e-8
    assert changed.out == "somewhere"
    assert with_overrides(cfg) is cfg


def _small_sweep_config(**extra):
    return ExperimentConfig(
        kind="sweep1d",
        n_x=64,
        generator="filtered_random",
        seed=12,
        bandwidths=(0.0, 12.5, 25.0),
        **extra,
    )


def test_sweep_1d_produces_two_methods_per_bandwidth():
    records = run_sweep_1d(_small_sweep_config())
    assert len(records) == 6
    assert [r.method for r in records[:2]] == ["homogenized", "raw-filtered"]
    for r in records:
        assert r.flags == ()
        assert r.l2 is not None and r.l2 >= 0.0
        assert r.diagnostics["seed"] == 12


def test_sweep_1d_flags_degenerate_filtering_but_keeps_going():
    """A high-contrast stripe pattern rings negative under plain
    truncation; that bandwidth is flagged while the homogenized entry
    stays healthy."""
    cfg = ExperimentConfig(
        kind="sweep1d",
        n_x=32,
        generator="periodic",
        low=0.01,
        high=10.0,
        bandwidths=(12.5, 25.0),
    )
    records = run_sweep_1d(cfg)
    by = {(r.bandwidth_pct, r.method): r for r in records}
    healthy = by[(12.5, "raw-filtered")]
    assert healthy.flags == ()
    flagged = by[(25.0, "raw-filtered")]
    assert flagged.flags == ("degenerate-coefficient",)
    assert flagged.l1 is None and flagged.l2 is None
    assert by[(25.0, "homogenized")].flags == ()


def test_sweep_1d_writes_deterministic_outputs(tmp_path):
    cfg = _small_sweep_config()
    first = tmp_path / "first"
    second = tmp_path / "second"
    run_sweep_1d(cfg, out_dir=first)
    run_sweep_1d(cfg, out_dir=second)
    assert (first / "sweep.csv").read_bytes() == (second / "sweep.csv").read_bytes()
    log = (first / "run_log.txt").read_text()
    assert "config seed = 12" in log
    assert "record bandwidth=0 method=homogenized" in log
    assert "wall_seconds:" in log


def test_kernel_sweep_exports(tmp_path):
    cfg = ExperimentConfig(
        kind="kernel",
        n_x=64,
        generator="filtered_random",
        seed=4,
        bandwidths=(10.0, 50.0),
    )
    records = run_kernel_sweep(cfg, out_dir=tmp_path)
    assert [r.bandwidth_pct for r in records] == [10.0, 50.0]
    assert records[0].offdiag_mass > records[1].offdiag_mass
    assert (tmp_path / "kernel_10pct.csv").exists()
    assert (tmp_path / "kernel_50pct.csv").exists()
    mass_lines = (tmp_path / "offdiag_mass.csv").read_text().splitlines()
    assert mass_lines[0] == "bandwidth_pct,offdiag_mass"
    assert len(mass_lines) == 3


def test_kernel_sweep_requires_kernel_kind():
    with pytest.raises(ConfigError):
        run_kernel_sweep(_small_sweep_config())


def test_sweep_2d_small_run():
    cfg = ExperimentConfig(
        kind="sweep2d",
        n_x=16,
        n_y=16,
        generator="filtered_random",
        seed=2,
        bandwidths=(0.0, 25.0),
    )
    records = run_sweep_2d(cfg)
    assert len(records) == 4
    for r in records:
        assert r.flags == ()
        assert r.l2 is not None
        assert "path" in r.diagnostics or r.method == "raw-filtered"


def test_sweep_2d_determinism(tmp_path):
    cfg = ExperimentConfig(
        kind="sweep2d",
        n_x=16,
        n_y=16,
        generator="filtered_random",
        seed=2,
        bandwidths=(0.0, 25.0),
    )
    a, b = tmp_path / "a", tmp_path / "b"
    run_sweep_2d(cfg, out_dir=a)
    run_sweep_2d(cfg, out_dir=b)
    assert (a / "sweep.csv").read_bytes() == (b / "sweep.csv").read_bytes()


def test_panels_export(tmp_path):
    cfg = ExperimentConfig(
        kind="panels2d",
        n_x=16,
        n_y=16,
        generator="filtered_random",
        seed=6,
        bandwidths=(25.0,),
    )
    result = run_panels_2d(cfg, out_dir=tmp_path)
    assert result["coefficient"].shape == (16, 16)
    assert result["homogenized_xx"].shape == (16, 16)
    assert result["filtered"].shape == (16, 16)
    assert result["exact_u"].shape == (17, 17)
    assert result["diff_homogenized"].shape == (17, 17)
    assert result["diagnostics"]["max_principle_ok"] is True
    for name in (
        "coefficient",
        "homogenized_xx",
        "filtered",
        "exact_u",
        "diff_homogenized",
        "diff_filtered",
    ):
        assert (tmp_path / f"{name}.csv").exists()
