"""Config round-trips, subcommand drivers, artifact formats, reproducibility."""

import json

import numpy as np
import pytest

import torusflow.validators
from torusflow.cli import main
from torusflow.config import KEYS, RunConfig, default_config_text, load_config, parse_text
from torusflow.grid import GridSpec, ScalarField
from torusflow.runner import (
    build_context,
    cmd_ensemble,
    cmd_simulate,
    cmd_sweep_eps,
    cmd_sweep_lambda,
    cmd_validate,
    load_field_dump,
    write_field_dump,
)

FAST = {
    "N": "16",
    "T": "0.02",
    "paths": "30",
    "lambda": "1.0",
    "initial": "sine",
    "amplitude": "0.2",
}


def fast_cfg(tmp_path, **extra):
    raw = dict(FAST)
    raw["out_dir"] = str(tmp_path / "out")
    raw.update({k: str(v) for k, v in extra.items()})
    return RunConfig.from_mapping(raw)


# ------------------------------------------------------------------ config --


def test_defaults_cover_every_key():
    cfg = RunConfig.from_mapping({})
    assert cfg.N == 64
    assert cfg.dt is None  # auto
    assert cfg.lam == 1.0
    text = default_config_text()
    for key in KEYS:
        assert key in text


def test_parse_text_comments_and_spacing():
    raw = parse_text("# comment\n  N = 32   # trailing\n\nT=0.1\n")
    assert raw == {"N": "32", "T": "0.1"}


def test_unknown_key_rejected():
    with pytest.raises(ValueError, match="unknown config keys"):
        RunConfig.from_mapping({"nope": "1"})
    with pytest.raises(ValueError, match="expected 'key = value'"):
        parse_text("just some words\n")


def test_config_roundtrip_identity():
    cfg = RunConfig.from_mapping(
        {"dt": "0.001", "alpha": "0.4", "eps_list": "0.2,0.1,0", "weight_x0": "0.25,0.75", "dim": "2"}
    )
    again = RunConfig.from_mapping(cfg.to_mapping())
    assert again == cfg


def test_load_config_with_overrides(tmp_path):
    f = tmp_path / "run.cfg"
    f.write_text("N = 32\nT = 0.5\n")
    cfg = load_config(f, {"T": "0.1"})
    assert cfg.N == 32
    assert cfg.T == 0.1


def test_resolved_config_reparses_equivalent(tmp_path):
    summary = cmd_simulate(fast_cfg(tmp_path))
    resolved = RunConfig.from_mapping(summary["config"])
    assert resolved.dt is not None  # auto got pinned
    assert RunConfig.from_mapping(resolved.to_mapping()) == resolved


def test_summary_config_reruns_bit_identically(tmp_path):
    first = cmd_simulate(fast_cfg(tmp_path / "a"))
    replay = RunConfig.from_mapping(first["config"]).replace_keys(
        {"out_dir": str(tmp_path / "b" / "out")}
    )
    cmd_simulate(replay)
    assert (tmp_path / "a" / "out" / "energy_0000.csv").read_bytes() == (
        tmp_path / "b" / "out" / "energy_0000.csv"
    ).read_bytes()


# ------------------------------------------------------------- field dumps --


def test_field_dump_roundtrip_exact(tmp_path):
    g = GridSpec(2, 8)
    rng = np.random.default_rng(0)
    u = ScalarField(g, rng.standard_normal((8, 8)))
    path = tmp_path / "field.txt"
    write_field_dump(path, u)
    back = load_field_dump(path)
    assert back.grid == g
    np.testing.assert_array_equal(back.values, u.values)  # 17 digits round-trip


# --------------------------------------------------------------- validate --


def test_cmd_validate_passes_reduced(capsys):
    cfg = RunConfig.from_mapping({"validate_trials": "200"})
    assert cmd_validate(cfg) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 5


def test_cmd_validate_fault_injection(monkeypatch, capsys):
    orig = torusflow.validators.rank_one_eigs
    monkeypatch.setattr(
        torusflow.validators,
        "rank_one_eigs",
        lambda a, b, v: (orig(a, b, v)[0], orig(a, b, v)[1] + 1.0),
    )
    cfg = RunConfig.from_mapping({"validate_trials": "50"})
    assert cmd_validate(cfg) == 1
    out = capsys.readouterr().out
    assert "[FAIL] rank_one_eigs" in out


def test_cli_validate_trials_flag(capsys):
    assert main(["validate", "--trials", "10"]) == 0


# ---------------------------------------------------------------- simulate --


def test_simulate_flat_no_forcing_zero_energy(tmp_path):
    cfg = fast_cfg(tmp_path, initial="flat", amplitude="0.0", **{"lambda": "0.0"})
    cmd_simulate(cfg)
    csv = (tmp_path / "out" / "energy_0000.csv").read_text().splitlines()
    header = csv[0].split(",")
    icol = header.index("dirichlet")
    assert all(float(line.split(",")[icol]) == 0.0 for line in csv[1:])


def test_simulate_deterministic_sine_decays(tmp_path):
    cfg = fast_cfg(tmp_path, **{"lambda": "0.0"})
    cmd_simulate(cfg)
    csv = (tmp_path / "out" / "energy_0000.csv").read_text().splitlines()
    icol = csv[0].split(",").index("dirichlet")
    vals = [float(line.split(",")[icol]) for line in csv[1:]]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_simulate_reproducible_bytes(tmp_path):
    a = fast_cfg(tmp_path / "a")
    b = fast_cfg(tmp_path / "b")
    cmd_simulate(a)
    cmd_simulate(b)
    for name in ("energy_0000.csv", "field_final_0000.txt"):
        assert (tmp_path / "a" / "out" / name).read_bytes() == (
            tmp_path / "b" / "out" / name
        ).read_bytes()


def test_simulate_2d_seam_weight_with_pinching(tmp_path):
    cfg = fast_cfg(
        tmp_path,
        dim=2,
        N=8,
        T=0.005,
        weight="quadratic_seam",
        weight_c="1.0",
        weight_x0="0.5,0.5",
        xi="1.0",
        delta="1.0",
    )
    summary = cmd_simulate(cfg)
    # D^2 f = 2 Id and delta xi = 1, so the margin is exactly 1
    assert summary["pinching"]["satisfied"] is True
    assert summary["pinching"]["min_margin"] == pytest.approx(1.0)
    assert summary["blowups"][0]["blown_up"] is False


def test_simulate_summary_contents(tmp_path):
    summary = cmd_simulate(fast_cfg(tmp_path))
    assert summary["pinching"]["satisfied"] is True  # constant weight, xi = 0
    assert summary["blowups"] == [{"path": 0, "blown_up": False, "blowup_time": None}]
    assert "wall_clock_s" in summary
    on_disk = json.loads((tmp_path / "out" / "run_summary.json").read_text())
    assert on_disk["config"] == summary["config"]


# ---------------------------------------------------------------- ensemble --


def test_ensemble_requires_min_paths(tmp_path):
    with pytest.raises(ValueError, match="paths >= 30"):
        cmd_ensemble(fast_cfg(tmp_path, paths=5))


def test_ensemble_flat_zero_variance(tmp_path):
    cfg = fast_cfg(tmp_path, initial="flat", amplitude="0.0", paths=30)
    summary = cmd_ensemble(cfg)
    v = summary["verdicts"]
    assert v["supermartingale"]["monotone_within"] is True
    assert v["max_principle_violation_fraction"] == 0.0
    assert abs(v["dissipation_ledger"]) <= 1e-12


def test_ensemble_writes_per_path_artifacts(tmp_path):
    cfg = fast_cfg(tmp_path, paths=30, stride=4)
    summary = cmd_ensemble(cfg)
    out = tmp_path / "out"
    assert len(list(out.glob("energy_*.csv"))) == 30
    assert len(list(out.glob("field_final_*.txt"))) == 30
    assert summary["verdicts"]["supermartingale"]["monotone_within"] is True
    assert len(summary["blowups"]) == 30


def test_ensemble_reproducible_and_worker_invariant(tmp_path):
    a = fast_cfg(tmp_path / "a", paths=30)
    b = fast_cfg(tmp_path / "b", paths=30, workers=2)
    cmd_ensemble(a)
    cmd_ensemble(b)
    for i in (0, 7, 29):
        name = f"energy_{i:04d}.csv"
        assert (tmp_path / "a" / "out" / name).read_bytes() == (
            tmp_path / "b" / "out" / name
        ).read_bytes()


# ------------------------------------------------------------------ sweeps --


def test_sweep_eps_single_zero_entry(tmp_path):
    cfg = fast_cfg(tmp_path, eps_list="0")
    summary = cmd_sweep_eps(cfg)
    assert summary["table"] == [{"epsilon": 0.0, "gap": 0.0}]


def test_sweep_eps_gaps_decrease(tmp_path):
    cfg = fast_cfg(tmp_path, eps_list="0.1,0.05,0.025,0", T=0.05)
    summary = cmd_sweep_eps(cfg)
    gaps = [row["gap"] for row in summary["table"]]
    assert summary["verdicts"]["gaps_non_increasing"]
    assert gaps[-1] == 0.0
    assert gaps[0] > gaps[-2] > 0.0


def test_sweep_eps_rejects_ascending(tmp_path):
    with pytest.raises(ValueError, match="non-ascending"):
        cmd_sweep_eps(fast_cfg(tmp_path, eps_list="0.01,0.1"))


def test_sweep_eps_gap_is_resolution_independent(tmp_path):
    """The deterministic gap at fixed eps measures the continuum viscous
    response: refining the grid leaves it unchanged to ~0.1%, so the sweep
    isolates the eps -> 0 limit rather than stencil error."""
    gaps = {}
    for N in (32, 64):
        cfg = fast_cfg(
            tmp_path / str(N), N=N, T=0.1, eps_list="0.025,0", **{"lambda": "0.0"}
        )
        summary = cmd_sweep_eps(cfg)
        gaps[N] = summary["table"][0]["gap"]
    assert gaps[64] == pytest.approx(gaps[32], rel=1e-2)
    assert gaps[64] > 0


def test_sweep_lambda_gaps_decrease_and_reference_exact(tmp_path):
    cfg = fast_cfg(tmp_path, lambda_list="0.4,0.2,0.1", T=0.05)
    summary = cmd_sweep_lambda(cfg)
    gaps = [row["gap"] for row in summary["table"]]
    assert summary["verdicts"]["gaps_strictly_decreasing"]
    assert all(g > 0 for g in gaps)
    ratios = [row["gap_over_lambda"] for row in summary["table"]]
    assert max(ratios) / min(ratios) < 1.5  # roughly linear in lambda


def test_sweep_lambda_rejects_large_noise(tmp_path):
    with pytest.raises(ValueError, match="lam\\^2 < 2"):
        cmd_sweep_lambda(fast_cfg(tmp_path, lambda_list="0.4,1.5"))


# --------------------------------------------------------------- cli shell --


def test_cli_simulate_end_to_end(tmp_path, capsys):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("N = 16\nT = 0.01\nlambda = 0.5\n")
    code = main(
        [
            "simulate",
            "--config",
            str(cfgfile),
            "--seed",
            "777",
            "--out",
            str(tmp_path / "out"),
            "--set",
            "initial=flat",
        ]
    )
    assert code == 0
    summary = json.loads((tmp_path / "out" / "run_summary.json").read_text())
    assert summary["config"]["base_seed"] == "777"
    assert summary["config"]["initial"] == "flat"


def test_cli_print_config(capsys):
    assert main(["print-config"]) == 0
    assert "base_seed" in capsys.readouterr().out


def test_cli_rejects_bad_set(tmp_path):
    with pytest.raises(SystemExit):
        main(["simulate", "--set", "notakeyvalue"])


def test_build_context_resolves_auto_dt(tmp_path):
    ctx = build_context(fast_cfg(tmp_path))
    assert ctx.params.dt == pytest.approx((1.0 / 16) ** 2 / 4.0)
    assert ctx.cfg.dt == ctx.params.dt
