"""Blow-ups must be flagged in run summaries, never fatal."""

import numpy as np

from torusflow.config import RunConfig
from torusflow.runner import cmd_ensemble, cmd_simulate


def unstable_cfg(tmp_path, **extra):
    # dt far above the CFL bound so the explicit scheme diverges immediately
    raw = {
        "N": "16",
        "T": "0.2",
        "dt": "0.05",
        "paths": "30",
        "initial": "sine",
        "amplitude": "0.3",
        "blowup_threshold": "1e3",
        "out_dir": str(tmp_path / "out"),
    }
    raw.update({k: str(v) for k, v in extra.items()})
    return RunConfig.from_mapping(raw)


def test_simulate_records_blowup(tmp_path):
    summary = cmd_simulate(unstable_cfg(tmp_path))
    flag = summary["blowups"][0]
    assert flag["blown_up"] is True
    assert flag["blowup_time"] is not None
    assert np.isfinite(summary["verdicts"]["dissipation_ledger"])


def test_ensemble_survives_total_blowup(tmp_path):
    summary = cmd_ensemble(unstable_cfg(tmp_path))
    assert all(b["blown_up"] for b in summary["blowups"])
    assert summary["verdicts"]["supermartingale"] is None
    assert "skipped" in summary["verdicts"]
    # artifacts still written for post-mortem inspection
    assert len(list((tmp_path / "out").glob("energy_*.csv"))) == 30
