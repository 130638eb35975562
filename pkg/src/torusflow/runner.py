"""Experiment drivers behind the CLI subcommands.

Each driver resolves a RunConfig into grid + weight + params, runs the
requested paths, writes the output artifacts

    run_summary.json        resolved config, pinching report, verdicts,
                            per-path blow-up flags, wall clock
    energy_<path>.csv       one row per recorded time, columns as in
                            diagnostics.COLUMNS
    field_final_<path>.txt  header "dim N h", then row-major node values

and returns the summary dict. All numeric output is printed with 17
significant digits, so identical configs produce byte-identical files.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _backend
from .config import RunConfig
from .diagnostics import (
    COLUMNS,
    EnergySeries,
    EnergyObserver,
    bias_budget,
    coercivity_check,
    dissipation_ledger,
    dissipation_ledger_stats,
    l_form_gap,
    small_noise_gap,
    supermartingale_test,
    violation_fraction,
)
from .grid import GridSpec, ScalarField, gradient_c
from .hfuncs import HFunction, make_h
from .initial import build_initial
from .noise import n_steps, sample_path
from .spde import SpdeParams, Trajectory, cfl_dt, run_path
from .validators import run_all
from .weights import PinchingReport, WeightModel, alpha_from_delta, build_preset, check_pinching


@dataclass
class SimContext:
    cfg: RunConfig  # dt/alpha resolved to numbers
    grid: GridSpec
    weights: WeightModel
    params: SpdeParams
    alpha: float
    h_spec: HFunction
    u0: ScalarField
    pinching: PinchingReport
    lipschitz_L: float


def build_context(cfg: RunConfig, dt_override: float | None = None) -> SimContext:
    grid = GridSpec(cfg.dim, cfg.N)
    wparams = {"c": cfg.weight_c, "xi": cfg.xi}
    if cfg.weight_x0:
        wparams["x0"] = cfg.weight_x0
    weights = build_preset(cfg.weight, wparams, grid)
    alpha = cfg.alpha if cfg.alpha is not None else 0.5 * alpha_from_delta(cfg.delta)

    probe = SpdeParams(cfg.epsilon, cfg.xi, cfg.lam, dt=1.0, scheme=cfg.scheme)
    dt = dt_override if dt_override is not None else cfg.dt
    if dt is None:
        dt = cfl_dt(probe, weights, grid)
    params = SpdeParams(cfg.epsilon, cfg.xi, cfg.lam, dt, cfg.scheme, cfg.blowup_threshold)

    u0 = build_initial(cfg.initial, grid, cfg.amplitude, cfg.lipschitz_L, cfg.modes, cfg.base_seed)
    L = cfg.lipschitz_L if cfg.lipschitz_L > 0 else gradient_c(u0).sup_norm()
    h_level = cfg.h_M if cfg.h_M is not None else float(np.sqrt(1.0 + L * L))
    scale = cfg.epsilon if cfg.h_spec == "area" else alpha * cfg.epsilon
    h_spec = make_h(cfg.h_spec, scale=scale, M=max(1.0, h_level))

    resolved = cfg.replace_keys(
        {"dt": repr(float(dt)), "alpha": repr(float(alpha)), "h_M": repr(float(h_level))}
    )
    pinching = check_pinching(weights, cfg.delta)
    return SimContext(resolved, grid, weights, params, alpha, h_spec, u0, pinching, L)


def run_one_path(ctx: SimContext, idx: int) -> tuple[EnergySeries, Trajectory]:
    """Simulate path `idx` with its derived seed and per-step energy rows."""
    cfg = ctx.cfg
    steps = n_steps(cfg.T, ctx.params.dt)
    path = sample_path(steps * ctx.params.dt, ctx.params.dt, cfg.base_seed ^ idx)
    obs = EnergyObserver(ctx.weights, ctx.params, ctx.alpha, ctx.h_spec, stride=cfg.stride)
    traj = run_path(ctx.u0, cfg.T, path, ctx.params, ctx.weights, [obs])
    return obs.series(), traj


def _worker(cfg_map: dict[str, str], idx: int):
    ctx = build_context(RunConfig.from_mapping(cfg_map))
    series, traj = run_one_path(ctx, idx)
    return idx, series.data, traj


def run_ensemble(ctx: SimContext) -> tuple[list[EnergySeries], list[Trajectory]]:
    cfg = ctx.cfg
    if cfg.workers > 1:
        out: list = [None] * cfg.paths
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futs = [pool.submit(_worker, cfg.to_mapping(), i) for i in range(cfg.paths)]
            for fut in futs:
                idx, data, traj = fut.result()
                out[idx] = (EnergySeries(data), traj)
        pairs = out
    else:
        pairs = [run_one_path(ctx, i) for i in range(cfg.paths)]
    return [p[0] for p in pairs], [p[1] for p in pairs]


# ---------------------------------------------------------------- output --


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_energy_csv(path: Path, series: EnergySeries) -> None:
    lines = [",".join(COLUMNS)]
    for row in series.data:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def write_field_dump(path: Path, u: ScalarField) -> None:
    g = u.grid
    lines = [f"{g.dim} {g.points_per_axis} {_fmt(g.h)}"]
    lines.extend(_fmt(v) for v in u.values.ravel())
    path.write_text("\n".join(lines) + "\n")


def load_field_dump(path: Path) -> ScalarField:
    lines = Path(path).read_text().split()
    dim, n = int(lines[0]), int(lines[1])
    vals = np.array([float(tok) for tok in lines[3:]]).reshape((n,) * dim)
    return ScalarField(GridSpec(dim, n), vals)


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def write_summary_json(path: Path, summary: dict) -> None:
    path.write_text(json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n")


def _base_summary(ctx: SimContext, command: str) -> dict:
    return {
        "command": command,
        "config": ctx.cfg.to_mapping(),
        "pinching": ctx.pinching.to_dict(),
        "lipschitz_L": ctx.lipschitz_L,
        "backend": _backend.ACTIVE,
    }


def _blowup_flags(trajs: Sequence[Trajectory]) -> list[dict]:
    return [
        {"path": i, "blown_up": t.blown_up, "blowup_time": t.blowup_time}
        for i, t in enumerate(trajs)
    ]


_GATE_TRIALS = 200


def _lemma_gate() -> str:
    """Short randomized pass over the lemma validators before any
    experiment's output is trusted (the full 10^4-trial suite lives behind
    the `validate` subcommand)."""
    failed = [r.name for r in run_all(trials=_GATE_TRIALS) if not r.passed]
    if failed:
        raise RuntimeError(f"lemma validators failed: {failed}; run `torusflow validate`")
    return f"passed ({_GATE_TRIALS} trials per check)"


# ---------------------------------------------------------------- drivers --


def cmd_validate(cfg: RunConfig, echo=print) -> int:
    """Run the lemma validators; nonzero exit on any failure."""
    t0 = time.perf_counter()
    results = run_all(trials=cfg.validate_trials)
    status = 0
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        echo(f"[{mark}] {r.name:<22} worst={r.worst: .3e}  ({r.detail})")
        if not r.passed:
            status = 1
    echo(f"validate: {cfg.validate_trials} trials/check in {time.perf_counter() - t0:.2f}s")
    return status


def cmd_simulate(cfg: RunConfig, out_dir: str | Path | None = None) -> dict:
    """One path: energy CSV, final field dump, summary with verdicts."""
    t0 = time.perf_counter()
    gate = _lemma_gate()
    ctx = build_context(cfg)
    series, traj = run_one_path(ctx, 0)

    summary = _base_summary(ctx, "simulate")
    summary["lemma_gate"] = gate
    L = ctx.lipschitz_L
    slack_vals = [
        coercivity_check(ctx.u0, ctx.params, ctx.weights),
        coercivity_check(traj.final.u, ctx.params, ctx.weights),
    ]
    summary["verdicts"] = {
        "max_principle": bool(np.max(series.col("grad_sup")) <= L * (1.0 + cfg.grad_slack)),
        "dissipation_ledger": dissipation_ledger([series], ctx.params, ctx.weights, ctx.alpha),
        "coercivity_slack_min": min(slack_vals),
        "supermartingale": None,
    }
    summary["blowups"] = _blowup_flags([traj])
    summary["wall_clock_s"] = time.perf_counter() - t0

    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_energy_csv(out / "energy_0000.csv", series)
    write_field_dump(out / "field_final_0000.txt", traj.final.u)
    write_summary_json(out / "run_summary.json", summary)
    return summary


def cmd_ensemble(cfg: RunConfig, out_dir: str | Path | None = None) -> dict:
    """M >= 30 paths plus aggregate verdicts."""
    if cfg.paths < 30:
        raise ValueError("ensemble needs paths >= 30")
    t0 = time.perf_counter()
    gate = _lemma_gate()
    ctx = build_context(cfg)
    series_list, trajs = run_ensemble(ctx)

    alive = [s for s, t in zip(series_list, trajs) if not t.blown_up]
    slacks = [coercivity_check(ctx.u0, ctx.params, ctx.weights)]
    slacks += [coercivity_check(t.final.u, ctx.params, ctx.weights) for t in trajs[:8]]

    summary = _base_summary(ctx, "ensemble")
    summary["lemma_gate"] = gate
    if len(alive) >= 30:
        mean_e0 = float(np.mean([s.col("dirichlet")[0] for s in alive]))
        bias = bias_budget(ctx.params.dt * cfg.stride, ctx.grid.h, scale=max(1.0, mean_e0))
        verdict = supermartingale_test(alive, k=cfg.k_stderr, bias=bias)
        ledger, ledger_se = dissipation_ledger_stats(alive, ctx.params, ctx.weights, ctx.alpha)
        ledger_lam = dissipation_ledger(
            alive, ctx.params, ctx.weights, ctx.alpha, lambda_weighted=True
        )
        l_gap, l_emp = l_form_gap(alive)
        frac = violation_fraction(alive, ctx.lipschitz_L, cfg.grad_slack)
        summary["verdicts"] = {
            "supermartingale": verdict.to_dict(),
            "max_principle_violation_fraction": frac,
            "dissipation_ledger": ledger,
            "dissipation_ledger_stderr": ledger_se,
            "dissipation_ledger_ok": ledger <= cfg.k_stderr * ledger_se + bias,
            "dissipation_ledger_lambda_weighted": ledger_lam,
            "l_form_gap": l_gap,
            "empirical_L": l_emp,
            "bias_budget": bias,
            "coercivity_slack_min": min(slacks),
        }
    else:
        # blow-ups are flagged, not fatal; too few surviving paths for stats
        summary["verdicts"] = {
            "supermartingale": None,
            "skipped": f"only {len(alive)} of {cfg.paths} paths survived",
            "coercivity_slack_min": min(slacks),
        }
    summary["blowups"] = _blowup_flags(trajs)
    summary["wall_clock_s"] = time.perf_counter() - t0

    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for i, (s, t) in enumerate(zip(series_list, trajs)):
        write_energy_csv(out / f"energy_{i:04d}.csv", s)
        write_field_dump(out / f"field_final_{i:04d}.txt", t.final.u)
    write_summary_json(out / "run_summary.json", summary)
    return summary


def _common_dt(cfg: RunConfig, eps_values: Sequence[float]) -> float:
    """One dt for a sweep: the tightest CFL bound across the swept values."""
    if cfg.dt is not None:
        return cfg.dt
    grid = GridSpec(cfg.dim, cfg.N)
    wparams = {"c": cfg.weight_c, "xi": cfg.xi}
    if cfg.weight_x0:
        wparams["x0"] = cfg.weight_x0
    weights = build_preset(cfg.weight, wparams, grid)
    dts = [
        cfl_dt(SpdeParams(e, cfg.xi, cfg.lam, dt=1.0, scheme=cfg.scheme), weights, grid)
        for e in eps_values
    ]
    return min(dts)


def cmd_sweep_eps(cfg: RunConfig, out_dir: str | Path | None = None) -> dict:
    """Viscous-limit study: common Wiener path, descending eps, gaps to eps=0."""
    eps_values = list(cfg.eps_list)
    if not eps_values:
        raise ValueError("eps_list is empty")
    if any(b > a for a, b in zip(eps_values, eps_values[1:])):
        raise ValueError("eps_list must be non-ascending")
    if eps_values[-1] != 0.0:
        eps_values.append(0.0)

    t0 = time.perf_counter()
    gate = _lemma_gate()
    dt = _common_dt(cfg, eps_values)
    finals: dict[float, ScalarField] = {}
    ctx0 = None
    trajs = []
    for e in eps_values:
        ctx = build_context(cfg.replace_keys({"epsilon": repr(float(e))}), dt_override=dt)
        if e == 0.0:
            ctx0 = ctx
        steps = n_steps(cfg.T, dt)
        path = sample_path(steps * dt, dt, cfg.base_seed)
        traj = run_path(ctx.u0, cfg.T, path, ctx.params, ctx.weights, [])
        finals[e] = traj.final.u
        trajs.append(traj)
    assert ctx0 is not None
    gaps = [small_noise_gap(finals[e], finals[0.0], ctx0.weights) for e in eps_values]

    non_increasing = all(b <= a + 1e-12 for a, b in zip(gaps, gaps[1:]))
    summary = _base_summary(ctx0, "sweep-eps")
    summary["lemma_gate"] = gate
    summary["table"] = [{"epsilon": e, "gap": g} for e, g in zip(eps_values, gaps)]
    summary["verdicts"] = {"gaps_non_increasing": non_increasing, "dt": dt}
    summary["blowups"] = _blowup_flags(trajs)
    summary["wall_clock_s"] = time.perf_counter() - t0

    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for i, e in enumerate(eps_values):
        write_field_dump(out / f"field_final_{i:04d}.txt", finals[e])
    write_summary_json(out / "run_summary.json", summary)
    return summary


def cmd_sweep_lambda(cfg: RunConfig, out_dir: str | Path | None = None) -> dict:
    """Small-noise study: common path, gaps of u^lam(T) to the deterministic
    flow; lambda^2 >= 2 rejected up front."""
    lam_values = list(cfg.lambda_list)
    if not lam_values:
        raise ValueError("lambda_list is empty")
    for lam in lam_values:
        if lam * lam >= 2.0:
            raise ValueError(f"noise intensity violates lam^2 < 2: lam = {lam}")

    t0 = time.perf_counter()
    gate = _lemma_gate()
    dt = _common_dt(cfg, [cfg.epsilon])
    steps = n_steps(cfg.T, dt)

    def final_for(lam: float):
        ctx = build_context(cfg.replace_keys({"lambda": repr(float(lam))}), dt_override=dt)
        path = sample_path(steps * dt, dt, cfg.base_seed)
        traj = run_path(ctx.u0, cfg.T, path, ctx.params, ctx.weights, [])
        return ctx, traj

    ctx_ref, traj_ref = final_for(0.0)
    rows = []
    trajs = [traj_ref]
    for lam in lam_values:
        ctx, traj = final_for(lam)
        gap = small_noise_gap(traj.final.u, traj_ref.final.u, ctx_ref.weights)
        rows.append({"lambda": lam, "gap": gap, "gap_over_lambda": gap / lam if lam else 0.0})
        trajs.append(traj)

    gaps = [r["gap"] for r in rows]
    pairs = [(a, b) for a, b in zip(gaps, gaps[1:])]
    strictly_decreasing = all(b < a for a, b in pairs) if pairs else True
    summary = _base_summary(ctx_ref, "sweep-lambda")
    summary["lemma_gate"] = gate
    summary["table"] = rows
    summary["verdicts"] = {"gaps_strictly_decreasing": strictly_decreasing, "dt": dt}
    summary["blowups"] = _blowup_flags(trajs)
    summary["wall_clock_s"] = time.perf_counter() - t0

    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_field_dump(out / "field_final_0000.txt", traj_ref.final.u)
    for i, (lam, traj) in enumerate(zip(lam_values, trajs[1:]), start=1):
        write_field_dump(out / f"field_final_{i:04d}.txt", traj.final.u)
    write_summary_json(out / "run_summary.json", summary)
    return summary
