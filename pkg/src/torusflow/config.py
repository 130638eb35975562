"""Flat key=value run configuration.

The on-disk format is one `key = value` per line, `#` comments, no
sections. Every key has a documented default (see KEYS); unknown keys are
rejected so typos fail loudly. Command-line overrides arrive as the same
key=value strings.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

# key -> (default, help)
KEYS: dict[str, tuple[str, str]] = {
    "dim": ("1", "grid dimension (1-3)"),
    "N": ("64", "grid points per axis, >= 4"),
    "weight": ("constant", "weight preset: constant | cosine_well | quadratic_seam"),
    "weight_c": ("0.0", "weight amplitude c >= 0"),
    "weight_x0": ("", "seam centre for quadratic_seam (comma list; empty = 0.5 per axis)"),
    "xi": ("0.0", "vertical force constant >= 0"),
    "epsilon": ("0.0", "viscosity epsilon >= 0"),
    "lambda": ("1.0", "noise intensity; lambda^2 < 2"),
    "dt": ("auto", "time step, or 'auto' for the CFL heuristic"),
    "T": ("0.25", "time horizon"),
    "scheme": ("explicit_em", "explicit_em | heun_stratonovich"),
    "blowup_threshold": ("1e6", "sup-norm cap before a path is truncated"),
    "delta": ("1.0", "pinching constant delta in (0, 4/3)"),
    "alpha": ("auto", "energy coefficient; auto = alpha_from_delta(delta)/2 (needs delta < 4/3)"),
    "initial": ("sine", "initial data: flat | sine | random_fourier"),
    "amplitude": ("0.2", "initial amplitude (flat value for the flat preset)"),
    "lipschitz_L": ("0", "rescale initial data so sup|grad u0| = L (0 = keep as built)"),
    "modes": ("3", "largest Fourier mode per axis for random_fourier"),
    "paths": ("200", "ensemble size M"),
    "base_seed": ("12345", "base seed; path k is driven by base_seed XOR k"),
    "stride": ("1", "record one energy row every `stride` steps"),
    "workers": ("1", "concurrent path workers for ensembles"),
    "out_dir": ("runs", "output directory"),
    "h_spec": ("dirichlet", "h-energy shape: dirichlet | area | h_M"),
    "h_M": ("auto", "plateau level for h_M; auto = sqrt(1 + L^2)"),
    "k_stderr": ("2.0", "Monte-Carlo acceptance width in standard errors"),
    "grad_slack": ("0.05", "max-principle discretization allowance"),
    "eps_list": ("0.1,0.05,0.025,0", "viscosities for sweep-eps (descending to 0)"),
    "lambda_list": ("0.4,0.2,0.1,0.05", "noise intensities for sweep-lambda"),
    "validate_trials": ("10000", "randomized trials per lemma check"),
}


def _floats(text: str) -> tuple[float, ...]:
    text = text.strip()
    if not text:
        return ()
    return tuple(float(tok) for tok in text.split(","))


@dataclass(frozen=True)
class RunConfig:
    dim: int
    N: int
    weight: str
    weight_c: float
    weight_x0: tuple[float, ...]
    xi: float
    epsilon: float
    lam: float
    dt: float | None  # None = auto
    T: float
    scheme: str
    blowup_threshold: float
    delta: float
    alpha: float | None  # None = auto
    initial: str
    amplitude: float
    lipschitz_L: float
    modes: int
    paths: int
    base_seed: int
    stride: int
    workers: int
    out_dir: str
    h_spec: str
    h_M: float | None  # None = auto
    k_stderr: float
    grad_slack: float
    eps_list: tuple[float, ...]
    lambda_list: tuple[float, ...]
    validate_trials: int

    @classmethod
    def from_mapping(cls, raw: dict[str, str]) -> "RunConfig":
        unknown = set(raw) - set(KEYS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        m = {k: default for k, (default, _) in KEYS.items()}
        m.update({k: str(v).strip() for k, v in raw.items()})
        return cls(
            dim=int(m["dim"]),
            N=int(m["N"]),
            weight=m["weight"],
            weight_c=float(m["weight_c"]),
            weight_x0=_floats(m["weight_x0"]),
            xi=float(m["xi"]),
            epsilon=float(m["epsilon"]),
            lam=float(m["lambda"]),
            dt=None if m["dt"] == "auto" else float(m["dt"]),
            T=float(m["T"]),
            scheme=m["scheme"],
            blowup_threshold=float(m["blowup_threshold"]),
            delta=float(m["delta"]),
            alpha=None if m["alpha"] == "auto" else float(m["alpha"]),
            initial=m["initial"],
            amplitude=float(m["amplitude"]),
            lipschitz_L=float(m["lipschitz_L"]),
            modes=int(m["modes"]),
            paths=int(m["paths"]),
            base_seed=int(m["base_seed"]),
            stride=int(m["stride"]),
            workers=int(m["workers"]),
            out_dir=m["out_dir"],
            h_spec=m["h_spec"],
            h_M=None if m["h_M"] == "auto" else float(m["h_M"]),
            k_stderr=float(m["k_stderr"]),
            grad_slack=float(m["grad_slack"]),
            eps_list=_floats(m["eps_list"]),
            lambda_list=_floats(m["lambda_list"]),
            validate_trials=int(m["validate_trials"]),
        )

    def to_mapping(self) -> dict[str, str]:
        """Canonical flat representation; from_mapping round-trips it."""

        def num(x: float) -> str:
            return repr(float(x))

        def lst(xs: tuple[float, ...]) -> str:
            return ",".join(num(x) for x in xs)

        return {
            "dim": str(self.dim),
            "N": str(self.N),
            "weight": self.weight,
            "weight_c": num(self.weight_c),
            "weight_x0": lst(self.weight_x0),
            "xi": num(self.xi),
            "epsilon": num(self.epsilon),
            "lambda": num(self.lam),
            "dt": "auto" if self.dt is None else num(self.dt),
            "T": num(self.T),
            "scheme": self.scheme,
            "blowup_threshold": num(self.blowup_threshold),
            "delta": num(self.delta),
            "alpha": "auto" if self.alpha is None else num(self.alpha),
            "initial": self.initial,
            "amplitude": num(self.amplitude),
            "lipschitz_L": num(self.lipschitz_L),
            "modes": str(self.modes),
            "paths": str(self.paths),
            "base_seed": str(self.base_seed),
            "stride": str(self.stride),
            "workers": str(self.workers),
            "out_dir": self.out_dir,
            "h_spec": self.h_spec,
            "h_M": "auto" if self.h_M is None else num(self.h_M),
            "k_stderr": num(self.k_stderr),
            "grad_slack": num(self.grad_slack),
            "eps_list": lst(self.eps_list),
            "lambda_list": lst(self.lambda_list),
            "validate_trials": str(self.validate_trials),
        }

    def replace_keys(self, overrides: dict[str, str]) -> "RunConfig":
        m = self.to_mapping()
        m.update(overrides)
        return RunConfig.from_mapping(m)


def parse_text(text: str) -> dict[str, str]:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ValueError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = body.split("=", 1)
        raw[key.strip()] = value.strip()
    return raw


def load_config(path: str | Path | None, overrides: dict[str, str] | None = None) -> RunConfig:
    raw = parse_text(Path(path).read_text()) if path else {}
    if overrides:
        raw.update(overrides)
    return RunConfig.from_mapping(raw)


def default_config_text() -> str:
    """The full key set with defaults and per-key documentation."""
    lines = ["# torusflow run configuration (all keys shown with defaults)"]
    for key, (default, doc) in KEYS.items():
        entry = f"{key} = {default}"
        lines.append(f"{entry:<36}# {doc}")
    return "\n".join(lines) + "\n"
