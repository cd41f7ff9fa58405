"""Experiment configuration stored as a flat ``key = value`` text file.

Defaults reproduce the simulated experiment: a 128 x 128 prior phantom with
``gamma_0 = 1`` and ``gamma_1 = 2``, Gaussian PSF ``(20, 7, pi/3)`` with
uniform priors on ``[19, 21] x [6, 8] x [pi/4, pi/2]``, noise precision 0.5,
Jeffreys hyperpriors and the null-frequency precision integrated out.

Keys
----
side, seed
    image side and master seed.
gamma_eps, gamma_0, gamma_1
    true precisions used for simulation.
w_alpha, w_beta, phi
    true PSF (the known PSF in non-myopic mode).
w_alpha_min ... phi_max
    uniform PSF prior box.
hyper
    ``jeffreys``, ``uniform`` or ``explicit`` (then ``alpha_eps`` ...
    ``beta_1`` are used; ``inf`` is accepted).
prior_mode
    ``marginalized`` or ``full``.
mode
    ``myopic`` or ``non-myopic``.
tol
    stopping tolerance, or ``auto`` (5e-5 myopic, 1e-3 non-myopic).
max_iters, burn_in
    chain length cap and discarded leading draws.
proposal
    ``componentwise`` or ``joint`` PSF proposals.
convergence_norm
    ``l1`` or ``l2``.
n_bins
    radial spectrum bins.
from_image
    grayscale image to blur instead of a prior phantom (empty: phantom).
out_dir, data_path, truth_path
    output directory; input paths (empty: inside ``out_dir``).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError
from .io import parse_record
from .model import PsfBox, PsfParams
from .priors import HyperParams, PriorMode
from .sampler import NORMS, PROPOSALS, SamplerConfig

DEFAULT_TOL = {"myopic": 5e-5, "non-myopic": 1e-3}
HYPER_CHOICES = ("jeffreys", "uniform", "explicit")
MODES = ("myopic", "non-myopic")


@dataclass
class ExperimentConfig:
    side: int = 128
    seed: int = 0
    gamma_eps: float = 0.5
    gamma_0: float = 1.0
    gamma_1: float = 2.0
    w_alpha: float = 20.0
    w_beta: float = 7.0
    phi: float = math.pi / 3
    w_alpha_min: float = 19.0
    w_alpha_max: float = 21.0
    w_beta_min: float = 6.0
    w_beta_max: float = 8.0
    phi_min: float = math.pi / 4
    phi_max: float = math.pi / 2
    hyper: str = "jeffreys"
    alpha_eps: float = 0.0
    beta_eps: float = math.inf
    alpha_0: float = 0.0
    beta_0: float = math.inf
    alpha_1: float = 0.0
    beta_1: float = math.inf
    prior_mode: str = "marginalized"
    mode: str = "myopic"
    tol: float | None = None
    max_iters: int = 200_000
    burn_in: int = 0
    proposal: str = "componentwise"
    convergence_norm: str = "l1"
    n_bins: int = 64
    from_image: str = ""
    out_dir: str = "."
    data_path: str = ""
    truth_path: str = ""

    def validate(self) -> "ExperimentConfig":
        if self.side < 2:
            raise ConfigError("side must be >= 2")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.hyper not in HYPER_CHOICES:
            raise ConfigError(f"hyper must be one of {HYPER_CHOICES}")
        if self.proposal not in PROPOSALS:
            raise ConfigError(f"proposal must be one of {PROPOSALS}")
        if self.convergence_norm not in NORMS:
            raise ConfigError(f"convergence_norm must be one of {NORMS}")
        if self.gamma_eps <= 0 or self.gamma_0 <= 0 or self.gamma_1 <= 0:
            raise ConfigError("true precisions must be positive")
        if self.tol is not None and not self.tol > 0:
            raise ConfigError("tol must be positive")
        if self.max_iters < 1 or not 0 <= self.burn_in < self.max_iters:
            raise ConfigError("need max_iters >= 1 and 0 <= burn_in < max_iters")
        if self.n_bins < 2:
            raise ConfigError("n_bins must be >= 2")
        try:
            PriorMode(self.prior_mode)
            self.true_psf()
            self.psf_box()
            self.hyper_params()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return self

    def true_psf(self) -> PsfParams:
        return PsfParams(self.w_alpha, self.w_beta, self.phi)

    def psf_box(self) -> PsfBox:
        return PsfBox.from_bounds(
            (self.w_alpha_min, self.w_alpha_max),
            (self.w_beta_min, self.w_beta_max),
            (self.phi_min, self.phi_max),
        )

    def hyper_params(self) -> HyperParams:
        if self.hyper == "jeffreys":
            return HyperParams.jeffreys()
        if self.hyper == "uniform":
            return HyperParams.uniform()
        return HyperParams(self.alpha_eps, self.beta_eps, self.alpha_0, self.beta_0, self.alpha_1, self.beta_1)

    def effective_tol(self) -> float:
        return DEFAULT_TOL[self.mode] if self.tol is None else self.tol

    def sampler_config(self) -> SamplerConfig:
        myopic = self.mode == "myopic"
        return SamplerConfig(
            prior_mode=PriorMode(self.prior_mode),
            hyper=self.hyper_params(),
            psf_box=self.psf_box(),
            psf_known=None if myopic else self.true_psf(),
            convergence_tol=self.effective_tol(),
            max_iters=self.max_iters,
            burn_in=self.burn_in,
            seed=self.seed,
            proposal=self.proposal,
            convergence_norm=self.convergence_norm,
        )

    def path(self, name: str, override: str = "") -> Path:
        return Path(override) if override else Path(self.out_dir) / name

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)


def _field_types() -> dict[str, str]:
    return {f.name: str(f.type) for f in fields(ExperimentConfig)}


def _convert(key: str, value: str):
    kind = _field_types()[key]
    if kind == "int":
        return int(value)
    if kind == "float":
        return float(value)
    if kind.startswith("float | None"):
        return None if value.lower() in ("auto", "none", "") else float(value)
    return value


def emit_config(cfg: ExperimentConfig) -> str:
    lines = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if v is None:
            text = "auto"
        elif isinstance(v, float):
            text = repr(v)
        else:
            text = str(v)
        lines.append(f"{f.name} = {text}")
    return "\n".join(lines) + "\n"


def apply_overrides(cfg: ExperimentConfig, values: dict[str, str]) -> ExperimentConfig:
    known = _field_types()
    changes = {}
    for key, value in values.items():
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            changes[key] = _convert(key, value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {value!r}") from exc
    return dataclasses.replace(cfg, **changes)


def parse_config(text: str) -> ExperimentConfig:
    try:
        values = parse_record(text)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return apply_overrides(ExperimentConfig(), values)


def load_config(path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())
