"""Command-line pipelines: simulate, deconvolve, evaluate, sweep, oracle-check.

Each ``cmd_*`` function is usable in-process and returns what it wrote;
``main`` wraps them with argparse.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analysis, io, oracle, priors, spectral
from .config import ExperimentConfig, apply_overrides, emit_config, load_config
from .errors import ConfigError, TooLarge, WienerHuntError
from .model import PARAM_NAMES, simulate_data
from .sampler import GibbsResult, run_gibbs

SIMULATION_STREAM = 0


def simulation_rng(seed: int) -> np.random.Generator:
    """Generator for phantom and noise, independent of the sampler stream."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(SIMULATION_STREAM,)))


def _out_dir(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def load_source_image(path) -> np.ndarray:
    """Grayscale image for the natural-image demo, center-cropped to a square."""
    path = Path(path)
    if path.suffix.lower() in (".wimg", ".pgm", ".npy"):
        img = io.read_image(path)
    else:
        from PIL import Image  # optional, only for other formats

        img = np.asarray(Image.open(path).convert("L"), dtype=float)
    return io.center_square(img)


@dataclass
class SimulationOutput:
    truth: np.ndarray
    data: np.ndarray
    metadata: dict
    paths: dict


def cmd_simulate(cfg: ExperimentConfig) -> SimulationOutput:
    """Write a truth image, blurred noisy data and a metadata record."""
    cfg.validate()
    rng = simulation_rng(cfg.seed)
    if cfg.from_image:
        truth = load_source_image(cfg.from_image)
    else:
        d = priors.laplacian_diagonal(cfg.side)
        state = priors.PrecisionState(cfg.gamma_eps, cfg.gamma_0, cfg.gamma_1)
        truth = priors.sample_prior_image(state, d, cfg.side, rng)
    data = simulate_data(truth, cfg.true_psf(), cfg.gamma_eps, rng)

    out = _out_dir(cfg)
    paths = {
        "truth": io.write_image(out / "truth.wimg", truth),
        "data": io.write_image(out / "data.wimg", data),
        "truth_pgm": io.write_pgm(out / "truth.pgm", truth),
        "data_pgm": io.write_pgm(out / "data.pgm", data),
    }
    meta = {
        "seed": cfg.seed,
        "side": truth.shape[0],
        "source": cfg.from_image or "prior",
        "gamma_eps": cfg.gamma_eps,
        "gamma_0": cfg.gamma_0,
        "gamma_1": cfg.gamma_1,
        "w_alpha": cfg.w_alpha,
        "w_beta": cfg.w_beta,
        "phi": cfg.phi,
        "error_data": analysis.error_index(data, truth),
    }
    paths["metadata"] = io.write_record(out / "simulate.txt", meta)
    return SimulationOutput(truth, data, meta, paths)


@dataclass
class DeconvolutionOutput:
    result: GibbsResult
    summary: analysis.PosteriorSummary
    record: dict
    paths: dict


def summary_record(cfg: ExperimentConfig, result: GibbsResult, summary: analysis.PosteriorSummary) -> dict:
    chains = result.chains
    rec = {
        "mode": cfg.mode,
        "prior_mode": cfg.prior_mode,
        "proposal": cfg.proposal if cfg.mode == "myopic" else "none",
        "seed": cfg.seed,
        "side": result.estimate.shape[0],
        "tol": cfg.effective_tol(),
        "n_iter": chains.n_iter,
        "converged": chains.converged,
        "burn_in": cfg.burn_in,
    }
    for name in ("gamma_eps", "gamma_0", "gamma_1") + PARAM_NAMES:
        if name in summary.mean:
            rec[f"{name}_mean"] = summary.mean[name]
            rec[f"{name}_std"] = summary.std[name]
    for name, rate in summary.acceptance.items():
        rec[f"acceptance_{name}"] = rate
    if chains.accepted is not None:
        rec["acceptance_overall"] = chains.overall_acceptance()
    rec["image_std_mean"] = summary.image_std
    rec["wall_time_s"] = round(chains.wall_time, 3)
    return rec


def _histogram_columns(summary: analysis.PosteriorSummary) -> dict:
    cols = {"parameter": [], "left": [], "right": [], "count": []}
    for name, hist in summary.histograms.items():
        for i, c in enumerate(hist.counts):
            cols["parameter"].append(name)
            cols["left"].append(hist.edges[i])
            cols["right"].append(hist.edges[i + 1])
            cols["count"].append(int(c))
    return cols


def _joint_histogram_columns(summary: analysis.PosteriorSummary) -> dict:
    cols = {"x_parameter": [], "y_parameter": [], "x_left": [], "y_left": [], "count": []}
    for (a, b), jh in summary.joint_histograms.items():
        for i in range(jh.counts.shape[0]):
            for j in range(jh.counts.shape[1]):
                cols["x_parameter"].append(a)
                cols["y_parameter"].append(b)
                cols["x_left"].append(jh.x_edges[i])
                cols["y_left"].append(jh.y_edges[j])
                cols["count"].append(int(jh.counts[i, j]))
    return cols


def cmd_deconvolve(cfg: ExperimentConfig, data_path=None) -> DeconvolutionOutput:
    """Run the sampler on a data file; write estimate, std image, chains and summary."""
    cfg.validate()
    y = io.read_image(data_path or cfg.path("data.wimg", cfg.data_path))
    result = run_gibbs(cfg.sampler_config(), y)
    summary = analysis.chain_summary(result.chains, cfg.burn_in, result.posterior_std)
    record = summary_record(cfg, result, summary)

    out = _out_dir(cfg)
    paths = {
        "estimate": io.write_image(out / "estimate.wimg", result.estimate),
        "estimate_pgm": io.write_pgm(out / "estimate.pgm", result.estimate),
        "posterior_std": io.write_image(out / "posterior_std.wimg", result.posterior_std),
        "chains": io.write_csv(
            out / "chains.csv", {"iteration": np.arange(result.chains.n_iter), **result.chains.columns()}
        ),
        "histograms": io.write_csv(out / "histograms.csv", _histogram_columns(summary)),
        "summary": io.write_record(out / "summary.txt", record),
    }
    if summary.joint_histograms:
        paths["joint_histograms"] = io.write_csv(out / "joint_histograms.csv", _joint_histogram_columns(summary))
    return DeconvolutionOutput(result, summary, record, paths)


@dataclass
class EvaluationOutput:
    record: dict
    spectra: dict
    paths: dict


def cmd_evaluate(estimate_path, truth_path, data_path, out_dir, n_bins: int = 64) -> EvaluationOutput:
    """Error indices of data and estimate, and radial spectra of all three images."""
    est, truth, data = (io.read_image(p) for p in (estimate_path, truth_path, data_path))
    if not est.shape == truth.shape == data.shape:
        raise ValueError("estimate, truth and data shapes differ")
    record = {
        "error_data": analysis.error_index(data, truth),
        "error_estimate": analysis.error_index(est, truth),
    }
    sp = {name: analysis.radial_spectrum(img, n_bins) for name, img in (("truth", truth), ("data", data), ("estimate", est))}
    spectra = {
        "f": sp["truth"].centers,
        "count": sp["truth"].counts,
        "truth": sp["truth"].power,
        "data": sp["data"].power,
        "estimate": sp["estimate"].power,
    }
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "evaluation": io.write_record(out / "evaluation.txt", record),
        "spectra": io.write_csv(out / "spectra.csv", spectra),
    }
    return EvaluationOutput(record, spectra, paths)


def parse_grid(spec: str, center: float) -> np.ndarray:
    """Grid syntax for sweeps.

    ``log:SPAN:N``  N points from center/SPAN to center*SPAN, log-spaced;
    ``lin:SPAN:N``  N points from center-SPAN to center+SPAN;
    ``list:a,b,...`` explicit values.
    Generated grids always contain ``center``.
    """
    kind, _, rest = spec.partition(":")
    if kind == "list":
        vals = [float(v) for v in rest.split(",") if v.strip()]
        if not vals:
            raise ValueError("empty grid")
        return np.array(vals)
    if kind in ("log", "lin"):
        span, n = rest.split(":")
        return analysis.sweep_grid(center, float(span), int(n), log=(kind == "log"))
    raise ValueError(f"bad grid spec {spec!r}")


def estimates_from_summary(cfg: ExperimentConfig, record: dict) -> dict[str, float]:
    """Point estimates for the sweep; PSF from the config when it was known."""
    fixed = {
        "gamma_eps": io.record_float(record, "gamma_eps_mean"),
        "gamma_1": io.record_float(record, "gamma_1_mean"),
    }
    for name in PARAM_NAMES:
        key = f"{name}_mean"
        fixed[name] = io.record_float(record, key) if key in record else getattr(cfg, name)
    return fixed


@dataclass
class SweepOutput:
    sweep: analysis.SweepResult
    record: dict
    paths: dict


def cmd_sweep(cfg: ExperimentConfig, parameter: str, grid_spec: str, summary_path=None, data_path=None, truth_path=None) -> SweepOutput:
    """Error of the Wiener-Hunt solution along one parameter, others at their estimates."""
    cfg.validate()
    record = io.read_record(summary_path or cfg.path("summary.txt"))
    y = io.read_image(data_path or cfg.path("data.wimg", cfg.data_path))
    truth = io.read_image(truth_path or cfg.path("truth.wimg", cfg.truth_path))
    fixed = estimates_from_summary(cfg, record)
    if parameter not in analysis.SWEEP_PARAMS:
        raise ConfigError(f"parameter must be one of {analysis.SWEEP_PARAMS}")
    grid = parse_grid(grid_spec, fixed[parameter])
    res = analysis.parameter_sweep(y, truth, fixed, parameter, grid)
    at_estimate = analysis.error_index(analysis.wiener_hunt(y, fixed), truth)
    rec = {
        "parameter": parameter,
        "estimate_value": fixed[parameter],
        "estimate_error": at_estimate,
        "best_value": res.best_value,
        "best_error": res.best_error,
        "interior_minimum": res.is_interior_minimum(),
    }
    out = _out_dir(cfg)
    paths = {
        "curve": io.write_csv(out / f"sweep_{parameter}.csv", {"value": res.grid, "error": res.errors}),
        "record": io.write_record(out / f"sweep_{parameter}.txt", rec),
    }
    return SweepOutput(res, rec, paths)


def cmd_oracle_check(seed: int = 0, side: int = 8, n_seeds: int = 20, corrupt: bool = False):
    """Run all dense-versus-spectral checks. Returns ``(all_passed, results)``."""
    results = oracle.run_oracle_checks(seed, side, n_seeds, corrupt)
    return all(r.passed for r in results), results


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wienerhunt", description=__doc__.splitlines()[0])
    p.add_argument("--print-default-config", action="store_true", help="print the default experiment config and exit")
    sub = p.add_subparsers(dest="command")

    def common(sp):
        sp.add_argument("--config", help="key = value config file")
        sp.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--mode", choices=("myopic", "non-myopic"))
        sp.add_argument("--side", type=int)
        sp.add_argument("--tol", type=float)
        sp.add_argument("--max-iters", type=int)

    sp = sub.add_parser("simulate", help="generate truth and data images")
    common(sp)
    sp.add_argument("--from-image", help="blur this grayscale image instead of a prior phantom")

    sp = sub.add_parser("deconvolve", help="run the Gibbs sampler on data")
    common(sp)
    sp.add_argument("--data")

    sp = sub.add_parser("evaluate", help="errors and radial spectra")
    sp.add_argument("--estimate", required=True)
    sp.add_argument("--truth", required=True)
    sp.add_argument("--data", required=True)
    sp.add_argument("--out", default=".")
    sp.add_argument("--n-bins", type=int, default=64)

    sp = sub.add_parser("sweep", help="error curve along one parameter")
    common(sp)
    sp.add_argument("--param", required=True, choices=analysis.SWEEP_PARAMS)
    sp.add_argument("--grid", default="log:10:41", help="log:SPAN:N, lin:SPAN:N or list:a,b,c")
    sp.add_argument("--summary")
    sp.add_argument("--data")
    sp.add_argument("--truth")

    sp = sub.add_parser("oracle-check", help="dense-matrix cross-checks on small images")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--side", type=int, default=8)
    sp.add_argument("--n-seeds", type=int, default=20)
    sp.add_argument("--corrupt", action="store_true", help="perturb a spectral diagonal (fault injection)")
    return p


def _config_from_args(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        overrides[key.strip()] = value.strip()
    for key, attr in (("seed", "seed"), ("out_dir", "out"), ("mode", "mode"), ("side", "side"), ("tol", "tol"), ("max_iters", "max_iters")):
        v = getattr(args, attr, None)
        if v is not None:
            overrides[key] = str(v)
    if getattr(args, "from_image", None):
        overrides["from_image"] = args.from_image
    return apply_overrides(cfg, overrides).validate()


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.print_default_config:
        sys.stdout.write(emit_config(ExperimentConfig()))
        return 0
    if args.command is None:
        parser.print_help()
        return 2
    try:
        if args.command == "simulate":
            out = cmd_simulate(_config_from_args(args))
            print(f"error_data = {out.metadata['error_data']:.5f}")
            for p in out.paths.values():
                print(p)
        elif args.command == "deconvolve":
            out = cmd_deconvolve(_config_from_args(args), args.data)
            for k, v in out.record.items():
                print(f"{k} = {v}")
        elif args.command == "evaluate":
            out = cmd_evaluate(args.estimate, args.truth, args.data, args.out, args.n_bins)
            for k, v in out.record.items():
                print(f"{k} = {v:.6f}")
        elif args.command == "sweep":
            out = cmd_sweep(_config_from_args(args), args.param, args.grid, args.summary, args.data, args.truth)
            for k, v in out.record.items():
                print(f"{k} = {v}")
        elif args.command == "oracle-check":
            ok, results = cmd_oracle_check(args.seed, args.side, args.n_seeds, args.corrupt)
            for r in results:
                print(f"{'PASS' if r.passed else 'FAIL'} {r.name} seed={r.seed} err={r.error:.3e} tol={r.tol:.0e}")
            print("all checks passed" if ok else "ORACLE CHECK FAILED")
            return 0 if ok else 1
    except TooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (WienerHuntError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
