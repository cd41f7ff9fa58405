"""End-to-end acceptance checks, one test per criterion.

Each test collects all of its sub-checks, records a one-line verdict in
``REPORT`` (printed in the terminal summary by ``conftest.py``) and then
asserts. The reference experiment runs once per session through
module-scoped fixtures; the myopic run is repeated once for the
determinism check.
"""

import filecmp
import math
import time
import warnings

import numpy as np
import pytest
from scipy import integrate, stats

from wienerhunt import analysis, cli
from wienerhunt.config import ExperimentConfig
from wienerhunt.errors import NonConvergence, SingularCovariance
from wienerhunt.model import PsfParams, gaussian_psf_transfer, simulate_data
from wienerhunt.oracle import run_oracle_checks
from wienerhunt.priors import HyperParams, PriorMode, gamma_marginal_logpdf, gamma_sample
from wienerhunt.sampler import SamplerConfig, run_gibbs

REPORT: list[str] = []

SEED = 0
TRUTH = {"gamma_eps": 0.5, "gamma_1": 2.0, "w_alpha": 20.0, "w_beta": 7.0, "phi": math.pi / 3}
INTERVALS = {
    "gamma_eps": (0.45, 0.55),
    "gamma_1": (1.3, 2.3),
    "w_alpha": (19.5, 20.6),
    "w_beta": (6.5, 7.7),
    "phi": (0.95, 1.12),
}


def verdict(number: int, title: str, checks: dict, detail: str = "") -> None:
    failed = [name for name, ok in checks.items() if not ok]
    status = "PASS" if not failed else "FAIL"
    line = f"criterion {number} {status}: {title}"
    if detail:
        line += f" | {detail}"
    if failed:
        line += f" | failed: {', '.join(failed)}"
    REPORT.append(line)
    print(line)
    assert not failed, line


# Shared runs ------------------------------------------------------------------


@pytest.fixture(scope="module")
def experiment(tmp_path_factory):
    root = tmp_path_factory.mktemp("reference")
    cfg = ExperimentConfig(seed=SEED, out_dir=str(root))
    sim = cli.cmd_simulate(cfg)
    with warnings.catch_warnings():
        warnings.simplefilter("error", NonConvergence)  # a capped chain must not pass silently
        non_myopic = cli.cmd_deconvolve(cfg.replace(mode="non-myopic", out_dir=str(root / "non_myopic")), sim.paths["data"])
        t0 = time.perf_counter()
        myopic = cli.cmd_deconvolve(cfg.replace(out_dir=str(root / "myopic")), sim.paths["data"])
        myopic_time = time.perf_counter() - t0
    return {"cfg": cfg, "root": root, "sim": sim, "non_myopic": non_myopic, "myopic": myopic, "myopic_time": myopic_time}


# 1 -----------------------------------------------------------------------------


def test_criterion_1_oracle_equivalence():
    results = run_oracle_checks(seed=0, side=8, n_seeds=20)
    worst = {}
    for r in results:
        worst[r.name] = max(worst.get(r.name, 0.0), r.error)
    tol = {"conditional_mean": 1e-10, "conditional_variance": 1e-10, "prior_logpdf": 1e-8, "log_det": 1e-8}
    checks = {f"{k} <= {t:g}": worst[k] <= t for k, t in tol.items()}
    checks["20 seeds"] = len({r.seed for r in results}) >= 20
    checks["every check passed"] = all(r.passed for r in results)
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    verdict(1, "dense oracle agreement on 20 random 8x8 instances", checks, detail)


# 2 -----------------------------------------------------------------------------


def test_criterion_2_gamma_machinery():
    rng = np.random.default_rng(2024)
    n = 1_000_000
    checks, parts = {}, []
    for alpha, beta in [(32.0, 0.015), (0.7, 3.0)]:
        draws = np.fromiter((gamma_sample(alpha, beta, rng) for _ in range(n)), float, n)
        mean, var = alpha * beta, alpha * beta**2
        se_mean = math.sqrt(var / n)
        se_var = math.sqrt((3 * (1 + 2 / alpha) - 1) * var**2 / n)
        z_mean = abs(draws.mean() - mean) / se_mean
        z_var = abs(draws.var() - var) / se_var
        checks[f"mean ({alpha},{beta})"] = z_mean < 3
        checks[f"variance ({alpha},{beta})"] = z_var < 3
        parts.append(f"({alpha},{beta}) z_mean {z_mean:.2f} z_var {z_var:.2f}")

    worst = 0.0
    for alpha, beta, prec in [(1.5, 2.0, 0.7), (4.0, 0.25, 3.0)]:
        for x in np.linspace(-5, 5, 21):
            numeric = integrate.quad(
                lambda g: stats.norm.pdf(x, scale=1 / math.sqrt(g * prec)) * stats.gamma.pdf(g, alpha, scale=beta),
                0, np.inf, epsabs=0, epsrel=1e-12, limit=400,
            )[0]
            closed = math.exp(gamma_marginal_logpdf(x, prec, alpha, beta))
            worst = max(worst, abs(closed - numeric) / numeric)
    checks["Student marginal within 1e-6"] = worst <= 1e-6
    parts.append(f"marginal rel err {worst:.1e}")
    verdict(2, "Gamma sampling moments and Student marginal", checks, "; ".join(parts))


# 3 -----------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_3_reference_reproduction(experiment):
    sim, nm, my = experiment["sim"], experiment["non_myopic"], experiment["myopic"]
    truth = sim.truth
    e_data = analysis.error_index(sim.data, truth)
    e_my = analysis.error_index(my.result.estimate, truth)
    e_nm = analysis.error_index(nm.result.estimate, truth)
    s = my.summary
    k_nm, k_my = nm.result.chains.n_iter, my.result.chains.n_iter

    checks = {
        "e_data in [0.08, 0.14]": 0.08 <= e_data <= 0.14,
        "myopic e in [0.05, 0.08]": 0.05 <= e_my <= 0.08,
        "myopic e < e_data": e_my < e_data,
        "non-myopic e <= myopic e + 0.005": e_nm <= e_my + 0.005,
        "non-myopic K in [200, 5000]": 200 <= k_nm <= 5000,
        "myopic K in [5000, 100000]": 5000 <= k_my <= 100_000,
        "myopic converged": my.result.chains.converged,
        "overall PSF acceptance in [0.5%, 30%]": 0.005 <= my.result.chains.overall_acceptance() <= 0.30,
    }
    for name, (lo, hi) in INTERVALS.items():
        checks[f"{name} in [{lo}, {hi}]"] = lo <= s.mean[name] <= hi
        checks[f"{name} truth within 3 std"] = s.covers(name, TRUTH[name])
    for name in ("gamma_eps", "gamma_1"):
        checks[f"non-myopic {name} in range"] = INTERVALS[name][0] <= nm.summary.mean[name] <= INTERVALS[name][1]
    wall = experiment["myopic_time"]
    checks["myopic wall-clock < 300 s"] = wall < 300
    detail = (
        f"seed {SEED}, e_data {e_data:.4f}, e_myopic {e_my:.4f}, e_non_myopic {e_nm:.4f}, K {k_nm}/{k_my}, "
        + ", ".join(f"{k} {s.mean[k]:.3f}+-{s.std[k]:.3f}" for k in INTERVALS)
        + f", acceptance {', '.join(f'{v:.2%}' for v in s.acceptance.values())}"
        + f" (overall {my.result.chains.overall_acceptance():.2%}), myopic wall {wall:.0f} s"
    )
    verdict(3, "reference experiment reproduction", checks, detail)


# 4 -----------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_4_spectral_equalization(experiment):
    sim, my = experiment["sim"], experiment["myopic"]
    ev = cli.cmd_evaluate(my.paths["estimate"], sim.paths["truth"], sim.paths["data"], experiment["root"] / "evaluation")
    sp = ev.spectra
    f = sp["f"]
    low, high = f < 0.075, f > 0.15
    ratio = sp["estimate"][low] / sp["truth"][low]
    checks = {
        "estimate within factor 2 of truth for f < 0.075": bool(np.all((ratio >= 0.5) & (ratio <= 2.0))),
        "estimate below data for f > 0.15": bool(np.all(sp["estimate"][high] < sp["data"][high])),
        "bins in both bands": bool(low.sum() >= 3 and high.sum() >= 3),
    }
    detail = f"low-band ratio in [{ratio.min():.2f}, {ratio.max():.2f}] over {low.sum()} bins; " \
             f"max estimate/data above 0.15: {np.max(sp['estimate'][high] / sp['data'][high]):.2e}"
    verdict(4, "radial spectrum equalization", checks, detail)


# 5 -----------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_5_sweep_optimality(experiment):
    cfg, sim, my = experiment["cfg"], experiment["sim"], experiment["myopic"]
    e_mcmc = analysis.error_index(my.result.estimate, sim.truth)
    sweep_cfg = cfg.replace(out_dir=str(experiment["root"] / "myopic"))
    checks, parts = {}, []
    for param in ("gamma_1", "gamma_eps"):
        out = cli.cmd_sweep(sweep_cfg, param, "log:10:401", data_path=sim.paths["data"], truth_path=sim.paths["truth"])
        res = out.sweep
        gap = e_mcmc - res.best_error
        checks[f"{param} interior minimum"] = res.is_interior_minimum()
        checks[f"{param} |e_mcmc - best| < 0.002"] = abs(gap) < 0.002
        parts.append(f"{param}: best {res.best_value:.4g} at e {res.best_error:.6f}, "
                     f"estimate {out.record['estimate_value']:.4g} at e {out.record['estimate_error']:.6f}")
    verdict(5, "sweep optimality of the sampled precisions", checks, f"e_mcmc {e_mcmc:.6f}; " + "; ".join(parts))


# 6 -----------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_6_degeneracy_guard(experiment):
    sim = experiment["sim"]
    psf = PsfParams(20.0, 7.0, math.pi / 3)

    def blind_mean(p, side):
        h = gaussian_psf_transfer(p, side)
        h[0, 0] = 0.0
        return h

    rng = np.random.default_rng(6)
    y = simulate_data(sim.truth, psf, 0.5, rng, h=blind_mean(psf, sim.truth.shape[0]))

    marginal = SamplerConfig(psf_known=psf, transfer=blind_mean, convergence_tol=1e-3, max_iters=5000, seed=6)
    try:
        run_gibbs(marginal, y)
        refused = False
    except SingularCovariance:
        refused = True

    def run_full(hyper):
        cfg = SamplerConfig(prior_mode=PriorMode.FULL, hyper=hyper, psf_known=psf, transfer=blind_mean,
                            convergence_tol=1e-3, max_iters=5000, seed=6)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NonConvergence)
            res = run_gibbs(cfg, y)
        ok = res.chains.n_iter > 0 and np.all(np.isfinite(res.estimate)) and np.all(res.chains.gamma_0 > 0)
        return bool(ok), res

    # Under Jeffreys the joint posterior is improper in gamma_0 and its chain
    # wanders over many decades; a proper Gamma(1, 1) prior keeps it bounded.
    jeffreys_ok, jeffreys = run_full(HyperParams.jeffreys())
    proper_ok, proper = run_full(HyperParams(alpha_0=1.0, beta_0=1.0))
    checks = {
        "marginalized mode raises SingularCovariance": refused,
        "full mode completes (Jeffreys)": jeffreys_ok,
        "full mode completes (proper gamma_0 prior)": proper_ok,
    }
    g0j, g0p = jeffreys.chains.gamma_0, proper.chains.gamma_0
    detail = (f"full mode K {jeffreys.chains.n_iter}/{proper.chains.n_iter}; gamma_0 range "
              f"[{g0j.min():.1e}, {g0j.max():.1e}] Jeffreys, [{g0p.min():.1e}, {g0p.max():.1e}] proper")
    verdict(6, "null-frequency degeneracy guard", checks, detail)


# 7 -----------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_7_determinism(experiment):
    cfg, sim, first = experiment["cfg"], experiment["sim"], experiment["myopic"]
    repeat_dir = experiment["root"] / "myopic_repeat"
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        second = cli.cmd_deconvolve(cfg.replace(out_dir=str(repeat_dir)), sim.paths["data"])
    a, b = first.result.chains, second.result.chains
    checks = {
        "chains identical": all(np.array_equal(v, b.columns()[k]) for k, v in a.columns().items()),
        "estimate identical": np.array_equal(first.result.estimate, second.result.estimate),
    }
    for name in ("estimate", "posterior_std", "chains", "histograms"):
        checks[f"{name} file identical"] = filecmp.cmp(first.paths[name], second.paths[name], shallow=False)
    verdict(7, "bitwise determinism of the myopic run", checks, f"{a.n_iter} iterations compared")
