"""Monte Carlo experiment runner: configuration, trials, SNR sweeps, metrics,
lambda calibration and CSV/manifest emission.

Every trial is a pure function of ``(config, K, snr_db, trial_index)``: the
trial RNG is derived from the master seed and the cell coordinates through
numpy's SeedSequence spawn-key mechanism, so sweeps are reproducible under
any execution order.
"""

import dataclasses
import json
import math
import platform
from dataclasses import dataclass

import numpy as np

from . import __version__
from ._backend import BACKEND
from .afsim import amplification_factor, gen_training, simulate_two_slot, to_frequency_model
from .channel import ChannelSpec, cascade, compose, gen_channel
from .solvers import (
    iel_estimate,
    lambda_default,
    ls_estimate,
    pel_estimate,
    sel_estimate,
)

__all__ = [
    "ExperimentConfig",
    "TrialReport",
    "SweepRow",
    "SweepReport",
    "average_mse",
    "support_recovery",
    "noise_variance",
    "trial_rng",
    "run_trial",
    "snr_sweep",
    "calibrate_lambda",
    "emit_report",
    "load_config",
    "parse_config",
    "format_config",
    "CSV_HEADER",
]

CSV_HEADER = "K,snr_db,estimator,avg_mse,std_err,recovery_prob,trials"

# Offsets keeping SeedSequence spawn keys nonnegative / distinguishing the
# noiseless sentinel cell.
_SNR_KEY_OFFSET = 1 << 20
_SNR_KEY_INF = 1 << 31


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of a sweep; round-trips through the flat config file format.

    Under ``lambda_rule='theorem1'`` the ``*_lambda`` fields are the scale
    constants c0 in lambda = c0 * sigma_n * ln(N); under ``'fixed'`` they are
    used as the lambdas directly. The default c0 values were frozen by
    ``calibrate_lambda`` at the default calibration cell (K=2, 10 dB).
    """

    n: int = 36
    l: int = 32
    k_list: tuple = (2, 4, 8)
    snr_db_list: tuple = (5.0, 10.0, 15.0, 20.0)
    trials: int = 500
    master_seed: int = 20240817
    estimators: tuple = ("ls", "sel", "pel", "iel")
    lambda_rule: str = "theorem1"
    sel_lambda: float = 2.0
    pel_lambda: float = 2.0
    iel_lambda_sel: float = 2.0
    iel_lambda_pel: float = 0.1
    training_kind: str = "qpsk_flat"
    unit_power: float = 1.0
    beta_rule: str = "as_printed"
    support_threshold: float = 0.1
    tol: float = 1e-8
    max_iter: int = 10_000
    output_path: str = "sweep.csv"
    cal_k: int = 2
    cal_snr_db: float = 10.0
    cal_trials: int = 200
    ric_order: int = 2
    ric_budget: int = 5000

    def __post_init__(self):
        if self.l % 2 != 0:
            raise ValueError(f"l must be even, got {self.l}")
        if self.l > self.n:
            raise ValueError(f"l = {self.l} must not exceed n = {self.n}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if any(k > self.l for k in self.k_list):
            raise ValueError(f"every K in {self.k_list} must be <= l = {self.l}")
        if self.lambda_rule not in ("fixed", "theorem1"):
            raise ValueError(f"unknown lambda_rule {self.lambda_rule!r}")
        for kind in self.estimators:
            if kind not in ("ls", "sel", "pel", "iel"):
                raise ValueError(f"unknown estimator {kind!r}")
        if self.support_threshold <= 0:
            raise ValueError("support_threshold must be positive")


@dataclass(frozen=True)
class TrialReport:
    """Per-trial outcome: squared error energy and recovered dominant taps per estimator."""

    seed_key: tuple
    error_energy: dict  # estimator kind -> ||h - h_hat||^2
    recovered: dict  # estimator kind -> fraction of dominant taps recovered
    recovered_taps: dict  # estimator kind -> frozenset of recovered tap indices


@dataclass(frozen=True)
class SweepRow:
    K: int
    snr_db: float
    estimator: str
    avg_mse: float
    std_err: float
    recovery_prob: float
    trials: int


@dataclass(frozen=True)
class SweepReport:
    rows: tuple
    config: ExperimentConfig | None = None


def average_mse(h_stacked: np.ndarray, h_hat: np.ndarray, L: int) -> float:
    """Per-trial normalized error ||h - h_hat||^2 / (2L - 1)."""
    h_stacked = np.asarray(h_stacked)
    h_hat = np.asarray(h_hat)
    if h_stacked.shape != (2 * L - 1,) or h_hat.shape != (2 * L - 1,):
        raise ValueError(
            f"length mismatch: expected {2 * L - 1}, got {h_stacked.shape} and {h_hat.shape}"
        )
    return float(np.sum(np.abs(h_stacked - h_hat) ** 2)) / (2 * L - 1)


def _recovered_set(h_direct: np.ndarray, h_hat: np.ndarray, L: int, threshold: float):
    true_support = np.flatnonzero(h_direct)
    direct_hat = np.abs(h_hat[:L])
    peak = direct_hat.max() if direct_hat.size else 0.0
    if peak == 0.0:
        return frozenset(), true_support
    hit = [int(i) for i in true_support if direct_hat[i] >= threshold * peak]
    return frozenset(hit), true_support


def support_recovery(h_direct: np.ndarray, h_hat: np.ndarray, L: int, threshold: float) -> float:
    """Fraction of true dominant direct-link taps whose estimate exceeds
    ``threshold`` times the largest direct-link coefficient of ``h_hat``."""
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    hit, true_support = _recovered_set(np.asarray(h_direct), np.asarray(h_hat), L, threshold)
    if true_support.size == 0:
        return 0.0
    return len(hit) / true_support.size


def noise_variance(snr_db: float, unit_power: float = 1.0) -> float:
    """Noise variance for a per-symbol received SNR of ``snr_db`` dB.

    sigma_n^2 = P / 10^(snr/10). Referencing the SNR to the per-symbol power
    (rather than the total training energy N*P) keeps the relayed block
    identifiable over the simulated SNR range. ``snr_db = inf`` is the
    noiseless sentinel.
    """
    if math.isinf(snr_db):
        return 0.0
    return unit_power / 10.0 ** (snr_db / 10.0)


def _snr_key(snr_db: float) -> int:
    if math.isinf(snr_db):
        return _SNR_KEY_INF
    return int(round(snr_db * 1000)) + _SNR_KEY_OFFSET


def trial_rng(master_seed: int, K: int, snr_db: float, trial_index: int) -> np.random.Generator:
    """Deterministic per-trial RNG keyed on (master seed, K, SNR, trial index)."""
    key = (K, _snr_key(snr_db), trial_index)
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=key))


def _effective_lambdas(cfg: ExperimentConfig, kind: str, noise_var: float):
    """Resolve (lambda_sel, lambda_pel) for one estimator kind under the config's rule."""
    if kind == "sel":
        raw = (cfg.sel_lambda, 0.0)
    elif kind == "pel":
        raw = (0.0, cfg.pel_lambda)
    elif kind == "iel":
        raw = (cfg.iel_lambda_sel, cfg.iel_lambda_pel)
    else:
        return (0.0, 0.0)
    if cfg.lambda_rule == "fixed":
        return raw
    sigma = math.sqrt(noise_var)
    return tuple(
        lambda_default(sigma, cfg.n, c0) if c0 > 0 and sigma > 0 else 0.0 for c0 in raw
    )


def _solve(kind: str, m, lam_sel: float, lam_pel: float, tol: float, max_iter: int):
    if kind == "ls":
        return ls_estimate(m)
    if kind == "sel":
        return sel_estimate(m, lam_sel, tol, max_iter)
    if kind == "pel":
        return pel_estimate(m, lam_pel, tol, max_iter)
    return iel_estimate(m, lam_sel, lam_pel, tol, max_iter)


def run_trial(cfg: ExperimentConfig, K: int, snr_db: float, trial_index: int) -> TrialReport:
    """One Monte Carlo trial: draw channels, simulate both slots, run every estimator.

    Deterministic: identical arguments give a bit-identical report.
    """
    rng = trial_rng(cfg.master_seed, K, snr_db, trial_index)
    try:
        h_sd = gen_channel(ChannelSpec(cfg.l, K, "sparse"), rng)
        h_sr = gen_channel(ChannelSpec(cfg.l // 2, cfg.l // 2, "dense"), rng)
        h_rd = gen_channel(ChannelSpec(cfg.l // 2, cfg.l // 2, "dense"), rng)
        x = gen_training(cfg.n, cfg.unit_power, rng, cfg.training_kind)
        noise_var = noise_variance(snr_db, cfg.unit_power)
        p_total = cfg.n * cfg.unit_power
        if noise_var == 0.0:
            beta = 1.0  # amplification is undefined in the noiseless limit
        else:
            beta = amplification_factor(p_total, p_total, noise_var, rule=cfg.beta_rule)
        obs = simulate_two_slot(h_sd, h_sr, h_rd, x, noise_var, beta, rng)
        m = to_frequency_model(obs, x, cfg.l)
        h = compose(h_sd, cascade(h_sr, h_rd)).stacked

        errors, recovered, recovered_taps = {}, {}, {}
        for kind in cfg.estimators:
            lam_sel, lam_pel = _effective_lambdas(cfg, kind, noise_var)
            est = _solve(kind, m, lam_sel, lam_pel, cfg.tol, cfg.max_iter)
            errors[kind] = float(np.sum(np.abs(h - est.h_hat) ** 2))
            hit, true_supp = _recovered_set(h_sd.taps, est.h_hat, cfg.l, cfg.support_threshold)
            recovered_taps[kind] = hit
            recovered[kind] = len(hit) / true_supp.size if true_supp.size else 0.0
    except Exception as exc:
        raise RuntimeError(
            f"trial failed at K={K}, snr_db={snr_db}, trial={trial_index}: {exc}"
        ) from exc
    return TrialReport(
        seed_key=(cfg.master_seed, K, _snr_key(snr_db), trial_index),
        error_energy=errors,
        recovered=recovered,
        recovered_taps=recovered_taps,
    )


def snr_sweep(cfg: ExperimentConfig) -> SweepReport:
    """Run every (K, snr_db) cell of the config grid and aggregate per estimator.

    Aggregation is a fixed-order reduction over the trial index, so results
    do not depend on how trials are scheduled.
    """
    p = 2 * cfg.l - 1
    rows = []
    for K in cfg.k_list:
        for snr_db in cfg.snr_db_list:
            mses = {kind: np.empty(cfg.trials) for kind in cfg.estimators}
            recs = {kind: np.empty(cfg.trials) for kind in cfg.estimators}
            for t in range(cfg.trials):
                report = run_trial(cfg, K, snr_db, t)
                for kind in cfg.estimators:
                    mses[kind][t] = report.error_energy[kind] / p
                    recs[kind][t] = report.recovered[kind]
            for kind in cfg.estimators:
                vals = mses[kind]
                std_err = (
                    float(vals.std(ddof=1) / math.sqrt(cfg.trials)) if cfg.trials > 1 else 0.0
                )
                rows.append(
                    SweepRow(
                        K=K,
                        snr_db=snr_db,
                        estimator=kind,
                        avg_mse=float(vals.mean()),
                        std_err=std_err,
                        recovery_prob=float(recs[kind].mean()),
                        trials=cfg.trials,
                    )
                )
    return SweepReport(rows=tuple(rows), config=cfg)


def calibrate_lambda(cfg: ExperimentConfig, grid) -> dict:
    """Pick, per configured LASSO estimator, the scale constant(s) minimizing
    average MSE at the calibration cell (cfg.cal_k, cfg.cal_snr_db).

    For IEL the grid is searched jointly over (c0_sel, c0_pel) pairs, with
    zero allowed for the global component. Returns e.g.
    ``{"sel": 0.8, "pel": 0.8, "iel": (0.2, 0.8)}``.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("calibration grid must be non-empty")

    def cell_mse(trial_cfg):
        total = 0.0
        p = 2 * trial_cfg.l - 1
        kind = trial_cfg.estimators[0]
        for t in range(trial_cfg.cal_trials):
            rep = run_trial(trial_cfg, trial_cfg.cal_k, trial_cfg.cal_snr_db, t)
            total += rep.error_energy[kind] / p
        return total / trial_cfg.cal_trials

    chosen = {}
    for kind in cfg.estimators:
        if kind == "ls":
            continue
        if kind == "iel":
            candidates = [(cs, cp) for cs in [0.0] + grid for cp in grid]
        else:
            candidates = grid
        best, best_mse = None, math.inf
        for cand in candidates:
            overrides = {"estimators": (kind,)}
            if kind == "sel":
                overrides["sel_lambda"] = cand
            elif kind == "pel":
                overrides["pel_lambda"] = cand
            else:
                overrides["iel_lambda_sel"], overrides["iel_lambda_pel"] = cand
            mse = cell_mse(dataclasses.replace(cfg, **overrides))
            if mse < best_mse:
                best, best_mse = cand, mse
        chosen[kind] = best
    return chosen


def _fmt_value(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_report(report: SweepReport, path) -> list:
    """Write the sweep CSV plus a JSON run manifest; returns the written paths.

    CSV floats use shortest round-trip decimals, so parsing the file
    reproduces the report values exactly.
    """
    path = str(path)
    lines = [CSV_HEADER]
    for r in report.rows:
        lines.append(
            ",".join(
                [
                    str(r.K),
                    _fmt_value(float(r.snr_db)),
                    r.estimator,
                    _fmt_value(r.avg_mse),
                    _fmt_value(r.std_err),
                    _fmt_value(r.recovery_prob),
                    str(r.trials),
                ]
            )
        )
    try:
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
        manifest_path = path + ".manifest.json"
        manifest = {
            "config": dataclasses.asdict(report.config) if report.config else None,
            "master_seed": report.config.master_seed if report.config else None,
            "coopchan_version": __version__,
            "numpy_version": np.__version__,
            "python_version": platform.python_version(),
            "solver_backend": BACKEND,
        }
        with open(manifest_path, "w") as fh:
            json.dump(manifest, fh, indent=2, default=list)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"failed to write report to {path!r}: {exc}") from exc
    return [path, manifest_path]


# --- flat key = value config files ------------------------------------------

_LIST_FIELDS = {"k_list", "snr_db_list", "estimators"}
_STR_FIELDS = {"lambda_rule", "training_kind", "beta_rule", "output_path"}


def parse_config(text: str) -> ExperimentConfig:
    """Parse the flat ``key = value`` config grammar (comments start with '#').

    List values are comma-separated; unknown keys are an error.
    """
    valid = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in valid:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        if key in _LIST_FIELDS:
            items = [v.strip() for v in val.split(",") if v.strip()]
            if key == "estimators":
                values[key] = tuple(items)
            elif key == "k_list":
                values[key] = tuple(int(v) for v in items)
            else:
                values[key] = tuple(float(v) for v in items)
        elif key in _STR_FIELDS:
            values[key] = val
        else:
            default = valid[key].default
            values[key] = int(val) if isinstance(default, int) else float(val)
    return ExperimentConfig(**values)


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise OSError(f"cannot read config file {str(path)!r}: {exc}") from exc
    return parse_config(text)


def format_config(cfg: ExperimentConfig) -> str:
    """Serialize a config back to the flat file grammar (round-trips with parse_config)."""
    out = []
    for f in dataclasses.fields(ExperimentConfig):
        v = getattr(cfg, f.name)
        if f.name in _LIST_FIELDS:
            v = ",".join(_fmt_value(x) for x in v)
        else:
            v = _fmt_value(v)
        out.append(f"{f.name} = {v}")
    return "\n".join(out) + "\n"
