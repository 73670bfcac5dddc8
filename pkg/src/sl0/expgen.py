"""Problem generation, quality metrics, and Monte Carlo sweep execution.

Sources follow a Bernoulli-Gaussian model: each entry is active with
probability p (drawn N(0, sigma_on²)) and otherwise near-zero
(N(0, sigma_off²)); an exact-k mode activates a uniformly random subset of
fixed size instead. Mixing matrices have i.i.d. standard-normal entries with
columns normalized to unit length, and measurements optionally carry additive
white Gaussian noise.

Every randomized routine takes an explicit seed (an integer, a SeedSequence,
or a Generator) and is bit-reproducible from it. Sweeps derive one seed per
trial as ``base_seed + run_index`` and split it into independent streams for
the matrix, the sources, and the noise, so grid points that share a trial
index see identical problem data.
"""

from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace
from itertools import product

import numpy as np

from .errors import DimensionMismatch, Sl0Error, ZeroReference
from .penalty import PenaltyFamily
from .solver import DEFAULT_SCHEDULE, SolverConfig, irls_solve, sl0_solve

# Cap applied when the estimate is (numerically) exact, so averages of
# decibel values stay finite in noiseless exact-recovery regimes.
SNR_CAP_DB = 300.0


@dataclass(frozen=True)
class SourceModel:
    """Bernoulli-Gaussian source parameters; ``p`` and ``exact_k`` are
    mutually exclusive activation modes."""

    m: int
    p: float | None = None
    exact_k: int | None = None
    sigma_on: float = 1.0
    sigma_off: float = 0.0

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError("m must be positive")
        if (self.p is None) == (self.exact_k is None):
            raise ValueError("exactly one of p and exact_k must be set")
        if self.p is not None and not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if self.exact_k is not None and not 0 <= self.exact_k <= self.m:
            raise ValueError(f"exact_k must lie in [0, m], got {self.exact_k}")
        if self.sigma_on <= 0.0:
            raise ValueError("sigma_on must be positive")
        if not 0.0 <= self.sigma_off <= self.sigma_on:
            raise ValueError("need 0 <= sigma_off <= sigma_on")


@dataclass(frozen=True)
class MixingSpec:
    """Shape, sensor-noise level and default seed of the mixing stage."""

    n: int
    m: int
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not 1 <= self.n <= self.m:
            raise ValueError(f"need 1 <= n <= m, got n={self.n}, m={self.m}")
        if self.noise_sigma < 0.0:
            raise ValueError("noise_sigma must be non-negative")


@dataclass(frozen=True)
class TrialResult:
    snr_db: float
    mse: float
    wall_time: float
    run_index: int


def generate_sources(model: SourceModel, seed) -> np.ndarray:
    """Draw one source vector from the model."""
    rng = np.random.default_rng(seed)
    scale = np.full(model.m, model.sigma_off)
    if model.exact_k is not None:
        active = rng.choice(model.m, size=model.exact_k, replace=False)
        scale[active] = model.sigma_on
    else:
        scale[rng.random(model.m) < model.p] = model.sigma_on
    return scale * rng.standard_normal(model.m)


def generate_mixing(spec: MixingSpec, seed=None) -> np.ndarray:
    """Random n×m mixing matrix with unit-norm columns."""
    rng = np.random.default_rng(spec.seed if seed is None else seed)
    a = rng.standard_normal((spec.n, spec.m))
    return a / np.linalg.norm(a, axis=0)


def mix(a: np.ndarray, s: np.ndarray, noise_sigma: float, seed) -> np.ndarray:
    """Measurements A·s plus white Gaussian noise of per-component standard
    deviation ``noise_sigma``."""
    a = np.asarray(a, dtype=float)
    s = np.asarray(s, dtype=float)
    if a.ndim != 2 or s.shape != (a.shape[1],):
        raise DimensionMismatch(f"cannot mix shapes {a.shape} and {s.shape}")
    x = a @ s
    if noise_sigma > 0.0:
        x = x + noise_sigma * np.random.default_rng(seed).standard_normal(a.shape[0])
    return x


def generate_problem(model: SourceModel, spec: MixingSpec, seed) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One (A, s, x) instance from a single seed, split into independent
    streams for the mixing matrix, the sources, and the noise."""
    if model.m != spec.m:
        raise DimensionMismatch(f"source length {model.m} != mixing width {spec.m}")
    seed_a, seed_s, seed_n = np.random.SeedSequence(seed).spawn(3)
    a = generate_mixing(spec, seed_a)
    s = generate_sources(model, seed_s)
    x = mix(a, s, spec.noise_sigma, seed_n)
    return a, s, x


def mse(s_true, s_est) -> float:
    """Mean squared componentwise error."""
    s_true = np.asarray(s_true, dtype=float)
    s_est = np.asarray(s_est, dtype=float)
    if s_true.shape != s_est.shape:
        raise DimensionMismatch(f"shape mismatch {s_true.shape} vs {s_est.shape}")
    return float(np.mean((s_true - s_est) ** 2))


def snr_db(s_true, s_est) -> float:
    """20·log10(‖s‖ / ‖s - ŝ‖) in dB, capped at ``SNR_CAP_DB``."""
    s_true = np.asarray(s_true, dtype=float)
    s_est = np.asarray(s_est, dtype=float)
    if s_true.shape != s_est.shape:
        raise DimensionMismatch(f"shape mismatch {s_true.shape} vs {s_est.shape}")
    ref = float(np.linalg.norm(s_true))
    if ref == 0.0:
        raise ZeroReference("SNR is undefined for an all-zero reference")
    err = float(np.linalg.norm(s_true - s_est))
    if err == 0.0:
        return SNR_CAP_DB
    return min(SNR_CAP_DB, 20.0 * math.log10(ref / err))


@dataclass(frozen=True)
class SweepPoint:
    """One grid point of a sweep: problem shape, source statistics, and the
    solver settings used on it.

    ``k`` is the expected active count (activation probability k/m), drawn
    exactly when ``exact_activation`` is set. Defaults are the benchmark
    reference point: 1000 unknowns, 400 equations, 100 active sources, unit
    active scale, 0.01 sensor noise, and the stock seven-width schedule.
    """

    m: int = 1000
    n: int = 400
    k: int = 100
    exact_activation: bool = False
    sigma_on: float = 1.0
    sigma_off: float = 0.0
    noise_sigma: float = 0.01
    family: str = "gaussian"
    solver: str = "sl0"
    schedule: tuple[float, ...] | None = DEFAULT_SCHEDULE
    sigma1: float | None = None
    c: float = 0.5
    sigma_min: float = 0.01
    mu: float = 2.5
    L: int = 3
    mode: str = "fixed"
    target_f: float | None = None
    max_inner: int = 1000
    irls_p_norm: float = 0.0
    irls_iterations: int = 50
    irls_regularizer: float = 1e-8

    def source_model(self) -> SourceModel:
        if self.exact_activation:
            return SourceModel(m=self.m, exact_k=self.k, sigma_on=self.sigma_on, sigma_off=self.sigma_off)
        return SourceModel(m=self.m, p=self.k / self.m, sigma_on=self.sigma_on, sigma_off=self.sigma_off)

    def mixing_spec(self) -> MixingSpec:
        return MixingSpec(n=self.n, m=self.m, noise_sigma=self.noise_sigma)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            family=PenaltyFamily(self.family),
            schedule=self.schedule,
            sigma1=self.sigma1,
            c=self.c,
            sigma_min=self.sigma_min,
            mu=self.mu,
            L=self.L,
            mode=self.mode,
            target_f=self.target_f,
            max_inner=self.max_inner,
        )


# Grid keys that only take effect through a geometric schedule.
_GEOMETRIC_KEYS = {"c", "sigma_min", "sigma1"}


def run_trial(point: SweepPoint, run_index: int, base_seed: int) -> TrialResult:
    """Generate one problem instance and solve it, timing the solve only."""
    seed = base_seed + run_index
    a, s_true, x = generate_problem(point.source_model(), point.mixing_spec(), seed)
    started = time.perf_counter()
    if point.solver == "sl0":
        estimate = sl0_solve(a, x, point.solver_config()).estimate
    elif point.solver == "irls":
        estimate = irls_solve(
            a, x, point.irls_p_norm, point.irls_iterations, point.irls_regularizer
        )
    else:
        raise ValueError(f"unknown solver {point.solver!r}; choose sl0 or irls")
    wall = time.perf_counter() - started
    return TrialResult(snr_db(s_true, estimate), mse(s_true, estimate), wall, run_index)


def _grid_points(grid: dict, base: SweepPoint) -> list[tuple[dict, SweepPoint]]:
    valid = {f.name for f in fields(SweepPoint)}
    for key in grid:
        if key not in valid:
            raise ValueError(f"unknown grid key {key!r}; valid keys: {sorted(valid)}")
        if key in _GEOMETRIC_KEYS and base.schedule is not None:
            raise ValueError(
                f"varying {key!r} has no effect with an explicit schedule; "
                "set schedule=None on the base point"
            )
    points = []
    keys = list(grid)
    for combo in product(*(grid[k] for k in keys)):
        overrides = dict(zip(keys, combo))
        points.append((overrides, replace(base, **overrides)))
    return points


def run_sweep(
    grid: dict,
    runs: int,
    base_seed: int,
    base: SweepPoint | None = None,
    jobs: int = 1,
    collect_trials: bool = False,
):
    """Run ``runs`` independent trials at every point of a parameter grid.

    ``grid`` maps SweepPoint field names to value lists; the cartesian
    product is swept in key order. Returns one summary row per grid point
    with mean/std/min SNR, mean MSE and mean solve time; solver failures are
    counted per point instead of aborting the sweep. With ``collect_trials``
    a long-format list of per-trial rows is returned alongside.
    """
    base = base or SweepPoint()
    if runs < 1:
        raise ValueError("runs must be at least 1")
    points = _grid_points(grid, base)

    tasks = [(overrides, point, r) for overrides, point in points for r in range(runs)]

    def _one(task):
        _, point, r = task
        try:
            return run_trial(point, r, base_seed)
        except Sl0Error as exc:
            return exc

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_one, tasks))
    else:
        outcomes = [_one(t) for t in tasks]

    rows = []
    trial_rows = []
    for i, (overrides, _point) in enumerate(points):
        chunk = outcomes[i * runs : (i + 1) * runs]
        good = [t for t in chunk if isinstance(t, TrialResult)]
        snrs = np.array([t.snr_db for t in good])
        row = dict(overrides)
        row.update(
            runs=runs,
            snr_mean_db=float(np.mean(snrs)) if good else math.nan,
            snr_std_db=float(np.std(snrs)) if good else math.nan,
            snr_min_db=float(np.min(snrs)) if good else math.nan,
            mse_mean=float(np.mean([t.mse for t in good])) if good else math.nan,
            time_mean_s=float(np.mean([t.wall_time for t in good])) if good else math.nan,
            failures=len(chunk) - len(good),
        )
        rows.append(row)
        if collect_trials:
            for r, outcome in enumerate(chunk):
                trial = dict(overrides, run_index=r, seed=base_seed + r)
                if isinstance(outcome, TrialResult):
                    trial.update(
                        snr_db=outcome.snr_db, mse=outcome.mse, wall_time_s=outcome.wall_time, error=""
                    )
                else:
                    trial.update(snr_db="", mse="", wall_time_s="", error=str(outcome))
                trial_rows.append(trial)
    if collect_trials:
        return rows, trial_rows
    return rows


def _format_cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def write_sweep_csv(rows: list[dict], path) -> None:
    """Summary CSV: the varied parameters followed by the aggregate columns."""
    if not rows:
        raise ValueError("no rows to write")
    header = list(rows[0])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(row[k]) for k in header])


def write_trials_csv(trial_rows: list[dict], path) -> None:
    """Long-format per-trial CSV, one row per (grid point, run)."""
    write_sweep_csv(trial_rows, path)
