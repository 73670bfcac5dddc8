"""Sparse recovery by graduated smoothing over a shrinking width sequence.

The solve starts from the minimum Euclidean-norm solution of A·s = x, then
walks a decreasing sequence of smoothing widths. At each width it takes a few
projected ascent steps on the smoothed sparsity measure: an elementwise shrink
step ``s <- s - mu * delta`` followed by projection back onto the feasible
set. Because each width is warm-started from the previous one, the iterate
tracks the maximizer as the surrogate sharpens toward the true nonzero count.

Two termination modes for the inner loop are supported: a fixed iteration
count ``L`` (the fast default) and a threshold mode that iterates until the
smoothed measure clears a target, which buys an a-posteriori error guarantee
at the price of a possible ``ThresholdUnreachable`` error when the width
sequence drops too fast.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    ThresholdUnreachable,
    TooManyActive,
    ZeroVector,
)
from .linalg import ProjectorFactor, as_matrix, as_vector, compute_M
from .penalty import PenaltyFamily

# Step factor, inner count and width sequence that the benchmark experiments
# all use; they are deliberately the package-wide defaults.
DEFAULT_MU = 2.5
DEFAULT_L = 3
DEFAULT_SCHEDULE = (1.0, 0.5, 0.2, 0.1, 0.05, 0.02, 0.01)


def validate_schedule(values) -> tuple[float, ...]:
    """Check a width sequence is positive and strictly decreasing."""
    out = tuple(float(v) for v in values)
    if len(out) < 1:
        raise ValueError("schedule must contain at least one width")
    if any(v <= 0.0 for v in out):
        raise ValueError(f"schedule widths must be positive: {out}")
    if any(b >= a for a, b in zip(out, out[1:])):
        raise ValueError(f"schedule must be strictly decreasing: {out}")
    return out


def geometric_schedule(sigma1: float, c: float, sigma_min: float) -> tuple[float, ...]:
    """Widths sigma1, c·sigma1, c²·sigma1, ... while above sigma_min, then
    sigma_min itself as the exact final value."""
    if sigma1 <= 0.0 or sigma_min <= 0.0:
        raise ValueError("sigma1 and sigma_min must be positive")
    if not 0.0 < c < 1.0:
        raise ValueError(f"decrease factor c must lie in (0, 1), got {c}")
    values = []
    v = float(sigma1)
    while v > sigma_min:
        values.append(v)
        v *= c
    values.append(float(sigma_min))
    return tuple(values)


def auto_sigma1(s0) -> float:
    """Starting width from the minimum-norm iterate: twice its largest
    magnitude, the low end of the range where the smoothing saturates."""
    s0 = as_vector(s0)
    peak = float(np.max(np.abs(s0)))
    if peak == 0.0:
        raise ZeroVector("cannot pick a starting width from an all-zero vector")
    return 2.0 * peak


@dataclass(frozen=True)
class SolverConfig:
    """Annealing schedule plus step parameters.

    ``schedule`` gives the widths explicitly; set it to None to build a
    geometric sequence from ``sigma1`` (auto-selected from the initial
    iterate when None), ``c`` and ``sigma_min``. ``mode`` is ``"fixed"``
    (L inner steps per width) or ``"threshold"`` (iterate until the smoothed
    measure reaches ``target_f``, default m - n/2, capped at ``max_inner``).
    """

    family: PenaltyFamily = PenaltyFamily("gaussian")
    schedule: tuple[float, ...] | None = DEFAULT_SCHEDULE
    sigma1: float | None = None
    c: float = 0.5
    sigma_min: float = 0.01
    mu: float = DEFAULT_MU
    L: int = DEFAULT_L
    mode: str = "fixed"
    target_f: float | None = None
    max_inner: int = 1000
    record_estimates: bool = False

    def __post_init__(self) -> None:
        if self.schedule is not None:
            object.__setattr__(self, "schedule", validate_schedule(self.schedule))
        else:
            if not 0.0 < self.c < 1.0:
                raise ValueError(f"c must lie in (0, 1), got {self.c}")
            if self.sigma_min <= 0.0:
                raise ValueError("sigma_min must be positive")
            if self.sigma1 is not None and self.sigma1 <= 0.0:
                raise ValueError("sigma1 must be positive")
        if self.mu <= 0.0:
            raise ValueError("mu must be positive")
        if self.L < 1:
            raise ValueError("L must be at least 1")
        if self.mode not in ("fixed", "threshold"):
            raise ValueError(f"mode must be 'fixed' or 'threshold', got {self.mode!r}")
        if self.max_inner < 1:
            raise ValueError("max_inner must be at least 1")

    def resolve_schedule(self, s0: np.ndarray) -> tuple[float, ...] | None:
        """Widths to run for an initial iterate; None when the start width is
        undefined (auto selection on an all-zero iterate)."""
        if self.schedule is not None:
            return self.schedule
        sigma1 = self.sigma1
        if sigma1 is None:
            if not np.any(s0):
                return None
            sigma1 = auto_sigma1(s0)
        return geometric_schedule(sigma1, self.c, self.sigma_min)


@dataclass(frozen=True)
class LevelTrace:
    """State at the end of one width level."""

    sigma: float
    f_total: float
    residual_norm: float
    inner_iterations: int
    estimate: np.ndarray | None = None


@dataclass
class SolveReport:
    """Estimate plus the per-width trace of a single solve."""

    estimate: np.ndarray
    trace: list[LevelTrace] = field(default_factory=list)
    wall_time: float = 0.0


def _run_level(
    s: np.ndarray,
    x: np.ndarray,
    sigma: float,
    proj: ProjectorFactor,
    cfg: SolverConfig,
    target: float,
) -> tuple[np.ndarray, int]:
    fam = cfg.family
    if cfg.mode == "fixed":
        for _ in range(cfg.L):
            s = s - cfg.mu * fam.ascent_direction(s, sigma)
            s = proj.project(s, x)
        return s, cfg.L
    inner = 0
    while fam.total(s, sigma) < target:
        if inner >= cfg.max_inner:
            raise ThresholdUnreachable(
                f"smoothed measure stuck below {target:.6g} after {inner} inner steps at "
                f"sigma={sigma:.6g}; the width sequence likely decreased too fast"
            )
        s = s - cfg.mu * fam.ascent_direction(s, sigma)
        s = proj.project(s, x)
        inner += 1
    return s, inner


def sl0_solve(a, x, cfg: SolverConfig | None = None, *, projector: ProjectorFactor | None = None) -> SolveReport:
    """Recover a sparse solution of the underdetermined system A·s = x.

    ``projector`` lets callers reuse a prebuilt factorization of A·Aᵀ across
    many right-hand sides; when omitted one is built (and row rank checked)
    here.
    """
    cfg = cfg or SolverConfig()
    started = time.perf_counter()
    proj = projector if projector is not None else ProjectorFactor(a)
    n, m = proj.source_dims
    x = as_vector(x)
    if x.shape[0] != n:
        raise DimensionMismatch(f"right-hand side has length {x.shape[0]}, expected {n}")

    s = proj.min_norm(x)
    schedule = cfg.resolve_schedule(s)
    if schedule is None:
        return SolveReport(np.zeros(m), [], time.perf_counter() - started)

    target = cfg.target_f if cfg.target_f is not None else m - n / 2.0
    fam = cfg.family
    trace: list[LevelTrace] = []
    for sigma in schedule:
        s, inner = _run_level(s, x, sigma, proj, cfg, target)
        trace.append(
            LevelTrace(
                sigma=float(sigma),
                f_total=float(fam.total(s, sigma)),
                residual_norm=float(np.linalg.norm(proj.matrix @ s - x)),
                inner_iterations=inner,
                estimate=s.copy() if cfg.record_estimates else None,
            )
        )
    return SolveReport(s, trace, time.perf_counter() - started)


def sl0_solve_batch(a, x_block, cfg: SolverConfig | None = None) -> list[SolveReport]:
    """Solve one system per column of an n×T block of right-hand sides.

    A single factorization of A·Aᵀ is shared across columns, and in fixed
    mode all columns advance together through matrix-shaped steps, so the
    per-sample cost drops well below that of repeated single solves. Each
    returned report carries the per-sample share of the batch wall time.
    """
    cfg = cfg or SolverConfig()
    started = time.perf_counter()
    proj = ProjectorFactor(a)
    n, m = proj.source_dims
    x_block = as_matrix(x_block)
    if x_block.shape[0] != n:
        raise DimensionMismatch(f"right-hand sides have length {x_block.shape[0]}, expected {n}")
    t_count = x_block.shape[1]

    if cfg.mode != "fixed":
        reports = [sl0_solve(a, x_block[:, t], cfg, projector=proj) for t in range(t_count)]
        per_sample = (time.perf_counter() - started) / t_count
        for rep in reports:
            rep.wall_time = per_sample
        return reports

    fam = cfg.family
    s_block = proj.min_norm(x_block)
    schedules = []
    for t in range(t_count):
        sched = cfg.resolve_schedule(s_block[:, t])
        schedules.append(sched if sched is not None else ())
        if sched is None:
            s_block[:, t] = 0.0
    traces: list[list[LevelTrace]] = [[] for _ in range(t_count)]

    for level in range(max((len(sch) for sch in schedules), default=0)):
        active = np.flatnonzero([len(sch) > level for sch in schedules])
        sigmas = np.array([schedules[t][level] for t in active])
        s_act = s_block[:, active]
        x_act = x_block[:, active]
        for _ in range(cfg.L):
            s_act = s_act - cfg.mu * fam.ascent_direction(s_act, sigmas)
            s_act = proj.project(s_act, x_act)
        s_block[:, active] = s_act
        f_tot = fam.total(s_act, sigmas, axis=0)
        resid = np.linalg.norm(proj.matrix @ s_act - x_act, axis=0)
        for pos, t in enumerate(active):
            traces[t].append(
                LevelTrace(
                    sigma=float(sigmas[pos]),
                    f_total=float(f_tot[pos]),
                    residual_norm=float(resid[pos]),
                    inner_iterations=cfg.L,
                    estimate=s_act[:, pos].copy() if cfg.record_estimates else None,
                )
            )

    per_sample = (time.perf_counter() - started) / t_count
    return [SolveReport(s_block[:, t].copy(), traces[t], per_sample) for t in range(t_count)]


def suggest_sigma_floor_noisy(a, k: int, epsilon: float, gamma: float | None = None) -> float:
    """Smallest width worth annealing to when the measurements carry additive
    noise of Euclidean norm at most ``epsilon``.

    Evaluates m·gamma·epsilon·‖Aᵀ(A·Aᵀ)⁻¹‖_F / (n - 2k), where ``gamma``
    bounds the smoothing family's derivative (exp(-1/2), the gaussian value,
    when omitted). Requires the active count k below n/2 and blows up as k
    approaches that limit; with exact measurements (epsilon = 0) the floor is
    0 and the width may shrink arbitrarily.
    """
    if gamma is None:
        gamma = PenaltyFamily("gaussian").derivative_bound
    proj = ProjectorFactor(a)
    n, m = proj.source_dims
    if k >= n / 2.0:
        raise TooManyActive(f"need k < n/2 = {n / 2}, got k={k}")
    if epsilon < 0.0:
        raise ValueError("epsilon must be non-negative")
    return m * gamma * epsilon * proj.pinv_frobenius_norm() / (n - 2.0 * k)


def error_upper_bound(a, s_hat) -> float:
    """A-posteriori bound on the distance from a feasible estimate to the
    (at most n/2-sparse) true solution: (M+1)·m·alpha, where alpha is the
    (floor(n/2)+1)-th largest magnitude of the estimate.

    Exact for estimates with at most floor(n/2) nonzeros (alpha = 0). Only
    available under the small-instance guard of :func:`compute_M`.
    """
    a = as_matrix(a)
    s_hat = as_vector(s_hat)
    n, m = a.shape
    if s_hat.shape[0] != m:
        raise DimensionMismatch(f"estimate has length {s_hat.shape[0]}, expected {m}")
    big_m = compute_M(a)
    mags = np.sort(np.abs(s_hat))[::-1]
    alpha = float(mags[n // 2])
    return (big_m + 1.0) * m * alpha


def irls_solve(a, x, p_norm: float = 0.0, iterations: int = 50, regularizer: float = 1e-8) -> np.ndarray:
    """Iteratively reweighted least-squares baseline.

    Repeats s <- W·Aᵀ(A·W·Aᵀ)⁻¹·x with W = diag(|s_i|^(2-p) + regularizer),
    starting from the minimum-norm solution. Each iterate is feasible by
    construction.
    """
    proj = ProjectorFactor(a)
    n, _ = proj.source_dims
    x = as_vector(x)
    if x.shape[0] != n:
        raise DimensionMismatch(f"right-hand side has length {x.shape[0]}, expected {n}")
    mat = proj.matrix
    s = proj.min_norm(x)
    for _ in range(iterations):
        w = np.abs(s) ** (2.0 - p_norm) + regularizer
        gram = (mat * w) @ mat.T
        try:
            z = np.linalg.solve(gram, x)
        except np.linalg.LinAlgError:
            z, *_ = np.linalg.lstsq(gram, x, rcond=None)
        s = w * (mat.T @ z)
    return s


def write_report_csv(report: SolveReport, path) -> None:
    """One row per width with columns sigma, F, residual, inner_iters, then a
    summary row with the final values and the total inner-iteration count."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sigma", "F", "residual", "inner_iters"])
        for entry in report.trace:
            writer.writerow(
                [
                    f"{entry.sigma:.17g}",
                    f"{entry.f_total:.17g}",
                    f"{entry.residual_norm:.17g}",
                    entry.inner_iterations,
                ]
            )
        if report.trace:
            last = report.trace[-1]
            writer.writerow(
                [
                    "total",
                    f"{last.f_total:.17g}",
                    f"{last.residual_norm:.17g}",
                    sum(e.inner_iterations for e in report.trace),
                ]
            )
        else:
            writer.writerow(["total", "", "", 0])
