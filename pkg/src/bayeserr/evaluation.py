"""Evaluation utilities: bootstrap CIs, FeeBee scoring, order diagnostics.

The bootstrap resamples dataset rows jointly and reruns the full statistic
per resample, so a calibrate-then-estimate pipeline is re-fit on every
resample rather than having only its output perturbed. FeeBee scores an
estimator by sweeping synthetic label noise over a grid of rates and
penalizing estimates that leave the feasible band the noise rate implies.
Kendall's tau quantifies how much of the posterior order a corruption
destroyed; (1 - tau)/2 is the probability a uniformly random pair is
discordant.
"""

from __future__ import annotations

import decimal
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import ndtr, ndtri

from .calibration import calibrate_and_estimate
from .errors import BayesErrError, DomainError, FitError
from .estimator import ConfidenceInterval
from .rng import as_seed

__all__ = [
    "bootstrap_ci",
    "inject_label_noise",
    "feebee_score",
    "kendall_tau",
    "kendall_tau_quadratic",
    "fit_loglog_slope",
    "order_break_probability",
    "FeeBeeReport",
    "SlopeFit",
]


def bootstrap_ci(
    data,
    statistic: Callable[[np.ndarray], float],
    *,
    resamples: int = 1000,
    level: float = 0.95,
    method: str = "bca",
    seed,
) -> ConfidenceInterval:
    """Bootstrap confidence interval for statistic(indices).

    `data` only provides the row count (an int works too); `statistic` maps
    an integer index array to a real number and is called once per resample
    with n indices drawn with replacement from child stream b of the seed,
    so the result does not depend on evaluation order. Methods: "percentile"
    (interpolated quantiles) and "bca" (bias-corrected accelerated with
    jackknife acceleration; falls back to percentile with a flag when every
    resample lands on one side of the point estimate or the correction
    degenerates).
    """
    n = int(data) if isinstance(data, (int, np.integer)) else len(data)
    if n < 1:
        raise DomainError("bootstrap needs at least one row")
    if resamples < 2:
        raise DomainError(f"need at least 2 resamples, got {resamples}")
    if not (0.0 < level < 1.0):
        raise DomainError(f"the confidence level must lie in (0, 1), got {level}")
    if method not in ("percentile", "bca"):
        raise DomainError(f"unknown bootstrap method '{method}'")
    root = as_seed(seed)

    theta_hat = float(statistic(np.arange(n)))
    theta_star = np.empty(resamples)
    for b in range(resamples):
        gen = root.child(b).generator()
        theta_star[b] = statistic(gen.integers(0, n, size=n))

    alpha = 1.0 - level
    plain = (alpha / 2.0, 1.0 - alpha / 2.0)
    levels = plain
    method_used = method
    flags: tuple[str, ...] = ()
    if method == "bca":
        adjusted = _bca_levels(theta_hat, theta_star, statistic, n, alpha)
        if adjusted is None:
            method_used = "percentile"
            flags = ("bca-degenerate-fallback",)
        else:
            levels = adjusted
    lo, hi = np.quantile(theta_star, levels)
    return ConfidenceInterval(
        lower=float(lo),
        upper=float(hi),
        level=level,
        method=method_used,
        resamples=resamples,
        seed=root.root,
        flags=flags,
    )


def _bca_levels(
    theta_hat: float,
    theta_star: np.ndarray,
    statistic: Callable[[np.ndarray], float],
    n: int,
    alpha: float,
) -> tuple[float, float] | None:
    """Quantile levels after the BCa adjustment, or None when degenerate."""
    below = int(np.count_nonzero(theta_star < theta_hat))
    if below == 0 or below == theta_star.size or n < 2:
        return None
    z0 = float(ndtri(below / theta_star.size))

    base = np.arange(n)
    jack = np.empty(n)
    for i in range(n):
        jack[i] = statistic(np.delete(base, i))
    d = jack.mean() - jack
    denom = float(np.sum(d * d)) ** 1.5
    accel = float(np.sum(d**3)) / (6.0 * denom) if denom > 0.0 else 0.0

    out = []
    for z in (ndtri(alpha / 2.0), ndtri(1.0 - alpha / 2.0)):
        shift = z0 + z
        denominator = 1.0 - accel * shift
        if denominator <= 0.0:
            return None
        out.append(float(ndtr(z0 + shift / denominator)))
    if not 0.0 < out[0] < out[1] < 1.0:
        return None
    return out[0], out[1]


def inject_label_noise(labels, rho: float, seed) -> np.ndarray:
    """Replace each label with a fair coin independently at rate rho.

    Each label flips to its opposite with probability rho/2. Draw order: n
    uniforms for the replacement mask, then n for the coins. rho = 0 returns
    the labels unchanged; rho = 1 returns pure coin flips.
    """
    y = np.asarray(labels)
    if y.ndim != 1 or y.size == 0:
        raise DomainError("labels must be a nonempty 1-d array")
    if not np.all((y == 0) | (y == 1)):
        raise DomainError("labels must be 0 or 1")
    rho = float(rho)
    if not (0.0 <= rho <= 1.0):
        raise DomainError(f"the noise rate rho must lie in [0, 1], got {rho}")
    gen = as_seed(seed).generator()
    replace = gen.random(y.size) < rho
    coins = gen.random(y.size) < 0.5
    return np.where(replace, coins.astype(np.int64), y.astype(np.int64))


@dataclass(frozen=True)
class FeeBeeReport:
    """Noise-sweep evaluation of one estimation method.

    At noise rate rho the true Bayes error moves to rho/2 + (1 - rho) R*,
    so with R* in [0, E] any sound estimate must stay inside
    [rho/2, rho/2 + (1 - rho) E]. `score` averages the band violations over
    the grid; lower is better, zero means never outside the band.
    """

    method: str
    E: float
    N: int
    seed: int
    rho: tuple[float, ...]
    estimates: tuple[float, ...]
    lower: tuple[float, ...]
    upper: tuple[float, ...]
    penalties: tuple[float, ...]
    score: float


def feebee_score(
    scores,
    labels,
    family: str,
    E: float,
    *,
    N: int = 100,
    seed,
    bins: int | None = None,
) -> FeeBeeReport:
    """Score a calibration family by its behavior under injected label noise.

    For each rho = i/N (i = 0..N) the labels are rerandomized at rate rho
    with child stream i of the seed, the family is refit on the noised
    pairs, and the estimate's excursion outside the feasible band
    [rho/2, rho/2 + (1 - rho) E] is recorded. The family "none" ignores
    labels, so its estimate is constant across the grid. The score is the
    average excursion; evaluation order cannot change it because every grid
    point has its own child stream.
    """
    E = float(E)
    if not (0.0 <= E <= 0.5):
        raise DomainError(f"the Bayes error cap E must lie in [0, 1/2], got {E}")
    if not isinstance(N, (int, np.integer)) or N < 1:
        raise DomainError(f"the grid resolution N must be an integer >= 1, got {N}")
    root = as_seed(seed)
    y = np.asarray(labels)

    rhos = [i / N for i in range(N + 1)]
    estimates: list[float] = []
    none_estimate = None
    if family == "none":
        none_estimate = calibrate_and_estimate(scores, y, "none").point_estimate
    for i, rho in enumerate(rhos):
        if none_estimate is not None:
            estimates.append(none_estimate)
            continue
        noised = inject_label_noise(y, rho, root.child(i))
        try:
            report = calibrate_and_estimate(scores, noised, family, bins=bins)
        except BayesErrError as exc:
            raise FitError(f"calibration failed at noise rate rho={rho}: {exc}") from exc
        estimates.append(report.point_estimate)

    lower = [rho / 2.0 for rho in rhos]
    upper = [rho / 2.0 + (1.0 - rho) * E for rho in rhos]
    penalties = [
        max(est - hi, 0.0) + max(lo - est, 0.0)
        for est, lo, hi in zip(estimates, lower, upper)
    ]
    score = math.fsum(penalties) / (N + 1)
    return FeeBeeReport(
        method=family,
        E=E,
        N=int(N),
        seed=root.root,
        rho=tuple(rhos),
        estimates=tuple(estimates),
        lower=tuple(lower),
        upper=tuple(upper),
        penalties=tuple(penalties),
        score=score,
    )


def _count_inversions(arr: np.ndarray) -> tuple[np.ndarray, int]:
    """Sorted copy of arr and the number of strictly decreasing pairs."""
    n = arr.size
    if n <= 1:
        return arr, 0
    mid = n // 2
    left, count_left = _count_inversions(arr[:mid])
    right, count_right = _count_inversions(arr[mid:])
    # Pairs (i in left, j in right) with left_i > right_j: everything in the
    # left half not <= right_j. Equal values are not inversions.
    pos = np.searchsorted(left, right, side="right")
    cross = int(left.size * right.size - pos.sum())
    merged = np.empty(n, dtype=arr.dtype)
    li = pos + np.arange(right.size)
    mask = np.ones(n, dtype=bool)
    mask[li] = False
    merged[li] = right
    merged[mask] = left
    return merged, count_left + count_right + cross


def _tie_pairs(sorted_arr: np.ndarray) -> int:
    """Number of tied pairs in a sorted array: sum of t(t-1)/2 per run."""
    if sorted_arr.size < 2:
        return 0
    change = np.flatnonzero(sorted_arr[1:] != sorted_arr[:-1])
    starts = np.concatenate([[0], change + 1])
    runs = np.diff(np.concatenate([starts, [sorted_arr.size]]))
    return int(np.sum(runs * (runs - 1) // 2))


def kendall_tau(a, b) -> float:
    """Kendall's tau-a: (concordant - discordant) / (n(n-1)/2).

    Tied pairs (in either coordinate) contribute zero to the numerator while
    the denominator stays n(n-1)/2, so tau = 1 requires a strict order
    match. Runs in O(n log^2 n): sort by (a, b), then count inversions of
    the b sequence by merge counting.
    """
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    if x.ndim != 1 or y.ndim != 1 or x.shape != y.shape:
        raise DomainError("kendall_tau needs two 1-d arrays of equal length")
    if x.size < 2:
        raise DomainError("kendall_tau needs at least two points")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise DomainError("kendall_tau inputs must be finite")
    n = x.size
    total = n * (n - 1) // 2

    order = np.lexsort((y, x))
    xs = x[order]
    ys = y[order]
    ties_x = _tie_pairs(xs)
    ties_y = _tie_pairs(np.sort(y, kind="stable"))
    joint_change = np.flatnonzero((xs[1:] != xs[:-1]) | (ys[1:] != ys[:-1]))
    starts = np.concatenate([[0], joint_change + 1])
    runs = np.diff(np.concatenate([starts, [n]]))
    ties_joint = int(np.sum(runs * (runs - 1) // 2))

    _, discordant = _count_inversions(ys)
    # Pairs tied in x sort adjacent with y ascending, so they are never
    # counted as inversions; the tie terms remove them from the numerator.
    concordant_minus_discordant = total - ties_x - ties_y + ties_joint - 2 * discordant
    return concordant_minus_discordant / total


def kendall_tau_quadratic(a, b) -> float:
    """Kendall's tau-a by direct pair enumeration. Quadratic; a second
    route to the same function as `kendall_tau`, for cross-checking."""
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    if x.ndim != 1 or y.ndim != 1 or x.shape != y.shape:
        raise DomainError("kendall_tau_quadratic needs two 1-d arrays of equal length")
    if x.size < 2:
        raise DomainError("kendall_tau_quadratic needs at least two points")
    n = x.size
    sx = np.sign(x[:, None] - x[None, :])
    sy = np.sign(y[:, None] - y[None, :])
    upper = np.triu_indices(n, k=1)
    numerator = float(np.sum(sx[upper] * sy[upper]))
    return numerator / (n * (n - 1) / 2.0)


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares line through (log x, log y)."""

    slope: float
    intercept: float


def fit_loglog_slope(x, y) -> SlopeFit:
    """Fit log(y) = slope * log(x) + intercept by ordinary least squares.

    Both coordinates must be positive, with at least two distinct x values.
    """
    xv = np.asarray(x, dtype=float)
    yv = np.asarray(y, dtype=float)
    if xv.ndim != 1 or yv.ndim != 1 or xv.shape != yv.shape:
        raise DomainError("fit_loglog_slope needs two 1-d arrays of equal length")
    if xv.size < 2:
        raise DomainError("fit_loglog_slope needs at least two points")
    if np.min(xv) <= 0.0 or np.min(yv) <= 0.0:
        raise DomainError("log-log fitting needs strictly positive values")
    lx = np.log(xv)
    ly = np.log(yv)
    lx_centered = lx - lx.mean()
    denom = float(np.sum(lx_centered**2))
    if denom == 0.0:
        raise DomainError("fit_loglog_slope needs at least two distinct x values")
    slope = float(np.sum(lx_centered * ly) / denom)
    intercept = float(ly.mean() - slope * lx.mean())
    return SlopeFit(slope=slope, intercept=intercept)


def order_break_probability(tau: float) -> float:
    """Probability a uniformly random pair is discordant: (1 - tau)/2.

    Evaluated through the argument's shortest decimal form in one exact
    Decimal operation, so decimal inputs give decimal answers:
    tau = 0.95 returns 0.025, not the two-rounding float 0.02500...022.
    """
    tau = float(tau)
    if not (-1.0 <= tau <= 1.0):
        raise DomainError(f"Kendall's tau must lie in [-1, 1], got {tau}")
    return float((1 - decimal.Decimal(repr(tau))) / 2)
