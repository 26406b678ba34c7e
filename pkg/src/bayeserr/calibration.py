"""Calibration of corrupted scores against hard labels.

A corrupted score preserves no calibration but often preserves order: the
instances it ranks higher really do have higher posteriors. Every fitter
here takes paired data (score s_i in [0, 1], hard label y_i in {0, 1}) and
returns a monotone map from scores to posterior estimates. Isotonic
regression (pool-adjacent-violators) is the workhorse; uniform-mass
histogram binning and the parametric beta and logistic (Platt) families are
provided for comparison. `calibrate_and_estimate` closes the loop: fit,
apply to the training scores, and run the plug-in Bayes error estimator on
the result.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.special import expit, logit

from .errors import DataError, DomainError, FitError
from .estimator import EstimateReport, estimate_bayes_error

__all__ = [
    "pav_fit",
    "minmax_oracle",
    "isotonic_fit",
    "histogram_fit",
    "logistic_fit",
    "beta_fit",
    "platt_fit",
    "apply",
    "fit_calibrator",
    "calibrate_and_estimate",
    "CalibratorModel",
    "LogisticFit",
    "BETA_VARIANTS",
    "CALIBRATION_FAMILIES",
]

# Probabilities are clipped this far away from {0, 1} before any logit.
CLIP_EPS = 1e-12

BETA_VARIANTS = ("beta", "beta-am", "beta-ab", "beta-a")
CALIBRATION_FAMILIES = ("isotonic", "histogram") + BETA_VARIANTS + ("platt",)


def pav_fit(values, weights=None) -> np.ndarray:
    """Weighted least-squares isotonic regression by pool-adjacent-violators.

    Returns the nondecreasing sequence closest to `values` in the weighted
    squared error sense, one fitted value per input. Weights default to 1
    and must be positive. Runs in linear time: each input starts its own
    block and adjacent blocks merge (weighted mean) while they violate the
    ordering.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise DomainError("pav_fit needs a nonempty 1-d value sequence")
    if not np.all(np.isfinite(v)):
        raise DomainError("pav_fit values must be finite")
    if weights is None:
        w = np.ones(v.size)
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != v.shape:
            raise DomainError("weights must match the value sequence in length")
        if not np.all(np.isfinite(w)) or np.min(w) <= 0.0:
            raise DomainError("weights must be finite and positive")

    # Blocks are kept as (weight sum, weighted value sum) so merges are exact
    # accumulations; means are formed only for comparisons and the output.
    wsum: list[float] = []
    vsum: list[float] = []
    count: list[int] = []
    for val, wt in zip(v.tolist(), w.tolist()):
        wsum.append(wt)
        vsum.append(val * wt)
        count.append(1)
        while len(wsum) > 1 and vsum[-2] * wsum[-1] > vsum[-1] * wsum[-2]:
            wsum[-2] += wsum[-1]
            vsum[-2] += vsum[-1]
            count[-2] += count[-1]
            del wsum[-1], vsum[-1], count[-1]
    means = np.asarray(vsum) / np.asarray(wsum)
    fitted = np.repeat(means, count)
    return np.clip(fitted, v.min(), v.max())


def minmax_oracle(values) -> np.ndarray:
    """Isotonic regression by the direct min-max formula (unit weights).

    fitted_i = min over l >= i of max over k <= i of mean(values[k..l]).
    Cubic time; exists as an independent second route to the same function
    as `pav_fit`, for cross-checking.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise DomainError("minmax_oracle needs a nonempty 1-d value sequence")
    n = v.size
    prefix = np.concatenate([[0.0], np.cumsum(v)])
    out = np.empty(n)
    for i in range(n):
        lengths = np.arange(i + 1, 0, -1, dtype=float)  # l+1-k for k=0..i
        best = math.inf
        for l in range(i, n):
            means = (prefix[l + 1] - prefix[: i + 1]) / (lengths + (l - i))
            best = min(best, float(means.max()))
        out[i] = best
    return out


@dataclass(frozen=True)
class CalibratorModel:
    """A fitted monotone calibration map.

    `family` selects the functional form, `payload` its parameters, `n` the
    number of training pairs, and `flags` any non-fatal fitting notes
    (separation capping, slope repair, degenerate-bin merges).
    """

    family: str
    payload: dict[str, Any]
    n: int
    flags: tuple[str, ...] = ()

    def to_json(self) -> str:
        doc = {
            "family": self.family,
            "n": self.n,
            "flags": list(self.flags),
            "payload": self.payload,
        }
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "CalibratorModel":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataError(f"calibrator model is not valid JSON: {exc}") from exc
        for key in ("family", "n", "flags", "payload"):
            if key not in doc:
                raise DataError(f"calibrator model is missing the '{key}' field")
        family = doc["family"]
        if family not in CALIBRATION_FAMILIES:
            raise DataError(f"unknown calibration family '{family}'")
        payload = doc["payload"]
        required = {
            "isotonic": ("breakpoints", "values"),
            "histogram": ("edges", "values"),
            "platt": ("slope", "intercept"),
        }.get(family, ("a", "b", "c"))
        for key in required:
            if key not in payload:
                raise DataError(f"{family} model payload is missing '{key}'")
        return cls(
            family=family,
            payload=payload,
            n=int(doc["n"]),
            flags=tuple(doc["flags"]),
        )


def _as_paired(scores, labels, *, binary_labels: bool = True) -> tuple[np.ndarray, np.ndarray]:
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=float)
    if s.ndim != 1 or y.ndim != 1 or s.shape != y.shape:
        raise DomainError("scores and labels must be 1-d arrays of equal length")
    if s.size < 2:
        raise DomainError("calibration needs at least two (score, label) pairs")
    if not np.all(np.isfinite(s)):
        raise DomainError("scores must be finite")
    if np.min(s) < 0.0 or np.max(s) > 1.0:
        raise DomainError("scores must lie in [0, 1]")
    if binary_labels:
        if not np.all((y == 0.0) | (y == 1.0)):
            raise DomainError("labels must be 0 or 1")
        if np.min(y) == np.max(y):
            warnings.warn(
                "calibration labels are all one class; the fitted map is degenerate",
                stacklevel=3,
            )
    return s, y


def isotonic_fit(scores, labels) -> CalibratorModel:
    """Isotonic calibration: sort by score, pool ties, run PAV.

    Pairs with exactly equal scores are pooled into one weighted point
    before PAV (their label mean, weight = multiplicity), so the fit does
    not depend on how ties were ordered. The model is a right-continuous
    step function over the distinct training scores.
    """
    s, y = _as_paired(scores, labels)
    order = np.argsort(s, kind="stable")
    s_sorted = s[order]
    y_sorted = y[order]
    uniq, inverse, counts = np.unique(s_sorted, return_inverse=True, return_counts=True)
    label_sums = np.bincount(inverse, weights=y_sorted)
    pooled_means = label_sums / counts
    fitted = pav_fit(pooled_means, counts)
    return CalibratorModel(
        family="isotonic",
        payload={"breakpoints": uniq.tolist(), "values": fitted.tolist()},
        n=s.size,
    )


def histogram_fit(scores, labels, bins: int) -> CalibratorModel:
    """Uniform-mass histogram calibration.

    Sorts by score and cuts into `bins` contiguous groups whose sizes differ
    by at most one; each group's value is its label mean. Interior bin edges
    sit midway between the scores adjacent to each cut, and the outer edges
    span [0, 1]. When ties straddle a cut the midpoint degenerates; the bins
    around it are merged (weighted) and the model flagged.
    """
    if not isinstance(bins, (int, np.integer)) or bins < 1:
        raise DomainError(f"bins must be an integer >= 1, got {bins}")
    s, y = _as_paired(scores, labels)
    if bins > s.size:
        raise DomainError(f"bins ({bins}) exceeds the number of pairs ({s.size})")
    order = np.argsort(s, kind="stable")
    s_sorted = s[order]
    y_sorted = y[order]

    base, extra = divmod(s.size, bins)
    sizes = [base + 1 if i < extra else base for i in range(bins)]
    cuts = np.cumsum(sizes)  # exclusive end index of each bin
    edges = [0.0]
    edges.extend((s_sorted[c - 1] + s_sorted[c]) / 2.0 for c in cuts[:-1].tolist())
    edges.append(1.0)
    label_sums = [float(chunk.sum()) for chunk in np.split(y_sorted, cuts[:-1])]
    counts = [float(size) for size in sizes]

    flags: tuple[str, ...] = ()
    i = 1
    while i < len(edges) - 1:
        if edges[i] <= edges[i - 1]:
            del edges[i]
            label_sums[i - 1] += label_sums.pop(i)
            counts[i - 1] += counts.pop(i)
            flags = ("merged-degenerate-bins",)
        else:
            i += 1
    if len(edges) > 2 and edges[-2] >= 1.0:
        del edges[-2]
        label_sums[-2] += label_sums.pop()
        counts[-2] += counts.pop()
        flags = ("merged-degenerate-bins",)
    values = [ls / c for ls, c in zip(label_sums, counts)]
    return CalibratorModel(
        family="histogram",
        payload={"edges": edges, "values": values, "bins": len(values)},
        n=s.size,
        flags=flags,
    )


@dataclass(frozen=True)
class LogisticFit:
    """Logistic regression coefficients plus convergence diagnostics."""

    coef: np.ndarray
    converged: bool
    capped: bool
    iterations: int


def _log_likelihood(z: np.ndarray, targets: np.ndarray) -> float:
    return float(np.sum(targets * z - np.logaddexp(0.0, z)))


def logistic_fit(
    features,
    labels,
    *,
    intercept: bool = True,
    coef_cap: float = 30.0,
    tol: float = 1e-10,
    max_iter: int = 100,
) -> LogisticFit:
    """Unregularized logistic regression by Newton's method.

    Iterates until the score equations are satisfied to `tol` (sup norm), the
    Newton decrement predicts a likelihood gain below float resolution, or
    `max_iter` is reached. A singular Hessian falls back to step-halved
    gradient ascent for that iteration. Coefficients are capped at
    `coef_cap` in absolute value, which turns quasi-separation into a capped
    fit with `capped=True` instead of a divergence; `converged=False` then
    signals the cap, not a failure. Targets may be fractional (in [0, 1]).

    With an intercept the returned vector is the feature coefficients
    followed by the intercept.
    """
    F = np.asarray(features, dtype=float)
    if F.ndim == 1:
        F = F[:, None]
    t = np.asarray(labels, dtype=float)
    if F.ndim != 2 or t.ndim != 1 or F.shape[0] != t.shape[0]:
        raise DomainError("features must be (n, d) with one label per row")
    if F.shape[0] < 1:
        raise DomainError("logistic_fit needs at least one row")
    if not np.all(np.isfinite(F)):
        raise DomainError("features must be finite")
    if np.min(t) < 0.0 or np.max(t) > 1.0:
        raise DomainError("targets must lie in [0, 1]")
    if coef_cap <= 0.0:
        raise DomainError("coef_cap must be positive")

    X = np.hstack([F, np.ones((F.shape[0], 1))]) if intercept else F
    beta = np.zeros(X.shape[1])
    ll = _log_likelihood(X @ beta, t)
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        z = X @ beta
        prob = expit(z)
        grad = X.T @ (t - prob)
        if np.max(np.abs(grad)) < tol:
            converged = True
            break
        w = prob * (1.0 - prob)
        step = None
        hess = X.T @ (X * w[:, None])
        try:
            candidate = np.linalg.solve(hess, grad)
            if np.all(np.isfinite(candidate)):
                step = candidate
        except np.linalg.LinAlgError:
            step = None
        if step is None:
            step = grad  # gradient ascent fallback, scaled by halving below
        # Predicted gain ~ grad . step / 2; below the float resolution of
        # the likelihood itself there is nothing left to optimize.
        decrement = float(grad @ step)
        if 0.0 <= decrement <= 4.0 * np.finfo(float).eps * (1.0 + abs(ll)):
            converged = True
            break
        scale = 1.0
        improved = False
        for _ in range(60):
            trial = np.clip(beta + scale * step, -coef_cap, coef_cap)
            trial_ll = _log_likelihood(X @ trial, t)
            if trial_ll >= ll - 1e-15:
                beta, ll = trial, trial_ll
                improved = True
                break
            scale *= 0.5
        if not improved:
            break  # no ascent direction left at floating point resolution
    capped = bool(np.any(np.abs(beta) >= coef_cap))
    return LogisticFit(coef=beta, converged=converged, capped=capped, iterations=iterations)


def _clip_unit(p: np.ndarray) -> np.ndarray:
    return np.clip(p, CLIP_EPS, 1.0 - CLIP_EPS)


def _beta_features(p: np.ndarray, variant: str) -> tuple[np.ndarray, bool]:
    """Feature matrix and intercept switch for each beta-family variant."""
    if variant == "beta":
        return np.column_stack([np.log(p), -np.log(1.0 - p)]), True
    if variant == "beta-ab":
        return np.column_stack([np.log(2.0 * p), -np.log(2.0 * (1.0 - p))]), False
    if variant == "beta-am":
        return logit(p)[:, None], True
    if variant == "beta-a":
        return logit(p)[:, None], False
    raise DomainError(f"unknown beta variant '{variant}'")


def _assemble_beta_params(variant: str, slopes: np.ndarray, free_intercept: float) -> tuple[float, float, float]:
    if variant == "beta":
        a, b = float(slopes[0]), float(slopes[1])
        return a, b, free_intercept
    if variant == "beta-ab":
        a, b = float(slopes[0]), float(slopes[1])
        return a, b, (a - b) * math.log(2.0)
    if variant == "beta-am":
        a = float(slopes[0])
        return a, a, free_intercept
    a = float(slopes[0])  # beta-a
    return a, a, 0.0


def beta_fit(scores, labels, variant: str = "beta") -> CalibratorModel:
    """Beta-family calibration: sigmoid(a ln p - b ln(1-p) + c).

    The full family fits (a, b, c); the constrained variants tie parameters
    down: beta-am shares one slope (b = a), beta-ab pins the map to pass
    through (1/2, 1/2), and beta-a does both. Fitting is logistic regression
    on the log-transformed scores (clipped away from {0, 1}). A negative
    fitted slope would make the map decreasing, so the offending coefficient
    is refit constrained to zero and the model flagged "slope-repaired".
    """
    if variant not in BETA_VARIANTS:
        raise DomainError(f"unknown beta variant '{variant}'")
    s, y = _as_paired(scores, labels)
    if np.unique(s).size < 2:
        raise FitError(f"{variant} calibration needs at least two distinct scores")
    p = _clip_unit(s)
    features, intercept = _beta_features(p, variant)

    active = list(range(features.shape[1]))
    flags: list[str] = []
    while True:
        fit = logistic_fit(features[:, active], y, intercept=intercept)
        n_active = len(active)
        slope_part = fit.coef[:n_active]
        negative = [i for i in range(n_active) if slope_part[i] < 0.0]
        if not negative:
            break
        worst = min(negative, key=lambda i: slope_part[i])
        del active[worst]
        flags.append("slope-repaired")
        if not active:
            if not intercept:
                fit = LogisticFit(coef=np.zeros(0), converged=True, capped=False, iterations=0)
            else:
                fit = logistic_fit(np.zeros((s.size, 0)), y, intercept=True)
            break

    slopes = np.zeros(features.shape[1])
    for pos, idx in enumerate(active):
        slopes[idx] = fit.coef[pos]
    free_intercept = float(fit.coef[-1]) if intercept and fit.coef.size else 0.0
    a, b, c = _assemble_beta_params(variant, slopes, free_intercept)
    if fit.capped:
        flags.append("separation-capped")
    if not fit.converged:
        flags.append("non-converged")
    return CalibratorModel(
        family=variant,
        payload={"a": a, "b": b, "c": c},
        n=s.size,
        flags=tuple(dict.fromkeys(flags)),
    )


def platt_fit(scores, labels, *, target_smoothing: bool = False) -> CalibratorModel:
    """Logistic calibration sigmoid(A s + B) on the raw scores.

    Plain maximum likelihood by default. `target_smoothing=True` applies the
    classic shrunken targets (N+1)/(N+2) and 1/(N-+2) instead of 1 and 0; it
    is off by default so the fit matches the unsmoothed procedure used
    everywhere else in this package. A negative fitted slope is refit to the
    constant map (A = 0) and flagged.
    """
    s, y = _as_paired(scores, labels)
    targets = y
    if target_smoothing:
        n_pos = float(np.sum(y == 1.0))
        n_neg = float(np.sum(y == 0.0))
        hi = (n_pos + 1.0) / (n_pos + 2.0)
        lo = 1.0 / (n_neg + 2.0)
        targets = np.where(y == 1.0, hi, lo)
    fit = logistic_fit(s[:, None], targets, intercept=True)
    a, b = float(fit.coef[0]), float(fit.coef[1])
    flags: list[str] = []
    if a < 0.0:
        fit = logistic_fit(np.zeros((s.size, 0)), targets, intercept=True)
        a, b = 0.0, float(fit.coef[0])
        flags.append("slope-repaired")
    if fit.capped:
        flags.append("separation-capped")
    if not fit.converged:
        flags.append("non-converged")
    return CalibratorModel(
        family="platt",
        payload={"slope": a, "intercept": b},
        n=s.size,
        flags=tuple(dict.fromkeys(flags)),
    )


def apply(model: CalibratorModel, scores) -> np.ndarray:
    """Evaluate a fitted calibration map on scores in [0, 1].

    Pure lookup or formula evaluation; never refits. Outputs are clamped to
    [0, 1]. Scores outside the isotonic training range get the boundary
    block's value; an empty input yields an empty output.
    """
    s = np.asarray(scores, dtype=float)
    if s.ndim != 1:
        raise DomainError("apply expects a 1-d score array")
    if s.size == 0:
        return np.empty(0)
    if not np.all(np.isfinite(s)):
        raise DomainError("scores must be finite")
    if np.min(s) < 0.0 or np.max(s) > 1.0:
        raise DomainError("scores must lie in [0, 1]")

    if model.family == "isotonic":
        breakpoints = np.asarray(model.payload["breakpoints"], dtype=float)
        values = np.asarray(model.payload["values"], dtype=float)
        idx = np.searchsorted(breakpoints, s, side="right") - 1
        out = values[np.clip(idx, 0, values.size - 1)]
    elif model.family == "histogram":
        edges = np.asarray(model.payload["edges"], dtype=float)
        values = np.asarray(model.payload["values"], dtype=float)
        idx = np.searchsorted(edges, s, side="right") - 1
        out = values[np.clip(idx, 0, values.size - 1)]
    elif model.family in BETA_VARIANTS:
        p = _clip_unit(s)
        a, b, c = (model.payload[k] for k in ("a", "b", "c"))
        out = expit(a * np.log(p) - b * np.log(1.0 - p) + c)
    elif model.family == "platt":
        out = expit(model.payload["slope"] * s + model.payload["intercept"])
    else:
        raise DomainError(f"unknown calibration family '{model.family}'")
    return np.clip(out, 0.0, 1.0)


def _parse_family(family: str, bins: int | None) -> tuple[str, int | None]:
    if family.startswith("hist-"):
        try:
            parsed = int(family[len("hist-"):])
        except ValueError:
            raise DomainError(f"bad histogram bin count in '{family}'") from None
        return "histogram", parsed
    if family in ("hist", "histogram"):
        if bins is None:
            raise DomainError("histogram calibration needs a bin count")
        return "histogram", bins
    return family, bins


def fit_calibrator(scores, labels, family: str, *, bins: int | None = None) -> CalibratorModel:
    """Fit one calibration family by name.

    `family` is isotonic, hist-<B> (or histogram plus `bins`), one of the
    beta variants, or platt.
    """
    family, bins = _parse_family(family, bins)
    if family == "isotonic":
        return isotonic_fit(scores, labels)
    if family == "histogram":
        return histogram_fit(scores, labels, bins)
    if family in BETA_VARIANTS:
        return beta_fit(scores, labels, variant=family)
    if family == "platt":
        return platt_fit(scores, labels)
    raise DomainError(f"unknown calibration family '{family}'")


def calibrate_and_estimate(scores, labels, family: str, *, bins: int | None = None) -> EstimateReport:
    """Fit a calibrator, apply it to its own training scores, estimate.

    The family "none" skips calibration and estimates straight from the
    scores (the labels are ignored); anything else goes through
    `fit_calibrator`. Returns the estimate with the family, pair count, and
    any model flags attached.
    """
    if family == "none":
        s, _ = _as_paired(scores, labels)
        return EstimateReport(
            point_estimate=estimate_bayes_error(s),
            method="none",
            n=s.size,
        )
    model = fit_calibrator(scores, labels, family, bins=bins)
    calibrated = apply(model, np.asarray(scores, dtype=float))
    parameters: dict[str, Any] = {}
    if model.family == "histogram":
        parameters["bins"] = model.payload["bins"]
    return EstimateReport(
        point_estimate=estimate_bayes_error(calibrated),
        method=family if family.startswith("hist-") else model.family,
        n=model.n,
        parameters=parameters,
        flags=model.flags,
    )
