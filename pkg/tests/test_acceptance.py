"""Acceptance gate: one test and one printed PASS/FAIL line per criterion.

Statistical criteria run at fixed seeds, so every threshold below is a
deterministic check, not a flaky one. Shared simulations live in
module-scoped fixtures; each criterion prints `[criterion NN] PASS/FAIL`
with the measured values before asserting.
"""

import math
import re
import time

import numpy as np
import pytest

from bayeserr.bounds import (
    baseline_bias_bound,
    computable_bias_bound,
)
from bayeserr.calibration import calibrate_and_estimate, minmax_oracle, pav_fit
from bayeserr.cli import bias_simulation, main, order_break_sweep
from bayeserr.estimator import estimate_bayes_error
from bayeserr.evaluation import (
    bootstrap_ci,
    feebee_score,
    fit_loglog_slope,
    order_break_probability,
)
from bayeserr.rng import Seed
from bayeserr.synthdata import (
    CorruptionSpec,
    GaussianMixtureSpec,
    corrupted_hard_label_pipeline,
    label_flip_posteriors,
    sample_gaussian_mixture,
)

M_LIST = (10, 25, 50, 100, 250, 500, 1000)

MIX = GaussianMixtureSpec(theta=0.4, mu0=(0.0, 0.0), mu1=(2.0, 2.0))
CORRUPTION = CorruptionSpec(kind="beta", a=2.0, b=0.7)


def _line(num, ok, detail):
    print(f"[criterion {num:02d}] {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, f"criterion {num:02d}: {detail}"


@pytest.fixture(scope="module")
def bias_runs():
    """Hard-label bias sweeps over m for the three reference distributions."""
    separated = GaussianMixtureSpec(theta=0.5, mu0=(0.0, 0.0), mu1=(2.0, 2.0))
    overlapping = GaussianMixtureSpec(theta=0.5, mu0=(0.0, 0.0), mu1=(0.0, 0.0))

    def sample_separated(n, seed):
        return sample_gaussian_mixture(separated, n, seed)[0]

    def sample_overlapping(n, seed):
        return sample_gaussian_mixture(overlapping, n, seed)[0]

    def sample_flip(n, seed):
        return label_flip_posteriors(0.1, n, seed)

    t0 = time.monotonic()
    runs = {
        "separated-means": bias_simulation(sample_separated, M_LIST, 2000, 200, Seed(202)),
        "overlapping-means": bias_simulation(sample_overlapping, M_LIST, 2000, 200, Seed(102)),
        "label-flip": bias_simulation(sample_flip, M_LIST, 2000, 200, Seed(103), known_c=0.4),
    }
    runs["elapsed"] = time.monotonic() - t0
    return runs


@pytest.fixture(scope="module")
def corrupted_dataset():
    """The reference synthetic dataset: theta=0.4 mixture, beta corruption a=2 b=0.7."""
    root = Seed(20)
    etas, _ = sample_gaussian_mixture(MIX, 10000, root.child(0))
    scores, labels = corrupted_hard_label_pipeline(etas, CORRUPTION, None, root.child(1))
    return etas, scores, labels, root


def test_criterion_01_bound_reference_values():
    t0 = time.monotonic()
    computable = computable_bias_bound(E=0.0005, m=50)
    baseline = baseline_bias_bound(n=10000, m=50)
    elapsed = time.monotonic() - t0
    ok = computable.value <= 0.00276 and abs(baseline - 0.557) <= 0.001 and elapsed < 1.0
    _line(1, ok, f"computable(0.0005, 50)={computable.value:.6f} <= 0.00276, "
                 f"baseline(10000, 50)={baseline:.4f} = 0.557 +/- 0.001, {elapsed:.2f}s < 1s")


def test_criterion_02_baseline_dominates_sqrt_term():
    t0 = time.monotonic()
    gen = np.random.default_rng(99)
    ns = gen.integers(1, 10**9, size=10**4)
    ms = gen.integers(1, 10**6, size=10**4)
    margins = [
        baseline_bias_bound(int(n), int(m)) - math.sqrt(math.pi / (2 * m))
        for n, m in zip(ns, ms)
    ]
    elapsed = time.monotonic() - t0
    worst = min(margins)
    ok = worst >= 0.0 and elapsed < 1.0
    _line(2, ok, f"sqrt(pi/(2m)) <= baseline bound on 10^4 random (n, m), "
                 f"worst margin {worst:.3e}, {elapsed:.2f}s < 1s")


def test_criterion_03_bias_decay_slopes(bias_runs):
    slope_sep = bias_runs["separated-means"]["slope"]["slope"]
    slope_ovl = bias_runs["overlapping-means"]["slope"]["slope"]
    flip_ok = all(
        abs(row["bias"]) <= 0.1125 / row["m"] + 3 * row["stderr"]
        for row in bias_runs["label-flip"]["rows"]
    )
    elapsed = bias_runs["elapsed"]
    ok = (-1.05 <= slope_sep <= -0.75 and -0.60 <= slope_ovl <= -0.40
          and flip_ok and elapsed < 600.0)
    _line(3, ok, f"separated-means slope {slope_sep:.4f} in [-1.05, -0.75], "
                 f"overlapping-means slope {slope_ovl:.4f} in [-0.60, -0.40], "
                 f"label-flip bias <= 0.1125/m + 3se at all m: {flip_ok}, "
                 f"{elapsed:.0f}s < 600s")


def test_criterion_04_empirical_bias_within_curvature_bound(bias_runs):
    worst = -1.0
    for name in ("separated-means", "overlapping-means", "label-flip"):
        for row in bias_runs[name]["rows"]:
            excess = abs(row["bias"]) - (row["curvature_bound"] + 3 * row["stderr"])
            worst = max(worst, excess)
    ok = worst <= 0.0
    _line(4, ok, f"|bias| <= curvature bound + 3se at every m for all three "
                 f"distributions, worst excess {worst:.3e}")


def test_criterion_05_isotonic_recovers_clean_estimate():
    t0 = time.monotonic()
    root = Seed(20)
    etas, _ = sample_gaussian_mixture(MIX, 10000, root.child(0))
    scores, labels = corrupted_hard_label_pipeline(etas, CORRUPTION, None, root.child(1))
    clean = estimate_bayes_error(etas)
    corrupted = estimate_bayes_error(scores)
    iso = calibrate_and_estimate(scores, labels, "isotonic").point_estimate

    def stat(idx):
        return calibrate_and_estimate(scores[idx], labels[idx], "isotonic").point_estimate

    ci = bootstrap_ci(10000, stat, resamples=1000, seed=root.child(2), method="percentile")
    elapsed = time.monotonic() - t0
    ok = (abs(iso - clean) <= 0.01 and abs(corrupted - clean) >= 0.05
          and ci.lower <= iso <= ci.upper and elapsed < 30.0)
    _line(5, ok, f"|isotonic {iso:.4f} - clean {clean:.4f}| <= 0.01, "
                 f"|corrupted {corrupted:.4f} - clean| >= 0.05, "
                 f"CI [{ci.lower:.4f}, {ci.upper:.4f}] brackets the estimate, "
                 f"{elapsed:.1f}s < 30s")


def test_criterion_06_isotonic_error_shrinks_with_n():
    t0 = time.monotonic()
    sizes = (1000, 4000, 16000)
    medians = []
    for n in sizes:
        errs = []
        for s in range(50):
            root = Seed(7000 + s)
            etas, _ = sample_gaussian_mixture(MIX, n, root.child(0))
            scores, labels = corrupted_hard_label_pipeline(
                etas, CORRUPTION, None, root.child(1))
            est = calibrate_and_estimate(scores, labels, "isotonic").point_estimate
            errs.append(abs(est - estimate_bayes_error(etas)))
        medians.append(float(np.median(errs)))
    slope = fit_loglog_slope(sizes, medians).slope
    elapsed = time.monotonic() - t0
    nonincreasing = medians[0] >= medians[1] >= medians[2]
    ok = nonincreasing and slope <= -0.25 and elapsed < 300.0
    _line(6, ok, f"median |isotonic - clean| over 50 seeds {medians} nonincreasing "
                 f"in n, log-log slope {slope:.3f} <= -0.25, {elapsed:.0f}s < 300s")


def test_criterion_07_noisy_corruption_error_shrinks_with_m():
    noisy = CorruptionSpec(kind="beta", a=2.0, b=0.5)
    medians = []
    for m in (3, 5, 10, 25, 50, 100):
        errs = []
        for s in range(20):
            root = Seed(9000 + s)
            etas, _ = sample_gaussian_mixture(MIX, 10000, root.child(0))
            scores, labels = corrupted_hard_label_pipeline(etas, noisy, m, root.child(1))
            est = calibrate_and_estimate(scores, labels, "isotonic").point_estimate
            errs.append(abs(est - estimate_bayes_error(etas)))
        medians.append(round(float(np.median(errs)), 10))
    ok = all(a >= b for a, b in zip(medians, medians[1:]))
    _line(7, ok, f"median |isotonic - clean| over 20 seeds at m=3..100 "
                 f"nonincreasing: {medians}")


def test_criterion_08_pav_matches_minmax_oracle():
    t0 = time.monotonic()
    gen = np.random.default_rng(8)
    worst = 0.0
    for _ in range(200):
        n = int(gen.integers(1, 41))
        values = gen.normal(size=n)
        worst = max(worst, float(np.max(np.abs(pav_fit(values) - minmax_oracle(values)))))
    elapsed = time.monotonic() - t0
    ok = worst <= 1e-12 and elapsed < 10.0
    _line(8, ok, f"pav_fit vs min-max oracle on 200 random sequences (n <= 40), "
                 f"max deviation {worst:.2e} <= 1e-12, {elapsed:.1f}s < 10s")


def test_criterion_09_estimate_is_lipschitz_in_soft_labels():
    gen = np.random.default_rng(9)
    worst_first = -1.0
    worst_second = -1.0
    for i in range(1000):
        n = int(gen.integers(1, 400))
        eta = gen.random(n)
        if i % 3 == 0:
            other = np.clip(eta + gen.normal(0.0, 0.01, n), 0.0, 1.0)
        elif i % 3 == 1:
            other = gen.random(n)
        else:
            other = eta.copy()
        delta = other - eta
        diff = abs(estimate_bayes_error(other) - estimate_bayes_error(eta))
        mean_abs = float(np.mean(np.abs(delta)))
        rmse = float(np.sqrt(np.mean(delta**2)))
        worst_first = max(worst_first, diff - mean_abs)
        worst_second = max(worst_second, mean_abs - rmse)
    ok = worst_first <= 1e-12 and worst_second <= 1e-12
    _line(9, ok, f"|estimate shift| <= mean|delta| <= rmse(delta) on 1000 random "
                 f"pairs, worst gaps {worst_first:.2e}, {worst_second:.2e}")


def test_criterion_10_isotonic_beats_uncalibrated_feebee(corrupted_dataset):
    etas, scores, labels, root = corrupted_dataset
    E = estimate_bayes_error(etas) + 0.01
    iso = feebee_score(scores, labels, E=E, N=100, family="isotonic", seed=root.child(3))
    none = feebee_score(scores, labels, E=E, N=100, family="none", seed=root.child(3))
    ok = 0.0 <= iso.score < none.score
    _line(10, ok, f"isotonic score {iso.score:.4f} < uncalibrated score "
                  f"{none.score:.4f}, both >= 0")


def test_criterion_11_high_rank_agreement_preserves_estimate():
    sweep = order_break_sweep(MIX, [0.0, 1e-4, 1e-3, 0.01, 0.1], 2.0, 0.7,
                              10000, None, ["isotonic"], Seed(21))
    clean = sweep["clean_estimate"]
    high = [
        (tau, est)
        for tau, est in zip(sweep["tau"], sweep["methods"]["isotonic"]["estimates"])
        if tau >= 0.999
    ]
    worst = max(abs(est - clean) for _, est in high)
    exact = order_break_probability(0.95) == 0.025
    ok = len(high) >= 2 and worst <= 0.01 and exact
    _line(11, ok, f"{len(high)} sweep points with tau >= 0.999, worst "
                  f"|isotonic - clean| {worst:.4f} <= 0.01, "
                  f"order_break_probability(0.95) == 0.025 exactly: {exact}")


def _cli_payload(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    assert code == 0, f"command failed: {argv}"
    return re.sub(r'"created_utc": "[^"]*"', '"created_utc": null', out)


def test_criterion_12_cli_runs_are_byte_deterministic(tmp_path, capsys):
    base = str(tmp_path / "data")
    paired = f"{base}.paired.csv"
    commands = [
        ["gen", "--distribution", "gauss-mix", "--theta", "0.4", "--n", "400",
         "--corruption", "beta", "--a", "2", "--b", "0.7", "--m", "5",
         "--out", base, "--seed", "4", "--json"],
        ["estimate", "--input", paired, "--method", "isotonic", "--ci", "bca",
         "--resamples", "100", "--seed", "5", "--json"],
        ["bias-bound", "--m", "50", "--n", "10000", "--E", "0.0005", "--c", "0.4",
         "--delta", "0.05", "--json"],
        ["simulate-bias", "--distribution", "label-flip", "--nu", "0.1",
         "--m-list", "3,7", "--n", "200", "--repeats", "20", "--seed", "6", "--json"],
        ["feebee", "--input", paired, "--method", "isotonic,none", "--E", "0.1",
         "--N", "10", "--seed", "7", "--json"],
        ["order-break", "--theta", "0.4", "--n", "500", "--sigma-list", "0,0.01",
         "--seed", "8", "--json"],
    ]
    mismatched = []
    for argv in commands:
        first = _cli_payload(capsys, argv)
        second = _cli_payload(capsys, argv)
        if first != second:
            mismatched.append(argv[0])
    ok = not mismatched
    _line(12, ok, "all six subcommands byte-identical across repeat runs "
                  f"(timestamp line excluded); mismatches: {mismatched or 'none'}")
