"""Command line interface.

Six subcommands: estimate (point estimate plus optional bootstrap CI from a
dataset file), bias-bound (every bias bound computable from the given
inputs), gen (synthetic dataset files), simulate-bias (the hard-label bias
study over a list of m values), feebee (noise-sweep scores per calibration
method), and order-break (estimates and Kendall tau under increasing
logit-scale noise).

Reports print as JSON on stdout with a fixed field order; --out additionally
writes the same JSON to a file. Long-running commands note progress on
stderr; --json silences that so stdout-plus-stderr is pure machine output.
Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict
from typing import Any, Callable

import numpy as np

from . import __version__
from .bounds import (
    BiasBoundReport,
    baseline_bias_bound,
    computable_bias_bound,
    consistency_bound,
    curvature_bias_bound,
    separated_bias_bound,
)
from .calibration import BETA_VARIANTS, calibrate_and_estimate
from .datafiles import (
    build_report,
    file_digest,
    read_dataset,
    render_report,
    write_counts,
    write_paired,
    write_report,
    write_soft,
)
from .errors import DataError, DomainError, FitError
from .estimator import EstimateReport, estimate_bayes_error, soft_from_hard
from .evaluation import (
    bootstrap_ci,
    feebee_score,
    fit_loglog_slope,
    kendall_tau,
    order_break_probability,
)
from .rng import Seed, as_seed
from .synthdata import (
    CorruptionSpec,
    GaussianMixtureSpec,
    corrupted_hard_label_pipeline,
    label_flip_posteriors,
    logit_gaussian_corruption,
    sample_gaussian_mixture,
    sample_hard_labels,
)

CALIBRATION_METHODS = ("isotonic",) + BETA_VARIANTS + ("platt",)
PLAIN_METHODS = ("clean", "hard", "corrupted")


class UsageError(Exception):
    """Bad flag values or a missing required combination."""


def _parse_floats(text: str, flag: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise UsageError(f"{flag} expects comma-separated numbers, got '{text}'") from None


def _parse_ints(text: str, flag: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part != ""]
    except ValueError:
        raise UsageError(f"{flag} expects comma-separated integers, got '{text}'") from None


def _check_method(method: str) -> None:
    if method in PLAIN_METHODS or method in CALIBRATION_METHODS or method == "none":
        return
    if method.startswith("hist-") and method[len("hist-"):].isdigit():
        return
    if method in ("hist", "histogram"):
        return
    raise UsageError(
        f"unknown method '{method}'; choose from {PLAIN_METHODS + CALIBRATION_METHODS}, "
        "hist-<bins>, or none"
    )


def _progress(args: argparse.Namespace, message: str) -> None:
    if not args.json:
        print(message, file=sys.stderr)


def _report_to_dict(report: EstimateReport) -> dict[str, Any]:
    doc = asdict(report)
    doc["flags"] = list(doc["flags"])
    if doc["ci"] is not None:
        doc["ci"]["flags"] = list(doc["ci"]["flags"])
    return doc


# ---------------------------------------------------------------- estimate


def _estimate_pipeline(
    data: dict[str, np.ndarray], method: str, bins: int | None
) -> tuple[EstimateReport, Callable[[np.ndarray], float], int]:
    """Point estimate report, bootstrap statistic, and row count."""
    if method in ("clean", "corrupted"):
        if "eta" in data:
            values = data["eta"]
        elif "eta_tilde" in data:
            values = data["eta_tilde"]
        else:
            raise UsageError(f"method '{method}' needs a soft or paired dataset")
        report = EstimateReport(
            point_estimate=estimate_bayes_error(values),
            method=method,
            n=values.size,
        )
        return report, lambda idx: estimate_bayes_error(values[idx]), values.size

    if method == "hard":
        if "pos" not in data:
            raise UsageError("method 'hard' needs a counts dataset")
        pos, total = data["pos"], data["total"]
        report = EstimateReport(
            point_estimate=estimate_bayes_error(soft_from_hard(pos, total)),
            method="hard",
            n=pos.size,
        )

        def hard_statistic(idx: np.ndarray) -> float:
            return estimate_bayes_error(soft_from_hard(pos[idx], total[idx]))

        return report, hard_statistic, pos.size

    if "eta_tilde" not in data:
        raise UsageError(f"method '{method}' needs a paired dataset")
    scores, labels = data["eta_tilde"], data["y"]
    report = calibrate_and_estimate(scores, labels, method, bins=bins)

    def calibrated_statistic(idx: np.ndarray) -> float:
        return calibrate_and_estimate(scores[idx], labels[idx], method, bins=bins).point_estimate

    return report, calibrated_statistic, scores.size


def cmd_estimate(args: argparse.Namespace) -> dict[str, Any]:
    _check_method(args.method)
    if args.method in ("hist", "histogram") and args.bins is None:
        raise UsageError("method 'hist' needs --bins")
    if args.resamples < 2:
        raise UsageError(f"--resamples must be at least 2, got {args.resamples}")
    if not (0.0 < args.level < 1.0):
        raise UsageError(f"--level must lie in (0, 1), got {args.level}")
    data = read_dataset(args.input, args.format)
    report, statistic, n = _estimate_pipeline(data, args.method, args.bins)
    ci = None
    if args.ci is not None:
        ci = bootstrap_ci(
            n,
            statistic,
            resamples=args.resamples,
            level=args.level,
            method=args.ci,
            seed=args.seed,
        )
        report = EstimateReport(
            point_estimate=report.point_estimate,
            method=report.method,
            n=report.n,
            ci=ci,
            parameters=report.parameters,
            flags=report.flags,
        )
    return build_report(
        command="estimate",
        seed=args.seed,
        parameters={
            "input": args.input,
            "format": args.format,
            "method": args.method,
            "bins": args.bins,
            "ci": args.ci,
            "resamples": args.resamples if args.ci else None,
            "level": args.level if args.ci else None,
        },
        inputs={args.input: file_digest(args.input)},
        results={"estimate": _report_to_dict(report)},
    )


# -------------------------------------------------------------- bias-bound


def cmd_bias_bound(args: argparse.Namespace) -> dict[str, Any]:
    if args.m is None:
        raise UsageError("bias bounds need --m, the number of hard labels per instance")
    if args.m < 1:
        raise UsageError(f"--m must be at least 1, got {args.m}")
    for name, value, low, high in (
        ("--E", args.E, 0.0, 0.5),
        ("--c", args.c, 0.0, 0.5),
    ):
        if value is not None and not (low < value <= high):
            raise UsageError(f"{name} must lie in ({low}, {high}], got {value}")
    if args.delta is not None and not (0.0 < args.delta < 1.0):
        raise UsageError(f"--delta must lie in (0, 1), got {args.delta}")
    if args.n is not None and args.n < 1:
        raise UsageError(f"--n must be at least 1, got {args.n}")

    soft = None
    inputs: dict[str, str] = {}
    if args.input is not None:
        soft = read_dataset(args.input, "soft")["eta"]
        inputs[args.input] = file_digest(args.input)
    n = args.n if args.n is not None else (soft.size if soft is not None else None)

    if soft is None and args.E is None and args.c is None and n is None:
        raise UsageError(
            "nothing to compute: the curvature bound needs a soft file, the computable "
            "bound needs --E, the separated bound needs --c, and the baseline bound needs --n"
        )

    report = BiasBoundReport(
        parameters={"n": n, "m": args.m, "E": args.E, "c": args.c, "delta": args.delta},
        curvature_bound=curvature_bias_bound(soft, args.m) if soft is not None else None,
        separated_bound=separated_bias_bound(args.c, args.m) if args.c is not None else None,
        computable_bound=computable_bias_bound(args.E, args.m) if args.E is not None else None,
        baseline_bound=baseline_bias_bound(n, args.m) if n is not None else None,
        consistency=(
            consistency_bound(n, args.m, args.delta, args.c)
            if n is not None and args.delta is not None
            else None
        ),
    )
    doc = asdict(report)
    if report.computable_bound is not None:
        doc["computable_bound"] = {
            "value": report.computable_bound.value,
            "argmin_t": report.computable_bound.argmin_t,
        }
    return build_report(
        command="bias-bound",
        seed=None,
        parameters=doc.pop("parameters"),
        inputs=inputs,
        results=doc,
    )


# --------------------------------------------------------------------- gen


def _corruption_from_args(args: argparse.Namespace) -> CorruptionSpec | None:
    if args.corruption is None:
        return None
    try:
        return CorruptionSpec(
            kind=args.corruption,
            a=args.a if args.a is not None else 1.0,
            b=args.b if args.b is not None else 0.5,
            sigma=args.sigma if args.sigma is not None else 0.0,
        )
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def _mixture_from_args(args: argparse.Namespace) -> GaussianMixtureSpec:
    try:
        return GaussianMixtureSpec(
            theta=args.theta,
            mu0=tuple(_parse_floats(args.mu0, "--mu0")),
            mu1=tuple(_parse_floats(args.mu1, "--mu1")),
            scale=args.scale,
        )
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def cmd_gen(args: argparse.Namespace) -> dict[str, Any]:
    if args.n < 1:
        raise UsageError(f"--n must be at least 1, got {args.n}")
    if args.m is not None and args.m < 1:
        raise UsageError(f"--m must be at least 1, got {args.m}")
    corruption = _corruption_from_args(args)
    seed = Seed(args.seed)

    if args.distribution == "gauss-mix":
        spec = _mixture_from_args(args)
        etas, _ = sample_gaussian_mixture(spec, args.n, seed.child(0))
        exact = None
        dist_params: dict[str, Any] = {
            "theta": spec.theta,
            "mu0": list(spec.mu0),
            "mu1": list(spec.mu1),
            "scale": spec.scale,
        }
    else:
        try:
            etas = label_flip_posteriors(args.nu, args.n, seed.child(0))
        except DomainError as exc:
            raise UsageError(str(exc)) from exc
        exact = min(args.nu, 1.0 - args.nu)
        dist_params = {"nu": args.nu}

    files: dict[str, dict[str, Any]] = {}

    def record(kind: str, path: str, rows: int) -> None:
        files[kind] = {"path": path, "rows": rows, "sha256": file_digest(path)}

    soft_path = f"{args.out}.soft.csv"
    write_soft(soft_path, etas)
    record("soft", soft_path, args.n)

    if args.m is not None:
        counts = sample_hard_labels(etas, args.m, seed.child(1))
        counts_path = f"{args.out}.counts.csv"
        write_counts(counts_path, counts, args.m)
        record("counts", counts_path, args.n)

    if corruption is not None:
        scores, labels = corrupted_hard_label_pipeline(etas, corruption, args.m, seed.child(2))
        paired_path = f"{args.out}.paired.csv"
        write_paired(paired_path, scores, labels)
        record("paired", paired_path, args.n)

    return build_report(
        command="gen",
        seed=args.seed,
        parameters={
            "distribution": args.distribution,
            **dist_params,
            "corruption": None if corruption is None else asdict(corruption),
            "m": args.m,
            "n": args.n,
            "out": args.out,
        },
        inputs={},
        results={
            "files": files,
            "clean_estimate": estimate_bayes_error(etas),
            "exact_bayes_error": exact,
        },
    )


# ----------------------------------------------------------- simulate-bias


def bias_simulation(
    sampler: Callable[[int, Seed], np.ndarray],
    m_list: list[int],
    n: int,
    repeats: int,
    seed: int,
    *,
    known_c: float | None = None,
    bound_sample_size: int = 20000,
    on_progress: Callable[[str], None] | None = None,
) -> dict[str, Any]:
    """Bias of the m-averaged hard-label estimate, per m.

    For each m, `repeats` rounds each draw n posteriors, annotate them with
    m hard labels, and record the estimate minus the same round's clean
    estimate. The paired difference removes the shared sampling noise, so
    its mean is the empirical bias and its standard error is honest. The
    curvature bound is evaluated once per m on a separate posterior sample
    of `bound_sample_size`; the separated bound is attached when the
    distribution's separation `known_c` is known. The fitted log-log slope
    of |bias| against m summarizes the decay rate.
    """
    if not m_list or any(m < 1 for m in m_list):
        raise DomainError("the m list must be nonempty with every m >= 1")
    if n < 1 or repeats < 2:
        raise DomainError("need n >= 1 and repeats >= 2")
    root = as_seed(seed)
    bound_sample = sampler(bound_sample_size, root.child(0))

    rows: list[dict[str, Any]] = []
    for mi, m in enumerate(m_list):
        diffs = np.empty(repeats)
        estimates = np.empty(repeats)
        for r in range(repeats):
            base = root.child(1 + mi * repeats + r)
            etas = sampler(n, base.child(0))
            counts = sample_hard_labels(etas, m, base.child(1))
            estimates[r] = estimate_bayes_error(counts / m)
            diffs[r] = estimates[r] - estimate_bayes_error(etas)
        bias = float(diffs.mean())
        stderr = float(diffs.std(ddof=1) / np.sqrt(repeats))
        row = {
            "m": m,
            "mean_estimate": float(estimates.mean()),
            "bias": bias,
            "abs_bias": abs(bias),
            "stderr": stderr,
            "curvature_bound": curvature_bias_bound(bound_sample, m),
        }
        if known_c is not None:
            row["separated_bound"] = separated_bias_bound(known_c, m)
        rows.append(row)
        if on_progress is not None:
            on_progress(f"m={m}: bias={bias:.3e} stderr={stderr:.1e}")

    slope = None
    if len(rows) >= 2 and all(row["abs_bias"] > 0.0 for row in rows):
        fit = fit_loglog_slope([row["m"] for row in rows], [row["abs_bias"] for row in rows])
        slope = {"slope": fit.slope, "intercept": fit.intercept}
    return {
        "n": n,
        "repeats": repeats,
        "rows": rows,
        "slope": slope,
        "plot": {
            "x": [row["m"] for row in rows],
            "y": [row["abs_bias"] for row in rows],
            "y_bound": [row["curvature_bound"] for row in rows],
        },
    }


def cmd_simulate_bias(args: argparse.Namespace) -> dict[str, Any]:
    m_list = _parse_ints(args.m_list, "--m-list")
    if not m_list or any(m < 1 for m in m_list):
        raise UsageError("--m-list needs integers >= 1")
    if args.n < 1:
        raise UsageError(f"--n must be at least 1, got {args.n}")
    if args.repeats < 2:
        raise UsageError(f"--repeats must be at least 2, got {args.repeats}")

    known_c = None
    if args.distribution == "gauss-mix":
        spec = _mixture_from_args(args)

        def sampler(n: int, s: Seed) -> np.ndarray:
            return sample_gaussian_mixture(spec, n, s)[0]

        dist_params: dict[str, Any] = {
            "theta": spec.theta,
            "mu0": list(spec.mu0),
            "mu1": list(spec.mu1),
            "scale": spec.scale,
        }
    else:
        if not (0.0 <= args.nu <= 1.0) or args.nu == 0.5:
            raise UsageError(f"--nu must lie in [0, 1] and differ from 1/2, got {args.nu}")
        nu = args.nu

        def sampler(n: int, s: Seed) -> np.ndarray:
            return label_flip_posteriors(nu, n, s)

        known_c = abs(nu - 0.5)
        dist_params = {"nu": nu}

    results = bias_simulation(
        sampler,
        m_list,
        args.n,
        args.repeats,
        args.seed,
        known_c=known_c,
        on_progress=lambda msg: _progress(args, msg),
    )
    return build_report(
        command="simulate-bias",
        seed=args.seed,
        parameters={
            "distribution": args.distribution,
            **dist_params,
            "m_list": m_list,
            "n": args.n,
            "repeats": args.repeats,
        },
        inputs={},
        results=results,
    )


# ------------------------------------------------------------------ feebee


def cmd_feebee(args: argparse.Namespace) -> dict[str, Any]:
    methods = [m for m in args.method.split(",") if m]
    if not methods:
        raise UsageError("--method needs at least one method name")
    for method in methods:
        _check_method(method)
        if method in PLAIN_METHODS:
            raise UsageError(
                f"feebee scores calibration families (or 'none'), not '{method}'"
            )
        if method in ("hist", "histogram") and args.bins is None:
            raise UsageError("method 'hist' needs --bins")
    if args.E is None:
        raise UsageError("feebee needs --E, the assumed Bayes error cap")
    if not (0.0 <= args.E <= 0.5):
        raise UsageError(f"--E must lie in [0, 1/2], got {args.E}")
    if args.N < 1:
        raise UsageError(f"--N must be at least 1, got {args.N}")

    data = read_dataset(args.input, "paired")
    scores, labels = data["eta_tilde"], data["y"]
    reports = {}
    for method in methods:
        feebee = feebee_score(
            scores, labels, method, args.E, N=args.N, seed=args.seed, bins=args.bins
        )
        doc = asdict(feebee)
        for key in ("rho", "estimates", "lower", "upper", "penalties"):
            doc[key] = list(doc[key])
        doc["plot"] = {
            "x": doc["rho"],
            "y": doc["estimates"],
            "y_lo": doc["lower"],
            "y_hi": doc["upper"],
        }
        reports[method] = doc
        _progress(args, f"{method}: score={feebee.score:.6f}")

    table = sorted(
        ({"method": m, "score": reports[m]["score"]} for m in methods),
        key=lambda row: row["score"],
    )
    return build_report(
        command="feebee",
        seed=args.seed,
        parameters={
            "input": args.input,
            "method": methods,
            "E": args.E,
            "N": args.N,
            "bins": args.bins,
        },
        inputs={args.input: file_digest(args.input)},
        results={"table": table, "reports": reports},
    )


# ------------------------------------------------------------- order-break


def order_break_sweep(
    spec: GaussianMixtureSpec,
    sigma_list: list[float],
    a: float,
    b: float,
    n: int,
    m: int | None,
    methods: list[str],
    seed: int,
    *,
    bins: int | None = None,
    on_progress: Callable[[str], None] | None = None,
) -> dict[str, Any]:
    """Estimates and rank damage under growing logit-scale score noise.

    One posterior sample and one hard-label draw are shared across the
    sweep; each sigma gets its own corruption-noise stream (and annotation
    stream when m is given). Kendall's tau is measured between the clean
    posteriors and the corrupted ones, before any hard-label averaging.
    """
    if n < 2:
        raise DomainError("the sweep needs n >= 2")
    if any(s < 0.0 for s in sigma_list) or not sigma_list:
        raise DomainError("the sigma list must be nonempty and nonnegative")
    root = as_seed(seed)
    etas, _ = sample_gaussian_mixture(spec, n, root.child(0))
    labels = (root.child(1).generator().random(n) < etas).astype(np.int64)
    clean = estimate_bayes_error(etas)

    taus: list[float] = []
    estimates: dict[str, list[float]] = {method: [] for method in methods}
    for j, sigma in enumerate(sigma_list):
        base = root.child(2 + j)
        corrupted = logit_gaussian_corruption(etas, a, b, sigma, base.child(0))
        taus.append(kendall_tau(etas, corrupted))
        if m is None:
            scores = corrupted
        else:
            scores = sample_hard_labels(corrupted, m, base.child(1)) / m
        for method in methods:
            estimates[method].append(
                calibrate_and_estimate(scores, labels, method, bins=bins).point_estimate
            )
        if on_progress is not None:
            on_progress(f"sigma={sigma:g}: tau={taus[-1]:.6f}")

    return {
        "clean_estimate": clean,
        "sigma": list(sigma_list),
        "tau": taus,
        "break_probability": [order_break_probability(t) for t in taus],
        "methods": {method: {"estimates": estimates[method]} for method in methods},
        "plot": {"x": list(sigma_list), "tau": taus, **{m_: estimates[m_] for m_ in methods}},
    }


def cmd_order_break(args: argparse.Namespace) -> dict[str, Any]:
    sigma_list = _parse_floats(args.sigma_list, "--sigma-list")
    if not sigma_list or any(s < 0.0 for s in sigma_list):
        raise UsageError("--sigma-list needs nonnegative numbers")
    methods = [m for m in args.method.split(",") if m]
    if not methods:
        raise UsageError("--method needs at least one method name")
    for method in methods:
        _check_method(method)
        if method in PLAIN_METHODS:
            raise UsageError(f"order-break evaluates calibration families, not '{method}'")
        if method in ("hist", "histogram") and args.bins is None:
            raise UsageError("method 'hist' needs --bins")
    if args.n < 2:
        raise UsageError(f"--n must be at least 2, got {args.n}")
    if args.m is not None and args.m < 1:
        raise UsageError(f"--m must be at least 1, got {args.m}")
    if args.a is not None and args.a <= 0.0:
        raise UsageError(f"--a must be positive, got {args.a}")
    if args.b is not None and not (0.0 < args.b < 1.0):
        raise UsageError(f"--b must lie in (0, 1), got {args.b}")
    spec = _mixture_from_args(args)
    a = args.a if args.a is not None else 2.0
    b = args.b if args.b is not None else 0.7

    results = order_break_sweep(
        spec,
        sigma_list,
        a,
        b,
        args.n,
        args.m,
        methods,
        args.seed,
        bins=args.bins,
        on_progress=lambda msg: _progress(args, msg),
    )
    return build_report(
        command="order-break",
        seed=args.seed,
        parameters={
            "theta": spec.theta,
            "mu0": list(spec.mu0),
            "mu1": list(spec.mu1),
            "scale": spec.scale,
            "a": a,
            "b": b,
            "sigma_list": sigma_list,
            "n": args.n,
            "m": args.m,
            "method": methods,
        },
        inputs={},
        results=results,
    )


# -------------------------------------------------------------- the parser


def _add_mixture_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--theta", type=float, default=0.5, help="class-1 prior")
    parser.add_argument("--mu0", type=str, default="0,0", help="class-0 mean, comma-separated")
    parser.add_argument("--mu1", type=str, default="2,2", help="class-1 mean, comma-separated")
    parser.add_argument("--scale", type=float, default=1.0, help="isotropic variance scale")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bayeserr",
        description="Bayes error estimation from clean, averaged, or corrupted soft labels",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, *, seed: bool = True) -> None:
        if seed:
            p.add_argument("--seed", type=int, default=0, help="root seed (default 0)")
        p.add_argument("--out", type=str, default=None, help="also write the JSON report here")
        p.add_argument("--json", action="store_true", help="suppress progress output on stderr")

    pe = sub.add_parser("estimate", help="estimate the Bayes error from a dataset file")
    pe.add_argument("--input", type=str, required=True, help="dataset CSV")
    pe.add_argument("--format", choices=["soft", "counts", "paired"], default=None,
                    help="dataset layout (default: infer from the header)")
    pe.add_argument("--method", type=str, default="clean",
                    help="clean | hard | corrupted | isotonic | hist-<B> | beta | beta-am | "
                         "beta-ab | beta-a | platt")
    pe.add_argument("--bins", type=int, default=None, help="bin count for method 'hist'")
    pe.add_argument("--ci", nargs="?", const="bca", choices=["percentile", "bca"], default=None,
                    help="add a bootstrap CI (default method bca)")
    pe.add_argument("--resamples", type=int, default=1000, help="bootstrap resamples (default 1000)")
    pe.add_argument("--level", type=float, default=0.95, help="CI level (default 0.95)")
    common(pe)
    pe.set_defaults(func=cmd_estimate)

    pb = sub.add_parser("bias-bound", help="bias bounds for m-averaged hard labels")
    pb.add_argument("--m", type=int, required=True, help="hard labels per instance")
    pb.add_argument("--n", type=int, default=None, help="dataset size (baseline bound)")
    pb.add_argument("--E", type=float, default=None, help="Bayes error cap (computable bound)")
    pb.add_argument("--c", type=float, default=None, help="posterior separation (separated bound)")
    pb.add_argument("--delta", type=float, default=None, help="failure probability (consistency bound)")
    pb.add_argument("--input", type=str, default=None, help="soft dataset for the curvature bound")
    common(pb, seed=False)
    pb.set_defaults(func=cmd_bias_bound, seed=None)

    pg = sub.add_parser("gen", help="generate synthetic dataset files")
    pg.add_argument("--distribution", choices=["gauss-mix", "label-flip"], required=True)
    pg.add_argument("--n", type=int, required=True, help="instances")
    _add_mixture_flags(pg)
    pg.add_argument("--nu", type=float, default=0.1, help="label-flip rate")
    pg.add_argument("--corruption", choices=["identity", "beta", "logit-gaussian"], default=None,
                    help="write a paired file corrupted this way")
    pg.add_argument("--a", type=float, default=None, help="corruption exponent")
    pg.add_argument("--b", type=float, default=None, help="corruption midpoint")
    pg.add_argument("--sigma", type=float, default=None, help="logit-gaussian noise level")
    pg.add_argument("--m", type=int, default=None, help="hard labels per instance")
    pg.add_argument("--out", type=str, required=True, help="output path prefix")
    pg.add_argument("--seed", type=int, default=0, help="root seed (default 0)")
    pg.add_argument("--json", action="store_true", help="suppress progress output on stderr")
    pg.set_defaults(func=cmd_gen)

    ps = sub.add_parser("simulate-bias", help="bias of the m-averaged estimate, per m")
    ps.add_argument("--distribution", choices=["gauss-mix", "label-flip"], required=True)
    _add_mixture_flags(ps)
    ps.add_argument("--nu", type=float, default=0.1, help="label-flip rate")
    ps.add_argument("--m-list", type=str, default="10,25,50,100,250,500,1000")
    ps.add_argument("--n", type=int, default=2000, help="instances per round (default 2000)")
    ps.add_argument("--repeats", type=int, default=200, help="rounds per m (default 200)")
    common(ps)
    ps.set_defaults(func=cmd_simulate_bias)

    pf = sub.add_parser("feebee", help="noise-sweep scores for calibration methods")
    pf.add_argument("--input", type=str, required=True, help="paired dataset CSV")
    pf.add_argument("--method", type=str, default="isotonic",
                    help="comma-separated calibration families (or 'none')")
    pf.add_argument("--E", type=float, default=None, help="assumed Bayes error cap")
    pf.add_argument("--N", type=int, default=100, help="grid resolution (default 100)")
    pf.add_argument("--bins", type=int, default=None, help="bin count for method 'hist'")
    common(pf)
    pf.set_defaults(func=cmd_feebee)

    po = sub.add_parser("order-break", help="estimates under growing logit-scale noise")
    _add_mixture_flags(po)
    po.add_argument("--a", type=float, default=None, help="base corruption exponent (default 2)")
    po.add_argument("--b", type=float, default=None, help="base corruption midpoint (default 0.7)")
    po.add_argument("--sigma-list", type=str, default="0,0.0001,0.001,0.01,0.1,0.3,1")
    po.add_argument("--n", type=int, default=10000, help="instances (default 10000)")
    po.add_argument("--m", type=int, default=None, help="average m hard annotations per score")
    po.add_argument("--method", type=str, default="isotonic",
                    help="comma-separated calibration families (or 'none')")
    po.add_argument("--bins", type=int, default=None, help="bin count for method 'hist'")
    common(po)
    po.set_defaults(func=cmd_order_break)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except DomainError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except FitError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 4
    sys.stdout.write(render_report(report))
    if args.out is not None:
        write_report(report, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
