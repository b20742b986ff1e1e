"""Batch command-line surface: simulate, fit, path, tune, evaluate, benchmark.

All CSV output uses '.' decimals, comma separators, LF line endings, UTF-8,
and floats serialized with 17 significant digits so a re-read is
bit-faithful.  Exit codes: 0 ok, 2 input error, 3 non-convergence.  The env
var SCC_THREADS caps the worker-pool size of tune/benchmark.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import admm, ama
from .bench import run_benchmark
from .extract import clustering_path, extract_clusters
from .metrics import fnr_fpr, rand_index
from .model import PenaltyConfig, SolverOptions, center_features, column_means
from .simulate import generate, setting_spec
from .tuning import StabilityConfig, tune_stability
from .weights import WeightConfig, adaptive_feature_factors, build_fusion_weights, rescale_fusion_weights

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NOT_CONVERGED = 3


class CLIInputError(Exception):
    pass


def _fmt(x):
    return format(float(x), ".17g")


def _open_out(path):
    return open(path, "w", encoding="utf-8", newline="\n")


def _write_matrix(path, M, header=None):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    with _open_out(path) as fh:
        if header:
            fh.write(",".join(header) + "\n")
        for row in M:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_lines(path, items):
    with _open_out(path) as fh:
        for item in items:
            fh.write(f"{item}\n")


def _write_json(path, obj):
    with _open_out(path) as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _read_matrix(path):
    rows = []
    expected = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            tokens = line.split(",")
            if lineno == 1:
                try:
                    rows.append([float(t) for t in tokens])
                except ValueError:
                    continue  # header line
                expected = len(tokens)
                continue
            try:
                vals = [float(t) for t in tokens]
            except ValueError as exc:
                raise CLIInputError(f"{path}: malformed CSV at line {lineno}: {exc}")
            if expected is None:
                expected = len(vals)
            elif len(vals) != expected:
                raise CLIInputError(
                    f"{path}: line {lineno} has {len(vals)} fields, expected {expected}")
            rows.append(vals)
    if not rows:
        raise CLIInputError(f"{path}: no data rows")
    return np.asarray(rows, dtype=float)


def _read_labels(path):
    labels = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                labels.append(int(float(line)))
            except ValueError:
                raise CLIInputError(f"{path}: malformed label at line {lineno}")
    if not labels:
        raise CLIInputError(f"{path}: no labels")
    return np.asarray(labels, dtype=int)


def _read_index_set(path):
    return set(int(v) for v in _read_labels(path))


def _outdir(args):
    out = args.output
    os.makedirs(out, exist_ok=True)
    return out


def _feature_header(p):
    return [f"f{j}" for j in range(1, p + 1)]


def cmd_simulate(args):
    spec = setting_spec(args.setting, seed=args.seed, n=args.n, p=args.p,
                        mu=args.mu, K=args.k)
    X, labels, informative = generate(spec)
    out = _outdir(args)
    _write_matrix(os.path.join(out, "data.csv"), X, header=_feature_header(spec.p))
    _write_lines(os.path.join(out, "labels.csv"), labels.tolist())
    _write_lines(os.path.join(out, "informative.csv"), sorted(informative))
    return EXIT_OK


def _prepare_fit_inputs(args, factor_gamma1):
    raw = _read_matrix(args.input)
    X = center_features(raw)
    means = column_means(raw)
    wcfg = WeightConfig(m=args.knn, phi=args.phi)
    graph = rescale_fusion_weights(build_fusion_weights(X, wcfg), X.p)
    nu = None if args.nu == "auto" else float(args.nu)
    opts = SolverOptions(tol=args.tol, max_iter=args.max_iter)
    factors = None
    if args.adaptive_factors:
        factors = adaptive_feature_factors(X, graph, factor_gamma1,
                                           args.algorithm, opts)
    return X, means, graph, nu, opts, factors


def cmd_fit(args):
    X, means, graph, nu, opts, factors = _prepare_fit_inputs(args, args.gamma1)
    cfg = PenaltyConfig(gamma1=args.gamma1, gamma2=args.gamma2, q=args.q,
                        nu=nu, feature_factors=factors)
    run = ama.run_sama if args.algorithm == "sama" else admm.run_sadmm
    fit = run(X, graph, cfg, opts)
    result = extract_clusters(fit.centers, graph, diagnostics=fit.diagnostics)
    out = _outdir(args)
    header = _feature_header(X.p)
    _write_matrix(os.path.join(out, "centers.csv"), fit.centers.values, header=header)
    if args.emit_raw_centers:
        _write_matrix(os.path.join(out, "centers_raw.csv"),
                      fit.centers.values + means, header=header)
    _write_lines(os.path.join(out, "assignments.csv"), result.assignment.tolist())
    _write_lines(os.path.join(out, "features.csv"), sorted(result.selected_features))
    diag = fit.diagnostics
    _write_json(os.path.join(out, "diagnostics.json"), {
        "algorithm": args.algorithm,
        "gamma1": args.gamma1,
        "gamma2": args.gamma2,
        "q": str(args.q),
        "nu": cfg.resolve_nu(X.n, args.algorithm),
        "iterations": diag.iterations,
        "converged": diag.converged,
        "objective": diag.objective,
        "residual": diag.residual,
        "rel_change": diag.rel_change,
        "num_clusters": result.num_clusters,
        "num_selected_features": len(result.selected_features),
    })
    return EXIT_OK if diag.converged else EXIT_NOT_CONVERGED


def _gamma1_grid(args):
    if args.gamma1_grid:
        try:
            grid = [float(t) for t in args.gamma1_grid.split(",") if t.strip()]
        except ValueError:
            raise CLIInputError(f"bad --gamma1-grid {args.gamma1_grid!r}")
    else:
        if args.gamma1_max <= 0 or args.gamma1_min < 0:
            raise CLIInputError("need 0 <= gamma1-min < gamma1-max")
        lo = max(args.gamma1_min, args.gamma1_max * 1e-6)
        grid = np.geomspace(lo, args.gamma1_max, args.gamma1_count).tolist()
        if args.gamma1_min == 0.0:
            grid[0] = 0.0
    if sorted(grid) != grid:
        raise CLIInputError("gamma1 grid must be ascending")
    return grid


def cmd_path(args):
    grid = _gamma1_grid(args)
    # Adaptive factors (if requested) are anchored at the middle grid point.
    X, means, graph, nu, opts, factors = _prepare_fit_inputs(
        args, grid[len(grid) // 2])
    cfg = PenaltyConfig(gamma1=0.0, gamma2=args.gamma2, q=args.q, nu=nu,
                        feature_factors=factors)
    results = clustering_path(X, graph, grid, cfg, solver=args.algorithm,
                              opts=opts)
    out = _outdir(args)
    with _open_out(os.path.join(out, "path.csv")) as fh:
        fh.write("gamma1,observation,feature,value\n")
        for g1, res in zip(grid, results):
            A = res.centers.values
            g1s = _fmt(g1)
            for i in range(A.shape[0]):
                row = A[i]
                for j in range(A.shape[1]):
                    fh.write(f"{g1s},{i + 1},{j + 1},{_fmt(row[j])}\n")
    with _open_out(os.path.join(out, "clusters.csv")) as fh:
        fh.write("gamma1,num_clusters\n")
        for g1, res in zip(grid, results):
            fh.write(f"{_fmt(g1)},{res.num_clusters}\n")
    if any(not r.diagnostics.converged for r in results):
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def cmd_tune(args):
    raw = _read_matrix(args.input)
    X = center_features(raw)
    try:
        with open(args.grid, "r", encoding="utf-8") as fh:
            grid = json.load(fh)
        g1 = [float(g) for g in grid["gamma1"]]
        g2 = [float(g) for g in grid["gamma2"]]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise CLIInputError(f"invalid grid JSON {args.grid}: {exc}")
    sc = StabilityConfig(gamma1_grid=tuple(g1), gamma2_grid=tuple(g2),
                         repetitions=args.bootstrap, rng_seed=args.seed)
    wcfg = WeightConfig(m=args.knn, phi=args.phi)
    opts = SolverOptions(tol=args.tol, max_iter=args.max_iter)
    g1_star, g2_star, surface = tune_stability(X, wcfg, sc, q=args.q,
                                               solver=args.algorithm, opts=opts)
    out = _outdir(args)
    with _open_out(os.path.join(out, "stability.csv")) as fh:
        fh.write("gamma1,gamma2,mean_stability,sd_stability\n")
        for row_g1, row_g2, mean, sd, _frac in surface:
            fh.write(f"{_fmt(row_g1)},{_fmt(row_g2)},{_fmt(mean)},{_fmt(sd)}\n")
    _write_json(os.path.join(out, "selected.json"),
                {"gamma1": g1_star, "gamma2": g2_star})
    return EXIT_OK


def cmd_evaluate(args):
    predicted = _read_labels(args.predicted)
    truth = _read_labels(args.truth)
    if predicted.size != truth.size:
        raise CLIInputError(
            f"label files differ in length: {predicted.size} vs {truth.size}")
    report = {"rand": rand_index(predicted, truth)}
    if args.selected or args.informative:
        if not (args.selected and args.informative and args.p):
            raise CLIInputError("feature evaluation needs --selected, --informative and --p")
        selected = _read_index_set(args.selected)
        informative = _read_index_set(args.informative)
        fnr, fpr = fnr_fpr(selected, informative, args.p)
        report["fnr"] = fnr
        report["fpr"] = fpr
    sys.stdout.write(json.dumps(report, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_benchmark(args):
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    if not methods:
        raise CLIInputError("no methods given")
    wcfg = WeightConfig(m=args.knn, phi=args.phi)
    opts = SolverOptions(tol=args.tol, max_iter=args.max_iter)
    per_rep, summary = run_benchmark(args.setting, args.reps, methods,
                                     args.seed, q=args.q, wcfg=wcfg, opts=opts,
                                     n=args.n, p=args.p, mu=args.mu)
    out = _outdir(args)
    with _open_out(os.path.join(out, "benchmark.csv")) as fh:
        fh.write("method,rand_mean,rand_sd,fnr_mean,fnr_sd,fpr_mean,fpr_sd\n")
        for method in methods:
            s = summary[method]
            fh.write(",".join([method] + [_fmt(s[k]) for k in (
                "rand_mean", "rand_sd", "fnr_mean", "fnr_sd",
                "fpr_mean", "fpr_sd")]) + "\n")
    with _open_out(os.path.join(out, "benchmark_reps.csv")) as fh:
        fh.write("rep,method,rand,fnr,fpr,gamma1,gamma2,num_clusters\n")
        for rep, rows in enumerate(per_rep):
            for r in rows:
                fh.write(f"{rep},{r.method},{_fmt(r.rand)},{_fmt(r.fnr)},"
                         f"{_fmt(r.fpr)},{_fmt(r.gamma1)},{_fmt(r.gamma2)},"
                         f"{r.num_clusters}\n")
    return EXIT_OK


def _add_common_fit_flags(p):
    p.add_argument("--input", required=True, help="input data CSV (rows = observations)")
    p.add_argument("--algorithm", choices=["sama", "sadmm"], default="sama")
    p.add_argument("--q", default="2", help="fusion norm: 1, 2 or inf")
    p.add_argument("--knn", type=int, default=5, help="nearest-neighbor count m")
    p.add_argument("--phi", type=float, default=0.5, help="Gaussian kernel bandwidth")
    p.add_argument("--nu", default="auto", help="augmented-Lagrangian constant or 'auto'")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=10_000)
    p.add_argument("--adaptive-factors", action="store_true",
                   help="compute adaptive group-lasso factors from a pilot fit")
    p.add_argument("--output", default=".", help="output directory")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sparseclust",
        description="Sparse convex clustering: simultaneous clustering and feature selection.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a benchmark dataset")
    p.add_argument("--setting", type=int, required=True, choices=[1, 2, 3, 4, 5])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--output", default=".")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="fit sparse convex clustering at one (gamma1, gamma2)")
    _add_common_fit_flags(p)
    p.add_argument("--gamma1", type=float, required=True)
    p.add_argument("--gamma2", type=float, required=True)
    p.add_argument("--emit-raw-centers", action="store_true",
                   help="also write centers with column means added back")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("path", help="clustering path over a gamma1 grid")
    _add_common_fit_flags(p)
    p.add_argument("--gamma2", type=float, default=0.0)
    p.add_argument("--gamma1-grid", default=None, help="comma-separated ascending grid")
    p.add_argument("--gamma1-min", type=float, default=0.0)
    p.add_argument("--gamma1-max", type=float, default=1.0)
    p.add_argument("--gamma1-count", type=int, default=10)
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("tune", help="stability-selection tuning of (gamma1, gamma2)")
    _add_common_fit_flags(p)
    p.add_argument("--grid", required=True, help="JSON file with gamma1/gamma2 arrays")
    p.add_argument("--bootstrap", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("evaluate", help="clustering and selection metrics")
    p.add_argument("--predicted", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--selected", default=None)
    p.add_argument("--informative", default=None)
    p.add_argument("--p", type=int, default=None)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("benchmark", help="simulation benchmark with validation tuning")
    p.add_argument("--setting", type=int, required=True, choices=[1, 2, 3, 4, 5])
    p.add_argument("--reps", type=int, default=20)
    p.add_argument("--methods", default="kmeans,ama,sama")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--q", default="2")
    p.add_argument("--knn", type=int, default=5)
    p.add_argument("--phi", type=float, default=0.5)
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--max-iter", type=int, default=4000)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--output", default=".")
    p.set_defaults(func=cmd_benchmark)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CLIInputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except (ValueError, OSError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
