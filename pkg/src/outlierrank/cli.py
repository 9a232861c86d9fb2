"""Command-line interface: every computation as CSV or JSON tables.

Each table starts with one ``#`` metadata line naming the schema version and
the parameters. When output goes to a file, a ``<file>.manifest.json`` sidecar
records the run (see ``schemas/manifest.schema.json``).

Exit codes: 0 success, 2 usage or input error, 3 numerical-integrity failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .classical import (
    GammaRaceModel,
    Ranking,
    TaylorConfig,
    exp_rank_prob,
    gamma_outlier_to_normal,
    gamma_rank_prob,
    gumbel_rank_prob,
    normal_rank_prob_quadrature,
    taylor_rank_prob,
)
from .errors import NumericalIntegrityError, OutlierRankError, PatternError
from .latent import LatentSuccessLaw, OutlierModel, beta_surrogate, z_cdf, z_density, z_variance
from .metrics import w1_discrete, w2_surrogate_map
from .montecarlo import SimConfig, sample_z, simulate_outlier_ranks, simulate_rankings
from .ranks import (
    JointRankQuery,
    extreme_probs,
    in_group_marginal,
    joint_prob,
    r0_pmf_exact,
    r0_pmf_surrogate,
    rank_moments,
)

CSV_SCHEMA = "outlierrank-csv/1"
JSON_SCHEMA = "outlierrank-json/1"
MANIFEST_SCHEMA = "outlierrank-manifest/1"
OUTPUT_DIR_ENV = "OUTLIERRANK_OUTPUT_DIR"


class UsageError(Exception):
    pass


class Table:
    def __init__(self, columns, rows, extra=None):
        self.columns = list(columns)
        self.rows = [list(r) for r in rows]
        self.extra = dict(extra or {})


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def render(table: Table, subcommand: str, params: dict, fmt: str) -> str:
    if fmt == "json":
        doc = {
            "schema": JSON_SCHEMA,
            "subcommand": subcommand,
            "parameters": params,
            **table.extra,
            "columns": table.columns,
            "rows": table.rows,
        }
        return json.dumps(_jsonable(doc), indent=2) + "\n"
    meta = {**params, **table.extra}
    head = " ".join(f"{k}={_fmt(v) if not isinstance(v, (list, tuple)) else ','.join(map(_fmt, v))}" for k, v in meta.items())
    buf = io.StringIO()
    buf.write(f"# {CSV_SCHEMA} subcommand={subcommand} {head}".rstrip() + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _destination(args, subcommand):
    if args.output and args.output != "-":
        return Path(args.output)
    if args.output == "-":
        return None
    root = os.environ.get(OUTPUT_DIR_ENV)
    if root:
        return Path(root) / f"{subcommand}.{args.format}"
    return None


def write_manifest(path: Path, subcommand, params, seed, duration):
    manifest = {
        "schema": MANIFEST_SCHEMA,
        "subcommand": subcommand,
        "parameters": _jsonable(params),
        "outputs": [str(path)],
        "seed": seed,
        "version": __version__,
        "duration_seconds": duration,
    }
    side = path.with_name(path.name + ".manifest.json")
    side.write_text(json.dumps(manifest, indent=2) + "\n")
    return side


# ---------------------------------------------------------------- arguments


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_model_args(p, n_required=True):
    p.add_argument("--n", type=int, required=n_required, help="in-group size")
    g = p.add_argument_group("standardized parameters")
    g.add_argument("--rho", type=float, help="sigma / sigma0")
    g.add_argument("--delta", type=float, help="(mu - mu0) / sigma0")
    r = p.add_argument_group("raw parameters")
    r.add_argument("--mu0", type=float)
    r.add_argument("--sigma0", type=float)
    r.add_argument("--mu", type=float)
    r.add_argument("--sigma", type=float)


def _model(args, n=None) -> OutlierModel:
    std = [args.rho, args.delta]
    raw = [args.mu0, args.sigma0, args.mu, args.sigma]
    n = args.n if n is None else n
    has_std = any(v is not None for v in std)
    has_raw = any(v is not None for v in raw)
    if has_std and has_raw:
        raise UsageError("give either --rho/--delta or --mu0/--sigma0/--mu/--sigma, not both")
    if has_std:
        if None in std:
            raise UsageError("--rho and --delta must be given together")
        return OutlierModel.standardized(args.rho, args.delta, n)
    if has_raw:
        if args.mu0 is None or args.mu is None:
            raise UsageError("raw parameters need at least --mu0 and --mu")
        return OutlierModel(
            args.mu0, 1.0 if args.sigma0 is None else args.sigma0, args.mu, 1.0 if args.sigma is None else args.sigma, n
        )
    raise UsageError("model parameters are required")


def _model_params(model: OutlierModel):
    return {"n": model.n, "rho": model.rho, "delta": model.delta}


def _grid(lo, hi, step):
    if step <= 0:
        raise UsageError("step must be positive")
    k = int(math.floor((hi - lo) / step + 1e-9))
    return [round(lo + i * step, 10) for i in range(k + 1)]


# ---------------------------------------------------------------- commands


def cmd_rank_pmf(args):
    model = _model(args)
    methods = ["surrogate", "exact", "mc"] if args.method == "all" else [args.method]
    if args.method == "all" and args.reps == 0:
        methods.remove("mc")
    rows, extra = [], {}
    for m in methods:
        if m == "surrogate":
            pmf = r0_pmf_surrogate(model)
        elif m == "exact":
            pmf = r0_pmf_exact(model, scheme=args.scheme)
            extra["exact_raw_sum"] = pmf.raw_sum
        else:
            track = (1,) if args.rank_of == "in-group" else ()
            table = simulate_outlier_ranks(SimConfig(args.reps, args.seed, model), track=track)
            probs = table.in_group_marginal(1) / table.replications if track else table.frequencies()
            rows.extend([k, float(p), "monte-carlo"] for k, p in enumerate(probs, start=1))
            continue
        probs = in_group_marginal(pmf) if args.rank_of == "in-group" else pmf.probs
        rows.extend([k, float(p), pmf.method] for k, p in enumerate(probs, start=1))
    params = {**_model_params(model), "rank_of": args.rank_of, "method": args.method}
    if "mc" in methods:
        params.update(reps=args.reps, seed=args.seed)
    return params, Table(["rank", "probability", "method"], rows, extra)


def _best_time(fn, repeats):
    best, value = math.inf, None
    for _ in range(repeats):
        t0 = time.perf_counter()
        value = fn()
        best = min(best, time.perf_counter() - t0)
    return value, best


def benchmark_gamma_rows(lambdas, s_values, ranking, mc_reps, seed, exact_method, repeats, work_guard):
    ranking = Ranking(ranking)
    rows = []
    for s in s_values:
        model = GammaRaceModel(s, lambdas)
        status = "ok"
        try:
            exact, t_exact = _best_time(
                lambda: gamma_rank_prob(model, ranking, method=exact_method, work_guard=work_guard), repeats
            )
        except OutlierRankError as err:
            exact, t_exact, status = None, None, f"work-guard: {err}"
        try:
            normal = gamma_outlier_to_normal(model)
            q = JointRankQuery(indices=tuple(range(1, normal.n + 1)), ranks=tuple(ranking.r[1:]), j0=int(ranking.r[0]))

            def surrogate():
                return joint_prob(normal, q, r0_pmf_surrogate(normal))

            sur, t_sur = _best_time(surrogate, repeats)
        except PatternError:
            sur, t_sur = None, None
            status = "no-surrogate" if status == "ok" else status
        mc = None
        if mc_reps:
            mc = simulate_rankings(SimConfig(mc_reps, seed + s, model)).frequency(ranking)
        rows.append([s, exact, sur, mc, t_exact, t_sur, status])
    return rows


def cmd_benchmark_gamma(args):
    s_values = args.s if args.s else list(range(args.s_min, args.s_max + 1))
    ranking = args.ranking if args.ranking else list(range(1, len(args.lambdas) + 1))
    rows = benchmark_gamma_rows(
        args.lambdas, s_values, ranking, args.mc_reps, args.seed, args.exact_method, args.timing_repeats, args.work_guard
    )
    params = {
        "lambdas": args.lambdas,
        "ranking": ranking,
        "s": s_values if args.s else f"{args.s_min}..{args.s_max}",
        "mc_reps": args.mc_reps,
        "seed": args.seed,
        "exact_method": args.exact_method,
    }
    cols = ["s", "exact_prob", "surrogate_prob", "mc_prob", "exact_seconds", "surrogate_seconds", "status"]
    return params, Table(cols, rows)


def cmd_wasserstein_map(args):
    rhos = _grid(args.rho_min, args.rho_max, args.step)
    deltas = _grid(args.delta_min, args.delta_max, args.step)
    if rhos[0] <= 0:
        raise UsageError("rho values must be positive")
    grid = w2_surrogate_map(rhos, deltas, bin_width=args.bin_width, rule=args.rule, jobs=args.jobs)
    i, j = np.unravel_index(int(np.argmax(grid)), grid.shape)
    rows = [[r, d, float(grid[a, b])] for a, r in enumerate(rhos) for b, d in enumerate(deltas)]
    params = {
        "rho_range": [args.rho_min, args.rho_max],
        "delta_range": [args.delta_min, args.delta_max],
        "step": args.step,
        "rule": args.rule,
        "bin_width": args.bin_width,
    }
    extra = {"argmax_rho": rhos[i], "argmax_delta": deltas[j], "max_w2": float(grid[i, j])}
    return params, Table(["rho", "delta", "w2"], rows, extra)


def cmd_extremes(args):
    model = _model(args)
    e = extreme_probs(model)
    cols = ["n", "rho", "delta", "min", "median", "max", "asymptotic_min", "asymptotic_median", "asymptotic_max"]
    row = [model.n, model.rho, model.delta, e.min, e.median, e.max, e.asymptotic_min, e.asymptotic_median, e.asymptotic_max]
    return _model_params(model), Table(cols, [row])


def cmd_moments(args):
    model = _model(args)
    s = beta_surrogate(model.law)
    mo = rank_moments(model, s)
    cols = ["mean_r0", "var_r0", "mean_r1", "var_r1", "cov_r0_r1", "cov_r1_r2", "iota", "a", "b"]
    row = [mo.mean_r0, mo.var_r0, mo.mean_r1, mo.var_r1, mo.cov_r0_r1, mo.cov_r1_r2, s.iota, s.a, s.b]
    return _model_params(model), Table(cols, [row])


def _zdist_table(law, points, method):
    from scipy import stats

    s = beta_surrogate(law)
    y = (np.arange(1, points + 1) - 0.5) / points
    rows = np.column_stack(
        [y, z_density(law, y), z_cdf(law, y), stats.beta.pdf(y, s.a, s.b), stats.beta.cdf(y, s.a, s.b)]
    ).tolist()
    v = z_variance(law, method=method) if not s.extreme else None
    extra = {
        "mean": s.mean,
        "variance": s.variance,
        "a": s.a,
        "b": s.b,
        "iota": s.iota,
        "integral_term": None if v is None else v.integral_term,
        "arccos_term": None if v is None else v.arccos_term,
    }
    return Table(["y", "density", "cdf", "surrogate_density", "surrogate_cdf"], rows, extra)


def cmd_zdist(args):
    model = _model(args, n=1)
    table = _zdist_table(model.law, args.points, args.variance_method)
    params = {"rho": model.rho, "delta": model.delta, "points": args.points, "variance_method": args.variance_method}
    return params, table


def cmd_joint(args):
    model = _model(args)
    if len(args.indices) != len(args.ranks):
        raise UsageError("--indices and --ranks must have equal length")
    query = JointRankQuery(indices=tuple(args.indices), ranks=tuple(args.ranks), j0=args.j0)
    pmf = r0_pmf_surrogate(model) if args.pmf == "surrogate" else r0_pmf_exact(model)
    p = joint_prob(model, query, pmf)
    params = {**_model_params(model), "j0": args.j0, "indices": args.indices, "ranks": args.ranks, "pmf": args.pmf}
    return params, Table(["probability", "method"], [[p, pmf.method]])


def cmd_classical(args):
    m = args.model
    params = {"model": m}
    if m == "taylor":
        if args.mus is None:
            raise UsageError("--mus is required for the taylor model")
        cfg = TaylorConfig(args.mus)
        given = [v is not None for v in (args.ranking, args.leader, args.pair)]
        if sum(given) != 1:
            raise UsageError("give exactly one of --ranking, --leader, --pair")
        pair = tuple(args.pair) if args.pair is not None else None
        if pair is not None and len(pair) != 2:
            raise UsageError("--pair takes two indices")
        p = taylor_rank_prob(cfg, ranking=args.ranking, leader=args.leader, pair=pair, center=not args.literal)
        params.update(mus=args.mus, ranking=args.ranking, leader=args.leader, pair=args.pair, center=not args.literal)
        return params, Table(["probability"], [[p]])
    if args.ranking is None:
        raise UsageError("--ranking is required")
    params["ranking"] = args.ranking
    if m == "exp":
        if args.lambdas is None:
            raise UsageError("--lambdas is required")
        p = exp_rank_prob(args.lambdas, args.ranking)
        params["lambdas"] = args.lambdas
    elif m == "gamma":
        if args.lambdas is None:
            raise UsageError("--lambdas is required")
        p = gamma_rank_prob(GammaRaceModel(args.s, args.lambdas), args.ranking)
        params.update(lambdas=args.lambdas, s=args.s)
    else:
        if args.mus is None:
            raise UsageError("--mus is required")
        sig = args.sigmas if args.sigmas is not None else [1.0]
        fn = gumbel_rank_prob if m == "gumbel" else normal_rank_prob_quadrature
        p = fn(args.mus, sig, args.ranking)
        params.update(mus=args.mus, sigmas=sig)
    return params, Table(["probability"], [[p]])


FIGURES = {
    "1": "variance",
    "2": "w2-map",
    "3": "w1-map",
    "4": "r0-hist",
    "5": "r1-hist",
    "6": "gamma",
    "7": "normal",
    "8": "extremes",
    "densities": "densities",
}


def _figure_variance(seed):
    rows = []
    for d in (0.0, 1.0, 2.0, 3.0):
        for r in _grid(0.05, 5.0, 0.05):
            law = LatentSuccessLaw(r, d)
            v = z_variance(law).total
            z = sample_z(law, 10_000, seed)
            rows.append([r, d, v, float(np.var(z, ddof=1))])
    return Table(["rho", "delta", "variance", "mc_variance"], rows)


def _figure_w1_map():
    rows = []
    for r in _grid(0.25, 7.5, 0.25):
        for d in _grid(0.0, 7.5, 0.25):
            model = OutlierModel.standardized(r, d, 25)
            rows.append([r, d, w1_discrete(r0_pmf_exact(model), r0_pmf_surrogate(model))])
    return Table(["rho", "delta", "w1"], rows)


def _figure_hist(seed, in_group):
    rows = []
    for r in (0.5, 1.0, 2.0, 4.0):
        for d in (-2.0, 0.0, 2.0):
            model = OutlierModel.standardized(r, d, 25)
            sur, ex = r0_pmf_surrogate(model), r0_pmf_exact(model)
            table = simulate_outlier_ranks(SimConfig(100_000, seed, model), track=(1,) if in_group else ())
            if in_group:
                sp, ep = in_group_marginal(sur), in_group_marginal(ex)
                mc = table.in_group_marginal(1) / table.replications
            else:
                sp, ep, mc = sur.probs, ex.probs, table.frequencies()
            rows.extend([r, d, k + 1, sp[k], ep[k], mc[k]] for k in range(26))
    return Table(["rho", "delta", "rank", "surrogate", "exact", "mc"], rows)


def normal_benchmark_rows(mus, n, reps, seed):
    """Pr(R0 = 1) and Pr(R1 = 1) with X0 ~ N(-mu, 1) and n in-group N(mu, 1)."""
    rows = []
    for mu in mus:
        model = OutlierModel(-mu, 1.0, mu, 1.0, n)
        sur, ex = r0_pmf_surrogate(model), r0_pmf_exact(model)
        cfg = TaylorConfig(np.array([-mu] + [mu] * n))
        t0, t1 = taylor_rank_prob(cfg, leader=0), taylor_rank_prob(cfg, leader=1)
        l0 = taylor_rank_prob(cfg, leader=0, center=False)
        l1 = taylor_rank_prob(cfg, leader=1, center=False)
        table = simulate_outlier_ranks(SimConfig(reps, seed, model), track=(1,))
        mc0 = table.marginal[0] / reps
        mc1 = table.in_group_marginal(1)[0] / reps
        rows.append(
            [mu, sur.probs[0], t0, l0, ex.probs[0], mc0, in_group_marginal(sur)[0], t1, l1, in_group_marginal(ex)[0], mc1]
        )
    return rows


def _figure_extremes():
    rows = []
    ns = [2, 4, 8, 16, 32, 64, 128, 256, 512, 1024]
    for e in _grid(-2.0, 2.0, 0.25):
        for n in ns:
            x = extreme_probs(OutlierModel.standardized(2.0**e, 0.0, n))
            rows.append([2.0**e, 0.0, n, x.median, x.max, x.asymptotic_median, x.asymptotic_max])
    for d in _grid(-4.0, 4.0, 0.25):
        for n in ns:
            x = extreme_probs(OutlierModel.standardized(1.0, d, n))
            rows.append([1.0, d, n, x.median, x.max, x.asymptotic_median, x.asymptotic_max])
    return Table(["rho", "delta", "n", "median", "max", "asymptotic_median", "asymptotic_max"], rows)


def cmd_figure(args):
    name = FIGURES.get(args.id, args.id)
    params = {"figure": name, "seed": args.seed}
    if name == "variance":
        return params, _figure_variance(args.seed)
    if name == "w2-map":
        ns = argparse.Namespace(
            rho_min=0.05, rho_max=7.5, delta_min=0.0, delta_max=7.5, step=0.05, bin_width=1e-4, rule="gauss", jobs=args.jobs
        )
        return cmd_wasserstein_map(ns)
    if name == "densities":
        rows = []
        for r, d in ((1.0, 0.0), (0.85, 1.9), (1.0, 5.0), (5.0, 5.0)):
            t = _zdist_table(LatentSuccessLaw(r, d), 999, "simpson")
            rows.extend([r, d] + row for row in t.rows)
        return params, Table(["rho", "delta", "y", "density", "cdf", "surrogate_density", "surrogate_cdf"], rows)
    if name == "w1-map":
        return params, _figure_w1_map()
    if name in ("r0-hist", "r1-hist"):
        return params, _figure_hist(args.seed, name == "r1-hist")
    if name == "gamma":
        rows = benchmark_gamma_rows([2, 1, 1, 1, 1, 1], range(1, 51), list(range(1, 7)), 100_000, args.seed, "recursive", 5, 1e8)
        cols = ["s", "exact_prob", "surrogate_prob", "mc_prob", "exact_seconds", "surrogate_seconds", "status"]
        return params, Table(cols, rows)
    if name == "normal":
        rows = normal_benchmark_rows(_grid(0.0, 3.0, 0.01), 25, 100_000, args.seed)
        cols = [
            "mu",
            "r0_surrogate",
            "r0_taylor",
            "r0_taylor_literal",
            "r0_exact",
            "r0_mc",
            "r1_surrogate",
            "r1_taylor",
            "r1_taylor_literal",
            "r1_exact",
            "r1_mc",
        ]
        return params, Table(cols, rows)
    if name == "extremes":
        return params, _figure_extremes()
    raise UsageError(f"unknown figure {args.id!r}; choose from {sorted(set(FIGURES) | set(FIGURES.values()))}")


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument(
        "--output", "-o", help=f"output file; '-' forces stdout (default: ${OUTPUT_DIR_ENV}/<cmd>.<fmt> or stdout)"
    )

    parser = argparse.ArgumentParser(prog="outlierrank", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rank-pmf", parents=[common], help="distribution of the outlier's rank")
    _add_model_args(p)
    p.add_argument("--method", choices=["surrogate", "exact", "mc", "all"], default="surrogate")
    p.add_argument("--scheme", choices=["quadrature", "z-bins"], default="quadrature")
    p.add_argument("--rank-of", choices=["outlier", "in-group"], default="outlier")
    p.add_argument("--reps", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_rank_pmf)

    p = sub.add_parser("benchmark-gamma", parents=[common], help="gamma race: exact vs surrogate vs simulation")
    p.add_argument("--lambdas", type=_floats, default=[2.0, 1.0, 1.0, 1.0, 1.0, 1.0])
    p.add_argument("--s", type=_ints, help="explicit comma-separated shape values")
    p.add_argument("--s-min", type=int, default=1)
    p.add_argument("--s-max", type=int, default=50)
    p.add_argument("--ranking", type=_ints)
    p.add_argument("--mc-reps", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact-method", choices=["recursive", "odometer"], default="recursive")
    p.add_argument("--timing-repeats", type=int, default=5)
    p.add_argument("--work-guard", type=float, default=1e8)
    p.set_defaults(func=cmd_benchmark_gamma)

    p = sub.add_parser("wasserstein-map", parents=[common], help="W2 between Z and its beta surrogate on a grid")
    p.add_argument("--rho-min", type=float, default=0.05)
    p.add_argument("--rho-max", type=float, default=7.5)
    p.add_argument("--delta-min", type=float, default=-7.5)
    p.add_argument("--delta-max", type=float, default=7.5)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--rule", choices=["gauss", "left", "midpoint"], default="gauss")
    p.add_argument("--bin-width", type=float, default=1e-4)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.set_defaults(func=cmd_wasserstein_map)

    for name, func, help_ in (
        ("extremes", cmd_extremes, "probabilities that the outlier is smallest, median or largest"),
        ("moments", cmd_moments, "means, variances and covariances of ranks"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_)
        _add_model_args(p)
        p.set_defaults(func=func)

    p = sub.add_parser("zdist", parents=[common], help="density and CDF of Z with its beta surrogate")
    _add_model_args(p, n_required=False)
    p.add_argument("--points", type=int, default=199)
    p.add_argument("--variance-method", choices=["simpson", "riemann"], default="simpson")
    p.set_defaults(func=cmd_zdist)

    p = sub.add_parser("joint", parents=[common], help="joint rank probability")
    _add_model_args(p)
    p.add_argument("--j0", type=int, help="rank of the outlier (omit to leave it free)")
    p.add_argument("--indices", type=_ints, required=True, help="in-group indices, 1-based")
    p.add_argument("--ranks", type=_ints, required=True)
    p.add_argument("--pmf", choices=["surrogate", "exact"], default="surrogate")
    p.set_defaults(func=cmd_joint)

    p = sub.add_parser("classical", parents=[common], help="ranking probability under a classical model")
    p.add_argument("--model", choices=["exp", "gumbel", "gamma", "normal", "taylor"], required=True)
    p.add_argument("--lambdas", type=_floats)
    p.add_argument("--mus", type=_floats)
    p.add_argument("--sigmas", type=_floats)
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--ranking", type=_ints)
    p.add_argument("--leader", type=int, help="0-based index for Pr(R_i = 1) (taylor)")
    p.add_argument("--pair", type=_ints, help="two 0-based indices for Pr(R_i = 1, R_j = 2) (taylor)")
    p.add_argument("--literal", action="store_true", help="taylor: use the means as given instead of centering")
    p.set_defaults(func=cmd_classical)

    p = sub.add_parser("figure", parents=[common], help="regenerate the data behind a figure")
    p.add_argument("id", help="1-8, a name such as w2-map, or 'densities'")
    p.add_argument("--seed", type=int, default=20240601)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.set_defaults(func=cmd_figure)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        params, table = args.func(args)
        text = render(table, args.command, params, args.format)
    except UsageError as err:
        parser.error(str(err))
    except NumericalIntegrityError as err:
        print(f"outlierrank: numerical integrity failure: {err}", file=sys.stderr)
        return 3
    except (OutlierRankError, ValueError) as err:
        print(f"outlierrank: {err}", file=sys.stderr)
        return 2
    dest = _destination(args, args.command)
    if dest is None:
        sys.stdout.write(text)
        return 0
    dest.parent.mkdir(parents=True, exist_ok=True)
    dest.write_text(text)
    write_manifest(dest, args.command, params, params.get("seed"), time.perf_counter() - start)
    return 0


if __name__ == "__main__":
    sys.exit(main())
