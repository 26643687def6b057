"""Single command line entry point (``efk``).

Every subcommand reads CSV inputs, writes one output file atomically
(temp file + rename, so interrupted runs never leave partial
artifacts), and prints a one-line summary to stdout. Outputs contain no
timestamps unless ``--timestamp`` is passed explicitly, so identical
configurations produce byte-identical files. Relative input paths
resolve under ``$EFK_DATA_DIR`` when that variable is set.

Exit codes: 0 success, 1 input problem, 2 non-convergence,
3 degenerate spectrum, 4 insufficient data.
"""

from __future__ import annotations

import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import click

from . import dynamics, synth
from .counterfactual import coalfish_experiment, compare_rankings
from .eci import eci_eigen, method_of_reflections
from .errors import EfkError, InvalidParameter, MalformedRecord, UnknownEntity
from .fitness import fitness_fixed_point
from .ingest import build_trade_table, parse_gdp_csv, parse_trade_csv
from .matrix import BinaryCPMatrix, binarize, nestedness, rca
from .ranking import SCHEMA_VERSION, read_ranking_csv

POINTS_HEADER = "country,year,gdppc,fitness"


@dataclass
class RunConfig:
    """One CLI invocation: the command plus its validated options."""

    command: str
    options: dict = field(default_factory=dict)
    output: str | None = None
    fmt: str = "csv"
    timestamp: str | None = None


def _resolve(path: str) -> Path:
    p = Path(path)
    root = os.environ.get("EFK_DATA_DIR")
    if root and not p.is_absolute():
        return Path(root) / p
    return p


def _read_file(path: str) -> str:
    p = _resolve(path)
    if not p.is_file():
        raise EfkError(f"input file not found: {p}")
    return p.read_text(encoding="utf-8")


def _write_atomic(path: str, text: str) -> None:
    out = Path(path)
    tmp = out.with_name(out.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, out)


def _json_text(obj: dict, cfg: RunConfig) -> str:
    if cfg.timestamp is not None:
        obj = {**obj, "timestamp": cfg.timestamp}
    return json.dumps(obj, indent=2) + "\n"


def _load_matrix(cfg: RunConfig) -> BinaryCPMatrix:
    opts = cfg.options
    if opts.get("matrix"):
        return BinaryCPMatrix.from_csv(_read_file(opts["matrix"]))
    if not opts.get("input"):
        raise EfkError("either --input (with --year) or --matrix is required")
    if opts.get("year") is None:
        raise EfkError("--year is required with --input")
    records = parse_trade_csv(_read_file(opts["input"]))
    table = build_trade_table(records, opts["year"])
    return binarize(rca(table), threshold=opts.get("threshold", 1.0))


def _read_points_csv(text: str) -> dynamics.TrajectorySet:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != POINTS_HEADER:
        raise MalformedRecord(f"expected header {POINTS_HEADER!r}", 1)
    states = []
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != 4:
            raise MalformedRecord(f"expected 4 columns, got {len(parts)}", lineno)
        try:
            country = parts[0].strip().upper()
            year = int(parts[1])
            gdppc = float(parts[2])
            fit = float(parts[3])
        except ValueError:
            raise MalformedRecord(f"bad point row {ln!r}", lineno) from None
        if gdppc <= 0 or fit <= 0:
            raise MalformedRecord("gdppc and fitness must be positive", lineno)
        states.append((country, year, math.log10(gdppc), math.log10(fit)))
    return dynamics.TrajectorySet.from_xy(states)


def _points_csv_text(points: dynamics.TrajectorySet) -> str:
    lines = [POINTS_HEADER]
    for p in points:
        lines.append(f"{p.country},{p.year},{10.0 ** p.x!r},{10.0 ** p.y!r}")
    return "\n".join(lines) + "\n"


def _load_points(cfg: RunConfig) -> dynamics.TrajectorySet:
    opts = cfg.options
    if opts.get("points"):
        return _read_points_csv(_read_file(opts["points"]))
    if not (opts.get("trade") and opts.get("gdp")):
        raise EfkError("either --points or both --trade and --gdp are required")
    records = parse_trade_csv(_read_file(opts["trade"]))
    fitness_by_year = {}
    for year in sorted({r.year for r in records}):
        table = build_trade_table(records, year)
        m = binarize(rca(table), threshold=opts.get("threshold", 1.0))
        fitness_by_year[year] = fitness_fixed_point(m)
    gdp = parse_gdp_csv(_read_file(opts["gdp"]))
    return dynamics.build_trajectories(fitness_by_year, gdp)


def _ranking_output(result, cfg: RunConfig) -> str:
    if cfg.fmt == "json":
        return _json_text(result.to_json_obj(), cfg)
    return result.to_csv_text()


def run(cfg: RunConfig) -> str:
    """Execute one command; returns the one-line summary for stdout."""
    handler = _HANDLERS[cfg.command]
    text, summary = handler(cfg)
    if cfg.output:
        _write_atomic(cfg.output, text)
    else:
        sys.stdout.write(text)
    return summary


def _cmd_fitness(cfg: RunConfig):
    m = _load_matrix(cfg)
    res = fitness_fixed_point(
        m,
        tol=cfg.options.get("tol", 1e-9),
        max_iter=cfg.options.get("max_iter", 1000),
        rank_patience=cfg.options.get("rank_patience", 20),
    )
    ranking = (
        res.product_ranking() if cfg.options.get("side") == "product" else res.country_ranking()
    )
    summary = (
        f"fitness: {len(m.countries)} countries, {len(m.products)} products, "
        f"{res.iterations} iterations, converged={res.converged}, residual={res.residual:.3e}"
    )
    return _ranking_output(ranking, cfg), summary


def _cmd_eci(cfg: RunConfig):
    m = _load_matrix(cfg)
    sol = eci_eigen(m, order_n=cfg.options.get("order_n", 2))
    ranking = (
        sol.product_ranking() if cfg.options.get("side") == "product" else sol.country_ranking()
    )
    summary = (
        f"eci: {len(m.countries)} countries, {len(m.products)} products, "
        f"order_n={sol.order_n}, lambda={sol.eigenvalue:.6f}"
    )
    return _ranking_output(ranking, cfg), summary


def _cmd_reflections(cfg: RunConfig):
    m = _load_matrix(cfg)
    trace = method_of_reflections(m, depth=cfg.options.get("depth", 20))
    if cfg.fmt == "json":
        obj = {
            "schema_version": SCHEMA_VERSION,
            "algorithm": "reflections",
            "depth": trace.depth,
            "countries": list(trace.countries),
            "products": list(trace.products),
            "country_levels": [[float(v) for v in row] for row in trace.country_levels],
            "product_levels": [[float(v) for v in row] for row in trace.product_levels],
        }
        text = _json_text(obj, cfg)
    else:
        text = trace.to_csv_text()
    summary = (
        f"reflections: depth {trace.depth}, {len(m.countries)} countries, "
        f"{len(m.products)} products"
    )
    return text, summary


def _cmd_nestedness(cfg: RunConfig):
    m = _load_matrix(cfg)
    rep = nestedness(m)
    if cfg.fmt == "json":
        obj = {
            "schema_version": SCHEMA_VERSION,
            "nodf_rows": rep.nodf_rows,
            "nodf_cols": rep.nodf_cols,
            "nodf_total": rep.nodf_total,
            "fill": rep.fill,
        }
        text = _json_text(obj, cfg)
    else:
        text = (
            "nodf_rows,nodf_cols,nodf_total,fill\n"
            f"{rep.nodf_rows!r},{rep.nodf_cols!r},{rep.nodf_total!r},{rep.fill!r}\n"
        )
    summary = f"nestedness: nodf_total={rep.nodf_total:.4f}, fill={rep.fill:.4f}"
    return text, summary


def _cmd_compare(cfg: RunConfig):
    a = read_ranking_csv(_read_file(cfg.options["a"]), algorithm="a")
    b = read_ranking_csv(_read_file(cfg.options["b"]), algorithm="b")
    comp = compare_rankings(a, b)
    if cfg.fmt == "json":
        obj = {"schema_version": SCHEMA_VERSION, **comp.to_json_obj()}
        text = _json_text(obj, cfg)
    else:
        text = comp.to_csv_text()
    summary = (
        f"compare: {len(comp.entities)} entities, spearman={comp.spearman:.4f}, "
        f"kendall={comp.kendall_tau:.4f}"
    )
    return text, summary


def _outcome_csv_rows(outcomes) -> str:
    lines = ["country,product,fit_rank_before,fit_rank_after,eci_rank_before,eci_rank_after"]
    for o in outcomes:
        lines.append(
            f"{o.country},{o.kept_products[0]},{o.fitness_rank_before},"
            f"{o.fitness_rank_after},{o.eci_rank_before},{o.eci_rank_after}"
        )
    return "\n".join(lines) + "\n"


def _cmd_counterfactual(cfg: RunConfig):
    m = _load_matrix(cfg)
    opts = cfg.options
    kwargs = dict(
        order_n=opts.get("order_n", 2),
        frozen_pci=opts.get("frozen_pci", False),
    )
    if opts.get("pairs"):
        pairs = []
        text_in = _read_file(opts["pairs"])
        lines = [ln for ln in text_in.splitlines() if ln.strip()]
        if not lines or lines[0].strip() != "country,product":
            raise MalformedRecord("expected header 'country,product'", 1)
        for lineno, ln in enumerate(lines[1:], start=2):
            parts = ln.split(",")
            if len(parts) != 2:
                raise MalformedRecord(f"expected 2 columns, got {len(parts)}", lineno)
            pairs.append((parts[0].strip().upper(), parts[1].strip()))
        outcomes = [coalfish_experiment(m, c, p, **kwargs) for c, p in pairs]
        if cfg.fmt == "json":
            obj = {
                "schema_version": SCHEMA_VERSION,
                "outcomes": [o.to_json_obj() for o in outcomes],
            }
            text = _json_text(obj, cfg)
        else:
            text = _outcome_csv_rows(outcomes)
        return text, f"counterfactual: {len(outcomes)} experiments"
    if not (opts.get("country") and opts.get("product")):
        raise EfkError("either --country and --product, or --pairs, is required")
    outcome = coalfish_experiment(m, opts["country"], opts["product"], **kwargs)
    if cfg.fmt == "json":
        text = _json_text({"schema_version": SCHEMA_VERSION, **outcome.to_json_obj()}, cfg)
    else:
        text = _outcome_csv_rows([outcome])
    summary = (
        f"counterfactual: {outcome.country} fitness {outcome.fitness_rank_before}"
        f"->{outcome.fitness_rank_after}, eci {outcome.eci_rank_before}"
        f"->{outcome.eci_rank_after}"
    )
    return text, summary


def _forecast_kwargs(opts: dict) -> dict:
    return dict(
        horizon=opts.get("horizon", 5),
        radius=opts.get("radius", 0.25),
        min_analogues=opts.get("min_analogues", 5),
        theta=opts.get("theta", 0.05),
    )


def _cmd_forecast(cfg: RunConfig):
    points = _load_points(cfg)
    opts = cfg.options
    query = points.position(opts["country"].upper(), opts["year"])
    if query is None:
        raise UnknownEntity(f"no trajectory point for ({opts['country']}, {opts['year']})")
    fc = dynamics.analogue_forecast(points, query, **_forecast_kwargs(opts))
    if cfg.fmt == "json":
        text = _json_text({"schema_version": SCHEMA_VERSION, "theta": opts.get("theta", 0.05), **fc.to_json_obj()}, cfg)
    else:
        text = (
            "country,year,horizon,analogues_used,dx,dy,sx,sy,regime\n"
            f"{fc.query.country},{fc.query.year},{fc.horizon},{fc.analogues_used},"
            f"{fc.mean_displacement[0]!r},{fc.mean_displacement[1]!r},"
            f"{fc.dispersion[0]!r},{fc.dispersion[1]!r},{fc.regime}\n"
        )
    summary = (
        f"forecast: {fc.query.country}@{fc.query.year} +{fc.horizon}y, "
        f"{fc.analogues_used} analogues, regime={fc.regime}"
    )
    return text, summary


def _cmd_backtest(cfg: RunConfig):
    points = _load_points(cfg)
    opts = cfg.options
    rep = dynamics.backtest(
        points,
        horizon=opts.get("horizon", 5),
        radius=opts.get("radius", 0.25),
        split_year=opts["split_year"],
        min_analogues=opts.get("min_analogues", 5),
        theta=opts.get("theta", 0.05),
    )
    if cfg.fmt == "json":
        text = _json_text({"schema_version": SCHEMA_VERSION, **rep.to_json_obj()}, cfg)
    else:
        text = (
            "split_year,horizon,n_queries,n_skipped,mae_analogue,mae_persistence,mae_global_mean\n"
            f"{rep.split_year},{rep.horizon},{rep.n_queries},{rep.n_skipped},"
            f"{rep.mae_analogue!r},{rep.mae_persistence!r},{rep.mae_global_mean!r}\n"
        )
    summary = (
        f"backtest: {rep.n_queries} queries ({rep.n_skipped} skipped), "
        f"mae_analogue={rep.mae_analogue:.4e} vs persistence={rep.mae_persistence:.4e}"
    )
    return text, summary


def _cmd_regime_map(cfg: RunConfig):
    points = _load_points(cfg)
    opts = cfg.options
    rm = dynamics.regime_map(
        points,
        grid=(opts.get("nx", 10), opts.get("ny", 10)),
        **_forecast_kwargs(opts),
    )
    if cfg.fmt == "json":
        text = _json_text({"schema_version": SCHEMA_VERSION, **rm.to_json_obj()}, cfg)
    else:
        lines = ["xn,yn,regime"]
        for ix, cx in enumerate(rm.x_centers):
            for iy, cy in enumerate(rm.y_centers):
                lines.append(f"{float(cx)!r},{float(cy)!r},{rm.labels[ix][iy]}")
        text = "\n".join(lines) + "\n"
    flat = [lab for col in rm.labels for lab in col]
    summary = (
        f"regime-map: {len(rm.x_centers)}x{len(rm.y_centers)} cells, "
        f"{flat.count(dynamics.LAMINAR)} laminar, {flat.count(dynamics.TURBULENT)} turbulent, "
        f"{flat.count(dynamics.NO_DATA)} no-data"
    )
    return text, summary


def _cmd_synth_nested(cfg: RunConfig):
    opts = cfg.options
    spec = synth.SynthSpec(
        countries=opts["countries"],
        products=opts["products"],
        noise=opts.get("noise", 0.0),
        seed=opts.get("seed", 0),
    )
    m = synth.nested_matrix(spec)
    if opts.get("as_trade"):
        year = opts.get("year", 2000)
        lines = ["year,exporter,product,value"]
        for i, c in enumerate(m.countries):
            for j, p in enumerate(m.products):
                if m.m[i, j]:
                    lines.append(f"{year},{c},{p},1.000000")
        text = "\n".join(lines) + "\n"
    else:
        text = m.to_csv_text()
    summary = (
        f"synth nested: {len(m.countries)}x{len(m.products)}, "
        f"{int(m.m.sum())} ones, seed={spec.seed}"
    )
    return text, summary


def _cmd_synth_drift(cfg: RunConfig):
    opts = cfg.options
    points = synth.drift_field(
        countries=opts["countries"],
        years=opts["years"],
        drift=(opts.get("dx", 0.1), opts.get("dy", 0.05)),
        noise_sd=opts.get("noise_sd", 0.0),
        seed=opts.get("seed", 0),
        start_year=opts.get("start_year", 2000),
    )
    text = _points_csv_text(points)
    summary = f"synth drift: {opts['countries']} countries x {opts['years']} years"
    return text, summary


def _cmd_plot_data(cfg: RunConfig):
    points = _load_points(cfg)
    opts = cfg.options
    if cfg.fmt != "json":
        raise InvalidParameter("plot-data supports --format json only")
    per_country: dict[str, list] = {}
    for p in points:
        per_country.setdefault(p.country, []).append(
            {"year": p.year, "x": p.x, "y": p.y, "xn": p.xn, "yn": p.yn}
        )
    rm = dynamics.regime_map(
        points,
        grid=(opts.get("nx", 10), opts.get("ny", 10)),
        **_forecast_kwargs(opts),
    )
    forecasts = []
    for country in sorted(per_country):
        last = max(per_country[country], key=lambda d: d["year"])
        query = points.position(country, last["year"])
        try:
            fc = dynamics.analogue_forecast(points, query, **_forecast_kwargs(opts))
            forecasts.append(fc.to_json_obj())
        except dynamics.InsufficientAnalogues as exc:
            forecasts.append(
                {
                    "country": country,
                    "year": last["year"],
                    "status": "insufficient-analogues",
                    "found": exc.found,
                }
            )
    obj = {
        "schema_version": SCHEMA_VERSION,
        "theta": opts.get("theta", 0.05),
        "theta_convention": "toolkit-defined laminar threshold on sx",
        "horizon": opts.get("horizon", 5),
        "radius": opts.get("radius", 0.25),
        "trajectories": [
            {"country": c, "points": sorted(per_country[c], key=lambda d: d["year"])}
            for c in sorted(per_country)
        ],
        "regime_grid": rm.to_json_obj(),
        "forecasts": forecasts,
    }
    summary = f"plot-data: {len(per_country)} countries, {len(points)} points"
    return _json_text(obj, cfg), summary


_HANDLERS = {
    "fitness": _cmd_fitness,
    "eci": _cmd_eci,
    "reflections": _cmd_reflections,
    "nestedness": _cmd_nestedness,
    "compare": _cmd_compare,
    "counterfactual": _cmd_counterfactual,
    "forecast": _cmd_forecast,
    "backtest": _cmd_backtest,
    "regime-map": _cmd_regime_map,
    "synth-nested": _cmd_synth_nested,
    "synth-drift": _cmd_synth_drift,
    "plot-data": _cmd_plot_data,
}


def _common(fmt_default: str = "csv"):
    def deco(f):
        f = click.option("--output", "-o", type=str, default=None, help="Output file (stdout when omitted).")(f)
        f = click.option(
            "--format", "fmt", type=click.Choice(["csv", "json"]), default=fmt_default,
            help="Output format.",
        )(f)
        f = click.option("--timestamp", type=str, default=None, help="Explicit timestamp recorded in JSON metadata.")(f)
        return f

    return deco


def _matrix_opts(f):
    f = click.option("--input", "-i", "input_", type=str, default=None, help="Trade CSV (year,exporter,product,value).")(f)
    f = click.option("--matrix", type=str, default=None, help="Binary matrix CSV (bypasses RCA).")(f)
    f = click.option("--year", type=int, default=None, help="Year to select from the trade CSV.")(f)
    f = click.option("--threshold", type=float, default=1.0, show_default=True, help="RCA binarization threshold.")(f)
    return f


def _points_opts(f):
    f = click.option("--points", type=str, default=None, help=f"Trajectory CSV ({POINTS_HEADER}).")(f)
    f = click.option("--trade", type=str, default=None, help="Multi-year trade CSV (fitness computed per year).")(f)
    f = click.option("--gdp", type=str, default=None, help="GDP CSV (country,year,gdppc).")(f)
    f = click.option("--threshold", type=float, default=1.0, show_default=True)(f)
    f = click.option("--horizon", type=int, default=5, show_default=True)(f)
    f = click.option("--radius", type=float, default=0.25, show_default=True)(f)
    f = click.option("--min-analogues", type=int, default=5, show_default=True)(f)
    f = click.option("--theta", type=float, default=0.05, show_default=True, help="Laminar threshold on sx (toolkit convention).")(f)
    return f


@click.group()
def cli():
    """Country-product export analytics toolkit."""


@cli.command("fitness")
@_matrix_opts
@click.option("--tol", type=float, default=1e-9, show_default=True)
@click.option("--max-iter", type=int, default=1000, show_default=True)
@click.option("--rank-patience", type=int, default=20, show_default=True)
@click.option("--side", type=click.Choice(["country", "product"]), default="country", show_default=True)
@_common()
def fitness_cmd(input_, matrix, year, threshold, tol, max_iter, rank_patience, side, output, fmt, timestamp):
    """Fitness/complexity ranking from the nonlinear fixed point."""
    cfg = RunConfig(
        command="fitness",
        options=dict(
            input=input_, matrix=matrix, year=year, threshold=threshold,
            tol=tol, max_iter=max_iter, rank_patience=rank_patience, side=side,
        ),
        output=output, fmt=fmt, timestamp=timestamp,
    )
    click.echo(run(cfg))


@cli.command("eci")
@_matrix_opts
@click.option("--order-n", type=int, default=2, show_default=True, help="Eigenvector index (descending eigenvalues).")
@click.option("--side", type=click.Choice(["country", "product"]), default="country", show_default=True)
@_common()
def eci_cmd(input_, matrix, year, threshold, order_n, side, output, fmt, timestamp):
    """Eigenvector complexity index ranking."""
    cfg = RunConfig(
        command="eci",
        options=dict(
            input=input_, matrix=matrix, year=year, threshold=threshold,
            order_n=order_n, side=side,
        ),
        output=output, fmt=fmt, timestamp=timestamp,
    )
    click.echo(run(cfg))


@cli.command("reflections")
@_matrix_opts
@click.option("--depth", type=int, default=20, show_default=True)
@_common()
def reflections_cmd(input_, matrix, year, threshold, depth, output, fmt, timestamp):
    """Alternating-averages iteration trace."""
    cfg = RunConfig(
        command="reflections",
        options=dict(input=input_, matrix=matrix, year=year, threshold=threshold, depth=depth),
        output=output, fmt=fmt, timestamp=timestamp,
    )
    click.echo(run(cfg))


@cli.command("nestedness")
@_matrix_opts
@_common()
def nestedness_cmd(input_, matrix, year, threshold, output, fmt, timestamp):
    """NODF nestedness of the binary matrix."""
    cfg = RunConfig(
        command="nestedness",
        options=dict(input=input_, matrix=matrix, year=year, threshold=threshold),
        output=output, fmt=fmt, timestamp=timestamp,
    )
    click.echo(run(cfg))


@cli.command("compare")
@click.option("--a", "a", type=str, required=True, help="First ranking CSV.")
@click.option("--b", "b", type=str, required=True, help="Second ranking CSV.")
@_common()
def compare_cmd(a, b, output, fmt, timestamp):
    """Compare two entity,score,rank files."""
    cfg = RunConfig(command="compare", options=dict(a=a, b=b), output=output, fmt=fmt, timestamp=timestamp)
    click.echo(run(cfg))


@cli.command("counterfactual")
@_matrix_opts
@click.option("--country", type=str, default=None)
@click.option("--product", type=str, default=None)
@click.option("--pairs", type=str, default=None, help="Batch CSV with header country,product.")
@click.option("--order-n", type=int, default=2, show_default=True)
@click.option("--frozen-pci", is_flag=True, default=False, help="Keep product indices fixed at their unrestricted values.")
@_common(fmt_default="json")
def counterfactual_cmd(input_, matrix, year, threshold, country, product, pairs, order_n, frozen_pci, output, fmt, timestamp):
    """Restrict a country's basket and re-rank it."""
    cfg = RunConfig(
        command="counterfactual",
        options=dict(
            input=input_, matrix=matrix, year=year, threshold=threshold,
            country=country.upper() if country else None, product=product,
            pairs=pairs, order_n=order_n, frozen_pci=frozen_pci,
        ),
        output=output, fmt=fmt, timestamp=timestamp,
    )
    click.echo(run(cfg))


@cli.command("forecast")
@_points_opts
@click.option("--country", type=str, required=True)
@click.option("--year", type=int, required=True)
@_common(fmt_default="json")
def forecast_cmd(points, trade, gdp, threshold, horizon, radius, min_analogues, theta, country, year, output, fmt, timestamp):
    """Analogue displacement forecast for one country-year."""
    cfg = RunConfig(
        command="forecast",
        options=dict(
            points=points, trade=trade, gdp=gdp, threshold=threshold,
            horizon=horizon, radius=radius, min_analogues=min_analogues,
            theta=theta, country=country, year=year,
        ),
        output=output, fmt=fmt, timestamp=timestamp,
    )
    click.echo(run(cfg))


@cli.command("backtest")
@_points_opts
@click.option("--split-year", type=int, required=True)
@_common()
def backtest_cmd(points, trade, gdp, threshold, horizon, radius, min_analogues, theta, split_year, output, fmt, timestamp):
    """Out-of-sample forecast errors against baselines."""
    cfg = RunConfig(
        command="backtest",
        options=dict(
            points=points, trade=trade, gdp=gdp, threshold=threshold,
            horizon=horizon, radius=radius, min_analogues=min_analogues,
            theta=theta, split_year=split_year,
        ),
        output=output, fmt=fmt, timestamp=timestamp,
    )
    click.echo(run(cfg))


@cli.command("regime-map")
@_points_opts
@click.option("--nx", type=int, default=10, show_default=True)
@click.option("--ny", type=int, default=10, show_default=True)
@_common()
def regime_map_cmd(points, trade, gdp, threshold, horizon, radius, min_analogues, theta, nx, ny, output, fmt, timestamp):
    """Laminar/turbulent/no-data grid over the normalized plane."""
    cfg = RunConfig(
        command="regime-map",
        options=dict(
            points=points, trade=trade, gdp=gdp, threshold=threshold,
            horizon=horizon, radius=radius, min_analogues=min_analogues,
            theta=theta, nx=nx, ny=ny,
        ),
        output=output, fmt=fmt, timestamp=timestamp,
    )
    click.echo(run(cfg))


@cli.group("synth")
def synth_group():
    """Deterministic synthetic data generators."""


@synth_group.command("nested")
@click.option("--countries", type=int, required=True)
@click.option("--products", type=int, required=True)
@click.option("--noise", type=float, default=0.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--as-trade", is_flag=True, default=False, help="Emit the trade CSV schema (indicator values) instead of the matrix CSV.")
@click.option("--year", type=int, default=2000, show_default=True, help="Year stamped on --as-trade rows.")
@_common()
def synth_nested_cmd(countries, products, noise, seed, as_trade, year, output, fmt, timestamp):
    """Noisy staircase country-product matrix."""
    cfg = RunConfig(
        command="synth-nested",
        options=dict(countries=countries, products=products, noise=noise, seed=seed, as_trade=as_trade, year=year),
        output=output, fmt=fmt, timestamp=timestamp,
    )
    click.echo(run(cfg))


@synth_group.command("drift")
@click.option("--countries", type=int, required=True)
@click.option("--years", type=int, required=True)
@click.option("--dx", type=float, default=0.1, show_default=True)
@click.option("--dy", type=float, default=0.05, show_default=True)
@click.option("--noise-sd", type=float, default=0.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--start-year", type=int, default=2000, show_default=True)
@_common()
def synth_drift_cmd(countries, years, dx, dy, noise_sd, seed, start_year, output, fmt, timestamp):
    """Constant-drift trajectory field in the points CSV schema."""
    cfg = RunConfig(
        command="synth-drift",
        options=dict(countries=countries, years=years, dx=dx, dy=dy, noise_sd=noise_sd, seed=seed, start_year=start_year),
        output=output, fmt=fmt, timestamp=timestamp,
    )
    click.echo(run(cfg))


@cli.command("plot-data")
@_points_opts
@click.option("--nx", type=int, default=10, show_default=True)
@click.option("--ny", type=int, default=10, show_default=True)
@_common(fmt_default="json")
def plot_data_cmd(points, trade, gdp, threshold, horizon, radius, min_analogues, theta, nx, ny, output, fmt, timestamp):
    """Trajectories, regime grid, and forecasts as one JSON document."""
    cfg = RunConfig(
        command="plot-data",
        options=dict(
            points=points, trade=trade, gdp=gdp, threshold=threshold,
            horizon=horizon, radius=radius, min_analogues=min_analogues,
            theta=theta, nx=nx, ny=ny,
        ),
        output=output, fmt=fmt, timestamp=timestamp,
    )
    click.echo(run(cfg))


def _error_exit(exc: Exception, code: int) -> int:
    obj = {"error": {"type": type(exc).__name__, "code": code, "message": str(exc)}}
    sys.stderr.write(json.dumps(obj) + "\n")
    return code


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:  # --help and friends
        return int(exc.exit_code)
    except click.ClickException as exc:
        return _error_exit(exc, 1)
    except EfkError as exc:
        return _error_exit(exc, exc.exit_code)


if __name__ == "__main__":
    sys.exit(main())
