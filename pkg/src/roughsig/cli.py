"""Command-line interface.

Every command that writes ``--out FILE`` also writes ``FILE.manifest.json``
with the resolved parameters, seed, package version and SHA-256 digests of
inputs and outputs; ``roughsig replay MANIFEST`` reruns it and checks the
output digest.

Exit codes: 0 success, 2 invalid flags or input, 1 runtime failure.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import sys
import warnings
from pathlib import Path as FsPath

import click
import numpy as np

from . import __version__
from .dataio import (
    CALENDAR_YEAR,
    PeriodPanel,
    load_panel,
    log_transform,
    parse_period_rule,
    read_curves,
    read_paths,
    write_curves,
    write_paths,
)
from .errors import DegeneratePath, EmptyPanel, InvalidParameter, RoughSigError, ValidationError
from .montecarlo import ExperimentConfig, GridSpec, run_experiment, summarize
from .seeding import derive_seed
from .signature import (
    SignatureCurve,
    curve_provider,
    median_provider,
    path_provider,
    point_estimate,
    quantile_signature,
    roughness_signature_curve,
)
from .simulate import (
    ExpTransform,
    FbmParams,
    GammaBssParams,
    HybridConfig,
    Mixture,
    NormalJumps,
    ConstantJumps,
    PoissonParams,
    SeriesConfig,
    TemperedStableParams,
    default_mixture_jumps,
    default_overlay,
    simulate_model,
)

MODELS = ("gbss", "fbm", "ts", "poisson", "mix", "expfbm")


def _sha256(file) -> str:
    h = hashlib.sha256()
    with open(file, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def manifest_path(out) -> FsPath:
    return FsPath(f"{out}.manifest.json")


def _jsonable(value):
    if isinstance(value, (tuple, list)):
        return [_jsonable(v) for v in value]
    if isinstance(value, FsPath):
        return str(value)
    return value


def write_manifest(ctx: click.Context, out, *, config: dict, seed=None, inputs=()) -> None:
    manifest = {
        "tool": "roughsig",
        "version": __version__,
        "command": ctx.command.name,
        "params": {k: _jsonable(v) for k, v in ctx.params.items()},
        "config": config,
        "seed": seed,
        "inputs": {str(f): _sha256(f) for f in inputs},
        "outputs": {str(out): _sha256(out)},
        "created": dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"),
    }
    with open(manifest_path(out), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _report(ctx: click.Context, exc: BaseException, code: int) -> None:
    obj = ctx.find_root().obj or {}
    if obj.get("json_errors"):
        payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
        click.echo(json.dumps(payload), err=True)
    else:
        click.echo(f"Error: {exc}", err=True)
        if code == 2:
            sub = ctx.invoked_subcommand
            hint = f"{ctx.command_path} {sub} --help" if sub else f"{ctx.command_path} --help"
            click.echo(f"Try '{hint}' for usage.", err=True)
    ctx.exit(code)


class _Group(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.exceptions.UsageError as exc:
            if (ctx.obj or {}).get("json_errors"):
                _report(ctx, exc, 2)
            raise
        except ValidationError as exc:
            _report(ctx, exc, 2)
        except (RoughSigError, OSError) as exc:
            _report(ctx, exc, 1)


@click.group(cls=_Group)
@click.version_option(__version__, prog_name="roughsig")
@click.option("--json-errors", is_flag=True, help="Report errors as JSON on standard error.")
@click.pass_context
def cli(ctx, json_errors):
    """Roughness signature estimation and simulation."""
    ctx.ensure_object(dict)["json_errors"] = json_errors


def model_options(f):
    opts = [
        click.option("--model", type=click.Choice(MODELS), required=True, help="Generating process."),
        click.option("--alpha", type=float, help="gamma-BSS roughness alpha in (-1/2, 1/2)."),
        click.option("--lambda", "lam", type=float, default=1.0, show_default=True, help="gamma-BSS decay / default tempering."),
        click.option("--sigma", type=float, default=1.0, show_default=True, help="gamma-BSS volatility."),
        click.option("--hurst", type=float, help="fBm Hurst exponent (fbm, expfbm)."),
        click.option("--eta", type=float, default=1.0, show_default=True, help="fBm scale."),
        click.option("--beta", type=float, help="Tempered stable index in (0, 2)."),
        click.option("--c", "c", type=float, default=1.0, show_default=True, help="Tempered stable intensity, both sides."),
        click.option("--c-pos", type=float, help="Positive-side intensity (overrides --c)."),
        click.option("--c-neg", type=float, help="Negative-side intensity (overrides --c)."),
        click.option("--lambda-pos", type=float, help="Positive-side tempering (default --lambda)."),
        click.option("--lambda-neg", type=float, help="Negative-side tempering (default --lambda)."),
        click.option("--rate", type=float, default=5.0, show_default=True, help="Poisson jump rate per unit time."),
        click.option("--jump-law", type=click.Choice(["normal", "constant"]), default="normal", show_default=True),
        click.option("--jump-mean", type=float, default=0.0, show_default=True),
        click.option("--jump-sd", type=float, help="Normal jump sd [default: 1; mix: half the path scale]."),
        click.option("--jump-size", type=float, default=1.0, show_default=True, help="Constant jump size."),
        click.option("--jump-model", type=click.Choice(["poisson", "ts"]), default="poisson", show_default=True, help="Jump part of mix."),
        click.option("--gamma-max", type=float, default=1e6, show_default=True, help="Series truncation per unit time per side."),
        click.option("--small-jumps", type=click.Choice(["gaussian", "drop"]), default="gaussian", show_default=True),
        click.option("--kappa", type=int, default=3, show_default=True, help="Hybrid scheme near terms."),
        click.option("--n-trunc", type=int, help="Hybrid scheme memory (default from lambda)."),
    ]
    for opt in reversed(opts):
        f = opt(f)
    return f


def _require(name: str, value, model: str):
    if value is None:
        raise click.UsageError(f"--{name} is required for --model {model}")
    return value


def build_model(p: dict):
    """Model spec and simulator configs from the model options."""
    model = p["model"]
    lam_pos = p["lambda_pos"] if p["lambda_pos"] is not None else p["lam"]
    lam_neg = p["lambda_neg"] if p["lambda_neg"] is not None else p["lam"]

    def gbss():
        return GammaBssParams(_require("alpha", p["alpha"], model), p["lam"], p["sigma"])

    def ts():
        c_pos = p["c_pos"] if p["c_pos"] is not None else p["c"]
        c_neg = p["c_neg"] if p["c_neg"] is not None else p["c"]
        return TemperedStableParams(_require("beta", p["beta"], model), c_pos, c_neg, lam_pos, lam_neg)

    def poisson(default_sd: float):
        if p["jump_law"] == "constant":
            sizes = ConstantJumps(p["jump_size"])
        else:
            sd = p["jump_sd"] if p["jump_sd"] is not None else default_sd
            sizes = NormalJumps(p["jump_mean"], sd)
        return PoissonParams(p["rate"], sizes)

    if model == "gbss":
        spec = gbss()
    elif model == "fbm":
        spec = FbmParams(_require("hurst", p["hurst"], model), p["eta"])
    elif model == "expfbm":
        spec = ExpTransform(FbmParams(_require("hurst", p["hurst"], model), p["eta"]))
    elif model == "ts":
        spec = ts()
    elif model == "poisson":
        spec = poisson(1.0)
    else:
        cont = gbss()
        if p["jump_model"] == "ts":
            jump = ts()
        else:
            jump = poisson(default_mixture_jumps(cont, p["rate"]).jump_sizes.sd)
        spec = Mixture(cont, jump)
    hybrid = HybridConfig(p["kappa"], p["n_trunc"])
    series = SeriesConfig(p["gamma_max"], p["small_jumps"])
    return spec, hybrid, series


@cli.command()
@model_options
@click.option("--n", "n", type=int, default=2000, show_default=True, help="Observations per path.")
@click.option("--delta", type=float, help="Sampling step [default: 1/n].")
@click.option("--paths", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.pass_context
def simulate(ctx, n, delta, paths, seed, out, **model_flags):
    """Simulate paths; one CSV column per path (path_0, path_1, ...)."""
    spec, hybrid, series = build_model(model_flags)
    delta = 1.0 / n if delta is None else delta
    sims = [simulate_model(spec, n, delta, derive_seed(seed, j), hybrid=hybrid, series=series) for j in range(paths)]
    write_paths(sims, out)
    config = {
        "model": spec.to_dict(),
        "n": n,
        "delta": delta,
        "paths": paths,
        "path_seeds": [derive_seed(seed, j) for j in range(paths)],
    }
    write_manifest(ctx, out, config=config, seed=seed)


def input_options(f):
    opts = [
        click.option("--input", "input_file", type=click.Path(exists=True, dir_okay=False), required=True),
        click.option(
            "--layout",
            type=click.Choice(["auto", "panel", "wide"]),
            default="auto",
            show_default=True,
            help="panel: dated long series split into periods; wide: one path per column.",
        ),
        click.option("--date-column", default="date", show_default=True),
        click.option("--value-column", default="value", show_default=True),
        click.option("--period-rule", default=CALENDAR_YEAR, show_default=True, help="calendar_year or fixed_count:<m>."),
        click.option("--min-obs", type=click.IntRange(min=3), default=30, show_default=True),
        click.option("--sqrt", is_flag=True, help="Square-root the values (variance to volatility)."),
        click.option("--log", "log_values", is_flag=True, help="Analyse the log of the values."),
        click.option("--columns", help="Comma-separated path columns for wide input."),
    ]
    for opt in reversed(opts):
        f = opt(f)
    return f


def grid_options(f):
    opts = [
        click.option("--p-min", type=float, default=0.1, show_default=True),
        click.option("--p-max", type=float, default=10.0, show_default=True),
        click.option("--p-steps", type=click.IntRange(min=1), default=100, show_default=True),
        click.option("--nu", type=click.IntRange(min=2), default=2, show_default=True, help="Subsampling factor."),
        click.option("--order", type=click.IntRange(1, 2), default=1, show_default=True, help="Increment order."),
    ]
    for opt in reversed(opts):
        f = opt(f)
    return f


def load_input(input_file, layout, date_column, value_column, period_rule, min_obs, sqrt, log_values, columns) -> PeriodPanel:
    if layout == "auto":
        with open(input_file, encoding="utf-8-sig") as fh:
            header = fh.readline().strip().split(",")
        layout = "panel" if date_column in header else "wide"
    if layout == "panel":
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            panel = load_panel(
                input_file, date_column, value_column, parse_period_rule(period_rule), sqrt=sqrt, min_obs=min_obs
            )
        for w in caught:
            click.echo(f"Warning: {w.message}", err=True)
    else:
        cols = [c.strip() for c in columns.split(",")] if columns else None
        panel = read_paths(input_file, cols, min_obs=min_obs)
        if sqrt:
            if any(np.any(p.values < 0) for _, p in panel.items()):
                raise InvalidParameter("--sqrt needs non-negative values")
            panel = PeriodPanel({k: p.with_values(np.sqrt(p.values)) for k, p in panel.items()}, {}, panel.metadata)
    if log_values:
        if any(np.any(p.values <= 0) for _, p in panel.items()):
            raise InvalidParameter("--log needs strictly positive values")
        panel = log_transform(panel)
    return panel


def _grid(p_min, p_max, p_steps) -> np.ndarray:
    return GridSpec(p_min, p_max, p_steps).values


def panel_curves(panel: PeriodPanel, grid, nu, order) -> list[SignatureCurve]:
    curves = []
    for label, path in panel.items():
        try:
            curves.append(roughness_signature_curve(path, grid, nu, order=order, label=label))
        except DegeneratePath as exc:
            click.echo(f"Warning: period {label!r} omitted: {exc}", err=True)
    if not curves:
        raise DegeneratePath("every period is degenerate; no curve to report")
    return curves


def _emit_curves(ctx, obj, out, inputs, config):
    if out is None:
        write_curves(obj, sys.stdout, "csv")
        return
    write_curves(obj, out)
    write_manifest(ctx, out, config=config, inputs=inputs)


@cli.command()
@input_options
@grid_options
@click.option("--out", type=click.Path(dir_okay=False), help="CSV or JSON file [default: CSV on stdout].")
@click.pass_context
def signature(ctx, p_min, p_max, p_steps, nu, order, out, **inputs):
    """Roughness signature curve of every period or path column."""
    panel = load_input(**inputs)
    curves = panel_curves(panel, _grid(p_min, p_max, p_steps), nu, order)
    config = {"periods": [c.label for c in curves], "panel": panel.metadata}
    _emit_curves(ctx, curves, out, [inputs["input_file"]], config)


def _parse_quantiles(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise click.BadParameter(f"expected comma-separated probabilities, got {text!r}") from None


@cli.command("quantile-signature")
@input_options
@grid_options
@click.option("--quantiles", default="0.25,0.5,0.75", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), help="CSV or JSON file [default: CSV on stdout].")
@click.pass_context
def quantile_signature_cmd(ctx, p_min, p_max, p_steps, nu, order, quantiles, out, **inputs):
    """Pointwise quantiles of the signature curves across periods."""
    panel = load_input(**inputs)
    curves = panel_curves(panel, _grid(p_min, p_max, p_steps), nu, order)
    summary = summarize(curves, _parse_quantiles(quantiles), metadata={"periods": [c.label for c in curves]})
    _emit_curves(ctx, summary, out, [inputs["input_file"]], {"panel": panel.metadata, **summary.metadata})


def _estimate(provider, tau, step, p_max=None, vectorized=False) -> dict:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        est = point_estimate(provider, tau, step, p_max=p_max, vectorized=vectorized)
    for w in caught:
        click.echo(f"Warning: {w.message}", err=True)
    return {"H_hat": est.h_hat, "tau": est.tau, "upper_limit": est.upper_limit, "clipped": est.clipped}


@cli.command("point-estimate")
@click.option("--input", "input_file", type=click.Path(exists=True, dir_okay=False), help="Panel or wide path CSV.")
@click.option("--curves", "curves_file", type=click.Path(exists=True, dir_okay=False), help="Curve CSV/JSON instead of raw data.")
@click.option("--layout", type=click.Choice(["auto", "panel", "wide"]), default="auto", show_default=True)
@click.option("--date-column", default="date", show_default=True)
@click.option("--value-column", default="value", show_default=True)
@click.option("--period-rule", default=CALENDAR_YEAR, show_default=True)
@click.option("--min-obs", type=click.IntRange(min=3), default=30, show_default=True)
@click.option("--sqrt", is_flag=True)
@click.option("--log", "log_values", is_flag=True)
@click.option("--columns")
@click.option("--tau", type=float, default=0.5, show_default=True, help="Lower integration limit.")
@click.option("--step", type=float, default=0.01, show_default=True, help="Trapezoid step in p.")
@click.option("--nu", type=click.IntRange(min=2), default=2, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), help="JSON file [default: stdout].")
@click.pass_context
def point_estimate_cmd(ctx, input_file, curves_file, tau, step, nu, out, **load_flags):
    """Point estimate of H: the signature averaged over [tau, 1/H(tau)].

    Reports every period and the pooled estimate computed from the median
    signature across periods.
    """
    if (input_file is None) == (curves_file is None):
        raise click.UsageError("give exactly one of --input and --curves")
    per_period = {}
    if curves_file is not None:
        table = read_curves(curves_file)
        curves = table.curves(nu=nu)
        p_max = float(table.p_grid[-1])
        for c in curves:
            try:
                per_period[c.label] = _estimate(curve_provider(c), tau, step, p_max)
            except RoughSigError as exc:
                per_period[c.label] = {"error": type(exc).__name__, "message": str(exc)}
        pooled_curve = curves[0] if len(curves) == 1 else quantile_signature(curves, [0.5])[0]
        pooled = _estimate(curve_provider(pooled_curve), tau, step, p_max)
        used = [c.label for c in curves]
        source = curves_file
    else:
        panel = load_input(input_file, **load_flags)
        paths = []
        for label, path in panel.items():
            try:
                per_period[label] = _estimate(path_provider(path, nu), tau, step, vectorized=True)
                paths.append(path)
            except DegeneratePath as exc:
                click.echo(f"Warning: period {label!r} omitted: {exc}", err=True)
            except RoughSigError as exc:
                per_period[label] = {"error": type(exc).__name__, "message": str(exc)}
                paths.append(path)
        if not paths:
            raise EmptyPanel("every period is degenerate")
        used = [label for label in panel.labels if label in per_period]
        pooled = _estimate(median_provider(paths, nu), tau, step, vectorized=True)
        source = input_file
    result = {**pooled, "periods_used": used, "per_period": per_period}
    text = json.dumps(result, indent=2) + "\n"
    if out is None:
        click.echo(text, nl=False)
        return
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(text)
    write_manifest(ctx, out, config={"tau": tau, "step": step, "nu": nu}, inputs=[source])


@cli.command()
@model_options
@click.option("--n", "n", type=click.IntRange(min=3), default=2000, show_default=True, help="Observations per period.")
@click.option("--delta", type=float, help="Sampling step [default: 1/n].")
@click.option("--replications", type=click.IntRange(min=1), default=500, show_default=True)
@click.option("--p-min", type=float, default=0.1, show_default=True)
@click.option("--p-max", type=float, default=10.0, show_default=True)
@click.option("--p-steps", type=click.IntRange(min=1), default=100, show_default=True)
@click.option("--nu", type=click.IntRange(min=2), default=2, show_default=True)
@click.option("--quantiles", default="0.25,0.5,0.75", show_default=True)
@click.option("--seed", type=click.IntRange(min=0), default=0, show_default=True, help="Master seed.")
@click.option("--overlay", type=click.Choice(["auto", "none"]), default="auto", show_default=True)
@click.option("--workers", type=click.IntRange(min=1), help="Worker processes [default: $ROUGHSIG_WORKERS or 1].")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.pass_context
def montecarlo(ctx, n, delta, replications, p_min, p_max, p_steps, nu, quantiles, seed, overlay, workers, out, **model_flags):
    """Quantile signature over seeded replications, with the theoretical limit."""
    spec, hybrid, series = build_model(model_flags)
    config = ExperimentConfig(
        spec,
        n,
        replications,
        delta,
        GridSpec(p_min, p_max, p_steps),
        nu,
        _parse_quantiles(quantiles),
        seed,
        default_overlay(spec) if overlay == "auto" else None,
        hybrid,
        series,
    )
    summary = run_experiment(config, workers)
    excluded = summary.metadata["excluded"]
    if excluded:
        click.echo(f"Warning: {excluded} degenerate replications excluded", err=True)
    write_curves(summary, out)
    write_manifest(ctx, out, config=config.to_dict(), seed=seed)


@cli.command()
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), help="Write here instead of the recorded output.")
@click.option("--workers", type=click.IntRange(min=1), help="Override the worker count (montecarlo).")
@click.pass_context
def replay(ctx, manifest, out, workers):
    """Rerun the command recorded in MANIFEST and compare output digests."""
    with open(manifest, encoding="utf-8") as fh:
        data = json.load(fh)
    command = cli.commands.get(data.get("command", ""))
    if command is None or command is replay:
        raise InvalidParameter(f"manifest names no replayable command: {data.get('command')!r}")
    for file, digest in data["inputs"].items():
        if _sha256(file) != digest:
            raise RoughSigError(f"input {file} changed since the manifest was written")
    params = dict(data["params"])
    (recorded_out, recorded_digest), = data["outputs"].items()
    params["out"] = out or recorded_out
    if workers is not None and "workers" in params:
        params["workers"] = workers
    ctx.invoke(command, **params)
    digest = _sha256(params["out"])
    if digest != recorded_digest:
        raise RoughSigError(f"replayed output {params['out']} differs from the recorded digest")
    click.echo(f"reproduced {params['out']} (sha256 {digest[:16]})")


def main(argv=None):
    cli.main(args=argv, prog_name="roughsig")


if __name__ == "__main__":
    main()
