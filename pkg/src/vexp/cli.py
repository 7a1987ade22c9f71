"""Command-line front end.

Subcommands: simulate | fit-mle | fit-bayes | forecast | spectrum |
coherence | glr | benchmark.  Options can come from flags or a JSON config
file (flags win); every run writes its outputs plus a metadata record
(seed, resolved settings, version, timestamp) into the output directory.
Report commands (forecast, spectrum, coherence) also render a PNG figure
next to the CSV unless --no-plot is given.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone
from types import SimpleNamespace

import numpy as np

from . import __version__
from .bayes import (
    PriorConfig,
    SsvsConfig,
    inclusion_frequencies,
    mcmc_run,
    model_from_state,
    posterior_summary,
    SsvsState,
)
from .forecast import forecast, holdout_benchmark, simulate
from .io import (
    load_chain,
    load_csv,
    load_model,
    save_chain,
    save_model,
    seasonal_difference,
    write_csv,
    write_table,
)
from .mle import FitConfig, fit_mle, glr_test
from .spectral import spectral_density_grid

ENV_OUTDIR = "VEXP_OUTPUT_DIR"


class CliError(Exception):
    """Validation failure; rendered as a one-line error with exit code 2."""


def _freq_grid(n):
    return np.pi * np.arange(1, n + 1) / n


def _thin(chain, max_draws):
    idx = chain.retained_indices()
    if len(idx) > max_draws:
        idx = idx[np.linspace(0, len(idx) - 1, max_draws).astype(int)]
    return idx


def _resolve(args, defaults):
    """Merge flag values over config-file values over hard defaults."""
    file_cfg = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"cannot read config file {args.config}: {exc}")
        if not isinstance(file_cfg, dict):
            raise CliError(f"config file {args.config} must hold a JSON object")
    out = {}
    for key, hard in defaults.items():
        val = getattr(args, key, None)
        if val is None:
            val = file_cfg.get(key, hard)
        out[key] = val
    return SimpleNamespace(**out)


def _outdir(opts):
    d = opts.outdir or os.environ.get(ENV_OUTDIR) or "."
    os.makedirs(d, exist_ok=True)
    return d


def _write_metadata(outdir, command, settings, outputs, seed=None):
    doc = {
        "command": command,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "seed": seed,
        "settings": settings,
        "outputs": outputs,
    }
    path = os.path.join(outdir, command.replace("-", "_") + "_meta.json")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(doc, fh, indent=2, default=str)
        fh.write("\n")
    return path


def _require(condition, message):
    if not condition:
        raise CliError(message)


def _parse_floats(text, what):
    try:
        return np.array([float(tok) for tok in str(text).split(",")])
    except ValueError:
        raise CliError(f"cannot parse {what}: {text!r}")


def _load_panel(opts):
    """Read the data file, applying the optional seasonal difference."""
    panel = load_csv(opts.data)
    lag = getattr(opts, "difference", None)
    if lag is not None and int(lag) > 0:
        if panel.T <= int(lag):
            raise CliError(
                f"cannot difference {panel.T} rows at lag {lag}"
            )
        panel = seasonal_difference(panel, int(lag))
    return panel


def _settings_dict(opts):
    return {k: (v.tolist() if isinstance(v, np.ndarray) else v)
            for k, v in vars(opts).items()}


# ---------------------------------------------------------------------------
# commands

def cmd_simulate(args):
    opts = _resolve(args, {
        "model": None, "T": None, "seed": 0, "burn": 0, "trunc": 15,
        "delta": None, "out": "simulated.csv", "outdir": None,
    })
    _require(opts.model, "simulate needs --model")
    _require(opts.T and int(opts.T) >= 1, "simulate needs --T >= 1")
    model, delta = load_model(opts.model)
    if opts.delta is not None:
        delta = _parse_floats(opts.delta, "--delta")
        _require(delta.size == model.m, f"--delta must have {model.m} entries")
    outdir = _outdir(opts)
    panel = simulate(model, delta=delta, T=int(opts.T), seed=int(opts.seed),
                     trunc=int(opts.trunc), burn=int(opts.burn))
    out_path = os.path.join(outdir, opts.out)
    write_csv(panel, out_path)
    meta = _write_metadata(outdir, "simulate", _settings_dict(opts),
                           [out_path], seed=int(opts.seed))
    print(f"wrote {out_path} ({panel.T} rows x {panel.m} series), {meta}")
    return 0


def _fit_config(opts, q):
    return FitConfig(
        objective=opts.objective,
        tol=float(opts.tol),
        max_iter=int(opts.max_iter),
        trunc=None if opts.trunc is None else int(opts.trunc),
        deviance_method=opts.deviance_method,
        bounds=None if opts.bounds is None else float(opts.bounds),
        sparsify=bool(opts.sparsify),
        sparsify_z=float(opts.sparsify_z),
        compute_std_errors=not bool(opts.no_std_errors),
    )


def cmd_fit_mle(args):
    opts = _resolve(args, {
        "data": None, "q": None, "objective": "gaussian", "trunc": None,
        "tol": 1e-6, "max_iter": 500, "bounds": None, "sparsify": False,
        "sparsify_z": 1.96, "deviance_method": "banded",
        "no_std_errors": False, "difference": None, "outdir": None,
    })
    _require(opts.data, "fit-mle needs --data")
    _require(opts.q is not None and int(opts.q) >= 0, "fit-mle needs --q >= 0")
    panel = _load_panel(opts)
    fit = fit_mle(panel, int(opts.q), _fit_config(opts, int(opts.q)))
    outdir = _outdir(opts)
    model_path = os.path.join(outdir, "model_mle.json")
    save_model(model_path, fit.model, delta=fit.mean)
    report = {
        "objective_kind": fit.objective_kind,
        "objective_value": fit.objective_value,
        "mean_deviance": fit.mean_deviance(),
        "n_obs": fit.n_obs,
        "n_params": int(fit.params.size),
        "iterations": fit.iterations,
        "converged": fit.converged,
        "message": fit.message,
        "params": {
            name: {"estimate": float(est), "std_error": float(se)}
            for name, est, se in zip(fit.param_labels, fit.params,
                                     fit.std_errors)
        },
        "mean": fit.mean.tolist(),
        "mean_std_errors": fit.mean_std_errors.tolist(),
        "zero_mask": None if fit.zero_mask is None else
            [bool(b) for b in fit.zero_mask],
    }
    report_path = os.path.join(outdir, "fit_mle_report.json")
    with open(report_path, "w", encoding="utf-8", newline="") as fh:
        json.dump(report, fh, indent=2, allow_nan=True)
        fh.write("\n")
    meta = _write_metadata(outdir, "fit-mle", _settings_dict(opts),
                           [model_path, report_path])
    status = "converged" if fit.converged else "NOT converged"
    print(f"fit-mle {status}: objective {fit.objective_value:.6g} "
          f"after {fit.iterations} iterations; wrote {model_path}, "
          f"{report_path}, {meta}")
    return 0


def cmd_fit_bayes(args):
    opts = _resolve(args, {
        "data": None, "q": None, "iterations": 60000, "burn_in": 40000,
        "seed": 0, "ssvs": True, "tau": 0.1, "c": 10.0, "pi": 0.5,
        "ig_a": 2.1, "ig_b": 1.1, "sigma_v": 10.0, "likelihood": "gaussian",
        "trunc": None, "initial_scale": 0.1, "adapt_interval": 100,
        "difference": None, "outdir": None,
    })
    _require(opts.data, "fit-bayes needs --data")
    _require(opts.q is not None and int(opts.q) >= 1, "fit-bayes needs --q >= 1")
    _require(int(opts.iterations) > int(opts.burn_in),
             "--iterations must exceed --burn-in")
    panel = _load_panel(opts)
    ssvs = SsvsConfig(tau=float(opts.tau), c=float(opts.c), pi=float(opts.pi),
                      enabled=bool(opts.ssvs))
    priors = PriorConfig(ig_a=float(opts.ig_a), ig_b=float(opts.ig_b),
                         sigma_v=float(opts.sigma_v))
    chain = mcmc_run(
        panel, int(opts.q), iterations=int(opts.iterations),
        burn_in=int(opts.burn_in), seed=int(opts.seed), priors=priors,
        ssvs=ssvs, trunc=None if opts.trunc is None else int(opts.trunc),
        likelihood=opts.likelihood, initial_scale=float(opts.initial_scale),
        adapt_interval=int(opts.adapt_interval),
    )
    outdir = _outdir(opts)
    chain_path = os.path.join(outdir, "chain.ndjson")
    save_chain(chain_path, chain)
    summary = posterior_summary(chain)
    summary_path = os.path.join(outdir, "posterior_summary.csv")
    quant_keys = [k for k in summary[0] if k.startswith("q")]
    write_table(
        summary_path,
        ["param", "mean", "sd", *quant_keys],
        [[row["param"], row["mean"], row["sd"], *(row[k] for k in quant_keys)]
         for row in summary],
    )
    idx = chain.retained_indices()
    mean_state = SsvsState(
        v=chain.v_draws[idx].mean(axis=0),
        gamma=(chain.gamma_draws[idx].mean(axis=0) >= 0.5).astype(np.int8),
        omega0=chain.omega0_draws[idx].mean(axis=0),
        gamma_omega0=(chain.gamma_omega0_draws[idx].mean(axis=0) >= 0.5
                      ).astype(np.int8),
        delta=chain.delta_draws[idx].mean(axis=0),
        var_mu=chain.var_mu_draws[idx].mean(axis=0),
        var_omega0=chain.var_omega0_draws[idx].mean(axis=0),
    )
    model_path = os.path.join(outdir, "model_bayes.json")
    save_model(model_path, model_from_state(mean_state, chain.m, chain.q),
               delta=mean_state.delta)
    outputs = [chain_path, summary_path, model_path]
    if ssvs.enabled:
        inc = inclusion_frequencies(chain)
        inc_path = os.path.join(outdir, "inclusion.json")
        with open(inc_path, "w", encoding="utf-8", newline="") as fh:
            json.dump(inc, fh, indent=2)
            fh.write("\n")
        outputs.append(inc_path)
    meta = _write_metadata(outdir, "fit-bayes", _settings_dict(opts),
                           outputs, seed=int(opts.seed))
    print(f"fit-bayes done: {chain.total} draws ({chain.burn_in} burn-in); "
          f"wrote {', '.join(outputs)}, {meta}")
    return 0


def cmd_forecast(args):
    opts = _resolve(args, {
        "data": None, "model": None, "chain": None, "h": 12,
        "coverage": 0.95, "trunc": None, "max_draws": 1000, "plot": True,
        "difference": None, "outdir": None,
    })
    _require(opts.data, "forecast needs --data")
    _require(opts.model or opts.chain, "forecast needs --model or --chain")
    _require(0.0 < float(opts.coverage) < 1.0, "--coverage must be in (0, 1)")
    _require(int(opts.h) >= 1, "--h must be >= 1")
    panel = _load_panel(opts)
    h = int(opts.h)
    trunc = None if opts.trunc is None else int(opts.trunc)
    if opts.chain:
        chain = load_chain(opts.chain)
        _require(chain.m == panel.m, "chain and data dimensions differ")
        result = forecast(panel, None, h=h, coverage=float(opts.coverage),
                          trunc=trunc, chain=chain,
                          max_draws=int(opts.max_draws))
    else:
        model, delta = load_model(opts.model)
        _require(model.m == panel.m, "model and data dimensions differ")
        result = forecast(panel, model, delta=delta, h=h,
                          coverage=float(opts.coverage), trunc=trunc)
    outdir = _outdir(opts)
    names = panel.names or tuple(f"x{j + 1}" for j in range(panel.m))
    header = ["step"]
    for name in names:
        header += [f"{name}_point", f"{name}_lower", f"{name}_upper"]
    rows = []
    for step in range(h):
        row = [float(step + 1)]
        for j in range(panel.m):
            row += [result.point[step, j], result.lower[step, j],
                    result.upper[step, j]]
        rows.append(row)
    csv_path = os.path.join(outdir, "forecast.csv")
    write_table(csv_path, header, rows)
    outputs = [csv_path]
    if opts.plot:
        from .plots import plot_forecast

        png_path = os.path.join(outdir, "forecast.png")
        plot_forecast(png_path, panel.values, result, names=names)
        outputs.append(png_path)
    meta = _write_metadata(outdir, "forecast", _settings_dict(opts), outputs)
    print(f"wrote {', '.join(outputs)}, {meta}")
    return 0


def _model_draws_for_report(opts):
    """Models to evaluate: thinned posterior draws, or the single model file."""
    if opts.chain:
        chain = load_chain(opts.chain)
        idx = _thin(chain, int(opts.max_draws))
        return [chain.model(i) for i in idx]
    model, _ = load_model(opts.model)
    return [model]


def cmd_spectrum(args):
    opts = _resolve(args, {
        "model": None, "chain": None, "grid": 256, "max_draws": 500,
        "plot": True, "outdir": None,
    })
    _require(opts.model or opts.chain, "spectrum needs --model or --chain")
    _require(int(opts.grid) >= 2, "--grid must be >= 2")
    models = _model_draws_for_report(opts)
    freqs = _freq_grid(int(opts.grid))
    acc = np.zeros((len(freqs), models[0].m, models[0].m), dtype=complex)
    for mod in models:
        acc += spectral_density_grid(mod, freqs)
    spectra = acc / len(models)
    m = models[0].m
    header = ["lambda"]
    for i in range(m):
        for j in range(i, m):
            header += [f"f{i + 1}{j + 1}_re", f"f{i + 1}{j + 1}_im"]
    rows = []
    for k, lam in enumerate(freqs):
        row = [lam]
        for i in range(m):
            for j in range(i, m):
                row += [float(np.real(spectra[k, i, j])),
                        float(np.imag(spectra[k, i, j]))]
        rows.append(row)
    outdir = _outdir(opts)
    csv_path = os.path.join(outdir, "spectrum.csv")
    write_table(csv_path, header, rows)
    outputs = [csv_path]
    if opts.plot:
        from .plots import plot_spectrum

        png_path = os.path.join(outdir, "spectrum.png")
        plot_spectrum(png_path, freqs, spectra)
        outputs.append(png_path)
    meta = _write_metadata(outdir, "spectrum", _settings_dict(opts), outputs)
    print(f"wrote {', '.join(outputs)}, {meta}")
    return 0


def cmd_coherence(args):
    opts = _resolve(args, {
        "model": None, "chain": None, "grid": 256, "coverage": 0.95,
        "pair": "1,2", "max_draws": 500, "plot": True, "outdir": None,
    })
    _require(opts.model or opts.chain, "coherence needs --model or --chain")
    _require(int(opts.grid) >= 2, "--grid must be >= 2")
    pair_f = _parse_floats(opts.pair, "--pair")
    _require(pair_f.size == 2, "--pair must name two series, e.g. 1,2")
    pair = (int(pair_f[0]) - 1, int(pair_f[1]) - 1)
    models = _model_draws_for_report(opts)
    m = models[0].m
    _require(0 <= pair[0] < m and 0 <= pair[1] < m and pair[0] != pair[1],
             f"--pair out of range for m={m}")
    freqs = _freq_grid(int(opts.grid))
    curves = np.empty((len(models), len(freqs)))
    for k, mod in enumerate(models):
        f = spectral_density_grid(mod, freqs)
        num = np.abs(f[:, pair[0], pair[1]]) ** 2
        den = np.real(f[:, pair[0], pair[0]]) * np.real(f[:, pair[1], pair[1]])
        curves[k] = num / den
    rho = curves.mean(axis=0)
    if len(models) > 1:
        alpha = 1.0 - float(opts.coverage)
        lower = np.quantile(curves, alpha / 2, axis=0)
        upper = np.quantile(curves, 1.0 - alpha / 2, axis=0)
    else:
        lower = upper = rho
    outdir = _outdir(opts)
    csv_path = os.path.join(outdir, "coherence.csv")
    write_table(csv_path, ["lambda", "rho2", "lower", "upper"],
                [[lam, r, lo, up]
                 for lam, r, lo, up in zip(freqs, rho, lower, upper)])
    outputs = [csv_path]
    if opts.plot:
        from .plots import plot_coherence

        png_path = os.path.join(outdir, "coherence.png")
        plot_coherence(png_path, freqs, rho,
                       lower if len(models) > 1 else None,
                       upper if len(models) > 1 else None)
        outputs.append(png_path)
    meta = _write_metadata(outdir, "coherence", _settings_dict(opts), outputs)
    print(f"wrote {', '.join(outputs)}, {meta}")
    return 0


def cmd_glr(args):
    opts = _resolve(args, {
        "nested": None, "nesting": None, "nested_deviance": None,
        "nesting_deviance": None, "df": None, "T": None, "outdir": None,
    })
    if opts.nested and opts.nesting:
        with open(opts.nested, encoding="utf-8") as fh:
            rep_nested = json.load(fh)
        with open(opts.nesting, encoding="utf-8") as fh:
            rep_nesting = json.load(fh)
        d_nested = rep_nested["mean_deviance"]
        d_nesting = rep_nesting["mean_deviance"]
        T = rep_nested["n_obs"]
        _require(rep_nesting["n_obs"] == T,
                 "fits were produced from different sample sizes")
        df = opts.df or rep_nesting["n_params"] - rep_nested["n_params"]
    else:
        _require(opts.nested_deviance is not None
                 and opts.nesting_deviance is not None,
                 "glr needs two fit reports or two per-observation deviances")
        _require(opts.df is not None and opts.T is not None,
                 "glr with raw deviances needs --df and --T")
        d_nested = float(opts.nested_deviance)
        d_nesting = float(opts.nesting_deviance)
        T, df = int(opts.T), int(opts.df)
    _require(df and int(df) > 0, "degrees of freedom must be positive")
    res = glr_test(d_nested, d_nesting, int(df), int(T))
    outdir = _outdir(opts)
    out_path = os.path.join(outdir, "glr.json")
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        json.dump({"statistic": res.statistic, "p_value": res.p_value,
                   "df": res.df, "T": int(T)}, fh, indent=2)
        fh.write("\n")
    meta = _write_metadata(outdir, "glr", _settings_dict(opts), [out_path])
    print(f"GLR statistic={res.statistic:.6g} df={res.df} "
          f"p={res.p_value:.6g}; wrote {out_path}, {meta}")
    return 0


def cmd_benchmark(args):
    opts = _resolve(args, {
        "data": None, "q": None, "holdout": 12, "objective": "gaussian",
        "trunc": None, "tol": 1e-6, "max_iter": 500, "bounds": None,
        "sparsify": False, "sparsify_z": 1.96, "deviance_method": "banded",
        "no_std_errors": True, "difference": None, "outdir": None,
    })
    _require(opts.data, "benchmark needs --data")
    _require(opts.q is not None and int(opts.q) >= 1, "benchmark needs --q >= 1")
    _require(int(opts.holdout) >= 1, "--holdout must be >= 1")
    panel = _load_panel(opts)
    cfg = _fit_config(opts, int(opts.q))
    cfg.compute_std_errors = False
    res = holdout_benchmark(panel, int(opts.q), holdout=int(opts.holdout),
                            fit_config=cfg)
    outdir = _outdir(opts)
    names = panel.names or tuple(f"x{j + 1}" for j in range(panel.m))
    rows = [[name, res["vexp_mspe"][j], res["var1_mspe"][j]]
            for j, name in enumerate(names)]
    rows.append(["total", res["vexp_total"], res["var1_total"]])
    csv_path = os.path.join(outdir, "benchmark.csv")
    write_table(csv_path, ["series", "vexp_mspe", "var1_mspe"], rows)
    meta = _write_metadata(outdir, "benchmark", _settings_dict(opts),
                           [csv_path])
    winner = "VEXP" if res["vexp_total"] < res["var1_total"] else "VAR(1)"
    print(f"holdout MSPE: vexp={res['vexp_total']:.6g} "
          f"var1={res['var1_total']:.6g} ({winner} wins); "
          f"wrote {csv_path}, {meta}")
    return 0


# ---------------------------------------------------------------------------
# parser

def _build_parser():
    parser = argparse.ArgumentParser(
        prog="vexp",
        description="Cepstral modeling of multivariate time series: "
                    "simulation, likelihood and Bayesian fitting, "
                    "forecasting, and spectral reports.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--outdir", help="output directory (default: "
                       f"${ENV_OUTDIR} or '.')")
        p.add_argument("--config", help="JSON config file; flags win")

    p = sub.add_parser("simulate", help="draw a sample path from a model file")
    common(p)
    p.add_argument("--model"); p.add_argument("--T", type=int)
    p.add_argument("--seed", type=int); p.add_argument("--burn", type=int)
    p.add_argument("--trunc", type=int); p.add_argument("--delta")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit-mle", help="maximum-likelihood fit")
    common(p)
    p.add_argument("--data"); p.add_argument("--q", type=int)
    p.add_argument("--objective",
                   choices=["gaussian", "whittle", "approx_whittle"])
    p.add_argument("--trunc", type=int); p.add_argument("--tol", type=float)
    p.add_argument("--max-iter", dest="max_iter", type=int)
    p.add_argument("--bounds", type=float)
    p.add_argument("--sparsify", action=argparse.BooleanOptionalAction)
    p.add_argument("--sparsify-z", dest="sparsify_z", type=float)
    p.add_argument("--deviance-method", dest="deviance_method",
                   choices=["banded", "levinson"])
    p.add_argument("--no-std-errors", dest="no_std_errors",
                   action="store_const", const=True)
    p.add_argument("--difference", type=int,
                   help="apply a lag-s difference before fitting")
    p.set_defaults(func=cmd_fit_mle)

    p = sub.add_parser("fit-bayes", help="Metropolis-within-Gibbs posterior")
    common(p)
    p.add_argument("--data"); p.add_argument("--q", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--burn-in", dest="burn_in", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--ssvs", action=argparse.BooleanOptionalAction)
    p.add_argument("--tau", type=float); p.add_argument("--c", type=float)
    p.add_argument("--pi", type=float)
    p.add_argument("--ig-a", dest="ig_a", type=float)
    p.add_argument("--ig-b", dest="ig_b", type=float)
    p.add_argument("--sigma-v", dest="sigma_v", type=float)
    p.add_argument("--likelihood", choices=["gaussian", "whittle"])
    p.add_argument("--trunc", type=int)
    p.add_argument("--initial-scale", dest="initial_scale", type=float)
    p.add_argument("--adapt-interval", dest="adapt_interval", type=int)
    p.add_argument("--difference", type=int)
    p.set_defaults(func=cmd_fit_bayes)

    p = sub.add_parser("forecast", help="multi-step forecasts with intervals")
    common(p)
    p.add_argument("--data"); p.add_argument("--model")
    p.add_argument("--chain"); p.add_argument("--h", type=int)
    p.add_argument("--coverage", type=float); p.add_argument("--trunc", type=int)
    p.add_argument("--max-draws", dest="max_draws", type=int)
    p.add_argument("--plot", action=argparse.BooleanOptionalAction)
    p.add_argument("--difference", type=int)
    p.set_defaults(func=cmd_forecast)

    p = sub.add_parser("spectrum", help="spectral density over a grid")
    common(p)
    p.add_argument("--model"); p.add_argument("--chain")
    p.add_argument("--grid", type=int)
    p.add_argument("--max-draws", dest="max_draws", type=int)
    p.add_argument("--plot", action=argparse.BooleanOptionalAction)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("coherence", help="squared coherence over a grid")
    common(p)
    p.add_argument("--model"); p.add_argument("--chain")
    p.add_argument("--grid", type=int); p.add_argument("--coverage", type=float)
    p.add_argument("--pair")
    p.add_argument("--max-draws", dest="max_draws", type=int)
    p.add_argument("--plot", action=argparse.BooleanOptionalAction)
    p.set_defaults(func=cmd_coherence)

    p = sub.add_parser("glr", help="nested-model likelihood-ratio test")
    common(p)
    p.add_argument("--nested"); p.add_argument("--nesting")
    p.add_argument("--nested-deviance", dest="nested_deviance", type=float)
    p.add_argument("--nesting-deviance", dest="nesting_deviance", type=float)
    p.add_argument("--df", type=int); p.add_argument("--T", type=int)
    p.set_defaults(func=cmd_glr)

    p = sub.add_parser("benchmark",
                       help="holdout forecast comparison vs OLS VAR(1)")
    common(p)
    p.add_argument("--data"); p.add_argument("--q", type=int)
    p.add_argument("--holdout", type=int)
    p.add_argument("--objective",
                   choices=["gaussian", "whittle", "approx_whittle"])
    p.add_argument("--trunc", type=int)
    p.add_argument("--difference", type=int)
    p.set_defaults(func=cmd_benchmark)

    return parser


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: missing file: {exc.filename or exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, OSError) as exc:
        message = " ".join(str(exc).split())
        print(f"error: {message}", file=sys.stderr)
        return 1


def run_command(argv):
    """Programmatic entry point; returns the process exit code."""
    return main(list(argv))


if __name__ == "__main__":
    sys.exit(main())
