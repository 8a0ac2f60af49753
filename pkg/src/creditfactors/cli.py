"""Command-line front end.

Subcommands chain panel construction, stationarity and cointegration tests,
regressions, canonical correlation analysis, and the missing-factor diagnostic
into file-based pipelines. Settings come from flags or from a plain-text
config file of `key = value` lines; flags win. Exit codes: 0 success, 2 usage
error, 3 data error, 4 numerical error.
"""

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from . import cca as cca_mod
from . import factor_model as fm
from . import panel as panel_mod
from . import regress as regress_mod
from . import stattests as st
from . import synthgen
from .errors import DataError, NumericalError
from .tables import write_csv

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4

TRANSFORM_LEVELS = "levels"
TRANSFORM_DIFF = "diff"

CONFIG_KEYS = {
    "loans", "yields", "spreads", "macro", "panel", "spec",
    "transform", "align", "factors", "lags", "kind",
    "strong", "weak", "ridge", "seed", "out",
}

_SIM_START = panel_mod.Month(2000, 1)


class UsageError(Exception):
    """Malformed invocation: bad flags, bad config keys, missing settings."""


# ---------------------------------------------------------------------------
# settings plumbing
# ---------------------------------------------------------------------------

def load_config(path) -> dict:
    """Parse a `key = value` settings file. '#' starts a comment line."""
    if not os.path.exists(path):
        raise UsageError(f"config file not found: {path}")
    cfg = {}
    with open(path) as fh:
        for i, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"{path}:{i}: expected 'key = value', got {line!r}")
            key = key.strip()
            value = value.strip()
            if key not in CONFIG_KEYS:
                raise UsageError(f"{path}:{i}: unknown setting {key!r}")
            cfg[key] = value
    return cfg


class Settings:
    """Flag values layered over config-file values layered over defaults."""

    def __init__(self, args):
        self.args = vars(args)
        self.cfg = load_config(args.config) if getattr(args, "config", None) else {}

    def get(self, key, default=None, cast=None, choices=None):
        value = self.args.get(key)
        if value is None:
            value = self.cfg.get(key)
        if value is None:
            value = default
        if value is None:
            return None
        if cast is not None and isinstance(value, str):
            try:
                value = cast(value)
            except ValueError:
                raise UsageError(f"setting {key!r}: cannot parse {value!r}") from None
        if choices is not None and value not in choices:
            raise UsageError(f"setting {key!r}: {value!r} is not one of {sorted(choices)}")
        return value

    def require(self, key, cast=None, choices=None):
        value = self.get(key, cast=cast, choices=choices)
        if value is None:
            raise UsageError(f"missing required setting {key!r} (flag --{key} or config)")
        return value

    def out_dir(self, default="."):
        out = self.get("out", default=default)
        os.makedirs(out, exist_ok=True)
        return out


def _meta(n_obs, transform, align_policy, extra=""):
    line = f"n_obs={n_obs} transform={transform} align={align_policy}"
    return f"{line} {extra}".strip()


def _emit(path, header, rows, comment):
    write_csv(path, header, rows, comment=comment)
    print(f"wrote {path}")


# ---------------------------------------------------------------------------
# shared data loading
# ---------------------------------------------------------------------------

def _load_spread_levels(s: Settings) -> panel_mod.AlignedPanel:
    spreads_path = s.get("spreads")
    if spreads_path is not None:
        return panel_mod.read_panel_csv(spreads_path, kind=panel_mod.KIND_SPREAD_LEVEL)
    loans_path = s.get("loans")
    yields_path = s.get("yields")
    if loans_path is None or yields_path is None:
        raise UsageError("need either spreads=PATH or both loans=PATH and yields=PATH")
    rates = panel_mod.aggregate_loans(panel_mod.read_loans_csv(loans_path))
    curve = panel_mod.read_yields_csv(yields_path)
    return panel_mod.to_spreads(rates, curve)


def _prepare_xy(s: Settings):
    """Aligned response/predictor matrices plus the settings that shaped them."""
    transform = s.get("transform", default=TRANSFORM_DIFF,
                      choices={TRANSFORM_LEVELS, TRANSFORM_DIFF})
    policy = s.get("align", default=panel_mod.ALIGN_INTERSECT,
                   choices={panel_mod.ALIGN_INTERSECT, panel_mod.ALIGN_UNION})
    spread_levels = _load_spread_levels(s)
    macro = panel_mod.read_panel_csv(s.require("macro"), kind=panel_mod.KIND_MACRO)
    y_panel = (panel_mod.first_difference(spread_levels)
               if transform == TRANSFORM_DIFF else spread_levels)
    combined = panel_mod.align([y_panel, macro], policy)
    y_names = list(y_panel.names)
    z_names = list(macro.names)
    return combined, y_names, z_names, transform, policy, spread_levels


def _matrix(combined, names):
    return np.column_stack([combined.column(n) for n in names])


def _summary_table(p: panel_mod.AlignedPanel):
    header = ["", "N", "Mean", "SD", "Min", "Max"]
    rows = []
    for name in p.names:
        col = p.column(name)
        vals = col[~np.isnan(col)]
        if vals.size == 0:
            rows.append([name, "0", "", "", "", ""])
            continue
        sd = format(vals.std(ddof=1), ".4f") if vals.size > 1 else ""
        rows.append([name, str(vals.size), format(vals.mean(), ".4f"), sd,
                     format(vals.min(), ".4f"), format(vals.max(), ".4f")])
    return header, rows


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_aggregate(args) -> int:
    s = Settings(args)
    loans = s.require("loans")
    yields_path = s.require("yields")
    out = s.out_dir()
    rates = panel_mod.aggregate_loans(panel_mod.read_loans_csv(loans))
    spreads = panel_mod.to_spreads(rates, panel_mod.read_yields_csv(yields_path))
    path = os.path.join(out, "spreads.csv")
    panel_mod.write_panel_csv(spreads, path,
                              comment=_meta(spreads.n_obs, TRANSFORM_LEVELS, "union"))
    print(f"wrote {path}")
    return EXIT_OK


def cmd_spreads(args) -> int:
    s = Settings(args)
    rates = panel_mod.read_panel_csv(s.require("panel"), kind=panel_mod.KIND_RATE)
    curve = panel_mod.read_yields_csv(s.require("yields"))
    spreads = panel_mod.to_spreads(rates, curve)
    out = s.out_dir()
    path = os.path.join(out, "spreads.csv")
    panel_mod.write_panel_csv(spreads, path,
                              comment=_meta(spreads.n_obs, TRANSFORM_LEVELS, "union"))
    print(f"wrote {path}")
    return EXIT_OK


def cmd_adf(args) -> int:
    s = Settings(args)
    p = panel_mod.read_panel_csv(s.require("panel"))
    lags = s.get("lags", cast=int)
    kind = s.get("kind", default=st.REGRESSION_CONSTANT_TREND,
                 choices=set(st.REGRESSION_KINDS))
    results = {}
    for name in p.names:
        series = p.complete_column(name)
        results[name] = st.adf_test(series, lag_order=lags, kind=kind)
    header, rows = st.adf_table(results)
    out = s.out_dir()
    lag_note = "auto" if lags is None else str(lags)
    _emit(os.path.join(out, "adf.csv"), header, rows,
          _meta(p.n_obs, TRANSFORM_LEVELS, "none", f"kind={kind} lags={lag_note}"))
    return EXIT_OK


def cmd_johansen(args) -> int:
    s = Settings(args)
    p = panel_mod.read_panel_csv(s.require("panel"))
    lags = s.get("lags", default=2, cast=int)
    complete = panel_mod.align([p], panel_mod.ALIGN_INTERSECT)
    result = st.johansen_trace(complete, lag_order=lags)
    header, rows = st.johansen_table(result)
    out = s.out_dir()
    _emit(os.path.join(out, "johansen.csv"), header, rows,
          _meta(result.n_obs, TRANSFORM_LEVELS, panel_mod.ALIGN_INTERSECT, f"lags={lags}"))
    return EXIT_OK


def cmd_ols(args) -> int:
    s = Settings(args)
    combined, y_names, z_names, transform, policy, _ = _prepare_xy(s)
    X = _matrix(combined, z_names)
    fits = [regress_mod.ols(combined.column(n), X, response_name=n,
                            predictor_names=z_names) for n in y_names]
    header, rows = regress_mod.fit_table(fits)
    out = s.out_dir()
    _emit(os.path.join(out, "ols.csv"), header, rows,
          _meta(combined.n_obs, transform, policy))
    return EXIT_OK


def cmd_stepwise(args) -> int:
    s = Settings(args)
    combined, y_names, z_names, transform, policy, _ = _prepare_xy(s)
    X = _matrix(combined, z_names)
    fits, trace_rows = [], []
    for n in y_names:
        fit, trace = regress_mod.stepwise_aic(combined.column(n), X, response_name=n,
                                              predictor_names=z_names)
        fits.append(fit)
        trace_rows.append([n, "0", "start", "", format(trace.initial_aic, ".4f")])
        for i, step in enumerate(trace.steps, start=1):
            trace_rows.append([n, str(i), step.action, step.predictor,
                               format(step.aic_after, ".4f")])
    header, rows = regress_mod.fit_table(
        fits, predictors=[regress_mod.INTERCEPT] + z_names)
    out = s.out_dir()
    meta = _meta(combined.n_obs, transform, policy)
    _emit(os.path.join(out, "stepwise.csv"), header, rows, meta)
    _emit(os.path.join(out, "stepwise_trace.csv"),
          ["response", "step", "action", "predictor", "aic"], trace_rows, meta)
    return EXIT_OK


def _fit_cca(s: Settings, combined, y_names, z_names):
    ridge = s.get("ridge", default=0.0, cast=float)
    Y = _matrix(combined, y_names)
    Z = _matrix(combined, z_names)
    return cca_mod.cca_fit(Y, Z, ridge=ridge), Y, Z


def _write_cca_tables(out, sol, meta):
    rows = cca_mod.eigen_table(sol)
    header, body = cca_mod.eigen_table_rows(rows)
    _emit(os.path.join(out, "cca_eigen.csv"), header, body, meta)
    wrows = cca_mod.wilks_lambda(sol)
    header, body = cca_mod.wilks_table_rows(wrows, sol.correlations)
    _emit(os.path.join(out, "cca_wilks.csv"), header, body, meta)


def cmd_cca(args) -> int:
    s = Settings(args)
    combined, y_names, z_names, transform, policy, _ = _prepare_xy(s)
    sol, Y, Z = _fit_cca(s, combined, y_names, z_names)
    k_max = min(s.get("factors", default=3, cast=int), sol.m)
    out = s.out_dir()
    meta = _meta(combined.n_obs, transform, policy, f"ridge={sol.ridge}")
    _write_cca_tables(out, sol, meta)
    header, body = cca_mod.redundancy_table_rows(cca_mod.redundancy(sol, Y))
    _emit(os.path.join(out, "cca_redundancy.csv"), header, body, meta)
    loadings = cca_mod.cross_loadings(sol, Z, k_max=k_max)
    header, body = cca_mod.cross_loadings_table_rows(loadings, z_names)
    _emit(os.path.join(out, "cca_cross_loadings.csv"), header, body, meta)
    return EXIT_OK


def _retained_factors(s: Settings, sol):
    r = s.get("factors", default=3, cast=int)
    if r < 1:
        raise UsageError(f"factors must be >= 1, got {r}")
    return fm.FactorScores.from_solution(sol, r=min(r, sol.m))


def cmd_factor_regress(args) -> int:
    s = Settings(args)
    combined, y_names, z_names, transform, policy, _ = _prepare_xy(s)
    sol, Y, Z = _fit_cca(s, combined, y_names, z_names)
    factors = _retained_factors(s, sol)
    fits = fm.factor_regressions(combined.select(y_names), factors)
    header, rows = regress_mod.fit_table(fits)
    out = s.out_dir()
    _emit(os.path.join(out, "factor_regressions.csv"), header, rows,
          _meta(combined.n_obs, transform, policy, f"factors={factors.r}"))
    return EXIT_OK


def cmd_diagnose(args) -> int:
    s = Settings(args)
    combined, y_names, z_names, transform, policy, _ = _prepare_xy(s)
    sol, Y, Z = _fit_cca(s, combined, y_names, z_names)
    factors = _retained_factors(s, sol)
    strong = s.get("strong", default=0.30, cast=float)
    weak = s.get("weak", default=0.10, cast=float)
    fits = fm.factor_regressions(combined.select(y_names), factors)
    report = fm.missing_factor_diagnostic(fits, factors.scores, thresholds=(strong, weak))
    header, rows = fm.diagnostic_table_rows(report)
    out = s.out_dir()
    meta = _meta(combined.n_obs, transform, policy,
                 f"factors={factors.r} strong={strong} weak={weak} "
                 f"pc1_share={report.pc1_variance_share:.4f} verdict={report.verdict}")
    _emit(os.path.join(out, "diagnostic.csv"), header, rows, meta)
    print(f"verdict: {report.verdict}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    s = Settings(args)
    spec_path = s.require("spec")
    spec = _load_model_spec(spec_path)
    seed = s.get("seed", cast=int)
    if seed is not None:
        spec = dataclasses.replace(spec, seed=seed)
    ds = synthgen.generate(spec)
    out = s.out_dir()

    def as_panel(matrix, prefix, kind=panel_mod.KIND_MACRO):
        keys = tuple(panel_mod.SeriesKey(f"{prefix}{j + 1}", kind)
                     for j in range(matrix.shape[1]))
        return panel_mod.AlignedPanel(_SIM_START, keys, matrix)

    note = _meta(spec.n_periods, TRANSFORM_LEVELS, "none", f"seed={spec.seed}")
    written = {
        "responses.csv": as_panel(ds.responses, "Y", panel_mod.KIND_SPREAD_LEVEL),
        "proxies.csv": as_panel(ds.proxies, "Z"),
        "truth_proxied_factors.csv": as_panel(ds.proxied_factors, "F"),
        "truth_idiosyncratic.csv": as_panel(ds.idiosyncratic, "U"),
    }
    if spec.n_missing:
        written["truth_missing_factors.csv"] = as_panel(ds.missing_factors, "M")
    for fname, p in written.items():
        path = os.path.join(out, fname)
        panel_mod.write_panel_csv(p, path, comment=note)
        print(f"wrote {path}")
    echo = {
        "intercepts": spec.intercepts.tolist(),
        "proxied_loadings": spec.proxied_loadings.tolist(),
        "missing_loadings": spec.missing_loadings.tolist(),
        "proxy_projection": spec.proxy_projection.tolist(),
        "proxy_noise_scale": spec.proxy_noise_scale,
        "idio_variances": spec.idio_variances.tolist(),
        "n_periods": spec.n_periods,
        "seed": spec.seed,
    }
    echo_path = os.path.join(out, "spec_echo.json")
    with open(echo_path, "w") as fh:
        json.dump(echo, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {echo_path}")
    return EXIT_OK


_PRESETS = {
    "default": synthgen.default_spec,
    "no_missing_factor": synthgen.scenario_no_missing_factor,
    "missing_factor": synthgen.scenario_missing_factor,
}


def _load_model_spec(path) -> synthgen.FactorModelSpec:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise DataError(f"{path}: expected a JSON object")
    if "preset" in raw:
        name = raw["preset"]
        if name not in _PRESETS:
            raise DataError(f"{path}: unknown preset {name!r} "
                            f"(expected one of {sorted(_PRESETS)})")
        kwargs = {}
        if "seed" in raw:
            kwargs["seed"] = int(raw["seed"])
        if "n_periods" in raw:
            kwargs["n_periods"] = int(raw["n_periods"])
        extra = set(raw) - {"preset", "seed", "n_periods"}
        if extra:
            raise DataError(f"{path}: unexpected keys with preset: {sorted(extra)}")
        kwargs.setdefault("seed", 0)
        return _PRESETS[name](**kwargs)
    required = {"intercepts", "proxied_loadings", "proxy_projection",
                "proxy_noise_scale", "idio_variances", "n_periods", "seed"}
    missing = required - set(raw)
    if missing:
        raise DataError(f"{path}: missing keys: {sorted(missing)}")
    extra = set(raw) - required - {"missing_loadings"}
    if extra:
        raise DataError(f"{path}: unknown keys: {sorted(extra)}")
    n = len(raw["intercepts"])
    missing_loadings = raw.get("missing_loadings")
    if missing_loadings is None:
        missing_loadings = [[] for _ in range(n)]
    return synthgen.FactorModelSpec(
        intercepts=raw["intercepts"],
        proxied_loadings=raw["proxied_loadings"],
        missing_loadings=np.asarray(missing_loadings, dtype=float).reshape(n, -1),
        proxy_projection=raw["proxy_projection"],
        proxy_noise_scale=float(raw["proxy_noise_scale"]),
        idio_variances=raw["idio_variances"],
        n_periods=int(raw["n_periods"]),
        seed=int(raw["seed"]),
    )


# ---------------------------------------------------------------------------
# analyze: the full report bundle
# ---------------------------------------------------------------------------

def _column_groups(names):
    """Grade- and term-stacked groupings when every name parses as term-grade."""
    parsed = {}
    for name in names:
        try:
            term = panel_mod.term_of_series(name)
        except DataError:
            return None
        parsed[name] = (term, name.split("-", 1)[1])
    grades = sorted({g for _, g in parsed.values()})
    terms = sorted({t for t, _ in parsed.values()})
    grade_groups = {g: [n for n in names if parsed[n][1] == g] for g in grades}
    term_groups = {f"{t}-month": [n for n in names if parsed[n][0] == t] for t in terms}
    return grade_groups, term_groups


def _stacked(combined, members, X):
    y = np.concatenate([combined.column(n) for n in members])
    return y, np.tile(X, (len(members), 1))


def _grouped_fits(combined, groups, X, x_names):
    fits = []
    shared_design = None
    for label, members in groups.items():
        y, design = _stacked(combined, members, X)
        fits.append(regress_mod.ols(y, design, response_name=label,
                                    predictor_names=x_names))
        shared_design = design
    return fits, shared_design


def _grouped_stepwise(combined, groups, X, x_names):
    fits, trace_rows = [], []
    for label, members in groups.items():
        y, design = _stacked(combined, members, X)
        fit, trace = regress_mod.stepwise_aic(y, design, response_name=label,
                                              predictor_names=x_names)
        fits.append(fit)
        trace_rows.append([label, "0", "start", "", format(trace.initial_aic, ".4f")])
        for i, step in enumerate(trace.steps, start=1):
            trace_rows.append([label, str(i), step.action, step.predictor,
                               format(step.aic_after, ".4f")])
    return fits, trace_rows


def cmd_analyze(args) -> int:
    s = Settings(args)
    out = s.out_dir(default="report")
    combined, y_names, z_names, transform, policy, spread_levels = _prepare_xy(s)
    adf_kind = s.get("kind", default=st.REGRESSION_CONSTANT_TREND,
                     choices=set(st.REGRESSION_KINDS))
    adf_lags = s.get("lags", cast=int)
    strong = s.get("strong", default=0.30, cast=float)
    weak = s.get("weak", default=0.10, cast=float)
    lag_note = "auto" if adf_lags is None else str(adf_lags)
    summary = []

    def table(fname, header, rows, n_obs, extra=""):
        write_csv(os.path.join(out, fname), header, rows,
                  comment=_meta(n_obs, transform, policy, extra))
        summary.append(fname)

    # 1. response levels: summary stats and unit-root tests
    header, rows = _summary_table(spread_levels)
    table("spread_levels_summary.csv", header, rows, spread_levels.n_obs)
    adf_levels = {n: st.adf_test(spread_levels.complete_column(n),
                                 lag_order=adf_lags, kind=adf_kind)
                  for n in spread_levels.names}
    header, rows = st.adf_table(adf_levels)
    table("adf_levels.csv", header, rows, spread_levels.n_obs,
          f"kind={adf_kind} lags={lag_note}")

    # 2. first differences: summary stats and unit-root tests
    diffs = panel_mod.first_difference(spread_levels)
    header, rows = _summary_table(diffs)
    table("spread_diffs_summary.csv", header, rows, diffs.n_obs)
    adf_diffs = {n: st.adf_test(diffs.complete_column(n),
                                lag_order=adf_lags, kind=adf_kind)
                 for n in diffs.names}
    header, rows = st.adf_table(adf_diffs)
    table("adf_diffs.csv", header, rows, diffs.n_obs,
          f"kind={adf_kind} lags={lag_note}")

    # 3. cointegration within level groups of tractable size
    groups = _column_groups(list(spread_levels.names))
    johansen_runs = {}
    if groups is not None:
        _, term_groups = groups
        for label, members in term_groups.items():
            if 2 <= len(members) <= 6:
                sub = panel_mod.align([spread_levels.select(members)],
                                      panel_mod.ALIGN_INTERSECT)
                johansen_runs[label] = st.johansen_trace(sub)
    elif 2 <= spread_levels.n_series <= 6:
        sub = panel_mod.align([spread_levels], panel_mod.ALIGN_INTERSECT)
        johansen_runs["all"] = st.johansen_trace(sub)
    for label, result in johansen_runs.items():
        header, rows = st.johansen_table(result)
        table(f"johansen_{label}.csv", header, rows, result.n_obs,
              f"lags={result.lag_order}")

    # 4. predictor panel description
    macro_panel = combined.select(z_names)
    header, rows = _summary_table(macro_panel)
    table("macro_summary.csv", header, rows, macro_panel.n_obs)
    Z = _matrix(combined, z_names)
    corr = np.corrcoef(Z, rowvar=False)
    header = [""] + z_names
    rows = [[z_names[i]] + [format(corr[i, j], ".3f") for j in range(len(z_names))]
            for i in range(len(z_names))]
    table("macro_correlations.csv", header, rows, macro_panel.n_obs)

    # 5. canonical correlation analysis of responses against predictors
    sol, Y, Z = _fit_cca(s, combined, y_names, z_names)
    eigen_rows = cca_mod.eigen_table(sol)
    header, rows = cca_mod.eigen_table_rows(eigen_rows)
    table("cca_eigen.csv", header, rows, combined.n_obs, f"ridge={sol.ridge}")
    wilks_rows = cca_mod.wilks_lambda(sol)
    header, rows = cca_mod.wilks_table_rows(wilks_rows, sol.correlations)
    table("cca_wilks.csv", header, rows, combined.n_obs)
    header, rows = cca_mod.redundancy_table_rows(cca_mod.redundancy(sol, Y))
    table("cca_redundancy.csv", header, rows, combined.n_obs)
    factors = _retained_factors(s, sol)
    loadings = cca_mod.cross_loadings(sol, Z, k_max=factors.r)
    header, rows = cca_mod.cross_loadings_table_rows(loadings, z_names)
    table("cca_cross_loadings.csv", header, rows, combined.n_obs)

    # 6. regressions on observed predictors, grouped when names allow stacking
    X = _matrix(combined, z_names)
    if groups is not None:
        grade_groups, term_groups = groups
        sections = [("grades", grade_groups), ("terms", term_groups)]
    else:
        sections = [("responses", {n: [n] for n in y_names})]
    verdicts = {}
    for section, sec_groups in sections:
        fits, shared = _grouped_fits(combined, sec_groups, X, z_names)
        header, rows = regress_mod.fit_table(fits)
        table(f"ols_full_{section}.csv", header, rows, fits[0].n_obs)
        sw_fits, trace_rows = _grouped_stepwise(combined, sec_groups, X, z_names)
        header, rows = regress_mod.fit_table(
            sw_fits, predictors=[regress_mod.INTERCEPT] + z_names)
        table(f"ols_stepwise_{section}.csv", header, rows, sw_fits[0].n_obs)
        table(f"ols_stepwise_trace_{section}.csv",
              ["response", "step", "action", "predictor", "aic"], trace_rows,
              sw_fits[0].n_obs)
        aug, _, share = fm.augment_with_pc1(fits, shared)
        header, rows = regress_mod.fit_table(aug)
        table(f"ols_pc1_{section}.csv", header, rows, aug[0].n_obs,
              f"pc1_share={share:.4f}")

        # factor regressions for the same grouping
        fscores = factors.scores
        ffits = []
        for label, members in sec_groups.items():
            y = np.concatenate([combined.column(n) for n in members])
            design = np.tile(fscores, (len(members), 1))
            ffits.append(regress_mod.ols(y, design, response_name=label,
                                         predictor_names=list(factors.names)))
        header, rows = regress_mod.fit_table(ffits)
        table(f"factor_regressions_{section}.csv", header, rows, ffits[0].n_obs,
              f"factors={factors.r}")
        fdesign = np.tile(fscores, (len(next(iter(sec_groups.values()))), 1))
        faug, _, fshare = fm.augment_with_pc1(ffits, fdesign)
        header, rows = regress_mod.fit_table(faug)
        table(f"factor_regressions_pc1_{section}.csv", header, rows,
              faug[0].n_obs, f"pc1_share={fshare:.4f}")
        report = fm.missing_factor_diagnostic(ffits, fdesign, thresholds=(strong, weak))
        header, rows = fm.diagnostic_table_rows(report)
        table(f"diagnostic_{section}.csv", header, rows, ffits[0].n_obs,
              f"factors={factors.r} strong={strong} weak={weak} "
              f"pc1_share={report.pc1_variance_share:.4f} verdict={report.verdict}")
        verdicts[section] = report

    # 7. panels used downstream, re-readable by the panel reader
    panel_mod.write_panel_csv(combined, os.path.join(out, "aligned_panel.csv"),
                              comment=_meta(combined.n_obs, transform, policy))
    summary.append("aligned_panel.csv")
    fkeys = tuple(panel_mod.SeriesKey(n, panel_mod.KIND_MACRO) for n in factors.names)
    fpanel = panel_mod.AlignedPanel(combined.start, fkeys, factors.scores)
    panel_mod.write_panel_csv(fpanel, os.path.join(out, "factor_scores.csv"),
                              comment=_meta(combined.n_obs, transform, policy))
    summary.append("factor_scores.csv")

    _write_summary(out, summary, combined, transform, policy, factors, sol,
                   johansen_runs, verdicts, strong, weak, adf_kind, lag_note)
    print(f"wrote {os.path.join(out, 'summary.md')}")
    print(f"report bundle in {out} ({len(summary) + 1} files)")
    return EXIT_OK


_FILE_NOTES = {
    "spread_levels_summary.csv": "descriptive statistics of the spread levels",
    "adf_levels.csv": "unit-root tests on spread levels",
    "spread_diffs_summary.csv": "descriptive statistics of the first differences",
    "adf_diffs.csv": "unit-root tests on the first differences",
    "macro_summary.csv": "descriptive statistics of the predictor panel",
    "macro_correlations.csv": "correlations among predictors",
    "cca_eigen.csv": "canonical correlations and eigenvalue shares",
    "cca_wilks.csv": "sequential significance tests of the canonical pairs",
    "cca_redundancy.csv": "variance shares explained across sets",
    "cca_cross_loadings.csv": "predictor correlations with the leading variates",
    "aligned_panel.csv": "the aligned data all regressions used",
    "factor_scores.csv": "retained factor score series",
}


def _write_summary(out, files, combined, transform, policy, factors, sol,
                   johansen_runs, verdicts, strong, weak, adf_kind, lag_note):
    lines = ["# Analysis report", ""]
    lines.append("## Settings")
    lines.append("")
    lines.append(f"- observations used: {combined.n_obs} "
                 f"({combined.start} to {combined.end})")
    lines.append(f"- transform: {transform}")
    lines.append(f"- alignment: {policy}")
    lines.append(f"- retained factors: {factors.r}")
    lines.append(f"- unit-root regression: {adf_kind}, lags {lag_note}")
    lines.append(f"- diagnostic thresholds: strong {strong}, weak {weak}")
    lines.append("")
    lines.append("## Key results")
    lines.append("")
    top = ", ".join(format(r, ".4f") for r in sol.correlations[:3])
    lines.append(f"- leading canonical correlations: {top}")
    for label, res in johansen_runs.items():
        rejected = sum(res.rejected)
        lines.append(f"- cointegration ({label}): {rejected} of {len(res.rejected)} "
                     f"nulls rejected at 5%")
    for section, report in verdicts.items():
        lines.append(f"- missing-factor verdict ({section}): {report.verdict} "
                     f"(mean delta {report.mean_delta:.3f}, "
                     f"PC1 share {report.pc1_variance_share:.3f})")
    lines.append("")
    lines.append("## Files")
    lines.append("")
    for fname in files:
        note = _FILE_NOTES.get(fname)
        if note is None:
            stem = fname.rsplit(".", 1)[0]
            for prefix, text in (
                ("johansen_", "cointegration trace tests"),
                ("ols_full_", "regressions on all predictors"),
                ("ols_stepwise_trace_", "accepted stepwise moves"),
                ("ols_stepwise_", "stepwise-selected regressions"),
                ("ols_pc1_", "regressions with the residual component added"),
                ("factor_regressions_pc1_", "factor regressions with the residual component added"),
                ("factor_regressions_", "regressions on retained factors"),
                ("diagnostic_", "missing-factor diagnostic"),
            ):
                if stem.startswith(prefix):
                    note = f"{text} ({stem[len(prefix):]})"
                    break
        lines.append(f"- `{fname}`: {note or ''}".rstrip(": "))
    lines.append("")
    with open(os.path.join(out, "summary.md"), "w") as fh:
        fh.write("\n".join(lines))


# ---------------------------------------------------------------------------
# parser and entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="creditfactors",
        description="Latent-factor analysis pipelines for monthly spread panels.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, func, help_text, flags):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="settings file with 'key = value' lines")
        p.add_argument("--out", help="output directory")
        for flag in flags:
            kwargs = _FLAGS[flag]
            p.add_argument(f"--{flag}", **kwargs)
        p.set_defaults(func=func)
        return p

    add("aggregate", cmd_aggregate,
        "average loans into bucket rates and subtract matching yields",
        ["loans", "yields"])
    add("spreads", cmd_spreads,
        "turn an existing rate panel into spreads over the curve",
        ["panel", "yields"])
    add("adf", cmd_adf, "unit-root tests on every panel column",
        ["panel", "lags", "kind"])
    add("johansen", cmd_johansen, "cointegration trace test on a panel",
        ["panel", "lags"])
    add("ols", cmd_ols, "regress every response on all predictors",
        ["spreads", "loans", "yields", "macro", "transform", "align"])
    add("stepwise", cmd_stepwise, "AIC stepwise selection per response",
        ["spreads", "loans", "yields", "macro", "transform", "align"])
    add("cca", cmd_cca, "canonical correlations between responses and predictors",
        ["spreads", "loans", "yields", "macro", "transform", "align", "factors", "ridge"])
    add("factor-regress", cmd_factor_regress, "regress responses on retained factors",
        ["spreads", "loans", "yields", "macro", "transform", "align", "factors", "ridge"])
    add("diagnose", cmd_diagnose, "missing-factor diagnostic from factor regressions",
        ["spreads", "loans", "yields", "macro", "transform", "align", "factors",
         "ridge", "strong", "weak"])
    add("analyze", cmd_analyze, "full report bundle",
        ["spreads", "loans", "yields", "macro", "transform", "align", "factors",
         "ridge", "strong", "weak", "lags", "kind"])
    add("simulate", cmd_simulate, "draw a synthetic dataset from a model spec",
        ["spec", "seed"])
    return parser


_FLAGS = {
    "loans": dict(help="loan-level CSV (date,rate,grade,term)"),
    "yields": dict(help="yield-curve CSV (date,maturity_months,yield)"),
    "panel": dict(help="panel CSV input"),
    "spreads": dict(help="spread panel CSV input"),
    "macro": dict(help="predictor panel CSV input"),
    "spec": dict(help="model spec JSON for simulation"),
    "transform": dict(choices=[TRANSFORM_LEVELS, TRANSFORM_DIFF],
                      help="response transform before analysis (default diff)"),
    "align": dict(choices=[panel_mod.ALIGN_INTERSECT, panel_mod.ALIGN_UNION],
                  help="grid alignment policy (default intersect)"),
    "factors": dict(type=int, help="retained factor count (default 3)"),
    "lags": dict(type=int, help="lag order (default: rule of thumb / 2)"),
    "kind": dict(choices=list(st.REGRESSION_KINDS),
                 help="deterministic terms in the unit-root regression"),
    "strong": dict(type=float, help="strong adjusted-R2 delta threshold (default 0.30)"),
    "weak": dict(type=float, help="weak mean-delta threshold (default 0.10)"),
    "ridge": dict(type=float, help="diagonal ridge for the CCA whitening (default 0)"),
    "seed": dict(type=int, help="random seed override"),
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
