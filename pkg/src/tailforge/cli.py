"""Command-line interface: ingestion, subcommand dispatch, artifact output.

Every subcommand is a pure function of (input bytes, configuration, seed):
repeated runs write byte-identical CSV/JSON artifacts.  Numbers in CSV files
carry 17 significant digits; files are written atomically.  Exit codes:
0 success, 2 data/configuration error, 3 convergence error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import bivariate as bv
from . import censoring as cen
from . import empirics as emp
from . import premiums as prem
from . import regression as reg
from . import simulate as sim
from . import splicing as spl
from . import tempering as tem
from . import truncation as trc
from ._svg import render_lines
from .errors import ConvergenceError, DataError

SEED_ENV_VAR = "TAILFORGE_SEED"
_MISSING_FLAG_TOKENS = {"", "na", "nan", "null", "none"}
_VAR_LEVELS = (0.95, 0.99, 0.995, 0.999)


def _fmt(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _atomic_write(path: Path, data: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp_", suffix=path.suffix)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in zip(*columns):
        writer.writerow([_fmt(v) if isinstance(v, (int, float, np.floating, np.integer))
                         else str(v) for v in row])
    _atomic_write(path, buf.getvalue())


def write_json(path: Path, obj) -> None:
    _atomic_write(path, json.dumps(obj, sort_keys=True, indent=2) + "\n")


# ---------------------------------------------------------------------------
# ingestion


@dataclass(frozen=True)
class IngestReport:
    n: int
    n_censored: int
    minimum: float
    maximum: float

    def as_dict(self) -> dict:
        return {"n": self.n, "censored": self.n_censored,
                "min": self.minimum, "max": self.maximum}


def _parse_flag(token: str, line_no: int, warnings: list[str]) -> bool:
    token = token.strip()
    if token.lower() in _MISSING_FLAG_TOKENS:
        warnings.append(f"line {line_no}: missing censoring flag treated as uncensored")
        return False
    if token in ("0", "1"):
        return token == "1"
    raise DataError(f"line {line_no}: censoring flag {token!r} is not 0 or 1")


def read_columns(path: str, columns: list[str | None], delimiter: str = ",",
                 header: bool = True) -> tuple[list[list[str]], list[int]]:
    """Extract the requested columns (by name or index) from a delimited file."""
    with open(path, "r", encoding="utf-8", newline="") as handle:
        rows = list(csv.reader(handle, delimiter=delimiter))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if not rows:
        raise DataError(f"{path}: empty input file")
    names = None
    if header:
        names = [c.strip() for c in rows[0]]
        rows = rows[1:]
        if not rows:
            raise DataError(f"{path}: no data rows below the header")
    indices = []
    for col in columns:
        if col is None:
            indices.append(None)
            continue
        if names is not None and col in names:
            indices.append(names.index(col))
        else:
            try:
                indices.append(int(col))
            except ValueError:
                raise DataError(f"{path}: column {col!r} not found "
                                f"(available: {names})") from None
    out: list[list[str]] = [[] for _ in columns]
    line_nos = []
    offset = 2 if header else 1
    for i, row in enumerate(rows):
        line_no = i + offset
        for slot, idx in enumerate(indices):
            if idx is None:
                continue
            if idx >= len(row):
                raise DataError(f"{path}: line {line_no}: missing column {idx}")
            out[slot].append(row[idx])
        line_nos.append(line_no)
    return out, line_nos


def _parse_values(tokens: list[str], line_nos: list[int], label: str) -> np.ndarray:
    values = np.empty(len(tokens))
    for i, tok in enumerate(tokens):
        try:
            values[i] = float(tok)
        except ValueError:
            raise DataError(f"line {line_nos[i]}: unparseable {label} {tok!r}") from None
        if not np.isfinite(values[i]) or values[i] <= 0.0:
            raise DataError(f"line {line_nos[i]}: nonpositive {label} {tok!r}")
    return values


def ingest_censored(path: str, value_col: str, flag_col: str | None,
                    delimiter: str = ",", header: bool = True,
                    warnings: list[str] | None = None
                    ) -> tuple[emp.CensoredSample, IngestReport]:
    warnings = [] if warnings is None else warnings
    (vals, flags), line_nos = read_columns(path, [value_col, flag_col],
                                           delimiter, header)
    values = _parse_values(vals, line_nos, "value")
    if flag_col is None:
        censored = np.zeros(values.size, dtype=bool)
    else:
        censored = np.array([_parse_flag(t, line_nos[i], warnings)
                             for i, t in enumerate(flags)])
    sample = emp.CensoredSample(values=values, censored=censored)
    report = IngestReport(n=sample.n, n_censored=sample.n_censored,
                          minimum=float(sample.values[0]),
                          maximum=float(sample.values[-1]))
    return sample, report


def ingest_bivariate(path: str, value_col: str, value2_col: str,
                     flag_col: str | None, flag2_col: str | None,
                     delimiter: str = ",", header: bool = True,
                     warnings: list[str] | None = None
                     ) -> tuple[bv.BivariateSample, IngestReport]:
    warnings = [] if warnings is None else warnings
    (v1, v2, f1, f2), line_nos = read_columns(
        path, [value_col, value2_col, flag_col, flag2_col], delimiter, header)
    x1 = _parse_values(v1, line_nos, "value")
    x2 = _parse_values(v2, line_nos, "second-margin value")
    c1 = (np.zeros(x1.size, bool) if flag_col is None else
          np.array([_parse_flag(t, line_nos[i], warnings) for i, t in enumerate(f1)]))
    c2 = (np.zeros(x2.size, bool) if flag2_col is None else
          np.array([_parse_flag(t, line_nos[i], warnings) for i, t in enumerate(f2)]))
    sample = bv.BivariateSample(x1=x1, x2=x2, censored1=c1, censored2=c2)
    report = IngestReport(n=sample.n, n_censored=int(np.count_nonzero(c1 | c2)),
                          minimum=float(min(x1.min(), x2.min())),
                          maximum=float(max(x1.max(), x2.max())))
    return sample, report


def ingest_covariate(path: str, value_col: str, flag_col: str | None,
                     covariate_col: str, delimiter: str = ",", header: bool = True,
                     warnings: list[str] | None = None
                     ) -> tuple[reg.CovariateSample, IngestReport]:
    warnings = [] if warnings is None else warnings
    (vals, flags, covs), line_nos = read_columns(
        path, [value_col, flag_col, covariate_col], delimiter, header)
    values = _parse_values(vals, line_nos, "value")
    censored = (np.zeros(values.size, bool) if flag_col is None else
                np.array([_parse_flag(t, line_nos[i], warnings)
                          for i, t in enumerate(flags)]))
    x = np.empty(values.size)
    for i, tok in enumerate(covs):
        try:
            x[i] = float(tok)
        except ValueError:
            raise DataError(f"line {line_nos[i]}: unparseable covariate {tok!r}") from None
    sample = reg.CovariateSample(z=values, censored=censored, x=x)
    report = IngestReport(n=sample.n, n_censored=int(np.count_nonzero(censored)),
                          minimum=float(sample.z[0]), maximum=float(sample.z[-1]))
    return sample, report


# ---------------------------------------------------------------------------
# subcommand plumbing


class _Outputs:
    def __init__(self, out_dir: Path, stem: str, subcommand: str, fmt: str):
        self.out_dir = out_dir
        self.base = f"{stem}_{subcommand}"
        self.fmt = fmt
        self.paths: list[Path] = []

    def csv(self, header, columns, suffix: str = "") -> Path:
        path = self.out_dir / f"{self.base}{suffix}.csv"
        write_csv(path, header, columns)
        self.paths.append(path)
        return path

    def json(self, obj, suffix: str = "") -> Path:
        path = self.out_dir / f"{self.base}{suffix}.json"
        write_json(path, obj)
        self.paths.append(path)
        return path

    def svg(self, series, suffix: str = "", xlabel: str = "", ylabel: str = "",
            scatter: bool = False) -> Path | None:
        if self.fmt != "svg":
            return None
        path = self.out_dir / f"{self.base}{suffix}.svg"
        _atomic_write(path, render_lines(series, xlabel=xlabel, ylabel=ylabel,
                                         scatter=scatter))
        self.paths.append(path)
        return path


def _resolve_seed(args) -> int:
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise DataError(f"{SEED_ENV_VAR}={env!r} is not an integer") from None
    return int(getattr(args, "seed", 0) or 0)


def _levels(args) -> list[float]:
    levels = [float(p) for p in (args.p or [])]
    for p in levels:
        if not 0.0 < p < 1.0:
            raise DataError(f"probability level {p} outside (0, 1)")
    return levels


def _path_artifacts(out: _Outputs, path: emp.TailPath, json_extra: dict | None = None):
    header = ["k", "estimate"] + sorted(path.aux)
    columns = [path.k, path.estimate] + [np.asarray(path.aux[c]) for c in sorted(path.aux)]
    if out.fmt in ("csv", "svg"):
        out.csv(header, columns)
        out.svg([(path.k.astype(float), path.estimate, "estimate")],
                xlabel="k", ylabel="estimate")
    else:
        doc = {"k": [int(v) for v in path.k],
               "estimate": [float(v) for v in path.estimate]}
        for name in sorted(path.aux):
            doc[name] = [float(v) for v in path.aux[name]]
        if json_extra:
            doc.update(json_extra)
        out.json(doc)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_hill(args, out: _Outputs) -> None:
    sample, report = ingest_censored(args.input, args.value_col, args.flag_col,
                                     args.delimiter, not args.no_header)
    path = emp.hill_path(sample)
    _path_artifacts(out, path, {"ingest": report.as_dict()})
    print(f"hill: n={report.n} censored={report.n_censored} "
          f"k_max={int(path.k[-1])}")


def _cmd_qqplot(args, out: _Outputs) -> None:
    sample, report = ingest_censored(args.input, args.value_col, args.flag_col,
                                     args.delimiter, not args.no_header)
    if args.kind == "pareto":
        x, y = emp.pareto_qq(sample)
    elif args.kind == "censored":
        x, y = cen.censored_pareto_qq(sample)
    else:
        x, y = trc.truncated_pareto_qq(sample, args.odds)
    if out.fmt == "json":
        out.json({"x": list(map(float, x)), "y": list(map(float, y)),
                  "kind": args.kind, "ingest": report.as_dict()})
    else:
        out.csv(["x", "y"], [x, y])
        out.svg([(x, y, args.kind)], xlabel="-log exceedance", ylabel="log value",
                scatter=True)
    print(f"qqplot[{args.kind}]: n={report.n} censored={report.n_censored}")


def _cmd_meplot(args, out: _Outputs) -> None:
    sample, report = ingest_censored(args.input, args.value_col, args.flag_col,
                                     args.delimiter, not args.no_header)
    curve = cen.mean_excess_km(sample)
    if out.fmt == "json":
        out.json({"x": list(map(float, curve.x)),
                  "mean_excess": list(map(float, curve.estimate)),
                  "defective": curve.defective, "ingest": report.as_dict()})
    else:
        out.csv(["x", "mean_excess"], [curve.x, curve.estimate])
        out.svg([(curve.x, curve.estimate, "mean excess")], xlabel="x",
                ylabel="mean excess")
    print(f"meplot: n={report.n} defective={curve.defective}")


def _cmd_truncfit(args, out: _Outputs) -> None:
    sample, report = ingest_censored(args.input, args.value_col, args.flag_col,
                                     args.delimiter, not args.no_header)
    if args.k is not None:
        fit = trc.fit_truncated(sample, args.k)
        doc = {"k": fit.k, "xi": fit.xi, "odds": fit.odds, "odds_raw": fit.odds_raw,
               "threshold": fit.threshold, "endpoint": fit.endpoint,
               "test_pvalue": fit.test_pvalue, "ingest": report.as_dict()}
        if out.fmt == "json":
            out.json(doc)
        else:
            out.csv(["k", "xi", "odds_raw", "odds", "endpoint", "pvalue"],
                    [np.array([fit.k]), np.array([fit.xi]), np.array([fit.odds_raw]),
                     np.array([fit.odds]), np.array([fit.endpoint]),
                     np.array([fit.test_pvalue])])
        print(f"truncfit: k={fit.k} xi={fit.xi:.6g} odds={fit.odds:.6g} "
              f"endpoint={fit.endpoint:.6g}")
    else:
        path = trc.truncated_path(sample, k_min=args.kmin,
                                  k_max=args.kmax)
        _path_artifacts(out, path, {"ingest": report.as_dict()})
        print(f"truncfit: swept k={int(path.k[0])}..{int(path.k[-1])}")


def _cmd_trunctest(args, out: _Outputs) -> None:
    sample, report = ingest_censored(args.input, args.value_col, args.flag_col,
                                     args.delimiter, not args.no_header)
    ks = [args.k] if args.k is not None else list(range(args.kmin,
                                                        min(args.kmax or sample.n - 1,
                                                            sample.n - 1) + 1))
    pvals = []
    for k in ks:
        try:
            pvals.append(trc.truncation_test(emp.relative_excesses(sample, k)))
        except (DataError, ConvergenceError):
            pvals.append(math.nan)
    if out.fmt == "json":
        out.json({"k": ks, "pvalue": pvals, "ingest": report.as_dict()})
    else:
        out.csv(["k", "pvalue"], [np.asarray(ks), np.asarray(pvals)])
        out.svg([(np.asarray(ks, float), np.asarray(pvals), "p-value")],
                xlabel="k", ylabel="p-value")
    print(f"trunctest: {len(ks)} thresholds")


def _cmd_temperfit(args, out: _Outputs) -> None:
    sample, report = ingest_censored(args.input, args.value_col, args.flag_col,
                                     args.delimiter, not args.no_header)
    tau_grid = [float(t) for t in args.tau_grid.split(",")] if args.tau_grid else None
    if args.k is not None:
        exc = emp.relative_excesses(sample, args.k)
        fit = tem.tempered_mle(exc) if args.method == "mle" else None
        if fit is None:
            taus = tau_grid or list(tem.DEFAULT_TAU_GRID)
            best = None
            for tau in taus:
                alpha, delta, score = tem.tempered_wls(exc, tau)
                if best is None or score < best[3]:
                    best = (alpha, delta, tau, score)
            alpha, delta, tau, score = best
            lam = delta * alpha / tau
            fit = tem.TemperedFit(k=args.k, alpha=alpha, tau=tau, lam=lam,
                                  beta_inf=lam ** (1.0 / tau) if lam > 0 else 0.0,
                                  delta=delta, wls_score=score,
                                  threshold=exc.threshold)
    else:
        fit = tem.tempered_adaptive_k(sample, tau_grid=tau_grid, k_min=args.kmin,
                                      k_max=args.kmax, k_step=args.kstep)
    doc = {"k": fit.k, "alpha": fit.alpha, "tau": fit.tau, "lambda": fit.lam,
           "beta_inf": fit.beta_inf, "delta": fit.delta, "wls_score": fit.wls_score,
           "threshold": fit.threshold, "method": args.method,
           "ingest": report.as_dict()}
    ret = {}
    for p in _levels(args):
        ret[f"return_level_{p:g}"] = tem.tempered_return_level(fit, sample.n, p)
    doc.update(ret)
    if out.fmt == "json":
        out.json(doc)
    else:
        keys = ["k", "alpha", "tau", "lambda", "beta_inf", "delta", "wls_score",
                "threshold"] + sorted(ret)
        out.csv(keys, [np.array([doc[key]]) for key in keys])
    print(f"temperfit: k={fit.k} alpha={fit.alpha:.6g} tau={fit.tau:.6g} "
          f"beta_inf={fit.beta_inf:.6g}")


def _cmd_km(args, out: _Outputs) -> None:
    sample, report = ingest_censored(args.input, args.value_col, args.flag_col,
                                     args.delimiter, not args.no_header)
    curve = cen.kaplan_meier(sample)
    if out.fmt == "json":
        out.json({"support": list(map(float, curve.support)),
                  "survival": list(map(float, curve.survival)),
                  "defective": curve.defective, "ingest": report.as_dict()})
    else:
        out.csv(["support", "survival"], [curve.support, curve.survival])
        out.svg([(curve.support, curve.survival, "survival")], xlabel="x",
                ylabel="survival")
    print(f"km: n={report.n} censored={report.n_censored} "
          f"defective={curve.defective}")


def _cmd_censfit(args, out: _Outputs) -> None:
    sample, report = ingest_censored(args.input, args.value_col, args.flag_col,
                                     args.delimiter, not args.no_header)
    path = cen.censored_path(sample)
    extra = {"ingest": report.as_dict()}
    if args.k is not None:
        xi = cen.censored_hill(sample, args.k)
        quantiles = {f"quantile_{p:g}": cen.censored_quantile(sample, args.k, xi, p)
                     for p in _levels(args)}
        extra.update({"k": args.k, "censored_hill": xi,
                      "worms": cen.worms_xi(sample, args.k),
                      "censored_moment": cen.censored_moment(sample, args.k),
                      **quantiles})
    _path_artifacts(out, path, extra)
    if out.fmt in ("csv", "svg") and args.k is not None:
        out.json(extra, suffix="_at_k")
    print(f"censfit: n={report.n} censored={report.n_censored}")


def _cmd_splicefit(args, out: _Outputs) -> None:
    sample, report = ingest_censored(args.input, args.value_col, args.flag_col,
                                     args.delimiter, not args.no_header)
    model = spl.splice_fit(sample, args.splice_rank, pi_convention=args.pi_convention,
                           init_m=args.init_m, criterion=args.criterion)
    doc = spl.composite_to_dict(model)
    doc_out = dict(doc)
    doc_out["ingest"] = report.as_dict()
    out.json(doc_out)
    print(f"splicefit: threshold={model.tail.threshold:.6g} xi={model.tail.xi:.6g} "
          f"sigma={model.tail.sigma:.6g} components={model.body.n_components}")


def _cmd_premium(args, out: _Outputs) -> None:
    with open(args.model, "r", encoding="utf-8") as handle:
        model = spl.composite_from_json(handle.read())
    limit = math.inf if args.limit.strip().lower() in ("inf", "infinity") \
        else float(args.limit)
    layer = prem.LayerSpec(retention=args.retention, limit=limit)
    premium = prem.layer_premium(model, layer)
    rows = []
    for level in _VAR_LEVELS:
        p = 1.0 - level
        v = prem.var(model, p)
        rows.append((level, v, prem.cte(model, p)))
    if out.fmt == "json":
        out.json({"premium": premium, "retention": layer.retention,
                  "limit": "inf" if math.isinf(layer.limit) else layer.limit,
                  "risk_measures": [{"level": lv, "var": v, "cte": c}
                                    for lv, v, c in rows]})
    else:
        out.csv(["quantity", "level", "value"],
                [np.array(["premium"] + ["var"] * len(rows) + ["cte"] * len(rows)),
                 np.array([math.nan] + [r[0] for r in rows] + [r[0] for r in rows]),
                 np.array([premium] + [r[1] for r in rows] + [r[2] for r in rows])])
    print(f"premium: {premium:.10g} (retention={args.retention}, limit={args.limit})")


def _cmd_pickands(args, out: _Outputs) -> None:
    sample, report = ingest_bivariate(args.input, args.value_col, args.value2_col,
                                      args.flag_col, args.flag2_col,
                                      args.delimiter, not args.no_header)
    curve = bv.pickands_curve(sample, grid_size=args.grid_size, project=args.project)
    if out.fmt == "json":
        out.json({"t": list(map(float, curve.grid)),
                  "a_hat": list(map(float, curve.a_hat)),
                  "projected": [bool(b) for b in curve.projected],
                  "ingest": report.as_dict()})
    else:
        out.csv(["t", "a_hat", "projected"],
                [curve.grid, curve.a_hat, curve.projected.astype(int)])
        out.svg([(curve.grid, curve.a_hat, "A(t)")], xlabel="t", ylabel="A")
    print(f"pickands: n={report.n} grid={args.grid_size} projected={args.project}")


def _cmd_bipremium(args, out: _Outputs) -> None:
    sample, report = ingest_bivariate(args.input, args.value_col, args.value2_col,
                                      args.flag_col, args.flag2_col,
                                      args.delimiter, not args.no_header)
    layer = prem.LayerSpec(retention=args.retention, limit=float(args.limit))
    value = bv.bivariate_pure_premium(sample, layer, weighting=args.weighting)
    if out.fmt == "json":
        out.json({"premium": value, "retention": layer.retention,
                  "limit": layer.limit, "weighting": args.weighting,
                  "ingest": report.as_dict()})
    else:
        out.csv(["premium", "retention", "limit"],
                [np.array([value]), np.array([layer.retention]),
                 np.array([layer.limit])])
    print(f"bipremium[{args.weighting}]: {value:.10g}")


def _cmd_regress(args, out: _Outputs) -> None:
    sample, report = ingest_covariate(args.input, args.value_col, args.flag_col,
                                      args.covariate_col, args.delimiter,
                                      not args.no_header)
    ks = reg.KernelSpec(bandwidth=args.bandwidth, kernel=args.kernel)
    x0_grid = [float(v) for v in args.x0.split(",")]
    levels = _levels(args)
    xi_col, quant_cols = [], {p: [] for p in levels}
    for x0 in x0_grid:
        try:
            xi_col.append(reg.local_worms_xi(sample, x0, ks, args.k))
        except DataError:
            xi_col.append(math.nan)
            for p in levels:
                quant_cols[p].append(math.nan)
            continue
        for p in levels:
            try:
                quant_cols[p].append(reg.local_quantile(sample, x0, ks, args.k, p))
            except DataError:
                quant_cols[p].append(math.nan)
    header = ["x0", "xi"] + [f"quantile_{p:g}" for p in levels]
    columns = [np.asarray(x0_grid), np.asarray(xi_col)] + \
        [np.asarray(quant_cols[p]) for p in levels]
    if out.fmt == "json":
        out.json({"x0": x0_grid, "xi": xi_col,
                  **{f"quantile_{p:g}": quant_cols[p] for p in levels},
                  "k": args.k, "bandwidth": args.bandwidth,
                  "ingest": report.as_dict()})
    else:
        out.csv(header, columns)
        out.svg([(np.asarray(x0_grid), np.asarray(xi_col), "xi")],
                xlabel="x0", ylabel="xi")
    print(f"regress: {len(x0_grid)} covariate points, k={args.k} h={args.bandwidth}")


def _cmd_simulate(args, out: _Outputs) -> None:
    seed = _resolve_seed(args)
    rng = np.random.default_rng(seed)
    params = {}
    if args.params:
        for item in args.params.split(","):
            if "=" not in item:
                raise DataError(f"malformed parameter {item!r}; expected name=value")
            key, val = item.split("=", 1)
            params[key.strip()] = val.strip()
    if args.model_json:
        with open(args.model_json, "r", encoding="utf-8") as handle:
            params["model"] = json.loads(handle.read())
    values, censored = sim.simulate_model(args.model, params, args.n, rng)
    order = np.argsort(values, kind="stable")
    values = values[order]
    if censored is None:
        out.csv(["value"], [values])
    else:
        out.csv(["value", "censored"],
                [values, censored[order].astype(int)])
    print(f"simulate[{args.model}]: n={args.n} seed={seed}")


_SUBCOMMANDS = {
    "hill": _cmd_hill,
    "qqplot": _cmd_qqplot,
    "meplot": _cmd_meplot,
    "truncfit": _cmd_truncfit,
    "trunctest": _cmd_trunctest,
    "temperfit": _cmd_temperfit,
    "km": _cmd_km,
    "censfit": _cmd_censfit,
    "splicefit": _cmd_splicefit,
    "premium": _cmd_premium,
    "pickands": _cmd_pickands,
    "bipremium": _cmd_bipremium,
    "regress": _cmd_regress,
    "simulate": _cmd_simulate,
}


def _add_io_args(parser, needs_input=True):
    if needs_input:
        parser.add_argument("input", help="delimited input file")
        parser.add_argument("--value-col", default="0",
                            help="value column name or index (default first column)")
        parser.add_argument("--flag-col", default=None,
                            help="censoring flag column (0/1; omitted = uncensored)")
        parser.add_argument("--delimiter", default=",")
        parser.add_argument("--no-header", action="store_true",
                            help="input has no header row")
    parser.add_argument("--out-dir", default=".", help="output directory")
    parser.add_argument("--format", choices=("csv", "json", "svg"), default="csv",
                        help="artifact format; svg additionally renders plots")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tailforge",
        description="Heavy-tailed claim analysis: tail fitting under truncation, "
                    "tempering and censoring; spliced models; layer premiums.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("hill", help="Hill estimator path")
    _add_io_args(p)

    p = sub.add_parser("qqplot", help="Pareto / censored / truncated QQ plot points")
    _add_io_args(p)
    p.add_argument("--kind", choices=("pareto", "censored", "truncated"),
                   default="pareto")
    p.add_argument("--odds", type=float, default=0.0,
                   help="truncation odds for --kind truncated")

    p = sub.add_parser("meplot", help="Kaplan-Meier mean excess plot points")
    _add_io_args(p)

    p = sub.add_parser("truncfit", help="truncated-tail fit (fixed k or sweep)")
    _add_io_args(p)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--kmin", type=int, default=5)
    p.add_argument("--kmax", type=int, default=None)

    p = sub.add_parser("trunctest", help="test of an unbounded tail against truncation")
    _add_io_args(p)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--kmin", type=int, default=5)
    p.add_argument("--kmax", type=int, default=None)

    p = sub.add_parser("temperfit", help="tempered-tail fit (adaptive or fixed k)")
    _add_io_args(p)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--kmin", type=int, default=10)
    p.add_argument("--kmax", type=int, default=None)
    p.add_argument("--kstep", type=int, default=1)
    p.add_argument("--method", choices=("wls", "mle"), default="wls")
    p.add_argument("--tau-grid", default=None, help="comma-separated tau grid")
    p.add_argument("--p", action="append", default=None,
                   help="return-level probability (repeatable)")

    p = sub.add_parser("km", help="Kaplan-Meier survival curve")
    _add_io_args(p)

    p = sub.add_parser("censfit", help="censored tail estimator paths")
    _add_io_args(p)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--p", action="append", default=None,
                   help="extreme quantile probability (repeatable)")

    p = sub.add_parser("splicefit", help="composite body+tail fit")
    _add_io_args(p)
    p.add_argument("--splice-rank", type=int, required=True,
                   help="splice threshold = this order statistic from the top")
    p.add_argument("--pi-convention", choices=("empirical", "quantile"),
                   default="empirical")
    p.add_argument("--init-m", type=int, default=10)
    p.add_argument("--criterion", choices=("AIC", "BIC"), default="AIC")

    p = sub.add_parser("premium", help="layer premium and risk measures of a model")
    p.add_argument("model", help="serialized composite model JSON file")
    p.add_argument("--retention", type=float, required=True)
    p.add_argument("--limit", default="inf", help="layer size or 'inf'")
    _add_io_args(p, needs_input=False)

    p = sub.add_parser("pickands", help="tail dependence curve of paired margins")
    _add_io_args(p)
    p.add_argument("--value2-col", required=True)
    p.add_argument("--flag2-col", default=None)
    p.add_argument("--grid-size", type=int, default=99)
    p.add_argument("--project", action="store_true",
                   help="clamp estimates into the valid dependence band")

    p = sub.add_parser("bipremium", help="plug-in premium for the shared payment")
    _add_io_args(p)
    p.add_argument("--value2-col", required=True)
    p.add_argument("--flag2-col", default=None)
    p.add_argument("--retention", type=float, required=True)
    p.add_argument("--limit", type=float, required=True)
    p.add_argument("--weighting", choices=("empirical", "km"), default="empirical")

    p = sub.add_parser("regress", help="covariate-local tail index and quantiles")
    _add_io_args(p)
    p.add_argument("--covariate-col", required=True)
    p.add_argument("--x0", required=True, help="comma-separated covariate points")
    p.add_argument("--bandwidth", type=float, required=True)
    p.add_argument("--kernel", default="biquadratic")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--p", action="append", default=None,
                   help="extreme quantile probability (repeatable)")

    p = sub.add_parser("simulate", help="generate a claims file from a named model")
    p.add_argument("--model", required=True,
                   help="pareto | truncated_pareto | tempered_pareto | gp | "
                        "mixed_erlang | composite | pareto_censored")
    p.add_argument("--params", default=None, help="comma-separated name=value list")
    p.add_argument("--model-json", default=None,
                   help="composite model JSON (for --model composite)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    _add_io_args(p, needs_input=False)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "input", None):
        stem = Path(args.input).stem
    elif args.subcommand == "premium":
        stem = Path(args.model).stem
    else:
        stem = getattr(args, "model", args.subcommand)
    out = _Outputs(Path(args.out_dir), stem, args.subcommand, args.format)
    try:
        _SUBCOMMANDS[args.subcommand](args, out)
    except DataError as err:
        _report_error(args, out, "data_error", str(err))
        return 2
    except ConvergenceError as err:
        _report_error(args, out, "convergence_error", str(err))
        return 3
    except OSError as err:
        _report_error(args, out, "data_error", str(err))
        return 2
    return 0


def _report_error(args, out: _Outputs, code: str, message: str) -> None:
    if getattr(args, "format", "csv") == "json":
        print(json.dumps({"error": {"code": code, "message": message}},
                         sort_keys=True))
    else:
        print(f"error [{code}]: {message}", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
