"""Run configuration, recursive forecasting, plot data and the published
2012/2013 comparison tables.
"""
from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .dataset import (
    EXOGENOUS,
    SCALED_FEATURES,
    NormalizationParams,
    calendar_encoding,
    exogenous_row,
    raw_samples,
    read_csv,
)
from .errors import AlignmentError, ConfigError, DataError, ModelFileError, ScenarioError
from .metrics import SeriesPair, compute_report
from .network import NetworkConfig, TrainConfig, dumps_model, loads_model, predict
from .validation import MODES, cross_validate, fit_and_train

log = logging.getLogger(__name__)

# Actual and forecast consumption for Gaza, 2012 and 2013, as published
# (columns: actual, 2-fold forecast, k-fold forecast).
_TABLE_2012 = """\
113.5800,111.7538,119.9518
110.5200,109.7213,109.1621
85.3500,86.6753,87.8927
74.9800,75.2086,80.8937
87.1100,88.7946,90.4256
86.1000,87.5484,88.8709
90.4600,90.0263,90.3327
103.1600,102.9062,90.3061
108.6600,107.4464,108.2806
99.8500,100.7179,90.4634
98.5000,99.9205,99.8268
90.8400,93.4780,90.8787
"""
_TABLE_2013 = """\
110.34,109.2616,110.0026
110.67,109.3688,110.1573
90.776,92.9769,91.2542
94.66,97.1215,100.4115
88.93,90.8877,89.2735
91.443,93.723,94.6202
101.82,102.7202,100.2111
111.741,109.7194,110.7063
106.772,105.0375,108.7167
101.92,102.7778,100.2537
98.43,100.4408,100.0337
92.53,90.4837,96.5896
"""
FIXTURE_TEXT = {2012: _TABLE_2012, 2013: _TABLE_2013}


def fixture_checksum():
    h = hashlib.sha256()
    for year in sorted(FIXTURE_TEXT):
        h.update(f"{year}\n{FIXTURE_TEXT[year]}".encode())
    return h.hexdigest()


def fixture_columns(year):
    """``(actual, forecast_2fold, forecast_kfold)`` arrays for 2012 or 2013."""
    rows = [line.split(",") for line in FIXTURE_TEXT[year].splitlines()]
    cols = np.array(rows, dtype=float).T
    return cols[0], cols[1], cols[2]


def load_fixture_tables():
    """The four published SeriesPairs keyed by ``(year, scheme)``."""
    out = {}
    for year in sorted(FIXTURE_TEXT):
        actual, two, kf = fixture_columns(year)
        out[(year, "2fold")] = SeriesPair(actual, two)
        out[(year, "kfold")] = SeriesPair(actual, kf)
    return out


# -- forecast tables ----------------------------------------------------------------

@dataclass(frozen=True)
class ForecastRow:
    year: int
    month: int
    actual: float | None
    forecast: float


@dataclass
class ForecastTable:
    rows: list = field(default_factory=list)

    def __post_init__(self):
        for prev, cur in zip(self.rows, self.rows[1:]):
            if (cur.year * 12 + cur.month) - (prev.year * 12 + prev.month) != 1:
                raise AlignmentError(
                    f"forecast months not contiguous at {cur.year}-{cur.month:02d}"
                )
        for r in self.rows:
            if not np.isfinite(r.forecast):
                raise DataError(f"non-finite forecast for {r.year}-{r.month:02d}")

    def __len__(self):
        return len(self.rows)

    def months(self):
        return [(r.year, r.month) for r in self.rows]

    def to_csv(self):
        lines = ["year,month,actual,forecast"]
        for r in self.rows:
            actual = "" if r.actual is None else _num(r.actual)
            lines.append(f"{r.year},{r.month},{actual},{_num(r.forecast)}")
        return "\n".join(lines) + "\n"


def _num(v):
    return repr(float(v))


def parse_forecast_csv(text):
    lines = text.splitlines()
    if not lines or lines[0].strip() != "year,month,actual,forecast":
        raise DataError("not a forecast table (bad header)")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise DataError(f"line {lineno}: expected 4 fields")
        try:
            rows.append(ForecastRow(
                int(parts[0]), int(parts[1]),
                float(parts[2]) if parts[2].strip() else None, float(parts[3]),
            ))
        except ValueError as exc:
            raise DataError(f"line {lineno}: {exc}") from exc
    return ForecastTable(rows)


def fixture_forecast_tables(year):
    """Published table for ``year`` as ``(actual, 2-fold, k-fold)`` ForecastTables."""
    actual, two, kf = fixture_columns(year)
    months = range(1, 13)
    return (
        ForecastTable([ForecastRow(year, m, a, a) for m, a in zip(months, actual)]),
        ForecastTable([ForecastRow(year, m, a, f) for m, a, f in zip(months, actual, two)]),
        ForecastTable([ForecastRow(year, m, a, f) for m, a, f in zip(months, actual, kf)]),
    )


def emit_plot_data(actual, forecasts):
    """CSV ``month,actual,forecast_2fold,forecast_kfold`` for external plotting.

    ``actual`` supplies the actual column through each row's ``actual`` (or,
    if missing, its ``forecast``) value.
    """
    two, kf = forecasts
    if not (actual.months() == two.months() == kf.months()):
        raise AlignmentError("actual and forecast tables cover different months")
    lines = ["month,actual,forecast_2fold,forecast_kfold"]
    for a, f2, fk in zip(actual.rows, two.rows, kf.rows):
        value = a.actual if a.actual is not None else a.forecast
        lines.append(f"{a.year}-{a.month:02d},{_num(value)},{_num(f2.forecast)},{_num(fk.forecast)}")
    return "\n".join(lines) + "\n"


# -- recursive forecasting ---------------------------------------------------------

def params_to_meta(params, lag_window):
    meta = {"lag_window": lag_window}
    for name in params.names:
        lo, hi = params[name]
        meta[f"scale.{name}"] = (lo, hi)
    return meta


def params_from_meta(meta):
    try:
        pairs = [tuple(float(v) for v in meta[f"scale.{n}"].split(",")) for n in SCALED_FEATURES]
        lag = int(meta["lag_window"])
    except (KeyError, ValueError) as exc:
        raise ModelFileError(f"model file lacks scaling metadata: {exc}") from exc
    return NormalizationParams(SCALED_FEATURES, tuple(p[0] for p in pairs), tuple(p[1] for p in pairs)), lag


def recursive_forecast(net, params, history, scenario, horizon, lag_window, observer=None):
    """Forecast ``horizon`` months after ``history`` one step at a time.

    Each prediction becomes the newest lag input for the next month.
    Exogenous inputs come from ``scenario`` (its consumption column is not
    used as an input; it is carried into the ``actual`` column).
    ``observer(step, raw_lags)``, if given, sees every raw lag vector used.
    """
    if horizon < 1:
        raise ConfigError("horizon_months must be >= 1")
    if len(history) < lag_window:
        raise DataError(f"history has {len(history)} months, lag_window is {lag_window}")
    start = history[-1].index + 1
    by_index = {r.index: r for r in scenario}
    future = []
    for step in range(horizon):
        rec = by_index.get(start + step)
        if rec is None:
            y, m = divmod(start + step, 12)
            raise ScenarioError(
                f"scenario has no row for {y}-{m + 1:02d}; it must cover {horizon} months"
                f" after {history[-1].year}-{history[-1].month:02d}"
            )
        future.append(rec)

    lags = [r.consumption for r in history.records[-lag_window:]]
    rows = []
    for step, rec in enumerate(future):
        if observer is not None:
            observer(step, list(lags))
        x = np.empty(lag_window + 2 + len(EXOGENOUS))
        x[:lag_window] = params.transform("consumption", lags)
        x[lag_window:lag_window + 2] = calendar_encoding(rec.month)
        for j, (name, v) in enumerate(zip(EXOGENOUS, exogenous_row(rec))):
            x[lag_window + 2 + j] = params.transform(name, v)
        y = float(params.inverse("consumption", predict(net, x)))
        rows.append(ForecastRow(rec.year, rec.month, rec.consumption, y))
        lags = lags[1:] + [y]
    return ForecastTable(rows)


# -- run configuration --------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    data_path: str = ""
    scenario_path: str = ""
    model_path: str = ""
    output_dir: str = "."
    lag_window: int = 12
    k: int = 10
    mode: str = "chronological"
    seed_init: int = 0
    seed_shuffle: int = 0
    seed_fold: int = 0
    hidden_layers: tuple = (10,)
    hidden_activation: str = "sigmoid"
    output_activation: str = "linear"
    init_scale: float = 1.0
    learning_rate: float = 0.05
    max_epochs: int = 2000
    mse_tolerance: float = 1e-7
    patience: int = 50
    horizon_months: int = 12

    def __post_init__(self):
        if self.horizon_months < 1:
            raise ConfigError("horizon_months must be >= 1")
        if self.lag_window < 1:
            raise ConfigError("lag_window must be >= 1")
        if self.k < 2:
            raise ConfigError("k must be >= 2")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")

    def network_config(self, n_inputs):
        return NetworkConfig(
            (n_inputs,) + tuple(self.hidden_layers) + (1,),
            self.hidden_activation, self.output_activation, self.seed_init, self.init_scale,
        )

    def train_config(self):
        return TrainConfig(
            self.learning_rate, self.max_epochs, self.mse_tolerance, self.patience, self.seed_shuffle
        )

    def out(self, name):
        return Path(self.output_dir) / name


def _coerce(name, value):
    types = {f.name: f.type for f in fields(RunConfig)}
    if name not in types:
        raise ConfigError(f"unknown config key {name!r}")
    kind = types[name]
    try:
        if name == "hidden_layers":
            if isinstance(value, str):
                value = [v for v in value.replace(" ", "").split(",") if v]
            return tuple(int(v) for v in value)
        if kind == "int":
            return int(value)
        if kind == "float":
            return float(value)
        return str(value)
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {value!r}") from exc


def parse_config(text, base=None):
    """Read ``key=value`` lines (``#`` starts a comment) into a RunConfig."""
    updates = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        updates[key] = _coerce(key, value)
    return with_overrides(base or RunConfig(), updates)


def with_overrides(cfg, updates):
    clean = {k: _coerce(k, v) for k, v in updates.items() if v is not None}
    return replace(cfg, **clean)


def dumps_config(cfg):
    lines = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if isinstance(v, tuple):
            v = ",".join(str(x) for x in v)
        lines.append(f"{f.name}={v}")
    return "\n".join(lines) + "\n"


# -- commands -----------------------------------------------------------------------

def _load_data(path, what="data"):
    if not path:
        raise ConfigError(f"no {what} file given")
    p = Path(path)
    if not p.is_file():
        raise DataError(f"{what} file not found: {p}")
    return read_csv(p)


def _write(path, text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def cmd_train(cfg):
    """Train on every sample; write ``model.txt`` and ``train_report.csv``."""
    data = _load_data(cfg.data_path)
    raw = raw_samples(data, cfg.lag_window)
    net, params, report = fit_and_train(raw, cfg.network_config(raw.n_features), cfg.train_config())
    log.info("trained %d epochs, stop reason: %s", report.epochs_run, report.stop_reason)
    model_path = Path(cfg.model_path) if cfg.model_path else cfg.out("model.txt")
    _write(model_path, dumps_model(net, params_to_meta(params, cfg.lag_window)))
    _write(cfg.out("train_report.csv"), report.to_csv())
    return net, params, report


def run_validation(cfg, data):
    raw = raw_samples(data, cfg.lag_window)
    net_cfg = cfg.network_config(raw.n_features)
    tc = cfg.train_config()
    two = cross_validate(raw, 2, cfg.seed_fold, cfg.mode, net_cfg, tc)
    many = two if cfg.k == 2 else cross_validate(raw, cfg.k, cfg.seed_fold, cfg.mode, net_cfg, tc)
    return two, many


def cmd_validate(cfg):
    """Write ``cv_2fold.csv`` and ``cv_kfold.csv``."""
    data = _load_data(cfg.data_path)
    two, many = run_validation(cfg, data)
    _write(cfg.out("cv_2fold.csv"), two.to_csv())
    _write(cfg.out("cv_kfold.csv"), many.to_csv())
    log.info("2-fold mean MAPE %.4f%%, %d-fold mean MAPE %.4f%%",
             two.mean_report.mape_pct, many.k, many.mean_report.mape_pct)
    return two, many


def cmd_forecast(cfg):
    """Recursive forecast with a saved model; writes ``forecast.csv``."""
    data = _load_data(cfg.data_path)
    scenario = _load_data(cfg.scenario_path, "scenario")
    model_path = Path(cfg.model_path) if cfg.model_path else cfg.out("model.txt")
    if not model_path.is_file():
        raise DataError(f"model file not found: {model_path}")
    net, meta = loads_model(model_path.read_text(encoding="utf-8"))
    params, lag = params_from_meta(meta)
    table = recursive_forecast(net, params, data, scenario, cfg.horizon_months, lag)
    _write(cfg.out("forecast.csv"), table.to_csv())
    return table


def cmd_plotdata(cfg, forecast_2fold=None, forecast_kfold=None):
    """Plot CSV from two forecast tables, or from the published tables."""
    if forecast_2fold or forecast_kfold:
        if not (forecast_2fold and forecast_kfold):
            raise ConfigError("plotdata needs both a 2-fold and a k-fold forecast table")
        tables = []
        for path in (forecast_2fold, forecast_kfold):
            p = Path(path)
            if not p.is_file():
                raise DataError(f"forecast table not found: {p}")
            tables.append(parse_forecast_csv(p.read_text(encoding="utf-8")))
        text = emit_plot_data(tables[0], tables)
        return [_write(cfg.out("plot.csv"), text)]
    written = []
    for year in sorted(FIXTURE_TEXT):
        actual, two, kf = fixture_forecast_tables(year)
        written.append(_write(cfg.out(f"plot_{year}.csv"), emit_plot_data(actual, (two, kf))))
    return written


def cmd_fixtures(cfg):
    """Write the published tables and metric reports computed on them."""
    written = []
    for (year, scheme), pair in load_fixture_tables().items():
        written.append(_write(cfg.out(f"metrics_{year}_{scheme}.csv"), compute_report(pair).to_csv()))
    for year in sorted(FIXTURE_TEXT):
        actual, two, kf = fixture_forecast_tables(year)
        written.append(_write(cfg.out(f"table_{year}.csv"), emit_plot_data(actual, (two, kf))))
    return written

