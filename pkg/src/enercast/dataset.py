"""Monthly records: CSV ingestion, min-max scaling, lag featurization and a
synthetic series generator.

Feature layout of one sample (length ``lag_window + 6``)::

    [consumption(t-lag) ... consumption(t-1),   # scaled with consumption params
     sin(2*pi*m/12), cos(2*pi*m/12),            # calendar encoding, unscaled
     temperature, humidity, population, gdp_per_capita]   # of month t, scaled
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ContinuityError,
    FeaturizeError,
    FitError,
    GenerationError,
    ParseError,
    RecordValidationError,
)

CSV_HEADER = (
    "year",
    "month",
    "consumption_gwh",
    "temperature_c",
    "humidity_pct",
    "population",
    "gdp_per_capita",
)
EXOGENOUS = ("temperature", "humidity", "population", "gdp_per_capita")
SCALED_FEATURES = ("consumption",) + EXOGENOUS
N_CALENDAR = 2


@dataclass(frozen=True)
class MonthlyRecord:
    year: int
    month: int
    consumption: float
    temperature: float
    humidity: float
    population: float
    gdp_per_capita: float

    @property
    def index(self):
        """Months since year 0; consecutive records differ by exactly 1."""
        return self.year * 12 + (self.month - 1)

    def check(self, row=None):
        where = f" (row {row})" if row is not None else ""
        if not 1 <= self.month <= 12:
            raise RecordValidationError(f"month={self.month} outside 1..12{where}", "month", row)
        if not self.consumption > 0:
            raise RecordValidationError(
                f"consumption_gwh={self.consumption} must be > 0{where}", "consumption_gwh", row
            )
        if not 0 <= self.humidity <= 100:
            raise RecordValidationError(
                f"humidity_pct={self.humidity} outside [0, 100]{where}", "humidity_pct", row
            )
        if not self.population > 0:
            raise RecordValidationError(
                f"population={self.population} must be > 0{where}", "population", row
            )
        for name in ("temperature", "gdp_per_capita"):
            if not math.isfinite(getattr(self, name)):
                raise RecordValidationError(f"{name} is not finite{where}", name, row)


class Dataset:
    """An ordered, gap-free run of monthly records."""

    def __init__(self, records):
        records = list(records)
        if not records:
            raise ContinuityError("dataset is empty")
        for row, rec in enumerate(records, start=1):
            rec.check(row)
        for prev, cur in zip(records, records[1:]):
            step = cur.index - prev.index
            if step == 0:
                raise ContinuityError(f"duplicate month ({cur.year},{cur.month})")
            if step != 1:
                raise ContinuityError(
                    f"gap or disorder between ({prev.year},{prev.month}) and ({cur.year},{cur.month})"
                )
        self.records = tuple(records)

    def __len__(self):
        return len(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def __iter__(self):
        return iter(self.records)

    def __eq__(self, other):
        return isinstance(other, Dataset) and self.records == other.records

    def __repr__(self):
        first, last = self.records[0], self.records[-1]
        return (
            f"Dataset({len(self)} months, {first.year}-{first.month:02d}"
            f" .. {last.year}-{last.month:02d})"
        )

    def column(self, name):
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    def to_csv(self):
        out = io.StringIO()
        out.write(",".join(CSV_HEADER) + "\n")
        for r in self.records:
            out.write(
                f"{r.year},{r.month},{r.consumption!r},{r.temperature!r},{r.humidity!r},"
                f"{r.population!r},{r.gdp_per_capita!r}\n"
            )
        return out.getvalue()


def _sort_and_verify(records):
    # Sort, but report duplicates before the continuity check hides them.
    ordered = sorted(records, key=lambda r: r.index)
    seen = set()
    for r in ordered:
        if r.index in seen:
            raise ContinuityError(f"duplicate month ({r.year},{r.month})")
        seen.add(r.index)
    return Dataset(ordered)


def parse_csv(text):
    """Parse the monthly CSV format into a Dataset.

    ``text`` may be a string or a text stream.  Rows are sorted by (year,
    month) and then checked for duplicates and gaps.
    """
    if not isinstance(text, str):
        text = text.read()
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty input, expected header", line=1)
    header = lines[0].lstrip("﻿").strip()
    if header != ",".join(CSV_HEADER):
        raise ParseError(f"unexpected header {header!r}", line=1)

    records = []
    for lineno, row in enumerate(csv.reader(lines[1:]), start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(CSV_HEADER):
            raise ParseError(f"expected {len(CSV_HEADER)} fields, got {len(row)}", line=lineno)
        try:
            year, month = int(row[0]), int(row[1])
        except ValueError:
            raise ParseError(f"year/month must be integers: {row[0]!r}, {row[1]!r}", line=lineno)
        values = []
        for name, field in zip(CSV_HEADER[2:], row[2:]):
            try:
                v = float(field)
            except ValueError:
                raise ParseError(f"{name} is not numeric: {field!r}", line=lineno)
            if not math.isfinite(v):
                raise ParseError(f"{name} is not finite: {field!r}", line=lineno)
            values.append(v)
        rec = MonthlyRecord(year, month, *values)
        rec.check(row=lineno)
        records.append(rec)
    return _sort_and_verify(records)


def read_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_csv(fh.read())


# -- scaling ----------------------------------------------------------------

@dataclass(frozen=True)
class NormalizationParams:
    """Per-feature (min, max) pairs for min-max scaling."""

    names: tuple
    mins: tuple
    maxs: tuple

    def __getitem__(self, name):
        i = self.names.index(name)
        return self.mins[i], self.maxs[i]

    def transform(self, name, values):
        lo, hi = self[name]
        return (np.asarray(values, dtype=float) - lo) / (hi - lo)

    def inverse(self, name, values):
        lo, hi = self[name]
        return np.asarray(values, dtype=float) * (hi - lo) + lo


def fit_normalizer(columns, names=None):
    """Fit min-max parameters on a 2-D array (rows are samples).

    Constant columns get the range (min, min + 1).
    """
    x = np.asarray(columns, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2 or x.shape[0] == 0:
        raise FitError("cannot fit normalizer on an empty subset")
    lo = x.min(axis=0)
    hi = x.max(axis=0)
    hi = np.where(hi > lo, hi, lo + 1.0)
    if names is None:
        names = tuple(f"f{i}" for i in range(x.shape[1]))
    names = tuple(names)
    if len(names) != x.shape[1]:
        raise FitError(f"{len(names)} names for {x.shape[1]} columns")
    return NormalizationParams(names, tuple(map(float, lo)), tuple(map(float, hi)))


def normalize(x, p):
    lo, hi = p
    return (x - lo) / (hi - lo)


def denormalize(z, p):
    lo, hi = p
    return z * (hi - lo) + lo


# -- featurization -------------------------------------------------------------

@dataclass(frozen=True)
class Sample:
    features: np.ndarray
    target: float
    timestamp: tuple


@dataclass
class SampleSet:
    """Supervised samples stored column-wise.

    ``features`` has shape (n, lag_window + 6); ``targets`` shape (n,).
    Instances hold either raw (physical units) or scaled values.
    """

    features: np.ndarray
    targets: np.ndarray
    timestamps: tuple
    lag_window: int

    def __len__(self):
        return len(self.targets)

    def __getitem__(self, i):
        return Sample(self.features[i], float(self.targets[i]), self.timestamps[i])

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def n_features(self):
        return self.features.shape[1]

    def subset(self, indices):
        idx = np.asarray(indices, dtype=int)
        return SampleSet(
            self.features[idx].copy(),
            self.targets[idx].copy(),
            tuple(self.timestamps[i] for i in idx),
            self.lag_window,
        )


def calendar_encoding(month):
    angle = 2.0 * math.pi * month / 12.0
    return math.sin(angle), math.cos(angle)


def exogenous_row(rec):
    return [getattr(rec, name) for name in EXOGENOUS]


def raw_samples(d, lag_window):
    """Lag samples in physical units; the scaling step is separate."""
    if lag_window < 1:
        raise FeaturizeError(f"lag_window must be >= 1, got {lag_window}")
    if len(d) <= lag_window:
        raise FeaturizeError(
            f"dataset has {len(d)} months; lag_window={lag_window} needs at least {lag_window + 1}"
        )
    cons = d.column("consumption")
    rows, targets, stamps = [], [], []
    for t in range(lag_window, len(d)):
        rec = d[t]
        rows.append(
            list(cons[t - lag_window:t]) + list(calendar_encoding(rec.month)) + exogenous_row(rec)
        )
        targets.append(rec.consumption)
        stamps.append((rec.year, rec.month))
    return SampleSet(np.array(rows, dtype=float), np.array(targets, dtype=float), tuple(stamps), lag_window)


def _exog_slice(lag_window):
    start = lag_window + N_CALENDAR
    return slice(start, start + len(EXOGENOUS))


def fit_sample_normalizer(raw):
    """Fit scaling parameters on raw samples only.

    Consumption parameters cover both the lag columns and the targets.
    """
    if len(raw) == 0:
        raise FitError("cannot fit normalizer on an empty subset")
    lag = raw.lag_window
    cons = np.concatenate([raw.features[:, :lag].ravel(), raw.targets])
    c = fit_normalizer(cons, names=("consumption",))
    e = fit_normalizer(raw.features[:, _exog_slice(lag)], names=EXOGENOUS)
    return NormalizationParams(SCALED_FEATURES, c.mins + e.mins, c.maxs + e.maxs)


def scale_samples(raw, params):
    lag = raw.lag_window
    x = raw.features.copy()
    x[:, :lag] = params.transform("consumption", x[:, :lag])
    ex = _exog_slice(lag)
    for j, name in enumerate(EXOGENOUS):
        x[:, ex.start + j] = params.transform(name, x[:, ex.start + j])
    y = params.transform("consumption", raw.targets)
    return SampleSet(x, y, raw.timestamps, lag)


def featurize(d, lag_window, p):
    """Scaled supervised samples; exactly ``len(d) - lag_window`` of them."""
    return scale_samples(raw_samples(d, lag_window), p)


# -- synthetic data ---------------------------------------------------------------

# Consumption model (GWh), t = months since the first record:
#   trend(t)       = BASE + GROWTH * t
#   seasonality(m) = AMP1 * cos(2*pi*m/12) + AMP2 * cos(4*pi*m/12)
# Winter and late-summer peaks, spring and autumn troughs.
SYNTH_BASE = 60.0
SYNTH_GROWTH = 0.18
SYNTH_AMP1 = 8.0
SYNTH_AMP2 = 5.0


def synthetic_trend(t):
    return SYNTH_BASE + SYNTH_GROWTH * np.asarray(t, dtype=float)


def synthetic_seasonality(month):
    m = np.asarray(month, dtype=float)
    return SYNTH_AMP1 * np.cos(2 * np.pi * m / 12) + SYNTH_AMP2 * np.cos(4 * np.pi * m / 12)


def generate_synthetic(months, seed, noise=1.0, start_year=1994, start_month=1):
    """Seeded monthly series with trend, period-12 seasonality and noise.

    ``noise`` scales every random perturbation; with ``noise=0`` consumption
    equals ``synthetic_trend(t) + synthetic_seasonality(month)`` exactly.
    """
    if months < 24:
        raise GenerationError(f"need at least 24 months, got {months}")
    rng = np.random.default_rng(seed)
    t = np.arange(months)
    month = (start_month - 1 + t) % 12 + 1
    year = start_year + (start_month - 1 + t) // 12

    eps = rng.standard_normal((5, months)) * noise
    phase = 2 * np.pi * (month - 1) / 12
    consumption = synthetic_trend(t) + synthetic_seasonality(month) + 1.5 * eps[0]
    temperature = 20.5 - 7.5 * np.cos(phase - np.pi / 6) + 1.2 * eps[1]
    humidity = np.clip(68.0 + 6.0 * np.cos(phase) + 2.0 * eps[2], 0.0, 100.0)
    population = 1.0e6 * np.exp(0.035 * t / 12) * (1 + 0.001 * eps[3])
    gdp = 1100.0 + 2.0 * t + 15.0 * eps[4]

    records = [
        MonthlyRecord(
            int(year[i]), int(month[i]), float(consumption[i]), float(temperature[i]),
            float(humidity[i]), float(population[i]), float(gdp[i]),
        )
        for i in range(months)
    ]
    return Dataset(records)
