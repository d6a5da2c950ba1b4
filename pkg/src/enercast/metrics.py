"""Forecast error criteria: MSE, RMSE (two variants), MAE and MAPE.

``rmse_paper`` is the literal form with the 1/n factor outside the square
root, i.e. ``sqrt(sum(e**2)) / n``.  It equals ``sqrt(mse / n)`` and is *not*
the conventional RMSE, which is provided as ``rmse_standard``.

Sums run left to right in float64 so results are reproducible bit for bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import DomainError, PairingError

REPORT_FIELDS = ("mse", "rmse_paper", "rmse_standard", "mae", "mape_pct")


@dataclass(frozen=True)
class SeriesPair:
    """Aligned actual and forecast sequences."""

    actual: tuple
    forecast: tuple

    def __post_init__(self):
        actual = tuple(float(v) for v in np.ravel(np.asarray(self.actual, dtype=float)))
        forecast = tuple(float(v) for v in np.ravel(np.asarray(self.forecast, dtype=float)))
        if len(actual) != len(forecast):
            raise PairingError(
                f"actual has {len(actual)} values but forecast has {len(forecast)}"
            )
        if not actual:
            raise PairingError("series must contain at least one value")
        object.__setattr__(self, "actual", actual)
        object.__setattr__(self, "forecast", forecast)

    @property
    def n(self):
        return len(self.actual)

    def errors(self):
        return [y - f for y, f in zip(self.actual, self.forecast)]


def _pair(actual, forecast):
    if isinstance(actual, SeriesPair):
        if forecast is not None:
            raise TypeError("pass either a SeriesPair or two sequences")
        return actual
    return SeriesPair(actual, forecast)


def _sum(values):
    total = 0.0
    for v in values:
        total += v
    return total


def mse(actual, forecast=None):
    """Mean squared error, ``(1/n) * sum((y - yhat)**2)``."""
    s = _pair(actual, forecast)
    return _sum(e * e for e in s.errors()) / s.n


def rmse_paper(actual, forecast=None):
    s = _pair(actual, forecast)
    return math.sqrt(_sum(e * e for e in s.errors())) / s.n


def rmse_standard(actual, forecast=None):
    return math.sqrt(mse(actual, forecast))


def mae(actual, forecast=None):
    """Mean absolute error, ``(1/n) * sum(|y - yhat|)``."""
    s = _pair(actual, forecast)
    return _sum(abs(e) for e in s.errors()) / s.n


def mape(actual, forecast=None):
    """Mean absolute percentage error, in percent.

    Raises DomainError when any actual value is zero; such points are never
    skipped because that would silently change n.
    """
    s = _pair(actual, forecast)
    for i, y in enumerate(s.actual):
        if y == 0.0:
            raise DomainError(f"MAPE undefined: actual value at index {i} is zero")
    return _sum(abs((y - f) / y) for y, f in zip(s.actual, s.forecast)) / s.n * 100.0


@dataclass(frozen=True)
class MetricsReport:
    mse: float
    rmse_paper: float
    rmse_standard: float
    mae: float
    mape_pct: float

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def to_csv(self):
        lines = ["metric,value"]
        lines += [f"{name},{value:.6f}" for name, value in self.as_dict().items()]
        return "\n".join(lines) + "\n"


def compute_report(actual, forecast=None):
    s = _pair(actual, forecast)
    return MetricsReport(
        mse=mse(s),
        rmse_paper=rmse_paper(s),
        rmse_standard=rmse_standard(s),
        mae=mae(s),
        mape_pct=mape(s),
    )
