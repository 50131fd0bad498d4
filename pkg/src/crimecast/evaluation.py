"""Forecast accuracy metrics and the multi-model comparison report."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .arima import Forecast
from .exceptions import InvalidArgumentError
from .series import TimeSeries

REPORT_COLUMNS = ("R-Squared", "Log Likelihood", "RMSE", "MAPE")


def rmse(actual: Sequence[float], predicted: Sequence[float]) -> float:
    """Root mean squared error."""
    a = np.asarray(actual, dtype=float)
    p = np.asarray(predicted, dtype=float)
    if len(a) != len(p) or len(a) == 0:
        raise InvalidArgumentError("sequences must have equal nonzero length")
    return float(np.sqrt(np.mean((a - p) ** 2)))


def mape(actual: Sequence[float], predicted: Sequence[float]) -> float:
    """Mean absolute percentage error, reported x100."""
    a = np.asarray(actual, dtype=float)
    p = np.asarray(predicted, dtype=float)
    if len(a) != len(p) or len(a) == 0:
        raise InvalidArgumentError("sequences must have equal nonzero length")
    zeros = np.flatnonzero(a == 0.0)
    if zeros.size:
        raise InvalidArgumentError(f"actual value at index {int(zeros[0])} is zero")
    return float(np.mean(np.abs((a - p) / a)) * 100.0)


@dataclass(frozen=True)
class ModelEntry:
    """One fitted model's holdout forecast and its fit statistics."""

    name: str
    adj_r_squared: float
    log_likelihood: float
    forecast: Forecast


@dataclass(frozen=True)
class ModelRow:
    name: str
    adj_r_squared: float
    log_likelihood: float
    rmse: float
    mape: float
    predictions: tuple[float, ...]


@dataclass(frozen=True)
class ForecastReport:
    """Per-model metric rows over an identical holdout range."""

    rows: tuple[ModelRow, ...]
    actual: TimeSeries

    def to_dict(self) -> dict:
        holdout = {
            "start": str(self.actual.start),
            "end": str(self.actual.end),
            "actual": list(self.actual.values),
        }
        models = []
        for row in self.rows:
            models.append(
                {
                    "Models": row.name,
                    "R-Squared": row.adj_r_squared,
                    "Log Likelihood": row.log_likelihood,
                    "RMSE": row.rmse,
                    "MAPE": row.mape,
                }
            )
        return {"holdout": holdout, "models": models}

    def write_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    def write_long_csv(self, path: str | Path) -> None:
        """Long-format `year,quarter,model,predicted,actual` rows for plotting."""
        with Path(path).open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["year", "quarter", "model", "predicted", "actual"])
            quarters = self.actual.quarters()
            for row in self.rows:
                for q, pred, act in zip(quarters, row.predictions, self.actual.values):
                    writer.writerow([q.year, q.quarter, row.name, repr(pred), repr(act)])


def compare_models(entries: Sequence[ModelEntry], actual: TimeSeries) -> ForecastReport:
    """Score every model on the identical holdout range, in input order."""
    if not entries:
        raise InvalidArgumentError("need at least one model to compare")
    horizon = len(actual)
    expected_start = actual.start
    rows = []
    for entry in entries:
        fc = entry.forecast
        if fc.horizon != horizon or fc.origin + 1 != expected_start:
            raise InvalidArgumentError(
                f"model {entry.name!r} forecast range does not match the holdout"
            )
        rows.append(
            ModelRow(
                name=entry.name,
                adj_r_squared=entry.adj_r_squared,
                log_likelihood=entry.log_likelihood,
                rmse=rmse(actual.values, fc.point_values),
                mape=mape(actual.values, fc.point_values),
                predictions=fc.point_values,
            )
        )
    return ForecastReport(rows=tuple(rows), actual=actual)
