"""Lagged-exogenous least squares for the national quarterly models.

Model 2 regresses the deseasonalized national series on the accepted crime
and labor covariates, Model 3 adds the raw news-event counts, Model 4 adds
the hate_reported_index ratio, and Model 5 is Model 4 re-estimated with
AR(1) errors (iterated Cochrane-Orcutt).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np
from scipy import linalg

from .arima import Forecast, _adjusted_r2
from .exceptions import CollinearityError, DegenerateInputError, InvalidArgumentError
from .series import MISSING, Quarter, TimeSeries, lag
from .stattests import durbin_watson

_CO_TOL = 1e-8
_CO_MAX_ITER = 50

DEPENDENT_NAME = "fbi_num_noseasonnal"

# Term order follows the model equations; population enters unlagged, every
# other covariate at lag 1.
_MODEL2_TERMS: tuple[tuple[str, int], ...] = (
    ("aggravated_assault_rate", 1),
    ("arrests_drug_abuse_violations", 1),
    ("arrests_weapons", 1),
    ("burglary_rate", 1),
    ("homicide_victims_black", 1),
    ("murder_nonnegligent_manslaughter_rate", 1),
    ("population", 0),
    ("rape_rate", 1),
    ("robbery_rate", 1),
    ("total_law_enforcement_employees", 1),
    ("uner_quar", 1),
)
_EVENT_TERMS: tuple[tuple[str, int], ...] = (
    ("event_detected_num", 0),
    ("news_num", 0),
)
_INDEX_TERM: tuple[tuple[str, int], ...] = (("hate_reported_index", 0),)


@dataclass(frozen=True)
class RegressionSpec:
    """Declarative regression: dependent, (variable, lag) terms, intercept,
    and optional AR(1) error structure."""

    dependent: str
    terms: tuple[tuple[str, int], ...]
    include_intercept: bool = True
    ar_error_order: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple((str(n), int(k)) for n, k in self.terms))
        if self.ar_error_order not in (0, 1):
            raise InvalidArgumentError("ar_error_order must be 0 or 1")
        for name, k in self.terms:
            if k not in (0, 1):
                raise InvalidArgumentError(f"term {name!r} has unsupported lag {k}")
        if len(set(self.terms)) != len(self.terms):
            raise InvalidArgumentError("duplicate (variable, lag) terms")

    @property
    def n_coefficients(self) -> int:
        return len(self.terms) + int(self.include_intercept)

    def term_names(self) -> tuple[str, ...]:
        return tuple(f"{n}(-{k})" if k else n for n, k in self.terms)


def build_model_spec(model_id: int) -> RegressionSpec:
    """Return the term list for Models 2-5; Model 5 adds AR(1) errors to Model 4."""
    if model_id == 2:
        terms = _MODEL2_TERMS
    elif model_id == 3:
        terms = _MODEL2_TERMS + _EVENT_TERMS
    elif model_id in (4, 5):
        terms = _MODEL2_TERMS + _EVENT_TERMS + _INDEX_TERM
    else:
        raise InvalidArgumentError(f"unknown model id {model_id}; expected 2, 3, 4, or 5")
    return RegressionSpec(
        dependent=DEPENDENT_NAME,
        terms=terms,
        include_intercept=True,
        ar_error_order=1 if model_id == 5 else 0,
    )


@dataclass(frozen=True)
class Dataset:
    """Named series aligned on a common quarterly frame."""

    series: tuple[TimeSeries, ...]
    _by_name: Mapping[str, TimeSeries] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "series", tuple(self.series))
        if not self.series:
            raise InvalidArgumentError("dataset needs at least one series")
        start = self.series[0].start
        n = len(self.series[0])
        by_name: dict[str, TimeSeries] = {}
        for ts in self.series:
            if ts.start != start or len(ts) != n:
                raise InvalidArgumentError(f"series {ts.name!r} is not aligned to the dataset frame")
            if ts.name in by_name:
                raise InvalidArgumentError(f"duplicate series name {ts.name!r}")
            by_name[ts.name] = ts
        object.__setattr__(self, "_by_name", by_name)

    @classmethod
    def align(cls, series: Iterable[TimeSeries]) -> "Dataset":
        """Trim all series to the intersection of their frames."""
        items = list(series)
        if not items:
            raise InvalidArgumentError("dataset needs at least one series")
        start = max(ts.start for ts in items)
        end = min(ts.end for ts in items)
        if end < start:
            raise InvalidArgumentError("series frames do not overlap")
        return cls(tuple(ts.window(start, end) for ts in items))

    @property
    def start(self) -> Quarter:
        return self.series[0].start

    @property
    def end(self) -> Quarter:
        return self.series[0].end

    def names(self) -> tuple[str, ...]:
        return tuple(ts.name for ts in self.series)

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def __getitem__(self, name: str) -> TimeSeries:
        try:
            return self._by_name[name]
        except KeyError:
            raise InvalidArgumentError(f"dataset has no series named {name!r}") from None

    def with_series(self, *extra: TimeSeries) -> "Dataset":
        return Dataset.align(list(self.series) + list(extra))

    def window(self, start: Quarter, end: Quarter) -> "Dataset":
        return Dataset(tuple(ts.window(start, end) for ts in self.series))

    @classmethod
    def from_csv(cls, path: str | Path) -> "Dataset":
        """Load a wide `year,quarter,<variable>...` CSV."""
        path = Path(path)
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header[:2]] != ["year", "quarter"]:
                raise InvalidArgumentError(f"{path}: expected header 'year,quarter,<variables>'")
            names = [h.strip() for h in header[2:]]
            if not names:
                raise InvalidArgumentError(f"{path}: no variable columns")
            quarters: list[Quarter] = []
            columns: list[list[float]] = [[] for _ in names]
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    quarters.append(Quarter(int(row[0]), int(row[1])))
                except (ValueError, IndexError) as exc:
                    raise InvalidArgumentError(f"{path}:{lineno}: malformed row") from exc
                for j in range(len(names)):
                    raw = row[2 + j].strip() if len(row) > 2 + j else ""
                    columns[j].append(MISSING if raw == "" else float(raw))
        if not quarters:
            raise InvalidArgumentError(f"{path}: no data rows")
        for qa, qb in zip(quarters, quarters[1:]):
            if qb != qa + 1:
                raise InvalidArgumentError(f"{path}: rows must be sorted consecutive quarters")
        return cls(tuple(TimeSeries(n, quarters[0], tuple(col)) for n, col in zip(names, columns)))

    def to_csv(self, path: str | Path) -> None:
        with Path(path).open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["year", "quarter"] + list(self.names()))
            for i, q in enumerate(self.series[0].quarters()):
                row: list = [q.year, q.quarter]
                for ts in self.series:
                    v = ts.values[i]
                    row.append("" if math.isnan(v) else repr(v))
                writer.writerow(row)


@dataclass(frozen=True)
class RegressionFit:
    spec: RegressionSpec
    coef_names: tuple[str, ...]
    coefficients: tuple[float, ...]
    std_errors: tuple[float, ...]
    residuals: TimeSeries
    sigma2: float
    log_likelihood: float
    adj_r_squared: float
    durbin_watson: float
    n_used: int
    rho: float | None = None

    def coefficient(self, name: str) -> float:
        try:
            return self.coefficients[self.coef_names.index(name)]
        except ValueError:
            raise InvalidArgumentError(f"no coefficient named {name!r}") from None


def _build_design(dataset: Dataset, spec: RegressionSpec) -> tuple[np.ndarray, np.ndarray, list[str], Quarter]:
    """Assemble (y, X, column names, first used quarter), dropping rows with
    any missing value as a block."""
    y_series = dataset[spec.dependent]
    cols = [y_series.to_array()]
    names: list[str] = []
    for name, k in spec.terms:
        cols.append(lag(dataset[name], k).to_array())
        names.append(f"{name}(-{k})" if k else name)
    mat = np.column_stack(cols)
    finite = np.all(np.isfinite(mat), axis=1)
    if not finite.any():
        raise InvalidArgumentError("no usable rows after removing missing values")
    idx = np.flatnonzero(finite)
    if not np.array_equal(idx, np.arange(idx[0], idx[-1] + 1)):
        raise InvalidArgumentError("usable rows are not contiguous")
    mat = mat[finite]
    y = mat[:, 0]
    X = mat[:, 1:]
    if spec.include_intercept:
        X = np.column_stack([np.ones(len(y)), X])
        names = ["intercept"] + names
    return y, X, names, dataset.start + int(idx[0])


def _qr_solve(X: np.ndarray, y: np.ndarray, names: list[str]) -> tuple[np.ndarray, np.ndarray]:
    """Solve least squares through a QR factorization of the column-scaled
    design (never the explicit normal equations).

    Returns (coefficients, (X'X)^{-1}). Rank deficiency raises a
    CollinearityError naming each column that is linearly dependent on the
    columns before it, so the later-added duplicate gets the blame.
    """
    n, k = X.shape
    norms = np.sqrt((X * X).sum(axis=0))
    zero_cols = [names[j] for j in range(k) if norms[j] == 0.0]
    if zero_cols:
        raise CollinearityError(zero_cols, "all-zero columns: " + ", ".join(zero_cols))
    scaled = X / norms
    q, r = np.linalg.qr(scaled, mode="reduced")
    diag = np.abs(np.diag(r))
    tol = max(n, k) * np.finfo(float).eps * 16.0
    bad = [j for j in range(k) if diag[j] <= tol]
    if bad:
        raise CollinearityError([names[j] for j in bad])
    beta_scaled = linalg.solve_triangular(r, q.T @ y)
    beta = beta_scaled / norms
    r_inv = linalg.solve_triangular(r, np.eye(k))
    xtx_inv = (r_inv @ r_inv.T) / np.outer(norms, norms)
    return beta, xtx_inv


def _gaussian_fit_stats(y: np.ndarray, resid: np.ndarray, k_total: int) -> tuple[float, float, float]:
    """(sigma2_ml, log_likelihood, adjusted R^2) for a residual vector."""
    n = len(resid)
    ssr = float(resid @ resid)
    sst = float(np.sum((y - y.mean()) ** 2))
    sigma2 = ssr / n
    if sigma2 <= 0.0:
        sigma2 = np.finfo(float).tiny
    loglik = -0.5 * n * (np.log(2.0 * np.pi * sigma2) + 1.0)
    if sst > 0.0:
        r2 = 1.0 - ssr / sst
    else:
        r2 = 1.0 if ssr == 0.0 else 0.0
    return sigma2, loglik, _adjusted_r2(r2, n, k_total)


def fit_ols(dataset: Dataset, spec: RegressionSpec) -> RegressionFit:
    """Least-squares estimation via pivoted QR (no explicit normal equations).

    With ar_error_order=1, estimates regression with AR(1) errors by iterated
    feasible GLS (Cochrane-Orcutt), iterating rho to 1e-8 or 50 rounds; the
    stored residuals are then the AR(1) innovations.
    """
    y, X, names, start_used = _build_design(dataset, spec)
    n, k = X.shape
    if n <= k + 2:
        raise InvalidArgumentError(f"need more than {k + 2} usable rows, got {n}")

    beta, xtx_inv = _qr_solve(X, y, names)
    resid = y - X @ beta

    if spec.ar_error_order == 0:
        ssr = float(resid @ resid)
        s2 = ssr / (n - k)
        std_errors = tuple(float(v) for v in np.sqrt(np.clip(s2 * np.diag(xtx_inv), 0.0, None)))
        sigma2, loglik, adj_r2 = _gaussian_fit_stats(y, resid, k)
        dw = durbin_watson(resid) if ssr > 0.0 else float("nan")
        residual_series = TimeSeries(spec.dependent + "_residuals", start_used, tuple(resid))
        return RegressionFit(
            spec=spec,
            coef_names=tuple(names),
            coefficients=tuple(float(b) for b in beta),
            std_errors=std_errors,
            residuals=residual_series,
            sigma2=sigma2,
            log_likelihood=loglik,
            adj_r_squared=adj_r2,
            durbin_watson=dw,
            n_used=n,
            rho=None,
        )

    # Cochrane-Orcutt: transform out the AR(1) error, refit, iterate rho.
    rho = 0.0
    for _ in range(_CO_MAX_ITER):
        den = float(resid[:-1] @ resid[:-1])
        if den == 0.0:
            raise DegenerateInputError("residuals vanish; AR(1) error estimation is degenerate")
        rho_new = float(resid[1:] @ resid[:-1]) / den
        y_star = y[1:] - rho_new * y[:-1]
        x_star = X[1:] - rho_new * X[:-1]
        beta, xtx_inv = _qr_solve(x_star, y_star, names)
        resid = y - X @ beta
        if abs(rho_new - rho) < _CO_TOL:
            rho = rho_new
            break
        rho = rho_new

    innovations = resid[1:] - rho * resid[:-1]
    n_inno = len(innovations)
    ssr_inno = float(innovations @ innovations)
    s2 = ssr_inno / max(n_inno - k, 1)
    std_errors = tuple(float(v) for v in np.sqrt(np.clip(s2 * np.diag(xtx_inv), 0.0, None)))
    sigma2, loglik, adj_r2 = _gaussian_fit_stats(y[1:], innovations, k + 1)
    dw = durbin_watson(innovations) if ssr_inno > 0.0 else float("nan")
    residual_series = TimeSeries(spec.dependent + "_innovations", start_used + 1, tuple(innovations))
    return RegressionFit(
        spec=spec,
        coef_names=tuple(names),
        coefficients=tuple(float(b) for b in beta),
        std_errors=std_errors,
        residuals=residual_series,
        sigma2=sigma2,
        log_likelihood=loglik,
        adj_r_squared=adj_r2,
        durbin_watson=dw,
        n_used=n,
        rho=rho,
    )


def _predictor_row(fit: RegressionFit, dataset: Dataset, q: Quarter) -> np.ndarray:
    values: list[float] = [1.0] if fit.spec.include_intercept else []
    for name, k in fit.spec.terms:
        source = dataset[name]
        needed = q - k
        if not source.has_value_at(needed):
            raise InvalidArgumentError(f"missing predictor {name!r} at {needed} (needed for {q})")
        values.append(source.value_at(needed))
    return np.asarray(values)


def forecast_regression(fit: RegressionFit, dataset: Dataset, span: tuple[Quarter, Quarter]) -> Forecast:
    """Linear prediction per quarter over the inclusive span.

    With AR(1) errors the prediction adds rho * (previous structural
    residual), using actual residuals where the dependent is observed and
    propagating rho-discounted ones beyond.
    """
    start, end = span
    horizon = end - start + 1
    if horizon < 1:
        raise InvalidArgumentError(f"empty forecast span {start}..{end}")
    beta = np.asarray(fit.coefficients)

    if fit.rho is None:
        preds = [float(_predictor_row(fit, dataset, start + h) @ beta) for h in range(horizon)]
        return Forecast(start - 1, horizon, tuple(preds), "static")

    dependent = dataset[fit.spec.dependent]
    walk_start = fit.residuals.start - 1  # first structural residual quarter
    e_prev: float | None = None
    preds: list[float] = []
    propagated = False
    for i in range(end - walk_start + 1):
        q = walk_start + i
        core = float(_predictor_row(fit, dataset, q) @ beta)
        if q >= start:
            preds.append(core + (fit.rho * e_prev if e_prev is not None else 0.0))
        if dependent.has_value_at(q):
            e_prev = dependent.value_at(q) - core
        else:
            propagated = True
            e_prev = fit.rho * e_prev if e_prev is not None else None
    return Forecast(start - 1, horizon, tuple(preds), "dynamic" if propagated else "static")
