"""State-level panel estimation: balancing, the within (fixed-effects)
estimator, Swamy-Arora random effects, and per-unit forecasting."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .arima import Forecast
from .exceptions import (
    CollinearityError,
    EmptyPanelError,
    InvalidArgumentError,
)
from .regression import Dataset, RegressionSpec, _build_design, _qr_solve
from .series import MISSING, Quarter, TimeSeries


@dataclass(frozen=True)
class PanelDataset:
    """Observations keyed by (unit, quarter), each a mapping of variable
    name to value. Units may have gaps until the panel is balanced."""

    observations: Mapping[tuple[str, Quarter], Mapping[str, float]]

    def __post_init__(self) -> None:
        if not self.observations:
            raise InvalidArgumentError("panel has no observations")

    @classmethod
    def from_rows(cls, rows: Iterable[tuple[str, Quarter, Mapping[str, float]]]) -> "PanelDataset":
        obs: dict[tuple[str, Quarter], dict[str, float]] = {}
        for unit, q, values in rows:
            key = (str(unit), q)
            if key in obs:
                raise InvalidArgumentError(f"duplicate observation for {unit} at {q}")
            obs[key] = dict(values)
        return cls(obs)

    @classmethod
    def from_csv(cls, path: str | Path) -> "PanelDataset":
        """Load a long `state,year,quarter,<variable>...` CSV."""
        path = Path(path)
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header[:3]] != ["state", "year", "quarter"]:
                raise InvalidArgumentError(f"{path}: expected header 'state,year,quarter,<variables>'")
            names = [h.strip() for h in header[3:]]
            if not names:
                raise InvalidArgumentError(f"{path}: no variable columns")
            rows: list[tuple[str, Quarter, dict[str, float]]] = []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    unit = row[0].strip()
                    q = Quarter(int(row[1]), int(row[2]))
                except (ValueError, IndexError) as exc:
                    raise InvalidArgumentError(f"{path}:{lineno}: malformed row") from exc
                values = {}
                for j, name in enumerate(names):
                    raw = row[3 + j].strip() if len(row) > 3 + j else ""
                    values[name] = MISSING if raw == "" else float(raw)
                rows.append((unit, q, values))
        if not rows:
            raise InvalidArgumentError(f"{path}: no data rows")
        return cls.from_rows(rows)

    def units(self) -> tuple[str, ...]:
        return tuple(sorted({u for u, _ in self.observations}))

    def variables(self) -> tuple[str, ...]:
        names: set[str] = set()
        for values in self.observations.values():
            names.update(values)
        return tuple(sorted(names))

    def span(self) -> tuple[Quarter, Quarter]:
        quarters = [q for _, q in self.observations]
        return min(quarters), max(quarters)

    def unit_quarters(self, unit: str) -> list[Quarter]:
        return sorted(q for u, q in self.observations if u == unit)

    def unit_dataset(self, unit: str, variables: Iterable[str] | None = None) -> Dataset:
        """Build the per-unit aligned dataset; the unit must be gap-free."""
        quarters = self.unit_quarters(unit)
        if not quarters:
            raise InvalidArgumentError(f"panel has no unit {unit!r}")
        for qa, qb in zip(quarters, quarters[1:]):
            if qb != qa + 1:
                raise InvalidArgumentError(f"unit {unit!r} has gaps; balance the panel first")
        names = tuple(variables) if variables is not None else self.variables()
        series = []
        for name in names:
            vals = [self.observations[(unit, q)].get(name, MISSING) for q in quarters]
            series.append(TimeSeries(name, quarters[0], tuple(vals)))
        return Dataset(tuple(series))

    def restricted(self, units: Iterable[str], span: tuple[Quarter, Quarter]) -> "PanelDataset":
        keep = set(units)
        start, end = span
        obs = {
            (u, q): v
            for (u, q), v in self.observations.items()
            if u in keep and start <= q <= end
        }
        if not obs:
            raise EmptyPanelError("no observations left after restriction")
        return PanelDataset(obs)


@dataclass(frozen=True)
class BalanceReport:
    span: tuple[Quarter, Quarter]
    dropped: tuple[str, ...]
    retained: tuple[str, ...]
    coverage: Mapping[str, float]
    retained_share: float


def balance_panel(
    panel: PanelDataset,
    min_coverage: float = 1.0,
    span: tuple[Quarter, Quarter] | None = None,
    dependent: str | None = None,
) -> tuple[PanelDataset, BalanceReport]:
    """Drop units whose coverage over the modeling span is below min_coverage.

    Coverage counts quarters with an observation (with a finite dependent
    value when `dependent` is given). The report carries the retained share
    of the dependent variable's total.
    """
    if not 0.0 <= min_coverage <= 1.0:
        raise InvalidArgumentError("min_coverage must be in [0, 1]")
    if span is None:
        span = panel.span()
    start, end = span
    total_quarters = end - start + 1

    def covered(unit: str, q: Quarter) -> bool:
        values = panel.observations.get((unit, q))
        if values is None:
            return False
        if dependent is None:
            return True
        v = values.get(dependent, MISSING)
        return not math.isnan(v)

    coverage: dict[str, float] = {}
    for unit in panel.units():
        count = sum(1 for i in range(total_quarters) if covered(unit, start + i))
        coverage[unit] = count / total_quarters
    retained = tuple(u for u in panel.units() if coverage[u] >= min_coverage)
    dropped = tuple(u for u in panel.units() if coverage[u] < min_coverage)
    if not retained:
        raise EmptyPanelError("balancing dropped every unit")

    if dependent is not None:
        def dep_total(units: Iterable[str]) -> float:
            total = 0.0
            for u in units:
                for i in range(total_quarters):
                    values = panel.observations.get((u, start + i))
                    if values is None:
                        continue
                    v = values.get(dependent, MISSING)
                    if not math.isnan(v):
                        total += v
            return total

        all_total = dep_total(panel.units())
        share = dep_total(retained) / all_total if all_total != 0.0 else 1.0
    else:
        n_all = sum(
            1 for (u, q) in panel.observations if start <= q <= end
        )
        n_kept = sum(
            1 for (u, q) in panel.observations if u in set(retained) and start <= q <= end
        )
        share = n_kept / n_all if n_all else 1.0

    balanced = panel.restricted(retained, span) if dropped else panel
    report = BalanceReport(
        span=span,
        dropped=dropped,
        retained=retained,
        coverage=coverage,
        retained_share=share,
    )
    return balanced, report


@dataclass(frozen=True)
class PanelFit:
    """Common slopes with covariance plus the unit-effect structure."""

    method: str  # "fixed" | "random"
    spec: RegressionSpec
    slope_names: tuple[str, ...]
    slopes: tuple[float, ...]
    slope_cov: np.ndarray = field(compare=False)
    unit_effects: Mapping[str, float]
    intercept: float | None
    sigma2_e: float
    sigma2_u: float | None
    theta: float | None
    within_r_squared: float
    overall_r_squared: float
    log_likelihood: float
    residuals: Mapping[str, TimeSeries]
    n_obs: int

    def slope(self, name: str) -> float:
        try:
            return self.slopes[self.slope_names.index(name)]
        except ValueError:
            raise InvalidArgumentError(f"no slope named {name!r}") from None

    def average_effect(self) -> float:
        if self.method == "random":
            return float(self.intercept or 0.0)
        return float(np.mean(list(self.unit_effects.values())))


def _stack_unit_designs(
    panel: PanelDataset, spec: RegressionSpec
) -> tuple[list[str], list[np.ndarray], list[np.ndarray], list[Quarter], list[str]]:
    """Per-unit design matrices without the intercept column."""
    slope_spec = RegressionSpec(
        dependent=spec.dependent,
        terms=spec.terms,
        include_intercept=False,
        ar_error_order=0,
    )
    units = panel.units()
    if len(units) < 2:
        raise InvalidArgumentError("panel estimation needs at least 2 units")
    needed = [spec.dependent] + [name for name, _ in spec.terms]
    ys: list[np.ndarray] = []
    xs: list[np.ndarray] = []
    starts: list[Quarter] = []
    names: list[str] = []
    k = len(spec.terms)
    for unit in units:
        ds = panel.unit_dataset(unit, needed)
        y_u, x_u, names, start_u = _build_design(ds, slope_spec)
        if len(y_u) < k + 2:
            raise InvalidArgumentError(
                f"unit {unit!r} contributes {len(y_u)} usable rows, need at least {k + 2}"
            )
        ys.append(y_u)
        xs.append(x_u)
        starts.append(start_u)
    return list(units), ys, xs, starts, names


def fit_fixed_effects(panel: PanelDataset, spec: RegressionSpec) -> PanelFit:
    """Within estimator: demean by unit, pooled OLS, per-unit intercepts.

    The slope covariance uses the within degrees of freedom (n - N - k).
    """
    units, ys, xs, starts, names = _stack_unit_designs(panel, spec)
    k = len(names)
    y_dm_parts, x_dm_parts = [], []
    for y_u, x_u in zip(ys, xs):
        y_dm_parts.append(y_u - y_u.mean())
        x_dm_parts.append(x_u - x_u.mean(axis=0))
    y_dm = np.concatenate(y_dm_parts)
    x_dm = np.vstack(x_dm_parts)
    n = len(y_dm)

    # A regressor constant within every unit is absorbed by the effects.
    scale = np.abs(np.vstack(xs)).max(axis=0)
    absorbed = [names[j] for j in range(k) if np.abs(x_dm[:, j]).max() <= 1e-12 * max(scale[j], 1.0)]
    if absorbed:
        raise CollinearityError(absorbed, "regressors constant within units: " + ", ".join(absorbed))

    beta, xtx_inv = _qr_solve(x_dm, y_dm, names)
    resid = y_dm - x_dm @ beta
    ssr = float(resid @ resid)
    dof = n - len(units) - k
    if dof <= 0:
        raise InvalidArgumentError("not enough observations for within degrees of freedom")
    sigma2_e = ssr / dof
    slope_cov = sigma2_e * xtx_inv

    effects: dict[str, float] = {}
    residuals: dict[str, TimeSeries] = {}
    sst_raw = 0.0
    y_all = np.concatenate(ys)
    grand_mean = y_all.mean()
    pos = 0
    for unit, y_u, x_u, start_u in zip(units, ys, xs, starts):
        effects[unit] = float(y_u.mean() - x_u.mean(axis=0) @ beta)
        r_u = resid[pos : pos + len(y_u)]
        residuals[unit] = TimeSeries(f"{unit}_residuals", start_u, tuple(r_u))
        pos += len(y_u)
    sst_raw = float(np.sum((y_all - grand_mean) ** 2))
    sst_within = float(y_dm @ y_dm)
    within_r2 = 1.0 - ssr / sst_within if sst_within > 0.0 else float("nan")
    overall_r2 = 1.0 - ssr / sst_raw if sst_raw > 0.0 else float("nan")
    sigma2_ml = max(ssr / n, np.finfo(float).tiny)
    loglik = -0.5 * n * (np.log(2.0 * np.pi * sigma2_ml) + 1.0)

    return PanelFit(
        method="fixed",
        spec=spec,
        slope_names=tuple(names),
        slopes=tuple(float(b) for b in beta),
        slope_cov=slope_cov,
        unit_effects=effects,
        intercept=None,
        sigma2_e=sigma2_e,
        sigma2_u=None,
        theta=None,
        within_r_squared=within_r2,
        overall_r_squared=overall_r2,
        log_likelihood=loglik,
        residuals=residuals,
        n_obs=n,
    )


def fit_random_effects(panel: PanelDataset, spec: RegressionSpec) -> PanelFit:
    """Swamy-Arora random effects on a balanced panel.

    Variance components come from the within and between residual variances;
    negative sigma2_u estimates are truncated at zero with a warning. GLS is
    carried out by quasi-demeaning with theta = 1 - sqrt(s2e/(s2e + T*s2u)).
    """
    units, ys, xs, starts, names = _stack_unit_designs(panel, spec)
    k = len(names)
    t_lens = {len(y_u) for y_u in ys}
    if len(t_lens) != 1 or len({s for s in starts}) != 1:
        raise InvalidArgumentError("random effects requires a balanced panel")
    t_len = t_lens.pop()
    n_units = len(units)
    n = n_units * t_len

    # Within step for sigma2_e.
    y_dm = np.concatenate([y_u - y_u.mean() for y_u in ys])
    x_dm = np.vstack([x_u - x_u.mean(axis=0) for x_u in xs])
    beta_w, _ = _qr_solve(x_dm, y_dm, names)
    resid_w = y_dm - x_dm @ beta_w
    dof_w = n - n_units - k
    if dof_w <= 0:
        raise InvalidArgumentError("not enough observations for within degrees of freedom")
    sigma2_e = float(resid_w @ resid_w) / dof_w

    # Between step for sigma2_u.
    if n_units < k + 2:
        raise InvalidArgumentError("too few units for the between regression")
    y_bar = np.array([y_u.mean() for y_u in ys])
    x_bar = np.vstack([x_u.mean(axis=0) for x_u in xs])
    xb = np.column_stack([np.ones(n_units), x_bar])
    beta_b, _ = _qr_solve(xb, y_bar, ["intercept"] + names)
    resid_b = y_bar - xb @ beta_b
    s2_between = float(resid_b @ resid_b) / (n_units - k - 1)
    sigma2_u = s2_between - sigma2_e / t_len
    if sigma2_u < 0.0:
        warnings.warn("negative sigma2_u estimate truncated at zero", stacklevel=2)
        sigma2_u = 0.0
    theta = 1.0 - np.sqrt(sigma2_e / (sigma2_e + t_len * sigma2_u))

    # Quasi-demeaned GLS.
    y_star_parts, x_star_parts = [], []
    for y_u, x_u in zip(ys, xs):
        y_star_parts.append(y_u - theta * y_u.mean())
        x_star_parts.append(np.column_stack([np.full(t_len, 1.0 - theta), x_u - theta * x_u.mean(axis=0)]))
    y_star = np.concatenate(y_star_parts)
    x_star = np.vstack(x_star_parts)
    full_names = ["intercept"] + names
    beta_full, xtx_inv = _qr_solve(x_star, y_star, full_names)
    resid_star = y_star - x_star @ beta_full
    ssr_star = float(resid_star @ resid_star)
    sigma2_nu = ssr_star / (n - k - 1)
    cov_full = sigma2_nu * xtx_inv
    intercept = float(beta_full[0])
    beta = beta_full[1:]

    residuals: dict[str, TimeSeries] = {}
    sse = 0.0
    sst = 0.0
    y_all = np.concatenate(ys)
    grand_mean = y_all.mean()
    for unit, y_u, x_u, start_u in zip(units, ys, xs, starts):
        r_u = y_u - intercept - x_u @ beta
        residuals[unit] = TimeSeries(f"{unit}_residuals", start_u, tuple(r_u))
        sse += float(r_u @ r_u)
    sst = float(np.sum((y_all - grand_mean) ** 2))
    overall_r2 = 1.0 - sse / sst if sst > 0.0 else float("nan")
    fitted_dm_resid = y_dm - x_dm @ beta
    sst_within = float(y_dm @ y_dm)
    within_r2 = (
        1.0 - float(fitted_dm_resid @ fitted_dm_resid) / sst_within if sst_within > 0.0 else float("nan")
    )
    sigma2_ml = max(ssr_star / n, np.finfo(float).tiny)
    loglik = -0.5 * n * (np.log(2.0 * np.pi * sigma2_ml) + 1.0)

    return PanelFit(
        method="random",
        spec=spec,
        slope_names=tuple(names),
        slopes=tuple(float(b) for b in beta),
        slope_cov=cov_full[1:, 1:],
        unit_effects={},
        intercept=intercept,
        sigma2_e=sigma2_e,
        sigma2_u=sigma2_u,
        theta=float(theta),
        within_r_squared=within_r2,
        overall_r_squared=overall_r2,
        log_likelihood=loglik,
        residuals=residuals,
        n_obs=n,
    )


def forecast_panel(
    fit: PanelFit, panel: PanelDataset, span: tuple[Quarter, Quarter]
) -> dict[str, Forecast]:
    """Per-unit forecasts: unit intercept plus the common slopes.

    Units absent from training receive the average intercept with a warning.
    """
    start, end = span
    horizon = end - start + 1
    if horizon < 1:
        raise InvalidArgumentError(f"empty forecast span {start}..{end}")
    beta = np.asarray(fit.slopes)
    out: dict[str, Forecast] = {}
    for unit in panel.units():
        if fit.method == "fixed":
            if unit in fit.unit_effects:
                intercept = fit.unit_effects[unit]
            else:
                intercept = fit.average_effect()
                warnings.warn(
                    f"unit {unit!r} absent from training; using the average intercept",
                    stacklevel=2,
                )
        else:
            intercept = float(fit.intercept or 0.0)
        preds: list[float] = []
        for h in range(horizon):
            q = start + h
            row: list[float] = []
            for name, lag_k in fit.spec.terms:
                source = panel.observations.get((unit, q - lag_k))
                value = MISSING if source is None else source.get(name, MISSING)
                if math.isnan(value):
                    raise InvalidArgumentError(
                        f"missing predictor {name!r} for unit {unit!r} at {q - lag_k}"
                    )
                row.append(value)
            preds.append(float(intercept + np.asarray(row) @ beta))
        out[unit] = Forecast(start - 1, horizon, tuple(preds), "static")
    return out
