"""Hypothesis tests and diagnostics: ADF, Ljung-Box, Durbin-Watson, Hausman,
Levene, paired t, and Cohen's kappa.

All functions are pure; p-values come from scipy's distribution CDFs while
the test statistics themselves are computed here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats

from .exceptions import DegenerateInputError, InvalidArgumentError
from .series import TimeSeries, acf


@dataclass(frozen=True)
class TestResult:
    """A test statistic with its p-value, degrees of freedom (or lag count),
    and a short free-text detail such as the critical-value rows used."""

    statistic: float
    p_value: float
    dof_or_lags: int
    detail: str = ""

    __test__ = False  # keep pytest from collecting this dataclass

    def __post_init__(self) -> None:
        if not np.isfinite(self.statistic):
            raise InvalidArgumentError("test statistic must be finite")
        if not 0.0 <= self.p_value <= 1.0:
            raise InvalidArgumentError(f"p-value {self.p_value} outside [0,1]")


# Finite-sample Dickey-Fuller critical values (Fuller 1976; Banerjee et al.
# 1993) for the t-ratio on the lagged level. Rows are sample sizes, columns
# are the cumulative probabilities in _ADF_PROBS.
_ADF_PROBS = np.array([0.01, 0.025, 0.05, 0.10, 0.90, 0.95, 0.975, 0.99])
_ADF_NS = np.array([25, 50, 100, 250, 500, 100000])
_ADF_TABLES = {
    "none": np.array(
        [
            [-2.66, -2.26, -1.95, -1.60, 0.92, 1.33, 1.70, 2.16],
            [-2.62, -2.25, -1.95, -1.61, 0.91, 1.31, 1.66, 2.08],
            [-2.60, -2.24, -1.95, -1.61, 0.90, 1.29, 1.64, 2.03],
            [-2.58, -2.23, -1.95, -1.62, 0.89, 1.29, 1.63, 2.01],
            [-2.58, -2.23, -1.95, -1.62, 0.89, 1.28, 1.62, 2.00],
            [-2.58, -2.23, -1.95, -1.62, 0.89, 1.28, 1.62, 2.00],
        ]
    ),
    "constant": np.array(
        [
            [-3.75, -3.33, -3.00, -2.63, -0.37, 0.00, 0.34, 0.72],
            [-3.58, -3.22, -2.93, -2.60, -0.40, -0.03, 0.29, 0.66],
            [-3.51, -3.17, -2.89, -2.58, -0.42, -0.05, 0.26, 0.63],
            [-3.46, -3.14, -2.88, -2.57, -0.42, -0.06, 0.24, 0.62],
            [-3.44, -3.13, -2.87, -2.57, -0.43, -0.07, 0.24, 0.61],
            [-3.43, -3.12, -2.86, -2.57, -0.44, -0.07, 0.23, 0.60],
        ]
    ),
    "constant_trend": np.array(
        [
            [-4.38, -3.95, -3.60, -3.24, -1.14, -0.80, -0.50, -0.15],
            [-4.15, -3.80, -3.50, -3.18, -1.19, -0.87, -0.58, -0.24],
            [-4.04, -3.73, -3.45, -3.15, -1.22, -0.90, -0.62, -0.28],
            [-3.99, -3.69, -3.43, -3.13, -1.23, -0.92, -0.64, -0.31],
            [-3.98, -3.68, -3.42, -3.13, -1.24, -0.93, -0.65, -0.32],
            [-3.96, -3.66, -3.41, -3.12, -1.25, -0.94, -0.66, -0.33],
        ]
    ),
}


def _ols_lstsq(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """Least-squares fit returning (coefficients, residuals, ssr)."""
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ beta
    return beta, resid, float(resid @ resid)


def _adf_pvalue(stat: float, nobs: int, deterministic: str) -> tuple[float, str]:
    """Interpolate the DF table for the given deterministic case.

    Critical values are first interpolated across the sample-size rows, then
    the p-value is interpolated linearly across the tabulated probabilities
    and clamped to [0.01, 0.99].
    """
    table = _ADF_TABLES[deterministic]
    n = float(np.clip(nobs, _ADF_NS[0], _ADF_NS[-1]))
    hi = int(np.searchsorted(_ADF_NS, n))
    if _ADF_NS[hi] == n:
        crit = table[hi]
        rows = f"n={_ADF_NS[hi]}"
    else:
        lo = hi - 1
        w = (n - _ADF_NS[lo]) / (_ADF_NS[hi] - _ADF_NS[lo])
        crit = (1 - w) * table[lo] + w * table[hi]
        rows = f"n={_ADF_NS[lo]},{_ADF_NS[hi]}"
    if stat <= crit[0]:
        return float(_ADF_PROBS[0]), rows + "; p clamped at lower table bound"
    if stat >= crit[-1]:
        return float(_ADF_PROBS[-1]), rows + "; p clamped at upper table bound"
    p = float(np.interp(stat, crit, _ADF_PROBS))
    return p, rows


def adf_test(series: TimeSeries, max_lag: int, deterministic: str = "constant") -> TestResult:
    """Augmented Dickey-Fuller unit-root test.

    Regresses the first difference on the lagged level, lagged differences
    (count chosen by minimum AIC up to max_lag on a common sample), and the
    chosen deterministic terms. The statistic is the t-ratio on the lagged
    level; its p-value is interpolated from the embedded finite-sample tables.
    """
    if deterministic not in _ADF_TABLES:
        raise InvalidArgumentError(
            f"deterministic must be one of {sorted(_ADF_TABLES)}, got {deterministic!r}"
        )
    if max_lag < 0:
        raise InvalidArgumentError("max_lag must be >= 0")
    y = series.to_array()
    if np.isnan(y).any():
        raise InvalidArgumentError(f"series {series.name!r} has missing values")
    if len(y) < max_lag + 10:
        raise InvalidArgumentError(
            f"series length {len(y)} below required max_lag + 10 = {max_lag + 10}"
        )
    if np.ptp(y) == 0.0:
        raise DegenerateInputError(f"series {series.name!r} is constant")

    dy = np.diff(y)

    def build(j: int, offset: int) -> tuple[np.ndarray, np.ndarray]:
        # Rows are t = offset..len(dy)-1 in difference coordinates.
        rows = len(dy) - offset
        cols: list[np.ndarray] = []
        if deterministic in ("constant", "constant_trend"):
            cols.append(np.ones(rows))
        if deterministic == "constant_trend":
            cols.append(np.arange(offset, len(dy), dtype=float))
        cols.append(y[offset : len(y) - 1])
        for i in range(1, j + 1):
            cols.append(dy[offset - i : len(dy) - i])
        return np.column_stack(cols), dy[offset:]

    level_col = {"none": 0, "constant": 1, "constant_trend": 2}[deterministic]

    # Lag selection by AIC on the common sample (all candidates start at max_lag).
    best_j, best_aic = 0, np.inf
    for j in range(max_lag + 1):
        X, resp = build(j, max_lag)
        _, _, ssr = _ols_lstsq(X, resp)
        nr = len(resp)
        aic = nr * np.log(max(ssr, 1e-300) / nr) + 2 * X.shape[1]
        if aic < best_aic:
            best_aic, best_j = aic, j

    X, resp = build(best_j, best_j)
    beta, resid, ssr = _ols_lstsq(X, resp)
    nr, k = X.shape
    degenerate = ""
    if nr <= k or ssr <= 1e-12 * max(float(resp @ resp), 1e-300):
        stat = 0.0
        degenerate = "; degenerate regression (zero residual variance)"
    else:
        s2 = ssr / (nr - k)
        xtx_inv = np.linalg.pinv(X.T @ X)
        se = float(np.sqrt(max(s2 * xtx_inv[level_col, level_col], 0.0)))
        if se == 0.0 or not np.isfinite(se):
            stat = 0.0
            degenerate = "; degenerate regression (zero standard error)"
        else:
            stat = float(beta[level_col] / se)
    p, rows = _adf_pvalue(stat, nr, deterministic)
    detail = f"deterministic={deterministic}; lags={best_j}; table rows {rows}{degenerate}"
    return TestResult(statistic=stat, p_value=p, dof_or_lags=best_j, detail=detail)


def ljung_box(series: TimeSeries, lags: int) -> TestResult:
    """Ljung-Box portmanteau test: Q = n(n+2) sum_k acf(k)^2/(n-k)."""
    if lags < 1:
        raise InvalidArgumentError(f"lags must be >= 1, got {lags}")
    n = len(series)
    if n <= lags + 1:
        raise InvalidArgumentError(f"series length {n} too short for {lags} lags")
    r = acf(series, lags)
    q = 0.0
    for k in range(1, lags + 1):
        q += r[k] ** 2 / (n - k)
    q *= n * (n + 2)
    p = float(stats.chi2.sf(q, lags))
    return TestResult(statistic=float(q), p_value=p, dof_or_lags=lags, detail=f"chi2({lags})")


def durbin_watson(residuals: Sequence[float]) -> float:
    """Durbin-Watson statistic, in [0, 4]."""
    e = np.asarray(residuals, dtype=float)
    if e.ndim != 1 or len(e) < 2:
        raise InvalidArgumentError("residuals must be a 1-d sequence of length >= 2")
    denom = float(e @ e)
    if denom == 0.0:
        raise DegenerateInputError("all residuals are zero")
    return float(np.sum(np.diff(e) ** 2) / denom)


def hausman_test(
    fe_coeffs: Sequence[float],
    fe_cov: np.ndarray,
    re_coeffs: Sequence[float],
    re_cov: np.ndarray,
) -> TestResult:
    """Hausman specification test comparing fixed- and random-effects slopes.

    H = d'(V_FE - V_RE)^{-1} d over the common regressors (intercept and unit
    effects excluded). When the variance difference is not positive definite
    the Moore-Penrose pseudo-inverse is used and the rank is reported.
    """
    b_fe = np.asarray(fe_coeffs, dtype=float)
    b_re = np.asarray(re_coeffs, dtype=float)
    v_fe = np.asarray(fe_cov, dtype=float)
    v_re = np.asarray(re_cov, dtype=float)
    k = len(b_fe)
    if len(b_re) != k:
        raise InvalidArgumentError("coefficient vectors must have equal length")
    if v_fe.shape != (k, k) or v_re.shape != (k, k):
        raise InvalidArgumentError("covariance matrices must be k x k")
    d = b_fe - b_re
    v = v_fe - v_re
    eigvals = np.linalg.eigvalsh((v + v.T) / 2.0)
    if eigvals.min() > 1e-12 * max(eigvals.max(), 1.0):
        h = float(d @ np.linalg.solve(v, d))
        detail = f"chi2({k})"
    else:
        rank = int(np.linalg.matrix_rank(v))
        h = float(d @ np.linalg.pinv(v) @ d)
        detail = f"chi2({k}); variance difference not positive definite, pseudo-inverse used (rank {rank})"
    p = float(stats.chi2.sf(h, k))
    return TestResult(statistic=h, p_value=p, dof_or_lags=k, detail=detail)


def levene_test(a: Sequence[float], b: Sequence[float]) -> TestResult:
    """Two-group Levene test for equal variances with group-mean centering."""
    xa = np.asarray(a, dtype=float)
    xb = np.asarray(b, dtype=float)
    if len(xa) < 2 or len(xb) < 2:
        raise InvalidArgumentError("each group must have length >= 2")
    za = np.abs(xa - xa.mean())
    zb = np.abs(xb - xb.mean())
    n = len(za) + len(zb)
    dof = n - 2
    if za.mean() == zb.mean():
        return TestResult(0.0, 1.0, dof, detail=f"F(1,{dof}), mean-centered")
    zbar = (za.sum() + zb.sum()) / n
    num = (n - 2) * (len(za) * (za.mean() - zbar) ** 2 + len(zb) * (zb.mean() - zbar) ** 2)
    den = float(np.sum((za - za.mean()) ** 2) + np.sum((zb - zb.mean()) ** 2))
    if den == 0.0:
        raise DegenerateInputError("zero within-group spread in both groups")
    w = num / den
    p = float(stats.f.sf(w, 1, dof))
    return TestResult(float(w), p, dof, detail=f"F(1,{dof}), mean-centered")


def paired_t_test(a: Sequence[float], b: Sequence[float]) -> TestResult:
    """Two-sided paired-samples t test on the mean of a - b."""
    xa = np.asarray(a, dtype=float)
    xb = np.asarray(b, dtype=float)
    if len(xa) != len(xb):
        raise InvalidArgumentError("paired samples must have equal length")
    n = len(xa)
    if n < 2:
        raise InvalidArgumentError("need at least 2 pairs")
    d = xa - xb
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        raise DegenerateInputError("differences have zero variance")
    t = float(d.mean() / (sd / np.sqrt(n)))
    p = float(2.0 * stats.t.sf(abs(t), n - 1))
    return TestResult(t, p, n - 1, detail=f"t({n - 1}), two-sided")


def cohens_kappa(labels_a: Sequence, labels_b: Sequence) -> float:
    """Chance-corrected agreement between two label sequences."""
    if len(labels_a) != len(labels_b):
        raise InvalidArgumentError("label sequences must have equal length")
    n = len(labels_a)
    if n == 0:
        raise InvalidArgumentError("label sequences must be nonempty")
    p_o = sum(1 for x, y in zip(labels_a, labels_b) if x == y) / n
    labels = set(labels_a) | set(labels_b)
    p_e = 0.0
    for lab in labels:
        p_e += (sum(1 for x in labels_a if x == lab) / n) * (
            sum(1 for y in labels_b if y == lab) / n
        )
    if p_e >= 1.0:
        return 1.0
    return (p_o - p_e) / (1.0 - p_e)
