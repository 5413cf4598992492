"""ARX models linking an exogenous input series to an observed count series.

The model is

    tau_k = sum_{i=1..n_a} a_i tau_{k-i} + sum_{i=0..n_b-1} b_i rho_{k-delay-i} + d + v_k

with ``v_k`` white noise.  Coefficients are fitted by ordinary least squares.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np

# n_a = 0 with two input lags, delay as reported for the influenza tweets
PRESETS = {"paper": {"n_a": 0, "n_b": 2, "delay": 18}}


class ArxError(ValueError):
    """Bad orders, short series or a rank-deficient regression."""


@dataclass
class ArxModel:
    """Fitted ARX model.

    Attributes:
        n_a: autoregressive order.
        n_b: number of input lags.
        delay: input delay.
        a: ``a_1..a_{n_a}``.
        b: ``b_0..b_{n_b-1}``.
        d: intercept.
        residual_variance: in-sample residual variance (dof-corrected).
        rmse: in-sample root mean square residual.
        fitted: in-sample one-step fitted values for ``k >= start``.
        start: first index with a full set of lags.
    """

    n_a: int
    n_b: int
    delay: int
    a: np.ndarray
    b: np.ndarray
    d: float
    residual_variance: float = 0.0
    rmse: float = 0.0
    fitted: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)
    start: int = 0

    @property
    def theta(self) -> np.ndarray:
        return np.concatenate([self.a, self.b, [self.d]])

    def to_dict(self) -> dict:
        return {
            "n_a": self.n_a,
            "n_b": self.n_b,
            "delay": self.delay,
            "a": [float(v) for v in self.a],
            "b": [float(v) for v in self.b],
            "d": float(self.d),
            "residual_variance": float(self.residual_variance),
            "rmse": float(self.rmse),
        }


def first_index(n_a: int, n_b: int, delay: int) -> int:
    """First k for which every lag in the model exists."""
    return max(n_a, delay + n_b - 1 if n_b > 0 else 0)


def column_names(n_a: int, n_b: int, delay: int) -> list:
    return [f"tau[k-{i}]" for i in range(1, n_a + 1)] + [f"rho[k-{delay + i}]" for i in range(n_b)] + ["d"]


def _check_orders(n_a: int, n_b: int, delay: int) -> None:
    if min(n_a, n_b, delay) < 0:
        raise ArxError("orders and delay must be nonnegative")


def regressors(tau, rho, n_a: int, n_b: int, delay: int, rows) -> np.ndarray:
    """Regressor matrix with one row per index in ``rows``."""
    tau = np.asarray(tau, dtype=float)
    rho = np.asarray(rho, dtype=float)
    rows = np.asarray(rows, dtype=int)
    cols = [tau[rows - i] for i in range(1, n_a + 1)]
    cols += [rho[rows - delay - i] for i in range(n_b)]
    cols.append(np.ones(rows.size))
    return np.stack(cols, axis=1)


def _collinear_columns(X: np.ndarray, names: list) -> list:
    scale = np.linalg.norm(X, axis=0)
    scale[scale == 0] = 1.0
    _, s, vt = np.linalg.svd(X / scale, full_matrices=False)
    null = vt[-1]
    return [names[j] for j in np.flatnonzero(np.abs(null) > 1e-6)]


def arx_fit(tau, rho, n_a: int, n_b: int, delay: int) -> ArxModel:
    """Least-squares fit of the ARX model.

    Args:
        tau: output series.
        rho: input series of the same length.
        n_a: autoregressive order.
        n_b: number of input lags.
        delay: input delay.

    Raises:
        ArxError: invalid orders, series too short, or collinear regressors
            (the message names the columns involved).
    """
    _check_orders(n_a, n_b, delay)
    tau = np.asarray(tau, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if tau.ndim != 1 or tau.shape != rho.shape:
        raise ArxError("tau and rho must be 1-D series of equal length")
    if np.any(~np.isfinite(tau)) or np.any(~np.isfinite(rho)):
        raise ArxError("series contain NaN or infinite values")
    need = max(n_a, n_b + delay) + 10
    if tau.size <= need:
        raise ArxError(f"series of length {tau.size} too short; need more than {need}")
    start = first_index(n_a, n_b, delay)
    X = regressors(tau, rho, n_a, n_b, delay, np.arange(start, tau.size))
    y = tau[start:]
    names = column_names(n_a, n_b, delay)
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise ArxError("collinear regressor columns: " + ", ".join(_collinear_columns(X, names)))
    theta, *_ = np.linalg.lstsq(X, y, rcond=None)
    fitted = X @ theta
    resid = y - fitted
    dof = max(y.size - theta.size, 1)
    return ArxModel(
        n_a,
        n_b,
        delay,
        theta[:n_a].copy(),
        theta[n_a : n_a + n_b].copy(),
        float(theta[-1]),
        residual_variance=float(resid @ resid / dof),
        rmse=float(np.sqrt(np.mean(resid**2))),
        fitted=fitted,
        start=start,
    )


def arx_predict(model: ArxModel, tau, rho, start: Optional[int] = None, horizon: Optional[int] = None, free_run: bool = False) -> np.ndarray:
    """Predict ``tau_k`` for ``k = start .. start + horizon - 1``.

    One-step prediction uses the observed lagged outputs; free-run feeds its
    own predictions back as lagged outputs once ``k >= start``.

    Args:
        model: fitted model.
        tau: observed outputs; needs entries before ``start`` (free-run) or
            up to ``k - 1`` for every predicted k (one-step).
        rho: inputs covering every index used.
        start: first predicted index (default: the model's first usable index).
        horizon: number of predictions (default: up to the end of ``rho``).

    Raises:
        ArxError: histories too short for the request.
    """
    tau = np.asarray(tau, dtype=float)
    rho = np.asarray(rho, dtype=float)
    k0 = first_index(model.n_a, model.n_b, model.delay)
    start = k0 if start is None else int(start)
    if start < k0:
        raise ArxError(f"start must be at least {k0} for these orders")
    horizon = rho.size - start if horizon is None else int(horizon)
    if horizon < 0 or start + horizon > rho.size:
        raise ArxError("rho does not cover the requested horizon")
    needed = start if free_run else start + horizon - 1
    if model.n_a and tau.size < needed:
        raise ArxError("tau history too short for the requested prediction")
    theta = model.theta
    if not free_run:
        X = regressors(np.r_[tau, np.zeros(max(0, start + horizon - tau.size))], rho, model.n_a, model.n_b, model.delay, np.arange(start, start + horizon))
        return X @ theta
    series = np.zeros(start + horizon)
    series[:start] = tau[:start]
    for k in range(start, start + horizon):
        x = regressors(series, rho, model.n_a, model.n_b, model.delay, [k])[0]
        series[k] = x @ theta
    return series[start:]


@dataclass
class DelayScan:
    """Validation RMSE for every candidate delay.

    Attributes:
        best_delay: delay with the smallest validation RMSE (smallest on ties).
        rmse: ``rmse[delay]`` for ``delay = 0..max_delay``.
        split: first validation index.
    """

    best_delay: int
    rmse: np.ndarray
    split: int


def delay_scan(tau, rho, n_a: int, n_b: int, max_delay: int, train_fraction: float = 0.75, train_length: Optional[int] = None) -> DelayScan:
    """Grid search for the input delay on a holdout split.

    Each delay is fitted on the prefix ``[0, split)`` and scored by one-step
    RMSE on ``[split, K)``.  The default split keeps the last 25% for
    validation; ``train_length`` fixes the prefix length instead.
    """
    tau = np.asarray(tau, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if max_delay < 0:
        raise ArxError("max_delay must be nonnegative")
    split = int(train_length) if train_length is not None else int(round(train_fraction * tau.size))
    if not 0 < split < tau.size:
        raise ArxError("the split leaves no training or validation data")
    scores = np.empty(max_delay + 1)
    for delay in range(max_delay + 1):
        model = arx_fit(tau[:split], rho[:split], n_a, n_b, delay)
        if split < first_index(n_a, n_b, delay):
            raise ArxError(f"validation window too short for delay {delay}")
        pred = arx_predict(model, tau, rho, start=split)
        scores[delay] = np.sqrt(np.mean((tau[split:] - pred) ** 2))
    return DelayScan(int(np.argmin(scores)), scores, split)


def simulate_arx(model: ArxModel, rho, tau0=None, noise_std: float = 0.0, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Generate an output series from ``model`` driven by ``rho``.

    Entries before the first usable index are ``tau0`` (zeros by default).
    """
    rho = np.asarray(rho, dtype=float)
    k0 = first_index(model.n_a, model.n_b, model.delay)
    tau = np.zeros(rho.size)
    if tau0 is not None:
        tau[:k0] = np.asarray(tau0, dtype=float)[:k0]
    theta = model.theta
    noise = np.zeros(rho.size) if noise_std == 0 else rng.normal(0.0, noise_std, size=rho.size)
    for k in range(k0, rho.size):
        tau[k] = regressors(tau, rho, model.n_a, model.n_b, model.delay, [k])[0] @ theta + noise[k]
    return tau


def read_series(path: Union[str, Path]) -> tuple[np.ndarray, np.ndarray]:
    """Read a ``k,tau,rho`` CSV (header required, k = 0, 1, 2, ...).

    Raises:
        ArxError: malformed file, with line numbers.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ArxError(f"{path}: empty file")
        if [h.strip() for h in header] != ["k", "tau", "rho"]:
            raise ArxError(f"{path}: line 1: expected header k,tau,rho")
        tau, rho = [], []
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise ArxError(f"{path}: line {line}: expected 3 columns, got {len(row)}")
            for col, text in enumerate(row, 1):
                try:
                    float(text)
                except ValueError:
                    raise ArxError(f"{path}: line {line} column {col}: not a number: {text!r}") from None
            if int(float(row[0])) != len(tau):
                raise ArxError(f"{path}: line {line}: expected k={len(tau)}")
            tau.append(float(row[1]))
            rho.append(float(row[2]))
    if not tau:
        raise ArxError(f"{path}: no data rows")
    return np.array(tau), np.array(rho)


def write_series(path: Union[str, Path], tau, rho) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "tau", "rho"])
        for k, (t, r) in enumerate(zip(tau, rho)):
            w.writerow([k, repr(float(t)), repr(float(r))])
