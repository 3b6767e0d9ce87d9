"""Thermostat calibration: fit speed against timer code.

The protocol records codes at a set of bath temperatures in pure water;
the reference curve supplies the true speed at each temperature and a
polynomial c = p(N) is fitted by least squares. Codes are centred and
scaled before fitting since raw values are ~1e6.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Iterable, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import polynomial as P

from .channel import Velocimeter
from .refmodel import DEFAULT_CURVE, ReferenceCurve

DEFAULT_TEMPERATURES = tuple(float(t) for t in np.linspace(4.0, 28.0, 7))
_LOG_EPOCH = datetime(2020, 1, 1)
_ROW_INTERVAL = timedelta(minutes=1)


class CalibrationError(ValueError):
    """Calibration data cannot support the requested fit."""


class ExtrapolationError(ValueError):
    """Code lies too far outside the calibrated domain."""


@dataclass(frozen=True)
class CalibrationPoint:
    temperature: float
    code: float  # mean of integer replicate codes
    replicates: int = 1
    code_std: float = 0.0

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.code_std < 0:
            raise ValueError("code_std must be >= 0")


@dataclass(frozen=True)
class RegressionModel:
    degree: int
    coefficients: tuple[float, ...]  # ascending, in normalized code u = (N - center) / scale
    code_center: float
    code_scale: float
    rmse: float
    domain: tuple[float, float]
    tolerance: float = 0.02

    def raw_polynomial(self) -> Polynomial:
        """The fitted curve as a polynomial in the raw code N."""
        u = Polynomial([-self.code_center / self.code_scale, 1.0 / self.code_scale])
        return Polynomial(self.coefficients)(u)

    def to_csv_row(self) -> dict:
        row = {"degree": self.degree, "code_center": repr(self.code_center),
               "code_scale": repr(self.code_scale)}
        for i, c in enumerate(self.coefficients):
            row[f"c{i}"] = repr(float(c))
        row["rmse"] = repr(self.rmse)
        return row

    def to_csv(self, path) -> None:
        row = self.to_csv_row()
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=list(row), lineterminator="\n")
            w.writeheader()
            w.writerow(row)


def log_timestamp(seed: int, row: int) -> str:
    """Synthetic, reproducible timestamp for calibration log row ``row``."""
    return (_LOG_EPOCH + timedelta(seconds=seed) + row * _ROW_INTERVAL).isoformat()


def simulate_log(
    instrument: Velocimeter,
    temperatures: Sequence[float] = DEFAULT_TEMPERATURES,
    replicates: int = 1,
    seed: int = 0,
    ref: ReferenceCurve = DEFAULT_CURVE,
) -> list[tuple[str, float, int]]:
    """One ``(timestamp, temperature, code)`` row per replicate."""
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    speeds = [ref.speed(T) for T in temperatures]  # validates every level up front
    rng = np.random.default_rng(seed)
    rows = []
    for T, c in zip(temperatures, speeds):
        for _ in range(replicates):
            rows.append((log_timestamp(seed, len(rows)), float(T), instrument.measure(c, rng)))
    return rows


def points_from_log(rows: Iterable[tuple[str, float, int]]) -> list[CalibrationPoint]:
    """Aggregate replicate rows into one point per temperature, in first-seen order."""
    groups: dict[float, list[int]] = {}
    for _, T, n in rows:
        groups.setdefault(float(T), []).append(int(n))
    points = []
    for T, codes in groups.items():
        arr = np.asarray(codes, dtype=float)
        std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
        points.append(CalibrationPoint(T, float(arr.mean()), arr.size, std))
    return points


def run_protocol(
    instrument: Velocimeter,
    temperatures: Sequence[float] = DEFAULT_TEMPERATURES,
    replicates: int = 1,
    seed: int = 0,
    ref: ReferenceCurve = DEFAULT_CURVE,
) -> list[CalibrationPoint]:
    return points_from_log(simulate_log(instrument, temperatures, replicates, seed, ref))


def read_log(path) -> list[tuple[str, float, int]]:
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["timestamp", "temperature_C", "code_N"]:
            raise ValueError(f"{path}:1: expected header 'timestamp,temperature_C,code_N'")
        for lineno, rec in enumerate(reader, start=2):
            try:
                ts, T, n = rec
                rows.append((ts, float(T), int(n)))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: malformed row {rec!r}") from exc
    if not rows:
        raise ValueError(f"{path}: calibration log has no data rows")
    return rows


def write_log(rows, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["timestamp", "temperature_C", "code_N"])
    for ts, T, n in rows:
        w.writerow([ts, repr(float(T)), int(n)])


def fit_speed_vs_code(
    points: Sequence[CalibrationPoint],
    ref: ReferenceCurve = DEFAULT_CURVE,
    degree: int = 3,
) -> RegressionModel:
    """Least-squares polynomial c_ref(T_i) ~ p(N_i)."""
    if degree < 1:
        raise CalibrationError("degree must be >= 1")
    if len(points) < degree + 1:
        raise CalibrationError(
            f"{len(points)} points cannot determine a degree-{degree} fit"
        )
    codes = np.array([p.code for p in points], dtype=float)
    speeds = np.array([ref.speed(p.temperature) for p in points])
    distinct = {}
    for n, c in zip(codes, speeds):
        if n in distinct and distinct[n] != c:
            raise CalibrationError(f"code {n} repeated with conflicting speeds")
        distinct[n] = c
    if len(distinct) < degree + 1:
        raise CalibrationError(
            f"only {len(distinct)} distinct codes for a degree-{degree} fit"
        )
    lo, hi = float(codes.min()), float(codes.max())
    center = float(codes.mean())
    scale = (hi - lo) / 2
    u = (codes - center) / scale
    coef = P.polyfit(u, speeds, degree)
    resid = P.polyval(u, coef) - speeds
    rmse = float(np.sqrt(np.mean(resid**2)))
    return RegressionModel(degree, tuple(float(c) for c in coef), center, scale, rmse, (lo, hi))


def predict(model: RegressionModel, n):
    """Speed (m/s) for code(s) ``n``; refuses codes beyond the tolerance band."""
    n_arr = np.asarray(n, dtype=float)
    lo, hi = model.domain
    if np.any(n_arr < lo * (1 - model.tolerance)) or np.any(n_arr > hi * (1 + model.tolerance)):
        raise ExtrapolationError(
            f"code {n_arr.tolist()} outside calibrated domain [{lo}, {hi}] "
            f"+/- {model.tolerance:.0%}"
        )
    out = P.polyval((n_arr - model.code_center) / model.code_scale, model.coefficients)
    return float(out) if out.ndim == 0 else out


def residuals(
    model: RegressionModel,
    points: Sequence[CalibrationPoint],
    ref: ReferenceCurve = DEFAULT_CURVE,
) -> list[tuple[float, float]]:
    """``(T, p(N) - c_ref(T))`` per point, m/s."""
    return [(p.temperature, predict(model, p.code) - ref.speed(p.temperature)) for p in points]
