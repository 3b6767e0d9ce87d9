"""Suspended-solids calibration curves from a small set of reference samples.

Concentration is fitted as a function of the instrument reading, either as a
piecewise-linear lookup table or a least-squares polynomial of degree 1-4.
Disabled samples are kept in the set but take no part in fitting.
"""
from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P

MAX_SAMPLES = 16
MAX_DEGREE = 4
DOMAIN_EXTENSION = 0.05


class DomainError(ValueError):
    pass


class ClampWarning(UserWarning):
    """Lookup reading outside the node range was clamped to the end node."""


@dataclass(frozen=True)
class Sample:
    reading: float
    concentration: float
    enabled: bool = True

    def __post_init__(self):
        if self.concentration < 0:
            raise ValueError("concentration must be non-negative")


@dataclass(frozen=True)
class SampleSet:
    samples: tuple[Sample, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        if len(self.samples) > MAX_SAMPLES:
            raise ValueError(f"at most {MAX_SAMPLES} samples, got {len(self.samples)}")

    def __len__(self):
        return len(self.samples)

    def add(self, reading: float, concentration: float, enabled: bool = True) -> "SampleSet":
        return SampleSet(self.samples + (Sample(reading, concentration, enabled),))

    def edit(self, index: int, **changes) -> "SampleSet":
        s = list(self.samples)
        s[index] = replace(s[index], **changes)
        return SampleSet(tuple(s))

    def disable(self, index: int) -> "SampleSet":
        return self.edit(index, enabled=False)

    def enable(self, index: int) -> "SampleSet":
        return self.edit(index, enabled=True)

    @property
    def enabled(self) -> tuple[Sample, ...]:
        return tuple(s for s in self.samples if s.enabled)


@dataclass(frozen=True)
class CalCurve:
    mode: str
    domain: tuple[float, float]
    degree: int | None = None
    coefficients: tuple[float, ...] = ()  # ascending, polynomial mode
    nodes: tuple[tuple[float, float], ...] = ()  # (reading, ppm), lookup mode


def dilution_series(full_scale_ppm: float, fractions: Sequence[float]) -> list[float]:
    for f in fractions:
        if not 0 <= f <= 1:
            raise ValueError(f"dilution fraction {f} not in [0, 1]")
    return [full_scale_ppm * f for f in fractions]


def mass_to_ppm(grams: float, litres: float) -> float:
    """Mass concentration in mg/L, i.e. ppm for dilute aqueous suspensions."""
    if litres <= 0:
        raise ValueError("volume must be positive")
    return grams * 1000.0 / litres


def fit_curve(samples: SampleSet, mode: str = "polynomial", degree: int = 1) -> CalCurve:
    active = samples.enabled
    readings = [s.reading for s in active]
    if len(set(readings)) != len(readings):
        raise ValueError("duplicate readings among enabled samples")
    if mode == "lookup":
        if len(active) < 2:
            raise ValueError("lookup table needs at least 2 enabled samples")
        nodes = tuple(sorted((s.reading, s.concentration) for s in active))
        return CalCurve("lookup", (nodes[0][0], nodes[-1][0]), nodes=nodes)
    if mode != "polynomial":
        raise ValueError(f"unknown curve mode {mode!r}")
    if not 1 <= degree <= MAX_DEGREE:
        raise ValueError(f"polynomial degree {degree} not in [1, {MAX_DEGREE}]")
    if len(active) < degree + 1:
        raise ValueError(
            f"{len(active)} enabled samples cannot determine a degree-{degree} curve"
        )
    x = np.array(readings, dtype=float)
    y = np.array([s.concentration for s in active], dtype=float)
    coef = P.polyfit(x, y, degree)
    return CalCurve("polynomial", (float(x.min()), float(x.max())), degree,
                    tuple(float(c) for c in coef))


def concentration(curve: CalCurve, reading: float) -> float:
    """Concentration (ppm) for ``reading``.

    Readings up to 5 % of the span beyond the domain are extrapolated
    (polynomial) or clamped with a :class:`ClampWarning` (lookup); further
    out raises :class:`DomainError`.
    """
    lo, hi = curve.domain
    slack = DOMAIN_EXTENSION * (hi - lo)
    if reading < lo - slack or reading > hi + slack:
        raise DomainError(f"reading {reading} outside calibrated range [{lo}, {hi}]")
    if curve.mode == "lookup":
        if reading < lo or reading > hi:
            warnings.warn(f"reading {reading} clamped to [{lo}, {hi}]", ClampWarning, stacklevel=2)
        xs, ys = zip(*curve.nodes)
        return float(np.interp(reading, xs, ys))
    return float(P.polyval(reading, curve.coefficients))


@dataclass(frozen=True)
class LimitCheck:
    limit_name: str
    measured: float
    limit: float
    passed: bool


def check_device_spec(
    measured_rel_error: float,
    reduced_error: float = 4.0,
    sensitivity: float = 2.0,
) -> dict[str, LimitCheck]:
    """Compare a relative error (%) against each device limit (%), boundary inclusive."""
    out = {}
    for name, limit in (("reduced_error", reduced_error), ("sensitivity", sensitivity)):
        if limit <= 0:
            raise ValueError(f"{name} limit must be positive")
        out[name] = LimitCheck(name, measured_rel_error, limit, abs(measured_rel_error) <= limit)
    return out


def read_samples(path) -> SampleSet:
    samples = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        if next(reader, None) != ["reading", "concentration_ppm", "enabled"]:
            raise ValueError(f"{path}:1: expected header 'reading,concentration_ppm,enabled'")
        for lineno, rec in enumerate(reader, start=2):
            try:
                r, c, e = rec
                if e not in ("0", "1"):
                    raise ValueError(f"enabled flag {e!r} not 0 or 1")
                samples.append(Sample(float(r), float(c), e == "1"))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
    return SampleSet(tuple(samples))
