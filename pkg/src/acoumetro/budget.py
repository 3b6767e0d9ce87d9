"""Uncertainty budgets and spec-sheet conformance.

Type A here defaults to the sample standard deviation of the observations
(``of_mean=False``): the reference standards quote their single-measurement
RMS deviation as the type A figure. Pass ``of_mean=True`` for the usual
standard uncertainty of the mean, s / sqrt(n).
"""
from __future__ import annotations

import csv
import io
import math
import statistics
from dataclasses import dataclass, fields, replace
from decimal import Decimal
from importlib import resources
from typing import Sequence

DEFAULT_COVERAGE = 2.0

QUANTITIES = ("sound_speed", "temperature", "pressure")
ERROR_FIELDS = (
    "resolution",
    "calibration_error",
    "stability",
    "final_accuracy",
    "declared_error",
    "type_test_error",
)
SPEC_HEADER = (
    "name", "quantity", "range_min", "range_max", "units", *ERROR_FIELDS,
)


class UnitMismatchError(ValueError):
    pass


class MissingFieldError(KeyError):
    pass


def type_a(samples: Sequence[float], of_mean: bool = False) -> float:
    x = [float(v) for v in samples]
    if len(x) < 2:
        raise ValueError(f"type A evaluation needs >= 2 samples, got {len(x)}")
    # exact rational arithmetic: identical readings give exactly zero
    s = statistics.stdev(x)
    return s / math.sqrt(len(x)) if of_mean else s


def combine(u_a: float, u_b: Sequence[float] = ()) -> float:
    """Root-sum-square of the type A and type B standard uncertainties."""
    comps = [u_a, *u_b]
    if any(u < 0 for u in comps):
        raise ValueError(f"negative uncertainty component in {comps}")
    return math.sqrt(math.fsum(u * u for u in comps))


def expand(u_c: float, k: float = DEFAULT_COVERAGE) -> float:
    if u_c < 0:
        raise ValueError("combined uncertainty must be non-negative")
    if k <= 0:
        raise ValueError("coverage factor must be positive")
    return k * u_c


@dataclass(frozen=True)
class UncertaintyBudget:
    u_a: float
    u_b_components: tuple[tuple[str, float], ...]
    u_c: float
    coverage_k: float
    U: float
    n_observations: int

    @classmethod
    def from_samples(cls, samples, u_b_components=(), k=DEFAULT_COVERAGE, of_mean=False):
        u_b = tuple((str(lbl), float(v)) for lbl, v in u_b_components)
        u_a = type_a(samples, of_mean)
        u_c = combine(u_a, [v for _, v in u_b])
        return cls(u_a, u_b, u_c, float(k), expand(u_c, k), len(samples))


@dataclass(frozen=True)
class ReferenceStandard:
    """Published characteristics of a sound-speed reference standard, m/s."""

    name: str
    rms_deviation: float
    n_measurements: int
    systematic_error: float
    confidence: float
    u_a: float | None = None
    u_b: float | None = None
    u_c: float | None = None
    coverage_k: float | None = None
    U: float | None = None


PRIMARY_STANDARD = ReferenceStandard(
    "state primary standard", 0.005, 15, 0.04, 0.99,
    u_a=0.005, u_b=0.02, u_c=0.02, coverage_k=2.0, U=0.04,
)
SECONDARY_STANDARD = ReferenceStandard("secondary standard", 0.05, 15, 0.08, 0.99)


@dataclass(frozen=True)
class ChannelSpec:
    name: str
    quantity: str
    range_min: float | None = None
    range_max: float | None = None
    units: str = ""
    resolution: float | None = None
    calibration_error: float | None = None
    stability: float | None = None
    final_accuracy: float | None = None
    declared_error: float | None = None
    type_test_error: float | None = None

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise ValueError(f"{self.name}: unknown quantity {self.quantity!r}")
        if (self.range_min is None) != (self.range_max is None):
            raise ValueError(f"{self.name}: range needs both bounds or neither")
        if self.range_min is not None and not self.range_min < self.range_max:
            raise ValueError(f"{self.name}: degenerate range [{self.range_min}, {self.range_max}]")
        for f in ERROR_FIELDS:
            v = getattr(self, f)
            if v is not None and v < 0:
                raise ValueError(f"{self.name}: {f} must be >= 0")

    def limit(self, field: str) -> float:
        if field not in ERROR_FIELDS:
            raise MissingFieldError(f"{field!r} is not a spec limit field")
        v = getattr(self, field)
        if v is None:
            raise MissingFieldError(f"{self.name} has no {field}")
        return v


def fmt_number(x: float | None) -> str:
    """Shortest round-tripping text for ``x``; integers lose the trailing '.0'."""
    if x is None:
        return ""
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def _parse_optional(text: str) -> float | None:
    text = text.strip()
    return float(text) if text else None


def read_specs(src) -> list[ChannelSpec]:
    """Parse a spec database from a path or an open text stream."""
    if hasattr(src, "read"):
        return _read_specs(src, getattr(src, "name", "<stream>"))
    with open(src, newline="", encoding="utf-8") as fh:
        return _read_specs(fh, str(src))


def _read_specs(fh, label) -> list[ChannelSpec]:
    reader = csv.reader(fh)
    header = next(reader, None)
    if header is None or tuple(header) != SPEC_HEADER:
        raise ValueError(f"{label}:1: expected header {','.join(SPEC_HEADER)}")
    specs = []
    for lineno, rec in enumerate(reader, start=2):
        if len(rec) != len(SPEC_HEADER):
            raise ValueError(f"{label}:{lineno}: expected {len(SPEC_HEADER)} fields, got {len(rec)}")
        try:
            name, quantity, rmin, rmax, units, *errs = rec
            specs.append(ChannelSpec(
                name, quantity, _parse_optional(rmin), _parse_optional(rmax), units,
                *(_parse_optional(e) for e in errs),
            ))
        except ValueError as exc:
            raise ValueError(f"{label}:{lineno}: {exc}") from exc
    return specs


def write_specs(specs: Sequence[ChannelSpec], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(SPEC_HEADER)
    for s in specs:
        row = []
        for f in fields(ChannelSpec):
            v = getattr(s, f.name)
            row.append(v if isinstance(v, str) else fmt_number(v))
        w.writerow(row)


def specs_to_text(specs: Sequence[ChannelSpec]) -> str:
    buf = io.StringIO()
    write_specs(specs, buf)
    return buf.getvalue()


BUNDLED_TABLES = {
    "table1": "table1_svp_channels.csv",
    "table2": "table2_isz1.csv",
    "table3": "table3_sound_speed_meters.csv",
}


def bundled_path(name: str):
    """Path to a bundled data file (spec tables, example inputs)."""
    return resources.files("acoumetro") / "data" / BUNDLED_TABLES.get(name, name)


def load_table(name: str) -> list[ChannelSpec]:
    with bundled_path(name).open(encoding="utf-8", newline="") as fh:
        return read_specs(fh)


@dataclass(frozen=True)
class Verdict:
    name: str
    check: str
    passed: bool
    value: float | None = None
    limit: float | None = None
    margin: float | None = None
    units: str = ""
    skipped: bool = False

    @property
    def status(self) -> str:
        if self.skipped:
            return "skip"
        return "pass" if self.passed else "fail"


def check_conformance(
    measured_error: float,
    units: str,
    spec: ChannelSpec,
    field: str = "declared_error",
) -> Verdict:
    """Pass iff |measured_error| <= the spec limit (boundary inclusive)."""
    if units != spec.units:
        raise UnitMismatchError(f"measured error in {units!r}, {spec.name} limits in {spec.units!r}")
    limit = spec.limit(field)
    margin = limit - abs(measured_error)
    return Verdict(spec.name, field, abs(measured_error) <= limit, measured_error, limit, margin, units)


def type_test_conformance(spec: ChannelSpec) -> Verdict:
    """Type-test error against the declared error; skipped when either is absent."""
    check = "type_test<=declared"
    if spec.type_test_error is None or spec.declared_error is None:
        return Verdict(spec.name, check, True, spec.type_test_error,
                       spec.declared_error, None, spec.units, skipped=True)
    v = check_conformance(spec.type_test_error, spec.units, spec, "declared_error")
    return replace(v, check=check)


def table1_consistency(spec: ChannelSpec) -> Verdict:
    """Final accuracy equals calibration error plus stability, in exact decimal arithmetic."""
    cal = spec.limit("calibration_error")
    stab = spec.limit("stability")
    final = spec.limit("final_accuracy")
    total = Decimal(repr(cal)) + Decimal(repr(stab))
    ok = total == Decimal(repr(final))
    return Verdict(spec.name, "final=calibration+stability", ok, float(total), final,
                   float(Decimal(repr(final)) - total), spec.units)
