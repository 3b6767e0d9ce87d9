"""Speed of sound in pure water at atmospheric pressure.

The default curve is the fifth-degree Del Grosso & Mader (1972) polynomial
in temperature (degC). Alternative curves can be loaded from a
``degree,coefficient`` CSV file.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

# Del Grosso & Mader (1972), pure water, 1 atm; c in m/s, T in degC.
DEL_GROSSO_MADER_1972 = (
    1402.388,
    5.03830,
    -5.81090e-2,
    3.3432e-4,
    -1.47797e-6,
    3.1419e-9,
)


class TemperatureRangeError(ValueError):
    """Temperature outside the valid range of a reference curve."""


@dataclass(frozen=True)
class ReferenceCurve:
    """Polynomial c(T) with ascending coefficients and a hard validity window."""

    coefficients: tuple[float, ...] = DEL_GROSSO_MADER_1972
    valid_range: tuple[float, float] = (0.0, 40.0)

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        lo, hi = self.valid_range
        if not lo < hi:
            raise ValueError(f"degenerate valid range {self.valid_range}")
        if not self.coefficients:
            raise ValueError("reference curve needs at least one coefficient")

    def _check(self, T):
        T = np.asarray(T, dtype=float)
        lo, hi = self.valid_range
        if np.any((T < lo) | (T > hi)) or np.any(~np.isfinite(T)):
            raise TemperatureRangeError(
                f"temperature {T.tolist()} degC outside valid range [{lo}, {hi}] degC"
            )
        return T

    def speed(self, T):
        T = self._check(T)
        out = np.polynomial.polynomial.polyval(T, self.coefficients)
        return float(out) if out.ndim == 0 else out

    def slope(self, T):
        T = self._check(T)
        deriv = np.polynomial.polynomial.polyder(self.coefficients)
        out = np.polynomial.polynomial.polyval(T, deriv)
        return float(out) if out.ndim == 0 else out

    @classmethod
    def from_csv(cls, path, valid_range=(0.0, 40.0)) -> "ReferenceCurve":
        """Load a curve from a ``degree,coefficient`` CSV file."""
        terms = {}
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != ["degree", "coefficient"]:
                raise ValueError(f"{path}: expected header 'degree,coefficient'")
            for lineno, row in enumerate(reader, start=2):
                try:
                    deg = int(row["degree"])
                    coef = float(row["coefficient"])
                except (TypeError, ValueError) as exc:
                    raise ValueError(f"{path}:{lineno}: malformed row {row}") from exc
                if deg < 0 or deg in terms:
                    raise ValueError(f"{path}:{lineno}: bad or repeated degree {deg}")
                terms[deg] = coef
        if not terms:
            raise ValueError(f"{path}: no coefficients")
        coefs = [terms.get(d, 0.0) for d in range(max(terms) + 1)]
        return cls(tuple(coefs), tuple(valid_range))

    def to_csv(self, path) -> None:
        with open(Path(path), "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["degree", "coefficient"])
            for d, c in enumerate(self.coefficients):
                w.writerow([d, repr(c)])


DEFAULT_CURVE = ReferenceCurve()


def pure_water_speed(T, curve: ReferenceCurve = DEFAULT_CURVE):
    """Speed of sound (m/s) in pure water at temperature ``T`` (degC)."""
    return curve.speed(T)


def pure_water_speed_slope(T, curve: ReferenceCurve = DEFAULT_CURVE):
    """dc/dT in (m/s)/degC, analytic derivative of the reference polynomial."""
    return curve.slope(T)
