"""Attenuation from echo amplitudes and the a1 * f**b frequency law (f in MHz)."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .channel import ChannelGeometry, WaveformRecord

NP_TO_DB = 8.686


@dataclass(frozen=True)
class AttenuationModel:
    a1: float  # dB/m at 1 MHz
    b: float

    def __post_init__(self):
        if self.a1 < 0:
            raise ValueError("a1 must be non-negative")


def np_to_db(alpha_np):
    return NP_TO_DB * alpha_np


def db_to_np(alpha_db):
    return alpha_db / NP_TO_DB


def estimate_alpha(a0: float, a: float, r: float, path: float) -> float:
    """Amplitude attenuation coefficient (Np/m) over a round-trip ``path`` (m).

    ``a0`` is the amplitude launched, ``a`` the amplitude received after one
    reflection of coefficient ``r``.
    """
    if not 0 < r <= 1:
        raise ValueError(f"reflection coefficient {r} not in (0, 1]")
    if path <= 0:
        raise ValueError("path length must be positive")
    if a <= 0:
        raise ValueError("zero received amplitude: attenuation is infinite")
    ratio = a / (a0 * r)
    if ratio > 1:
        raise ValueError(
            f"received amplitude {a} exceeds a0*R = {a0 * r}: negative attenuation"
        )
    return -math.log(ratio) / path


def segment_amplitude(w: WaveformRecord, seg: tuple[int, int]) -> float:
    """Peak amplitude of the pulse in ``seg``, from its energy relative to a unit pulse.

    Energy of a well-sampled pulse does not depend on where it falls on the
    sample grid, so this is exact for noiseless records with a whole pulse
    inside the gate.
    """
    a, b = seg
    energy = float(np.dot(w.samples[a:b], w.samples[a:b]))
    half = int(math.ceil(2 * w.pulse.width * w.sample_rate))
    unit = w.pulse(np.arange(-half, half + 1) / w.sample_rate)
    return math.sqrt(energy / float(np.dot(unit, unit)))


def alpha_from_echoes(
    w: WaveformRecord,
    geom: ChannelGeometry,
    seg1: tuple[int, int],
    seg2: tuple[int, int],
) -> float:
    """Attenuation (Np/m) from the two reflector echoes of a dual-reflector record.

    The first echo fixes the amplitude reaching the translucent reflector;
    the second has travelled the extra 2 * base and one full reflection.
    """
    a1 = segment_amplitude(w, seg1)
    a2 = segment_amplitude(w, seg2)
    launched = a1 * (1 - geom.r_partial) / geom.r_partial
    return estimate_alpha(launched, a2, geom.r_full, 2 * geom.base)


def fit_power_law(points: Sequence[tuple[float, float]]) -> AttenuationModel:
    """Least squares of ln(alpha) on ln(f); exact on noiseless power-law data."""
    f = np.array([p[0] for p in points], dtype=float)
    alpha = np.array([p[1] for p in points], dtype=float)
    if np.any(f <= 0):
        raise ValueError("frequencies must be positive")
    if np.any(alpha <= 0):
        raise ValueError("attenuation values must be positive for a log-log fit")
    if len(np.unique(f)) < 2:
        raise ValueError("need at least 2 distinct frequencies")
    b, ln_a1 = np.polyfit(np.log(f), np.log(alpha), 1)
    return AttenuationModel(float(math.exp(ln_a1)), float(b))


def eval_power_law(model: AttenuationModel, f):
    f = np.asarray(f, dtype=float)
    if np.any(f <= 0):
        raise ValueError("frequency must be positive")
    out = model.a1 * f**model.b
    return float(out) if out.ndim == 0 else out


def read_attenuation_csv(path) -> list[tuple[float, float]]:
    pts = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        if next(reader, None) != ["freq_MHz", "alpha_dB_per_m"]:
            raise ValueError(f"{path}:1: expected header 'freq_MHz,alpha_dB_per_m'")
        for lineno, rec in enumerate(reader, start=2):
            try:
                f, a = rec
                pts.append((float(f), float(a)))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: malformed row {rec!r}") from exc
    return pts
