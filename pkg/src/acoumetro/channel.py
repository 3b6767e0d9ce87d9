"""Virtual dual-reflector pulse time-of-flight channel.

A pulse leaves the transducer at t = 0, is partly returned by a translucent
reflector at ``l1`` and the transmitted part is returned by a full reflector
at ``l2``. Speed is taken from the echo-pair delay,

    c = 2 (l2 - l1) / dt,

so the electronic delay and the shared path cancel.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)

# counts within this distance of an integer are taken as whole ticks, so
# float noise in dt / t_res cannot drop a code by one
_TICK_SLACK = 1e-6


class DegenerateCorrelationError(ValueError):
    """A correlation segment has zero variance."""


@dataclass(frozen=True)
class ChannelGeometry:
    """Measuring base and timing parameters. Lengths in m, times in s."""

    l1: float = 0.010
    l2: float = 0.035
    r_full: float = 0.93
    r_partial: float = 0.5
    carrier_freq: float = 2.4e6
    timer_resolution: float = 1e-11
    electronic_delay: float = 0.0

    def __post_init__(self):
        if not 0 < self.l1 < self.l2:
            raise ValueError(f"need 0 < l1 < l2, got l1={self.l1}, l2={self.l2}")
        if not 0 < self.r_full <= 1:
            raise ValueError(f"full reflection coefficient {self.r_full} not in (0, 1]")
        if not 0 < self.r_partial < 1:
            raise ValueError(f"partial reflection coefficient {self.r_partial} not in (0, 1)")
        if self.timer_resolution <= 0:
            raise ValueError("timer resolution must be positive")
        if self.electronic_delay < 0:
            raise ValueError("electronic delay must be non-negative")
        if self.carrier_freq <= 0:
            raise ValueError("carrier frequency must be positive")

    @property
    def base(self) -> float:
        return self.l2 - self.l1


@dataclass(frozen=True)
class Pulse:
    """Gaussian-windowed carrier; ``width`` is the full duration (6 sigma)."""

    carrier_freq: float = 2.4e6
    width: float = 0.8e-6

    def __post_init__(self):
        if self.carrier_freq <= 0:
            raise ValueError("carrier frequency must be positive")
        if not 0 < self.width <= 1e-6:
            raise ValueError(f"pulse width {self.width} s not in (0, 1 us]")

    @property
    def sigma(self) -> float:
        return self.width / 6.0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(-0.5 * (t / self.sigma) ** 2) * np.cos(2 * np.pi * self.carrier_freq * t)


@dataclass(frozen=True)
class WaveformRecord:
    sample_rate: float
    samples: np.ndarray = field(repr=False)
    pulse: Pulse = Pulse()
    seed: int = 0

    def __post_init__(self):
        if self.sample_rate < 4 * self.pulse.carrier_freq:
            raise ValueError(
                f"sample rate {self.sample_rate} Hz below 4 x carrier "
                f"({4 * self.pulse.carrier_freq} Hz)"
            )

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.samples)) / self.sample_rate

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(
                f"# sample_rate={self.sample_rate!r} f0={self.pulse.carrier_freq!r} seed={self.seed}\n"
            )
            fh.write("index,amplitude\n")
            for i, a in enumerate(self.samples):
                fh.write(f"{i},{float(a)!r}\n")

    @classmethod
    def from_csv(cls, path, width: float = Pulse.width) -> "WaveformRecord":
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
        if not lines or not lines[0].startswith("#"):
            raise ValueError(f"{path}: missing '# sample_rate=... f0=... seed=...' line")
        meta = dict(kv.split("=", 1) for kv in lines[0][1:].split())
        if lines[1:2] != ["index,amplitude"]:
            raise ValueError(f"{path}:2: expected header 'index,amplitude'")
        samples = []
        for lineno, line in enumerate(lines[2:], start=3):
            idx, amp = line.split(",")
            if int(idx) != len(samples):
                raise ValueError(f"{path}:{lineno}: index {idx} out of sequence")
            samples.append(float(amp))
        return cls(
            sample_rate=float(meta["sample_rate"]),
            samples=np.array(samples),
            pulse=Pulse(float(meta["f0"]), width),
            seed=int(meta["seed"]),
        )


def wavelength(c: float, f: float) -> float:
    """Acoustic wavelength 2*pi/k = c/f, in m."""
    return c / f


def wavenumber(c: float, f: float) -> float:
    return 2 * np.pi * f / c


def echo_delays(geom: ChannelGeometry, c: float) -> tuple[float, float]:
    """Round-trip arrival times of the two reflector echoes."""
    return (2 * geom.l1 / c + geom.electronic_delay, 2 * geom.l2 / c + geom.electronic_delay)


def echo_amplitudes(geom: ChannelGeometry, alpha_np: float = 0.0) -> tuple[float, float]:
    a1 = geom.r_partial * math.exp(-2 * alpha_np * geom.l1)
    a2 = (1 - geom.r_partial) * geom.r_full * math.exp(-2 * alpha_np * geom.l2)
    return a1, a2


def synthesize_echoes(
    geom: ChannelGeometry,
    c: float,
    alpha_np: float = 0.0,
    pulse: Pulse | None = None,
    noise_std: float = 0.0,
    seed: int = 0,
    sample_rate: float | None = None,
) -> WaveformRecord:
    """Sampled two-echo record for a medium of speed ``c`` and attenuation ``alpha_np``.

    The record starts at transmission (t = 0) and ends a few pulse widths
    after the second echo. White Gaussian noise of ``noise_std`` is added
    from a generator seeded with ``seed``.
    """
    if not 1000 <= c <= 2000:
        raise ValueError(f"sound speed {c} m/s outside [1000, 2000] m/s")
    if alpha_np < 0:
        raise ValueError("attenuation must be non-negative")
    if pulse is None:
        pulse = Pulse(carrier_freq=geom.carrier_freq)
    if sample_rate is None:
        sample_rate = 10 * pulse.carrier_freq
    if sample_rate < 4 * pulse.carrier_freq:
        raise ValueError(
            f"sample rate {sample_rate} Hz below 4 x carrier ({4 * pulse.carrier_freq} Hz)"
        )
    t1, t2 = echo_delays(geom, c)
    a1, a2 = echo_amplitudes(geom, alpha_np)
    n = int(math.ceil((t2 + 3 * pulse.width) * sample_rate))
    idx = np.arange(n)
    # work in samples relative to each echo centre to keep the grid exact
    x = a1 * pulse((idx - t1 * sample_rate) / sample_rate)
    x += a2 * pulse((idx - t2 * sample_rate) / sample_rate)
    if noise_std > 0:
        x += np.random.default_rng(seed).normal(0.0, noise_std, n)
    return WaveformRecord(sample_rate, x, pulse, seed)


def envelope(w: WaveformRecord) -> np.ndarray:
    from scipy.signal import hilbert  # slow import, only needed for detection

    return np.abs(hilbert(w.samples))


def detect_tof_threshold(w: WaveformRecord, threshold: float = 0.5) -> list[float]:
    """First-crossing arrival times (s) of the envelope above ``threshold`` * max.

    One time per contiguous above-threshold run, ascending. An empty list
    is returned (and logged) when nothing crosses.
    """
    if not 0 < threshold < 1:
        raise ValueError(f"threshold {threshold} not in (0, 1)")
    env = envelope(w)
    peak = env.max() if env.size else 0.0
    if peak <= 0:
        log.warning("no echo crossing found: record is flat")
        return []
    level = threshold * peak
    above = env >= level
    rising = np.flatnonzero(above[1:] & ~above[:-1]) + 1
    times = []
    for i in rising:
        frac = (level - env[i - 1]) / (env[i] - env[i - 1])
        times.append((i - 1 + frac) / w.sample_rate)
    if above[0]:
        times.insert(0, 0.0)
    if not times:
        log.warning("no echo crossing found above %.3g", level)
    return times


def gate_echoes(w: WaveformRecord, threshold: float = 0.5) -> list[tuple[int, int]]:
    """Index windows around each threshold-detected echo, sized to hold the whole pulse."""
    width = w.pulse.width
    gates = []
    for t in detect_tof_threshold(w, threshold):
        start = max(0, int(math.floor((t - width) * w.sample_rate)))
        stop = min(len(w.samples), int(math.ceil((t + 2 * width) * w.sample_rate)) + 1)
        gates.append((start, stop))
    return gates


def _parabolic_offset(ym1: float, y0: float, yp1: float) -> float:
    denom = ym1 - 2 * y0 + yp1
    if denom == 0:
        return 0.0
    return 0.5 * (ym1 - yp1) / denom


def correlate_delay(w: WaveformRecord, seg1: tuple[int, int], seg2: tuple[int, int]) -> float:
    """Delay (s) of the echo in ``seg2`` relative to the echo in ``seg1``.

    Peak of the cross-correlation, refined by a three-point parabola.
    Segments are half-open index ranges and must not overlap.
    """
    (a1, b1), (a2, b2) = seg1, seg2
    if not (0 <= a1 < b1 <= len(w.samples) and 0 <= a2 < b2 <= len(w.samples)):
        raise ValueError(f"segments {seg1}, {seg2} outside record of {len(w.samples)} samples")
    if a1 < b2 and a2 < b1:
        raise ValueError(f"segments {seg1} and {seg2} overlap")
    x = w.samples[a1:b1]
    y = w.samples[a2:b2]
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise DegenerateCorrelationError("flat segment: correlation undefined")
    cc = np.correlate(y, x, mode="full")
    k = int(np.argmax(cc))
    lag = k - (len(x) - 1)
    frac = 0.0
    if 0 < k < len(cc) - 1:
        frac = _parabolic_offset(cc[k - 1], cc[k], cc[k + 1])
    return (a2 - a1 + lag + frac) / w.sample_rate


def code_from_time(dt: float, geom: ChannelGeometry) -> int:
    """Timer code: number of whole ``timer_resolution`` ticks in ``dt``."""
    if dt < 0:
        raise ValueError(f"negative interval {dt}")
    q = dt / geom.timer_resolution
    n = round(q)
    if abs(q - n) <= _TICK_SLACK:
        return int(n)
    return int(math.floor(q))


def speed_from_code(n: int, geom: ChannelGeometry) -> float:
    if n <= 0:
        raise ZeroDivisionError("timer code must be positive to give a speed")
    return 2 * geom.base / (n * geom.timer_resolution)


def velocity_quantization(geom: ChannelGeometry, c: float) -> float:
    """Speed step (m/s) corresponding to one timer tick at speed ``c``."""
    if c <= 0:
        raise ValueError("speed must be positive")
    return c * c * geom.timer_resolution / (2 * geom.base)


def singaround_speed(f_loop: float, length: float, electronic_delay: float = 0.0) -> float:
    """Speed from a sing-around loop: each round trip over ``length`` retriggers the pulse."""
    if f_loop <= 0:
        raise ValueError("loop frequency must be positive")
    acoustic = 1.0 / f_loop - electronic_delay
    if acoustic <= 0:
        raise ValueError(
            f"loop period {1.0 / f_loop} s does not exceed electronic delay {electronic_delay} s"
        )
    return 2 * length / acoustic


def singaround_frequency(c: float, length: float, electronic_delay: float = 0.0) -> float:
    return 1.0 / (2 * length / c + electronic_delay)


@dataclass(frozen=True)
class Velocimeter:
    """Simulated sound-speed channel producing timer codes.

    ``mode="exact"`` times the analytic echo-pair delay; ``mode="waveform"``
    synthesizes the record and runs gate + correlation on it. ``speed_noise``
    (m/s, 1 sigma) is converted into Gaussian timing jitter before
    quantization; ``noise_std`` is additive amplitude noise on the record.
    """

    geometry: ChannelGeometry = ChannelGeometry()
    mode: str = "exact"
    speed_noise: float = 0.0
    noise_std: float = 0.0
    alpha_np: float = 0.0
    pulse: Pulse | None = None
    sample_rate: float | None = None

    def __post_init__(self):
        if self.mode not in ("exact", "waveform"):
            raise ValueError(f"unknown timing mode {self.mode!r}")
        if self.speed_noise < 0 or self.noise_std < 0:
            raise ValueError("noise levels must be non-negative")

    def delay(self, c: float, rng: np.random.Generator) -> float:
        g = self.geometry
        if self.mode == "exact":
            dt = 2 * g.base / c
        else:
            seed = int(rng.integers(2**31))
            w = synthesize_echoes(
                g, c, self.alpha_np, self.pulse, self.noise_std, seed, self.sample_rate
            )
            gates = gate_echoes(w)
            if len(gates) != 2:
                raise RuntimeError(f"expected 2 echoes, gated {len(gates)}")
            dt = correlate_delay(w, *gates)
        if self.speed_noise > 0:
            dt += rng.normal(0.0, self.speed_noise * 2 * g.base / c**2)
        return dt

    def measure(self, c: float, rng: np.random.Generator) -> int:
        return code_from_time(max(self.delay(c, rng), 0.0), self.geometry)
