"""Acoustic metrology for mid-frequency liquid measurements.

Modules: ``refmodel`` (pure-water reference speed), ``channel`` (virtual
time-of-flight channel), ``calib`` (speed-vs-code calibration), ``budget``
(uncertainty and spec conformance), ``atten`` (attenuation), ``scatter``
(Born scattering coefficients), ``turbidity`` (concentration curves) and
``cli``.
"""

__version__ = "0.1.0"
