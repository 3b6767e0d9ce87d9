"""Born-approximation volume scattering by dilute, randomly placed weak scatterers.

Per unit volume the differential coefficient is

    D(phi) = n * NORMALIZATION * k**4 * (beta + q * cos(phi))**2      [1/(m sr)]

with beta the compressibility contrast, q the density contrast and phi the
scattering angle. Integrating over the full sphere gives the total
coefficient mu_s [1/m]. Powers add incoherently, so everything is linear in
the number density n.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

# chosen so that a pure monopole (q = 0) gives mu_s = k**4 beta**2 / (4 pi)
NORMALIZATION = 1.0 / (16.0 * math.pi**2)

_ELASTIC_TOL = 1e-9


@dataclass(frozen=True)
class ContrastProfile:
    beta: float
    q: float
    k: float
    number_density: float = 1.0

    def __post_init__(self):
        if self.k <= 0:
            raise ValueError("wavenumber must be positive")
        if self.number_density < 0:
            raise ValueError("number density must be non-negative")


@dataclass(frozen=True)
class QuadratureSpec:
    n_polar: int = 64
    n_azimuth: int = 64
    scheme: str = "gauss"

    def __post_init__(self):
        if self.n_polar < 2 or self.n_azimuth < 1:
            raise ValueError("need n_polar >= 2 and n_azimuth >= 1")
        if self.scheme not in ("gauss", "midpoint"):
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}")


def scattering_angle_cos(k_i, k_s) -> float:
    """cos(phi) = k_i . k_s / |k_i|**2 for elastic scattering (|k_s| = |k_i|)."""
    k_i = np.asarray(k_i, dtype=float)
    k_s = np.asarray(k_s, dtype=float)
    ki = np.linalg.norm(k_i)
    if ki == 0:
        raise ValueError("incident wave vector is zero")
    if abs(np.linalg.norm(k_s) - ki) > _ELASTIC_TOL * ki:
        raise ValueError("|k_s| != |k_i|: only elastic scattering is supported")
    return float(np.dot(k_i, k_s) / ki**2)


def differential_coefficient(p: ContrastProfile, phi):
    phi = np.asarray(phi, dtype=float)
    out = p.number_density * NORMALIZATION * p.k**4 * (p.beta + p.q * np.cos(phi)) ** 2
    return float(out) if out.ndim == 0 else out


def backscatter_coefficient(p: ContrastProfile) -> float:
    # cos(pi) is exactly -1; avoid np.cos(np.pi) rounding
    return p.number_density * NORMALIZATION * p.k**4 * (p.beta - p.q) ** 2


def _nodes(n: int, a: float, b: float, scheme: str):
    if scheme == "gauss":
        x, w = np.polynomial.legendre.leggauss(n)
        half = 0.5 * (b - a)
        return a + half * (x + 1), half * w
    h = (b - a) / n
    return a + h * (np.arange(n) + 0.5), np.full(n, h)


def total_coefficient(p: ContrastProfile, quad: QuadratureSpec = QuadratureSpec()) -> float:
    """mu_s = integral of D over the sphere, by tensor-product quadrature in (phi, psi)."""
    phi, w_phi = _nodes(quad.n_polar, 0.0, math.pi, quad.scheme)
    psi, w_psi = _nodes(quad.n_azimuth, 0.0, 2 * math.pi, quad.scheme)
    polar = differential_coefficient(p, phi) * np.sin(phi) * w_phi
    # D has no azimuthal dependence; the full grid keeps the summation order fixed
    grid = np.outer(w_psi, polar)
    return float(np.sum(grid))


def monopole_total(p: ContrastProfile) -> float:
    """Closed form for q = 0."""
    return p.number_density * p.k**4 * p.beta**2 / (4 * math.pi)


def dipole_total(p: ContrastProfile) -> float:
    """Closed form for beta = 0."""
    return p.number_density * p.k**4 * p.q**2 / (12 * math.pi)


def invert_contrasts(
    d1: float,
    phi1: float,
    d2: float,
    phi2: float,
    k: float,
    number_density: float = 1.0,
) -> list[tuple[float, float]]:
    """Candidate (beta, q) pairs reproducing two differential coefficients.

    Each measurement fixes |beta + q cos(phi_i)|; the four sign choices give
    up to four pairs (duplicates removed), one of which is the true one.
    """
    if d1 < 0 or d2 < 0:
        raise ValueError("differential coefficients must be non-negative")
    if k <= 0 or number_density <= 0:
        raise ValueError("wavenumber and number density must be positive")
    c1, c2 = math.cos(phi1), math.cos(phi2)
    if phi1 == phi2 or math.isclose(c1, c2, rel_tol=0.0, abs_tol=1e-12):
        raise ValueError("the two scattering angles must have distinct cosines")
    scale = number_density * NORMALIZATION * k**4
    s1 = math.sqrt(d1 / scale)
    s2 = math.sqrt(d2 / scale)
    out: list[tuple[float, float]] = []
    for e1, e2 in itertools.product((1.0, -1.0), repeat=2):
        q = (e1 * s1 - e2 * s2) / (c1 - c2)
        beta = e1 * s1 - q * c1
        if not any(math.isclose(beta, b, abs_tol=1e-12) and math.isclose(q, qq, abs_tol=1e-12)
                   for b, qq in out):
            out.append((beta, q))
    return out
