"""Fourier analysis of the torus cost function c_p(x) = |x|^p.

The potential of a torus measure is the convolution c_p * mu, so its
Fourier coefficients factor as T^(j) = c_p^(j) * mu^(j); wherever c_p^(j)
does not vanish the measure is recoverable frequency by frequency.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import UnrecoverableFrequencyError, ValidationError
from .manifold import Torus
from .measure import DiscreteMeasure
from .potential import ClosedFormPotential, SampledPotential

DEFAULT_RESOLUTION = 1 << 14
ZERO_THRESHOLD = 1e-12

_GL_NODES, _GL_WEIGHTS = leggauss(16)


def _check_resolution(resolution: int):
    if resolution < (1 << 10) or resolution & (resolution - 1):
        raise ValueError(f"resolution must be a power of two >= 1024, got {resolution}")


@functools.lru_cache(maxsize=32)
def _quadrature_cache(p: float, resolution: int):
    # Gauss-Legendre nodes/weights on `resolution` uniform panels of [0, 1/2],
    # with x^p folded into the weights.
    edges = np.linspace(0.0, 0.5, resolution + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return nodes, weights * nodes**p


def cost_coeff_quadrature(p: float, j: int, resolution: int = DEFAULT_RESOLUTION) -> float:
    """c_p^(j) = 2 * integral_0^{1/2} x^p cos(2 pi j x) dx by panel quadrature."""
    if p < 1:
        raise ValueError(f"exponent must satisfy p >= 1, got {p}")
    _check_resolution(resolution)
    nodes, wxp = _quadrature_cache(float(p), int(resolution))
    return 2.0 * float(np.dot(wxp, np.cos((2.0 * math.pi * j) * nodes)))


@functools.lru_cache(maxsize=8)
def _quadrature_cache_2d(p: float, resolution: int):
    edges = np.linspace(-0.5, 0.5, resolution + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    radial = (nodes[:, None] ** 2 + nodes[None, :] ** 2) ** (p / 2.0)
    return nodes, weights, radial


def cost_coeff_quadrature_2d(p: float, pair, resolution: int = 128) -> float:
    """Tensor-grid coefficient of the planar cost (x^2 + y^2)^(p/2) on T^2.

    The integrand is even, so only the cosine part survives:
    integral of c_p(x, y) cos(2 pi (j1 x + j2 y)) over the canonical square.
    """
    if p < 1:
        raise ValueError(f"exponent must satisfy p >= 1, got {p}")
    j1, j2 = (int(v) for v in pair)
    nodes, weights, radial = _quadrature_cache_2d(float(p), int(resolution))
    cos1 = np.cos(2.0 * math.pi * j1 * nodes) * weights
    cos2 = np.cos(2.0 * math.pi * j2 * nodes) * weights
    sin1 = np.sin(2.0 * math.pi * j1 * nodes) * weights
    sin2 = np.sin(2.0 * math.pi * j2 * nodes) * weights
    # cos(a+b) expansion keeps the computation as two rank-one contractions
    return float(cos1 @ radial @ cos2 - sin1 @ radial @ sin2)


def cost_coeff_closed(p, j) -> float:
    """Exact coefficients: p = 2 (n = 1 or index pairs for n = 2) and p = 1 (n = 1)."""
    if isinstance(j, (tuple, list, np.ndarray)):
        j1, j2 = (int(v) for v in j)
        if p != 2:
            raise ValueError("closed forms for index pairs exist only for p = 2")
        if j1 == 0 and j2 == 0:
            return 1.0 / 6.0
        if j1 == 0 or j2 == 0:
            k = j1 or j2
            return (-1.0) ** k / (2.0 * k * k * math.pi**2)
        return 0.0
    j = int(j)
    if p == 2:
        if j == 0:
            return 1.0 / 12.0
        return (-1.0) ** j / (2.0 * j * j * math.pi**2)
    if p == 1:
        if j == 0:
            return 0.25
        if j % 2 == 0:
            return 0.0
        return -1.0 / (j * j * math.pi**2)
    raise ValueError(f"no closed form for p = {p}")


def measure_transform(mu: DiscreteMeasure, j) -> complex:
    """mu^(j) = sum_k w_k exp(-2 pi i j . x_k)."""
    if not isinstance(mu.manifold, Torus):
        raise ValueError("the character transform is defined for torus measures")
    jvec = np.atleast_1d(np.asarray(j, dtype=float))
    if jvec.shape != (mu.manifold.n,):
        raise ValueError(
            f"frequency vector of length {jvec.size} does not match T^{mu.manifold.n}"
        )
    phases = mu.support @ jvec
    return complex(np.sum(mu.weights * np.exp(-2j * math.pi * phases)))


@dataclass(frozen=True)
class SpectrumReport:
    """Cost-coefficient values over |j| <= jmax with the detected zero set."""

    p: float
    jmax: int
    values: dict
    zeros: tuple
    threshold: float
    error_budget: float

    def __post_init__(self):
        expected = tuple(sorted(j for j, v in self.values.items() if abs(v) <= self.threshold))
        if expected != tuple(sorted(self.zeros)):
            raise ValidationError("zero list inconsistent with values and threshold")

    def to_json_dict(self) -> dict:
        return {
            "p": float(self.p),
            "jmax": int(self.jmax),
            "threshold": float(self.threshold),
            "error_budget": float(self.error_budget),
            "values": {str(j): float(self.values[j]) for j in sorted(self.values)},
            "zeros": [int(j) for j in self.zeros],
        }

    def to_csv_text(self) -> str:
        lines = ["j,value,is_zero"]
        for j in sorted(self.values):
            lines.append(f"{j},{self.values[j]!r},{int(j in self.zeros)}")
        return "\n".join(lines) + "\n"


def nonvanishing_scan(
    p: float,
    jmax: int,
    threshold: float = ZERO_THRESHOLD,
    resolution: int = DEFAULT_RESOLUTION,
) -> SpectrumReport:
    """Scan c_p^(j) for |j| <= jmax and report the values below threshold.

    The error budget is the largest change when the quadrature resolution is
    halved, so reported zeros can be told apart from small nonzero values.
    """
    values = {}
    budget = 0.0
    for j in range(0, jmax + 1):
        v = cost_coeff_quadrature(p, j, resolution)
        v_coarse = cost_coeff_quadrature(p, j, resolution // 2)
        budget = max(budget, abs(v - v_coarse))
        values[j] = v
        if j > 0:
            values[-j] = v  # c_p is even, coefficients are even in j
    zeros = tuple(sorted(j for j, v in values.items() if abs(v) <= threshold))
    return SpectrumReport(float(p), int(jmax), values, zeros, float(threshold), budget)


# --------------------------------------------------------------------------
# Convolution identity and recovery on the circle
# --------------------------------------------------------------------------


def _circle_potential_transform(mu: DiscreteMeasure, p: float, jmax: int, gridsize: int):
    """T^(j) for |j| <= jmax by panel quadrature of the closed-form potential.

    Panels are split at the potential's kink locations (support points and
    their antipodes), so each piece is smooth and Gauss-Legendre nodes give
    near machine-precision coefficients.
    """
    breaks = np.sort(
        np.unique((np.concatenate([mu.support[:, 0], mu.support[:, 0] + 0.5]) + 0.5) % 1.0 - 0.5)
    )
    edges = [float(breaks[0])]
    for k in range(len(breaks)):
        right = float(breaks[(k + 1) % len(breaks)]) + (1.0 if k + 1 == len(breaks) else 0.0)
        base = edges[-1]
        length = right - base
        pieces = max(1, int(math.ceil(length * gridsize)))
        edges.extend(base + length * (i + 1) / pieces for i in range(pieces))
    edges = np.asarray(edges)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    tvals = ClosedFormPotential(mu, p).evaluate(((nodes + 0.5) % 1.0 - 0.5)[:, None])
    js = np.arange(-jmax, jmax + 1)
    phases = np.exp(-2j * math.pi * js[:, None] * nodes[None, :])
    coeffs = phases @ (weights * tvals)
    return {int(j): complex(c) for j, c in zip(js, coeffs)}


def convolution_identity_check(
    mu: DiscreteMeasure, p: float, jmax: int = 16, gridsize: int = 4096
) -> float:
    """max_{|j| <= jmax} |T^(j) - c_p^(j) mu^(j)| for a circle measure."""
    if not isinstance(mu.manifold, Torus) or mu.manifold.n != 1:
        raise ValueError("the convolution identity check runs on T^1 measures")
    if p < 1:
        raise ValueError(f"exponent must satisfy p >= 1, got {p}")
    t_hat = _circle_potential_transform(mu, p, jmax, gridsize)
    worst = 0.0
    for j in range(-jmax, jmax + 1):
        predicted = cost_coeff_quadrature(p, j) * measure_transform(mu, [j])
        worst = max(worst, abs(t_hat[j] - predicted))
    return worst


def fourier_recover(
    oracle: SampledPotential, jmax: int, threshold: float = ZERO_THRESHOLD
) -> dict:
    """mu^(j) = T^(j) / c_p^(j) from a sampled circle potential.

    Raises UnrecoverableFrequencyError when any scanned coefficient with
    |j| <= jmax vanishes (e.g. every nonzero even frequency at p = 1).
    """
    if not isinstance(oracle, SampledPotential):
        raise ValueError("fourier recovery needs a sampled potential oracle")
    if not isinstance(oracle.manifold, Torus) or oracle.manifold.n != 1:
        raise ValueError("fourier recovery runs on T^1 oracles")
    scan = nonvanishing_scan(oracle.p, jmax, threshold)
    if scan.zeros:
        raise UnrecoverableFrequencyError(scan.zeros)
    g = oracle.resolution
    spectrum = np.fft.fft(oracle.values) / g
    out = {}
    for j in range(-jmax, jmax + 1):
        # grid starts at -1/2, so the plain DFT needs the (-1)^j phase
        t_hat = complex(spectrum[j % g]) * (-1.0) ** j
        out[j] = t_hat / scan.values[j]
    return out
