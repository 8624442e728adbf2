"""Wasserstein potentials and measure recovery from them.

The potential of mu is T(x) = sum_k w_k d(x, x_k)^p.  Its one-sided
directional second difference (T(x+s) - 2T(x) + T(x-s))/s converges, as
s -> 0+, to a limit that exposes atom masses and antipodal-hyperplane
masses; the recovery routines invert those limits.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    PreconditionError,
    UnsupportedDimensionError,
    ValidationError,
)
from .manifold import Sphere, Torus, circle_distance, wrap_canonical
from .measure import (
    DiscreteMeasure,
    PositionPredicate,
    require_position,
)

ATOM_TOL = 1e-10
CLOSED_FORM_SCHEDULE = (1e-2, 3e-3, 1e-3, 3e-4, 1e-4)
SAMPLED_STEP_MULTIPLIERS = (20.0, 15.0, 10.0, 7.5, 5.0, 3.75, 2.5)


# --------------------------------------------------------------------------
# Oracles
# --------------------------------------------------------------------------


class ClosedFormPotential:
    """Potential evaluated exactly from an explicit discrete measure."""

    kind = "closed_form"

    def __init__(self, measure: DiscreteMeasure, p: float):
        if p < 1:
            raise ValueError(f"potential exponent must satisfy p >= 1, got {p}")
        self.measure = measure
        self.manifold = measure.manifold
        self.p = float(p)

    def evaluate(self, points) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        dist = self.manifold.pairwise_distance(points, self.measure.support)
        return dist**self.p @ self.measure.weights

    def __call__(self, x) -> float:
        return float(self.evaluate(np.asarray(x, dtype=float)[None, :])[0])


class SampledPotential:
    """Potential known only through values on a regular grid.

    Torus grids are uniform over the canonical cube with periodic
    multilinear interpolation.  Sphere grids use the angle (n=1) or a
    cell-centered colatitude x longitude chart (n=2) with bilinear
    interpolation.
    """

    kind = "sampled"

    def __init__(self, manifold, p: float, values: np.ndarray):
        if p < 1:
            raise ValueError(f"potential exponent must satisfy p >= 1, got {p}")
        values = np.asarray(values, dtype=float)
        if isinstance(manifold, Torus):
            if values.ndim != manifold.n:
                raise ValidationError(
                    f"torus grid must have {manifold.n} axes, got {values.ndim}"
                )
            if len(set(values.shape)) != 1:
                raise ValidationError("grid must have equal resolution per axis")
        elif isinstance(manifold, Sphere):
            if manifold.n == 1 and values.ndim != 1:
                raise ValidationError("circle grid must be one-dimensional")
            if manifold.n == 2 and (values.ndim != 2 or values.shape[0] != values.shape[1]):
                raise ValidationError("sphere grid must be square (colatitude x longitude)")
            if manifold.n > 2:
                raise UnsupportedDimensionError("sampled sphere oracles support n <= 2")
        else:
            raise ValueError(f"unsupported manifold {manifold!r}")
        bound = manifold.diameter**p
        if np.min(values) < -1e-9 or np.max(values) > bound + 1e-9:
            raise ValidationError(
                f"potential values outside [0, diameter^p = {bound:.6g}]"
            )
        self.manifold = manifold
        self.p = float(p)
        self.values = values
        self.resolution = values.shape[0]

    # -- interpolation ------------------------------------------------------

    def _eval_torus(self, points):
        g = self.resolution
        t = (points + 0.5) % 1.0 * g
        i0 = np.floor(t).astype(int)
        frac = t - i0
        i0 %= g
        out = np.zeros(points.shape[0])
        n = self.manifold.n
        for corner in itertools.product((0, 1), repeat=n):
            idx = tuple(((i0[:, k] + corner[k]) % g) for k in range(n))
            w = np.ones(points.shape[0])
            for k in range(n):
                w *= frac[:, k] if corner[k] else 1.0 - frac[:, k]
            out += w * self.values[idx]
        return out

    def _eval_circle(self, points):
        g = self.resolution
        theta = np.arctan2(points[:, 1], points[:, 0])
        t = (theta + math.pi) / (2 * math.pi) * g
        i0 = np.floor(t).astype(int)
        frac = t - i0
        i0 %= g
        i1 = (i0 + 1) % g
        return self.values[i0] * (1.0 - frac) + self.values[i1] * frac

    def _eval_sphere2(self, points):
        g = self.resolution
        colat = np.arctan2(np.hypot(points[:, 0], points[:, 1]), points[:, 2])
        lon = np.arctan2(points[:, 1], points[:, 0])
        ta = colat / math.pi * g - 0.5
        ia = np.clip(np.floor(ta).astype(int), 0, g - 2)
        fa = np.clip(ta - ia, 0.0, 1.0)
        tl = (lon + math.pi) / (2 * math.pi) * g
        il = np.floor(tl).astype(int)
        fl = tl - il
        il %= g
        il1 = (il + 1) % g
        v00 = self.values[ia, il]
        v01 = self.values[ia, il1]
        v10 = self.values[ia + 1, il]
        v11 = self.values[ia + 1, il1]
        return (
            v00 * (1 - fa) * (1 - fl)
            + v01 * (1 - fa) * fl
            + v10 * fa * (1 - fl)
            + v11 * fa * fl
        )

    def evaluate(self, points) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if isinstance(self.manifold, Torus):
            return self._eval_torus(points)
        if self.manifold.n == 1:
            return self._eval_circle(points)
        return self._eval_sphere2(points)

    def __call__(self, x) -> float:
        return float(self.evaluate(np.asarray(x, dtype=float)[None, :])[0])

    # -- grids ---------------------------------------------------------------

    def grid_points(self) -> np.ndarray:
        return grid_points(self.manifold, self.resolution)

    @classmethod
    def from_measure(cls, measure: DiscreteMeasure, p: float, resolution: int):
        pts = grid_points(measure.manifold, resolution)
        values = ClosedFormPotential(measure, p).evaluate(pts)
        if isinstance(measure.manifold, Torus):
            shape = (resolution,) * measure.manifold.n
        elif measure.manifold.n == 1:
            shape = (resolution,)
        else:
            shape = (resolution, resolution)
        return cls(measure.manifold, p, values.reshape(shape))


PotentialOracle = ClosedFormPotential | SampledPotential


def grid_points(manifold, resolution: int) -> np.ndarray:
    """Evaluation grid matching SampledPotential's layout, row-major order."""
    if isinstance(manifold, Torus):
        axis = -0.5 + np.arange(resolution) / resolution
        mesh = np.meshgrid(*([axis] * manifold.n), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)
    if manifold.n == 1:
        theta = -math.pi + 2 * math.pi * np.arange(resolution) / resolution
        return np.stack([np.cos(theta), np.sin(theta)], axis=1)
    if manifold.n == 2:
        colat = math.pi * (np.arange(resolution) + 0.5) / resolution
        lon = -math.pi + 2 * math.pi * np.arange(resolution) / resolution
        ca, lo = np.meshgrid(colat, lon, indexing="ij")
        return np.stack(
            [
                (np.sin(ca) * np.cos(lo)).ravel(),
                (np.sin(ca) * np.sin(lo)).ravel(),
                np.cos(ca).ravel(),
            ],
            axis=1,
        )
    raise UnsupportedDimensionError("sphere grids support n <= 2")


def potential_eval(measure: DiscreteMeasure, p: float, x) -> float:
    """T(x) = sum_k w_k d(x, x_k)^p."""
    x = np.asarray(x, dtype=float)
    if x.shape != (measure.manifold.point_dim,):
        raise ValueError(
            f"point shape {x.shape} does not match {measure.manifold.kind} measure"
        )
    return ClosedFormPotential(measure, p)(x)


# --------------------------------------------------------------------------
# Second differences and their limits
# --------------------------------------------------------------------------


def second_difference_ratio(oracle: PotentialOracle, x, direction, s: float) -> float:
    """(T(x + s) - 2 T(x) + T(x - s)) / s with the manifold-appropriate step.

    Torus: `direction` is a coordinate index and the step is s*e_j.
    Sphere: `direction` is a unit tangent z with <x, z> = 0 and the
    displaced points are cos(s) x +/- sin(s) z.
    """
    if s <= 0:
        raise ValueError(f"step must be positive, got {s}")
    x = np.asarray(x, dtype=float)
    if isinstance(oracle.manifold, Torus):
        j = int(direction)
        if not 0 <= j < oracle.manifold.n:
            raise ValueError(f"axis {j} out of range for T^{oracle.manifold.n}")
        step = np.zeros(oracle.manifold.n)
        step[j] = s
        pts = np.stack([x + step, x, x - step])
    else:
        z = np.asarray(direction, dtype=float)
        if z.shape != x.shape:
            raise ValueError("tangent direction has wrong shape")
        if abs(float(x @ z)) > 1e-8:
            raise ValueError("direction is not tangent to the sphere at x")
        pts = np.stack(
            [math.cos(s) * x + math.sin(s) * z, x, math.cos(s) * x - math.sin(s) * z]
        )
    t_plus, t_mid, t_minus = oracle.evaluate(pts)
    return float((t_plus - 2.0 * t_mid + t_minus) / s)


def richardson_limit(steps, ratios) -> float:
    """Neville extrapolation of ratio(s) to s = 0 (polynomial error model)."""
    s = np.asarray(steps, dtype=float)
    tbl = np.asarray(ratios, dtype=float).copy()
    n = len(s)
    if n == 0:
        raise ValueError("empty extrapolation schedule")
    for k in range(1, n):
        tbl[: n - k] = (s[k:] * tbl[: n - k] - s[: n - k] * tbl[1 : n - k + 1]) / (
            s[k:] - s[: n - k]
        )
    return float(tbl[0])


def _intercept_limit(steps, ratios, degree=3) -> float:
    # fit s*ratio(s) = c0 + c1 s + ... ; c0 absorbs the constant interpolation
    # offset a sampled oracle picks up at the singular point, c1 is the limit
    s = np.asarray(steps, dtype=float)
    f = s * np.asarray(ratios, dtype=float)
    design = np.vander(s, degree + 1, increasing=True)
    coeffs, *_ = np.linalg.lstsq(design, f, rcond=None)
    return float(coeffs[1])


def default_schedule(oracle: PotentialOracle):
    if oracle.kind == "closed_form":
        return CLOSED_FORM_SCHEDULE
    if isinstance(oracle.manifold, Torus):
        h = 1.0 / oracle.resolution
    else:
        h = math.pi / oracle.resolution
    return tuple(m * h for m in SAMPLED_STEP_MULTIPLIERS)


def _symmetric_directions(manifold, x, count=96):
    """A sign-symmetric set of unit step directions at x (tangent vectors on
    the sphere); averaging probes over it cancels all odd smooth terms."""
    if isinstance(manifold, Torus):
        n = manifold.n
        if n == 1:
            return np.array([[1.0], [-1.0]])
        if n == 2:
            phi = math.pi * np.arange(count) / count
            half = np.stack([np.cos(phi), np.sin(phi)], axis=1)
        elif n == 3:
            # golden-spiral hemisphere, mirrored below
            k = np.arange(count)
            z = (k + 0.5) / count
            r = np.sqrt(1.0 - z * z)
            phi = k * math.pi * (3.0 - math.sqrt(5.0))
            half = np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
        else:
            raise UnsupportedDimensionError("direction averaging supports n <= 3")
        return np.concatenate([half, -half], axis=0)
    x = np.asarray(x, dtype=float)
    if manifold.n == 1:
        z = np.array([-x[1], x[0]])
        return np.stack([z, -z])
    anchor = np.zeros(x.size)
    anchor[int(np.argmin(np.abs(x)))] = 1.0
    e1 = anchor - (anchor @ x) * x
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(x, e1)
    phi = math.pi * np.arange(count) / count
    half = np.cos(phi)[:, None] * e1[None, :] + np.sin(phi)[:, None] * e2[None, :]
    return np.concatenate([half, -half], axis=0)


def _sampled_apex_mass(oracle: SampledPotential, x, schedule=None) -> float:
    """Atom mass read off a cone apex of a sampled potential.

    Probes are averaged over a symmetric direction set, which leaves
    G(s) = even-series + mass * cone(s) + interpolation noise, where the
    cone profile is s^? exactly: s on the torus (the apex is the atom
    itself, p = 1) and (pi - s)^p on the sphere (the apex is the atom's
    antipode).  A least-squares fit with basis {1/s, 1, s^2, s^4, cone}
    isolates the mass; the 1/s column absorbs the systematic multilinear
    interpolation error, which grows like h^2/s near the apex.
    """
    manifold = oracle.manifold
    x = np.asarray(x, dtype=float)
    if schedule is None:
        if isinstance(manifold, Torus):
            h = 1.0 / oracle.resolution
            schedule = np.geomspace(20.0 * h, 3.0 * h, 12)
        else:
            h = math.pi / oracle.resolution
            schedule = np.geomspace(30.0 * h, 4.0 * h, 12)
    schedule = np.asarray(schedule, dtype=float)
    dirs = _symmetric_directions(manifold, x)
    means = np.empty(len(schedule))
    for i, s in enumerate(schedule):
        if isinstance(manifold, Torus):
            pts = wrap_canonical(x[None, :] + s * dirs)
        else:
            pts = math.cos(s) * x[None, :] + math.sin(s) * dirs
        means[i] = float(np.mean(oracle.evaluate(pts)))
    if isinstance(manifold, Torus):
        cone = schedule
    else:
        cone = (math.pi - schedule) ** oracle.p
    design = np.stack(
        [1.0 / schedule, np.ones_like(schedule), schedule**2, schedule**4, cone],
        axis=1,
    )
    coeffs, *_ = np.linalg.lstsq(design, means, rcond=None)
    return float(coeffs[-1])


def numeric_limit(oracle: PotentialOracle, x, direction, schedule=None) -> float:
    """Extrapolated s -> 0+ limit of the directional second-difference ratio."""
    if schedule is None:
        schedule = default_schedule(oracle)
    ratios = [second_difference_ratio(oracle, x, direction, s) for s in schedule]
    if oracle.kind == "sampled":
        return _intercept_limit(schedule, ratios)
    return richardson_limit(schedule, ratios)


def _torus_limit_closed(measure: DiscreteMeasure, p: float, x, axis: int) -> float:
    """Analytic second-difference limit, valid for every n >= 1.

    For n = 1 the antipodal hyperplane degenerates to the antipodal point and
    the transverse distance is zero, which reproduces the circle constants.
    """
    x = np.asarray(x, dtype=float)
    support = measure.support
    weights = measure.weights
    on_plane = circle_distance(support[:, axis], x[axis] + 0.5) <= ATOM_TOL
    if measure.manifold.n == 1:
        rho2 = np.zeros(int(np.sum(on_plane)))
    else:
        others = np.delete(np.arange(measure.manifold.n), axis)
        diff = wrap_canonical(support[np.ix_(on_plane, others)] - x[others][None, :])
        rho2 = np.sum(diff * diff, axis=1)
    w_plane = weights[on_plane]
    if p == 2.0:
        return -2.0 * float(np.sum(w_plane))
    plane_term = -p * float(np.sum(w_plane * (0.25 + rho2) ** ((p - 2.0) / 2.0)))
    if p == 1.0:
        return 2.0 * measure.atom_mass(x) + plane_term
    return plane_term


def torus_limit_analytic(measure: DiscreteMeasure, p: float, x, axis: int) -> float:
    """Closed-form limit of the axis-j second difference on T^n, n >= 2.

    p = 1:  2 mu({x}) - integral over the antipodal hyperplane of
            (1/4 + rho^2)^(-1/2);
    p in (1,2) or (2,inf):  -p * integral of (1/4 + rho^2)^((p-2)/2);
    p = 2:  -2 mu(antipodal hyperplane),
    where rho is the transverse distance within the hyperplane.
    """
    if not isinstance(measure.manifold, Torus):
        raise ValueError("torus limits require a torus measure")
    if measure.manifold.n < 2:
        raise UnsupportedDimensionError(
            "the hyperplane limit needs n >= 2; on the circle use the sphere "
            "formulas (recovery does this internally)"
        )
    if p < 1:
        raise ValueError(f"exponent must satisfy p >= 1, got {p}")
    if not 0 <= axis < measure.manifold.n:
        raise ValueError(f"axis {axis} out of range for T^{measure.manifold.n}")
    return _torus_limit_closed(measure, p, x, axis)


def sphere_limit_analytic(measure: DiscreteMeasure, p: float, x) -> float:
    """Closed-form limit on S^n: 2 mu({x}) - 2 mu({-x}) for p = 1,
    -2 p pi^(p-1) mu({-x}) for p > 1; independent of the tangent direction."""
    if not isinstance(measure.manifold, Sphere):
        raise ValueError("sphere limits require a sphere measure")
    if p < 1:
        raise ValueError(f"exponent must satisfy p >= 1, got {p}")
    x = np.asarray(x, dtype=float)
    mass_antipode = measure.atom_mass(-x)
    if p == 1.0:
        return 2.0 * measure.atom_mass(x) - 2.0 * mass_antipode
    return -2.0 * p * math.pi ** (p - 1.0) * mass_antipode


# --------------------------------------------------------------------------
# Recovery
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RecoveryResult:
    sites: np.ndarray
    masses: np.ndarray
    method: str
    residual: float

    def to_json_dict(self) -> dict:
        return {
            "method": self.method,
            "sites": [[float(v) for v in row] for row in self.sites],
            "masses": [float(m) for m in self.masses],
            "residual": float(self.residual),
        }


def _finish_recovery(sites, raw_masses, method) -> RecoveryResult:
    raw = np.asarray(raw_masses, dtype=float)
    masses = np.clip(raw, 0.0, None)
    residual = abs(1.0 - float(np.sum(raw))) + float(np.sum(masses - raw))
    return RecoveryResult(np.asarray(sites, dtype=float), masses, method, residual)


def _torus_site_limit(oracle, x, axis, schedule):
    if oracle.kind == "closed_form":
        return _torus_limit_closed(oracle.measure, oracle.p, x, axis)
    return numeric_limit(oracle, x, axis, schedule)


def recover_torus_weights(
    oracle: PotentialOracle, sites, schedule=None
) -> RecoveryResult:
    """Recover atom masses at candidate sites from a torus potential, p != 2.

    For p = 1 the sites must avoid each other's antipodal hyperplanes and the
    mass at a site is (limit at the site)/2.  For p in (1,2) or (2,inf) the
    sites must have pairwise distinct first coordinates and the mass is the
    limit at site + e_1/2 divided by -p * 4^((2-p)/2).
    """
    manifold = oracle.manifold
    if not isinstance(manifold, Torus):
        raise ValueError("recover_torus_weights requires a torus oracle")
    p = oracle.p
    sites = np.atleast_2d(np.asarray(sites, dtype=float))
    sites = wrap_canonical(sites)
    if p == 2.0:
        raise ValueError("p = 2 does not isolate atoms; use recover_torus_marginals_p2")
    if p == 1.0:
        require_position(manifold, sites, PositionPredicate.AVOIDS_ANTIPODAL_HYPERPLANES)
        if oracle.kind == "sampled":
            # each site is a cone apex of the potential; the averaged-probe
            # fit reads the atom mass straight off the cone coefficient
            raw = [_sampled_apex_mass(oracle, site, schedule) for site in sites]
        else:
            raw = [
                _torus_limit_closed(oracle.measure, p, site, 0) / 2.0 for site in sites
            ]
        return _finish_recovery(sites, raw, "torus_p1")
    require_position(manifold, sites, PositionPredicate.DISTINCT_FIRST_COORDINATES)
    divisor = -p * 4.0 ** ((2.0 - p) / 2.0)
    half_e1 = np.zeros(manifold.n)
    half_e1[0] = 0.5
    limits = np.array(
        [_torus_site_limit(oracle, wrap_canonical(site + half_e1), 0, schedule) for site in sites]
    )
    return _finish_recovery(sites, limits / divisor, "torus_p_general")


def recover_sphere_weights(oracle: PotentialOracle, sites, schedule=None) -> RecoveryResult:
    """Recover atom masses at candidate sites from a sphere potential.

    Sites must contain no antipodal pair.  The limit is probed at the
    antipode of each site; mass = -(limit)/2 for p = 1 and
    limit / (-2 p pi^(p-1)) for p > 1.
    """
    manifold = oracle.manifold
    if not isinstance(manifold, Sphere):
        raise ValueError("recover_sphere_weights requires a sphere oracle")
    sites = np.atleast_2d(np.asarray(sites, dtype=float))
    sites = sites / np.linalg.norm(sites, axis=1, keepdims=True)
    require_position(manifold, sites, PositionPredicate.NO_ANTIPODAL_PAIRS)
    p = oracle.p
    raw = []
    for site in sites:
        probe = -site
        if oracle.kind == "closed_form":
            limit = sphere_limit_analytic(oracle.measure, p, probe)
            raw.append(
                -limit / 2.0 if p == 1.0 else limit / (-2.0 * p * math.pi ** (p - 1.0))
            )
        else:
            # the antipode of the site is a cone apex with profile (pi-s)^p
            raw.append(_sampled_apex_mass(oracle, probe, schedule))
    method = "sphere_p1" if p == 1.0 else "sphere_p_general"
    return _finish_recovery(sites, raw, method)


# --------------------------------------------------------------------------
# p = 2 marginal recovery
# --------------------------------------------------------------------------


def _marginal_detector(oracle, axis, zs, anchor, s_pair):
    """Extrapolated hyperplane-mass response at each scan coordinate."""
    s_hi, s_lo = s_pair
    n = oracle.manifold.n
    base = np.tile(anchor, (len(zs), 1))
    base[:, axis] = wrap_canonical(np.asarray(zs) - 0.5)
    ratios = []
    for s in (s_hi, s_lo):
        step = np.zeros(n)
        step[axis] = s
        vals = (
            oracle.evaluate(base + step)
            - 2.0 * oracle.evaluate(base)
            + oracle.evaluate(base - step)
        ) / s
        ratios.append(vals)
    r_hi, r_lo = ratios
    extrapolated = (s_hi * r_lo - s_lo * r_hi) / (s_hi - s_lo)
    return -extrapolated / 2.0


def _refine_peak(oracle, axis, lo, hi, anchor, s, iterations=90):
    def value(z):
        probe = anchor.copy()
        probe[axis] = wrap_canonical(np.asarray(z) - 0.5)
        step = np.zeros(oracle.manifold.n)
        step[axis] = s
        return -(
            oracle(probe + step) - 2.0 * oracle(probe) + oracle(probe - step)
        ) / (2.0 * s)

    for _ in range(iterations):
        if hi - lo <= 1e-14:
            break
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if value(m1) < value(m2):
            lo = m1
        else:
            hi = m2
    return 0.5 * (lo + hi)


def recover_torus_marginals_p2(
    oracle: PotentialOracle, resolution: int = 1024, mass_floor: float = 1e-6
) -> list:
    """Reconstruct every one-dimensional marginal of a torus measure, p = 2.

    The axis-j second-difference limit at a point with j-th coordinate
    z - 1/2 equals -2 * (marginal mass at z).  A coarse scan over z locates
    the atoms as peaks of the finite-s response, each peak is sharpened by
    ternary search, and the mass at the refined location comes from the
    analytic limit (closed form) or the extrapolated numeric limit (sampled).
    Marginals are renormalized before they are returned.
    """
    manifold = oracle.manifold
    if not isinstance(manifold, Torus):
        raise ValueError("marginal recovery requires a torus oracle")
    if oracle.p != 2.0:
        raise ValueError(f"marginal recovery is a p = 2 method, oracle has p = {oracle.p}")
    n = manifold.n
    delta = 1.0 / resolution
    if oracle.kind == "sampled":
        h = 1.0 / oracle.resolution
        s_pair = (max(4 * delta, 16 * h), max(2 * delta, 8 * h))
    else:
        s_pair = (4 * delta, 2 * delta)
    anchor = np.zeros(n)
    zs = -0.5 + np.arange(resolution) * delta

    marginals = []
    for axis in range(n):
        response = _marginal_detector(oracle, axis, zs, anchor, s_pair)
        hot = response > mass_floor
        if not np.any(hot):
            raise PreconditionError(
                f"no marginal atoms detected on axis {axis} above floor {mass_floor}"
            )
        # group circularly-consecutive hot nodes into clusters
        idx = np.nonzero(hot)[0]
        clusters = [[int(idx[0])]]
        for i in idx[1:]:
            if i == clusters[-1][-1] + 1:
                clusters[-1].append(int(i))
            else:
                clusters.append([int(i)])
        if len(clusters) > 1 and clusters[0][0] == 0 and clusters[-1][-1] == resolution - 1:
            clusters[0] = clusters.pop() + clusters[0]

        locations = []
        masses = []
        for cluster in clusters:
            peak = max(cluster, key=lambda i: response[i])
            center = float(zs[peak])
            z_star = _refine_peak(
                oracle, axis, center - 1.5 * delta, center + 1.5 * delta, anchor, s_pair[1]
            )
            if oracle.kind == "closed_form":
                probe = anchor.copy()
                probe[axis] = wrap_canonical(np.asarray(z_star) - 0.5)
                mass = -_torus_limit_closed(oracle.measure, 2.0, probe, axis) / 2.0
            else:
                probe = anchor.copy()
                probe[axis] = wrap_canonical(np.asarray(z_star) - 0.5)
                mass = -numeric_limit(oracle, probe, axis) / 2.0
            if mass > mass_floor:
                locations.append(wrap_canonical(np.asarray([z_star]))[0])
                masses.append(mass)
        if not masses:
            raise PreconditionError(f"marginal recovery found no atoms on axis {axis}")
        order = np.argsort(locations)
        locations = np.asarray(locations)[order]
        masses = np.asarray(masses)[order]
        marginals.append(
            DiscreteMeasure(Torus(1), locations[:, None], masses / float(np.sum(masses)))
        )
    return marginals
