"""Executable consequences of isometric rigidity, run as seeded property suites.

Each suite draws deterministic trials from a seed and checks one finite,
numerical shadow of the structure theory: push-forwards preserve transport
distance, potentials separate distinct measures, the diameter is attained
exactly by antipodal Dirac pairs, quadratic potentials determine marginals,
and recovery round-trips reproduce atom masses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .fourier import (
    convolution_identity_check,
    cost_coeff_closed,
    cost_coeff_quadrature,
    fourier_recover,
    measure_transform,
    nonvanishing_scan,
)
from .manifold import (
    BisectorSide,
    Manifold,
    Sphere,
    Torus,
    bisector_side,
    circle_distance,
    random_isometry,
    wrap_canonical,
)
from .measure import DiscreteMeasure, dirac, marginal, pushforward
from .potential import (
    ClosedFormPotential,
    SampledPotential,
    grid_points,
    recover_sphere_weights,
    recover_torus_marginals_p2,
    recover_torus_weights,
)
from .transport import solve_transport

DEFAULT_TOLERANCES = {
    "isometry": {"deviation": 1e-9},
    "injectivity": {"gap": 1e-6, "separation": 1e-2, "match": 1e-6, "distinction": 1e-3},
    "diameter": {"dirac": 1e-12, "margin": 1e-9},
    "marginals": {"weights": 1e-8, "locations": 1e-8},
    "recovery": {"closed_form": 1e-9, "marginals": 1e-8},
    "segment": {"interval": 1e-3 + 1e-9},
    "fourier": {"closed": 1e-9, "identity": 1e-7, "roundtrip": 1e-6},
}

SUITE_NAMES = tuple(DEFAULT_TOLERANCES)


@dataclass(frozen=True)
class SuiteConfig:
    suite: str
    manifold: Manifold = Torus(2)
    p: float = 2.0
    trials: int = 20
    seed: int = 7
    tolerances: dict = field(default_factory=dict)

    def tolerance(self, key: str) -> float:
        if key in self.tolerances:
            return float(self.tolerances[key])
        return DEFAULT_TOLERANCES[self.suite][key]


@dataclass(frozen=True)
class SuiteFailure:
    trial: int
    description: str
    observed: float
    expected: float
    tolerance: float

    def to_json_dict(self) -> dict:
        return {
            "trial": self.trial,
            "description": self.description,
            "observed": float(self.observed),
            "expected": float(self.expected),
            "tolerance": float(self.tolerance),
        }


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    trials_run: int
    failures: tuple
    passed: bool
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.passed != (len(self.failures) == 0):
            raise ValidationError("passed flag inconsistent with failure list")

    def to_json_dict(self) -> dict:
        return {
            "suite": self.suite,
            "trials": self.trials_run,
            "passed": self.passed,
            "failures": [f.to_json_dict() for f in self.failures],
            "details": dict(self.details),
        }

    def format_lines(self) -> list:
        status = "PASS" if self.passed else "FAIL"
        lines = [f"{self.suite:<12} trials={self.trials_run:<4} {status}"]
        for f in self.failures:
            lines.append(
                f"  trial {f.trial}: {f.description}: observed {f.observed!r}, "
                f"expected {f.expected!r} within {f.tolerance!r}"
            )
        return lines


# --------------------------------------------------------------------------
# Random instances
# --------------------------------------------------------------------------


def _arc_coordinates(rng, count, separation):
    """`count` circle values with pairwise gaps >= separation, confined to a
    random arc of length 0.45 so half-shifted values stay >= 0.05 away."""
    arc = 0.45
    spacing = arc / count
    if spacing < separation:
        raise ValueError(f"cannot separate {count} values by {separation} inside the arc")
    slots = np.arange(count) * spacing + rng.uniform(0.0, spacing - separation, count)
    values = rng.uniform(-0.5, 0.5) + slots
    return wrap_canonical(rng.permutation(values))


def random_generic_measure(
    manifold: Manifold, rng, n_atoms=None, separation=0.05, max_tries=2000
) -> DiscreteMeasure:
    """Random atoms in robustly generic position.

    Torus supports keep every coordinate pair (and its half-shift) at least
    `separation` apart, so all position predicates hold with margin and the
    numeric limit window stays clear of foreign singular sets; sphere
    supports keep the same margin from each other and from all antipodes.
    Weights mix a Dirichlet draw with the uniform vector so no atom is
    lighter than 1/(2N).
    """
    if n_atoms is None:
        n_atoms = int(rng.integers(2, 9))
    if isinstance(manifold, Torus):
        columns = [_arc_coordinates(rng, n_atoms, separation) for _ in range(manifold.n)]
        points = np.stack(columns, axis=1)
    elif manifold.n == 1:
        angles = 2.0 * math.pi * _arc_coordinates(rng, n_atoms, separation)
        points = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    else:
        placed = []
        tries = 0
        while len(placed) < n_atoms:
            tries += 1
            if tries > max_tries:
                raise RuntimeError("could not place generic atoms; lower the separation")
            candidate = manifold.random_point(rng)
            if all(
                manifold.distance(candidate, q) > separation
                and manifold.distance(candidate, -q) > separation
                for q in placed
            ):
                placed.append(candidate)
        points = np.asarray(placed)
    weights = 0.5 * rng.dirichlet(np.ones(n_atoms)) + 0.5 / n_atoms
    weights = weights / weights.sum()
    return DiscreteMeasure(manifold, points, weights)


def _trial_rngs(seed: int, trials: int):
    return [np.random.default_rng([seed, t]) for t in range(trials)]


# --------------------------------------------------------------------------
# Cube barycenter and the two-Dirac segment law
# --------------------------------------------------------------------------


def unwrap_cube_support(mu: DiscreteMeasure):
    """Lift a torus support confined to a side <= 1/2 cube into R^n coordinates."""
    if not isinstance(mu.manifold, Torus):
        raise ValueError("cube unwrapping applies to torus measures")
    support = mu.support
    unwrapped = np.empty_like(support)
    for j in range(support.shape[1]):
        coords = np.sort(support[:, j])
        gaps = np.diff(coords, append=coords[0] + 1.0)
        cut = int(np.argmax(gaps))
        start = coords[(cut + 1) % len(coords)] if len(coords) > 1 else coords[0]
        lifted = start + (support[:, j] - start) % 1.0
        if lifted.max() - lifted.min() > 0.5 + 1e-9:
            raise ValueError(
                f"support spans {lifted.max() - lifted.min():.4f} on axis {j}; "
                "it does not fit a cube of side 1/2"
            )
        unwrapped[:, j] = lifted
    return unwrapped


def center_of_mass_and_deviation(mu: DiscreteMeasure):
    """(barycenter, standard deviation) of a cube-confined torus measure.

    The barycenter minimizes z -> W_2(delta_z, mu) over the cube, and the
    deviation is that minimal distance: sqrt(sum_k w_k |x_k - m|^2).
    """
    unwrapped = unwrap_cube_support(mu)
    m = unwrapped.T @ mu.weights
    sigma = float(np.sqrt(np.sum(mu.weights * np.sum((unwrapped - m) ** 2, axis=1))))
    return wrap_canonical(m), sigma


def dirac_segment_alpha_interval(eta: DiscreteMeasure, x, y):
    """The minimizers of alpha -> W_2(eta, alpha delta_x + (1-alpha) delta_y).

    Returns [eta(strictly closer to x), eta(weakly closer to x)]; mass on the
    bisector widens the interval.
    """
    manifold = eta.manifold
    if manifold.points_equal(x, y):
        raise ValueError("segment projection is undefined for x == y")
    lo = 0.0
    hi = 0.0
    for point, w in zip(eta.support, eta.weights):
        side = bisector_side(manifold, x, y, point)
        if side is BisectorSide.CLOSER_TO_X:
            lo += float(w)
            hi += float(w)
        elif side is BisectorSide.EQUIDISTANT:
            hi += float(w)
    return lo, hi


def segment_cost(eta: DiscreteMeasure, x, y, alpha: float) -> float:
    """W_2^2 from eta to alpha delta_x + (1 - alpha) delta_y."""
    if alpha <= 0.0:
        target = dirac(eta.manifold, y)
    elif alpha >= 1.0:
        target = dirac(eta.manifold, x)
    else:
        target = DiscreteMeasure(
            eta.manifold, np.stack([x, y]), np.array([alpha, 1.0 - alpha])
        )
    return solve_transport(eta, target, 2.0).cost


def segment_grid_minimizers(eta, x, y, step=1e-3, flat_tol=1e-9):
    alphas = np.arange(0.0, 1.0 + 0.5 * step, step)
    costs = np.array([segment_cost(eta, x, y, a) for a in alphas])
    best = float(np.min(costs))
    hits = alphas[costs <= best + flat_tol]
    return float(hits.min()), float(hits.max())


# --------------------------------------------------------------------------
# Suites
# --------------------------------------------------------------------------


def _suite_isometry(cfg: SuiteConfig):
    tol = cfg.tolerance("deviation")
    failures = []
    worst = 0.0
    for trial, rng in enumerate(_trial_rngs(cfg.seed, cfg.trials)):
        mu = random_generic_measure(cfg.manifold, rng)
        nu = random_generic_measure(cfg.manifold, rng)
        iso = random_isometry(cfg.manifold, rng.integers(0, 2**63))
        before = solve_transport(mu, nu, cfg.p).distance
        after = solve_transport(pushforward(iso, mu), pushforward(iso, nu), cfg.p).distance
        deviation = abs(before - after)
        worst = max(worst, deviation)
        if deviation > tol:
            failures.append(
                SuiteFailure(trial, "push-forward changed W_p", deviation, 0.0, tol)
            )
    return failures, {"worst_deviation": worst}


def _suite_injectivity(cfg: SuiteConfig):
    gap_tol = cfg.tolerance("gap")
    sep_tol = cfg.tolerance("separation")
    match_tol = cfg.tolerance("match")
    distinct_tol = cfg.tolerance("distinction")
    p_recovery = cfg.p if cfg.p != 2.0 else 1.5
    grid = grid_points(cfg.manifold, 64)
    failures = []
    smallest_gap = np.inf
    for trial, rng in enumerate(_trial_rngs(cfg.seed, cfg.trials)):
        mu = random_generic_measure(cfg.manifold, rng)
        nu = random_generic_measure(cfg.manifold, rng)
        while solve_transport(mu, nu, 1.0).distance < sep_tol:
            nu = random_generic_measure(cfg.manifold, rng)
        gap = float(
            np.max(
                np.abs(
                    ClosedFormPotential(mu, cfg.p).evaluate(grid)
                    - ClosedFormPotential(nu, cfg.p).evaluate(grid)
                )
            )
        )
        smallest_gap = min(smallest_gap, gap)
        if gap <= gap_tol:
            failures.append(
                SuiteFailure(trial, "potentials coincide on the probe grid", gap, 1.0, gap_tol)
            )
            continue
        # masses recovered from nu's potential at mu's sites must be nu's
        # (zero at foreign sites), not mu's
        oracle_nu = ClosedFormPotential(nu, p_recovery)
        if isinstance(cfg.manifold, Torus):
            recovered = recover_torus_weights(oracle_nu, mu.support).masses
        else:
            recovered = recover_sphere_weights(oracle_nu, mu.support).masses
        expected = np.array([nu.atom_mass(site) for site in mu.support])
        err = float(np.max(np.abs(recovered - expected)))
        if err > match_tol:
            failures.append(
                SuiteFailure(trial, "recovery at foreign sites is not nu's mass", err, 0.0, match_tol)
            )
        confusion = float(np.max(np.abs(recovered - mu.weights)))
        if confusion <= distinct_tol:
            failures.append(
                SuiteFailure(
                    trial, "recovery could be mistaken for mu's weights", confusion, 1.0, distinct_tol
                )
            )
    return failures, {"smallest_gap": float(smallest_gap)}


def _suite_diameter(cfg: SuiteConfig):
    dirac_tol = cfg.tolerance("dirac")
    margin_tol = cfg.tolerance("margin")
    bound = cfg.manifold.diameter
    grid = grid_points(cfg.manifold, 64)
    failures = []
    min_margin = np.inf
    for trial, rng in enumerate(_trial_rngs(cfg.seed, cfg.trials)):
        x = cfg.manifold.random_point(rng)
        attained = solve_transport(
            dirac(cfg.manifold, x), dirac(cfg.manifold, cfg.manifold.antipode(x)), cfg.p
        ).distance
        if abs(attained - bound) > dirac_tol:
            failures.append(
                SuiteFailure(trial, "antipodal Diracs miss the diameter", attained, bound, dirac_tol)
            )
        mu = random_generic_measure(cfg.manifold, rng)
        sup_grid = float(
            np.max(ClosedFormPotential(mu, cfg.p).evaluate(grid)) ** (1.0 / cfg.p)
        )
        margin = bound - sup_grid
        min_margin = min(min_margin, margin)
        if margin <= margin_tol:
            failures.append(
                SuiteFailure(
                    trial, "non-Dirac measure reaches the diameter", sup_grid, bound, margin_tol
                )
            )
    return failures, {"diameter": bound, "min_margin": float(min_margin)}


_MISMATCH = 1e300  # sentinel kept finite so reports stay serializable


def _compare_marginals(recovered, direct):
    """Largest (location, weight) mismatch between two circle measures."""
    if recovered.n_atoms != direct.n_atoms:
        return _MISMATCH, _MISMATCH
    rec_order = np.argsort(recovered.support[:, 0])
    dir_order = np.argsort(direct.support[:, 0])
    dir_pts = direct.support[dir_order, 0]
    # sorted lists may be rotated against each other across the wrap point
    best = (_MISMATCH, _MISMATCH)
    for shift in range(len(rec_order)):
        rolled = np.roll(rec_order, shift)
        locs = float(np.max(circle_distance(recovered.support[rolled, 0], dir_pts)))
        ws = float(np.max(np.abs(recovered.weights[rolled] - direct.weights[dir_order])))
        if locs < best[0]:
            best = (locs, ws)
    return best


def _suite_marginals(cfg: SuiteConfig):
    w_tol = cfg.tolerance("weights")
    loc_tol = cfg.tolerance("locations")
    if not isinstance(cfg.manifold, Torus) or cfg.manifold.n < 2:
        raise ValueError("the marginals suite needs a torus of dimension >= 2")
    failures = []
    worst = 0.0
    for trial, rng in enumerate(_trial_rngs(cfg.seed, cfg.trials)):
        mu = random_generic_measure(cfg.manifold, rng, n_atoms=int(rng.integers(2, 6)))
        oracle = ClosedFormPotential(mu, 2.0)
        recovered = recover_torus_marginals_p2(oracle)
        for axis in range(cfg.manifold.n):
            direct = marginal(mu, axis)
            loc_err, w_err = _compare_marginals(recovered[axis], direct)
            worst = max(worst, w_err)
            if loc_err > loc_tol or w_err > w_tol:
                failures.append(
                    SuiteFailure(
                        trial,
                        f"axis {axis} marginal mismatch (loc {loc_err:.2e})",
                        w_err,
                        0.0,
                        w_tol,
                    )
                )
    return failures, {"worst_weight_error": worst}


def _suite_recovery(cfg: SuiteConfig):
    closed_tol = cfg.tolerance("closed_form")
    marg_tol = cfg.tolerance("marginals")
    failures = []
    worst = 0.0
    cases = [(Torus(2), p) for p in (1.0, 1.5, 2.0, 2.5)]
    cases += [(Sphere(2), p) for p in (1.0, 1.5, 2.0, 2.5)]
    for trial, rng in enumerate(_trial_rngs(cfg.seed, cfg.trials)):
        for manifold, p in cases:
            mu = random_generic_measure(manifold, rng, n_atoms=int(rng.integers(2, 6)))
            oracle = ClosedFormPotential(mu, p)
            if isinstance(manifold, Torus) and p == 2.0:
                recovered = recover_torus_marginals_p2(oracle)
                for axis in range(manifold.n):
                    direct = marginal(mu, axis)
                    loc_err, w_err = _compare_marginals(recovered[axis], direct)
                    if loc_err > marg_tol or w_err > marg_tol:
                        failures.append(
                            SuiteFailure(
                                trial,
                                f"T^2 p=2 marginal axis {axis}",
                                max(loc_err, w_err),
                                0.0,
                                marg_tol,
                            )
                        )
                continue
            if isinstance(manifold, Torus):
                result = recover_torus_weights(oracle, mu.support)
            else:
                result = recover_sphere_weights(oracle, mu.support)
            err = float(np.max(np.abs(result.masses - mu.weights)))
            worst = max(worst, err)
            if err > closed_tol:
                failures.append(
                    SuiteFailure(
                        trial,
                        f"{manifold.kind} p={p} closed-form round trip",
                        err,
                        0.0,
                        closed_tol,
                    )
                )
    return failures, {"worst_weight_error": worst}


def _suite_segment(cfg: SuiteConfig):
    tol = cfg.tolerance("interval")
    failures = []
    worst = 0.0
    for trial, rng in enumerate(_trial_rngs(cfg.seed, cfg.trials)):
        eta = random_generic_measure(cfg.manifold, rng)
        x = cfg.manifold.random_point(rng)
        y = cfg.manifold.random_point(rng)
        while cfg.manifold.distance(x, y) < 0.05:
            y = cfg.manifold.random_point(rng)
        lo, hi = dirac_segment_alpha_interval(eta, x, y)
        grid_lo, grid_hi = segment_grid_minimizers(eta, x, y)
        err = max(abs(lo - grid_lo), abs(hi - grid_hi))
        worst = max(worst, err)
        if err > tol:
            failures.append(
                SuiteFailure(trial, "alpha interval disagrees with grid search", err, 0.0, tol)
            )
    return failures, {"worst_interval_error": worst}


def _suite_fourier(cfg: SuiteConfig):
    closed_tol = cfg.tolerance("closed")
    identity_tol = cfg.tolerance("identity")
    roundtrip_tol = cfg.tolerance("roundtrip")
    failures = []

    worst_closed = 0.0
    for p in (1.0, 2.0):
        for j in range(0, 17):
            err = abs(cost_coeff_quadrature(p, j) - cost_coeff_closed(p, j))
            worst_closed = max(worst_closed, err)
    if worst_closed > closed_tol:
        failures.append(
            SuiteFailure(0, "quadrature disagrees with closed forms", worst_closed, 0.0, closed_tol)
        )

    scan = nonvanishing_scan(1.0, 8)
    expected_zeros = tuple(sorted(j for j in range(-8, 9) if j != 0 and j % 2 == 0))
    if scan.zeros != expected_zeros:
        failures.append(SuiteFailure(0, "p=1 zero set is not the nonzero evens", 0.0, 1.0, 0.0))

    circle = Torus(1)
    worst_identity = 0.0
    worst_roundtrip = 0.0
    for trial, rng in enumerate(_trial_rngs(cfg.seed, max(1, cfg.trials // 4))):
        mu = random_generic_measure(circle, rng, n_atoms=int(rng.integers(2, 5)))
        for p in (1.0, 1.5, 2.0):
            err = convolution_identity_check(mu, p, jmax=16)
            worst_identity = max(worst_identity, err)
            if err > identity_tol:
                failures.append(
                    SuiteFailure(trial, f"convolution identity p={p}", err, 0.0, identity_tol)
                )
        oracle = SampledPotential.from_measure(mu, 2.0, 1 << 15)
        recovered = fourier_recover(oracle, 16)
        err = max(
            abs(recovered[j] - measure_transform(mu, [j])) for j in range(-16, 17)
        )
        worst_roundtrip = max(worst_roundtrip, err)
        if err > roundtrip_tol:
            failures.append(
                SuiteFailure(trial, "fourier recovery round trip", err, 0.0, roundtrip_tol)
            )
    return failures, {
        "worst_closed_form_error": worst_closed,
        "worst_identity_error": worst_identity,
        "worst_roundtrip_error": float(worst_roundtrip),
    }


_SUITES = {
    "isometry": _suite_isometry,
    "injectivity": _suite_injectivity,
    "diameter": _suite_diameter,
    "marginals": _suite_marginals,
    "recovery": _suite_recovery,
    "segment": _suite_segment,
    "fourier": _suite_fourier,
}


def run_suite(cfg: SuiteConfig) -> SuiteReport:
    if cfg.suite not in _SUITES:
        raise ValueError(f"unknown suite {cfg.suite!r}; choose from {sorted(_SUITES)}")
    if cfg.trials < 1:
        raise ValueError("trials must be >= 1")
    failures, details = _SUITES[cfg.suite](cfg)
    return SuiteReport(
        suite=cfg.suite,
        trials_run=cfg.trials,
        failures=tuple(failures),
        passed=not failures,
        details=details,
    )


def default_configs(seed: int = 7, manifold: Manifold | None = None) -> list:
    """One config per suite with the documented default trial counts."""
    torus = manifold if isinstance(manifold, Torus) else Torus(2)
    sphere = manifold if isinstance(manifold, Sphere) else Sphere(2)
    return [
        SuiteConfig("isometry", torus, p=2.0, trials=100, seed=seed),
        SuiteConfig("injectivity", torus, p=2.0, trials=100, seed=seed),
        SuiteConfig("diameter", torus, p=2.0, trials=50, seed=seed),
        SuiteConfig("diameter", sphere, p=2.0, trials=50, seed=seed),
        SuiteConfig("marginals", torus, p=2.0, trials=10, seed=seed),
        SuiteConfig("recovery", torus, p=2.0, trials=5, seed=seed),
        SuiteConfig("segment", torus, p=2.0, trials=10, seed=seed),
        SuiteConfig("fourier", Torus(1), p=2.0, trials=8, seed=seed),
    ]
