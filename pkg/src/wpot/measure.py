"""Finitely supported probability measures and their generic-position predicates."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError, ResourceLimitError, ValidationError
from .manifold import (
    Isometry,
    Manifold,
    Sphere,
    Torus,
    circle_distance,
    manifold_from_kind,
    wrap_canonical,
)

WEIGHT_SUM_TOL = 1e-12
SUPPORT_SEPARATION = 1e-10
PREDICATE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """A probability measure w_1*delta_{x_1} + ... + w_N*delta_{x_N}.

    Support points are stored row-wise (canonicalized for the torus,
    renormalized for the sphere); weights are positive and sum to one.
    """

    manifold: Manifold
    support: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        support = np.atleast_2d(np.asarray(self.support, dtype=float))
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if isinstance(self.manifold, Torus):
            support = wrap_canonical(support)
        else:
            norms = np.linalg.norm(support, axis=1, keepdims=True)
            if np.any(norms == 0.0):
                raise ValidationError("zero vector cannot be normalized to a sphere point")
            support = support / norms
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "weights", weights)
        validate_measure(self)

    @property
    def n_atoms(self) -> int:
        return self.support.shape[0]

    def atom_mass(self, x, tol=SUPPORT_SEPARATION) -> float:
        """Total weight within distance tol of the point x."""
        d = self.manifold.pairwise_distance(self.support, np.asarray(x, dtype=float)[None, :])
        return float(np.sum(self.weights[d[:, 0] <= tol]))

    def to_json_dict(self) -> dict:
        return {
            "manifold": self.manifold.kind,
            "n": self.manifold.n,
            "support": [[float(v) for v in row] for row in self.support],
            "weights": [float(w) for w in self.weights],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "DiscreteMeasure":
        try:
            manifold = manifold_from_kind(data["manifold"], int(data["n"]))
            support = np.asarray(data["support"], dtype=float)
            weights = np.asarray(data["weights"], dtype=float)
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed measure object: {exc}") from exc
        return cls(manifold, support, weights)


def dirac(manifold: Manifold, x) -> DiscreteMeasure:
    return DiscreteMeasure(manifold, np.asarray(x, dtype=float)[None, :], np.array([1.0]))


def validate_measure(mu: DiscreteMeasure) -> None:
    """Raise ValidationError naming the violated invariant, if any."""
    support, weights = mu.support, mu.weights
    if support.ndim != 2 or support.shape[0] != weights.shape[0]:
        raise ValidationError(
            f"support/weights shapes {support.shape}/{weights.shape} are inconsistent"
        )
    if support.shape[0] == 0:
        raise ValidationError("measure must have at least one atom")
    if support.shape[1] != mu.manifold.point_dim:
        raise ValidationError(
            f"support dimension {support.shape[1]} does not match {mu.manifold.kind} "
            f"n={mu.manifold.n}"
        )
    if not np.all(np.isfinite(support)) or not np.all(np.isfinite(weights)):
        raise ValidationError("support or weights contain non-finite values")
    if np.any(weights < 0):
        bad = int(np.argmax(weights < 0))
        raise ValidationError(f"negative weight {weights[bad]} at index {bad}")
    if np.any(weights == 0):
        bad = [int(i) for i in np.nonzero(weights == 0)[0]]
        raise ValidationError(f"zero-weight atoms at indices {bad}")
    total = float(np.sum(weights))
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise ValidationError(f"weights sum {total!r}, expected 1 within {WEIGHT_SUM_TOL}")
    if isinstance(mu.manifold, Sphere):
        norms = np.linalg.norm(support, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise ValidationError("sphere support points are not unit length")
    if support.shape[0] > 1:
        dist = mu.manifold.pairwise_distance(support, support)
        np.fill_diagonal(dist, np.inf)
        close = np.argwhere(np.triu(dist <= SUPPORT_SEPARATION, k=1))
        if close.size:
            pairs = [(int(i), int(j)) for i, j in close]
            raise ValidationError(f"duplicate support points at index pairs {pairs}")


def pushforward(iso: Isometry, mu: DiscreteMeasure) -> DiscreteMeasure:
    """Image measure of mu under the isometry; weights are untouched."""
    if isinstance(mu.manifold, Torus):
        if not hasattr(iso, "sigma") or iso.n != mu.manifold.n:
            raise ValueError("isometry does not act on this torus")
    else:
        if not hasattr(iso, "matrix") or iso.n != mu.manifold.n:
            raise ValueError("isometry does not act on this sphere")
    return DiscreteMeasure(mu.manifold, iso.apply_many(mu.support), mu.weights.copy())


def marginal(mu: DiscreteMeasure, axis: int) -> DiscreteMeasure:
    """Push-forward of a torus measure under the projection to coordinate `axis`.

    Support values whose circle distance is below the 1e-10 separation
    threshold are merged, so wrap-around representations of one coordinate
    collapse to a single atom.
    """
    if not isinstance(mu.manifold, Torus):
        raise ValueError("marginals are defined for torus measures only")
    if not 0 <= axis < mu.manifold.n:
        raise ValueError(f"axis {axis} out of range for T^{mu.manifold.n}")
    coords = mu.support[:, axis]
    order = np.argsort(coords)
    sorted_coords = coords[order]
    sorted_weights = mu.weights[order]

    # cluster circularly: adjacent gaps <= tol merge, including the wrap gap
    clusters = [[0]]
    for i in range(1, len(sorted_coords)):
        if sorted_coords[i] - sorted_coords[i - 1] <= SUPPORT_SEPARATION:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    if len(clusters) > 1:
        wrap_gap = (sorted_coords[0] + 1.0) - sorted_coords[-1]
        if wrap_gap <= SUPPORT_SEPARATION:
            clusters[0] = clusters.pop() + clusters[0]

    points = []
    weights = []
    for cluster in clusters:
        w = float(np.sum(sorted_weights[cluster]))
        ref = sorted_coords[cluster[0]]
        # unwrap members around the first element before weight-averaging
        vals = ref + wrap_canonical(sorted_coords[cluster] - ref)
        points.append(float(np.sum(vals * sorted_weights[cluster]) / w))
        weights.append(w)
    support = wrap_canonical(np.asarray(points))[:, None]
    return DiscreteMeasure(Torus(1), support, np.asarray(weights))


# --------------------------------------------------------------------------
# Generic-position predicates
# --------------------------------------------------------------------------


class PositionPredicate(enum.Enum):
    NO_ANTIPODAL_PAIRS = "no_antipodal_pairs"
    AVOIDS_ANTIPODAL_HYPERPLANES = "avoids_antipodal_hyperplanes"
    DISTINCT_FIRST_COORDINATES = "distinct_first_coordinates"


@dataclass(frozen=True)
class PositionReport:
    predicate: PositionPredicate
    holds: bool
    witnesses: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.holds != (len(self.witnesses) == 0):
            raise ValidationError("holds flag inconsistent with witness list")


def check_points_position(
    manifold: Manifold, points, predicate: PositionPredicate, tol=PREDICATE_TOL
) -> PositionReport:
    """Check a generic-position predicate on a bare point set."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    witnesses = []
    if predicate is PositionPredicate.NO_ANTIPODAL_PAIRS:
        if not isinstance(manifold, Sphere):
            raise ValueError("no_antipodal_pairs applies to sphere point sets")
        dist = manifold.pairwise_distance(points, -points)
        for k, l in np.argwhere(dist <= tol):
            if k <= l:
                witnesses.append((int(k), int(l)))
    elif predicate is PositionPredicate.AVOIDS_ANTIPODAL_HYPERPLANES:
        if not isinstance(manifold, Torus):
            raise ValueError("avoids_antipodal_hyperplanes applies to torus point sets")
        for j in range(manifold.n):
            col = points[:, j]
            gap = circle_distance(col[None, :], col[:, None] + 0.5)
            for k, l in np.argwhere(gap <= tol):
                witnesses.append((int(k), int(l)))
    elif predicate is PositionPredicate.DISTINCT_FIRST_COORDINATES:
        if not isinstance(manifold, Torus):
            raise ValueError("distinct_first_coordinates applies to torus point sets")
        col = points[:, 0]
        gap = circle_distance(col[None, :], col[:, None])
        np.fill_diagonal(gap, np.inf)
        for k, l in np.argwhere(gap <= tol):
            if k < l:
                witnesses.append((int(k), int(l)))
    else:  # pragma: no cover
        raise ValueError(f"unknown predicate {predicate}")
    witnesses = tuple(sorted(set(witnesses)))
    return PositionReport(predicate, len(witnesses) == 0, witnesses)


def check_position(
    mu: DiscreteMeasure, predicate: PositionPredicate, tol=PREDICATE_TOL
) -> PositionReport:
    return check_points_position(mu.manifold, mu.support, predicate, tol=tol)


def perturb_to_generic(
    mu: DiscreteMeasure, predicate: PositionPredicate, seed, max_attempts=1000
) -> DiscreteMeasure:
    """Jitter support points (by at most 1e-4 each) until the predicate holds.

    Weights are unchanged; the result is deterministic given the seed.  The
    Wasserstein distance between input and output is bounded by the largest
    jitter, hence by 1e-4.
    """
    if check_position(mu, predicate).holds:
        return mu
    rng = np.random.default_rng(seed)
    scale = 1e-7
    for _ in range(max_attempts):
        if isinstance(mu.manifold, Torus):
            moved = wrap_canonical(
                mu.support + rng.uniform(-scale, scale, size=mu.support.shape)
            )
        else:
            step = rng.normal(size=mu.support.shape)
            step -= np.sum(step * mu.support, axis=1, keepdims=True) * mu.support
            norms = np.linalg.norm(step, axis=1, keepdims=True)
            norms[norms == 0.0] = 1.0
            moved = mu.support + scale * step / norms
            moved /= np.linalg.norm(moved, axis=1, keepdims=True)
        try:
            candidate = DiscreteMeasure(mu.manifold, moved, mu.weights.copy())
        except ValidationError:
            continue
        if check_position(candidate, predicate).holds:
            return candidate
        scale = min(scale * 2.0, 9e-5)
    raise ResourceLimitError(
        f"could not reach generic position for {predicate.value} in {max_attempts} attempts"
    )


def require_position(manifold, points, predicate: PositionPredicate) -> None:
    report = check_points_position(manifold, points, predicate)
    if not report.holds:
        raise PreconditionError(
            f"{predicate.value} fails at index pairs {list(report.witnesses)}"
        )
