"""Geometry of the flat torus T^n and the round unit sphere S^n.

Points are plain float64 numpy arrays: torus points hold n canonical
coordinates in [-1/2, 1/2), sphere points hold n+1 coordinates of unit
Euclidean norm.  The manifold objects canonicalize, measure and validate
points; isometries are value objects that act on points.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

POINT_TOL = 1e-12


def _as_float_vector(coords, name="point"):
    arr = np.asarray(coords, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a 1-d vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def wrap_canonical(coords):
    """Wrap real coordinates into the canonical torus interval [-1/2, 1/2)."""
    return (np.asarray(coords, dtype=float) + 0.5) % 1.0 - 0.5


def circle_distance(a, b):
    """Distance on the unit-circumference circle R/Z (elementwise)."""
    d = np.abs(wrap_canonical(np.asarray(a, dtype=float) - b))
    return d


@dataclass(frozen=True)
class Torus:
    """The flat torus R^n/Z^n with the quotient Euclidean metric."""

    n: int

    kind = "torus"

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError(f"torus dimension must be >= 1, got {self.n}")

    @property
    def point_dim(self) -> int:
        return self.n

    @property
    def diameter(self) -> float:
        return math.sqrt(self.n) / 2.0

    def point(self, coords) -> np.ndarray:
        x = _as_float_vector(coords)
        if x.size != self.n:
            raise ValueError(f"expected {self.n} coordinates, got {x.size}")
        return wrap_canonical(x)

    def check_point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"point shape {x.shape} does not match T^{self.n}")
        return x

    def distance(self, x, y) -> float:
        x = self.check_point(x)
        y = self.check_point(y)
        r = wrap_canonical(x - y)
        return float(np.sqrt(np.sum(r * r)))

    def pairwise_distance(self, X, Y) -> np.ndarray:
        """Distance matrix between rows of X (m, n) and rows of Y (k, n)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        r = wrap_canonical(X[:, None, :] - Y[None, :, :])
        return np.sqrt(np.sum(r * r, axis=2))

    def antipode(self, x) -> np.ndarray:
        return wrap_canonical(self.check_point(x) + 0.5)

    def points_equal(self, x, y, tol=POINT_TOL) -> bool:
        return bool(np.all(circle_distance(self.check_point(x), self.check_point(y)) <= tol))

    def random_point(self, rng) -> np.ndarray:
        return wrap_canonical(rng.uniform(-0.5, 0.5, size=self.n))


@dataclass(frozen=True)
class Sphere:
    """The unit sphere S^n in R^{n+1} with the angular (geodesic) metric."""

    n: int

    kind = "sphere"

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError(f"sphere dimension must be >= 1, got {self.n}")

    @property
    def point_dim(self) -> int:
        return self.n + 1

    @property
    def diameter(self) -> float:
        return math.pi

    def point(self, coords) -> np.ndarray:
        x = _as_float_vector(coords)
        if x.size != self.n + 1:
            raise ValueError(f"expected {self.n + 1} coordinates, got {x.size}")
        norm = float(np.linalg.norm(x))
        if norm == 0.0:
            raise ValueError("cannot normalize the zero vector to a sphere point")
        return x / norm

    def check_point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n + 1,):
            raise ValueError(f"point shape {x.shape} does not match S^{self.n}")
        if abs(float(np.linalg.norm(x)) - 1.0) > 1e-12:
            raise ValidationError("sphere point is not unit length")
        return x

    def distance(self, x, y) -> float:
        # atan2 form of arccos<x,y>: identical value, but keeps full
        # precision at near-antipodal pairs where arccos loses ~8 digits.
        x = self.check_point(x)
        y = self.check_point(y)
        sin_term = 0.5 * float(np.linalg.norm(x - y)) * float(np.linalg.norm(x + y))
        cos_term = float(np.clip(x @ y, -1.0, 1.0))
        return float(math.atan2(sin_term, cos_term))

    def pairwise_distance(self, X, Y) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        diff = np.linalg.norm(X[:, None, :] - Y[None, :, :], axis=2)
        summ = np.linalg.norm(X[:, None, :] + Y[None, :, :], axis=2)
        cos_term = np.clip(X @ Y.T, -1.0, 1.0)
        return np.arctan2(0.5 * diff * summ, cos_term)

    def antipode(self, x) -> np.ndarray:
        return -self.check_point(x)

    def points_equal(self, x, y, tol=POINT_TOL) -> bool:
        return bool(np.linalg.norm(self.check_point(x) - self.check_point(y)) <= tol)

    def random_point(self, rng) -> np.ndarray:
        v = rng.normal(size=self.n + 1)
        return v / np.linalg.norm(v)


Manifold = Torus | Sphere


def manifold_from_kind(kind: str, n: int) -> Manifold:
    if kind == "torus":
        return Torus(n)
    if kind == "sphere":
        return Sphere(n)
    raise ValueError(f"unknown manifold kind {kind!r}")


# --------------------------------------------------------------------------
# Isometries
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TorusIsometry:
    """Signed coordinate permutation plus translation: y_k = eps_k * x_{sigma(k)} + u_k."""

    sigma: tuple
    eps: tuple
    shift: np.ndarray

    def __post_init__(self):
        n = len(self.sigma)
        object.__setattr__(self, "sigma", tuple(int(s) for s in self.sigma))
        object.__setattr__(self, "eps", tuple(int(e) for e in self.eps))
        object.__setattr__(self, "shift", wrap_canonical(np.asarray(self.shift, dtype=float)))
        if sorted(self.sigma) != list(range(n)):
            raise ValidationError(f"sigma {self.sigma} is not a permutation of 0..{n - 1}")
        if len(self.eps) != n or any(e not in (-1, 1) for e in self.eps):
            raise ValidationError("eps entries must be +1 or -1")
        if self.shift.shape != (n,):
            raise ValidationError("translation length does not match permutation size")

    @property
    def n(self) -> int:
        return len(self.sigma)

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise ValueError(f"point shape {x.shape} does not match isometry on T^{self.n}")
        eps = np.array(self.eps, dtype=float)
        return wrap_canonical(eps * x[list(self.sigma)] + self.shift)

    def apply_many(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        eps = np.array(self.eps, dtype=float)
        return wrap_canonical(eps[None, :] * X[:, list(self.sigma)] + self.shift[None, :])

    def inverse(self) -> "TorusIsometry":
        n = self.n
        inv_sigma = [0] * n
        for k, s in enumerate(self.sigma):
            inv_sigma[s] = k
        eps = [self.eps[inv_sigma[m]] for m in range(n)]
        shift = np.array([-self.eps[inv_sigma[m]] * self.shift[inv_sigma[m]] for m in range(n)])
        return TorusIsometry(tuple(inv_sigma), tuple(eps), shift)

    def compose(self, other: "TorusIsometry") -> "TorusIsometry":
        """Return self after other: (self.compose(other)).apply(x) == self.apply(other.apply(x))."""
        if self.n != other.n:
            raise ValueError("cannot compose isometries of different dimensions")
        sigma = tuple(other.sigma[self.sigma[k]] for k in range(self.n))
        eps = tuple(self.eps[k] * other.eps[self.sigma[k]] for k in range(self.n))
        shift = np.array(
            [self.eps[k] * other.shift[self.sigma[k]] + self.shift[k] for k in range(self.n)]
        )
        return TorusIsometry(sigma, eps, shift)

    def to_json_dict(self) -> dict:
        return {
            "sigma": list(self.sigma),
            "eps": list(self.eps),
            "u": [float(v) for v in self.shift],
        }

    @classmethod
    def identity(cls, n: int) -> "TorusIsometry":
        return cls(tuple(range(n)), (1,) * n, np.zeros(n))

    @classmethod
    def from_json_dict(cls, data: dict) -> "TorusIsometry":
        return cls(tuple(data["sigma"]), tuple(data["eps"]), np.asarray(data["u"], dtype=float))


@dataclass(frozen=True, eq=False)
class SphereIsometry:
    """Restriction of an orthogonal map of R^{n+1} to the sphere."""

    matrix: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.matrix, dtype=float)
        object.__setattr__(self, "matrix", q)
        if q.ndim != 2 or q.shape[0] != q.shape[1] or q.shape[0] < 2:
            raise ValidationError(f"orthogonal matrix must be square of size >= 2, got {q.shape}")
        if not np.allclose(q.T @ q, np.eye(q.shape[0]), atol=1e-10, rtol=0.0):
            raise ValidationError("matrix is not orthogonal within 1e-10")

    @property
    def n(self) -> int:
        return self.matrix.shape[0] - 1

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.matrix.shape[0],):
            raise ValueError(f"point shape {x.shape} does not match isometry on S^{self.n}")
        y = self.matrix @ x
        return y / np.linalg.norm(y)

    def apply_many(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Y = X @ self.matrix.T
        return Y / np.linalg.norm(Y, axis=1, keepdims=True)

    def inverse(self) -> "SphereIsometry":
        return SphereIsometry(self.matrix.T.copy())

    def compose(self, other: "SphereIsometry") -> "SphereIsometry":
        if self.matrix.shape != other.matrix.shape:
            raise ValueError("cannot compose isometries of different dimensions")
        return SphereIsometry(self.matrix @ other.matrix)

    def to_json_dict(self) -> dict:
        return {"Q": [[float(v) for v in row] for row in self.matrix]}

    @classmethod
    def identity(cls, n: int) -> "SphereIsometry":
        return cls(np.eye(n + 1))

    @classmethod
    def from_json_dict(cls, data: dict) -> "SphereIsometry":
        return cls(np.asarray(data["Q"], dtype=float))


Isometry = TorusIsometry | SphereIsometry


def isometry_from_json_dict(data: dict) -> Isometry:
    if "Q" in data:
        return SphereIsometry.from_json_dict(data)
    return TorusIsometry.from_json_dict(data)


def random_isometry(manifold: Manifold, seed) -> Isometry:
    """Draw an isometry uniformly; deterministic for a fixed seed."""
    rng = np.random.default_rng(seed)
    if isinstance(manifold, Torus):
        n = manifold.n
        sigma = tuple(int(v) for v in rng.permutation(n))
        eps = tuple(int(v) for v in rng.choice([-1, 1], size=n))
        shift = rng.uniform(-0.5, 0.5, size=n)
        return TorusIsometry(sigma, eps, shift)
    d = manifold.n + 1
    # QR of a Gaussian matrix with the R-diagonal sign fix gives Haar measure.
    g = rng.normal(size=(d, d))
    q, r = np.linalg.qr(g)
    q = q * np.sign(np.diag(r))[None, :]
    return SphereIsometry(q)


def apply_isometry(manifold: Manifold, iso: Isometry, x) -> np.ndarray:
    if isinstance(manifold, Torus) != isinstance(iso, TorusIsometry):
        raise ValueError("isometry kind does not match manifold kind")
    return iso.apply(manifold.check_point(x))


def sphere_tangent_direction(x, seed) -> np.ndarray:
    """A unit vector orthogonal to the sphere point x; deterministic per seed."""
    x = np.asarray(x, dtype=float)
    rng = np.random.default_rng(seed)
    for _ in range(64):
        v = rng.normal(size=x.size)
        v = v - (v @ x) * x
        norm = float(np.linalg.norm(v))
        if norm > 1e-8:
            return v / norm
    raise RuntimeError("failed to draw a tangent direction")  # pragma: no cover


class BisectorSide(enum.Enum):
    CLOSER_TO_X = "closer_to_x"
    EQUIDISTANT = "equidistant"
    CLOSER_TO_Y = "closer_to_y"


def bisector_side(manifold: Manifold, x, y, z, tol=POINT_TOL) -> BisectorSide:
    """Classify z by the sign of d(x, z) - d(y, z); ties within tol are EQUIDISTANT."""
    if manifold.points_equal(x, y):
        raise ValueError("bisector is undefined for x == y")
    gap = manifold.distance(x, z) - manifold.distance(y, z)
    if abs(gap) <= tol:
        return BisectorSide.EQUIDISTANT
    return BisectorSide.CLOSER_TO_X if gap < 0 else BisectorSide.CLOSER_TO_Y
