"""Exact p-Wasserstein distances between discrete measures.

solve_transport runs a transportation-specialized network simplex on the
dense geodesic cost matrix; brute_force_transport independently enumerates
permutation couplings or basic feasible solutions for tiny instances.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InvalidCouplingError, ResourceLimitError
from .measure import DiscreteMeasure

MARGINAL_TOL = 1e-10
COUPLING_CHECK_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Coupling:
    """Nonnegative mass matrix with prescribed row and column sums."""

    mass: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mass, dtype=float)
        object.__setattr__(self, "mass", m)
        if m.ndim != 2:
            raise InvalidCouplingError(f"coupling must be a matrix, got shape {m.shape}")
        if np.any(m < -MARGINAL_TOL):
            raise InvalidCouplingError("coupling has negative entries")

    @property
    def rows(self) -> int:
        return self.mass.shape[0]

    @property
    def cols(self) -> int:
        return self.mass.shape[1]

    def row_sums(self) -> np.ndarray:
        return self.mass.sum(axis=1)

    def col_sums(self) -> np.ndarray:
        return self.mass.sum(axis=0)

    def to_sparse_triples(self, floor=0.0):
        return [
            (int(i), int(j), float(self.mass[i, j]))
            for i, j in np.argwhere(self.mass > floor)
        ]


@dataclass(frozen=True, eq=False)
class TransportResult:
    distance: float
    cost: float
    coupling: Coupling
    p: float

    def to_json_dict(self) -> dict:
        return {
            "p": float(self.p),
            "distance": float(self.distance),
            "cost": float(self.cost),
            "rows": self.coupling.rows,
            "cols": self.coupling.cols,
            "coupling": [[i, j, v] for i, j, v in self.coupling.to_sparse_triples()],
        }


def _check_compatible(mu: DiscreteMeasure, nu: DiscreteMeasure, p: float):
    if mu.manifold != nu.manifold:
        raise ValueError(
            f"measures live on different manifolds: {mu.manifold} vs {nu.manifold}"
        )
    if p < 1:
        raise ValueError(f"transport exponent must satisfy p >= 1, got {p}")


def cost_matrix(mu: DiscreteMeasure, nu: DiscreteMeasure, p: float) -> np.ndarray:
    return mu.manifold.pairwise_distance(mu.support, nu.support) ** p


def coupling_cost(pi: Coupling, mu: DiscreteMeasure, nu: DiscreteMeasure, p: float) -> float:
    """Transport cost of pi: sum of mass[i,j] * d(x_i, y_j)^p."""
    _check_compatible(mu, nu, p)
    if pi.mass.shape != (mu.n_atoms, nu.n_atoms):
        raise InvalidCouplingError(
            f"coupling shape {pi.mass.shape} does not match supports "
            f"({mu.n_atoms}, {nu.n_atoms})"
        )
    if np.max(np.abs(pi.row_sums() - mu.weights)) > COUPLING_CHECK_TOL:
        raise InvalidCouplingError("row sums deviate from the first marginal")
    if np.max(np.abs(pi.col_sums() - nu.weights)) > COUPLING_CHECK_TOL:
        raise InvalidCouplingError("column sums deviate from the second marginal")
    return float(np.sum(pi.mass * cost_matrix(mu, nu, p)))


def independent_coupling(mu: DiscreteMeasure, nu: DiscreteMeasure) -> Coupling:
    return Coupling(np.outer(mu.weights, nu.weights))


# --------------------------------------------------------------------------
# Network simplex for the transportation problem
# --------------------------------------------------------------------------


def _northwest_corner(a, b):
    n, m = len(a), len(b)
    x = np.zeros((n, m))
    basis = []
    arem = a.copy()
    brem = b.copy()
    i = j = 0
    for _ in range(n + m - 1):
        basis.append((i, j))
        t = min(arem[i], brem[j])
        x[i, j] = t
        arem[i] -= t
        brem[j] -= t
        if i == n - 1:
            j += 1
        elif j == m - 1:
            i += 1
        elif arem[i] <= brem[j]:
            i += 1
        else:
            j += 1
    return x, basis


def _tree_adjacency(basis, n):
    adj = {}
    for i, j in basis:
        adj.setdefault(i, []).append((n + j, (i, j)))
        adj.setdefault(n + j, []).append((i, (i, j)))
    return adj


def _compute_duals(basis, cost, n, m):
    u = np.full(n, np.nan)
    v = np.full(m, np.nan)
    u[0] = 0.0
    adj = _tree_adjacency(basis, n)
    stack = [0]
    seen = {0}
    while stack:
        node = stack.pop()
        for nbr, (i, j) in adj.get(node, ()):
            if nbr in seen:
                continue
            seen.add(nbr)
            if nbr >= n:
                v[nbr - n] = cost[i, j] - u[i]
            else:
                u[nbr] = cost[i, j] - v[j]
            stack.append(nbr)
    return u, v


def _tree_path(basis, n, start, goal):
    """Node path from start to goal through the basis tree."""
    adj = _tree_adjacency(basis, n)
    parent = {start: None}
    stack = [start]
    while stack:
        node = stack.pop()
        if node == goal:
            break
        for nbr, _ in adj.get(node, ()):
            if nbr not in parent:
                parent[nbr] = node
                stack.append(nbr)
    path = [goal]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def _network_simplex(a, b, cost, tol_scale=1e-11, max_pivots=None):
    """Minimize <cost, X> over couplings of (a, b); returns an optimal vertex.

    Entering and leaving arcs are picked lexicographically (Bland's rule),
    which prevents cycling under degeneracy and makes pivots deterministic.
    """
    n, m = cost.shape
    x, basis = _northwest_corner(a, b)
    tol = tol_scale * max(1.0, float(np.max(np.abs(cost))))
    if max_pivots is None:
        max_pivots = 20 * (n + m) * max(n, m) + 1000

    for _ in range(max_pivots):
        u, v = _compute_duals(basis, cost, n, m)
        reduced = cost - u[:, None] - v[None, :]
        for i, j in basis:
            reduced[i, j] = 0.0
        negative = np.argwhere(reduced < -tol)
        if negative.size == 0:
            return x, basis
        ei, ej = (int(negative[0][0]), int(negative[0][1]))

        # unique cycle: entering arc plus the tree path col->row
        path = _tree_path(basis, n, n + ej, ei)
        cycle = [(ei, ej)]
        signs = [1]
        for k in range(len(path) - 1):
            p0, p1 = path[k], path[k + 1]
            cell = (p1, p0 - n) if p0 >= n else (p0, p1 - n)
            cycle.append(cell)
            signs.append(-1 if k % 2 == 0 else 1)

        minus_cells = [c for c, s in zip(cycle, signs) if s < 0]
        theta = min(x[c] for c in minus_cells)
        leaving = min(c for c in minus_cells if x[c] <= theta)
        for c, s in zip(cycle, signs):
            x[c] += s * theta
        x[leaving] = 0.0
        basis[basis.index(leaving)] = (ei, ej)
    raise ResourceLimitError("network simplex exceeded its pivot budget")


def solve_transport(mu: DiscreteMeasure, nu: DiscreteMeasure, p: float) -> TransportResult:
    """Optimal coupling and p-Wasserstein distance between discrete measures."""
    _check_compatible(mu, nu, p)
    cost = cost_matrix(mu, nu, p)
    x, _ = _network_simplex(mu.weights.copy(), nu.weights.copy(), cost)
    np.clip(x, 0.0, None, out=x)
    total = float(np.sum(x * cost))
    return TransportResult(
        distance=total ** (1.0 / p),
        cost=total,
        coupling=Coupling(x),
        p=float(p),
    )


def wasserstein_distance(mu: DiscreteMeasure, nu: DiscreteMeasure, p: float) -> float:
    return solve_transport(mu, nu, p).distance


# --------------------------------------------------------------------------
# Brute-force oracle for tiny instances
# --------------------------------------------------------------------------

_EQUAL_WEIGHT_LIMIT = 6
_CELL_LIMIT = 12


def brute_force_transport(
    mu: DiscreteMeasure, nu: DiscreteMeasure, p: float
) -> TransportResult:
    """Exact optimum by exhaustive enumeration, independent of the simplex.

    Equal-weight instances with N = M <= 6 are solved over all permutation
    couplings (the Birkhoff vertices); otherwise all basic feasible solutions
    of instances with N*M <= 12 cells are enumerated.
    """
    _check_compatible(mu, nu, p)
    n, m = mu.n_atoms, nu.n_atoms
    cost = cost_matrix(mu, nu, p)

    equal = (
        n == m
        and np.allclose(mu.weights, 1.0 / n, atol=1e-12)
        and np.allclose(nu.weights, 1.0 / n, atol=1e-12)
    )
    if equal and n <= _EQUAL_WEIGHT_LIMIT:
        best_cost = np.inf
        best_perm = None
        for perm in itertools.permutations(range(n)):
            c = sum(cost[i, perm[i]] for i in range(n)) / n
            if c < best_cost - 1e-15:
                best_cost = c
                best_perm = perm
        x = np.zeros((n, m))
        for i, j in enumerate(best_perm):
            x[i, j] = 1.0 / n
        return TransportResult(best_cost ** (1.0 / p), best_cost, Coupling(x), float(p))

    if n * m > _CELL_LIMIT:
        raise ResourceLimitError(
            f"brute force limited to {_CELL_LIMIT} cells (or equal weights with "
            f"N=M<={_EQUAL_WEIGHT_LIMIT}); got {n}x{m}"
        )

    cells = list(itertools.product(range(n), range(m)))
    rhs = np.concatenate([mu.weights, nu.weights])
    basis_size = n + m - 1
    best_cost = np.inf
    best_x = None
    for subset in itertools.combinations(cells, basis_size):
        amat = np.zeros((n + m, basis_size))
        for col, (i, j) in enumerate(subset):
            amat[i, col] = 1.0
            amat[n + j, col] = 1.0
        sol, residual, rank, _ = np.linalg.lstsq(amat, rhs, rcond=None)
        if rank < basis_size:
            continue
        if np.max(np.abs(amat @ sol - rhs)) > 1e-9:
            continue
        if np.any(sol < -1e-10):
            continue
        c = float(sum(cost[i, j] * max(s, 0.0) for (i, j), s in zip(subset, sol)))
        if c < best_cost - 1e-15:
            best_cost = c
            best_x = np.zeros((n, m))
            for (i, j), s in zip(subset, sol):
                best_x[i, j] = max(float(s), 0.0)
    if best_x is None:  # pragma: no cover
        raise RuntimeError("no basic feasible solution found")
    return TransportResult(best_cost ** (1.0 / p), best_cost, Coupling(best_x), float(p))
