"""Submodular minimization of the offloading cost increment (the "SMA" algorithm).

Fujishige-Wolfe minimum-norm-point on the base polytope of F: major cycles add the greedy
vertex minimizing <x, q>; minor cycles project onto the affine hull of the corral and
clip back into its convex hull. The affine subproblem is solved through a Cholesky factor
of G + 11^T (G the corral's Gram matrix), updated by rank-one steps as vertices enter
and leave. The minimizer is read off the prefixes of the point's ascending order.
"""

import math
import time
from dataclasses import dataclass, field
from typing import FrozenSet, List, Optional, Sequence

import numpy as np
from loguru import logger
from scipy.linalg import cho_solve, solve_triangular

from edgeoffload.config import Config
from edgeoffload.cost import OffloadObjective, prefer
from edgeoffload.data import SolveResult, SolveStats, TaskGraph
from edgeoffload.errors import EmptyGroundSet, InvalidConfig, NotInGroundSet
from edgeoffload.model import check_assumption


@dataclass
class BaseVertex:
    coords: np.ndarray  # indexed like OffloadObjective.ground_set
    perm: np.ndarray  # node ids in insertion order


@dataclass
class MinNormState:
    point: np.ndarray
    corral: List[BaseVertex]
    lambdas: np.ndarray
    eps: float
    scale: float = 1.0
    major: int = 0
    minor: int = 0
    oracle_calls: int = 0
    converged: bool = False
    iteration_limited: bool = False
    norm_history: List[float] = field(default_factory=list)


def greedy_vertex(obj: OffloadObjective, perm: Sequence[int]) -> BaseVertex:
    """Edmonds' greedy vertex: coords[perm[k]] = F(perm[:k+1]) - F(perm[:k])."""
    perm = np.asarray(perm, dtype=np.intp)
    k = obj.size
    if len(perm) != k or not np.array_equal(np.sort(perm), obj.ground):
        raise NotInGroundSet("perm must be a permutation of the free tasks")
    if k == 0:
        return BaseVertex(coords=np.zeros(0), perm=perm)

    n = obj.graph.n
    # a neighbor placed earlier is on the cloud side; pins sit before or after everything
    rank = np.full(n, k, dtype=np.intp)
    rank[obj.base_side] = -1
    rank[perm] = np.arange(k)

    node_coords = obj.modular.copy()
    if len(obj.src):
        rank_src, rank_dst = rank[obj.src], rank[obj.dst]
        out_terms = np.where(rank_dst < rank_src, obj.out_if_cloud, obj.out_if_edge)
        in_terms = np.where(rank_src < rank_dst, obj.in_if_cloud, obj.in_if_edge)
        node_coords += np.bincount(obj.src, weights=out_terms, minlength=n)
        node_coords += np.bincount(obj.dst, weights=in_terms, minlength=n)
    return BaseVertex(coords=node_coords[obj.ground], perm=perm)


def _chol_update(L: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Lower factor of L L^T + x x^T."""
    L = L.copy()
    x = x.copy()
    size = len(x)
    for k in range(size):
        r = math.hypot(L[k, k], x[k])
        c = r / L[k, k]
        s = x[k] / L[k, k]
        L[k, k] = r
        if k + 1 < size:
            L[k + 1 :, k] = (L[k + 1 :, k] + s * x[k + 1 :]) / c
            x[k + 1 :] = c * x[k + 1 :] - s * L[k + 1 :, k]
    return L


def _chol_delete(L: np.ndarray, i: int) -> np.ndarray:
    """Lower factor of the matrix with row and column ``i`` removed."""
    reduced = np.delete(np.delete(L, i, axis=0), i, axis=1)
    if i < L.shape[0] - 1:
        reduced[i:, i:] = _chol_update(L[i + 1 :, i + 1 :], L[i + 1 :, i])
    return reduced


def _factor(P: np.ndarray) -> np.ndarray:
    return np.linalg.cholesky(P @ P.T + 1.0)


class _Corral:
    """Scaled corral vertices with the Cholesky factor of G + 11^T."""

    def __init__(self, vertex: BaseVertex, scaled: np.ndarray):
        self.vertices = [vertex]
        self.P = scaled.reshape(1, -1)
        self.L = _factor(self.P)

    def __len__(self):
        return len(self.vertices)

    def contains(self, q: np.ndarray, tol: float) -> bool:
        return bool(np.any(np.all(np.abs(self.P - q) <= tol, axis=1)))

    def add(self, vertex: BaseVertex, q: np.ndarray) -> bool:
        b = self.P @ q + 1.0
        r = solve_triangular(self.L, b, lower=True)
        d2 = q @ q + 1.0 - r @ r
        trace = float(np.trace(self.L @ self.L.T)) + q @ q + 1.0
        if d2 > Config.Solver.PIVOT_RTOL * trace:
            size = len(self.vertices)
            L = np.zeros((size + 1, size + 1))
            L[:size, :size] = self.L
            L[size, :size] = r
            L[size, size] = math.sqrt(d2)
            self.L = L
            self.P = np.vstack([self.P, q])
            self.vertices.append(vertex)
            return True

        logger.debug(f"Ill-conditioned pivot {d2:.3e}; rebuilding corral factor")
        P = np.vstack([self.P, q])
        try:
            L = _factor(P)
        except np.linalg.LinAlgError:
            return False
        if np.min(np.diag(L)) ** 2 <= Config.Solver.PIVOT_RTOL * np.trace(L @ L.T):
            return False
        self.L, self.P = L, P
        self.vertices.append(vertex)
        return True

    def remove(self, indices: Sequence[int]):
        for i in sorted(indices, reverse=True):
            self.L = _chol_delete(self.L, i)
            self.P = np.delete(self.P, i, axis=0)
            del self.vertices[i]

    def affine_minimizer(self) -> np.ndarray:
        alpha = cho_solve((self.L, True), np.ones(len(self.vertices)))
        return alpha / alpha.sum()


def min_norm_point(
    obj: OffloadObjective, eps: float = Config.Solver.EPS, max_major: Optional[int] = None
) -> MinNormState:
    if eps <= 0:
        raise InvalidConfig(f"eps must be positive, got {eps}")
    k = obj.size
    if k == 0:
        raise EmptyGroundSet("minimum-norm point needs at least one free task")
    limit = max_major or Config.Solver.MAX_MAJOR_FACTOR * k * k
    drop_tol = Config.Solver.DROP_TOL

    first = greedy_vertex(obj, obj.ground)
    # work on vertices scaled to unit magnitude so the +1 border of the Gram matrix matters
    sigma = float(np.abs(first.coords).max()) or 1.0
    corral = _Corral(first, first.coords / sigma)
    lambdas = np.ones(1)
    x = corral.P[0].copy()
    state = MinNormState(point=x * sigma, corral=corral.vertices, lambdas=lambdas, eps=eps)
    state.scale = sigma
    state.oracle_calls = 1
    state.norm_history.append(float(x @ x) * sigma**2)

    while True:
        order = np.argsort(x, kind="stable")
        vertex = greedy_vertex(obj, obj.ground[order])
        state.oracle_calls += 1
        q = vertex.coords / sigma

        widest = float(np.max(np.einsum("ij,ij->i", corral.P, corral.P)))
        reference = max(1.0, float(q @ q), widest)
        gap = float(x @ x - x @ q)
        if gap <= eps * reference or corral.contains(q, eps * math.sqrt(reference)):
            state.converged = True
            break
        if not corral.add(vertex, q):
            logger.warning("Greedy vertex is affinely dependent on the corral; stopping")
            state.converged = True
            break
        lambdas = np.append(lambdas, 0.0)

        first_minor = True
        while True:
            beta = corral.affine_minimizer()
            if np.all(beta > drop_tol):
                lambdas = beta
                x = lambdas @ corral.P
                break
            state.minor += 1
            candidates = np.nonzero((beta <= drop_tol) & (lambdas - beta > 0))[0]
            if len(candidates):
                ratios = lambdas[candidates] / (lambdas[candidates] - beta[candidates])
                theta = float(ratios.min())
                leaving = int(candidates[np.argmin(ratios)])
            else:
                theta, leaving = 1.0, int(np.argmin(beta))
            lambdas = theta * beta + (1.0 - theta) * lambdas
            lambdas[leaving] = 0.0
            dropped = np.nonzero(lambdas <= drop_tol)[0]
            if first_minor and len(corral) - 1 in dropped and theta == 0.0:
                # the new vertex cannot enter: no descent direction left
                corral.remove(dropped)
                lambdas = np.delete(lambdas, dropped)
                lambdas /= lambdas.sum()
                x = lambdas @ corral.P
                state.converged = True
                break
            corral.remove(dropped)
            lambdas = np.delete(lambdas, dropped)
            lambdas /= lambdas.sum()
            x = lambdas @ corral.P
            first_minor = False

        state.major += 1
        norm = float(x @ x) * sigma**2
        if norm > state.norm_history[-1] * (1 + 1e-9) + 1e-9:
            previous = state.norm_history[-1]
            logger.debug(f"Norm grew at major cycle {state.major}: {previous} -> {norm}")
        state.norm_history.append(norm)
        if state.converged:
            break
        if state.major >= limit:
            state.iteration_limited = True
            logger.warning(f"Minimum-norm point hit the iteration limit ({limit} major cycles)")
            break

    state.point = x * sigma
    state.corral = corral.vertices
    state.lambdas = lambdas
    logger.debug(
        f"Minimum-norm point: {state.major} major / {state.minor} minor cycles, "
        f"corral size {len(corral)}, |x|^2 = {state.norm_history[-1]:.6g}"
    )
    return state


def extract_minimizer(obj: OffloadObjective, state: MinNormState) -> FrozenSet[int]:
    """Best of the n + 1 prefixes of ascending x and the two sign-threshold sets."""
    x = state.point
    order = np.argsort(x, kind="stable")
    perm = obj.ground[order]
    vertex = greedy_vertex(obj, perm)
    state.oracle_calls += 1
    prefix_values = np.concatenate([[0.0], np.cumsum(vertex.coords[order])])

    best: FrozenSet[int] = frozenset()
    best_f = 0.0
    for size in range(1, len(perm) + 1):
        candidate = frozenset(perm[:size].tolist())
        if prefer(float(prefix_values[size]), candidate, best_f, best):
            best, best_f = candidate, float(prefix_values[size])
    for mask in (x < 0, x <= 0):
        candidate = frozenset(obj.ground[mask].tolist())
        value = obj.f_value(candidate)
        if prefer(value, candidate, best_f, best):
            best, best_f = candidate, value
    return best


def solve(g: TaskGraph, eps: float = Config.Solver.EPS) -> SolveResult:
    start = time.perf_counter()
    assumption = check_assumption(g)
    if not assumption.holds_strong:
        logger.warning(
            f"Communication assumption fails on {len(assumption.violations)} inequalities; "
            "the result is a heuristic"
        )
    obj = OffloadObjective(g)
    stats = SolveStats()
    if obj.size == 0:
        subset: FrozenSet[int] = frozenset()
    else:
        state = min_norm_point(obj, eps)
        subset = extract_minimizer(obj, state)
        stats = SolveStats(
            major_iterations=state.major,
            minor_iterations=state.minor,
            oracle_calls=state.oracle_calls,
            iteration_limited=state.iteration_limited,
        )

    f_min = obj.f_value(subset)
    total = obj.gamma(subset)
    stats.wall_time_ms = (time.perf_counter() - start) * 1000.0
    logger.debug(f"SMA on {g.name or 'graph'}: |X| = {len(subset)}, F = {f_min}, total = {total}")
    return SolveResult(
        algorithm="sma",
        partition=obj.partition_of(subset),
        f_min=f_min,
        total_cost=total,
        assumption=assumption,
        optimal_certified=assumption.holds_strong,
        stats=stats,
    )
