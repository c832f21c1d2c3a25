"""Cost functions of an offloading instance.

A node is on the cloud side when its entry in a boolean ``side`` array is True. For a
directed edge (i, j) the communication component is picked by ``2 * side[i] + side[j]``,
i.e. columns (l_ee, l_ec, l_ce, l_cc).
"""

from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Sequence, Tuple

import numpy as np

from edgeoffload.config import Config
from edgeoffload.data import CostBreakdown, Partition, Pin, TaskGraph
from edgeoffload.errors import AlreadyInSet, NotInGroundSet
from edgeoffload.model import validate_partition


@dataclass(frozen=True)
class DiminishingReturnsViolation:
    v: int
    a: FrozenSet[int]
    b: FrozenSet[int]
    marginal_a: float
    marginal_b: float


class OffloadObjective:
    """The cost increment F(X) = Gamma(X + cloud pins) - Gamma(cloud pins) over free tasks."""

    def __init__(self, g: TaskGraph):
        self.graph = g
        n = g.n
        self.base_cloud: FrozenSet[int] = frozenset(g.nodes_with(Pin.CLOUD))
        self.ground_set: Tuple[int, ...] = tuple(g.free_nodes)
        self.ground = np.asarray(self.ground_set, dtype=np.intp)
        self.position = np.full(n, -1, dtype=np.intp)
        self.position[self.ground] = np.arange(len(self.ground_set))

        w_edge = np.array([c.w_edge for c in g.nodes], dtype=float)
        w_cloud = np.array([c.w_cloud for c in g.nodes], dtype=float)
        transfer = np.array([c.transfer for c in g.nodes], dtype=float)
        # the infinite side of a pinned task is never selected
        self.edge_cost = np.where(np.isinf(w_edge), 0.0, w_edge + transfer)
        self.cloud_cost = np.where(np.isinf(w_cloud), 0.0, w_cloud)
        self.modular = self.cloud_cost - self.edge_cost

        self.src = np.array([e.src for e in g.edges], dtype=np.intp)
        self.dst = np.array([e.dst for e in g.edges], dtype=np.intp)
        self.l = np.array([e.cost.as_tuple() for e in g.edges], dtype=float).reshape(-1, 4)
        l_ee, l_ec, l_ce, l_cc = self.l.T
        self.out_if_cloud = l_cc - l_ec
        self.out_if_edge = l_ce - l_ee
        self.in_if_cloud = l_cc - l_ce
        self.in_if_edge = l_ec - l_ee

        # (neighbor, delta if neighbor in cloud, delta if neighbor on edge) per node
        self.terms: List[List[Tuple[int, float, float]]] = [[] for _ in range(n)]
        for e, (i, j) in enumerate(zip(self.src.tolist(), self.dst.tolist())):
            self.terms[i].append((j, float(self.out_if_cloud[e]), float(self.out_if_edge[e])))
            self.terms[j].append((i, float(self.in_if_cloud[e]), float(self.in_if_edge[e])))
        self.modular_list: List[float] = self.modular.tolist()

        self.base_side = np.zeros(n, dtype=bool)
        self.base_side[list(self.base_cloud)] = True
        self.gamma_empty = self.gamma_of_side(self.base_side)

    @property
    def size(self) -> int:
        return len(self.ground_set)

    def side_lookup(self, subset: Iterable[int]) -> np.ndarray:
        side = self.base_side.copy()
        for v in subset:
            if not 0 <= v < self.graph.n or self.position[v] < 0:
                raise NotInGroundSet(f"task {v} is not a free task")
            side[v] = True
        return side

    def gamma_of_side(self, side: np.ndarray) -> float:
        comp = np.where(side, self.cloud_cost, self.edge_cost).sum()
        if len(self.src) == 0:
            return float(comp)
        column = 2 * side[self.src].astype(np.intp) + side[self.dst].astype(np.intp)
        comm = self.l[np.arange(len(self.src)), column].sum()
        return float(comp + comm)

    def gamma(self, subset: Iterable[int]) -> float:
        return self.gamma_of_side(self.side_lookup(subset))

    def f_value(self, subset: Iterable[int]) -> float:
        side = self.side_lookup(subset)
        if not (side ^ self.base_side).any():
            return 0.0
        return self.gamma_of_side(side) - self.gamma_empty

    def flip_delta(self, v: int, side: Sequence[bool]) -> float:
        """F change from moving ``v`` edge to cloud; ``v``'s own side entry is ignored."""
        total = self.modular_list[v]
        for j, if_cloud, if_edge in self.terms[v]:
            total += if_cloud if side[j] else if_edge
        return total

    def marginal(self, v: int, side: Sequence[bool]) -> float:
        """F(A + v) - F(A), where ``side`` is the lookup of A (see ``side_lookup``)."""
        if not 0 <= v < self.graph.n or self.position[v] < 0:
            raise NotInGroundSet(f"task {v} is not a free task")
        if side[v]:
            raise AlreadyInSet(f"task {v} is already in the cloud set")
        return self.flip_delta(v, side)

    def marginal_of(self, v: int, subset: Iterable[int]) -> float:
        return self.marginal(v, self.side_lookup(subset))

    def all_marginals(self, side: np.ndarray) -> np.ndarray:
        """Flip delta of every node at once, indexed by node id."""
        n = self.graph.n
        deltas = self.modular.copy()
        if len(self.src):
            out_terms = np.where(side[self.dst], self.out_if_cloud, self.out_if_edge)
            in_terms = np.where(side[self.src], self.in_if_cloud, self.in_if_edge)
            deltas += np.bincount(self.src, weights=out_terms, minlength=n)
            deltas += np.bincount(self.dst, weights=in_terms, minlength=n)
        return deltas

    def breakdown(self, side: np.ndarray) -> CostBreakdown:
        comp = float(np.where(side, self.cloud_cost, self.edge_cost).sum())
        inter = intra_edge = intra_cloud = 0.0
        if len(self.src):
            column = 2 * side[self.src].astype(np.intp) + side[self.dst].astype(np.intp)
            comm = self.l[np.arange(len(self.src)), column]
            intra_edge = float(comm[column == 0].sum())
            inter = float(comm[(column == 1) | (column == 2)].sum())
            intra_cloud = float(comm[column == 3].sum())
        return CostBreakdown(
            comp=comp,
            comm_inter=inter,
            comm_intra_edge=intra_edge,
            comm_intra_cloud=intra_cloud,
            total=comp + inter + intra_edge + intra_cloud,
        )

    def partition_of(self, subset: Iterable[int]) -> Partition:
        return Partition.of(set(subset) | self.base_cloud)

    def subset_of(self, p: Partition) -> FrozenSet[int]:
        return frozenset(p.cloud_set - self.base_cloud)

    def sample_diminishing_returns(
        self, samples: int, seed: int = Config.SEED, tol: float = Config.Tolerance.DIMINISHING
    ) -> Tuple[int, List[DiminishingReturnsViolation]]:
        """Check F(A + v) - F(A) >= F(B + v) - F(B) on random A <= B, v outside B.

        Returns the number of triples checked and the violating ones.
        """
        if self.size == 0:
            return 0, []
        rng = np.random.default_rng(seed)
        violations: List[DiminishingReturnsViolation] = []
        for _ in range(samples):
            v = int(self.ground[rng.integers(self.size)])
            others = self.ground[self.ground != v]
            b_mask = rng.random(len(others)) < rng.random()
            a_mask = b_mask & (rng.random(len(others)) < rng.random())
            b = frozenset(others[b_mask].tolist())
            a = frozenset(others[a_mask].tolist())
            marginal_a = self.marginal_of(v, a)
            marginal_b = self.marginal_of(v, b)
            if marginal_a < marginal_b - tol:
                violations.append(DiminishingReturnsViolation(v, a, b, marginal_a, marginal_b))
        return samples, violations


def total_cost(g: TaskGraph, p: Partition) -> CostBreakdown:
    validate_partition(g, p)
    objective = OffloadObjective(g)
    side = np.zeros(g.n, dtype=bool)
    side[list(p.cloud_set)] = True
    return objective.breakdown(side)


def prefer(
    candidate_f: float, candidate: FrozenSet[int], best_f: float, best: FrozenSet[int]
) -> bool:
    """Module-wide tie-break: lower F, then smaller cardinality, then lexicographic."""
    tol = Config.Tolerance.REL * max(1.0, abs(best_f))
    if candidate_f < best_f - tol:
        return True
    if candidate_f > best_f + tol:
        return False
    return (len(candidate), sorted(candidate)) < (len(best), sorted(best))
