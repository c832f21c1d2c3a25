"""MAX-CUT instances as symmetric offloading instances.

Every vertex becomes a zero-cost task and every undirected edge a task edge costing m on
the same side and 1 across. A cut of size q then costs m(m - q) + q, so a cut of size at
least k exists iff the offloading optimum is at most m(m - k) + k.
"""

from pathlib import Path
from typing import Dict, Tuple, Union

import numpy as np
from loguru import logger

from edgeoffload.config import Config
from edgeoffload.data import CutInstance, DecisionCheck, Lemma2Report, TaskGraph
from edgeoffload.datagen import parse_edge_list
from edgeoffload.errors import EmptyGraph, SizeGuard
from edgeoffload.model import build_graph
from edgeoffload.solvers.exact import brute_force


def offloading_threshold(m: int, k: int) -> float:
    return float(m * (m - k) + k)


def maxcut_to_offloading(c: CutInstance) -> Tuple[TaskGraph, float]:
    m = c.m
    if m == 0:
        raise EmptyGraph("MAX-CUT reduction needs at least one edge")
    edges = [(min(u, v), max(u, v), (m, 1, 1, m)) for u, v in c.edges]
    g = build_graph([(0.0, 0.0)] * c.n, edges, name=f"maxcut-n{c.n}-m{m}-k{c.k}")
    return g, offloading_threshold(m, c.k)


def decide_offloading(g: TaskGraph, threshold: float) -> bool:
    return brute_force(g).best_total <= threshold + Config.Reduction.DECISION_SLACK


def max_cut_value(c: CutInstance) -> int:
    """Largest cut by enumeration; vertex n - 1 stays on one side to halve the work."""
    if c.m == 0:
        return 0
    masks = np.arange(1 << max(c.n - 1, 0), dtype=np.int64)
    bits = (masks[:, None] >> np.arange(c.n)[None, :]) & 1
    u = np.array([e[0] for e in c.edges])
    v = np.array([e[1] for e in c.edges])
    return int((bits[:, u] != bits[:, v]).sum(axis=1).max())


def validate_lemma2(c: CutInstance) -> Lemma2Report:
    """Check the cost identity and every threshold decision by brute force on both sides."""
    if c.n > Config.Reduction.MAX_NODES or c.m > Config.Reduction.MAX_EDGES:
        raise SizeGuard(
            f"reduction check limited to n <= {Config.Reduction.MAX_NODES} and "
            f"m <= {Config.Reduction.MAX_EDGES}, got n={c.n}, m={c.m}"
        )
    g, _ = maxcut_to_offloading(c)
    m = c.m
    q_star = max_cut_value(c)
    o_star = brute_force(g).best_total
    expected = offloading_threshold(m, q_star)
    equality = abs(o_star - expected) <= Config.Tolerance.ABS

    decisions = []
    for k in range(m + 1):
        threshold = offloading_threshold(m, k)
        decisions.append(
            DecisionCheck(
                k=k,
                threshold=threshold,
                decided=o_star <= threshold + Config.Reduction.DECISION_SLACK,
                cut_feasible=q_star >= k,
            )
        )

    report = Lemma2Report(
        n=c.n,
        m=m,
        q_star=q_star,
        o_star=o_star,
        expected_cost=expected,
        equality_holds=equality,
        decisions=decisions,
    )
    if not report.passed:
        logger.warning(f"Reduction check failed on n={c.n}, m={m}: O* = {o_star}, q* = {q_star}")
    return report


def load_cut_instance(path: Union[str, Path], k: int = 0) -> CutInstance:
    """Simple undirected graph from an edge list: loops dropped, duplicates collapsed."""
    index: Dict[int, int] = {}
    edges = set()
    order = []
    for u, v in parse_edge_list(path):
        for node in (u, v):
            index.setdefault(node, len(index))
        if u == v:
            continue
        a, b = sorted((index[u], index[v]))
        if (a, b) not in edges:
            edges.add((a, b))
            order.append((a, b))
    return CutInstance(n=len(index), edges=tuple(order), k=k)
