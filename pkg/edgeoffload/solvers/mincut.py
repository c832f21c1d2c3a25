"""Min-cut fast path for homogeneous communication costs.

With l_ee = l_cc = a and l_ec = l_ce = b on every edge, the same-side cost a is a constant
and the cross-side surcharge b - a is an undirected cut capacity. The source side of the
minimum s-t cut is the cloud.
"""

import math
import time
from collections import deque
from dataclasses import dataclass
from typing import FrozenSet, Set

import networkx as nx
from loguru import logger
from networkx.algorithms.flow import preflow_push

from edgeoffload.config import Config
from edgeoffload.cost import OffloadObjective
from edgeoffload.data import Pin, SolveResult, SolveStats, TaskGraph
from edgeoffload.errors import FlowMismatch, NotApplicable
from edgeoffload.model import check_assumption


@dataclass
class FlowNetwork:
    graph: nx.DiGraph
    source: int
    sink: int
    offset: float  # sum of same-side costs a, paid whatever the cut
    big: float  # stands in for an infinite capacity on pinned tasks


def _homogeneous(l_ee: float, l_ec: float, l_ce: float, l_cc: float) -> bool:
    tol = Config.Tolerance.REL
    return (
        math.isclose(l_ee, l_cc, rel_tol=tol, abs_tol=tol)
        and math.isclose(l_ec, l_ce, rel_tol=tol, abs_tol=tol)
        and l_ee <= l_ec + tol
    )


def mincut_applicable(g: TaskGraph) -> bool:
    return all(_homogeneous(*e.cost.as_tuple()) for e in g.edges)


def _add_capacity(graph: nx.DiGraph, u: int, v: int, capacity: float):
    if capacity <= 0:
        return
    if graph.has_edge(u, v):
        graph[u][v]["capacity"] += capacity
    else:
        graph.add_edge(u, v, capacity=capacity)


def build_flow_network(g: TaskGraph) -> FlowNetwork:
    obj = OffloadObjective(g)
    source, sink = g.n, g.n + 1
    big = float(obj.edge_cost.sum() + obj.cloud_cost.sum())
    big += sum(max(e.cost.as_tuple()) for e in g.edges) + 1.0

    graph = nx.DiGraph()
    graph.add_nodes_from(range(g.n + 2))
    for v, pin in enumerate(g.pins):
        # s->v is cut when v stays on the edge, v->t when it moves to the cloud
        to_edge = big if pin == Pin.CLOUD else float(obj.edge_cost[v])
        to_cloud = big if pin == Pin.EDGE else float(obj.cloud_cost[v])
        _add_capacity(graph, source, v, to_edge)
        _add_capacity(graph, v, sink, to_cloud)

    offset = 0.0
    for e in g.edges:
        a, b = e.cost.l_ee, e.cost.l_ec
        offset += a
        _add_capacity(graph, e.src, e.dst, b - a)
        _add_capacity(graph, e.dst, e.src, b - a)
    return FlowNetwork(graph=graph, source=source, sink=sink, offset=offset, big=big)


def _residual_reachable(residual: nx.DiGraph, source: int) -> Set[int]:
    seen = {source}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v, attr in residual[u].items():
            if v not in seen and attr["capacity"] - attr["flow"] > Config.Tolerance.REL:
                seen.add(v)
                queue.append(v)
    return seen


def solve_mincut(g: TaskGraph) -> SolveResult:
    if not mincut_applicable(g):
        raise NotApplicable(
            "min-cut needs l_ee = l_cc <= l_ec = l_ce on every edge; use sma instead"
        )
    start = time.perf_counter()
    network = build_flow_network(g)
    residual = preflow_push(network.graph, network.source, network.sink)
    flow_value = residual.graph["flow_value"]

    source_side = _residual_reachable(residual, network.source)
    cut_value = sum(
        attr["capacity"]
        for u, v, attr in network.graph.edges(data=True)
        if u in source_side and v not in source_side
    )
    tol = Config.Tolerance.ABS * max(1.0, abs(flow_value))
    if abs(cut_value - flow_value) > tol:
        raise FlowMismatch(f"max flow {flow_value} differs from residual cut {cut_value}")

    obj = OffloadObjective(g)
    cloud: FrozenSet[int] = frozenset(v for v in source_side if v < g.n)
    subset = cloud - obj.base_cloud
    total = cut_value + network.offset
    logger.debug(f"Min cut {cut_value} + offset {network.offset} on {g.name or 'graph'}")
    return SolveResult(
        algorithm="mincut",
        partition=obj.partition_of(subset),
        f_min=obj.f_value(subset),
        total_cost=total,
        assumption=check_assumption(g),
        optimal_certified=True,
        stats=SolveStats(wall_time_ms=(time.perf_counter() - start) * 1000.0),
    )
