import re
from itertools import product

import numpy as np
import pulp
import pytest

from conftest import random_instance
from edgeoffload.cost import total_cost
from edgeoffload.data import CutInstance, Partition, Pin
from edgeoffload.errors import GroundSetTooLarge
from edgeoffload.model import build_graph
from edgeoffload.reductions import maxcut_to_offloading
from edgeoffload.solvers import brute_force, build_ilp, export_ilp, solve_brute
from edgeoffload.solvers.exact import objective_at

TRIANGLE = CutInstance(n=3, edges=((0, 1), (1, 2), (0, 2)), k=2)


def test_brute_force_two_node(two_node):
    result = brute_force(two_node)
    assert result.best_set == frozenset({0, 1})
    assert result.best_f == pytest.approx(-3.0)
    assert result.best_total == pytest.approx(3.0)
    assert result.subsets_evaluated == 4


def test_brute_force_triangle_reduction():
    g, _ = maxcut_to_offloading(TRIANGLE)
    result = brute_force(g)
    assert result.best_total == pytest.approx(5.0)
    # ties resolve to the smallest set, then lexicographically
    assert result.best_set == frozenset({0})


def test_brute_force_empty_ground_set():
    g = build_graph([(1, 2), (1, 2)], latency_set=[0, 1])
    result = brute_force(g)
    assert result.best_set == frozenset()
    assert result.best_f == 0.0
    assert result.best_total == 2.0
    assert result.subsets_evaluated == 1


def test_brute_force_guard():
    g = build_graph([(1, 2)] * 25)
    with pytest.raises(GroundSetTooLarge):
        brute_force(g)


def test_brute_force_matches_partition_enumeration():
    for seed in range(15):
        g = random_instance(seed, max_nodes=8, pin_fraction=0.25)
        best = np.inf
        for bits in product((False, True), repeat=g.n):
            cloud = [v for v, b in enumerate(bits) if b]
            if any(g.pins[v] == Pin.EDGE for v in cloud):
                continue
            if any(g.pins[v] == Pin.CLOUD and not bits[v] for v in range(g.n)):
                continue
            best = min(best, total_cost(g, Partition.of(cloud)).total)
        assert brute_force(g).best_total == pytest.approx(best, abs=1e-6)


def test_solve_brute_result(two_node):
    result = solve_brute(two_node)
    assert result.algorithm == "brute"
    assert result.optimal_certified
    assert result.partition.cloud_set == frozenset({0, 1})


def test_ilp_objective_equals_total_cost():
    rng = np.random.default_rng(5)
    for seed in range(5):
        g = random_instance(seed, max_nodes=8, pin_fraction=0.25)
        problem = build_ilp(g)
        free = g.free_nodes
        cloud_pins = g.nodes_with(Pin.CLOUD)
        for _ in range(50):
            cloud = [v for v in free if rng.random() < 0.5] + cloud_pins
            expected = total_cost(g, Partition.of(cloud)).total
            assert objective_at(problem, g, cloud) == pytest.approx(expected, abs=1e-6)


def test_ilp_on_reduction_instance():
    g, _ = maxcut_to_offloading(TRIANGLE)
    problem = build_ilp(g)
    assert objective_at(problem, g, [0]) == pytest.approx(5.0)
    assert objective_at(problem, g, []) == pytest.approx(9.0)


def test_export_ilp_writes_lp_file(tmp_path, two_node):
    path = export_ilp(two_node, tmp_path / "two_node.lp")
    text = path.read_text()
    assert "Minimize" in text
    assert "Subject To" in text
    assert "y_0_1_3" in text
    assert "x_0" in text


def test_export_ilp_fixes_pins(tmp_path):
    g = build_graph([(1, float("inf")), (2, 1)], [(0, 1, (1, 2, 3, 0))])
    text = export_ilp(g, tmp_path / "pinned.lp").read_text()
    assert re.search(r"x_0\s*=\s*0", text)


def test_ilp_solution_matches_brute_force():
    if not pulp.PULP_CBC_CMD(msg=False).available():
        pytest.skip("CBC is not available")
    for g in (
        build_graph([(2, 1), (3, 2)], [(0, 1, (1, 4, 5, 0))]),
        maxcut_to_offloading(TRIANGLE)[0],
    ):
        problem = build_ilp(g)
        problem.solve(pulp.PULP_CBC_CMD(msg=False))
        assert pulp.value(problem.objective) == pytest.approx(brute_force(g).best_total)
