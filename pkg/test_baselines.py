import pytest

from conftest import DATA_DIR, random_instance
from edgeoffload.data import GenConfig, Pin
from edgeoffload.datagen import generate, load_instance
from edgeoffload.errors import NotApplicable
from edgeoffload.model import build_graph, validate_partition
from edgeoffload.solvers import (
    brute_force,
    greedy_local_search,
    mincut_applicable,
    solve,
    solve_mincut,
)
from edgeoffload.solvers.mincut import build_flow_network


def test_greedy_single_node():
    result = greedy_local_search(build_graph([(5, 3)]))
    assert result.partition.cloud_set == frozenset({0})
    assert result.total_cost == 3.0
    assert result.stats.major_iterations == 1
    assert not result.optimal_certified


def test_greedy_stalls_on_two_node(two_node):
    """Each single flip costs more (+3 and +2), so the hill-climb never leaves the start."""
    result = greedy_local_search(two_node)
    assert result.partition.cloud_set == frozenset()
    assert result.total_cost == 6.0
    assert solve(two_node).total_cost == pytest.approx(3.0)


def test_greedy_trap_golden():
    g = load_instance(DATA_DIR / "greedy_trap.json")
    assert greedy_local_search(g).total_cost == pytest.approx(5.0)
    sma = solve(g)
    assert sma.total_cost == pytest.approx(2.0)
    assert sma.optimal_certified


def test_greedy_never_beats_sma():
    for seed in range(100):
        g = random_instance(seed)
        greedy, sma = greedy_local_search(g), solve(g)
        assert greedy.total_cost >= sma.total_cost - 1e-6


def test_greedy_respects_pins():
    for seed in range(20):
        g = random_instance(seed, pin_fraction=0.3)
        result = greedy_local_search(g)
        validate_partition(g, result.partition)


def test_mincut_applicable():
    assert mincut_applicable(build_graph([(1, 1), (1, 1)], [(0, 1, (0, 2, 2, 0))]))
    assert not mincut_applicable(build_graph([(1, 1), (1, 1)], [(0, 1, (1, 4, 5, 1))]))
    assert not mincut_applicable(build_graph([(1, 1), (1, 1)], [(0, 1, (3, 1, 1, 3))]))
    assert mincut_applicable(build_graph([(1, 1)]))


def test_mincut_two_node(homogeneous_two_node):
    result = solve_mincut(homogeneous_two_node)
    assert result.partition.cloud_set == frozenset({0, 1})
    assert result.total_cost == 3.0
    assert result.optimal_certified


def test_mincut_single_node():
    result = solve_mincut(build_graph([(5, 3)]))
    assert result.partition.cloud_set == frozenset({0})
    assert result.total_cost == 3.0


def test_mincut_guard():
    g = load_instance(DATA_DIR / "asymmetric.json")
    with pytest.raises(NotApplicable):
        solve_mincut(g)


def test_flow_network_shape(homogeneous_two_node):
    network = build_flow_network(homogeneous_two_node)
    assert network.graph.in_degree(network.source) == 0
    assert network.graph.out_degree(network.sink) == 0
    assert all(c >= 0 for _, _, c in network.graph.edges(data="capacity"))
    assert network.offset == 0.0


def test_mincut_matches_brute_force_and_sma():
    for seed in range(100):
        cfg = GenConfig(
            n=4 + seed % 9,
            m=2 * (4 + seed % 9),
            ratio=(1, 3, 3, 1),
            seed=seed,
            pin_fraction=0.2 if seed % 3 == 0 else 0.0,
            integral=True,
        )
        g = generate(cfg)
        assert mincut_applicable(g)
        mincut = solve_mincut(g)
        validate_partition(g, mincut.partition)
        oracle = brute_force(g).best_total
        assert mincut.total_cost == pytest.approx(oracle, abs=1e-6)
        assert solve(g).total_cost == pytest.approx(oracle, abs=1e-6)


def test_mincut_handles_cloud_pins():
    g = build_graph(
        [(1, 9), (float("inf"), 1), (4, 4)],
        [(0, 1, (0, 5, 5, 0)), (1, 2, (1, 2, 2, 1))],
    )
    assert g.pins[1] == Pin.CLOUD
    result = solve_mincut(g)
    assert 1 in result.partition.cloud_set
    assert result.total_cost == pytest.approx(brute_force(g).best_total)


def test_homogeneous_golden_file(homogeneous_two_node):
    expected = build_graph([(2, 1), (3, 2)], [(0, 1, (0, 2, 2, 0))], name="two-node-homogeneous")
    assert homogeneous_two_node == expected
    assert mincut_applicable(homogeneous_two_node)
