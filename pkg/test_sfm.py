import numpy as np
import pytest

from conftest import random_instance
from edgeoffload.cost import OffloadObjective
from edgeoffload.data import GenConfig, Pin
from edgeoffload.datagen import generate
from edgeoffload.errors import EmptyGroundSet, InvalidConfig, NotInGroundSet
from edgeoffload.model import build_graph, validate_partition
from edgeoffload.solvers import brute_force, extract_minimizer, greedy_vertex, min_norm_point, solve
from edgeoffload.solvers.sfm import _chol_delete


def test_greedy_vertex_two_node(two_node):
    obj = OffloadObjective(two_node)
    np.testing.assert_allclose(greedy_vertex(obj, [0, 1]).coords, [3.0, -6.0])
    # coordinates stay indexed by task, not by position in the permutation
    np.testing.assert_allclose(greedy_vertex(obj, [1, 0]).coords, [-5.0, 2.0])


def test_greedy_vertex_rejects_bad_permutation(two_node):
    obj = OffloadObjective(two_node)
    with pytest.raises(NotInGroundSet):
        greedy_vertex(obj, [0, 0])
    with pytest.raises(NotInGroundSet):
        greedy_vertex(obj, [0])


def test_greedy_vertex_prefix_sums_are_f_values():
    g = random_instance(21, pin_fraction=0.3)
    obj = OffloadObjective(g)
    perm = np.random.default_rng(1).permutation(obj.ground)
    coords = greedy_vertex(obj, perm).coords
    for size in range(obj.size + 1):
        prefix = perm[:size]
        assert coords[obj.position[prefix]].sum() == pytest.approx(obj.f_value(prefix.tolist()))


def test_greedy_vertices_lie_in_base_polytope():
    rng = np.random.default_rng(7)
    for seed in range(10):
        obj = OffloadObjective(random_instance(seed))
        coords = greedy_vertex(obj, rng.permutation(obj.ground)).coords
        assert coords.sum() == pytest.approx(obj.f_value(obj.ground_set))
        for _ in range(30):
            mask = rng.random(obj.size) < 0.5
            assert coords[mask].sum() <= obj.f_value(obj.ground[mask].tolist()) + 1e-6


def test_min_norm_point_two_node(two_node):
    obj = OffloadObjective(two_node)
    state = min_norm_point(obj)
    np.testing.assert_allclose(state.point, [-1.5, -1.5], atol=1e-9)
    assert state.converged
    assert not state.iteration_limited
    assert extract_minimizer(obj, state) == frozenset({0, 1})


def test_min_norm_point_iteration_limit(two_node):
    state = min_norm_point(OffloadObjective(two_node), max_major=1)
    assert state.iteration_limited
    assert state.major == 1


def test_min_norm_point_arguments(two_node):
    with pytest.raises(InvalidConfig):
        min_norm_point(OffloadObjective(two_node), eps=0.0)
    pinned = build_graph([(1, 2)], latency_set=[0])
    with pytest.raises(EmptyGroundSet):
        min_norm_point(OffloadObjective(pinned))


def test_norm_never_grows():
    for seed in range(20):
        state = min_norm_point(OffloadObjective(random_instance(seed)))
        history = np.array(state.norm_history)
        assert np.all(np.diff(history) <= 1e-6 * max(1.0, history[0]))


def test_chol_delete_matches_fresh_factor():
    rng = np.random.default_rng(3)
    A = rng.random((5, 5))
    M = A @ A.T + 5 * np.eye(5)
    L = np.linalg.cholesky(M)
    for i in range(5):
        reduced = np.delete(np.delete(M, i, axis=0), i, axis=1)
        np.testing.assert_allclose(_chol_delete(L, i), np.linalg.cholesky(reduced), atol=1e-10)


def test_solve_two_node(two_node):
    result = solve(two_node)
    assert result.algorithm == "sma"
    assert result.partition.cloud_set == frozenset({0, 1})
    assert result.total_cost == pytest.approx(3.0)
    assert result.f_min == pytest.approx(-3.0)
    assert result.optimal_certified
    assert result.stats.oracle_calls > 0


def test_solve_with_latency_pin():
    g = build_graph([(2, 1), (3, 2)], [(0, 1, (1, 4, 5, 0))], latency_set=[1])
    result = solve(g)
    assert result.partition.cloud_set == frozenset()
    assert result.total_cost == pytest.approx(6.0)
    assert result.f_min == 0.0


def test_solve_all_pinned():
    g = build_graph([(1, float("inf")), (float("inf"), 1)], [(0, 1, (1, 2, 2, 1))])
    result = solve(g)
    assert result.partition.cloud_set == frozenset({1})
    assert result.f_min == 0.0
    assert result.total_cost == pytest.approx(1 + 1 + 2)


def test_solve_flags_violated_assumption():
    g = build_graph([(0, 0), (0, 0), (0, 0)], [(0, 1, (3, 1, 1, 3)), (1, 2, (3, 1, 1, 3))])
    result = solve(g)
    assert not result.assumption.holds_strong
    assert not result.optimal_certified
    assert result.total_cost >= brute_force(g).best_total - 1e-9


def test_matches_brute_force_under_assumption():
    for seed in range(200):
        g = random_instance(seed)
        result = solve(g)
        assert result.assumption.holds_strong
        oracle = brute_force(g)
        assert result.total_cost == pytest.approx(oracle.best_total, abs=1e-6), seed
        assert result.total_cost == pytest.approx(
            OffloadObjective(g).gamma_empty + result.f_min, abs=1e-6
        )
        assert result.f_min <= 1e-9


def test_latency_pins_are_respected():
    for seed in range(50):
        g = random_instance(1000 + seed, pin_fraction=0.3)
        result = solve(g)
        validate_partition(g, result.partition)
        assert not result.partition.cloud_set & set(g.nodes_with(Pin.EDGE))
        assert result.total_cost == pytest.approx(brute_force(g).best_total, abs=1e-6)


def test_matches_brute_force_with_transfer_costs():
    for seed in range(20):
        g = random_instance(seed, transfer_range=(0.0, 20.0))
        assert solve(g).total_cost == pytest.approx(brute_force(g).best_total, abs=1e-6)


@pytest.mark.slow
def test_large_instance_converges():
    g = generate(GenConfig(n=500, m=5000, ratio=(3, 5, 4, 2), seed=2024))
    result = solve(g)
    assert not result.stats.iteration_limited
    assert result.optimal_certified
    validate_partition(g, result.partition)


def test_solve_is_deterministic():
    for seed in range(20):
        g = random_instance(seed, pin_fraction=0.2)
        first, second = solve(g), solve(g)
        assert first.partition == second.partition
        assert first.f_min == second.f_min
        assert first.stats.major_iterations == second.stats.major_iterations
