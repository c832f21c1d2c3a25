from itertools import chain, combinations

import numpy as np
import pytest

from conftest import random_instance
from edgeoffload.cost import OffloadObjective, prefer, total_cost
from edgeoffload.data import CutInstance, Partition
from edgeoffload.errors import AlreadyInSet, NotInGroundSet, PinViolation
from edgeoffload.model import build_graph, scale_costs
from edgeoffload.reductions import maxcut_to_offloading
from edgeoffload.solvers import brute_force


def subsets(items):
    items = list(items)
    return chain.from_iterable(combinations(items, k) for k in range(len(items) + 1))


def test_total_cost_picks_ce_column(two_node):
    breakdown = total_cost(two_node, Partition.of([0]))
    assert breakdown.total == 9.0
    assert breakdown.comp == 4.0
    assert breakdown.comm_inter == 5.0
    assert breakdown.comm_intra_edge == 0.0


def test_total_cost_all_cloud(two_node):
    breakdown = total_cost(two_node, Partition.of([0, 1]))
    assert breakdown.total == 3.0
    assert breakdown.comm_intra_cloud == 0.0


def test_total_cost_rejects_pin_violation():
    g = build_graph([(1, float("inf")), (1, 1)])
    with pytest.raises(PinViolation):
        total_cost(g, Partition.of([0]))


def test_f_values(two_node):
    obj = OffloadObjective(two_node)
    assert obj.gamma_empty == 6.0
    assert obj.f_value([]) == 0.0
    assert obj.f_value([0]) == 3.0
    assert obj.f_value([1]) == 2.0
    assert obj.f_value([0, 1]) == -3.0


def test_f_value_is_exactly_zero_on_empty_set():
    g = random_instance(3, pin_fraction=0.3)
    assert OffloadObjective(g).f_value(set()) == 0.0


def test_total_equals_gamma_empty_plus_f():
    for seed in range(10):
        g = random_instance(seed, max_nodes=8, pin_fraction=0.25)
        obj = OffloadObjective(g)
        for subset in subsets(obj.ground_set):
            expected = total_cost(g, obj.partition_of(subset)).total
            assert obj.gamma_empty + obj.f_value(subset) == pytest.approx(expected, abs=1e-6)


def test_marginal(two_node):
    obj = OffloadObjective(two_node)
    assert obj.marginal_of(1, []) == 2.0
    assert obj.marginal_of(1, [0]) == pytest.approx(-6.0)
    with pytest.raises(AlreadyInSet):
        obj.marginal_of(0, [0])
    with pytest.raises(NotInGroundSet):
        obj.marginal_of(5, [])


def test_marginal_outside_ground_set():
    g = build_graph([(1, 2), (1, 2)], latency_set=[1])
    obj = OffloadObjective(g)
    with pytest.raises(NotInGroundSet):
        obj.marginal_of(1, [])
    with pytest.raises(NotInGroundSet):
        obj.f_value([1])


def test_marginal_matches_difference_of_f():
    g = random_instance(11, max_nodes=9, pin_fraction=0.2)
    obj = OffloadObjective(g)
    rng = np.random.default_rng(0)
    for _ in range(100):
        members = obj.ground[rng.random(obj.size) < 0.5].tolist()
        outside = [v for v in obj.ground_set if v not in members]
        if not outside:
            continue
        v = outside[rng.integers(len(outside))]
        delta = obj.f_value(members + [v]) - obj.f_value(members)
        assert obj.marginal_of(v, members) == pytest.approx(delta, abs=1e-9)


def test_all_marginals_matches_flip_delta():
    g = random_instance(5)
    obj = OffloadObjective(g)
    side = obj.side_lookup(obj.ground_set[::2])
    deltas = obj.all_marginals(side)
    for v in range(g.n):
        assert deltas[v] == pytest.approx(obj.flip_delta(v, side))


def test_diminishing_returns_under_assumption():
    for seed in range(20):
        obj = OffloadObjective(random_instance(seed))
        checked, violations = obj.sample_diminishing_returns(50, seed=seed)
        assert checked == 50
        assert violations == []


def test_diminishing_returns_fail_on_reduction_instance():
    triangle = CutInstance(n=3, edges=((0, 1), (1, 2), (0, 2)), k=2)
    g, _ = maxcut_to_offloading(triangle)
    _, violations = OffloadObjective(g).sample_diminishing_returns(200, seed=1)
    assert violations
    worst = violations[0]
    assert worst.a <= worst.b
    assert worst.v not in worst.b
    assert worst.marginal_a < worst.marginal_b


def test_prefer_tie_break():
    assert prefer(-2.0, frozenset({0, 1}), -1.0, frozenset())
    assert not prefer(-1.0, frozenset({0, 1}), -1.0, frozenset({2}))
    assert prefer(-1.0, frozenset({0}), -1.0, frozenset({1}))
    assert prefer(-1.0 + 1e-12, frozenset(), -1.0, frozenset({0}))


def test_scaling_multiplies_f_and_the_optimum():
    rng = np.random.default_rng(41)
    for seed in range(30):
        g = random_instance(seed, max_nodes=10, pin_fraction=0.2)
        obj = OffloadObjective(g)
        optimum = brute_force(g).best_total
        for factor in (0.25, 3.0, 17.5):
            scaled = OffloadObjective(scale_costs(g, factor))
            assert scaled.ground_set == obj.ground_set
            for _ in range(10):
                chosen = [v for v in obj.ground_set if rng.random() < 0.5]
                expected = factor * obj.f_value(chosen)
                assert scaled.f_value(chosen) == pytest.approx(expected, rel=1e-9, abs=1e-6)
            scaled_optimum = brute_force(scaled.graph).best_total
            assert scaled_optimum == pytest.approx(factor * optimum, rel=1e-9, abs=1e-6)
