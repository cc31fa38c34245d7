import random

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from brickphase.model import contact_graph, precedence_graph
from brickphase.plan_format import serialize, validate_plan
from brickphase.samples import SCHEDULE_BOUNDARIES, SCHEDULE_PART_COUNT, bridge, l_model, pyramid, tower, twin_towers
from brickphase.sequencer import (
    CONFUSABILITY,
    MASK,
    SYMMETRY,
    NoFeasibleOrderError,
    PrefixScorer,
    SequencerConfig,
    UnplannableError,
    order_cost,
    order_steps,
    partition_boundaries,
    plan,
    plan_draft,
    schedule_violations,
)
from brickphase.stability import prefix_feasible


def _order(model, config=SequencerConfig()):
    cg = contact_graph(model, config.eps_contact)
    return order_steps(model, precedence_graph(model, cg), cg, config)


def _brute_force_best(model, config):
    pairs = oracles.beneath_pairs(model, config.eps_contact)
    best = None
    for order in oracles.all_orders(model.part_count):
        order = list(order)
        if oracles.is_topological(order, pairs) and oracles.first_violation(model, order) is None:
            cost = order_cost(model, order, config)
            if best is None or cost < best[0] - 1e-12:
                best = (cost, order)
    return best


# --- config ---------------------------------------------------------------------------


def test_default_config_values():
    c = SequencerConfig()
    assert (c.t_max, c.theta_sym, c.theta_dist, c.theta_conf, c.b_min, c.w_local, c.iters) == (
        40, 0.85, 0.05, 0.90, 8, 1.0, 2000)


@pytest.mark.parametrize("kw", [{"t_max": 0}, {"b_min": 0}, {"theta_sym": 1.5}, {"theta_conf": -0.1}, {"iters": -1}])
def test_config_invariants(kw):
    with pytest.raises(ValueError):
        SequencerConfig(**kw)


def test_with_overrides_ignores_foreign_keys():
    c = SequencerConfig().with_overrides(t_max=7, occlusion_limit=0.5)
    assert c.t_max == 7


# --- ordering -----------------------------------------------------------------------------


def test_single_tower_keeps_identity_order():
    assert _order(tower(6)) == [1, 2, 3, 4, 5, 6]


def test_plated_pyramid_order_is_exhaustive_minimum():
    m = pyramid(base_plate=True)
    order = _order(m)
    best_cost, best_order = _brute_force_best(m, SequencerConfig())
    assert best_cost == pytest.approx(180.94796963534083)  # frozen oracle value
    assert order_cost(m, order) == pytest.approx(best_cost)
    # every layer goes down before the next one starts
    assert order[0] == 1 and set(order[1:4]) == {2, 3, 4} and set(order[4:6]) == {5, 6} and order[6] == 7


def test_twin_towers_finish_one_tower_first():
    m = twin_towers(3)
    config = SequencerConfig(w_local=100.0)
    order = _order(m, config)
    best_cost, best_order = _brute_force_best(m, config)
    assert best_cost == pytest.approx(28741.06541562682)  # frozen oracle value
    assert order == best_order == [1, 2, 3, 4, 5, 6, 7]


def test_bare_pyramid_has_no_single_piece_order():
    # three separate ground rows can never be joined before the bridges on top
    with pytest.raises(NoFeasibleOrderError):
        _order(pyramid())


def test_bridge_has_no_feasible_order():
    with pytest.raises(NoFeasibleOrderError):
        _order(bridge())


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_order_steps_agrees_with_enumeration_on_feasibility(seed, n):
    m = oracles.random_model(random.Random(seed), n)
    config = SequencerConfig(iters=50)
    best = _brute_force_best(m, config)
    if best is None:
        with pytest.raises(NoFeasibleOrderError):
            _order(m, config)
        return
    order = _order(m, config)
    cg = contact_graph(m)
    assert precedence_graph(m, cg).is_topological(order)
    assert prefix_feasible(m, cg, order).feasible
    assert order_cost(m, order, config) >= best[0] - 1e-9


def test_local_search_never_raises_cost_and_is_seeded():
    m = l_model()
    greedy = _order(m, SequencerConfig(iters=0))
    searched = _order(m, SequencerConfig(iters=300, seed=3))
    assert order_cost(m, searched) <= order_cost(m, greedy) + 1e-12
    assert _order(m, SequencerConfig(iters=300, seed=3)) == searched


# --- partitioning ------------------------------------------------------------------------


def _mask_check(valid):
    return lambda b, prev: None if b in valid else MASK


def test_twelve_step_chain_needs_two_model_target_phases():
    bounds = partition_boundaries(12, _mask_check(set(range(2, 13))), t_max=5, b_min=2)
    assert bounds == [3, 8]
    assert oracles.min_phase_count(12, set(range(2, 13)), 5, 2) == len(bounds) == 2
    # with the bootstrap segment that is three segments in total
    assert 1 + len(bounds) == 3


def test_generous_tolerance_gives_a_single_phase():
    assert partition_boundaries(20, _mask_check(set(range(2, 21))), t_max=20, b_min=4) == [5]


@settings(max_examples=150)
@given(st.integers(2, 14), st.integers(1, 14), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_farthest_first_is_minimal_on_random_masks(n, t_max, b_min, seed):
    rng = random.Random(seed)
    valid = {b for b in range(2, n + 1) if rng.random() < 0.6}
    expected = oracles.min_phase_count(n, valid, t_max, b_min)
    if expected is None:
        with pytest.raises(UnplannableError):
            partition_boundaries(n, _mask_check(valid), t_max, b_min)
        return
    bounds = partition_boundaries(n, _mask_check(valid), t_max, b_min)
    assert len(bounds) == expected
    assert schedule_violations(n, bounds, t_max) == []
    assert all(b in valid for b in bounds)


def test_stuck_boundary_names_step_and_constraint():
    def check(b, prev):
        if b <= 4:
            return None
        return CONFUSABILITY if b == 6 else SYMMETRY

    with pytest.raises(UnplannableError) as info:
        partition_boundaries(12, check, t_max=2, b_min=2)
    # 3 is first, 4 is the only reachable step from 3, and from 4 the farthest candidate is 6
    assert info.value.step == 4
    assert info.value.constraint == CONFUSABILITY
    assert "unplannable" in str(info.value)


def test_one_part_model_is_unplannable():
    with pytest.raises(UnplannableError, match="unplannable"):
        plan(tower(1))


def test_fixture_schedule_tolerance_boundary():
    # largest gap between consecutive starts is 226 - 165 = 61
    assert schedule_violations(SCHEDULE_PART_COUNT, SCHEDULE_BOUNDARIES, 61, cap_final_phase=False) == []
    assert schedule_violations(SCHEDULE_PART_COUNT, SCHEDULE_BOUNDARIES, 60, cap_final_phase=False) != []
    # counting the open-ended final phase as well needs 386 - 226 + 1 = 161
    assert schedule_violations(SCHEDULE_PART_COUNT, SCHEDULE_BOUNDARIES, 161) == []
    assert schedule_violations(SCHEDULE_PART_COUNT, SCHEDULE_BOUNDARIES, 160) != []


def test_schedule_violations_reports_bad_boundaries():
    assert "strictly ascending" in schedule_violations(10, [5, 5], 10)[0]
    assert schedule_violations(10, [1], 10) != []
    assert schedule_violations(10, [], 10) == ["no phases"]


# --- full planning ------------------------------------------------------------------------


def test_l_model_plan_validates_with_oracle_minimum():
    m = l_model()
    config = SequencerConfig()
    draft = plan_draft(m, config)
    scorer = PrefixScorer(m, draft.order, config)
    valid = {b for b in range(2, m.part_count + 1) if scorer.check(b, None) is None}
    assert draft.phase_count == oracles.min_phase_count(m.part_count, valid, config.t_max, config.b_min)
    assert draft.bootstrap_end == draft.boundaries[0] - 1 >= config.b_min
    result = plan(m, config)
    assert validate_plan(result) == []
    for sym, dist, conf in draft.phase_scores:
        assert sym <= config.theta_sym and dist >= config.theta_dist


def test_plan_is_idempotent():
    m = l_model()
    assert serialize(plan(m)) == serialize(plan(m))


def test_tight_tolerance_forces_more_phases():
    m = l_model()
    draft = plan_draft(m, SequencerConfig(t_max=2, b_min=2, theta_sym=1.0, theta_dist=0.0, theta_conf=1.0, iters=0))
    assert draft.phase_count >= 2
    assert schedule_violations(m.part_count, draft.boundaries, 2) == []
