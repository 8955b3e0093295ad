import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from antenna_placement.array_model import Placement, ProblemConfig, Weights, coherence_direct, difference_vectors
from antenna_placement.diap import diap_place, diap_trace, eliminate_smallest
from antenna_placement.riap import evenly_spaced_weights, random_binary_weights

from oracles import brute_force_optimum


class TestEliminateSmallest:
    def test_binary_target_untouched(self):
        w = eliminate_smallest(Weights([1.0, 0.0, 1.0, 0.0], eliminated={1, 3}, sum_target=2), p=0.33)
        assert w.eliminated == frozenset({1, 3})
        np.testing.assert_array_equal(w.values, [1, 0, 1, 0])

    def test_half_weights(self):
        w = eliminate_smallest(Weights([0.5, 0.5, 0.5, 0.5], sum_target=2), p=0.4)
        assert w.eliminated == frozenset({0})
        assert w.values.sum() == pytest.approx(1.5)

    def test_stops_on_count_guard(self):
        w = eliminate_smallest(Weights([0.9, 0.9, 0.1, 0.1], sum_target=2), p=0.33)
        assert w.eliminated == frozenset({2, 3})
        assert w.values.sum() == pytest.approx(1.8)

    def test_ties_break_to_lowest_index(self):
        w = eliminate_smallest(Weights([0.3, 0.2, 0.2, 0.3], sum_target=1), p=0.1)
        assert w.eliminated == frozenset({1})

    def test_zero_valued_survivors_go_first(self):
        w = eliminate_smallest(Weights([0.0, 0.5, 0.5, 0.0, 1.0], sum_target=2), p=0.01)
        # zeros leave the l1 mass at 2 > 1.99, so one 0.5 entry follows
        assert w.eliminated == frozenset({0, 1, 3})

    @given(st.lists(st.floats(0, 1), min_size=2, max_size=30), st.floats(0.01, 5), st.data())
    def test_guards(self, values, p, data):
        values = np.array(values)
        target = data.draw(st.integers(1, values.size))
        before = Weights(values, sum_target=target)
        after = eliminate_smallest(before, p)
        alive = values.size - len(after.eliminated)
        assert before.eliminated <= after.eliminated
        assert alive >= min(target, values.size)
        assert after.values.sum() <= target - p or alive == target or len(after.eliminated) == 0 and values.sum() <= target - p
        removed = sorted(after.eliminated)
        kept = [j for j in range(values.size) if j not in after.eliminated]
        if removed and kept:
            assert max(values[removed]) <= min(values[kept])


def test_full_grid_skips_loop():
    config = ProblemConfig(5, 4, 5, 4, 10)
    placement, trace = diap_place(config, 0.33, Weights(np.ones(5)))
    assert placement == Placement(tuple(range(5)), tuple(range(4)))
    assert len(trace) == 1


def test_rejects_nonpositive_p():
    config = ProblemConfig(5, 4, 2, 2, 10)
    for p in (0.0, -1.0):
        with pytest.raises(ValueError):
            diap_place(config, p, random_binary_weights(5, 2, 0))


def test_rejects_bad_init():
    config = ProblemConfig(5, 4, 2, 2, 10)
    with pytest.raises(ValueError):
        diap_place(config, 0.33, Weights(np.ones(5)))


def test_small_instance_above_exhaustive_optimum():
    config = ProblemConfig(4, 4, 2, 2, 8)
    optimum = brute_force_optimum(4, 4, 2, 2, 8)
    for seed in range(6):
        placement, _ = diap_place(config, 0.33, random_binary_weights(4, 2, seed))
        assert coherence_direct(placement, config) >= optimum - 1e-12


@st.composite
def configs(draw):
    m_tilde = draw(st.integers(2, 14))
    n_tilde = draw(st.integers(2, 14))
    return ProblemConfig(m_tilde, n_tilde, draw(st.integers(1, m_tilde)), draw(st.integers(1, n_tilde)),
                         draw(st.integers(2, 30)))


@given(configs(), st.floats(0.05, 4), st.integers(0, 2**32 - 1))
def test_feasible_trace_and_termination(config, p, seed):
    init = random_binary_weights(config.m_tilde, config.m, seed)
    placement, trace = diap_place(config, p, init)
    placement.validate(config)
    assert trace.tx_support[0] == config.m_tilde and trace.rx_support[0] == config.n_tilde
    assert trace.tx_support[-1] == config.m and trace.rx_support[-1] == config.n
    assert all(np.diff(trace.tx_support) <= 0) and all(np.diff(trace.rx_support) <= 0)
    unfinished_steps = [(t > config.m or r > config.n) for t, r in zip(trace.tx_support, trace.rx_support)]
    assert len(trace) - 1 <= max(config.m_tilde - config.m, config.n_tilde - config.n)
    assert all(unfinished_steps[:-1])


def test_deterministic():
    config = ProblemConfig(30, 30, 4, 4, 60)
    init = evenly_spaced_weights(30, 4)
    first, trace_a = diap_place(config, 0.5, init)
    second, trace_b = diap_place(config, 0.5, init)
    assert first == second
    assert trace_a.objectives == trace_b.objectives


def test_trace_matches_place():
    config = ProblemConfig(20, 16, 3, 3, 40)
    init = random_binary_weights(20, 3, 4)
    assert diap_trace(config, 0.33, init).tx_support == diap_place(config, 0.33, init)[1].tx_support


def test_larger_p_fewer_iterations_on_average():
    config = ProblemConfig(30, 30, 4, 4, 60)
    diffs = difference_vectors(config)
    means = []
    for p in (0.1, 0.33, 1.0, 3.0):
        counts = [len(diap_place(config, p, random_binary_weights(30, 4, seed), diffs=diffs)[1]) - 1
                  for seed in range(8)]
        means.append(np.mean(counts))
    assert all(a >= b for a, b in zip(means, means[1:]))
