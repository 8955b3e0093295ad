import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from antenna_placement.array_model import (
    Placement,
    ProblemConfig,
    Weights,
    coherence_direct,
    coherence_factorized,
    coherence_of_matrix,
    correlation_profile,
    difference_vectors,
    effective_column,
    make_u_grid,
    measurement_matrix,
    position_grid,
    steering_vector,
)

from oracles import column, pairwise_coherence


def random_placement(rng, config):
    tx = rng.choice(config.m_tilde, config.m, replace=False)
    rx = rng.choice(config.n_tilde, config.n, replace=False)
    return Placement(tuple(tx), tuple(rx))


@st.composite
def small_instances(draw, max_g=16):
    m_tilde = draw(st.integers(1, 8))
    n_tilde = draw(st.integers(1, 8))
    m = draw(st.integers(1, m_tilde))
    n = draw(st.integers(1, n_tilde))
    g = draw(st.integers(2, max_g))
    config = ProblemConfig(m_tilde, n_tilde, m, n, g)
    tx = draw(st.lists(st.integers(0, m_tilde - 1), min_size=m, max_size=m, unique=True))
    rx = draw(st.lists(st.integers(0, n_tilde - 1), min_size=n, max_size=n, unique=True))
    return config, Placement(tuple(tx), tuple(rx))


class TestConfig:
    def test_default_anchor_is_last_grid_point(self):
        assert ProblemConfig(4, 4, 2, 2, 8).anchor_index == 8

    @pytest.mark.parametrize("kwargs", [
        dict(m_tilde=4, n_tilde=4, m=0, n=2, g_count=8),
        dict(m_tilde=4, n_tilde=4, m=5, n=2, g_count=8),
        dict(m_tilde=4, n_tilde=4, m=2, n=5, g_count=8),
        dict(m_tilde=4, n_tilde=4, m=2, n=2, g_count=1),
        dict(m_tilde=4, n_tilde=4, m=2, n=2, g_count=8, anchor_index=0),
        dict(m_tilde=4, n_tilde=4, m=2, n=2, g_count=8, anchor_index=9),
    ])
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(ValueError):
            ProblemConfig(**kwargs)

    def test_placement_validation(self):
        config = ProblemConfig(4, 4, 2, 2, 8)
        Placement((3, 0), (1, 2)).validate(config)
        with pytest.raises(ValueError):
            Placement((0, 0), (1, 2))
        with pytest.raises(ValueError):
            Placement((0, 4), (1, 2)).validate(config)
        with pytest.raises(ValueError):
            Placement((0,), (1, 2)).validate(config)

    def test_placement_sorted_and_weights(self):
        placement = Placement((3, 0), (2, 1))
        assert placement.tx_indices == (0, 3)
        w_t, w_r = placement.weights(ProblemConfig(4, 4, 2, 2, 8))
        assert w_t.tolist() == [1, 0, 0, 1]
        assert Placement.from_weights(w_t, w_r) == placement

    def test_weights_pin_eliminated(self):
        with pytest.raises(ValueError):
            Weights([0.5, 0.5], eliminated={0})
        w = Weights([0.0, 1.0, 0.0], eliminated={0}, sum_target=1)
        assert w.surviving.tolist() == [1, 2]
        assert w.support_size == 1
        with pytest.raises(ValueError):
            w.values[0] = 1.0


class TestGrids:
    def test_u_grid_g4(self):
        np.testing.assert_allclose(make_u_grid(4), [-0.5, 0.0, 0.5, 1.0], atol=1e-15)

    def test_u_grid_g2(self):
        np.testing.assert_allclose(make_u_grid(2), [0.0, 1.0], atol=1e-15)

    def test_u_grid_g200(self):
        u = make_u_grid(200)
        assert u.size == 200 and u[-1] == 1.0
        np.testing.assert_allclose(np.diff(u), 0.01, atol=1e-12)

    def test_u_grid_rejects_small(self):
        with pytest.raises(ValueError):
            make_u_grid(1)

    def test_position_grid(self):
        np.testing.assert_allclose(position_grid(4), [0, 0.5, 1.0, 1.5])

    def test_steering_zero_phase(self):
        np.testing.assert_allclose(steering_vector(0.0, position_grid(5)), np.ones(5))

    def test_steering_u1(self):
        np.testing.assert_allclose(steering_vector(1.0, [0, 0.5]), [1, -1], atol=1e-12)

    def test_steering_u_half(self):
        np.testing.assert_allclose(steering_vector(0.5, [0, 0.5, 1]), [1, 1j, -1], atol=1e-12)

    def test_steering_empty(self):
        with pytest.raises(ValueError):
            steering_vector(0.3, [])

    @given(st.floats(-1, 1), st.integers(1, 50))
    def test_steering_unit_modulus(self, u, size):
        np.testing.assert_allclose(np.abs(steering_vector(u, position_grid(size))), 1.0, atol=1e-12)


class TestDifferenceVectors:
    def test_anchor_excluded(self):
        diffs = difference_vectors(ProblemConfig(3, 3, 1, 1, 6, anchor_index=2))
        assert diffs.grid_indices.tolist() == [1, 3, 4, 5, 6]
        with pytest.raises(KeyError):
            diffs.tx(2)

    def test_small_example(self):
        diffs = difference_vectors(ProblemConfig(2, 2, 1, 1, 4))
        for g, u in zip((1, 2, 3), (-0.5, 0.0, 0.5)):
            np.testing.assert_allclose(diffs.tx(g), [1, np.exp(1j * np.pi * (u - 1))], atol=1e-12)

    @given(st.integers(2, 12), st.integers(1, 10), st.data())
    def test_definition_and_unit_modulus(self, G, size, data):
        anchor = data.draw(st.integers(1, G))
        config = ProblemConfig(size, size, 1, 1, G, anchor_index=anchor)
        diffs = difference_vectors(config)
        for g in diffs.grid_indices:
            expected = [np.conj(column([i], [0], anchor, G)[0]) * column([i], [0], g, G)[0] for i in range(size)]
            np.testing.assert_allclose(diffs.tx(int(g)), expected, atol=1e-12)
        np.testing.assert_allclose(np.abs(diffs.a_diff), 1.0, atol=1e-12)

    @given(st.integers(2, 32), st.integers(1, 12), st.integers(0, 2**32 - 1))
    def test_modulus_aliasing(self, G, size, seed):
        w = np.random.default_rng(seed).normal(size=size)
        diffs = difference_vectors(ProblemConfig(size, size, 1, 1, G))
        for k in range(1, G):
            # anchor G: grid index G - k sits at gap k
            assert abs(abs(w @ diffs.tx(G - k)) - abs(w @ diffs.tx(k))) < 1e-9


class TestEffectiveColumn:
    def test_full_arrays_give_kronecker_column(self):
        config = ProblemConfig(3, 2, 3, 2, 5)
        u = make_u_grid(5)[1]
        expected = np.kron(steering_vector(u, position_grid(2)), steering_vector(u, position_grid(3)))
        np.testing.assert_allclose(effective_column(np.ones(3), np.ones(2), 2, config), expected)

    @given(small_instances())
    def test_binary_support_and_norm(self, instance):
        config, placement = instance
        w_t, w_r = placement.weights(config)
        for g in range(1, config.g_count + 1):
            phi = effective_column(w_t, w_r, g, config)
            assert np.count_nonzero(phi) == config.m * config.n
            assert abs(np.linalg.norm(phi) - np.sqrt(config.m * config.n)) < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            effective_column(np.ones(3), np.ones(2), 1, ProblemConfig(2, 2, 1, 1, 4))

    @given(small_instances(max_g=10))
    def test_factorization_every_pair(self, instance):
        config, placement = instance
        w_t, w_r = placement.weights(config)
        a = [effective_column(w_t, np.ones(config.n_tilde), g, config)[: config.m_tilde] for g in range(1, config.g_count + 1)]
        b = [effective_column(np.ones(config.m_tilde), w_r, g, config)[:: config.m_tilde] for g in range(1, config.g_count + 1)]
        for g in range(1, config.g_count + 1):
            for h in range(1, config.g_count + 1):
                lhs = abs(np.vdot(effective_column(w_t, w_r, h, config), effective_column(w_t, w_r, g, config)))
                tx = abs(np.vdot(a[h - 1], a[g - 1]))
                rx = abs(np.vdot(b[h - 1], b[g - 1]))
                assert abs(lhs - tx * rx) < 1e-10


class TestCoherence:
    def test_identical_columns(self):
        phi = np.array([[1, 1, 0], [1j, 1j, 1]], dtype=complex)
        assert coherence_of_matrix(phi) == pytest.approx(1.0)

    def test_full_2x2_g4(self):
        assert coherence_direct(Placement((0, 1), (0, 1)), ProblemConfig(2, 2, 2, 2, 4)) == pytest.approx(0.5, abs=1e-12)

    def test_orthogonal_case(self):
        config = ProblemConfig(2, 2, 2, 2, 2)
        diffs = difference_vectors(config)
        assert coherence_factorized(np.ones(2), np.ones(2), diffs) == pytest.approx(0.0, abs=1e-12)

    def test_measurement_matrix_matches_loop_columns(self):
        config = ProblemConfig(6, 5, 3, 2, 7)
        placement = Placement((0, 2, 5), (1, 4))
        phi = measurement_matrix(placement, config)
        for g in range(1, 8):
            np.testing.assert_allclose(phi[:, g - 1], column(placement.tx_indices, placement.rx_indices, g, 7), atol=1e-12)

    @given(small_instances(max_g=12))
    def test_direct_matches_pairwise_oracle(self, instance):
        config, placement = instance
        assert abs(coherence_direct(placement, config)
                   - pairwise_coherence(placement.tx_indices, placement.rx_indices, config.g_count)) < 1e-10

    def test_direct_matches_factorized_random(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            m, n = rng.integers(1, 9, size=2)
            config = ProblemConfig(8, 8, int(m), int(n), 16)
            placement = random_placement(rng, config)
            w_t, w_r = placement.weights(config)
            factorized = coherence_factorized(w_t, w_r, difference_vectors(config))
            assert abs(coherence_direct(placement, config) - factorized) < 1e-10

    @given(small_instances(max_g=16))
    def test_direct_in_unit_interval(self, instance):
        config, placement = instance
        assert 0.0 <= coherence_direct(placement, config) <= 1.0

    @given(small_instances(max_g=16))
    def test_shift_invariance(self, instance):
        config, placement = instance
        phi = measurement_matrix(placement, config)
        gram = np.abs(phi.conj().T @ phi)
        G = config.g_count
        for gap in range(G):
            values = [gram[g, g + gap] for g in range(G - gap)]
            assert np.ptp(values) < 1e-9

    def test_factorized_anchor_mismatch(self):
        diffs = difference_vectors(ProblemConfig(3, 3, 1, 1, 6))
        with pytest.raises(ValueError):
            coherence_factorized(np.ones(3), np.ones(3), diffs, anchor_index=2)

    def test_relaxed_normalization(self):
        config = ProblemConfig(5, 4, 2, 2, 9)
        diffs = difference_vectors(config)
        w_t = np.array([0.4, 0.4, 0.4, 0.4, 0.4])
        w_r = np.array([0.5, 0.5, 0.5, 0.5])
        expected = correlation_profile(w_t, w_r, diffs).max() / 4.0
        assert coherence_factorized(w_t, w_r, diffs) == pytest.approx(expected, rel=1e-12)
