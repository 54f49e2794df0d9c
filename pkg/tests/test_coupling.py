"""Gain matrices, SINR evaluation, MVDR beamformers, coupling matrices."""
import numpy as np
import pytest

from maxminbf.coupling import (
    DegenerateBeamformerError,
    build_gain,
    dual_sinr,
    dual_sinr_quadratic,
    extended_matrix,
    mvdr,
    mvdr_matrix,
    primal_sinr,
)
from maxminbf.model import BeamformingMatrix, NetworkConfig

from conftest import random_instance, single_user_instance, uniform_instance


def _random_beamformers(JK, N, rng):
    u = rng.standard_normal((JK, N)) + 1j * rng.standard_normal((JK, N))
    return BeamformingMatrix(u=u / np.linalg.norm(u, axis=1, keepdims=True))


def _gain_oracle(channels, u):
    """Literal entry-by-entry evaluation of G(m,n) = |h(n,m)^H u_n|^2."""
    JK = channels.n_streams
    G = np.empty((JK, JK))
    for m in range(1, JK + 1):
        for n in range(1, JK + 1):
            G[m - 1, n - 1] = abs(np.vdot(channels.vec(n, m), u.u[n - 1])) ** 2
    return G


class TestBuildGain:
    def test_single_user_matched_filter(self):
        config, _, channels = single_user_instance(seed=1)
        h = channels.vec(1, 1)
        u = BeamformingMatrix(u=(h / np.linalg.norm(h))[None, :])
        gm = build_gain(channels, u)
        assert gm.g_mat[0, 0] == pytest.approx(np.linalg.norm(h) ** 2)
        assert gm.f_mat[0, 0] == 0.0
        assert gm.g_vec[0] == pytest.approx(1.0 / np.linalg.norm(h) ** 2)

    def test_scalar_channels(self):
        """N = 1: unit beamformers are phases, so G(m,n) = |h(n,m)|^2."""
        config, _, channels = random_instance(2, 1, 1, seed=3)
        u = BeamformingMatrix(u=np.ones((2, 1), dtype=complex))
        gm = build_gain(channels, u)
        for m in (1, 2):
            for n in (1, 2):
                assert gm.g_mat[m - 1, n - 1] == pytest.approx(
                    abs(channels.vec(n, m)[0]) ** 2)

    def test_matches_elementwise_oracle(self, rng):
        config, _, channels = random_instance(3, 2, 4, seed=5)
        u = _random_beamformers(6, 4, rng)
        gm = build_gain(channels, u)
        G = _gain_oracle(channels, u)
        np.testing.assert_allclose(gm.g_mat, G, rtol=1e-12)
        assert np.all(np.diagonal(gm.f_mat) == 0.0)
        np.testing.assert_allclose(gm.f_mat + np.diag(np.diagonal(G)), G,
                                   rtol=1e-12)

    def test_degenerate_beamformer_raises(self):
        from maxminbf.model import ChannelRealization
        vectors = np.zeros((1, 2, 2), dtype=complex)
        vectors[0, 0] = [1.0, 0.0]   # user 1's channel along e1
        vectors[0, 1] = [1.0, 1.0]
        channels = ChannelRealization(vectors=vectors, K=2, seed=0)
        # beamformer for stream 1 exactly orthogonal to its own channel
        u = BeamformingMatrix(u=np.array([[0.0, 1.0],
                                          [1.0, 0.0]], dtype=complex))
        with pytest.raises(DegenerateBeamformerError):
            build_gain(channels, u)


class TestSinr:
    def _sinr_oracle(self, p, channels, u, config):
        """Double-loop evaluation straight from the definition."""
        JK, N = config.n_streams, config.N
        out = np.empty(JK)
        for m in range(1, JK + 1):
            sig = (p[m - 1] / N) * abs(
                np.vdot(channels.vec(m, m), u.u[m - 1])) ** 2
            interf = sum(
                (p[n - 1] / N) * abs(np.vdot(channels.vec(n, m),
                                             u.u[n - 1])) ** 2
                for n in range(1, JK + 1) if n != m)
            out[m - 1] = sig / (interf + config.sigma[m - 1])
        return out

    def test_primal_matches_literal_oracle(self, rng):
        config, _, channels = random_instance(2, 3, 3, seed=11)
        u = _random_beamformers(6, 3, rng)
        gm = build_gain(channels, u)
        p = rng.uniform(0.5, 2.0, 6)
        np.testing.assert_allclose(primal_sinr(p, gm, config),
                                   self._sinr_oracle(p, channels, u, config),
                                   rtol=1e-12)

    def test_single_user_dual_closed_form(self):
        config, _, channels = single_user_instance(seed=13)
        h = channels.vec(1, 1)
        u = BeamformingMatrix(u=(h / np.linalg.norm(h))[None, :])
        gm = build_gain(channels, u)
        q = np.array([2.5])
        expected = (q[0] / config.N) * np.linalg.norm(h) ** 2 / config.w[0]
        assert dual_sinr(q, gm, config)[0] == pytest.approx(expected)

    def test_interference_free_primal(self):
        config, _, channels = single_user_instance(seed=17)
        h = channels.vec(1, 1)
        u = BeamformingMatrix(u=(h / np.linalg.norm(h))[None, :])
        gm = build_gain(channels, u)
        p = np.array([3.0])
        expected = (p[0] / config.N) * gm.g_mat[0, 0] / config.sigma[0]
        assert primal_sinr(p, gm, config)[0] == pytest.approx(expected)
        # homogeneity when there is no interference
        assert primal_sinr(4.0 * p, gm, config)[0] == pytest.approx(
            4.0 * expected)

    def test_symmetric_two_user_dual(self):
        """Hand-built symmetric instance: both users see the same dual SINR."""
        from maxminbf.model import ChannelRealization
        config = NetworkConfig.uniform(J=2, K=1, N=2, p_bar=1.0, sigma=1.0)
        h_own = np.array([1.0 + 0.0j, 0.0j])
        h_cross = np.array([0.5 + 0.0j, 0.5j])
        vectors = np.empty((2, 2, 2), dtype=complex)
        vectors[0, 0] = h_own
        vectors[0, 1] = h_cross
        vectors[1, 1] = h_own
        vectors[1, 0] = h_cross
        channels = ChannelRealization(vectors=vectors, K=1, seed=0)
        u = BeamformingMatrix(u=np.stack([h_own, h_own]))
        gm = build_gain(channels, u)
        g = dual_sinr(np.array([1.7, 1.7]), gm, config)
        assert g[0] == pytest.approx(g[1], rel=1e-12)

    def test_dual_equals_quadratic_form_at_mvdr(self):
        config, _, channels = random_instance(3, 2, 4, seed=19)
        rng = np.random.default_rng(19)
        q = rng.uniform(0.5, 2.0, 6)
        U = mvdr_matrix(channels, q, config)
        gm = build_gain(channels, U)
        np.testing.assert_allclose(dual_sinr(q, gm, config),
                                   dual_sinr_quadratic(channels, q, config),
                                   rtol=1e-10)


class TestMvdr:
    def test_no_interferers_matched_filter(self):
        config, _, channels = single_user_instance(seed=23)
        h = channels.vec(1, 1)
        u = mvdr(channels, np.array([1.0]), config, m=1)
        matched = h / np.linalg.norm(h)
        # equal up to a unimodular phase
        assert abs(abs(np.vdot(u, matched)) - 1.0) < 1e-12

    def test_small_q_limit_is_matched_filter(self):
        config, _, channels = random_instance(2, 2, 3, seed=29)
        q = np.full(4, 1e-12)
        for m in range(1, 5):
            u = mvdr(channels, q, config, m)
            h = channels.vec(m, m)
            assert abs(abs(np.vdot(u, h)) / np.linalg.norm(h) - 1.0) < 1e-9

    def test_unit_norm_and_matrix_consistency(self):
        config, _, channels = random_instance(3, 2, 4, seed=31)
        rng = np.random.default_rng(31)
        q = rng.uniform(0.5, 2.0, 6)
        U = mvdr_matrix(channels, q, config)
        np.testing.assert_allclose(np.linalg.norm(U.u, axis=1), 1.0,
                                   atol=1e-12)
        for m in range(1, 7):
            np.testing.assert_allclose(U.u[m - 1], mvdr(channels, q, config, m),
                                       rtol=1e-12)

    def test_beats_random_beamformers(self):
        """The MVDR direction maximizes its own dual SINR over the sphere."""
        config, _, channels = random_instance(2, 2, 3, seed=37)
        rng = np.random.default_rng(37)
        q = rng.uniform(0.5, 2.0, 4)
        U = mvdr_matrix(channels, q, config)
        gm = build_gain(channels, U)
        base = dual_sinr(q, gm, config)
        for _ in range(200):
            m = int(rng.integers(1, 5))
            v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            v /= np.linalg.norm(v)
            trial = U.u.copy()
            trial[m - 1] = v
            gm_v = build_gain(channels, BeamformingMatrix(u=trial))
            assert dual_sinr(q, gm_v, config)[m - 1] <= base[m - 1] + 1e-12


class TestExtendedMatrix:
    def test_single_user_scalar(self):
        config, _, channels = single_user_instance(seed=41)
        h = channels.vec(1, 1)
        u = BeamformingMatrix(u=(h / np.linalg.norm(h))[None, :])
        gm = build_gain(channels, u)
        B = extended_matrix(gm, config, "primal").b_mat
        expected = (config.beta[0] * config.sigma[0] * config.w[0]
                    / (config.p_bar * np.linalg.norm(h) ** 2))
        assert B[0, 0] == pytest.approx(expected, rel=1e-12)

    def test_nonnegative_entries(self, rng):
        config, _, channels = random_instance(3, 2, 4, seed=43)
        u = _random_beamformers(6, 4, rng)
        gm = build_gain(channels, u)
        for kind in ("primal", "dual"):
            assert np.all(extended_matrix(gm, config, kind).b_mat >= 0.0)

    def test_primal_dual_spectral_radii_agree(self, rng):
        """Independent dense eigenvalue oracle for the duality of radii."""
        for seed in range(5):
            config, _, channels = random_instance(2, 2, 3, seed=47 + seed)
            u = _random_beamformers(4, 3, rng)
            gm = build_gain(channels, u)
            rho_p = np.max(np.abs(np.linalg.eigvals(
                extended_matrix(gm, config, "primal").b_mat)))
            rho_d = np.max(np.abs(np.linalg.eigvals(
                extended_matrix(gm, config, "dual").b_mat)))
            assert rho_p == pytest.approx(rho_d, rel=1e-10)

    def test_unknown_kind_rejected(self, rng):
        config, _, channels = random_instance(1, 2, 2, seed=53)
        u = _random_beamformers(2, 2, rng)
        gm = build_gain(channels, u)
        with pytest.raises(ValueError):
            extended_matrix(gm, config, "sideways")
