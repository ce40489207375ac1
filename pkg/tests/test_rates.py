import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from hypothesis.extra.numpy import arrays

from conftest import cn
from ifofdm.channel import NetworkChannel, sample_network, symmetric_tap_grid
from ifofdm.phy import effective_matrix, make_frame_config
from ifofdm.rates import (
    fold_combiner,
    fold_combiner_link,
    fold_matrix,
    rate_no_csit,
    rate_with_csit,
    stream_snr,
    tdma_ofdm_rate,
    waterfill,
)


def bisection_waterfill(g, P, sigma2, iters=200):
    """Water level by bisection on sum(max(level - sigma2/g, 0)) = P."""
    floor = sigma2 / g[g > 0]
    lo, hi = 0.0, floor.max() + P
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if np.maximum(mid - floor, 0).sum() > P:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


class TestWaterfill:
    def test_single_mode(self):
        p, _ = waterfill([0.3], 2.5)
        np.testing.assert_allclose(p, [2.5])

    @pytest.mark.parametrize("m", [2, 5, 16])
    def test_equal_gains_split_evenly(self, m):
        p, _ = waterfill(np.full(m, 0.7), 3.0, 2.0)
        np.testing.assert_allclose(p, 3.0 / m)

    def test_weak_mode_left_dry(self):
        p, level = waterfill([1.0, 0.01], 1.0, 1.0)
        np.testing.assert_allclose(p, [1.0, 0.0])
        assert level <= 1 / 0.01
        assert level == pytest.approx(bisection_waterfill(np.array([1.0, 0.01]), 1.0, 1.0), rel=1e-12)

    def test_zero_gain_mode_gets_nothing(self):
        p, _ = waterfill([0.0, 2.0, 1.0], 4.0)
        assert p[0] == 0 and p.sum() == pytest.approx(4.0)

    @pytest.mark.parametrize("gains, P, sigma2", [([0, 0], 1, 1), ([1], 0, 1), ([1], 1, 0), ([-1, 1], 1, 1), ([np.nan], 1, 1)])
    def test_invalid(self, gains, P, sigma2):
        with pytest.raises(ValueError):
            waterfill(gains, P, sigma2)

    @given(
        arrays(float, st.integers(1, 12), elements=st.floats(1e-4, 1e4)),
        st.floats(1e-3, 1e4),
        st.floats(1e-3, 1e2),
    )
    def test_kkt(self, g, P, sigma2):
        p, level = waterfill(g, P, sigma2)
        assert np.all(p >= 0)
        assert abs(p.sum() - P) <= 1e-9 * P
        active = p > 0
        np.testing.assert_allclose(p[active] + sigma2 / g[active], level, rtol=1e-9)
        assert np.all(level <= sigma2 / g[~active] * (1 + 1e-12))
        assert level == pytest.approx(bisection_waterfill(g, P, sigma2), rel=1e-9)


class TestNoCsitRate:
    def test_single_stream(self):
        ch = sample_network(2, symmetric_tap_grid(2, 3, 2), seed=4)
        cfg = make_frame_config(ch, B=8)
        assert cfg.streams(0) == 1
        g = effective_matrix(ch, cfg, 0)[0, 0]
        P, sigma2 = 3.0, 0.5
        expected = np.log2(1 + abs(g) ** 2 * stream_snr(cfg, 0, P, sigma2)) / (cfg.N + cfg.L_I - 1)
        assert rate_no_csit(ch, cfg, P, sigma2)[0] == pytest.approx(expected, rel=1e-12)

    def test_snr_uses_prefix_fraction(self):
        cfg = make_frame_config(symmetric_tap_grid(2, 10, 6), B=1)
        assert stream_snr(cfg, 0, 1.0, 1.0) == pytest.approx((8 / 13) * (8 / 4))

    @pytest.mark.parametrize("taps", [(10, 4), (10, 6), (5, 2)])
    def test_below_log_det_capacity(self, taps):
        cfg = make_frame_config(symmetric_tap_grid(2, *taps), B=1)
        for child in np.random.SeedSequence(3).spawn(100):
            ch = sample_network(2, cfg.tap_lengths, seed=child)
            for snr_db in (0, 20):
                P = 10 ** (snr_db / 10)
                H = effective_matrix(ch, cfg, 0)
                snr = stream_snr(cfg, 0, P, 1.0)
                _, logdet = np.linalg.slogdet(np.eye(H.shape[0]) + snr * H @ H.conj().T)
                bound = logdet / np.log(2) / cfg.Nbar
                assert rate_no_csit(ch, cfg, P, 1.0)[0] <= bound * (1 + 1e-10)

    def test_finite_block_overhead(self):
        cfg = make_frame_config(symmetric_tap_grid(2, 5, 3), B=4)
        ch = sample_network(2, cfg.tap_lengths, seed=0)
        inf = rate_no_csit(ch, cfg, 10.0, 1.0)
        fin = rate_no_csit(ch, cfg, 10.0, 1.0, finite_B=True)
        np.testing.assert_allclose(fin, inf * cfg.B * cfg.Nbar / (cfg.B * cfg.Nbar + cfg.L_D - 1))

    def test_silent_user_has_zero_rate(self):
        grid = np.array([[4, 2], [2, 2]])
        ch = sample_network(2, grid, seed=1)
        cfg = make_frame_config(ch, B=1)
        assert rate_no_csit(ch, cfg, 10.0, 1.0)[1] == 0
        assert rate_with_csit(ch, cfg, 10.0, 1.0)[1] == 0

    def test_bad_noise(self):
        ch = sample_network(2, symmetric_tap_grid(2, 2, 1), seed=1)
        cfg = make_frame_config(ch, B=1)
        with pytest.raises(ValueError):
            rate_no_csit(ch, cfg, 1.0, 0.0)


class TestCsitRate:
    def test_scalar_channel_matches_no_csit(self):
        ch = sample_network(3, symmetric_tap_grid(3, 2, 1), seed=11)
        cfg = make_frame_config(ch, B=1)
        np.testing.assert_allclose(rate_with_csit(ch, cfg, 5.0, 1.0), rate_no_csit(ch, cfg, 5.0, 1.0), rtol=1e-12)

    @pytest.mark.parametrize("L_I", [2, 4, 6])
    @pytest.mark.parametrize("snr_db", [0, 15, 30])
    def test_never_below_no_csit(self, L_I, snr_db):
        cfg = make_frame_config(symmetric_tap_grid(2, 10, L_I), B=1)
        P = 10 ** (snr_db / 10)
        for child in np.random.SeedSequence(L_I).spawn(100):
            ch = sample_network(2, cfg.tap_lengths, seed=child)
            assert np.all(rate_with_csit(ch, cfg, P, 1.0) >= rate_no_csit(ch, cfg, P, 1.0) - 1e-12)

    def test_equals_capacity_of_effective_channel(self):
        # waterfilling over the singular values is the log-det capacity optimum,
        # so no random covariance with the same trace does better
        cfg = make_frame_config(symmetric_tap_grid(2, 7, 3), B=1)
        ch = sample_network(2, cfg.tap_lengths, seed=5)
        H = effective_matrix(ch, cfg, 0)
        m = H.shape[0]
        budget = m * stream_snr(cfg, 0, 2.0, 1.0)
        best = rate_with_csit(ch, cfg, 2.0, 1.0)[0] * cfg.Nbar
        rng = np.random.default_rng(0)
        for _ in range(200):
            A = cn(rng, m, m)
            Qx = A @ A.conj().T
            Qx *= budget / np.trace(Qx).real
            _, ld = np.linalg.slogdet(np.eye(m) + H @ Qx @ H.conj().T)
            assert ld / np.log(2) <= best + 1e-9


class TestTdma:
    def test_flat_single_user(self):
        ch = NetworkChannel(([0.5 + 0.5j],))
        r = tdma_ofdm_rate(ch, 4.0, 1.0, M=16)
        assert r[0] == pytest.approx(16 * np.log2(1 + 4.0 * 0.5) / 16)

    def test_share_and_prefix(self):
        ch = sample_network(3, symmetric_tap_grid(3, 2, 1), seed=2)
        M = 8
        r = tdma_ofdm_rate(ch, 10.0, 1.0, M=M)
        lam = np.fft.fft(ch.desired(1), M)
        own = np.sum(np.log2(1 + 10.0 * np.abs(lam) ** 2)) / (M + 1)
        assert r[1] == pytest.approx(own / 3, rel=1e-12)

    def test_too_many_taps(self):
        ch = sample_network(1, [[9]], seed=0)
        with pytest.raises(ValueError):
            tdma_ofdm_rate(ch, 1.0, 1.0, M=8)


class TestFoldCombiner:
    def test_two_point_fold(self):
        np.testing.assert_array_equal(fold_combiner(np.array([1.0, 2.0, 3.0, 4.0]), 2, 2), [4, 2])

    def test_fold_matrix(self):
        np.testing.assert_array_equal(fold_matrix(2, 2, 4), [[1, 0, 1, 0], [0, 1, 0, 0]])

    def test_single_tap_is_identity(self, rng):
        y = cn(rng, 6)
        np.testing.assert_array_equal(fold_combiner(y, 4, 1), y[:4])

    def test_too_short(self):
        with pytest.raises(ValueError):
            fold_combiner(np.zeros(2), 2, 2)

    def test_noiseless_link_matrix_identity(self, rng):
        # desired 3 taps plus a 2-tap interferer, both on f1
        h, g = cn(rng, 3), cn(rng, 2)
        s, t = cn(rng, 1)[0], cn(rng, 1)[0]
        f1 = np.ones(2) / np.sqrt(2)
        y = np.convolve(h, f1 * s) + np.concatenate([np.convolve(g, f1 * t), [0]])
        folded = fold_combiner(y, 2, 2)
        H = np.array([[h[0] + h[2], h[1]], [h[1], h[0]]])
        Gc = np.array([[g[0], g[1]], [g[1], g[0]]])
        np.testing.assert_allclose(folded, H @ f1 * s + Gc @ f1 * t, atol=1e-14)

    def test_folded_noise_variance(self):
        rng = np.random.default_rng(1)
        z = cn(rng, 200_000, 4)
        f2 = np.array([1, -1]) / np.sqrt(2)
        proj = np.array([f2.conj() @ fold_combiner(row, 2, 2) for row in z])
        assert np.mean(np.abs(proj) ** 2) == pytest.approx(1.5, rel=0.02)


class TestFoldLink:
    @given(st.integers(0, 2**32 - 1), st.floats(0.01, 1e4), st.floats(0.01, 10))
    def test_closed_form(self, seed, P, sigma2):
        h = cn(np.random.default_rng(seed), 3)
        assume(abs(h[2]) > 1e-6)
        link = fold_combiner_link(h, L_I=2, P=P, sigma2=sigma2)
        assert abs(link.gain) == pytest.approx(abs(h[2]) / 2, rel=1e-12)
        assert link.noise_var == pytest.approx(1.5 * sigma2, rel=1e-12)
        expected = np.log2(1 + P * abs(h[2]) ** 2 / (6 * sigma2))
        assert link.bits_per_symbol == pytest.approx(expected, rel=1e-9)
        assert link.rate == pytest.approx(expected / 4, rel=1e-9)


@pytest.mark.parametrize("fn", [rate_no_csit, rate_with_csit])
def test_vector_power_matches_scalar_calls(fn):
    cfg = make_frame_config(symmetric_tap_grid(3, 10, 4), B=2)
    ch = sample_network(3, cfg.tap_lengths, seed=9)
    Ps = np.array([0.0, 1.0, 10.0, 1000.0])
    batch = fn(ch, cfg, Ps, 1.0)
    assert batch.shape == (4, 3)
    for j, P in enumerate(Ps):
        np.testing.assert_allclose(batch[j], fn(ch, cfg, P, 1.0), rtol=1e-13, atol=0)
    np.testing.assert_array_equal(batch[0], 0)
