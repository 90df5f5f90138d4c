"""Tests for the OFDM modem: DFT convention, CP structure, diagonalization."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from ltelink.channel import channel_frequency_response
from ltelink.grid import SystemConfig, used_subcarrier_bins
from ltelink.ofdm import (
    DftSpec,
    dft_coefficient,
    dft_matrix,
    demodulate_frame,
    modulate_frame,
    ofdm_demodulate,
    ofdm_modulate,
    TimeDomainSignal,
)

CFG = SystemConfig()  # 5 MHz, 512-FFT, 300 used, CP 16


class TestDftCoefficient:
    def test_dc_entry(self):
        assert dft_coefficient(4, 0, 0) == pytest.approx(0.5 + 0j)

    def test_quarter_rotation(self):
        # exp(-j*pi/2)/2, evaluated by hand
        assert dft_coefficient(4, 1, 1) == pytest.approx(0 - 0.5j)

    def test_row_zero_sums_to_sqrt_n(self):
        for n in (2, 4, 8, 16):
            total = sum(dft_coefficient(n, 0, k) for k in range(n))
            assert total == pytest.approx(np.sqrt(n))

    def test_rejects_out_of_range_indices(self):
        with pytest.raises(ValueError, match="out of range"):
            dft_coefficient(4, 4, 0)
        with pytest.raises(ValueError, match="out of range"):
            dft_coefficient(4, 0, -1)

    @pytest.mark.parametrize("n", [2, 4, 8, 16, 32])
    def test_matrix_is_unitary(self, n):
        f = DftSpec(n).matrix()
        assert_allclose(f @ f.conj().T, np.eye(n), atol=1e-12)

    def test_matrix_matches_coefficients(self):
        n = 8
        f = dft_matrix(n)
        for l in range(n):
            for k in range(n):
                assert f[l, k] == pytest.approx(dft_coefficient(n, l, k))

    def test_fft_agrees_with_matrix(self):
        # the FFT implementation must equal the explicit coefficient matrix
        rng = np.random.default_rng(3)
        n = 64
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        assert_allclose(np.fft.fft(x) / np.sqrt(n), dft_matrix(n) @ x, atol=1e-10)


class TestModulate:
    def test_zero_column_gives_zero_symbol(self):
        out = ofdm_modulate(np.zeros(CFG.n_used, dtype=complex), CFG)
        assert out.shape == (CFG.symbol_len,)
        assert np.all(out == 0)

    def test_cyclic_prefix_equals_tail(self):
        rng = np.random.default_rng(0)
        col = rng.standard_normal(CFG.n_used) + 1j * rng.standard_normal(CFG.n_used)
        out = ofdm_modulate(col, CFG)
        assert np.array_equal(out[: CFG.cp_len], out[CFG.n_fft :])

    def test_parseval_excluding_cp(self):
        rng = np.random.default_rng(1)
        col = rng.standard_normal(CFG.n_used) + 1j * rng.standard_normal(CFG.n_used)
        out = ofdm_modulate(col, CFG)
        body = out[CFG.cp_len :]
        assert np.sum(np.abs(body) ** 2) == pytest.approx(np.sum(np.abs(col) ** 2))

    def test_rejects_wrong_length(self):
        with pytest.raises(ValueError, match="subcarriers"):
            ofdm_modulate(np.zeros(CFG.n_used + 1, dtype=complex), CFG)


class TestDemodulate:
    def test_round_trip_is_identity(self):
        rng = np.random.default_rng(2)
        for _ in range(5):
            col = rng.standard_normal(CFG.n_used) + 1j * rng.standard_normal(CFG.n_used)
            back = ofdm_demodulate(ofdm_modulate(col, CFG), CFG)
            assert_allclose(back, col, atol=1e-12)

    def test_one_tap_unit_channel_is_transparent(self):
        rng = np.random.default_rng(3)
        col = rng.standard_normal(CFG.n_used) + 1j * rng.standard_normal(CFG.n_used)
        tx = ofdm_modulate(col, CFG)
        rx = np.convolve(tx, [1.0 + 0j])[: len(tx)]
        assert_allclose(ofdm_demodulate(rx, CFG), col, atol=1e-12)

    def test_rejects_wrong_length(self):
        with pytest.raises(ValueError, match="symbol"):
            ofdm_demodulate(np.zeros(CFG.symbol_len - 1, dtype=complex), CFG)

    def test_cp_covered_channel_diagonalizes(self):
        # after an L-tap channel with L <= cp_len, Y_k = H_k * X_k; the
        # reference H_k is the directly evaluated sum over taps
        rng = np.random.default_rng(4)
        L = 12
        taps = (rng.standard_normal(L) + 1j * rng.standard_normal(L)) / np.sqrt(2 * L)
        col = rng.standard_normal(CFG.n_used) + 1j * rng.standard_normal(CFG.n_used)
        tx = ofdm_modulate(col, CFG)
        rx = np.convolve(tx, taps)[: len(tx)]
        got = ofdm_demodulate(rx, CFG)
        bins = used_subcarrier_bins(CFG)
        h_ref = np.array(
            [sum(taps[l] * np.exp(-2j * np.pi * k * l / CFG.n_fft) for l in range(L)) for k in bins]
        )
        assert_allclose(got, h_ref * col, atol=1e-10)


class TestFrameHelpers:
    def test_frame_round_trip_multi_antenna(self):
        rng = np.random.default_rng(5)
        values = rng.standard_normal((2, CFG.n_used, 7)) + 1j * rng.standard_normal(
            (2, CFG.n_used, 7)
        )
        sig = modulate_frame(values, CFG)
        assert sig.samples.shape == (2, 7 * CFG.symbol_len)
        assert sig.n_symbols == 7
        back = demodulate_frame(sig, CFG)
        assert_allclose(back, values, atol=1e-12)

    def test_single_column_consistent_with_frame(self):
        rng = np.random.default_rng(6)
        col = rng.standard_normal(CFG.n_used) + 1j * rng.standard_normal(CFG.n_used)
        via_frame = modulate_frame(col[None, :, None], CFG).samples[0]
        assert_allclose(ofdm_modulate(col, CFG), via_frame, atol=0)

    def test_signal_validates_length(self):
        with pytest.raises(ValueError, match="multiple"):
            TimeDomainSignal(np.zeros((1, CFG.symbol_len + 1), dtype=complex), CFG.symbol_len)


class TestCircularConvolutionDichotomy:
    """Per-subcarrier Y = H*X holds iff the CP covers the channel memory."""

    def _residual(self, n_taps: int, seed: int = 7) -> float:
        rng = np.random.default_rng(seed)
        values = (
            rng.standard_normal((1, CFG.n_used, 7)) + 1j * rng.standard_normal((1, CFG.n_used, 7))
        ) / np.sqrt(2)
        taps = (rng.standard_normal(n_taps) + 1j * rng.standard_normal(n_taps)) / np.sqrt(
            2 * n_taps
        )
        sig = modulate_frame(values, CFG)
        rx = np.convolve(sig.samples[0], taps)[: sig.samples.shape[1]]
        got = demodulate_frame(rx[None, :], CFG)[0]
        h = channel_frequency_response(taps, CFG.n_fft)[used_subcarrier_bins(CFG)]
        pred = h[:, None] * values[0]
        return float(np.linalg.norm(got - pred) / np.linalg.norm(pred))

    def test_cp_sufficient_has_no_residual(self):
        assert self._residual(CFG.cp_len + 1) < 1e-12

    def test_cp_insufficient_has_measurable_residual(self):
        assert self._residual(40) > 1e-3
