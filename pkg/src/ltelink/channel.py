"""Rayleigh tap-delay-line MIMO channels and receiver noise.

The channel is applied to the whole multi-symbol stream by true linear
convolution, so a delay spread exceeding the cyclic prefix leaks energy
between consecutive OFDM symbols (genuine ISI/ICI) instead of being silently
circularized.  One realization is drawn per slot (block fading).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .ofdm import TimeDomainSignal

__all__ = [
    "PowerDelayProfile",
    "ChannelRealization",
    "NoiseSpec",
    "generate_channel",
    "channel_frequency_response",
    "apply_channel",
    "add_awgn",
]


@dataclass(frozen=True)
class PowerDelayProfile:
    """Average tap powers at integer-sample delays, normalized to unit energy."""

    tap_delays: np.ndarray
    tap_powers: np.ndarray

    def __post_init__(self) -> None:
        delays = np.asarray(self.tap_delays, dtype=np.int64)
        powers = np.asarray(self.tap_powers, dtype=np.float64)
        if delays.ndim != 1 or powers.shape != delays.shape or delays.size == 0:
            raise ValueError("tap_delays and tap_powers must be equal-length 1-D arrays")
        if delays[0] != 0 or np.any(np.diff(delays) <= 0):
            raise ValueError("tap delays must be strictly increasing and start at 0")
        if np.any(powers < 0):
            raise ValueError("tap powers must be non-negative")
        if abs(powers.sum() - 1.0) > 1e-12:
            raise ValueError(f"tap powers must sum to 1, got {powers.sum()!r}")
        object.__setattr__(self, "tap_delays", delays)
        object.__setattr__(self, "tap_powers", powers)
        delays.setflags(write=False)
        powers.setflags(write=False)

    @classmethod
    def uniform(cls, n_taps: int) -> "PowerDelayProfile":
        """n_taps consecutive-sample taps of equal average power."""
        if n_taps < 1:
            raise ValueError("need at least one tap")
        return cls(np.arange(n_taps), np.full(n_taps, 1.0 / n_taps))

    @property
    def n_taps(self) -> int:
        return len(self.tap_delays)

    @property
    def span(self) -> int:
        """Impulse-response length in samples (max delay + 1)."""
        return int(self.tap_delays[-1]) + 1

    def truncated(self, max_taps: int) -> "PowerDelayProfile":
        """First max_taps taps with powers renormalized to unit energy."""
        if max_taps < 1:
            raise ValueError("need at least one tap")
        if max_taps >= self.n_taps:
            return self
        powers = self.tap_powers[:max_taps]
        return PowerDelayProfile(self.tap_delays[:max_taps], powers / powers.sum())


@dataclass(frozen=True)
class ChannelRealization:
    """Complex tap gains for every (tx, rx) pair, drawn from one profile."""

    taps: np.ndarray  # (n_tx, n_rx, n_taps) complex128
    pdp: PowerDelayProfile

    def __post_init__(self) -> None:
        taps = np.asarray(self.taps, dtype=np.complex128)
        if taps.ndim != 3 or taps.shape[2] != self.pdp.n_taps:
            raise ValueError("taps must be (n_tx, n_rx, n_taps) matching the profile")
        object.__setattr__(self, "taps", taps)
        taps.setflags(write=False)

    @property
    def n_tx(self) -> int:
        return self.taps.shape[0]

    @property
    def n_rx(self) -> int:
        return self.taps.shape[1]

    def impulse_responses(self) -> np.ndarray:
        """Dense (n_tx, n_rx, span) responses with taps at their delays."""
        out = np.zeros((self.n_tx, self.n_rx, self.pdp.span), dtype=np.complex128)
        out[:, :, self.pdp.tap_delays] = self.taps
        return out

    def frequency_responses(self, n_fft: int, bins: np.ndarray | None = None) -> np.ndarray:
        """Exact per-pair frequency responses, optionally restricted to bins."""
        h = np.fft.fft(self.impulse_responses(), n_fft, axis=-1)
        return h if bins is None else h[:, :, bins]


def generate_channel(
    pdp: PowerDelayProfile, n_tx: int, n_rx: int, rng: np.random.Generator
) -> ChannelRealization:
    """Draw i.i.d. circularly-symmetric Gaussian taps (Rayleigh magnitudes).

    Tap l has variance tap_powers[l]; all (tx, rx) pairs are independent.
    """
    shape = (n_tx, n_rx, pdp.n_taps)
    scale = np.sqrt(pdp.tap_powers / 2.0)
    taps = scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    return ChannelRealization(taps=taps, pdp=pdp)


def channel_frequency_response(
    g: np.ndarray, n_fft: int, tap_delays: np.ndarray | None = None
) -> np.ndarray:
    """H_k = sum_l g_l * exp(-2j*pi*k*tau_l/n_fft) for k = 0..n_fft-1.

    No 1/sqrt(N) factor: with the unitary modem this makes the per-subcarrier
    model Y = H * X + W hold exactly for CP-sufficient channels.
    """
    g = np.asarray(g, dtype=np.complex128)
    if g.ndim != 1:
        raise ValueError("tap vector must be 1-D")
    if tap_delays is None:
        if len(g) > n_fft:
            raise ValueError("more taps than FFT bins")
        return np.fft.fft(g, n_fft)
    tap_delays = np.asarray(tap_delays, dtype=np.int64)
    if tap_delays.shape != g.shape:
        raise ValueError("tap_delays must parallel the tap vector")
    if tap_delays[-1] >= n_fft:
        raise ValueError("tap delay beyond the FFT span")
    dense = np.zeros(n_fft, dtype=np.complex128)
    dense[tap_delays] = g
    return np.fft.fft(dense)


def apply_channel(tx: TimeDomainSignal, ch: ChannelRealization) -> TimeDomainSignal:
    """Linear-convolve every tx stream with every (tx, rx) response and sum.

    The output is truncated to the input length; consecutive OFDM symbols
    therefore contaminate each other exactly when the channel memory exceeds
    the cyclic prefix.
    """
    if tx.n_antennas != ch.n_tx:
        raise ValueError(f"signal has {tx.n_antennas} streams, channel expects {ch.n_tx}")
    if tx.samples.shape[1] < ch.pdp.span:
        raise ValueError("stream shorter than the channel impulse response")
    rx = kernels.mimo_convolve(tx.samples, ch.impulse_responses())
    return TimeDomainSignal(rx, tx.symbol_len)


@dataclass(frozen=True)
class NoiseSpec:
    """Receiver AWGN level: per-sample variance = signal_power_ref / SNR.

    snr_db=+inf is the documented no-noise sentinel; NaN and -inf are invalid.
    signal_power_ref is the average constellation symbol power (1.0 for the
    unit-power constellations used here), so the per-subcarrier SNR after the
    unitary DFT equals the configured value.
    """

    snr_db: float
    signal_power_ref: float = 1.0

    def __post_init__(self) -> None:
        if np.isnan(self.snr_db) or self.snr_db == -np.inf:
            raise ValueError(f"invalid snr_db: {self.snr_db}")
        if not np.isfinite(self.signal_power_ref) or self.signal_power_ref <= 0:
            raise ValueError("signal_power_ref must be positive and finite")

    @property
    def noise_variance(self) -> float:
        """Complex per-sample variance sigma_w^2 (0 for the no-noise sentinel)."""
        if np.isinf(self.snr_db):
            return 0.0
        return self.signal_power_ref / 10.0 ** (self.snr_db / 10.0)


def add_awgn(signal: np.ndarray, noise: NoiseSpec, rng: np.random.Generator) -> np.ndarray:
    """Add i.i.d. complex Gaussian samples of variance noise.noise_variance."""
    signal = np.asarray(signal)
    var = noise.noise_variance
    if var == 0.0:
        return signal
    scale = np.sqrt(var / 2.0)
    w = scale * (rng.standard_normal(signal.shape) + 1j * rng.standard_normal(signal.shape))
    return signal + w
